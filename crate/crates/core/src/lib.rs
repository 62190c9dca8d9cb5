//! Sample compression for real-valued learning by boosting a consistent
//! learner, sparsifying the ensemble and storing the training subsamples of
//! the survivors.
//!
//! The pipeline is [`run_medboost`] → [`sparsify`] → [`compress`], undone by
//! [`reconstruct`]. The [`duality`] module holds finite versions of the
//! combinatorial constructions that bound the dual dimension.

pub mod compress;
pub mod duality;
pub mod error;
pub mod experiment;
pub mod learners;
pub mod medboost;
pub mod quantile;
pub mod rng;
pub mod sparsify;
pub mod synth;
pub mod types;
pub mod weaklearn;

pub use compress::{
    compress, compress_with_details, deserialize, reconstruct, serialize, CompressionDetails,
    CompressionSet, ReconstructedHypothesis, SchemeMeta, StoredPoint,
};
pub use error::{Error, Result};
pub use learners::{erm_from_id, BvErm, Erm, LipschitzErm, ThresholdErm};
pub use medboost::{run_medboost, BoostConfig, BoostTrace, RoundsPolicy};
pub use quantile::{median, weighted_median, weighted_quantile_lower, weighted_quantile_upper};
pub use sparsify::{sparsify, SparseEnsemble, SparsifyConfig, SparsifyPolicy};
pub use types::{
    EmpiricalDistribution, Hypothesis, LabeledSample, Point, Predictor, TaskKind, WeightedEnsemble,
};
pub use weaklearn::{GenericWeakLearner, WeakCertificate, WeakLearnConfig, WeakLearner};
