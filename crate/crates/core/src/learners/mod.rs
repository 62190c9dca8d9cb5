//! Consistent proper learners (ERMs) that plug into the compression pipeline.
//!
//! Every ERM must be a deterministic function of its ordered training
//! subsample: reconstruction re-trains from stored examples and relies on
//! getting a behaviorally identical hypothesis back.

mod bv;
mod dims;
mod lipschitz;
mod threshold;

use std::fmt;
use std::sync::Arc;

pub use bv::{bv_erm, BvClass, BvErm, StepFunction};
pub use dims::{fat_dim_bv, fat_dim_lipschitz, total_variation};
pub use lipschitz::{lipschitz_erm, LipschitzClass, LipschitzErm, MidpointExtension};
pub use threshold::{threshold_erm, ThresholdClassifier, ThresholdErm};

use crate::error::{invalid, Result};
use crate::types::{Point, Predictor, TaskKind};

/// Labels closer than this are treated as the same label when merging
/// duplicate points or checking interpolation.
pub const LABEL_TOLERANCE: f64 = 1e-12;

/// A proper learner that fits its training subsample exactly.
pub trait Erm: Send + Sync + fmt::Debug {
    /// Identifier stored in compression sets, e.g. `bv:v=1`.
    fn id(&self) -> String;

    fn task(&self) -> TaskKind;

    fn fit(&self, subsample: &[(Point, f64)]) -> Result<Arc<dyn Predictor>>;

    /// Fat-shattering dimension of the hypothesis class at scale `t`;
    /// `None` when it is infinite or unknown.
    fn fat_dim(&self, t: f64) -> Option<u64>;
}

/// Rebuilds an ERM from the identifier it writes into compression sets.
pub fn erm_from_id(id: &str) -> Result<Arc<dyn Erm>> {
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| invalid(format!("bad numeric parameter in erm id {id:?}")))
    };
    if id == "threshold" {
        return Ok(Arc::new(ThresholdErm));
    }
    if let Some(v) = id.strip_prefix("bv:v=") {
        return Ok(Arc::new(BvErm::new(BvClass::new(parse(v)?)?)));
    }
    if let Some(l) = id.strip_prefix("lipschitz:L=") {
        return Ok(Arc::new(LipschitzErm::new(LipschitzClass::new(
            parse(l)?,
            1.0,
            1.0,
        )?)));
    }
    Err(invalid(format!("unknown erm id {id:?}")))
}
