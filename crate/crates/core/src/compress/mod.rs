//! Compression and reconstruction.
//!
//! A compression set stores, for each member of the sparse ensemble, the
//! subsample its weak hypothesis was trained on. Points are kept once per
//! occurrence in canonical order (ascending original index) and the side
//! information records how to cut them back into ordered groups. The ERM is
//! then re-run on each group to rebuild the members.

mod codec;
pub mod sideinfo;

use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;

pub use codec::{deserialize, serialize, FORMAT_VERSION, MAGIC};

use crate::error::{invalid, Error, Result};
use crate::learners::Erm;
use crate::medboost::{run_medboost, BoostConfig, BoostTrace};
use crate::quantile::median;
use crate::sparsify::{sparsify, SparseEnsemble, SparsifyConfig};
use crate::types::{LabeledSample, Point, Predictor, TaskKind, WeightedEnsemble};
use crate::weaklearn::{GenericWeakLearner, WeakLearnConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeMeta {
    pub eta: f64,
    pub gamma: f64,
    pub task: TaskKind,
    pub erm_id: String,
    pub version: u16,
}

/// One stored example with its index in the original sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredPoint {
    pub index: usize,
    pub point: Point,
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionSet {
    meta: SchemeMeta,
    points: Vec<StoredPoint>,
    side_info: Vec<bool>,
    groups: Vec<Vec<usize>>,
    /// For each group, its members as positions into `points`.
    layout: Vec<Vec<usize>>,
}

impl CompressionSet {
    /// Builds the set from groups of original-sample indices.
    pub fn from_groups(
        meta: SchemeMeta,
        sample: &LabeledSample,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if groups.is_empty() {
            return Err(invalid("a compression set needs at least one group"));
        }
        if let Some(j) = groups.iter().position(|g| g.is_empty()) {
            return Err(invalid(format!("group {j} is empty")));
        }
        if sample.kind() != meta.task {
            return Err(invalid(format!(
                "sample is {} but the scheme is {}",
                sample.kind(),
                meta.task
            )));
        }
        let flat: Vec<usize> = groups.iter().flatten().copied().collect();
        if let Some(&bad) = flat.iter().find(|&&i| i >= sample.len()) {
            return Err(invalid(format!(
                "index {bad} outside a sample of {}",
                sample.len()
            )));
        }
        let mut canon: Vec<usize> = (0..flat.len()).collect();
        canon.sort_by_key(|&p| flat[p]);
        let mut perm = vec![0usize; flat.len()];
        for (c, &p) in canon.iter().enumerate() {
            perm[p] = c;
        }
        let points = canon
            .iter()
            .map(|&p| StoredPoint {
                index: flat[p],
                point: sample.point(flat[p]).clone(),
                label: sample.label(flat[p]),
            })
            .collect();
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let side_info = sideinfo::encode(&sizes, &perm);
        Self::from_parts(meta, points, side_info, groups.len())
    }

    /// Assembles a set from its stored fields, decoding the groups from the
    /// side information alone.
    pub fn from_parts(
        meta: SchemeMeta,
        points: Vec<StoredPoint>,
        side_info: Vec<bool>,
        n: usize,
    ) -> Result<Self> {
        if points.is_empty() || n == 0 {
            return Err(Error::Decode(
                "compression set has no points or no groups".into(),
            ));
        }
        if points.windows(2).any(|w| w[0].index > w[1].index) {
            return Err(Error::Decode(
                "stored points are not in canonical order".into(),
            ));
        }
        let dim = points[0].point.dim();
        if points.iter().any(|p| p.point.dim() != dim) {
            return Err(Error::Decode("stored points have mixed dimensions".into()));
        }
        if meta.task == TaskKind::Binary && points.iter().any(|p| p.label != 0.0 && p.label != 1.0)
        {
            return Err(Error::Decode(
                "binary scheme stores a non-binary label".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.label.is_finite() {
                return Err(Error::Decode(format!(
                    "label of stored point {i} is not finite"
                )));
            }
        }
        let (sizes, perm) = sideinfo::decode(&side_info, n, points.len())?;
        let mut layout = Vec::with_capacity(n);
        let mut start = 0;
        for s in sizes {
            layout.push(perm[start..start + s].to_vec());
            start += s;
        }
        let groups = layout
            .iter()
            .map(|g| g.iter().map(|&c| points[c].index).collect())
            .collect();
        Ok(Self {
            meta,
            points,
            side_info,
            groups,
            layout,
        })
    }

    pub fn meta(&self) -> &SchemeMeta {
        &self.meta
    }

    /// Stored points in canonical order.
    pub fn points(&self) -> &[StoredPoint] {
        &self.points
    }

    pub fn side_info(&self) -> &[bool] {
        &self.side_info
    }

    /// Original-sample indices per group, in training order.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn n(&self) -> usize {
        self.groups.len()
    }

    /// Stored example count `k′`.
    pub fn stored_examples(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].point.dim()
    }

    /// The training subsample of group `j`, in order.
    pub fn group_points(&self, j: usize) -> Vec<(Point, f64)> {
        self.layout[j]
            .iter()
            .map(|&c| (self.points[c].point.clone(), self.points[c].label))
            .collect()
    }
}

/// Members rebuilt by the ERM; predicts by unweighted median, which is the
/// majority vote for {0,1} members.
#[derive(Debug, Clone)]
pub struct ReconstructedHypothesis {
    members: Vec<Arc<dyn Predictor>>,
}

impl ReconstructedHypothesis {
    pub fn members(&self) -> &[Arc<dyn Predictor>] {
        &self.members
    }

    pub fn predict(&self, x: &Point) -> f64 {
        let values: Vec<f64> = self.members.iter().map(|h| h.predict(x)).collect();
        median(&values).expect("at least one member")
    }

    pub fn max_error(&self, sample: &LabeledSample) -> f64 {
        sample
            .iter()
            .map(|(x, y)| (self.predict(x) - y).abs())
            .fold(0.0, f64::max)
    }
}

impl Predictor for ReconstructedHypothesis {
    fn predict(&self, x: &Point) -> f64 {
        ReconstructedHypothesis::predict(self, x)
    }
}

/// Intermediate objects of one compression run.
#[derive(Debug, Clone)]
pub struct CompressionDetails {
    pub set: CompressionSet,
    pub ensemble: WeightedEnsemble,
    pub trace: BoostTrace,
    pub sparse: SparseEnsemble,
}

pub fn compress(
    sample: &LabeledSample,
    erm: &Arc<dyn Erm>,
    boost_cfg: &BoostConfig,
    weak_cfg: &WeakLearnConfig,
    sparsify_cfg: &SparsifyConfig,
    rng: &mut dyn RngCore,
) -> Result<CompressionSet> {
    compress_with_details(sample, erm, boost_cfg, weak_cfg, sparsify_cfg, rng).map(|d| d.set)
}

pub fn compress_with_details(
    sample: &LabeledSample,
    erm: &Arc<dyn Erm>,
    boost_cfg: &BoostConfig,
    weak_cfg: &WeakLearnConfig,
    sparsify_cfg: &SparsifyConfig,
    rng: &mut dyn RngCore,
) -> Result<CompressionDetails> {
    if erm.task() != sample.kind() {
        return Err(invalid(format!(
            "ERM {} is for {} tasks, sample is {}",
            erm.id(),
            erm.task(),
            sample.kind()
        )));
    }
    let weak = GenericWeakLearner::new(Arc::clone(erm), weak_cfg.clone());
    let (ensemble, trace) = run_medboost(sample, &weak, boost_cfg, rng)?;
    let sparse = sparsify(&ensemble, sample, sparsify_cfg, rng)?;
    let groups = sparse
        .hypotheses()
        .iter()
        .map(|h| {
            h.provenance().map(<[usize]>::to_vec).ok_or_else(|| {
                Error::WeakContractViolation("weak hypothesis carries no training indices".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = SchemeMeta {
        eta: boost_cfg.eta,
        gamma: boost_cfg.gamma,
        task: sample.kind(),
        erm_id: erm.id(),
        version: FORMAT_VERSION,
    };
    let set = CompressionSet::from_groups(meta, sample, groups)?;
    Ok(CompressionDetails {
        set,
        ensemble,
        trace,
        sparse,
    })
}

/// Re-trains every group; members come back in group order.
pub fn reconstruct(cs: &CompressionSet, erm: &dyn Erm) -> Result<ReconstructedHypothesis> {
    if cs.meta.version != FORMAT_VERSION {
        return Err(Error::Decode(format!(
            "unsupported format version {}",
            cs.meta.version
        )));
    }
    if erm.id() != cs.meta.erm_id {
        return Err(Error::ErmContract(format!(
            "compression set was built with {}, got {}",
            cs.meta.erm_id,
            erm.id()
        )));
    }
    let members = (0..cs.n())
        .into_par_iter()
        .map(|j| erm.fit(&cs.group_points(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReconstructedHypothesis { members })
}
