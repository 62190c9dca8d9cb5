//! Random realizable targets and samples for experiments.
//!
//! BV targets are step functions whose jump magnitudes come from breaking a
//! stick of length `v`; Lipschitz targets are midpoint extensions of random
//! feasible labelings of random packings; threshold targets put θ in
//! `[0.2, 0.8]`. Points are uniform on `[0,1]^d`.

use std::sync::Arc;

use rand::Rng;

use crate::duality::euclidean_packing;
use crate::error::{invalid, Result};
use crate::learners::{bv_erm, lipschitz_erm, ThresholdClassifier};
use crate::types::{LabeledSample, Point, Predictor, TaskKind};

pub const BV_JUMPS: usize = 10;
pub const LIPSCHITZ_CANDIDATES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetFamily {
    Bv { v: f64 },
    Lipschitz { l: f64, packing_eps: f64 },
    Threshold,
}

impl TargetFamily {
    pub fn task(&self) -> TaskKind {
        match self {
            TargetFamily::Threshold => TaskKind::Binary,
            _ => TaskKind::Real,
        }
    }
}

pub fn uniform_points<R: Rng + ?Sized>(m: usize, d: usize, rng: &mut R) -> Vec<Point> {
    (0..m)
        .map(|_| {
            Point::new((0..d).map(|_| rng.gen::<f64>()).collect()).expect("finite coordinates")
        })
        .collect()
}

/// Step function on `[0,1]` with `BV_JUMPS` jumps of total size at most `v`.
pub fn random_bv_target<R: Rng + ?Sized>(v: f64, rng: &mut R) -> Result<Arc<dyn Predictor>> {
    let mut knots: Vec<f64> = (0..BV_JUMPS).map(|_| rng.gen::<f64>()).collect();
    knots.sort_by(f64::total_cmp);
    let mut level = rng.gen::<f64>();
    let mut points = vec![(Point::scalar(0.0), level)];
    let mut stick = v;
    for (j, &x) in knots.iter().enumerate() {
        // Beta(1, 2) piece of the remaining stick; the last jump takes the rest.
        let piece = if j + 1 == BV_JUMPS {
            stick
        } else {
            stick * (1.0 - rng.gen::<f64>().sqrt())
        };
        stick -= piece;
        let up_room = 1.0 - level;
        let down_room = level;
        let go_up = if piece <= up_room && piece <= down_room {
            rng.gen::<bool>()
        } else {
            up_room >= down_room
        };
        level = if go_up {
            level + piece.min(up_room)
        } else {
            level - piece.min(down_room)
        };
        points.push((Point::scalar(x), level.clamp(0.0, 1.0)));
    }
    Ok(Arc::new(bv_erm(&points, v)?))
}

/// Midpoint extension of labels drawn one by one inside the interval still
/// allowed by the Lipschitz condition.
pub fn random_lipschitz_target<R: Rng + ?Sized>(
    l: f64,
    packing_eps: f64,
    d: usize,
    rng: &mut R,
) -> Result<Arc<dyn Predictor>> {
    if !(packing_eps > 0.0) {
        return Err(invalid("packing radius must be positive"));
    }
    let candidates = uniform_points(LIPSCHITZ_CANDIDATES, d, rng);
    let (_, kept) = euclidean_packing(&candidates, packing_eps);
    let mut labeled: Vec<(Point, f64)> = Vec::with_capacity(kept.len());
    for &i in &kept {
        let p = &candidates[i];
        let (lo, hi) = labeled.iter().fold((0.0f64, 1.0f64), |(lo, hi), (q, y)| {
            let r = l * p.distance(q);
            (lo.max(y - r), hi.min(y + r))
        });
        let y = if hi > lo {
            rng.gen_range(lo..=hi)
        } else {
            0.5 * (lo + hi)
        };
        labeled.push((p.clone(), y));
    }
    Ok(Arc::new(lipschitz_erm(&labeled, l)?))
}

pub fn random_threshold_target<R: Rng + ?Sized>(rng: &mut R) -> Arc<dyn Predictor> {
    Arc::new(ThresholdClassifier {
        theta: rng.gen_range(0.2..=0.8),
        up: rng.gen::<bool>(),
    })
}

pub fn random_target<R: Rng + ?Sized>(
    family: TargetFamily,
    d: usize,
    rng: &mut R,
) -> Result<Arc<dyn Predictor>> {
    match family {
        TargetFamily::Bv { v } => random_bv_target(v, rng),
        TargetFamily::Lipschitz { l, packing_eps } => {
            random_lipschitz_target(l, packing_eps, d, rng)
        }
        TargetFamily::Threshold => Ok(random_threshold_target(rng)),
    }
}

/// `m` uniform points labeled by `target`.
pub fn labeled_sample<R: Rng + ?Sized>(
    target: &dyn Predictor,
    m: usize,
    d: usize,
    kind: TaskKind,
    rng: &mut R,
) -> Result<LabeledSample> {
    let items = uniform_points(m, d, rng).into_iter().map(|p| {
        let y = target.predict(&p);
        (p, y)
    });
    LabeledSample::new(items.collect(), kind)
}
