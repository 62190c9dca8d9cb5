use std::collections::HashSet;
use std::sync::Arc;

use super::{dims::fat_dim_lipschitz, Erm, LABEL_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::types::{Point, Predictor, TaskKind};

/// L-Lipschitz functions into [0, 1] on a Euclidean domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzClass {
    pub l: f64,
    pub diam: f64,
    pub ddim: f64,
    /// Leading constant of the fat-shattering estimate.
    pub dim_constant: f64,
}

impl LipschitzClass {
    pub fn new(l: f64, diam: f64, ddim: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(invalid(format!("Lipschitz constant {l} must be positive")));
        }
        if !(diam > 0.0) || !diam.is_finite() {
            return Err(invalid(format!("diameter {diam} must be positive")));
        }
        if !(ddim >= 0.0) || !ddim.is_finite() {
            return Err(invalid(format!(
                "doubling dimension {ddim} must be nonnegative"
            )));
        }
        Ok(Self {
            l,
            diam,
            ddim,
            dim_constant: 1.0,
        })
    }
}

/// McShane–Whitney midpoint extension `½(f⁺ + f⁻)` of labeled points, where
/// `f⁺(x) = min_i (y_i + L·ρ(x, x_i))` and `f⁻(x) = max_i (y_i − L·ρ(x, x_i))`.
#[derive(Debug, Clone)]
pub struct MidpointExtension {
    points: Vec<(Point, f64)>,
    l: f64,
    clamp_unit: bool,
}

impl MidpointExtension {
    /// Extension without range clamping; callers must check realizability.
    pub fn unclamped(points: Vec<(Point, f64)>, l: f64) -> Self {
        Self {
            points,
            l,
            clamp_unit: false,
        }
    }

    pub fn points(&self) -> &[(Point, f64)] {
        &self.points
    }
}

impl Predictor for MidpointExtension {
    fn predict(&self, x: &Point) -> f64 {
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        for (p, y) in &self.points {
            let d = self.l * x.distance(p);
            upper = upper.min(y + d);
            lower = lower.max(y - d);
        }
        let mid = 0.5 * (upper + lower);
        if self.clamp_unit {
            mid.clamp(0.0, 1.0)
        } else {
            mid
        }
    }
}

/// Largest violation `|y_i − y_j| − L·ρ(x_i, x_j)` over pairs, with the pair.
pub(crate) fn worst_lipschitz_violation(
    points: &[(Point, f64)],
    l: f64,
) -> Option<(usize, usize, f64)> {
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let excess = (points[i].1 - points[j].1).abs() - l * points[i].0.distance(&points[j].0);
            if worst.is_none_or(|(_, _, w)| excess > w) {
                worst = Some((i, j, excess));
            }
        }
    }
    worst
}

/// Exact Lipschitz-extension ERM: interpolates an L-realizable subsample.
pub fn lipschitz_erm(subsample: &[(Point, f64)], l: f64) -> Result<MidpointExtension> {
    if subsample.is_empty() {
        return Err(invalid("empty training subsample"));
    }
    if !(l > 0.0) {
        return Err(invalid(format!("Lipschitz constant {l} must be positive")));
    }
    // Repeated draws of the same example add nothing to the extension.
    let mut seen = HashSet::new();
    let points: Vec<(Point, f64)> = subsample
        .iter()
        .filter(|(p, y)| {
            let key: (Vec<u64>, u64) = (
                p.coords().iter().map(|c| c.to_bits()).collect(),
                y.to_bits(),
            );
            seen.insert(key)
        })
        .cloned()
        .collect();
    if let Some((i, j, excess)) = worst_lipschitz_violation(&points, l) {
        if excess > LABEL_TOLERANCE {
            return Err(Error::ConsistencyImpossible(format!(
                "points {:?} and {:?} with labels {} and {} violate L = {l} by {excess}",
                points[i].0.coords(),
                points[j].0.coords(),
                points[i].1,
                points[j].1
            )));
        }
    }
    Ok(MidpointExtension {
        points,
        l,
        clamp_unit: true,
    })
}

#[derive(Debug, Clone)]
pub struct LipschitzErm {
    class: LipschitzClass,
}

impl LipschitzErm {
    pub fn new(class: LipschitzClass) -> Self {
        Self { class }
    }

    pub fn class(&self) -> &LipschitzClass {
        &self.class
    }
}

impl Erm for LipschitzErm {
    fn id(&self) -> String {
        format!("lipschitz:L={}", self.class.l)
    }

    fn task(&self) -> TaskKind {
        TaskKind::Real
    }

    fn fit(&self, subsample: &[(Point, f64)]) -> Result<Arc<dyn Predictor>> {
        Ok(Arc::new(lipschitz_erm(subsample, self.class.l)?))
    }

    fn fat_dim(&self, t: f64) -> Option<u64> {
        let c = &self.class;
        fat_dim_lipschitz(c.l, c.diam, c.ddim, t, c.dim_constant).ok()
    }
}
