use std::sync::Arc;

use super::{dims::fat_dim_bv, dims::total_variation, Erm, LABEL_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::types::{Point, Predictor, TaskKind};

/// Slack on the variation budget absorbing summation round-off.
pub const VARIATION_SLACK: f64 = 1e-9;

/// Functions `[0,1] → [0,1]` with total variation at most `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvClass {
    pub v: f64,
}

impl BvClass {
    pub fn new(v: f64) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("variation budget {v} must be positive")));
        }
        Ok(Self { v })
    }
}

/// Left-continuous step interpolant: the label of the nearest sample point at
/// or to the left of `x`, or the leftmost label below all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl StepFunction {
    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn levels(&self) -> &[f64] {
        &self.ys
    }

    pub fn variation(&self) -> f64 {
        total_variation(&self.ys)
    }
}

impl Predictor for StepFunction {
    fn predict(&self, x: &Point) -> f64 {
        let x = x.x();
        let idx = self.xs.partition_point(|&k| k <= x);
        self.ys[idx.saturating_sub(1)]
    }
}

/// Step-interpolation ERM for BV(v).
pub fn bv_erm(subsample: &[(Point, f64)], v: f64) -> Result<StepFunction> {
    if subsample.is_empty() {
        return Err(invalid("empty training subsample"));
    }
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(subsample.len());
    for (p, y) in subsample {
        if p.dim() != 1 {
            return Err(invalid(format!(
                "BV learner needs 1-D points, got dimension {}",
                p.dim()
            )));
        }
        let x = p.x();
        if !(0.0..=1.0).contains(&x) {
            return Err(invalid(format!("point {x} outside [0, 1]")));
        }
        pairs.push((x, *y));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut xs: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut ys: Vec<f64> = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        if xs.last() == Some(&x) {
            let kept = *ys.last().unwrap();
            if (kept - y).abs() > LABEL_TOLERANCE {
                return Err(Error::ConsistencyImpossible(format!(
                    "conflicting labels {kept} and {y} at x = {x}"
                )));
            }
            continue;
        }
        xs.push(x);
        ys.push(y);
    }

    let variation = total_variation(&ys);
    if variation > v + VARIATION_SLACK {
        return Err(Error::ConsistencyImpossible(format!(
            "subsample variation {variation} exceeds budget {v}"
        )));
    }
    Ok(StepFunction { xs, ys })
}

#[derive(Debug, Clone)]
pub struct BvErm {
    class: BvClass,
}

impl BvErm {
    pub fn new(class: BvClass) -> Self {
        Self { class }
    }

    pub fn class(&self) -> &BvClass {
        &self.class
    }
}

impl Erm for BvErm {
    fn id(&self) -> String {
        format!("bv:v={}", self.class.v)
    }

    fn task(&self) -> TaskKind {
        TaskKind::Real
    }

    fn fit(&self, subsample: &[(Point, f64)]) -> Result<Arc<dyn Predictor>> {
        Ok(Arc::new(bv_erm(subsample, self.class.v)?))
    }

    fn fat_dim(&self, t: f64) -> Option<u64> {
        fat_dim_bv(self.class.v, t).ok()
    }
}
