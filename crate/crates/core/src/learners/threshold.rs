use std::sync::Arc;

use super::Erm;
use crate::error::{invalid, Error, Result};
use crate::types::{Point, Predictor, TaskKind};

/// `I[x ≥ θ]` when `up`, otherwise `I[x < θ]`. θ may be ±∞ for constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdClassifier {
    pub theta: f64,
    pub up: bool,
}

impl Predictor for ThresholdClassifier {
    fn predict(&self, x: &Point) -> f64 {
        let above = x.x() >= self.theta;
        if above == self.up {
            1.0
        } else {
            0.0
        }
    }
}

/// Midpoint between `lo < hi`, nudged so that `lo < θ ≤ hi` survives rounding.
fn split(lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    if mid <= lo {
        hi
    } else {
        mid
    }
}

/// Consistent threshold classifier on 1-D points with {0, 1} labels.
pub fn threshold_erm(subsample: &[(Point, f64)]) -> Result<ThresholdClassifier> {
    if subsample.is_empty() {
        return Err(invalid("empty training subsample"));
    }
    let mut zeros = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ones = (f64::INFINITY, f64::NEG_INFINITY);
    for (p, y) in subsample {
        if p.dim() != 1 {
            return Err(invalid(format!(
                "threshold learner needs 1-D points, got {}",
                p.dim()
            )));
        }
        let slot = match *y {
            0.0 => &mut zeros,
            1.0 => &mut ones,
            other => return Err(invalid(format!("label {other} is not binary"))),
        };
        slot.0 = slot.0.min(p.x());
        slot.1 = slot.1.max(p.x());
    }
    let has_zero = zeros.0.is_finite();
    let has_one = ones.0.is_finite();
    if !has_one {
        return Ok(ThresholdClassifier {
            theta: f64::INFINITY,
            up: true,
        });
    }
    if !has_zero {
        return Ok(ThresholdClassifier {
            theta: f64::NEG_INFINITY,
            up: true,
        });
    }
    if zeros.1 < ones.0 {
        return Ok(ThresholdClassifier {
            theta: split(zeros.1, ones.0),
            up: true,
        });
    }
    if ones.1 < zeros.0 {
        return Ok(ThresholdClassifier {
            theta: split(ones.1, zeros.0),
            up: false,
        });
    }
    Err(Error::ConsistencyImpossible(
        "labels are not separable by a threshold in either orientation".into(),
    ))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ThresholdErm;

impl Erm for ThresholdErm {
    fn id(&self) -> String {
        "threshold".into()
    }

    fn task(&self) -> TaskKind {
        TaskKind::Binary
    }

    fn fit(&self, subsample: &[(Point, f64)]) -> Result<Arc<dyn Predictor>> {
        Ok(Arc::new(threshold_erm(subsample)?))
    }

    /// Two-sided thresholds have VC dimension 2; {0,1} values cannot be
    /// separated by more than 2t once t exceeds 1/2.
    fn fat_dim(&self, t: f64) -> Option<u64> {
        Some(if t <= 0.5 { 2 } else { 0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<(Point, f64)> {
        v.iter().map(|&(x, y)| (Point::scalar(x), y)).collect()
    }

    #[test]
    fn upward_threshold_at_midpoint() {
        let h = threshold_erm(&pts(&[(0.1, 0.0), (0.2, 0.0), (0.6, 1.0), (0.9, 1.0)])).unwrap();
        assert!(h.up);
        assert!((h.theta - 0.4).abs() < 1e-15);
    }

    #[test]
    fn all_ones_is_constant() {
        let h = threshold_erm(&pts(&[(0.1, 1.0), (0.7, 1.0)])).unwrap();
        assert_eq!(h.theta, f64::NEG_INFINITY);
        assert_eq!(h.predict(&Point::scalar(-5.0)), 1.0);
        let z = threshold_erm(&pts(&[(0.1, 0.0)])).unwrap();
        assert_eq!(z.predict(&Point::scalar(1e9)), 0.0);
    }

    #[test]
    fn downward_orientation() {
        let h = threshold_erm(&pts(&[(0.1, 1.0), (0.9, 0.0)])).unwrap();
        assert!(!h.up);
        assert_eq!(h.theta, 0.5);
        assert_eq!(h.predict(&Point::scalar(0.1)), 1.0);
        assert_eq!(h.predict(&Point::scalar(0.9)), 0.0);
    }

    #[test]
    fn inseparable_labels() {
        let err = threshold_erm(&pts(&[(0.1, 0.0), (0.5, 1.0), (0.9, 0.0)])).unwrap_err();
        assert!(matches!(err, Error::ConsistencyImpossible(_)));
    }

    #[test]
    fn adjacent_floats_still_separate() {
        let lo = 0.3f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let h = threshold_erm(&pts(&[(lo, 0.0), (hi, 1.0)])).unwrap();
        assert_eq!(h.predict(&Point::scalar(lo)), 0.0);
        assert_eq!(h.predict(&Point::scalar(hi)), 1.0);
    }
}
