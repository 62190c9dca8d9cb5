//! Weighted median and weighted quantiles over ensemble outputs.
//!
//! With total weight `A = Σ α_t`, the upper quantile at level `γ` is the
//! smallest value `y_j` such that the weight strictly above it is less than
//! `(1/2 − γ)·A`; the lower quantile is the largest `y_j` whose weight
//! strictly below is less than `(1/2 − γ)·A`. The weighted median is the
//! upper quantile at `γ = 0`. All three always return one of the inputs.
//!
//! Comparisons are exact: ties between equal values are resolved by
//! accumulating their mass, never by perturbation.

use std::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::types::{Point, WeightedEnsemble};

fn check_inputs(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("no values to aggregate"));
    }
    if values.len() != weights.len() {
        return Err(invalid(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(invalid("NaN value"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(invalid("weights must be finite and nonnegative"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("total weight is zero"));
    }
    Ok(total)
}

fn check_gamma(gamma: f64) -> Result<()> {
    // At γ = 1/2 the threshold is zero and the defining set is empty.
    if !(0.0..0.5).contains(&gamma) {
        return Err(invalid(format!("quantile level {gamma} outside [0, 1/2)")));
    }
    Ok(())
}

/// Distinct values in ascending order with their accumulated weights.
fn grouped(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut groups: Vec<(f64, f64)> = Vec::with_capacity(values.len());
    for i in order {
        match groups.last_mut() {
            Some((v, w)) if *v == values[i] => *w += weights[i],
            _ => groups.push((values[i], weights[i])),
        }
    }
    groups
}

/// `Q⁺_γ`: smallest value whose strictly-greater mass fraction is below `1/2 − γ`.
pub fn weighted_quantile_upper(values: &[f64], weights: &[f64], gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let total = check_inputs(values, weights)?;
    Ok(upper_unchecked(
        &grouped(values, weights),
        total,
        0.5 - gamma,
    ))
}

/// `Q⁻_γ`: largest value whose strictly-smaller mass fraction is below `1/2 − γ`.
pub fn weighted_quantile_lower(values: &[f64], weights: &[f64], gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let total = check_inputs(values, weights)?;
    Ok(lower_unchecked(
        &grouped(values, weights),
        total,
        0.5 - gamma,
    ))
}

pub fn weighted_median(values: &[f64], weights: &[f64]) -> Result<f64> {
    weighted_quantile_upper(values, weights, 0.0)
}

/// Unweighted median `Med(a_1..a_n)`, i.e. the weighted median under unit weights.
pub fn median(values: &[f64]) -> Result<f64> {
    weighted_median(values, &vec![1.0; values.len()])
}

fn upper_unchecked(groups: &[(f64, f64)], total: f64, threshold: f64) -> f64 {
    // greater[g] = mass strictly above groups[g]
    let mut greater = vec![0.0; groups.len()];
    let mut acc = 0.0;
    for g in (0..groups.len()).rev() {
        greater[g] = acc;
        acc += groups[g].1;
    }
    groups
        .iter()
        .zip(&greater)
        .find(|(_, &above)| above / total < threshold)
        .map(|(&(v, _), _)| v)
        // the maximum has nothing above it and qualifies whenever threshold > 0
        .unwrap_or(groups[groups.len() - 1].0)
}

fn lower_unchecked(groups: &[(f64, f64)], total: f64, threshold: f64) -> f64 {
    let mut below = 0.0;
    let mut best = groups[0].0;
    for &(v, w) in groups {
        if below / total < threshold {
            best = v;
        } else {
            break;
        }
        below += w;
    }
    best
}

/// Both quantiles and the median at one level, sharing one sort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileBand {
    pub lower: f64,
    pub median: f64,
    pub upper: f64,
}

pub fn quantile_band(values: &[f64], weights: &[f64], gamma: f64) -> Result<QuantileBand> {
    check_gamma(gamma)?;
    let total = check_inputs(values, weights)?;
    let groups = grouped(values, weights);
    Ok(QuantileBand {
        lower: lower_unchecked(&groups, total, 0.5 - gamma),
        median: upper_unchecked(&groups, total, 0.5),
        upper: upper_unchecked(&groups, total, 0.5 - gamma),
    })
}

/// Weighted-median prediction of the ensemble at `x`.
pub fn ensemble_predict(ensemble: &WeightedEnsemble, x: &Point) -> f64 {
    let values = ensemble.member_values(x);
    // WeightedEnsemble guarantees matching lengths and a positive total.
    weighted_median(&values, ensemble.weights()).expect("ensemble invariants hold")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(
            weighted_median(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap(),
            2.0
        );
        assert_eq!(weighted_median(&[0.0, 1.0], &[1.0, 3.0]).unwrap(), 1.0);
        assert_eq!(weighted_median(&[0.7], &[5.0]).unwrap(), 0.7);
    }

    #[test]
    fn upper_quantile_examples() {
        let unit = [1.0; 4];
        assert_eq!(
            weighted_quantile_upper(&[1.0, 2.0, 3.0, 4.0], &unit, 0.25).unwrap(),
            4.0
        );
        assert_eq!(
            weighted_quantile_upper(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0], 0.4).unwrap(),
            5.0
        );
        let v = [0.3, 0.9, 0.1, 0.5];
        let w = [0.2, 1.0, 0.7, 0.4];
        assert_eq!(
            weighted_quantile_upper(&v, &w, 0.0).unwrap(),
            weighted_median(&v, &w).unwrap()
        );
    }

    #[test]
    fn lower_quantile_examples() {
        let unit = [1.0; 4];
        assert_eq!(
            weighted_quantile_lower(&[1.0, 2.0, 3.0, 4.0], &unit, 0.25).unwrap(),
            1.0
        );
        assert_eq!(
            weighted_quantile_lower(&[1.0, 2.0, 3.0], &[1.0; 3], 0.0).unwrap(),
            2.0
        );
        assert_eq!(weighted_quantile_lower(&[0.4], &[2.0], 0.3).unwrap(), 0.4);
    }

    #[test]
    fn even_count_median_takes_upper_middle_for_upper_and_lower_middle_for_lower() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let w = [1.0; 4];
        assert_eq!(weighted_median(&v, &w).unwrap(), 3.0);
        assert_eq!(weighted_quantile_lower(&v, &w, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn zero_weight_values_are_candidates_but_carry_no_mass() {
        // 9 has no weight: nothing strictly above it, so it is in the defining set,
        // but 1 already qualifies and is smaller.
        assert_eq!(weighted_median(&[1.0, 9.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(
            weighted_quantile_lower(&[1.0, 9.0], &[0.0, 1.0], 0.0).unwrap(),
            9.0
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(weighted_median(&[], &[]).is_err());
        assert!(weighted_median(&[1.0], &[0.0]).is_err());
        assert!(weighted_median(&[1.0, 2.0], &[1.0]).is_err());
        assert!(weighted_median(&[1.0], &[-1.0]).is_err());
        assert!(weighted_quantile_upper(&[1.0], &[1.0], 0.5).is_err());
        assert!(weighted_quantile_lower(&[1.0], &[1.0], -0.1).is_err());
    }

    #[test]
    fn band_matches_individual_calls() {
        let v = [0.2, 0.2, 0.8, 0.5, 0.1];
        let w = [0.5, 0.1, 0.9, 0.3, 0.2];
        let b = quantile_band(&v, &w, 0.1).unwrap();
        assert_eq!(b.lower, weighted_quantile_lower(&v, &w, 0.1).unwrap());
        assert_eq!(b.upper, weighted_quantile_upper(&v, &w, 0.1).unwrap());
        assert_eq!(b.median, weighted_median(&v, &w).unwrap());
    }
}
