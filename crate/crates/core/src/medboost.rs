//! Median boosting of real-valued weak hypotheses.
//!
//! Each round asks the weak learner for an `(η/2, γ)`-weak hypothesis under
//! the current distribution `P_t`, marks every example `θ_i = ±1` according
//! to whether the hypothesis is within `η/2` of its label, and weighs the
//! hypothesis by
//!
//! ```text
//! α_t = ½ · ln[ (1−γ)·W⁺ / ((1+γ)·W⁻) ]
//! ```
//!
//! where `W±` is the `P_t`-mass with `θ = ±1`. Examples the hypothesis got
//! right are then down-weighted by `e^{−α_t}` and the others up-weighted by
//! `e^{α_t}`. A hypothesis that is right everywhere (`W⁻ = 0`) ends the run:
//! the ensemble becomes `T` unit-weight copies of it.
//!
//! With `T ≳ ln(m)/γ²` rounds the returned ensemble has a margin: at every
//! training point both weighted quantiles `Q^±_{γ/2}` lie within `η/2` of
//! the label. Rounds are numbered `1..=T`, so the weak learner is called at
//! most `T` times.

use rand::RngCore;

use crate::error::{invalid, Error, Result};
use crate::quantile::quantile_band;
use crate::types::{EmpiricalDistribution, Hypothesis, LabeledSample, WeightedEnsemble};
use crate::weaklearn::{fail_mass, WeakLearner};

/// Default multiplier in the automatic round count `⌈c_T·ln(m)/γ²⌉`.
///
/// With the weakest admissible hypotheses (`W⁺ = 1/2 + γ`) each round shrinks
/// the margin-violation bound by a factor `2√(W⁺W⁻)·r^{γ/2}/√(1−γ²)`, where
/// `r = (1−γ)W⁺/((1+γ)W⁻)`; at `γ = 1/8` that factor is about `e^{−0.0082}`,
/// so `T > 122·ln(m)` rounds drive it below `1/m`. `c_T = 2` gives `128·ln(m)`.
pub const DEFAULT_ROUNDS_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundsPolicy {
    Fixed(usize),
    /// `T = max(1, ⌈c_T · ln(m) / γ²⌉)`.
    Auto {
        c_t: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub rounds: RoundsPolicy,
    pub gamma: f64,
    pub eta: f64,
}

impl BoostConfig {
    pub fn auto(eta: f64, gamma: f64) -> Self {
        Self {
            rounds: RoundsPolicy::Auto {
                c_t: DEFAULT_ROUNDS_CONSTANT,
            },
            gamma,
            eta,
        }
    }

    pub fn fixed(rounds: usize, eta: f64, gamma: f64) -> Self {
        Self {
            rounds: RoundsPolicy::Fixed(rounds),
            gamma,
            eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 0.25) {
            return Err(invalid(format!("gamma = {} outside (0, 1/4)", self.gamma)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid(format!("eta = {} outside (0, 1]", self.eta)));
        }
        match self.rounds {
            RoundsPolicy::Fixed(0) => Err(invalid("at least one boosting round is required")),
            RoundsPolicy::Auto { c_t } if !(c_t > 0.0) || !c_t.is_finite() => {
                Err(invalid(format!("c_T = {c_t} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Number of rounds for a sample of size `m`.
    pub fn rounds_for(&self, m: usize) -> usize {
        match self.rounds {
            RoundsPolicy::Fixed(t) => t,
            RoundsPolicy::Auto { c_t } => {
                let t = (c_t * (m as f64).ln() / (self.gamma * self.gamma)).ceil();
                (t as usize).max(1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub alpha: f64,
    /// `W⁺`: mass of examples predicted within η/2.
    pub correct_mass: f64,
    /// Entropy (nats) of the distribution the round was trained under.
    pub distribution_entropy: f64,
    pub weak_attempts: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoostTrace {
    pub rounds: Vec<RoundRecord>,
    pub early_exit: bool,
}

/// `θ_i = +1` iff `|prediction_i − y_i| ≤ η/2`.
pub fn theta_from_predictions(predictions: &[f64], sample: &LabeledSample, eta: f64) -> Vec<i8> {
    predictions
        .iter()
        .zip(sample.iter())
        .map(|(p, (_, y))| if (p - y).abs() > eta / 2.0 { -1 } else { 1 })
        .collect()
}

pub fn compute_theta(h: &Hypothesis, sample: &LabeledSample, eta: f64) -> Vec<i8> {
    theta_from_predictions(&h.eval_sample(sample), sample, eta)
}

fn signed_masses(dist: &EmpiricalDistribution, theta: &[i8]) -> Result<(f64, f64)> {
    if theta.len() != dist.len() {
        return Err(invalid(format!(
            "theta has {} entries for {} masses",
            theta.len(),
            dist.len()
        )));
    }
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (&p, &s) in dist.masses().iter().zip(theta) {
        match s {
            1 => plus += p,
            -1 => minus += p,
            other => return Err(invalid(format!("theta entry {other} is not ±1"))),
        }
    }
    Ok((plus, minus))
}

/// Round weight; `+∞` when the hypothesis is within η/2 on all of `P`'s mass.
pub fn compute_alpha(dist: &EmpiricalDistribution, theta: &[i8], gamma: f64) -> Result<f64> {
    let (plus, minus) = signed_masses(dist, theta)?;
    if minus == 0.0 {
        return Ok(f64::INFINITY);
    }
    if plus == 0.0 {
        return Err(Error::WeakContractViolation(
            "hypothesis is wrong on the whole distribution".into(),
        ));
    }
    Ok(0.5 * ((1.0 - gamma) * plus / ((1.0 + gamma) * minus)).ln())
}

/// `P'(i) ∝ P(i)·exp(−α·θ_i)`, renormalized.
pub fn update_distribution(
    dist: &EmpiricalDistribution,
    theta: &[i8],
    alpha: f64,
) -> Result<EmpiricalDistribution> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid(format!(
            "alpha = {alpha} must be finite and nonnegative"
        )));
    }
    if theta.len() != dist.len() {
        return Err(invalid(format!(
            "theta has {} entries for {} masses",
            theta.len(),
            dist.len()
        )));
    }
    let down = (-alpha).exp();
    let up = alpha.exp();
    let weights: Vec<f64> = dist
        .masses()
        .iter()
        .zip(theta)
        .map(|(&p, &s)| p * if s > 0 { down } else { up })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Internal(format!(
            "reweighting produced total mass {total}"
        )));
    }
    EmpiricalDistribution::new(weights.into_iter().map(|w| w / total).collect())
        .map_err(|e| Error::Internal(format!("renormalized distribution invalid: {e}")))
}

/// Runs the booster. The weak learner is called with accuracy `η/2`.
pub fn run_medboost(
    sample: &LabeledSample,
    weak: &dyn WeakLearner,
    cfg: &BoostConfig,
    rng: &mut dyn RngCore,
) -> Result<(WeightedEnsemble, BoostTrace)> {
    cfg.validate()?;
    let m = sample.len();
    let total_rounds = cfg.rounds_for(m);
    let half_eta = cfg.eta / 2.0;
    let mut dist = EmpiricalDistribution::uniform(m)?;
    let mut hypotheses = Vec::with_capacity(total_rounds);
    let mut alphas = Vec::with_capacity(total_rounds);
    let mut trace = BoostTrace::default();

    for round in 1..=total_rounds {
        let (h, cert) = weak
            .learn(sample, &dist, half_eta, cfg.gamma, rng)
            .map_err(|e| match e {
                Error::WeakLearningFailure {
                    attempts,
                    best_fail_mass,
                    ..
                } => Error::WeakLearningFailure {
                    round: Some(round),
                    attempts,
                    best_fail_mass,
                },
                other => other,
            })?;

        let predictions = h.eval_sample(sample);
        let miss = fail_mass(&predictions, sample, &dist, half_eta);
        if miss > 0.5 - cfg.gamma {
            return Err(Error::WeakContractViolation(format!(
                "round {round}: hypothesis misses mass {miss} > 1/2 - gamma"
            )));
        }
        let theta = theta_from_predictions(&predictions, sample, cfg.eta);
        let alpha = compute_alpha(&dist, &theta, cfg.gamma)?;
        let (plus, _) = signed_masses(&dist, &theta)?;
        trace.rounds.push(RoundRecord {
            alpha,
            correct_mass: plus,
            distribution_entropy: dist.entropy(),
            weak_attempts: cert.attempts,
        });

        if alpha.is_infinite() {
            trace.early_exit = true;
            let copies = vec![h; total_rounds];
            let ensemble = WeightedEnsemble::new(copies, vec![1.0; total_rounds])?;
            return Ok((ensemble, trace));
        }

        dist = update_distribution(&dist, &theta, alpha)?;
        hypotheses.push(h);
        alphas.push(alpha);
    }

    // α_t > 0 whenever the weak condition holds, so the total is positive.
    let ensemble = WeightedEnsemble::new(hypotheses, alphas)?;
    Ok((ensemble, trace))
}

/// Largest `max(|Q⁺_level(x_i) − y_i|, |Q⁻_level(x_i) − y_i|)` over the sample.
pub fn max_quantile_deviation(
    ensemble: &WeightedEnsemble,
    sample: &LabeledSample,
    level: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in sample.iter() {
        let band = quantile_band(&ensemble.member_values(x), ensemble.weights(), level)?;
        worst = worst
            .max((band.upper - y).abs())
            .max((band.lower - y).abs());
    }
    Ok(worst)
}
