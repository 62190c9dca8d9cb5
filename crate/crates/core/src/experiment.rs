//! Single seeded trials shared by the command-line driver and the tests.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::learners::Erm;
use crate::rng::seeded;
use crate::synth::{labeled_sample, random_target, TargetFamily};
use crate::types::EmpiricalDistribution;
use crate::weaklearn::{train_weak_hypothesis, weak_sample_size, WeakLearnConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct WeakTrial {
    pub subsample_size: usize,
    pub first_draw_success: bool,
    /// Draws used; `cfg.max_retries + 1` when every draw failed.
    pub attempts: usize,
    pub succeeded: bool,
    /// Fail mass of the accepted hypothesis, or the best seen on failure.
    pub fail_mass: f64,
}

/// Fresh target and sample from `seed`, uniform `P`, one call to the weak
/// learner at `(cfg.eta, cfg.gamma)`.
pub fn weak_trial(
    erm: &Arc<dyn Erm>,
    family: TargetFamily,
    m: usize,
    d: usize,
    cfg: &WeakLearnConfig,
    seed: u64,
) -> Result<WeakTrial> {
    let mut rng = seeded(seed);
    let target = random_target(family, d, &mut rng)?;
    let sample = labeled_sample(target.as_ref(), m, d, family.task(), &mut rng)?;
    let dist = EmpiricalDistribution::uniform(m)?;
    let subsample_size = weak_sample_size(cfg)?;
    match train_weak_hypothesis(&sample, &dist, erm.as_ref(), cfg, &mut rng) {
        Ok((_, cert)) => Ok(WeakTrial {
            subsample_size,
            first_draw_success: cert.attempts == 1,
            attempts: cert.attempts,
            succeeded: true,
            fail_mass: cert.empirical_fail_mass,
        }),
        Err(Error::WeakLearningFailure {
            attempts,
            best_fail_mass,
            ..
        }) => Ok(WeakTrial {
            subsample_size,
            first_draw_success: false,
            attempts,
            succeeded: false,
            fail_mass: best_fail_mass,
        }),
        Err(e) => Err(e),
    }
}
