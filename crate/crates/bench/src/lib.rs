//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use medcomp_core::learners::{BvClass, BvErm};
use medcomp_core::rng::seeded;
use medcomp_core::synth::{labeled_sample, random_target, TargetFamily};
use medcomp_core::{Erm, LabeledSample};
use rand::Rng;

pub fn bv_erm() -> Arc<dyn Erm> {
    Arc::new(BvErm::new(BvClass::new(1.0).unwrap()))
}

pub fn bv_sample(m: usize, seed: u64) -> LabeledSample {
    let mut rng = seeded(seed);
    let f = random_target(TargetFamily::Bv { v: 1.0 }, 1, &mut rng).unwrap();
    labeled_sample(
        f.as_ref(),
        m,
        1,
        TargetFamily::Bv { v: 1.0 }.task(),
        &mut rng,
    )
    .unwrap()
}

/// Values with repeats and positive weights, as an ensemble would produce.
pub fn weighted_values(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = seeded(seed);
    let values = (0..n).map(|_| rng.gen_range(0..64) as f64 / 64.0).collect();
    let weights = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    (values, weights)
}
