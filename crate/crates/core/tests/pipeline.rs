use std::sync::Arc;

use medcomp_core::learners::{BvClass, BvErm, LipschitzClass, LipschitzErm, ThresholdErm};
use medcomp_core::medboost::max_quantile_deviation;
use medcomp_core::rng::seeded;
use medcomp_core::synth::{labeled_sample, random_target, TargetFamily};
use medcomp_core::weaklearn::{fat_dim_of, WeakLearnConfig};
use medcomp_core::{
    compress, compress_with_details, deserialize, reconstruct, serialize, BoostConfig, Erm,
    LabeledSample, Point, SparsifyConfig, TaskKind,
};

const GAMMA: f64 = 0.125;

fn configs(erm: &Arc<dyn Erm>, eta: f64) -> (BoostConfig, WeakLearnConfig, SparsifyConfig) {
    (
        BoostConfig::auto(eta, GAMMA),
        WeakLearnConfig::new(eta, GAMMA, fat_dim_of(erm)),
        SparsifyConfig::adaptive(eta, GAMMA, erm.task()),
    )
}

fn sample_for(family: TargetFamily, m: usize, seed: u64) -> LabeledSample {
    let mut rng = seeded(seed);
    let f = random_target(family, 1, &mut rng).unwrap();
    labeled_sample(f.as_ref(), m, 1, family.task(), &mut rng).unwrap()
}

// With tiny weak subsamples no single fit is η/2-accurate everywhere, so the
// booster runs all its rounds and the median does the work.
#[test]
fn full_boosting_run_on_lipschitz_targets() {
    let erm: Arc<dyn Erm> = Arc::new(LipschitzErm::new(
        LipschitzClass::new(5.0, 1.0, 1.0).unwrap(),
    ));
    let eta = 0.2;
    let (boost, mut weak, sparse) = configs(&erm, eta);
    weak.c1 = 1.0 / 128.0;
    let mut full_runs = 0;
    for seed in 0..3 {
        let mut rng = seeded(seed);
        let f = random_target(
            TargetFamily::Lipschitz {
                l: 5.0,
                packing_eps: 0.05,
            },
            1,
            &mut rng,
        )
        .unwrap();
        let s = labeled_sample(f.as_ref(), 200, 1, TaskKind::Real, &mut rng).unwrap();
        let d = compress_with_details(&s, &erm, &boost, &weak, &sparse, &mut rng).unwrap();
        if !d.trace.early_exit {
            full_runs += 1;
            assert_eq!(d.trace.rounds.len(), boost.rounds_for(200));
        }
        let h = reconstruct(&d.set, erm.as_ref()).unwrap();
        assert!(h.max_error(&s) <= eta, "seed {seed}: {}", h.max_error(&s));
        let dev = max_quantile_deviation(&d.ensemble, &s, GAMMA / 2.0).unwrap();
        assert!(dev <= eta / 2.0, "seed {seed}: quantile deviation {dev}");
    }
    assert!(full_runs > 0);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let erm: Arc<dyn Erm> = Arc::new(BvErm::new(BvClass::new(1.0).unwrap()));
    let s = sample_for(TargetFamily::Bv { v: 1.0 }, 300, 11);
    let (boost, weak, sparse) = configs(&erm, 0.2);
    let run = |seed| {
        let cs = compress(&s, &erm, &boost, &weak, &sparse, &mut seeded(seed)).unwrap();
        serialize(&cs).unwrap()
    };
    assert_eq!(run(5), run(5));
}

#[test]
fn decoded_scheme_matches_sparse_ensemble() {
    let erm: Arc<dyn Erm> = Arc::new(BvErm::new(BvClass::new(1.0).unwrap()));
    let s = sample_for(TargetFamily::Bv { v: 1.0 }, 200, 12);
    let (boost, weak, sparse) = configs(&erm, 0.2);
    let d = compress_with_details(&s, &erm, &boost, &weak, &sparse, &mut seeded(3)).unwrap();
    let h = reconstruct(
        &deserialize(&serialize(&d.set).unwrap()).unwrap(),
        erm.as_ref(),
    )
    .unwrap();
    for i in 0..=500 {
        let x = Point::scalar(i as f64 / 500.0);
        assert_eq!(h.predict(&x).to_bits(), d.sparse.predict(&x).to_bits());
    }
}

#[test]
fn single_example_sample() {
    let erm: Arc<dyn Erm> = Arc::new(ThresholdErm);
    let s = LabeledSample::new(vec![(Point::scalar(0.3), 1.0)], TaskKind::Binary).unwrap();
    let (boost, weak, sparse) = configs(&erm, 1.0);
    let d = compress_with_details(&s, &erm, &boost, &weak, &sparse, &mut seeded(0)).unwrap();
    assert!(d.trace.early_exit);
    assert!(d.set.groups().iter().flatten().all(|&i| i == 0));
    let h = reconstruct(&d.set, erm.as_ref()).unwrap();
    assert_eq!(h.predict(&Point::scalar(0.3)), 1.0);
}

#[test]
fn wrong_learner_is_rejected_on_reconstruct() {
    let erm: Arc<dyn Erm> = Arc::new(ThresholdErm);
    let s = sample_for(TargetFamily::Threshold, 50, 13);
    let (boost, weak, sparse) = configs(&erm, 1.0);
    let cs = compress(&s, &erm, &boost, &weak, &sparse, &mut seeded(1)).unwrap();
    let other = BvErm::new(BvClass::new(1.0).unwrap());
    assert!(reconstruct(&cs, &other).is_err());
}
