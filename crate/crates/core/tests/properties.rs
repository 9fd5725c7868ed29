mod common;

use optimist_core::bounds::{evaluate, BoundId, EvalOptions, Intermediate};
use optimist_core::game::{drift_path, play_game, Adversary, AdversaryKind};
use optimist_core::linalg::{dist2, dot, sub};
use optimist_core::mirror::MirrorMap;
use optimist_core::sets::FeasibleSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn set_strategy() -> impl Strategy<Value = FeasibleSet> {
    (2usize..6, any::<u64>()).prop_map(|(dim, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_set(&mut rng, dim)
    })
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0f64..5.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_a_nonexpansive_retraction(
        (set, p, q) in set_strategy().prop_flat_map(|s| { let n = s.dim(); (Just(s), point(n), point(n)) }),
        seed in any::<u64>(),
    ) {
        let pp = set.project(&p).unwrap();
        let pq = set.project(&q).unwrap();
        prop_assert!(set.membership(&pp, 1e-12));
        prop_assert!(dist2(&set.project(&pp).unwrap(), &pp) <= 1e-12);
        prop_assert!(dist2(&pp, &pq) <= dist2(&p, &q) + 1e-12);
        let y = set.sample(seed);
        prop_assert!(dot(&sub(&p, &pp), &sub(&y, &pp)) <= 1e-10);
    }

    #[test]
    fn bregman_is_nonnegative_and_vanishes_on_its_point(
        (set, d, e) in set_strategy().prop_flat_map(|s| { let n = s.dim(); (Just(s), point(n), point(n)) }),
        entropy in any::<bool>(),
    ) {
        let map = if entropy {
            MirrorMap::entropy(set.dim()).unwrap()
        } else {
            MirrorMap::squared_norm(set).unwrap()
        };
        let x = map.mirror_step(&e).unwrap();
        prop_assert!(map.bregman(&x, &d).unwrap() >= -1e-12);
        let y = map.mirror_step(&d).unwrap();
        prop_assert!(map.bregman(&y, &d).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn drift_paths_respect_budget(set in set_strategy(), budget in 0.0f64..5.0, horizon in 1usize..200, seed in any::<u64>()) {
        let path = drift_path(&set, horizon, budget, seed).unwrap();
        prop_assert_eq!(path.len(), horizon);
        prop_assert!(path.path_length() <= budget + 1e-9);
        for p in path.points() {
            prop_assert!(set.membership(p, 1e-9));
        }
    }

    #[test]
    fn adversary_gradients_respect_declared_bound(
        set in set_strategy(), bound in 0.1f64..3.0, kind in 0usize..4, seed in any::<u64>(), entropy in any::<bool>(),
    ) {
        let map = if entropy {
            MirrorMap::entropy(set.dim()).unwrap()
        } else {
            MirrorMap::squared_norm(set).unwrap()
        };
        let kind = match kind {
            0 => AdversaryKind::Linear { bound, nonnegative: true, adaptive: false },
            1 => AdversaryKind::Linear { bound, nonnegative: false, adaptive: false },
            2 => AdversaryKind::Linear { bound, nonnegative: false, adaptive: true },
            _ => AdversaryKind::Quadratic { bound },
        };
        let adv = Adversary::new(kind, seed, &map).unwrap();
        let g = adv.declared_bound().unwrap();
        for t in 1..20 {
            let play = map.domain().sample(seed ^ t as u64);
            let fb = adv.next_loss(&play, t).unwrap();
            prop_assert!(map.norms().dual(&fb.gradient) <= g * (1.0 + 1e-12));
            prop_assert_eq!(&fb, &adv.next_loss(&play, t).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plays_stay_feasible_and_games_replay(id in 0usize..19, seed in any::<u64>()) {
        let spec = common::scenario(BoundId::ALL[id], seed, 40);
        let log = play_game(&spec).unwrap();
        for r in &log.records {
            prop_assert!(spec.mirror.domain().membership(&r.play, 1e-9));
        }
        prop_assert!(log.replay_deviation().unwrap() <= 1e-9);
        let again = play_game(&spec).unwrap();
        prop_assert_eq!(log.records, again.records);
    }

    /// Every evaluator except the stated S-I intermediate point holds on
    /// arbitrary random games; that one is covered in `counterexamples.rs`.
    #[test]
    fn bounds_hold_on_random_games(id in 0usize..19, seed in any::<u64>()) {
        let id = BoundId::ALL[id];
        let spec = common::scenario(id, seed, 60);
        let log = play_game(&spec).unwrap();
        let path = log.comparator.clone().unwrap();
        let opts = if id == BoundId::S1Dynamic {
            EvalOptions { intermediate: Intermediate::Proof, ..EvalOptions::default() }
        } else {
            EvalOptions::default()
        };
        let r = evaluate(id, &log, &path, opts).unwrap();
        prop_assert!(r.margin >= -1e-7, "{} margin {}", id.name(), r.margin);
        let wide = evaluate(id, &log, &path, EvalOptions { infinite_rho: true, ..opts }).unwrap();
        prop_assert!(r.total_bound <= wide.total_bound + 1e-12 * (1.0 + wide.total_bound.abs()));
    }
}
