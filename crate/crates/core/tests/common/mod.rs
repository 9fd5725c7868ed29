#![allow(dead_code)]

use optimist_core::bounds::{BoundId, ScheduleRequirement};
use optimist_core::game::{AdversaryKind, ComparatorSpec, GameSpec, HintKind};
use optimist_core::mirror::{MirrorKind, MirrorMap};
use optimist_core::sets::FeasibleSet;
use optimist_core::strategy::{ScheduleSpec, Sequence, StrategyKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random game whose strategy, map and schedule satisfy the preconditions of
/// `id`. Everything else (set, dimension, adversary, hints, comparator) varies
/// with the seed.
pub fn scenario(id: BoundId, seed: u64, horizon: usize) -> GameSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((id as u64) << 40));
    let strategies: Vec<(StrategyKind, MirrorKind)> = StrategyKind::ALL
        .into_iter()
        .flat_map(|s| [(s, MirrorKind::Entropy), (s, MirrorKind::SquaredNorm)])
        .filter(|(s, m)| s.required_map().map_or(true, |r| r == *m) && id.compatible(*s, *m))
        .collect();
    let (strategy, map_kind) = strategies[rng.random_range(0..strategies.len())];
    let dim = rng.random_range(2..=5);
    let mirror = match map_kind {
        MirrorKind::Entropy => MirrorMap::entropy(dim).unwrap(),
        MirrorKind::SquaredNorm => MirrorMap::squared_norm(random_set(&mut rng, dim)).unwrap(),
    };
    let schedule = random_schedule(&mut rng, id, horizon);
    let bound = rng.random_range(0.2..3.0);
    let adversary = match rng.random_range(0..4) {
        0 => AdversaryKind::Linear { bound, nonnegative: true, adaptive: false },
        1 => AdversaryKind::Linear { bound, nonnegative: false, adaptive: false },
        2 => AdversaryKind::Linear { bound, nonnegative: false, adaptive: true },
        _ => AdversaryKind::Quadratic { bound },
    };
    let hint = match rng.random_range(0..4) {
        0 => HintKind::Zero,
        1 => HintKind::LastGradient,
        2 => HintKind::Perfect,
        _ => HintKind::NoisyPerfect(rng.random_range(0.05..1.0) * bound),
    };
    let comparator = if id.needs_static_path() || rng.random_bool(0.3) {
        if rng.random_bool(0.7) {
            ComparatorSpec::BestStatic
        } else {
            ComparatorSpec::Static(mirror.domain().sample(rng.random()))
        }
    } else {
        ComparatorSpec::Drift { budget: rng.random_range(0.0..4.0) }
    };
    GameSpec { mirror, strategy, schedule, adversary, hint, comparator, horizon, seed }
}

pub fn random_set(rng: &mut ChaCha8Rng, dim: usize) -> FeasibleSet {
    match rng.random_range(0..3) {
        0 => {
            let c = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            FeasibleSet::ball(c, rng.random_range(0.3..2.0)).unwrap()
        }
        1 => {
            let lo: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..0.5)).collect();
            let hi = lo.iter().map(|l| l + rng.random_range(0.2..1.5)).collect();
            FeasibleSet::boxed(lo, hi).unwrap()
        }
        _ => FeasibleSet::simplex(dim).unwrap(),
    }
}

fn random_schedule(rng: &mut ChaCha8Rng, id: BoundId, horizon: usize) -> ScheduleSpec {
    let c = rng.random_range(0.05..2.0);
    let decaying = if rng.random_bool(0.5) { Sequence::InvSqrt(c) } else { Sequence::Constant(c) };
    let growing = if rng.random_bool(0.5) { Sequence::Sqrt(c) } else { Sequence::Constant(c) };
    let free = |rng: &mut ChaCha8Rng| {
        Sequence::Custom((0..=horizon).map(|_| rng.random_range(0.05..2.0)).collect())
    };
    let (eta, theta) = match id.schedule_requirement() {
        ScheduleRequirement::None => {
            if rng.random_bool(0.5) {
                (free(rng), free(rng))
            } else {
                (decaying, growing)
            }
        }
        ScheduleRequirement::EtaNonincreasingUnitTheta => (decaying, Sequence::Constant(1.0)),
        ScheduleRequirement::ThetaNondecreasingUnitEta => (Sequence::Constant(1.0), growing),
        ScheduleRequirement::ThetaNondecreasing => (free(rng), growing),
    };
    ScheduleSpec::new(eta, theta).unwrap()
}
