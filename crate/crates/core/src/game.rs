//! Adversaries, hint oracles, comparator generators and the game driver.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::ComparatorPath;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{add, dist2, dot, norm2, sub, Matrix};
use crate::math::NormPair;
use crate::mirror::MirrorMap;
use crate::monotone::MonotoneOperator;
use crate::sets::FeasibleSet;
use crate::strategy::{GameLog, RoundRecord, ScheduleSpec, StrategyKind, StrategyState};

/// splitmix64 of `seed ⊕ stream`, used to give every round and every
/// component an independent deterministic generator.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_ADVERSARY: u64 = 1;
const STREAM_HINT: u64 = 2;
const STREAM_COMPARATOR: u64 = 3;

/// A convex loss `φ_t` with an evaluable value and gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum Loss {
    /// `⟨ℓ, x⟩`
    Linear(Vec<f64>),
    /// `½xᵀQx + bᵀx` with `Q` symmetric PSD.
    Quadratic { q: Matrix, b: Vec<f64> },
}

impl Loss {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Loss::Linear(l) => dot(l, x),
            Loss::Quadratic { q, b } => 0.5 * q.quad_form(x) + dot(b, x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Loss::Linear(l) => l.clone(),
            Loss::Quadratic { q, b } => add(&q.mul_vec(x), b),
        }
    }
}

/// What the adversary reveals after a play.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    pub gradient: Vec<f64>,
    pub loss: Option<Loss>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum AdversaryKind {
    /// Random linear losses with dual norm at most `bound`. With
    /// `nonnegative` the coordinates lie in `[0, ·]`; with `adaptive` the
    /// coordinate carrying the largest play weight receives the full bound.
    Linear { bound: f64, nonnegative: bool, adaptive: bool },
    /// The same loss vector every round.
    LinearFixed(Vec<f64>),
    /// `½(x − c_t)ᵀQ_t(x − c_t)` with random diagonal `Q_t ⪰ 0` and random
    /// `c_t ∈ C`, scaled so `‖∇φ_t‖ ≤ bound` on `C`.
    Quadratic { bound: f64 },
    /// The same quadratic every round.
    QuadraticFixed { q: Matrix, b: Vec<f64> },
    /// Feedback `M(x_t)` without a loss function.
    Monotone(MonotoneOperator),
}

#[derive(Debug, Clone)]
pub struct Adversary {
    kind: AdversaryKind,
    seed: u64,
    set: FeasibleSet,
    norms: NormPair,
}

impl Adversary {
    pub fn new(kind: AdversaryKind, seed: u64, mirror: &MirrorMap) -> Result<Self> {
        let n = mirror.dim();
        match &kind {
            AdversaryKind::Linear { bound, .. } | AdversaryKind::Quadratic { bound } => {
                if !(*bound > 0.0 && bound.is_finite()) {
                    return Err(Error::InvalidParameter("adversary bound must be > 0".into()));
                }
            }
            AdversaryKind::LinearFixed(l) => check_dim(n, l.len())?,
            AdversaryKind::QuadraticFixed { q, b } => {
                check_dim(n, b.len())?;
                check_dim(n, q.rows())?;
                if !q.is_symmetric(1e-12) {
                    return Err(Error::InvalidParameter("quadratic Q must be symmetric".into()));
                }
            }
            AdversaryKind::Monotone(op) => check_dim(n, op.dim())?,
        }
        Ok(Self { kind, seed, set: mirror.domain().clone(), norms: mirror.norms() })
    }

    pub fn kind(&self) -> &AdversaryKind {
        &self.kind
    }

    /// Declared bound on the dual norm of every gradient, if any.
    pub fn declared_bound(&self) -> Option<f64> {
        match &self.kind {
            AdversaryKind::Linear { bound, .. } | AdversaryKind::Quadratic { bound } => Some(*bound),
            AdversaryKind::LinearFixed(l) => Some(self.norms.dual(l)),
            _ => None,
        }
    }

    /// Upper bound on the Lipschitz constant of `play ↦ gradient` in the
    /// Euclidean norm; zero for linear losses.
    pub fn gradient_lipschitz(&self) -> f64 {
        match &self.kind {
            AdversaryKind::Linear { .. } | AdversaryKind::LinearFixed(_) => 0.0,
            AdversaryKind::Quadratic { bound } => bound / self.set.diameter_in(NormPair::L2L2),
            AdversaryKind::QuadraticFixed { q, .. } => q.gershgorin_bound(),
            AdversaryKind::Monotone(op) => op.lipschitz_bound(),
        }
    }

    /// True when the gradient of round `t` does not depend on the play.
    pub fn is_play_independent(&self) -> bool {
        matches!(
            self.kind,
            AdversaryKind::Linear { adaptive: false, .. } | AdversaryKind::LinearFixed(_)
        )
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            AdversaryKind::Linear { bound, nonnegative, adaptive } => alloc::format!(
                "linear(bound={bound},nonnegative={nonnegative},adaptive={adaptive})"
            ),
            AdversaryKind::LinearFixed(_) => "linear-fixed".into(),
            AdversaryKind::Quadratic { bound } => alloc::format!("quadratic(bound={bound})"),
            AdversaryKind::QuadraticFixed { .. } => "quadratic-fixed".into(),
            AdversaryKind::Monotone(op) => alloc::format!("monotone({})", op.name()),
        }
    }

    /// Scale factor taking a vector in `[−1, 1]ⁿ` to dual norm `≤ bound`.
    fn unit_scale(&self, bound: f64) -> f64 {
        match self.norms {
            NormPair::L1Linf => bound,
            NormPair::L2L2 => bound / libm::sqrt(self.set.dim() as f64),
        }
    }

    /// Feedback for `play` in round `t`; deterministic in `(seed, t, play)`.
    pub fn next_loss(&self, play: &[f64], t: usize) -> Result<Feedback> {
        let n = self.set.dim();
        check_dim(n, play.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, t as u64));
        let loss = match &self.kind {
            AdversaryKind::Linear { bound, nonnegative, adaptive } => {
                let mut raw: Vec<f64> = (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        if *nonnegative { u } else { 2.0 * u - 1.0 }
                    })
                    .collect();
                if *adaptive {
                    let j = argmax(play);
                    raw[j] = 1.0;
                }
                let s = self.unit_scale(*bound);
                Loss::Linear(raw.into_iter().map(|v| s * v).collect())
            }
            AdversaryKind::LinearFixed(l) => Loss::Linear(l.clone()),
            AdversaryKind::Quadratic { bound } => {
                let diam = self.set.diameter_in(NormPair::L2L2);
                let qmax = bound / diam;
                let diag: Vec<f64> = (0..n).map(|_| qmax * rng.random::<f64>()).collect();
                let c = self.set.sample_with(&mut rng);
                let b = diag.iter().zip(&c).map(|(q, ci)| -q * ci).collect();
                Loss::Quadratic { q: Matrix::diagonal(&diag), b }
            }
            AdversaryKind::QuadraticFixed { q, b } => Loss::Quadratic { q: q.clone(), b: b.clone() },
            AdversaryKind::Monotone(op) => {
                return Ok(Feedback { gradient: op.eval(play), loss: None, value: None });
            }
        };
        Ok(Feedback { gradient: loss.gradient(play), value: Some(loss.value(play)), loss: Some(loss) })
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut j = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[j] {
            j = i;
        }
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HintKind {
    Zero,
    /// `x̂*_t = x*_{t−1}`, `x̂*_1 = 0`.
    LastGradient,
    /// `x̂*_t = x*_t`. Clairvoyant, test only.
    Perfect,
    /// Perfect plus seeded Gaussian noise of scale `σ`. Clairvoyant.
    NoisyPerfect(f64),
}

impl HintKind {
    pub fn is_clairvoyant(self) -> bool {
        matches!(self, HintKind::Perfect | HintKind::NoisyPerfect(_))
    }

    pub fn descriptor(self) -> String {
        match self {
            HintKind::Zero => "zero".into(),
            HintKind::LastGradient => "last-gradient".into(),
            HintKind::Perfect => "perfect".into(),
            HintKind::NoisyPerfect(s) => alloc::format!("noisy-perfect(sigma={s})"),
        }
    }
}

/// Iteration cap for the fixed point `h = ∇φ_t(play(h))` used by perfect
/// hints against play-dependent adversaries.
const PERFECT_HINT_ITERS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub enum ComparatorSpec {
    Static(Vec<f64>),
    /// `argmin_C Σ φ_t`, computed after the game.
    BestStatic,
    /// Piecewise linear walk between seeded waypoints with total length at
    /// most `budget`.
    Drift { budget: f64 },
    /// The comparator is the anchor `a` of the mirror map.
    Anchor,
}

/// Walk from a seeded start toward seeded waypoints, `budget / (T − 1)` per
/// round.
pub fn drift_path(set: &FeasibleSet, horizon: usize, budget: f64, seed: u64) -> Result<ComparatorPath> {
    if !(budget >= 0.0) {
        return Err(Error::InvalidParameter("drift budget must be ≥ 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = set.sample_with(&mut rng);
    let mut target = set.sample_with(&mut rng);
    let step = if horizon > 1 { budget / (horizon - 1) as f64 } else { 0.0 };
    let mut points = Vec::with_capacity(horizon);
    points.push(z.clone());
    for _ in 1..horizon {
        let mut left = step;
        while left > 0.0 {
            let d = dist2(&z, &target);
            if d <= left {
                z = target.clone();
                left -= d;
                target = set.sample_with(&mut rng);
                if d == 0.0 {
                    break;
                }
            } else {
                let s = left / d;
                z = z.iter().zip(&target).map(|(a, b)| a + s * (b - a)).collect();
                left = 0.0;
            }
        }
        points.push(z.clone());
    }
    ComparatorPath::new(points)
}

/// `argmin_{x ∈ C} Σ_t φ_t(x)`.
///
/// Linear totals use the closed form per set kind (lowest-index best corner on
/// the simplex). Quadratic totals use projected gradient steps of size `1/L`
/// with `L` a Gershgorin bound on `ΣQ_t`, which is exact after one step when
/// `ΣQ_t` is a multiple of the identity.
pub fn best_static_comparator(log: &GameLog) -> Result<Vec<f64>> {
    let n = log.dim();
    let set = log.mirror.domain();
    let mut lin = alloc::vec![0.0; n];
    let mut quad: Option<Matrix> = None;
    for r in &log.records {
        match &r.loss {
            None => return Err(Error::NoLossValues),
            Some(Loss::Linear(l)) => {
                for (a, b) in lin.iter_mut().zip(l) {
                    *a += b;
                }
            }
            Some(Loss::Quadratic { q, b }) => {
                for (a, bi) in lin.iter_mut().zip(b) {
                    *a += bi;
                }
                quad = Some(match quad {
                    None => q.clone(),
                    Some(acc) => acc.add(q)?,
                });
            }
        }
    }
    let lip = quad.as_ref().map_or(0.0, |q| q.gershgorin_bound());
    if lip == 0.0 {
        return Ok(minimize_linear(set, &lin));
    }
    let q = quad.unwrap();
    let objective = |x: &[f64]| 0.5 * q.quad_form(x) + dot(&lin, x);
    let mut x = set.center();
    let mut fx = objective(&x);
    for _ in 0..500 {
        let g = add(&q.mul_vec(&x), &lin);
        let next = set.project(&sub(&x, &g.iter().map(|v| v / lip).collect::<Vec<_>>()))?;
        let fn_ = objective(&next);
        let moved = dist2(&next, &x);
        x = next;
        if fn_ >= fx - 1e-15 * (1.0 + fx.abs()) && moved < 1e-13 {
            break;
        }
        fx = fn_;
    }
    Ok(x)
}

fn minimize_linear(set: &FeasibleSet, l: &[f64]) -> Vec<f64> {
    match set {
        FeasibleSet::Simplex { dim } => {
            let mut j = 0;
            for i in 1..*dim {
                if l[i] < l[j] {
                    j = i;
                }
            }
            let mut e = alloc::vec![0.0; *dim];
            e[j] = 1.0;
            e
        }
        FeasibleSet::Ball { center, radius } => {
            let nl = norm2(l);
            if nl == 0.0 {
                center.clone()
            } else {
                center.iter().zip(l).map(|(c, li)| c - radius * li / nl).collect()
            }
        }
        FeasibleSet::Box { lower, upper } => l
            .iter()
            .zip(lower.iter().zip(upper))
            .map(|(li, (lo, up))| if *li > 0.0 { *lo } else if *li < 0.0 { *up } else { 0.5 * (lo + up) })
            .collect(),
    }
}

/// Everything needed to play one seeded game.
#[derive(Debug, Clone)]
pub struct GameSpec {
    pub mirror: MirrorMap,
    pub strategy: StrategyKind,
    pub schedule: ScheduleSpec,
    pub adversary: AdversaryKind,
    pub hint: HintKind,
    pub comparator: ComparatorSpec,
    pub horizon: usize,
    pub seed: u64,
}

/// Plays `spec.horizon` rounds and returns the complete log, including the
/// round `T + 1` lookahead and the comparator path.
pub fn play_game(spec: &GameSpec) -> Result<GameLog> {
    if spec.horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be ≥ 1".into()));
    }
    let n = spec.mirror.dim();
    let adversary = Adversary::new(
        spec.adversary.clone(),
        derive_seed(spec.seed, STREAM_ADVERSARY),
        &spec.mirror,
    )?;
    let mut state = StrategyState::new(spec.strategy, spec.mirror.clone(), spec.schedule.clone())?;
    let hint_seed = derive_seed(spec.seed, STREAM_HINT);
    let mut records: Vec<RoundRecord> = Vec::with_capacity(spec.horizon);
    for t in 1..=spec.horizon {
        let prev = records.last().map(|r| r.gradient.as_slice());
        let pre = state.begin_round(prev)?;
        let hint = match spec.hint {
            HintKind::Zero => alloc::vec![0.0; n],
            HintKind::LastGradient => prev.map_or_else(|| alloc::vec![0.0; n], <[f64]>::to_vec),
            HintKind::Perfect | HintKind::NoisyPerfect(_) => {
                let mut h = alloc::vec![0.0; n];
                if adversary.is_play_independent() {
                    h = adversary.next_loss(&pre.tilde_play, t)?.gradient;
                } else if let AdversaryKind::Linear { adaptive: true, .. } = adversary.kind() {
                    // The gradient only depends on the argmax of the play, so
                    // try each of the n candidates for an exact fixed point.
                    let mut found = None;
                    for j in 0..n {
                        let mut e = alloc::vec![0.0; n];
                        e[j] = 1.0;
                        let g = adversary.next_loss(&e, t)?.gradient;
                        if argmax(&state.play_for(&pre, &g)?) == j {
                            found = Some(g);
                            break;
                        }
                    }
                    h = match found {
                        Some(g) => g,
                        None => adversary.next_loss(&state.play_for(&pre, &h)?, t)?.gradient,
                    };
                } else {
                    // Damped iteration: h ↦ ∇φ_t(play(h)) need not contract
                    // once the step times the gradient's Lipschitz constant
                    // exceeds one.
                    let step = match spec.strategy.family() {
                        StrategyKind::SII => pre.theta,
                        _ => pre.eta * pre.theta,
                    };
                    let alpha = 1.0 / (1.0 + step * adversary.gradient_lipschitz());
                    for _ in 0..PERFECT_HINT_ITERS {
                        let p = state.play_for(&pre, &h)?;
                        let g = adversary.next_loss(&p, t)?.gradient;
                        if g == h {
                            break;
                        }
                        let gap = crate::linalg::norm_inf(&sub(&g, &h));
                        h = if gap <= 1e-15 * (1.0 + crate::linalg::norm_inf(&g)) {
                            g
                        } else {
                            h.iter().zip(&g).map(|(hi, gi)| hi + alpha * (gi - hi)).collect()
                        };
                    }
                }
                if let HintKind::NoisyPerfect(sigma) = spec.hint {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(hint_seed, t as u64));
                    for v in h.iter_mut() {
                        *v += sigma * rng.sample::<f64, _>(StandardNormal);
                    }
                }
                h
            }
        };
        let play = state.play_for(&pre, &hint)?;
        let fb = adversary.next_loss(&play, t)?;
        state.commit(pre.clone());
        let step = crate::strategy::Step { play, prelude: pre };
        records.push(RoundRecord::from_step(step, fb.gradient, hint, fb.loss));
    }
    let lookahead = state.begin_round(records.last().map(|r| r.gradient.as_slice()))?;
    let mut log = GameLog {
        mirror: spec.mirror.clone(),
        strategy: spec.strategy,
        schedule: spec.schedule.clone(),
        records,
        lookahead: Some(lookahead),
        adversary: adversary.descriptor(),
        hint_oracle: spec.hint.descriptor(),
        clairvoyant: spec.hint.is_clairvoyant(),
        comparator: None,
        seed: spec.seed,
    };
    let path = comparator_path(&log, &spec.comparator, derive_seed(spec.seed, STREAM_COMPARATOR))?;
    log.comparator = Some(path);
    Ok(log)
}

/// Materializes a comparator specification against a finished log.
pub fn comparator_path(log: &GameLog, spec: &ComparatorSpec, seed: u64) -> Result<ComparatorPath> {
    let horizon = log.horizon();
    let set = log.mirror.domain();
    match spec {
        ComparatorSpec::Static(u) => {
            check_dim(log.dim(), u.len())?;
            if !set.membership(u, 1e-9) {
                return Err(Error::InvalidParameter("static comparator must lie in C".into()));
            }
            ComparatorPath::constant(u.clone(), horizon)
        }
        ComparatorSpec::Anchor => ComparatorPath::constant(log.mirror.anchor().to_vec(), horizon),
        ComparatorSpec::BestStatic => {
            ComparatorPath::constant(best_static_comparator(log)?, horizon)
        }
        ComparatorSpec::Drift { budget } => drift_path(set, horizon, *budget, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use alloc::vec;

    fn simplex_map() -> MirrorMap {
        MirrorMap::entropy(4).unwrap()
    }

    fn ball_map() -> MirrorMap {
        MirrorMap::squared_norm(FeasibleSet::unit_ball(3).unwrap()).unwrap()
    }

    #[test]
    fn loss_examples() {
        let adv = Adversary::new(AdversaryKind::LinearFixed(vec![1.0, 0.0, 0.5, 0.2]), 0, &simplex_map()).unwrap();
        let fb = adv.next_loss(&[0.25; 4], 3).unwrap();
        assert_eq!(fb.gradient, vec![1.0, 0.0, 0.5, 0.2]);
        let q = Adversary::new(
            AdversaryKind::QuadraticFixed { q: Matrix::identity(3), b: vec![0.0; 3] },
            0,
            &ball_map(),
        )
        .unwrap();
        let p = [0.3, -0.2, 0.1];
        let fb = q.next_loss(&p, 1).unwrap();
        assert_eq!(fb.gradient, p.to_vec());
        assert!((fb.value.unwrap() - 0.5 * dot(&p, &p)).abs() < 1e-15);
        let m = Adversary::new(
            AdversaryKind::Monotone(MonotoneOperator::skew()),
            0,
            &MirrorMap::squared_norm(FeasibleSet::unit_ball(2).unwrap()).unwrap(),
        )
        .unwrap();
        assert!(m.next_loss(&[0.1, 0.2], 1).unwrap().value.is_none());
    }

    #[test]
    fn gradients_respect_declared_bounds() {
        for map in [simplex_map(), ball_map()] {
            let kinds = [
                AdversaryKind::Linear { bound: 2.0, nonnegative: true, adaptive: false },
                AdversaryKind::Linear { bound: 2.0, nonnegative: false, adaptive: true },
                AdversaryKind::Quadratic { bound: 2.0 },
            ];
            for kind in kinds {
                let adv = Adversary::new(kind, 7, &map).unwrap();
                for t in 1..200 {
                    let x = map.domain().sample(t as u64);
                    let g = adv.next_loss(&x, t).unwrap().gradient;
                    assert!(map.norms().dual(&g) <= 2.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences() {
        let map = ball_map();
        let adv = Adversary::new(AdversaryKind::Quadratic { bound: 1.0 }, 3, &map).unwrap();
        for t in 1..20 {
            let x = map.domain().sample(100 + t as u64);
            let fb = adv.next_loss(&x, t).unwrap();
            let loss = fb.loss.unwrap();
            for i in 0..3 {
                let h = 1e-6;
                let mut p = x.clone();
                let mut m = x.clone();
                p[i] += h;
                m[i] -= h;
                let fd = (loss.value(&p) - loss.value(&m)) / (2.0 * h);
                assert!((fd - fb.gradient[i]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn adversary_is_reproducible() {
        let map = simplex_map();
        let kind = AdversaryKind::Linear { bound: 1.0, nonnegative: true, adaptive: false };
        let a = Adversary::new(kind.clone(), 5, &map).unwrap();
        let b = Adversary::new(kind, 5, &map).unwrap();
        let x = [0.25; 4];
        for t in 1..50 {
            assert_eq!(a.next_loss(&x, t).unwrap(), b.next_loss(&x, t).unwrap());
        }
    }

    fn spec(hint: HintKind, adversary: AdversaryKind, map: MirrorMap, kind: StrategyKind) -> GameSpec {
        GameSpec {
            mirror: map,
            strategy: kind,
            schedule: ScheduleSpec::eta_decay(1.0).unwrap(),
            adversary,
            hint,
            comparator: ComparatorSpec::BestStatic,
            horizon: 60,
            seed: 11,
        }
    }

    #[test]
    fn hint_oracles() {
        let lin = AdversaryKind::Linear { bound: 1.0, nonnegative: true, adaptive: false };
        let last = play_game(&spec(HintKind::LastGradient, lin.clone(), simplex_map(), StrategyKind::Ones)).unwrap();
        assert_eq!(last.records[0].hint, vec![0.0; 4]);
        for w in last.records.windows(2) {
            assert_eq!(w[1].hint, w[0].gradient);
        }
        let perfect = play_game(&spec(HintKind::Perfect, lin, simplex_map(), StrategyKind::Ones)).unwrap();
        assert!(perfect.clairvoyant);
        for r in &perfect.records {
            assert_eq!(r.hint, r.gradient);
        }
        let quad = play_game(&spec(
            HintKind::Perfect,
            AdversaryKind::Quadratic { bound: 0.5 },
            ball_map(),
            StrategyKind::Olp,
        ))
        .unwrap();
        for r in &quad.records {
            assert!(norm_inf(&sub(&r.hint, &r.gradient)) < 1e-9);
        }
    }

    #[test]
    fn games_are_deterministic() {
        let s = spec(
            HintKind::NoisyPerfect(0.3),
            AdversaryKind::Linear { bound: 1.0, nonnegative: false, adaptive: true },
            simplex_map(),
            StrategyKind::S,
        );
        assert_eq!(play_game(&s).unwrap(), play_game(&s).unwrap());
    }

    #[test]
    fn best_static_examples() {
        let map = MirrorMap::entropy(3).unwrap();
        let mut s = spec(HintKind::Zero, AdversaryKind::LinearFixed(vec![0.5, 0.2, 0.2]), map, StrategyKind::Ones);
        s.horizon = 1;
        let log = play_game(&s).unwrap();
        assert_eq!(best_static_comparator(&log).unwrap(), vec![0.0, 1.0, 0.0]);

        let map = ball_map();
        let mut s = spec(HintKind::Zero, AdversaryKind::Quadratic { bound: 1.0 }, map.clone(), StrategyKind::Ogp);
        s.horizon = 5;
        let mut log = play_game(&s).unwrap();
        let centers = [vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![1.0, 1.0, 1.0]];
        for (r, c) in log.records.iter_mut().zip(centers.iter().cycle()) {
            r.loss = Some(Loss::Quadratic { q: Matrix::identity(3), b: c.iter().map(|v| -v).collect() });
        }
        let mut mean = vec![0.0; 3];
        for c in centers.iter().cycle().take(5) {
            for i in 0..3 {
                mean[i] += c[i] / 5.0;
            }
        }
        let expect = map.domain().project(&mean).unwrap();
        assert!(dist2(&best_static_comparator(&log).unwrap(), &expect) < 1e-12);
    }

    #[test]
    fn drift_respects_budget() {
        for set in [
            FeasibleSet::unit_ball(3).unwrap(),
            FeasibleSet::simplex(4).unwrap(),
            FeasibleSet::boxed(vec![0.0; 2], vec![1.0, 3.0]).unwrap(),
        ] {
            for seed in 0..10 {
                let p = drift_path(&set, 100, 2.5, seed).unwrap();
                assert!(p.path_length() <= 2.5 + 1e-9);
                assert!(p.points().iter().all(|z| set.membership(z, 1e-9)));
            }
        }
    }

    #[test]
    fn monotone_games_reject_best_static() {
        let map = MirrorMap::squared_norm(FeasibleSet::unit_ball(2).unwrap()).unwrap();
        let mut s = spec(HintKind::Zero, AdversaryKind::Monotone(MonotoneOperator::skew()), map, StrategyKind::Ogp);
        assert_eq!(play_game(&s).unwrap_err(), Error::NoLossValues);
        s.comparator = ComparatorSpec::Anchor;
        assert!(play_game(&s).is_ok());
    }
}
