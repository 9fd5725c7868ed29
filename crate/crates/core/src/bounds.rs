//! Per-round evaluators for the regret upper bounds and the violation check.
//!
//! Every evaluator recomputes its Bregman, KL, `Q_ρ*` and `Φ_ξ` terms from the
//! logged iterates and never reuses engine-side quantities beyond the raw
//! iterates themselves, so a sound bound doubles as a check on the engine.
//!
//! The per-round split is chosen so that partial sums up to `t` are exactly
//! the bound for horizon `t`. Static containers such as `B(u, a^ψ)/η_{T+1}`
//! are therefore spread telescopically over the rounds.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{add_scaled, dist2, dot, norm2, scale, sq, sub};
use crate::math::{kl, phi_cap, ConvexModulus, NormPair, Rho};
use crate::mirror::{MirrorKind, MirrorMap};
use crate::strategy::{build_auxiliary_log, GameLog, StrategyKind};

const MEMBERSHIP_TOL: f64 = 1e-9;

/// Comparator sequence `z_1, …, z_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorPath {
    points: Vec<Vec<f64>>,
    is_static: bool,
}

impl ComparatorPath {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidParameter("comparator path is empty".into()));
        };
        let n = first.len();
        for p in &points {
            check_dim(n, p.len())?;
        }
        let is_static = points.iter().all(|p| p == first);
        Ok(Self { points, is_static })
    }

    /// `z_t ≡ u` for `t = 1..=horizon`.
    pub fn constant(u: Vec<f64>, horizon: usize) -> Result<Self> {
        Self::new(alloc::vec![u; horizon.max(1)])
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_static(&self) -> bool {
        self.is_static
    }

    pub fn at(&self, t: usize) -> &[f64] {
        &self.points[t - 1]
    }

    /// `Σ_{t≥2} ‖z_t − z_{t−1}‖₂`.
    pub fn path_length(&self) -> f64 {
        self.points.windows(2).map(|w| dist2(&w[0], &w[1])).sum()
    }

    /// `‖z_t − z_{t−1}‖₂` for `t = 2..=T`.
    pub fn step_lengths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| dist2(&w[0], &w[1])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    S1Dynamic,
    SDynamic,
    SStaticEta,
    SStaticTheta,
    S2Dynamic,
    OnesEta,
    OnesTheta,
    OnesEtaAux,
    OnesThetaAux,
    OlpDynamic,
    OlpDynamicAux,
    OlpStaticEta,
    OlpStaticEtaAux,
    OlpStaticTheta,
    OlpStaticThetaAux,
    OgpDynamic,
    OgpDynamicAux,
    OgpStatic,
    OgpStaticAux,
}

/// Monotonicity a bound needs from the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleRequirement {
    None,
    /// `θ_t ≡ 1`, `η_t ≥ η_{t+1}`.
    EtaNonincreasingUnitTheta,
    /// `η_t ≡ 1`, `θ_{t−1} ≤ θ_t`.
    ThetaNondecreasingUnitEta,
    /// `θ_{t−1} ≤ θ_t`.
    ThetaNondecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Container {
    S1,
    S,
    S2,
    StaticEta,
    StaticTheta,
    OlpDynamic,
    OgpDynamic,
}

impl BoundId {
    pub const ALL: [BoundId; 19] = [
        BoundId::S1Dynamic,
        BoundId::SDynamic,
        BoundId::SStaticEta,
        BoundId::SStaticTheta,
        BoundId::S2Dynamic,
        BoundId::OnesEta,
        BoundId::OnesTheta,
        BoundId::OnesEtaAux,
        BoundId::OnesThetaAux,
        BoundId::OlpDynamic,
        BoundId::OlpDynamicAux,
        BoundId::OlpStaticEta,
        BoundId::OlpStaticEtaAux,
        BoundId::OlpStaticTheta,
        BoundId::OlpStaticThetaAux,
        BoundId::OgpDynamic,
        BoundId::OgpDynamicAux,
        BoundId::OgpStatic,
        BoundId::OgpStaticAux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::S1Dynamic => "s1-dynamic",
            BoundId::SDynamic => "s-dynamic",
            BoundId::SStaticEta => "s-static-eta",
            BoundId::SStaticTheta => "s-static-theta",
            BoundId::S2Dynamic => "s2-dynamic",
            BoundId::OnesEta => "ones-eta",
            BoundId::OnesTheta => "ones-theta",
            BoundId::OnesEtaAux => "ones-eta-aux",
            BoundId::OnesThetaAux => "ones-theta-aux",
            BoundId::OlpDynamic => "olp-dynamic",
            BoundId::OlpDynamicAux => "olp-dynamic-aux",
            BoundId::OlpStaticEta => "olp-static-eta",
            BoundId::OlpStaticEtaAux => "olp-static-eta-aux",
            BoundId::OlpStaticTheta => "olp-static-theta",
            BoundId::OlpStaticThetaAux => "olp-static-theta-aux",
            BoundId::OgpDynamic => "ogp-dynamic",
            BoundId::OgpDynamicAux => "ogp-dynamic-aux",
            BoundId::OgpStatic => "ogp-static",
            BoundId::OgpStaticAux => "ogp-static-aux",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name().eq_ignore_ascii_case(s))
    }

    pub fn is_auxiliary(self) -> bool {
        matches!(
            self,
            BoundId::OnesEtaAux
                | BoundId::OnesThetaAux
                | BoundId::OlpDynamicAux
                | BoundId::OlpStaticEtaAux
                | BoundId::OlpStaticThetaAux
                | BoundId::OgpDynamicAux
                | BoundId::OgpStaticAux
        )
    }

    /// True for bounds stated against a single comparator `u`.
    pub fn needs_static_path(self) -> bool {
        matches!(self.container(), Container::StaticEta | Container::StaticTheta)
    }

    pub fn schedule_requirement(self) -> ScheduleRequirement {
        match self.container() {
            Container::S1 | Container::S | Container::S2 => ScheduleRequirement::None,
            Container::StaticEta => ScheduleRequirement::EtaNonincreasingUnitTheta,
            Container::StaticTheta if self.family() == Family::Ogp => {
                ScheduleRequirement::ThetaNondecreasing
            }
            Container::StaticTheta | Container::OlpDynamic => {
                ScheduleRequirement::ThetaNondecreasingUnitEta
            }
            Container::OgpDynamic => ScheduleRequirement::ThetaNondecreasing,
        }
    }

    fn container(self) -> Container {
        match self {
            BoundId::S1Dynamic => Container::S1,
            BoundId::SDynamic => Container::S,
            BoundId::S2Dynamic => Container::S2,
            BoundId::SStaticEta | BoundId::OnesEta | BoundId::OnesEtaAux => Container::StaticEta,
            BoundId::OlpStaticEta | BoundId::OlpStaticEtaAux => Container::StaticEta,
            BoundId::SStaticTheta | BoundId::OnesTheta | BoundId::OnesThetaAux => {
                Container::StaticTheta
            }
            BoundId::OlpStaticTheta | BoundId::OlpStaticThetaAux => Container::StaticTheta,
            BoundId::OgpStatic | BoundId::OgpStaticAux => Container::StaticTheta,
            BoundId::OlpDynamic | BoundId::OlpDynamicAux => Container::OlpDynamic,
            BoundId::OgpDynamic | BoundId::OgpDynamicAux => Container::OgpDynamic,
        }
    }

    fn family(self) -> Family {
        match self {
            BoundId::S1Dynamic => Family::S1,
            BoundId::SDynamic | BoundId::SStaticEta | BoundId::SStaticTheta => Family::S,
            BoundId::S2Dynamic => Family::S2,
            BoundId::OnesEta | BoundId::OnesTheta | BoundId::OnesEtaAux | BoundId::OnesThetaAux => {
                Family::Ones
            }
            BoundId::OlpDynamic
            | BoundId::OlpDynamicAux
            | BoundId::OlpStaticEta
            | BoundId::OlpStaticEtaAux
            | BoundId::OlpStaticTheta
            | BoundId::OlpStaticThetaAux => Family::Olp,
            _ => Family::Ogp,
        }
    }

    /// Whether a log produced by `strategy` on a `map` mirror map is a valid
    /// input for this bound.
    pub fn compatible(self, strategy: StrategyKind, map: MirrorKind) -> bool {
        use MirrorKind::*;
        use StrategyKind as K;
        match self.family() {
            Family::S1 => matches!(strategy, K::S | K::SI | K::Ones | K::Olp),
            Family::S => matches!((strategy, map), (K::S | K::Ones, _) | (K::SI, Entropy)),
            Family::S2 => matches!(strategy, K::SII | K::Ogp),
            Family::Ones => {
                map == Entropy && matches!(strategy, K::Ones | K::S | K::SI)
            }
            Family::Olp => map == SquaredNorm && matches!(strategy, K::Olp | K::SI),
            Family::Ogp => map == SquaredNorm && matches!(strategy, K::Ogp | K::SII),
        }
    }

    /// Bounds that accept logs of `strategy` on `map`.
    pub fn compatible_with(strategy: StrategyKind, map: MirrorKind) -> Vec<BoundId> {
        Self::ALL.into_iter().filter(|b| b.compatible(strategy, map)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    S1,
    S,
    S2,
    Ones,
    Olp,
    Ogp,
}

/// Which point stands in for `X_{t+1}` in the S-I bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Intermediate {
    /// `X_{t+1} = ∇ψ*(a^ψ + (η_t/η_{t+1})(x̃^ψ_{t+1} − a^ψ))`.
    #[default]
    Statement,
    /// Same with `x̌^ψ_{t+1}` in place of `x̃^ψ_{t+1}`.
    Proof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    /// Evaluate penalties with `ρ = ∞`, i.e. plain strong convexity.
    pub infinite_rho: bool,
    pub intermediate: Intermediate,
}

/// What the regret column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretKind {
    /// `Σ φ_t(x_t) − φ_t(z_t)`
    Loss,
    /// `Σ ⟨x*_t, x_t − z_t⟩`, used when the game has no loss values.
    Linearized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub corollary_id: BoundId,
    pub container_terms: Vec<f64>,
    pub penalty_terms: Vec<f64>,
    /// Carries its own sign; includes the S-I intermediate bracket.
    pub subtraction_terms: Vec<f64>,
    pub regret_terms: Vec<f64>,
    pub regret_kind: RegretKind,
    pub total_bound: f64,
    pub played_regret: f64,
    /// `Σ⟨x*_t, x_t − z_t⟩`, an upper bound on the loss regret.
    pub linearized_regret: f64,
    pub margin: f64,
    pub rho: Rho,
    pub warnings: Vec<String>,
}

impl BoundReport {
    pub fn horizon(&self) -> usize {
        self.container_terms.len()
    }

    pub fn container_total(&self) -> f64 {
        self.container_terms.iter().sum()
    }

    pub fn penalty_total(&self) -> f64 {
        self.penalty_terms.iter().sum()
    }

    pub fn subtraction_total(&self) -> f64 {
        self.subtraction_terms.iter().sum()
    }

    /// Running bound after each round.
    pub fn cumulative_bound(&self) -> Vec<f64> {
        let mut acc = 0.0;
        (0..self.horizon())
            .map(|i| {
                acc += self.container_terms[i] + self.penalty_terms[i] + self.subtraction_terms[i];
                acc
            })
            .collect()
    }

    pub fn cumulative_regret(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.regret_terms
            .iter()
            .map(|r| {
                acc += r;
                acc
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub margin: f64,
    pub worst_cumulative_margin: f64,
    /// Round at which the worst cumulative margin occurs.
    pub worst_round: usize,
    /// The bound is `+∞`, so it holds vacuously.
    pub vacuous: bool,
}

/// PASS iff `margin ≥ −tol`.
pub fn check_violation(report: &BoundReport, tol: f64) -> Verdict {
    let bound = report.cumulative_bound();
    let regret = report.cumulative_regret();
    let mut worst = f64::INFINITY;
    let mut worst_round = 0;
    for (i, (b, r)) in bound.iter().zip(&regret).enumerate() {
        let m = b - r;
        if m < worst {
            worst = m;
            worst_round = i + 1;
        }
    }
    let vacuous = report.total_bound == f64::INFINITY;
    Verdict {
        pass: vacuous || report.margin >= -tol,
        margin: report.margin,
        worst_cumulative_margin: worst,
        worst_round,
        vacuous,
    }
}

/// `Σ φ_t(x_t) − φ_t(z_t)`.
pub fn played_regret(log: &GameLog, path: &ComparatorPath) -> Result<f64> {
    Ok(loss_regret_terms(log, path)?.iter().sum())
}

/// `Σ ⟨x*_t, x_t − z_t⟩`; defined for every game.
pub fn linearized_regret(log: &GameLog, path: &ComparatorPath) -> Result<f64> {
    check_path(log, path)?;
    Ok(linearized_terms(log, path).iter().sum())
}

fn loss_regret_terms(log: &GameLog, path: &ComparatorPath) -> Result<Vec<f64>> {
    check_path(log, path)?;
    log.records
        .iter()
        .zip(path.points())
        .map(|(r, z)| match &r.loss {
            Some(loss) => Ok(loss.value(&r.play) - loss.value(z)),
            None => Err(Error::NoLossValues),
        })
        .collect()
}

fn linearized_terms(log: &GameLog, path: &ComparatorPath) -> Vec<f64> {
    log.records
        .iter()
        .zip(path.points())
        .map(|(r, z)| dot(&r.gradient, &sub(&r.play, z)))
        .collect()
}

fn check_path(log: &GameLog, path: &ComparatorPath) -> Result<()> {
    if path.len() != log.horizon() {
        return Err(Error::InvalidParameter(alloc::format!(
            "comparator path has {} points for {} rounds",
            path.len(),
            log.horizon()
        )));
    }
    check_dim(log.dim(), path.points()[0].len())?;
    let set = log.mirror.domain();
    if let Some(t) = path.points().iter().position(|z| !set.membership(z, MEMBERSHIP_TOL)) {
        return Err(Error::OutsideDomain(alloc::format!("comparator z_{} is not in C", t + 1)));
    }
    Ok(())
}

fn check_schedule(id: BoundId, log: &GameLog) -> Result<()> {
    let t_max = log.horizon();
    let eta: Vec<f64> = (1..=t_max + 1).map(|t| eta_at(log, t)).collect();
    let theta: Vec<f64> = (1..=t_max).map(|t| log.records[t - 1].theta).collect();
    let unit = |v: &[f64]| v.iter().all(|x| *x == 1.0);
    let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]);
    let nondecreasing = |v: &[f64]| v.windows(2).all(|w| w[0] <= w[1]);
    let (ok, what) = match id.schedule_requirement() {
        ScheduleRequirement::None => (true, ""),
        ScheduleRequirement::EtaNonincreasingUnitTheta => {
            (unit(&theta) && nonincreasing(&eta), "theta = 1 and non-increasing eta")
        }
        ScheduleRequirement::ThetaNondecreasingUnitEta => {
            (unit(&eta) && nondecreasing(&theta), "eta = 1 and non-decreasing theta")
        }
        ScheduleRequirement::ThetaNondecreasing => (nondecreasing(&theta), "non-decreasing theta"),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::SchedulePrecondition(alloc::format!("{} requires {}", id.name(), what)))
    }
}

/// `η_t` for `t ≤ T + 1`, taken from the records and the lookahead.
fn eta_at(log: &GameLog, t: usize) -> f64 {
    match log.records.get(t - 1) {
        Some(r) => r.eta,
        None => log.lookahead.as_ref().map_or_else(|| log.schedule.eta(t), |la| la.eta),
    }
}

/// Evaluates bound `id` on `log` against `path`.
pub fn evaluate(id: BoundId, log: &GameLog, path: &ComparatorPath, opts: EvalOptions) -> Result<BoundReport> {
    log.validate()?;
    let map = &log.mirror;
    if !id.compatible(log.strategy, map.kind()) {
        return Err(Error::Incompatible(alloc::format!(
            "{} does not apply to {} logs on the {:?} map",
            id.name(),
            log.strategy.name(),
            map.kind()
        )));
    }
    check_schedule(id, log)?;
    check_path(log, path)?;
    if id.needs_static_path() && !path.is_static() {
        return Err(Error::InvalidParameter(alloc::format!("{} needs a static comparator", id.name())));
    }
    let lookahead = log.lookahead()?;
    let rho = if opts.infinite_rho { Rho::Infinite } else { map.modulus().rho() };
    let modulus = ConvexModulus::new(rho);
    let norms = map.norms();
    let horizon = log.horizon();
    let recs = &log.records;
    let mut warnings = Vec::new();

    // 1/(η_tθ_t) for the S family, 1/θ_t for the greedy family.
    let greedy = matches!(id.family(), Family::S2 | Family::Ogp);
    let weight = |t: usize| {
        let r = &recs[t - 1];
        if greedy { 1.0 / r.theta } else { 1.0 / (r.eta * r.theta) }
    };
    let check_next = |t: usize| -> &[f64] {
        if t < horizon { &recs[t].check_dual } else { &lookahead.check_dual }
    };
    let tilde_next = |t: usize| -> &[f64] {
        if t < horizon { &recs[t].tilde_dual } else { &lookahead.tilde_dual }
    };
    let a = map.anchor();
    let a_dual = map.anchor_dual();

    let mut container = Vec::with_capacity(horizon);
    let mut penalty = Vec::with_capacity(horizon);
    let mut subtraction = Vec::with_capacity(horizon);

    let static_base = if id.needs_static_path() {
        let u = path.at(1);
        Some(match id.family() {
            Family::Ones => kl(u, a)?,
            Family::Olp | Family::Ogp => 0.5 * sq(dist2(u, a)),
            _ => map.bregman(u, a_dual)?,
        })
    } else {
        None
    };
    if static_base == Some(f64::INFINITY) {
        warnings.push("container term is infinite; the bound holds vacuously".into());
    }

    let aux = if id.is_auxiliary() { Some(build_auxiliary_log(log)?) } else { None };
    let diameter = map.domain().diameter_in(NormPair::L2L2);

    for t in 1..=horizon {
        let r = &recs[t - 1];
        let w = weight(t);
        let z = path.at(t);
        let c = match id.container() {
            Container::S1 | Container::S => {
                let base = if id.container() == Container::S1 { &r.check_dual } else { &r.tilde_dual };
                let next = if id.container() == Container::S1 { check_next(t) } else { tilde_next(t) };
                let ratio = r.eta / eta_at(log, t + 1);
                let shifted = add_scaled(a_dual, ratio, &sub(next, a_dual));
                w * (map.bregman(z, base)? - map.bregman(z, &shifted)?)
            }
            Container::S2 => w * (map.bregman(z, &r.tilde_dual)? - map.bregman(z, check_next(t))?),
            Container::StaticEta => {
                let b = static_base.unwrap_or(0.0);
                let head = if t == 1 { b / r.eta } else { 0.0 };
                head + b * (1.0 / eta_at(log, t + 1) - 1.0 / r.eta)
            }
            Container::StaticTheta => {
                if t == 1 { static_base.unwrap_or(0.0) / r.theta } else { 0.0 }
            }
            Container::OlpDynamic | Container::OgpDynamic if t == 1 => {
                0.5 * sq(dist2(z, a)) / r.theta
            }
            Container::OlpDynamic => {
                let step = dist2(z, path.at(t - 1));
                let lever = norm2(&add_scaled(&sub(z, a), 1.0, &r.accumulated));
                lever * step / r.theta
            }
            Container::OgpDynamic => {
                let step = dist2(z, path.at(t - 1));
                diameter * step * step / r.theta
            }
        };
        container.push(c);

        let xi = 1.0 / w;
        let err = norms.dual(&sub(&r.gradient, &r.hint));
        let p = if id.is_auxiliary() {
            w * phi_cap(&r.gradient, &r.hint, xi, rho, norms)?
        } else {
            w * modulus.phi_star(xi * err)
        };
        penalty.push(p);

        let (x, x_tilde_play, x_tilde_dual) = match &aux {
            Some(l) => {
                let ar = &l.records[t - 1];
                (&ar.play, &ar.tilde_play, &ar.tilde_dual)
            }
            None => (&r.play, &r.tilde_play, &r.tilde_dual),
        };
        let mut s = match id.family() {
            Family::Olp | Family::Ogp => -0.5 * w * sq(dist2(x, x_tilde_play)),
            _ => -w * map.bregman(x, x_tilde_dual)?,
        };
        if id.container() == Container::S1 {
            let next = match opts.intermediate {
                Intermediate::Statement => tilde_next(t),
                Intermediate::Proof => check_next(t),
            };
            let d = scale(&sub(next, a_dual), 1.0 / eta_at(log, t + 1));
            let big_x = map.resolve_intermediate(&d, r.eta)?;
            s += w * (map.bregman(&big_x, &r.tilde_dual)? - map.bregman(&big_x, &r.check_dual)?);
        }
        subtraction.push(s);
    }

    let (regret_terms, regret_kind) = if log.has_losses() {
        (loss_regret_terms(log, path)?, RegretKind::Loss)
    } else {
        (linearized_terms(log, path), RegretKind::Linearized)
    };
    let linearized: f64 = linearized_terms(log, path).iter().sum();
    let played: f64 = regret_terms.iter().sum();
    let total = container.iter().sum::<f64>() + penalty.iter().sum::<f64>() + subtraction.iter().sum::<f64>();
    let margin = if total == f64::INFINITY { f64::INFINITY } else { total - played };
    if log.clairvoyant {
        warnings.push("hints were computed from the realized gradients".into());
    }
    Ok(BoundReport {
        corollary_id: id,
        container_terms: container,
        penalty_terms: penalty,
        subtraction_terms: subtraction,
        regret_terms,
        regret_kind,
        total_bound: total,
        played_regret: played,
        linearized_regret: linearized,
        margin,
        rho,
        warnings,
    })
}

/// Every compatible bound whose schedule and comparator preconditions hold.
pub fn evaluate_applicable(log: &GameLog, path: &ComparatorPath, opts: EvalOptions) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for id in BoundId::compatible_with(log.strategy, log.mirror.kind()) {
        if id.needs_static_path() && !path.is_static() {
            continue;
        }
        match evaluate(id, log, path, opts) {
            Ok(r) => out.push(r),
            Err(Error::SchedulePrecondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn bound_s1_dynamic(log: &GameLog, path: &ComparatorPath) -> Result<BoundReport> {
    evaluate(BoundId::S1Dynamic, log, path, EvalOptions::default())
}

pub fn bound_s_dynamic(log: &GameLog, path: &ComparatorPath) -> Result<BoundReport> {
    evaluate(BoundId::SDynamic, log, path, EvalOptions::default())
}

pub fn bound_s_static_eta(log: &GameLog, u: &[f64]) -> Result<BoundReport> {
    static_bound(BoundId::SStaticEta, log, u)
}

pub fn bound_s_static_theta(log: &GameLog, u: &[f64]) -> Result<BoundReport> {
    static_bound(BoundId::SStaticTheta, log, u)
}

pub fn bound_s2_dynamic(log: &GameLog, path: &ComparatorPath) -> Result<BoundReport> {
    evaluate(BoundId::S2Dynamic, log, path, EvalOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticVariant {
    Eta,
    Theta,
    EtaAux,
    ThetaAux,
}

pub fn bound_ones_static(log: &GameLog, u: &[f64], variant: StaticVariant) -> Result<BoundReport> {
    let id = match variant {
        StaticVariant::Eta => BoundId::OnesEta,
        StaticVariant::Theta => BoundId::OnesTheta,
        StaticVariant::EtaAux => BoundId::OnesEtaAux,
        StaticVariant::ThetaAux => BoundId::OnesThetaAux,
    };
    static_bound(id, log, u)
}

pub fn bound_olp_dynamic(log: &GameLog, path: &ComparatorPath, auxiliary: bool) -> Result<BoundReport> {
    let id = if auxiliary { BoundId::OlpDynamicAux } else { BoundId::OlpDynamic };
    evaluate(id, log, path, EvalOptions::default())
}

pub fn bound_olp_static(log: &GameLog, u: &[f64], variant: StaticVariant) -> Result<BoundReport> {
    let id = match variant {
        StaticVariant::Eta => BoundId::OlpStaticEta,
        StaticVariant::Theta => BoundId::OlpStaticTheta,
        StaticVariant::EtaAux => BoundId::OlpStaticEtaAux,
        StaticVariant::ThetaAux => BoundId::OlpStaticThetaAux,
    };
    static_bound(id, log, u)
}

pub fn bound_ogp_dynamic(log: &GameLog, path: &ComparatorPath, auxiliary: bool) -> Result<BoundReport> {
    let id = if auxiliary { BoundId::OgpDynamicAux } else { BoundId::OgpDynamic };
    evaluate(id, log, path, EvalOptions::default())
}

pub fn bound_ogp_static(log: &GameLog, u: &[f64], auxiliary: bool) -> Result<BoundReport> {
    let id = if auxiliary { BoundId::OgpStaticAux } else { BoundId::OgpStatic };
    static_bound(id, log, u)
}

fn static_bound(id: BoundId, log: &GameLog, u: &[f64]) -> Result<BoundReport> {
    let path = ComparatorPath::constant(u.to_vec(), log.horizon())?;
    evaluate(id, log, &path, EvalOptions::default())
}

/// Checks that `log` was played on a map `kind`; used by callers that build
/// logs by hand.
pub fn require_map(map: &MirrorMap, kind: MirrorKind) -> Result<()> {
    if map.kind() == kind {
        Ok(())
    } else {
        Err(Error::Incompatible(alloc::format!("expected the {kind:?} map")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{play_game, AdversaryKind, ComparatorSpec, GameSpec, HintKind, Loss};
    use crate::sets::FeasibleSet;
    use crate::strategy::{ScheduleSpec, Sequence};
    use alloc::vec;

    fn game(
        mirror: MirrorMap,
        strategy: StrategyKind,
        schedule: ScheduleSpec,
        adversary: AdversaryKind,
        hint: HintKind,
        comparator: ComparatorSpec,
        horizon: usize,
        seed: u64,
    ) -> GameLog {
        play_game(&GameSpec { mirror, strategy, schedule, adversary, hint, comparator, horizon, seed })
            .unwrap()
    }

    fn lin() -> AdversaryKind {
        AdversaryKind::Linear { bound: 1.0, nonnegative: false, adaptive: false }
    }

    #[test]
    fn played_regret_examples() {
        let log = game(
            MirrorMap::entropy(2).unwrap(),
            StrategyKind::Ones,
            ScheduleSpec::constant(1e-12, 1.0).unwrap(),
            AdversaryKind::LinearFixed(vec![1.0, 0.0]),
            HintKind::Zero,
            ComparatorSpec::Static(vec![0.0, 1.0]),
            2,
            0,
        );
        let path = log.comparator.clone().unwrap();
        assert!((played_regret(&log, &path).unwrap() - 1.0).abs() < 1e-9);
        let own = ComparatorPath::new(log.records.iter().map(|r| r.play.clone()).collect()).unwrap();
        assert_eq!(played_regret(&log, &own).unwrap(), 0.0);
    }

    #[test]
    fn check_violation_examples() {
        let mut rep = BoundReport {
            corollary_id: BoundId::SDynamic,
            container_terms: vec![0.3],
            penalty_terms: vec![0.0],
            subtraction_terms: vec![0.0],
            regret_terms: vec![0.0],
            regret_kind: RegretKind::Loss,
            total_bound: 0.3,
            played_regret: 0.0,
            linearized_regret: 0.0,
            margin: 0.3,
            rho: Rho::Infinite,
            warnings: vec![],
        };
        assert!(check_violation(&rep, 1e-7).pass);
        rep.margin = -1e-3;
        assert!(!check_violation(&rep, 1e-7).pass);
        rep.margin = -1e-9;
        assert!(check_violation(&rep, 1e-7).pass);
        rep.total_bound = f64::INFINITY;
        rep.margin = f64::INFINITY;
        assert!(check_violation(&rep, 1e-7).vacuous);
    }

    #[test]
    fn perfect_hints_zero_penalties() {
        let log = game(
            MirrorMap::entropy(4).unwrap(),
            StrategyKind::Ones,
            ScheduleSpec::eta_decay(1.0).unwrap(),
            lin(),
            HintKind::Perfect,
            ComparatorSpec::BestStatic,
            50,
            1,
        );
        let path = log.comparator.clone().unwrap();
        for r in evaluate_applicable(&log, &path, EvalOptions::default()).unwrap() {
            assert!(r.penalty_terms.iter().all(|p| *p == 0.0), "{:?}", r.corollary_id);
            assert!(r.margin >= -1e-7);
        }
    }

    #[test]
    fn ones_container_examples() {
        let log = game(
            MirrorMap::entropy(4).unwrap(),
            StrategyKind::Ones,
            ScheduleSpec::eta_decay(0.5).unwrap(),
            lin(),
            HintKind::LastGradient,
            ComparatorSpec::Anchor,
            20,
            2,
        );
        let at_anchor = bound_ones_static(&log, &[0.25; 4], StaticVariant::Eta).unwrap();
        assert!(at_anchor.container_total().abs() < 1e-12);
        let corner = bound_ones_static(&log, &[0.0, 0.0, 1.0, 0.0], StaticVariant::Eta).unwrap();
        let expect = libm::log(4.0) / (0.5 / libm::sqrt(21.0));
        assert!((corner.container_total() - expect).abs() < 1e-9);
    }

    #[test]
    fn entropy_s_has_no_intermediate_bracket() {
        let log = game(
            MirrorMap::entropy(3).unwrap(),
            StrategyKind::S,
            ScheduleSpec::new(Sequence::InvSqrt(1.0), Sequence::Sqrt(0.5)).unwrap(),
            lin(),
            HintKind::LastGradient,
            ComparatorSpec::Drift { budget: 1.0 },
            40,
            3,
        );
        let path = log.comparator.clone().unwrap();
        let s1 = bound_s1_dynamic(&log, &path).unwrap();
        let s = bound_s_dynamic(&log, &path).unwrap();
        for (a, b) in s1.subtraction_terms.iter().zip(&s.subtraction_terms) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn schedule_and_compatibility_errors() {
        let log = game(
            MirrorMap::entropy(3).unwrap(),
            StrategyKind::Ones,
            ScheduleSpec::theta_growth(1.0).unwrap(),
            lin(),
            HintKind::Zero,
            ComparatorSpec::Anchor,
            10,
            4,
        );
        let u = [1.0 / 3.0; 3];
        assert!(matches!(
            bound_ones_static(&log, &u, StaticVariant::Eta),
            Err(Error::SchedulePrecondition(_))
        ));
        assert!(bound_ones_static(&log, &u, StaticVariant::Theta).is_ok());
        assert!(matches!(bound_olp_static(&log, &u, StaticVariant::Theta), Err(Error::Incompatible(_))));
        let mut no_la = log.clone();
        no_la.lookahead = None;
        assert!(matches!(
            bound_s1_dynamic(&no_la, &log.comparator.clone().unwrap()),
            Err(Error::IncompleteLog(_))
        ));
    }

    #[test]
    fn anchor_comparator_with_perfect_hints() {
        let set = FeasibleSet::unit_ball(3).unwrap();
        let log = game(
            MirrorMap::squared_norm(set).unwrap(),
            StrategyKind::Olp,
            ScheduleSpec::eta_decay(0.5).unwrap(),
            AdversaryKind::Quadratic { bound: 1.0 },
            HintKind::Perfect,
            ComparatorSpec::Anchor,
            60,
            5,
        );
        let rep = bound_olp_static(&log, &[0.0; 3], StaticVariant::Eta).unwrap();
        assert_eq!(rep.container_total(), 0.0);
        // The perfect hint is a fixed point of play -> gradient, solved to rounding.
        assert!(rep.penalty_total() < 1e-25);
        assert!(rep.total_bound <= 0.0);
        assert!(rep.played_regret <= rep.total_bound + 1e-9);
    }

    #[test]
    fn ogp_drift_term_hand_sum() {
        let set = FeasibleSet::unit_ball(2).unwrap();
        let mut log = game(
            MirrorMap::squared_norm(set).unwrap(),
            StrategyKind::Ogp,
            ScheduleSpec::theta_growth(0.3).unwrap(),
            lin(),
            HintKind::Zero,
            ComparatorSpec::Anchor,
            4,
            6,
        );
        let pts = vec![vec![0.0, 0.0], vec![0.3, 0.0], vec![0.3, 0.4], vec![0.3, 0.4]];
        let path = ComparatorPath::new(pts).unwrap();
        log.comparator = Some(path.clone());
        let rep = bound_ogp_dynamic(&log, &path, false).unwrap();
        let th = |t: f64| 0.3 * libm::sqrt(t);
        let expect = 2.0 * 0.09 / th(2.0) + 2.0 * 0.16 / th(3.0);
        let drift: f64 = rep.container_terms[1..].iter().sum();
        assert!((drift - expect).abs() < 1e-12);
    }

    #[test]
    fn rho_refinement_tightens() {
        let set = FeasibleSet::boxed(vec![0.0; 2], vec![0.5, 0.5]).unwrap();
        let log = game(
            MirrorMap::squared_norm(set).unwrap(),
            StrategyKind::Ogp,
            ScheduleSpec::theta_growth(4.0).unwrap(),
            AdversaryKind::Linear { bound: 3.0, nonnegative: false, adaptive: false },
            HintKind::Zero,
            ComparatorSpec::BestStatic,
            30,
            7,
        );
        let path = log.comparator.clone().unwrap();
        let refined = evaluate(BoundId::OgpStatic, &log, &path, EvalOptions::default()).unwrap();
        let plain = evaluate(
            BoundId::OgpStatic,
            &log,
            &path,
            EvalOptions { infinite_rho: true, ..Default::default() },
        )
        .unwrap();
        assert!(refined.total_bound < plain.total_bound);
    }

    #[test]
    fn monotone_games_use_linearized_regret() {
        let log = game(
            MirrorMap::squared_norm(FeasibleSet::unit_ball(2).unwrap()).unwrap(),
            StrategyKind::Ogp,
            ScheduleSpec::theta_growth(0.5).unwrap(),
            AdversaryKind::Monotone(crate::monotone::MonotoneOperator::skew()),
            HintKind::LastGradient,
            ComparatorSpec::Anchor,
            30,
            8,
        );
        let path = log.comparator.clone().unwrap();
        assert_eq!(played_regret(&log, &path), Err(Error::NoLossValues));
        let rep = bound_s2_dynamic(&log, &path).unwrap();
        assert_eq!(rep.regret_kind, RegretKind::Linearized);
        assert!(rep.margin >= -1e-7);
    }

    #[test]
    fn loss_regret_below_linearized() {
        let log = game(
            MirrorMap::squared_norm(FeasibleSet::unit_ball(3).unwrap()).unwrap(),
            StrategyKind::Olp,
            ScheduleSpec::eta_decay(1.0).unwrap(),
            AdversaryKind::Quadratic { bound: 2.0 },
            HintKind::LastGradient,
            ComparatorSpec::BestStatic,
            80,
            9,
        );
        let path = log.comparator.clone().unwrap();
        assert!(played_regret(&log, &path).unwrap() <= linearized_regret(&log, &path).unwrap() + 1e-9);
        let _ = Loss::Linear(vec![0.0; 3]);
    }
}
