//! Update engines.
//!
//! One state machine covers the generic rule `S`, its relaxations `S-I` and
//! `S-II`, and the closed forms ONES, OLP and OGP. A round is split into
//! [`StrategyState::begin_round`] (fold the previous gradient, compute the
//! pre-hint iterates), [`StrategyState::play_for`] (apply a hint) and
//! [`StrategyState::commit`]; [`StrategyState::step`] does all three. The split
//! lets hint oracles preview plays and lets logs carry a lookahead record.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bounds::ComparatorPath;
use crate::error::{check_dim, Error, Result};
use crate::game::Loss;
use crate::linalg::{add_scaled, axpy, dist2};
use crate::math::hint_interpolate;
use crate::mirror::{softmax, MirrorKind, MirrorMap};

/// A positive step-size sequence indexed from `t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    Constant(f64),
    /// `c / √t`
    InvSqrt(f64),
    /// `c · √t`
    Sqrt(f64),
    /// Explicit values; the last one repeats past the end.
    Custom(Vec<f64>),
}

impl Sequence {
    pub fn at(&self, t: usize) -> f64 {
        let t = t.max(1);
        match self {
            Sequence::Constant(c) => *c,
            Sequence::InvSqrt(c) => c / libm::sqrt(t as f64),
            Sequence::Sqrt(c) => c * libm::sqrt(t as f64),
            Sequence::Custom(v) => v[(t - 1).min(v.len() - 1)],
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            Sequence::Constant(c) | Sequence::InvSqrt(c) | Sequence::Sqrt(c) => {
                *c > 0.0 && c.is_finite()
            }
            Sequence::Custom(v) => !v.is_empty() && v.iter().all(|x| *x > 0.0 && x.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!("{name} schedule must be positive")))
        }
    }

    pub fn is_nonincreasing(&self, horizon: usize) -> bool {
        (1..=horizon).all(|t| self.at(t) >= self.at(t + 1))
    }

    pub fn is_nondecreasing(&self, horizon: usize) -> bool {
        (1..=horizon).all(|t| self.at(t) <= self.at(t + 1))
    }

    /// Exactly one for every `t ≤ horizon + 1`.
    pub fn is_unit(&self, horizon: usize) -> bool {
        (1..=horizon + 1).all(|t| self.at(t) == 1.0)
    }
}

/// The pair `(η_t, θ_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    pub eta: Sequence,
    pub theta: Sequence,
}

impl ScheduleSpec {
    pub fn new(eta: Sequence, theta: Sequence) -> Result<Self> {
        eta.validate("eta")?;
        theta.validate("theta")?;
        Ok(Self { eta, theta })
    }

    /// `η_t = c/√t`, `θ_t ≡ 1`.
    pub fn eta_decay(c: f64) -> Result<Self> {
        Self::new(Sequence::InvSqrt(c), Sequence::Constant(1.0))
    }

    /// `η_t ≡ 1`, `θ_t = c√t`.
    pub fn theta_growth(c: f64) -> Result<Self> {
        Self::new(Sequence::Constant(1.0), Sequence::Sqrt(c))
    }

    pub fn constant(eta: f64, theta: f64) -> Result<Self> {
        Self::new(Sequence::Constant(eta), Sequence::Constant(theta))
    }

    pub fn eta(&self, t: usize) -> f64 {
        self.eta.at(t)
    }

    pub fn theta(&self, t: usize) -> f64 {
        self.theta.at(t)
    }

    pub fn eta_monotone_nonincreasing(&self, horizon: usize) -> bool {
        self.eta.is_nonincreasing(horizon)
    }

    pub fn theta_monotone_nondecreasing(&self, horizon: usize) -> bool {
        self.theta.is_nondecreasing(horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    S,
    SI,
    SII,
    Ones,
    Olp,
    Ogp,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::S,
        StrategyKind::SI,
        StrategyKind::SII,
        StrategyKind::Ones,
        StrategyKind::Olp,
        StrategyKind::Ogp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::S => "s",
            StrategyKind::SI => "s1",
            StrategyKind::SII => "s2",
            StrategyKind::Ones => "ones",
            StrategyKind::Olp => "olp",
            StrategyKind::Ogp => "ogp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// The generic rule a closed form instantiates.
    pub fn family(self) -> StrategyKind {
        match self {
            StrategyKind::Ones => StrategyKind::S,
            StrategyKind::Olp => StrategyKind::SI,
            StrategyKind::Ogp => StrategyKind::SII,
            k => k,
        }
    }

    /// Mirror map kind a closed form is tied to, if any.
    pub fn required_map(self) -> Option<MirrorKind> {
        match self {
            StrategyKind::Ones => Some(MirrorKind::Entropy),
            StrategyKind::Olp | StrategyKind::Ogp => Some(MirrorKind::SquaredNorm),
            _ => None,
        }
    }
}

/// Pre-hint quantities of round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prelude {
    pub t: usize,
    pub eta: f64,
    pub theta: f64,
    /// `Σ_{i<t} θᵢ xᵢ*`
    pub accumulated: Vec<f64>,
    /// `x̌^ψ_t` (equal to `x̃^ψ_t` for `S` and ONES)
    pub check_dual: Vec<f64>,
    /// `x̃^ψ_t`
    pub tilde_dual: Vec<f64>,
    /// `x̃_t`
    pub tilde_play: Vec<f64>,
}

/// Output of one full round.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub play: Vec<f64>,
    pub prelude: Prelude,
}

#[derive(Debug, Clone)]
pub struct StrategyState {
    kind: StrategyKind,
    mirror: MirrorMap,
    schedule: ScheduleSpec,
    round: usize,
    accumulated: Vec<f64>,
    tilde_dual: Vec<f64>,
    tilde_play: Vec<f64>,
    log_anchor: Vec<f64>,
}

impl StrategyState {
    pub fn new(kind: StrategyKind, mirror: MirrorMap, schedule: ScheduleSpec) -> Result<Self> {
        if let Some(req) = kind.required_map() {
            if mirror.kind() != req {
                return Err(Error::Incompatible(alloc::format!(
                    "{} needs the {:?} mirror map",
                    kind.name(),
                    req
                )));
            }
        }
        let n = mirror.dim();
        let log_anchor = match mirror.kind() {
            MirrorKind::Entropy => mirror.anchor().iter().map(|x| libm::log(*x)).collect(),
            MirrorKind::SquaredNorm => Vec::new(),
        };
        Ok(Self {
            kind,
            accumulated: alloc::vec![0.0; n],
            tilde_dual: mirror.anchor_dual().to_vec(),
            tilde_play: mirror.anchor().to_vec(),
            mirror,
            schedule,
            round: 0,
            log_anchor,
        })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn mirror(&self) -> &MirrorMap {
        &self.mirror
    }

    pub fn schedule(&self) -> &ScheduleSpec {
        &self.schedule
    }

    /// Number of committed rounds.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn accumulated(&self) -> &[f64] {
        &self.accumulated
    }

    /// Folds `θ_{t−1} x*_{t−1}` and computes the pre-hint iterates of round
    /// `t = round + 1`. Does not mutate the state.
    pub fn begin_round(&self, prev_gradient: Option<&[f64]>) -> Result<Prelude> {
        let t = self.round + 1;
        let n = self.mirror.dim();
        let eta = self.schedule.eta(t);
        let theta = self.schedule.theta(t);
        let mut acc = self.accumulated.clone();
        let prev_theta = self.schedule.theta(t.saturating_sub(1));
        let g = match (t, prev_gradient) {
            (1, None) => None,
            (1, Some(_)) => {
                return Err(Error::InvalidParameter("round 1 has no previous gradient".into()))
            }
            (_, None) => {
                return Err(Error::InvalidParameter(alloc::format!(
                    "round {t} needs the previous gradient"
                )))
            }
            (_, Some(g)) => {
                check_dim(n, g.len())?;
                axpy(prev_theta, g, &mut acc);
                Some(g)
            }
        };
        let m = &self.mirror;
        let a_dual = m.anchor_dual();
        let (check_dual, tilde_dual, tilde_play) = match self.kind {
            StrategyKind::S => {
                let c = add_scaled(a_dual, -eta, &acc);
                let p = m.mirror_step(&c)?;
                (c.clone(), c, p)
            }
            StrategyKind::SI => {
                let c = add_scaled(a_dual, -eta, &acc);
                (c.clone(), m.reselect(&c)?, m.mirror_step(&c)?)
            }
            StrategyKind::SII => match g {
                None => (a_dual.to_vec(), a_dual.to_vec(), m.anchor().to_vec()),
                Some(g) => {
                    let c = add_scaled(&self.tilde_dual, -prev_theta, g);
                    (c.clone(), m.reselect(&c)?, m.mirror_step(&c)?)
                }
            },
            StrategyKind::Ones => {
                let c = add_scaled(a_dual, -eta, &acc);
                let p = softmax(&add_scaled(&self.log_anchor, -eta, &acc));
                (c.clone(), c, p)
            }
            StrategyKind::Olp => {
                let c = add_scaled(m.anchor(), -eta, &acc);
                let p = m.domain().project(&c)?;
                (c, p.clone(), p)
            }
            StrategyKind::Ogp => match g {
                None => (m.anchor().to_vec(), m.anchor().to_vec(), m.anchor().to_vec()),
                Some(g) => {
                    let c = add_scaled(&self.tilde_play, -prev_theta, g);
                    let p = m.domain().project(&c)?;
                    (c, p.clone(), p)
                }
            },
        };
        Ok(Prelude { t, eta, theta, accumulated: acc, check_dual, tilde_dual, tilde_play })
    }

    /// The play of the prepared round under `hint`.
    pub fn play_for(&self, pre: &Prelude, hint: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.mirror.dim(), hint.len())?;
        let m = &self.mirror;
        let lazy = pre.eta * pre.theta;
        match self.kind {
            StrategyKind::S | StrategyKind::SI => m.mirror_step(&add_scaled(&pre.tilde_dual, -lazy, hint)),
            StrategyKind::SII => m.mirror_step(&add_scaled(&pre.tilde_dual, -pre.theta, hint)),
            StrategyKind::Ones => {
                let mut z = pre.accumulated.clone();
                axpy(pre.theta, hint, &mut z);
                Ok(softmax(&add_scaled(&self.log_anchor, -pre.eta, &z)))
            }
            StrategyKind::Olp => m.domain().project(&add_scaled(&pre.tilde_play, -lazy, hint)),
            StrategyKind::Ogp => {
                m.domain().project(&add_scaled(&pre.tilde_play, -pre.theta, hint))
            }
        }
    }

    pub fn commit(&mut self, pre: Prelude) {
        self.round = pre.t;
        self.accumulated = pre.accumulated;
        self.tilde_dual = pre.tilde_dual;
        self.tilde_play = pre.tilde_play;
    }

    /// One full round `(x_t, x̌^ψ_t, x̃^ψ_t) = S(x̂*_t, x*_{t−1}; η_t, θ_t)`.
    pub fn step(&mut self, hint: &[f64], prev_gradient: Option<&[f64]>) -> Result<Step> {
        let pre = self.begin_round(prev_gradient)?;
        let play = self.play_for(&pre, hint)?;
        self.commit(pre.clone());
        Ok(Step { play, prelude: pre })
    }
}

/// Complete trace of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    /// `x_t`
    pub play: Vec<f64>,
    /// `x*_t`
    pub gradient: Vec<f64>,
    /// `x̂*_t`
    pub hint: Vec<f64>,
    /// `x̃_t`
    pub tilde_play: Vec<f64>,
    /// `x̃^ψ_t`
    pub tilde_dual: Vec<f64>,
    /// `x̌^ψ_t`
    pub check_dual: Vec<f64>,
    /// `Σ_{i<t} θᵢ xᵢ*`
    pub accumulated: Vec<f64>,
    pub eta: f64,
    pub theta: f64,
    pub loss: Option<Loss>,
    pub loss_value: Option<f64>,
}

impl RoundRecord {
    pub fn from_step(step: Step, gradient: Vec<f64>, hint: Vec<f64>, loss: Option<Loss>) -> Self {
        let loss_value = loss.as_ref().map(|l| l.value(&step.play));
        let p = step.prelude;
        Self {
            t: p.t,
            play: step.play,
            gradient,
            hint,
            tilde_play: p.tilde_play,
            tilde_dual: p.tilde_dual,
            check_dual: p.check_dual,
            accumulated: p.accumulated,
            eta: p.eta,
            theta: p.theta,
            loss,
            loss_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameLog {
    pub mirror: MirrorMap,
    pub strategy: StrategyKind,
    pub schedule: ScheduleSpec,
    pub records: Vec<RoundRecord>,
    /// Round `T + 1` pre-hint iterates, needed by the dynamic evaluators.
    pub lookahead: Option<Prelude>,
    pub adversary: String,
    pub hint_oracle: String,
    /// Hints were computed from the realized gradient.
    pub clairvoyant: bool,
    pub comparator: Option<ComparatorPath>,
    pub seed: u64,
}

impl GameLog {
    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    pub fn dim(&self) -> usize {
        self.mirror.dim()
    }

    /// True when every round carries an evaluable loss.
    pub fn has_losses(&self) -> bool {
        self.records.iter().all(|r| r.loss.is_some())
    }

    /// Records cover `1..=T` in order with consistent dimensions.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.records.is_empty() {
            return Err(Error::IncompleteLog("no rounds".into()));
        }
        for (i, r) in self.records.iter().enumerate() {
            if r.t != i + 1 {
                return Err(Error::IncompleteLog(alloc::format!(
                    "round {} found at position {}",
                    r.t,
                    i + 1
                )));
            }
            for v in [
                &r.play,
                &r.gradient,
                &r.hint,
                &r.tilde_play,
                &r.tilde_dual,
                &r.check_dual,
                &r.accumulated,
            ] {
                check_dim(n, v.len())?;
            }
        }
        if let Some(la) = &self.lookahead {
            if la.t != self.horizon() + 1 {
                return Err(Error::IncompleteLog("lookahead is not round T + 1".into()));
            }
        }
        Ok(())
    }

    pub fn lookahead(&self) -> Result<&Prelude> {
        self.lookahead
            .as_ref()
            .ok_or_else(|| Error::IncompleteLog("missing lookahead record".into()))
    }

    /// Replays the engine on the logged gradients and hints and returns the
    /// largest Euclidean deviation from the logged plays and iterates.
    pub fn replay_deviation(&self) -> Result<f64> {
        let replayed = replay(self, |r| r.hint.clone())?;
        let mut worst = 0.0f64;
        for (a, b) in self.records.iter().zip(&replayed.records) {
            worst = worst
                .max(dist2(&a.play, &b.play))
                .max(dist2(&a.tilde_play, &b.tilde_play))
                .max(dist2(&a.accumulated, &b.accumulated));
        }
        Ok(worst)
    }
}

fn replay(log: &GameLog, hint_of: impl Fn(&RoundRecord) -> Vec<f64>) -> Result<GameLog> {
    log.validate()?;
    let mut state = StrategyState::new(log.strategy, log.mirror.clone(), log.schedule.clone())?;
    let mut records = Vec::with_capacity(log.horizon());
    let mut prev: Option<&[f64]> = None;
    for r in &log.records {
        let hint = hint_of(r);
        let step = state.step(&hint, prev)?;
        let mut rec = RoundRecord::from_step(step, r.gradient.clone(), hint, r.loss.clone());
        if rec.loss.is_none() {
            rec.loss_value = None;
        }
        records.push(rec);
        prev = Some(&r.gradient);
    }
    let lookahead = Some(state.begin_round(prev)?);
    Ok(GameLog { records, lookahead, ..log.clone() })
}

/// Replays the strategy with the corrected hints
/// `ŷ*_t = λx̂*_t + (1 − λ)x*_t`, `λ = min{‖x*_t‖ / ‖x*_t − x̂*_t‖, 1}`.
///
/// The returned log holds the auxiliary sequence `(y_t, ỹ_t, ỹ^ψ_t)`; it is
/// never played.
pub fn build_auxiliary_log(log: &GameLog) -> Result<GameLog> {
    let norms = log.mirror.norms();
    let mut aux = replay(log, |r| {
        hint_interpolate(&r.gradient, &r.hint, norms)
            .map(|(_, h)| h)
            .unwrap_or_else(|_| r.hint.clone())
    })?;
    aux.hint_oracle = alloc::format!("{}+corrected", log.hint_oracle);
    Ok(aux)
}
