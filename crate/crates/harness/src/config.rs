//! Flat `key = value` experiment files with dotted keys.
//!
//! ```text
//! # ONES on the 10-simplex
//! mirror.kind = entropy
//! set.dim = 10
//! strategy = ones
//! schedule.eta.kind = inv-sqrt
//! schedule.eta.c = 1.0
//! adversary.kind = linear
//! horizon = 100
//! seeds = 0..20
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use optimist_core::bounds::{BoundId, EvalOptions, Intermediate, ScheduleRequirement};
use optimist_core::game::{AdversaryKind, ComparatorSpec, HintKind};
use optimist_core::linalg::Matrix;
use optimist_core::mirror::{MirrorKind, MirrorMap};
use optimist_core::monotone::MonotoneOperator;
use optimist_core::sets::FeasibleSet;
use optimist_core::strategy::{ScheduleSpec, Sequence, StrategyKind};

use crate::error::{config, Result};

/// Every accepted key and whether it holds a single number (sweepable).
const KEYS: &[(&str, bool)] = &[
    ("mirror.kind", false),
    ("mirror.anchor", false),
    ("set.kind", false),
    ("set.dim", true),
    ("set.center", false),
    ("set.radius", true),
    ("set.lower", false),
    ("set.upper", false),
    ("strategy", false),
    ("schedule.eta.kind", false),
    ("schedule.eta.c", true),
    ("schedule.eta.values", false),
    ("schedule.theta.kind", false),
    ("schedule.theta.c", true),
    ("schedule.theta.values", false),
    ("adversary.kind", false),
    ("adversary.bound", true),
    ("adversary.nonnegative", false),
    ("adversary.adaptive", false),
    ("adversary.loss", false),
    ("adversary.operator", false),
    ("adversary.matrix", false),
    ("adversary.vector", false),
    ("adversary.seed", true),
    ("hint.kind", false),
    ("hint.sigma", true),
    ("comparator.kind", false),
    ("comparator.point", false),
    ("comparator.budget", true),
    ("horizon", true),
    ("seeds", false),
    ("bounds", false),
    ("bounds.rho", false),
    ("bounds.intermediate", false),
    ("tolerance", true),
    ("plots", false),
    ("monotone.operator", false),
    ("monotone.dim", true),
    ("monotone.matrix", false),
    ("monotone.vector", false),
    ("monotone.seed", true),
    ("monotone.instances", true),
    ("monotone.n_max", true),
    ("monotone.budget", true),
    ("monotone.k", true),
    ("monotone.restarts", true),
    ("monotone.loops", true),
];

/// Short names accepted by `sweep --axis`.
const ALIASES: &[(&str, &str)] = &[
    ("T", "horizon"),
    ("sigma", "hint.sigma"),
    ("σ", "hint.sigma"),
    ("c", "schedule.eta.c"),
    ("eta.c", "schedule.eta.c"),
    ("theta.c", "schedule.theta.c"),
    ("bound", "adversary.bound"),
    ("budget", "comparator.budget"),
];

/// Key/value pairs as read from disk, before interpretation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.iter().any(|(name, _)| *name == k) {
                return Err(config(format!("line {}: unknown key `{k}`", i + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|_| config(format!("`{key}` must be a non-negative integer, got `{v}`")))
        })
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        self.get(key).map_or(Ok(default), |v| match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(config(format!("`{key}` must be true or false, got `{v}`"))),
        })
    }

    fn vec(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| parse_vec(key, v)).transpose()
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| config(format!("missing key `{key}`")))
    }
}

/// Resolves a sweep axis (alias or full key) to a numeric config key.
pub fn resolve_axis(axis: &str) -> Result<&'static str> {
    if let Some((_, key)) = ALIASES.iter().find(|(a, _)| *a == axis) {
        return Ok(key);
    }
    match KEYS.iter().find(|(k, _)| *k == axis) {
        Some((k, true)) => Ok(k),
        Some((k, false)) => Err(config(format!("axis `{k}` is not a numeric key"))),
        None => Err(config(format!("unknown axis `{axis}`"))),
    }
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| config(format!("`{key}` must be a number, got `{v}`")))
}

/// Comma- or whitespace-separated numbers.
pub fn parse_vec(key: &str, v: &str) -> Result<Vec<f64>> {
    let out: Result<Vec<f64>> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err(config(format!("`{key}` needs at least one number")));
    }
    Ok(out)
}

/// Rows separated by `;`.
pub fn parse_matrix(key: &str, v: &str) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = v.split(';').map(|r| parse_vec(key, r)).collect::<Result<_>>()?;
    Matrix::from_rows(&rows).map_err(|e| config(format!("`{key}`: {e}")))
}

fn parse_seeds(v: &str) -> Result<Vec<u64>> {
    let bad = || config(format!("`seeds` must be a list like `1,2,3` or a range like `0..20`, got `{v}`"));
    if let Some((a, b)) = v.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    v.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// Which evaluators a run checks.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundSelection {
    /// Every compatible evaluator whose preconditions hold for the game.
    All,
    List(Vec<BoundId>),
}

/// A fully interpreted experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub mirror: MirrorMap,
    pub strategy: StrategyKind,
    pub schedule: ScheduleSpec,
    pub adversary: AdversaryKind,
    pub hint: HintKind,
    pub comparator: ComparatorSpec,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub bounds: BoundSelection,
    pub tolerance: f64,
    pub eval: EvalOptions,
    pub plots: bool,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let set = feasible_set(&raw)?;
        let mirror = mirror_map(&raw, set)?;
        let strategy = StrategyKind::parse(raw.required("strategy")?)
            .ok_or_else(|| config(format!("unknown strategy `{}`", raw.get("strategy").unwrap_or(""))))?;
        if let Some(need) = strategy.required_map() {
            if need != mirror.kind() {
                return Err(config(format!(
                    "strategy `{}` needs the {} map",
                    strategy.name(),
                    map_name(need)
                )));
            }
        }
        let horizon = raw.usize_or("horizon", 100)?;
        if horizon == 0 {
            return Err(config("`horizon` must be at least 1"));
        }
        let schedule = ScheduleSpec::new(sequence(&raw, "eta", horizon)?, sequence(&raw, "theta", horizon)?)
            .map_err(config)?;
        let adversary = adversary(&raw, mirror.dim())?;
        let hint = match raw.get("hint.kind").unwrap_or("zero") {
            "zero" => HintKind::Zero,
            "last-gradient" => HintKind::LastGradient,
            "perfect" => HintKind::Perfect,
            "noisy-perfect" => {
                let s = raw.f64_or("hint.sigma", 0.0)?;
                if !(s >= 0.0) {
                    return Err(config("`hint.sigma` must be ≥ 0"));
                }
                HintKind::NoisyPerfect(s)
            }
            other => return Err(config(format!("unknown hint kind `{other}`"))),
        };
        let comparator = comparator(&raw, &mirror, &adversary)?;
        let seeds = parse_seeds(raw.get("seeds").unwrap_or("0"))?;
        let tolerance = raw.f64_or("tolerance", 1e-7)?;
        if !(tolerance >= 0.0) {
            return Err(config("`tolerance` must be ≥ 0"));
        }
        let eval = EvalOptions {
            infinite_rho: match raw.get("bounds.rho").unwrap_or("refined") {
                "refined" => false,
                "infinite" => true,
                other => return Err(config(format!("`bounds.rho` must be refined or infinite, got `{other}`"))),
            },
            intermediate: match raw.get("bounds.intermediate").unwrap_or("statement") {
                "statement" => Intermediate::Statement,
                "proof" => Intermediate::Proof,
                other => {
                    return Err(config(format!(
                        "`bounds.intermediate` must be statement or proof, got `{other}`"
                    )))
                }
            },
        };
        let bounds = match raw.get("bounds").unwrap_or("all") {
            "all" => BoundSelection::All,
            list => BoundSelection::List(
                list.split(',')
                    .map(|s| BoundId::parse(s.trim()).ok_or_else(|| config(format!("unknown bound `{}`", s.trim()))))
                    .collect::<Result<_>>()?,
            ),
        };
        let plots = raw.bool_or("plots", true)?;
        let cfg = Self {
            raw,
            mirror,
            strategy,
            schedule,
            adversary,
            hint,
            comparator,
            horizon,
            seeds,
            bounds,
            tolerance,
            eval,
            plots,
        };
        cfg.validate_bounds()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }

    /// Explicitly requested bounds must fit the strategy, map, schedule and
    /// comparator; nothing is silently dropped.
    fn validate_bounds(&self) -> Result<()> {
        let BoundSelection::List(ids) = &self.bounds else {
            return Ok(());
        };
        for &id in ids {
            if !id.compatible(self.strategy, self.mirror.kind()) {
                return Err(config(format!(
                    "bound `{}` does not apply to strategy `{}` with the {} map",
                    id.name(),
                    self.strategy.name(),
                    map_name(self.mirror.kind())
                )));
            }
            if id.needs_static_path() && matches!(self.comparator, ComparatorSpec::Drift { .. }) {
                return Err(config(format!("bound `{}` needs a static comparator", id.name())));
            }
            if !schedule_satisfies(&self.schedule, id.schedule_requirement(), self.horizon) {
                return Err(config(format!(
                    "bound `{}` needs schedule {:?}",
                    id.name(),
                    id.schedule_requirement()
                )));
            }
        }
        Ok(())
    }
}

pub fn schedule_satisfies(s: &ScheduleSpec, req: ScheduleRequirement, horizon: usize) -> bool {
    match req {
        ScheduleRequirement::None => true,
        ScheduleRequirement::EtaNonincreasingUnitTheta => {
            s.eta.is_nonincreasing(horizon) && s.theta.is_unit(horizon)
        }
        ScheduleRequirement::ThetaNondecreasingUnitEta => {
            s.eta.is_unit(horizon) && s.theta.is_nondecreasing(horizon)
        }
        ScheduleRequirement::ThetaNondecreasing => s.theta.is_nondecreasing(horizon),
    }
}

pub fn map_name(kind: MirrorKind) -> &'static str {
    match kind {
        MirrorKind::Entropy => "entropy",
        MirrorKind::SquaredNorm => "squared-norm",
    }
}

/// The feasible set described by the `set.*` keys; entropy maps default to
/// the simplex.
pub fn feasible_set(raw: &RawConfig) -> Result<FeasibleSet> {
    let default_kind = if raw.get("mirror.kind") == Some("entropy") { "simplex" } else { "" };
    let kind = raw.get("set.kind").unwrap_or(default_kind);
    let set = match kind {
        "simplex" => FeasibleSet::simplex(raw.usize_or("set.dim", 0)?),
        "ball" => {
            let radius = raw.f64_or("set.radius", 1.0)?;
            let center = match raw.vec("set.center")? {
                Some(c) => c,
                None => vec![0.0; raw.usize_or("set.dim", 0)?],
            };
            FeasibleSet::ball(center, radius)
        }
        "box" => {
            let lower = raw.vec("set.lower")?.ok_or_else(|| config("box needs `set.lower`"))?;
            let upper = raw.vec("set.upper")?.ok_or_else(|| config("box needs `set.upper`"))?;
            FeasibleSet::boxed(lower, upper)
        }
        "" => return Err(config("missing key `set.kind`")),
        other => return Err(config(format!("unknown set kind `{other}`"))),
    };
    let set = set.map_err(config)?;
    if let Some(d) = raw.get("set.dim") {
        let d: usize = d.parse().map_err(|_| config("`set.dim` must be an integer"))?;
        if d != set.dim() {
            return Err(config(format!("`set.dim` = {d} but the set has {} coordinates", set.dim())));
        }
    }
    Ok(set)
}

fn mirror_map(raw: &RawConfig, set: FeasibleSet) -> Result<MirrorMap> {
    let anchor = raw.vec("mirror.anchor")?;
    match raw.required("mirror.kind")? {
        "entropy" => {
            let FeasibleSet::Simplex { dim } = set else {
                return Err(config("the entropy map lives on the simplex (`set.kind = simplex`)"));
            };
            match anchor {
                Some(a) if a.len() != dim => {
                    Err(config(format!("`mirror.anchor` has {} entries, the set has {dim}", a.len())))
                }
                Some(a) => MirrorMap::entropy_with_anchor(a).map_err(config),
                None => MirrorMap::entropy(dim).map_err(config),
            }
        }
        "squared-norm" => match anchor {
            Some(a) if a.len() != set.dim() => Err(config(format!(
                "`mirror.anchor` has {} entries, the set has {}",
                a.len(),
                set.dim()
            ))),
            Some(a) => MirrorMap::squared_norm_with_anchor(set, a).map_err(config),
            None => MirrorMap::squared_norm(set).map_err(config),
        },
        other => Err(config(format!("unknown mirror kind `{other}`"))),
    }
}

fn sequence(raw: &RawConfig, name: &str, horizon: usize) -> Result<Sequence> {
    let key = |s: &str| format!("schedule.{name}.{s}");
    let c = raw.f64_or(&key("c"), 1.0)?;
    let seq = match raw.get(&key("kind")).unwrap_or("constant") {
        "constant" => Sequence::Constant(c),
        "inv-sqrt" => Sequence::InvSqrt(c),
        "sqrt" => Sequence::Sqrt(c),
        "custom" => {
            let v = raw
                .vec(&key("values"))?
                .ok_or_else(|| config(format!("custom schedule needs `{}`", key("values"))))?;
            if v.len() < horizon + 1 {
                return Err(config(format!(
                    "`{}` needs T + 1 = {} values, got {}",
                    key("values"),
                    horizon + 1,
                    v.len()
                )));
            }
            Sequence::Custom(v)
        }
        other => return Err(config(format!("unknown schedule kind `{other}` for {name}"))),
    };
    Ok(seq)
}

/// The monotone operator described by `{prefix}.operator` and friends.
pub fn operator(raw: &RawConfig, prefix: &str, dim: usize) -> Result<MonotoneOperator> {
    let key = |s: &str| format!("{prefix}.{s}");
    let vector = |raw: &RawConfig| -> Result<Vec<f64>> {
        Ok(raw.vec(&key("vector"))?.unwrap_or_else(|| vec![0.0; dim]))
    };
    let op = match raw.get(&key("operator")).unwrap_or("skew") {
        "skew" => MonotoneOperator::skew(),
        "identity" => MonotoneOperator::identity(dim),
        "random-linear" => MonotoneOperator::random_linear(dim, raw.usize_or(&key("seed"), 0)? as u64),
        "linear" => {
            let m = parse_matrix(&key("matrix"), raw.required(&key("matrix"))?)?;
            MonotoneOperator::linear(m, vector(raw)?).map_err(config)?
        }
        "gradient-quadratic" => {
            let m = parse_matrix(&key("matrix"), raw.required(&key("matrix"))?)?;
            MonotoneOperator::gradient_quadratic(m, vector(raw)?).map_err(config)?
        }
        other => return Err(config(format!("unknown operator `{other}`"))),
    };
    if op.dim() != dim {
        return Err(config(format!("operator has dimension {}, expected {dim}", op.dim())));
    }
    Ok(op)
}

fn adversary(raw: &RawConfig, dim: usize) -> Result<AdversaryKind> {
    let bound = raw.f64_or("adversary.bound", 1.0)?;
    if !(bound > 0.0) {
        return Err(config("`adversary.bound` must be > 0"));
    }
    Ok(match raw.get("adversary.kind").unwrap_or("linear") {
        "linear" => match raw.vec("adversary.loss")? {
            Some(l) if l.len() != dim => {
                return Err(config(format!("`adversary.loss` has {} entries, the set has {dim}", l.len())))
            }
            Some(l) => AdversaryKind::LinearFixed(l),
            None => AdversaryKind::Linear {
                bound,
                nonnegative: raw.bool_or("adversary.nonnegative", false)?,
                adaptive: raw.bool_or("adversary.adaptive", false)?,
            },
        },
        "quadratic" => AdversaryKind::Quadratic { bound },
        "monotone" => AdversaryKind::Monotone(operator(raw, "adversary", dim)?),
        other => return Err(config(format!("unknown adversary kind `{other}`"))),
    })
}

fn comparator(raw: &RawConfig, mirror: &MirrorMap, adv: &AdversaryKind) -> Result<ComparatorSpec> {
    let monotone = matches!(adv, AdversaryKind::Monotone(_));
    let default = if monotone { "anchor" } else { "best-static" };
    Ok(match raw.get("comparator.kind").unwrap_or(default) {
        "best-static" if monotone => {
            return Err(config("best-static comparators need loss values; monotone games have none"))
        }
        "best-static" => ComparatorSpec::BestStatic,
        "anchor" => ComparatorSpec::Anchor,
        "static" => {
            let u = raw.vec("comparator.point")?.ok_or_else(|| config("static comparator needs `comparator.point`"))?;
            if u.len() != mirror.dim() || !mirror.domain().membership(&u, 1e-9) {
                return Err(config("`comparator.point` must be a point of the feasible set"));
            }
            ComparatorSpec::Static(u)
        }
        "drift" => {
            let budget = raw.f64_or("comparator.budget", 1.0)?;
            if !(budget >= 0.0) {
                return Err(config("`comparator.budget` must be ≥ 0"));
            }
            ComparatorSpec::Drift { budget }
        }
        other => return Err(config(format!("unknown comparator kind `{other}`"))),
    })
}

/// Settings of the `monotone` subcommand.
#[derive(Debug, Clone)]
pub struct MonotoneConfig {
    pub raw: RawConfig,
    pub operator: MonotoneOperator,
    pub set: FeasibleSet,
    pub seed: u64,
    pub instances: usize,
    pub n_max: usize,
    pub budget: usize,
    pub k: usize,
    pub restarts: usize,
    pub loops: usize,
    pub tolerance: f64,
}

impl MonotoneConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let default_dim = match raw.get("monotone.operator").unwrap_or("skew") {
            "skew" => 2,
            _ => 0,
        };
        let dim = match raw.get("monotone.dim") {
            Some(_) => raw.usize_or("monotone.dim", 0)?,
            None if raw.get("set.kind").is_some() => feasible_set(&raw)?.dim(),
            None => default_dim,
        };
        if dim == 0 {
            return Err(config("missing key `monotone.dim`"));
        }
        let operator = operator(&raw, "monotone", dim)?;
        let set = if raw.get("set.kind").is_some() {
            feasible_set(&raw)?
        } else {
            FeasibleSet::boxed(vec![0.0; dim], vec![1.0; dim]).map_err(config)?
        };
        if set.dim() != dim {
            return Err(config(format!("set has {} coordinates, operator {dim}", set.dim())));
        }
        let budget = raw.usize_or("monotone.budget", 200)?;
        let k = raw.usize_or("monotone.k", 64)?;
        if budget == 0 || k == 0 {
            return Err(config("`monotone.budget` and `monotone.k` must be ≥ 1"));
        }
        Ok(Self {
            operator,
            set,
            seed: raw.usize_or("monotone.seed", 0)? as u64,
            instances: raw.usize_or("monotone.instances", 50)?,
            n_max: raw.usize_or("monotone.n_max", 3)?,
            budget,
            k,
            restarts: raw.usize_or("monotone.restarts", 2)?,
            loops: raw.usize_or("monotone.loops", 20)?,
            tolerance: raw.f64_or("tolerance", 1e-6)?,
            raw,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }
}
