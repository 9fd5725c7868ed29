//! Round logs as CSV, complete enough to re-evaluate every bound offline.
//!
//! Metadata sits in leading `# key=value` lines. Each data row is one round;
//! vectors are space-separated inside a single field, so the header does not
//! depend on the dimension. The final row (`t = T + 1`) carries the
//! lookahead pre-hint iterates and leaves the per-round fields empty.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use optimist_core::bounds::ComparatorPath;
use optimist_core::game::Loss;
use optimist_core::linalg::Matrix;
use optimist_core::mirror::{MirrorKind, MirrorMap};
use optimist_core::sets::FeasibleSet;
use optimist_core::strategy::{GameLog, Prelude, RoundRecord, ScheduleSpec, Sequence, StrategyKind};

use crate::config::map_name;
use crate::error::{runtime, Result};

pub const LOG_HEADER: [&str; 13] = [
    "t",
    "eta",
    "theta",
    "play",
    "gradient",
    "hint",
    "tilde_play",
    "tilde_dual",
    "check_dual",
    "accumulated",
    "loss",
    "loss_value",
    "comparator",
];

fn join(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{x}").unwrap();
    }
    s
}

fn encode_loss(loss: &Option<Loss>) -> String {
    match loss {
        None => String::new(),
        Some(Loss::Linear(l)) => format!("linear;{}", join(l)),
        Some(Loss::Quadratic { q, b }) => format!("quadratic;{};{}", join(q.data()), join(b)),
    }
}

fn set_metadata(set: &FeasibleSet) -> Vec<(&'static str, String)> {
    match set {
        FeasibleSet::Simplex { dim } => vec![("set.kind", "simplex".into()), ("set.dim", dim.to_string())],
        FeasibleSet::Ball { center, radius } => vec![
            ("set.kind", "ball".into()),
            ("set.center", join(center)),
            ("set.radius", radius.to_string()),
        ],
        FeasibleSet::Box { lower, upper } => {
            vec![("set.kind", "box".into()), ("set.lower", join(lower)), ("set.upper", join(upper))]
        }
    }
}

pub fn write_log(path: &Path, log: &GameLog, comparator: &ComparatorPath) -> Result<()> {
    let mut out = String::new();
    let mut meta = vec![("mirror.kind", map_name(log.mirror.kind()).to_string())];
    meta.extend(set_metadata(log.mirror.domain()));
    meta.push(("mirror.anchor", join(log.mirror.anchor())));
    meta.push(("strategy", log.strategy.name().into()));
    meta.push(("adversary", log.adversary.clone()));
    meta.push(("hint", log.hint_oracle.clone()));
    meta.push(("clairvoyant", log.clairvoyant.to_string()));
    meta.push(("seed", log.seed.to_string()));
    for (k, v) in meta {
        writeln!(out, "# {k}={v}").unwrap();
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(LOG_HEADER)?;
    for r in &log.records {
        w.write_record([
            r.t.to_string(),
            r.eta.to_string(),
            r.theta.to_string(),
            join(&r.play),
            join(&r.gradient),
            join(&r.hint),
            join(&r.tilde_play),
            join(&r.tilde_dual),
            join(&r.check_dual),
            join(&r.accumulated),
            encode_loss(&r.loss),
            r.loss_value.map_or(String::new(), |v| v.to_string()),
            join(comparator.at(r.t)),
        ])?;
    }
    if let Some(p) = &log.lookahead {
        w.write_record([
            p.t.to_string(),
            p.eta.to_string(),
            p.theta.to_string(),
            String::new(),
            String::new(),
            String::new(),
            join(&p.tilde_play),
            join(&p.tilde_dual),
            join(&p.check_dual),
            join(&p.accumulated),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    out.push_str(std::str::from_utf8(&w.into_inner().map_err(runtime)?).map_err(runtime)?);
    std::fs::write(path, out)?;
    Ok(())
}

fn parse_vec(field: &str, what: &str, t: &str) -> Result<Vec<f64>> {
    field
        .split_whitespace()
        .map(|s| s.parse::<f64>().map_err(|_| runtime(format!("round {t}: bad number `{s}` in {what}"))))
        .collect()
}

fn parse_num(field: &str, what: &str, t: &str) -> Result<f64> {
    field.parse().map_err(|_| runtime(format!("round {t}: bad {what} `{field}`")))
}

fn decode_loss(field: &str, t: &str) -> Result<Option<Loss>> {
    if field.is_empty() {
        return Ok(None);
    }
    let parts: Vec<&str> = field.split(';').collect();
    match parts.as_slice() {
        ["linear", l] => Ok(Some(Loss::Linear(parse_vec(l, "loss", t)?))),
        ["quadratic", q, b] => {
            let b = parse_vec(b, "loss", t)?;
            let n = b.len();
            let q = Matrix::new(n, n, parse_vec(q, "loss", t)?).map_err(runtime)?;
            Ok(Some(Loss::Quadratic { q, b }))
        }
        _ => Err(runtime(format!("round {t}: cannot read loss `{field}`"))),
    }
}

fn rebuild_mirror(meta: &BTreeMap<String, String>) -> Result<MirrorMap> {
    let get = |k: &str| meta.get(k).map(String::as_str).ok_or_else(|| runtime(format!("log lacks `# {k}=`")));
    let nums = |k: &str| -> Result<Vec<f64>> { parse_vec(get(k)?, k, "header") };
    let set = match get("set.kind")? {
        "simplex" => FeasibleSet::simplex(get("set.dim")?.parse().map_err(runtime)?),
        "ball" => FeasibleSet::ball(nums("set.center")?, parse_num(get("set.radius")?, "radius", "header")?),
        "box" => FeasibleSet::boxed(nums("set.lower")?, nums("set.upper")?),
        other => return Err(runtime(format!("unknown set kind `{other}` in log"))),
    }
    .map_err(runtime)?;
    let anchor = nums("mirror.anchor")?;
    match get("mirror.kind")? {
        "entropy" => MirrorMap::entropy_with_anchor(anchor),
        "squared-norm" => MirrorMap::squared_norm_with_anchor(set, anchor),
        other => return Err(runtime(format!("unknown mirror kind `{other}` in log"))),
    }
    .map_err(runtime)
}

/// Reads a log written by [`write_log`]. The schedule is rebuilt from the
/// recorded per-round values.
pub fn read_log(path: &Path) -> Result<(GameLog, ComparatorPath)> {
    let text = std::fs::read_to_string(path)?;
    let meta: BTreeMap<String, String> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mirror = rebuild_mirror(&meta)?;
    if mirror.kind() == MirrorKind::Entropy && !matches!(mirror.domain(), FeasibleSet::Simplex { .. }) {
        return Err(runtime("entropy log without a simplex"));
    }
    let strategy = meta
        .get("strategy")
        .and_then(|s| StrategyKind::parse(s))
        .ok_or_else(|| runtime("log lacks a valid `# strategy=`"))?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(LOG_HEADER.iter().copied()) {
        return Err(runtime("log header does not match the expected columns"));
    }
    let mut records = Vec::new();
    let mut comparator = Vec::new();
    let mut lookahead = None;
    let (mut etas, mut thetas) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row?;
        let t = &row[0];
        let eta = parse_num(&row[1], "eta", t)?;
        let theta = parse_num(&row[2], "theta", t)?;
        etas.push(eta);
        thetas.push(theta);
        let tn: usize = t.parse().map_err(|_| runtime(format!("bad round index `{t}`")))?;
        if row[3].is_empty() {
            lookahead = Some(Prelude {
                t: tn,
                eta,
                theta,
                accumulated: parse_vec(&row[9], "accumulated", t)?,
                check_dual: parse_vec(&row[8], "check_dual", t)?,
                tilde_dual: parse_vec(&row[7], "tilde_dual", t)?,
                tilde_play: parse_vec(&row[6], "tilde_play", t)?,
            });
            continue;
        }
        if lookahead.is_some() {
            return Err(runtime("rounds after the lookahead row"));
        }
        records.push(RoundRecord {
            t: tn,
            play: parse_vec(&row[3], "play", t)?,
            gradient: parse_vec(&row[4], "gradient", t)?,
            hint: parse_vec(&row[5], "hint", t)?,
            tilde_play: parse_vec(&row[6], "tilde_play", t)?,
            tilde_dual: parse_vec(&row[7], "tilde_dual", t)?,
            check_dual: parse_vec(&row[8], "check_dual", t)?,
            accumulated: parse_vec(&row[9], "accumulated", t)?,
            eta,
            theta,
            loss: decode_loss(&row[10], t)?,
            loss_value: if row[11].is_empty() { None } else { Some(parse_num(&row[11], "loss value", t)?) },
        });
        comparator.push(parse_vec(&row[12], "comparator", t)?);
    }
    if records.is_empty() {
        return Err(runtime("log has no rounds"));
    }
    let schedule = ScheduleSpec::new(Sequence::Custom(etas), Sequence::Custom(thetas)).map_err(runtime)?;
    let path = ComparatorPath::new(comparator).map_err(runtime)?;
    let log = GameLog {
        mirror,
        strategy,
        schedule,
        records,
        lookahead,
        adversary: meta.get("adversary").cloned().unwrap_or_default(),
        hint_oracle: meta.get("hint").cloned().unwrap_or_default(),
        clairvoyant: meta.get("clairvoyant").is_some_and(|v| v == "true"),
        comparator: Some(path.clone()),
        seed: meta.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0),
    };
    log.validate().map_err(runtime)?;
    Ok((log, path))
}
