use std::path::Path;

use optimist_core::bounds::{
    check_violation, evaluate, BoundId, BoundReport, ComparatorPath, EvalOptions, RegretKind, Verdict,
};
use optimist_core::game::{play_game, GameSpec};
use optimist_core::strategy::GameLog;
use optimist_core::Error as CoreError;
use rayon::prelude::*;

use crate::config::{resolve_axis, BoundSelection, ExperimentConfig, RawConfig};
use crate::error::{runtime, Result};
use crate::report;

#[derive(Debug, Clone)]
pub struct Evaluated {
    pub report: BoundReport,
    pub verdict: Verdict,
}

/// One seed, played and checked.
#[derive(Debug, Clone)]
pub struct GameResult {
    pub seed: u64,
    pub log: GameLog,
    pub path: ComparatorPath,
    pub bounds: Vec<Evaluated>,
    /// Evaluators left out under `bounds = all`, with the reason.
    pub skipped: Vec<(BoundId, String)>,
}

impl GameResult {
    pub fn violations(&self) -> usize {
        self.bounds.iter().filter(|e| !e.verdict.pass).count()
    }
}

pub fn game_spec(cfg: &ExperimentConfig, seed: u64) -> GameSpec {
    GameSpec {
        mirror: cfg.mirror.clone(),
        strategy: cfg.strategy,
        schedule: cfg.schedule.clone(),
        adversary: cfg.adversary.clone(),
        hint: cfg.hint,
        comparator: cfg.comparator.clone(),
        horizon: cfg.horizon,
        seed,
    }
}

/// Evaluates the selected bounds on a finished game.
pub fn check_log(
    log: &GameLog,
    path: &ComparatorPath,
    selection: &BoundSelection,
    opts: EvalOptions,
    tol: f64,
) -> Result<(Vec<Evaluated>, Vec<(BoundId, String)>)> {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let ids = match selection {
        BoundSelection::All => BoundId::compatible_with(log.strategy, log.mirror.kind()),
        BoundSelection::List(ids) => ids.clone(),
    };
    for id in ids {
        let all = *selection == BoundSelection::All;
        if all && id.needs_static_path() && !path.is_static() {
            skipped.push((id, "needs a static comparator".into()));
            continue;
        }
        match evaluate(id, log, path, opts) {
            Ok(report) => {
                let verdict = check_violation(&report, tol);
                out.push(Evaluated { report, verdict });
            }
            Err(CoreError::SchedulePrecondition(m)) if all => skipped.push((id, m)),
            Err(e) => return Err(runtime(format!("{}: {e}", id.name()))),
        }
    }
    Ok((out, skipped))
}

pub fn play_seed(cfg: &ExperimentConfig, seed: u64) -> Result<GameResult> {
    let log = play_game(&game_spec(cfg, seed)).map_err(|e| runtime(format!("seed {seed}: {e}")))?;
    let path = log.comparator.clone().ok_or_else(|| runtime("game produced no comparator path"))?;
    let (bounds, skipped) = check_log(&log, &path, &cfg.bounds, cfg.eval, cfg.tolerance)?;
    Ok(GameResult { seed, log, path, bounds, skipped })
}

/// Plays every seed on the worker pool; results keep the seed order.
pub fn run_games(cfg: &ExperimentConfig) -> Result<Vec<GameResult>> {
    cfg.seeds.par_iter().map(|&s| play_seed(cfg, s)).collect()
}

/// `run`: plays, checks and writes every report. Returns the number of
/// failed checks.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<usize> {
    let results = run_games(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    for r in &results {
        let dir = out_dir.join(format!("seed-{}", r.seed));
        std::fs::create_dir_all(&dir)?;
        crate::logio::write_log(&dir.join("log.csv"), &r.log, &r.path)?;
        for e in &r.bounds {
            report::write_bound_csv(&dir.join(format!("{}.csv", e.report.corollary_id.name())), &e.report)?;
        }
        if cfg.plots && !r.bounds.is_empty() {
            report::plot_game(&dir.join("curves.svg"), r)?;
        }
    }
    report::write_summary(&out_dir.join("summary.json"), cfg, &results)?;
    for r in &results {
        for e in &r.bounds {
            println!("{}", report::verdict_line(r.seed, e));
        }
    }
    Ok(results.iter().map(GameResult::violations).sum())
}

/// Aggregate over seeds for one sweep value and one evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub bound: BoundId,
    pub seeds: usize,
    pub total_bound: f64,
    pub played_regret: f64,
    pub margin: f64,
    pub penalty_share: f64,
    pub failures: usize,
    pub regret_kind: RegretKind,
}

/// `penalty / (container + penalty)` with both totals taken as magnitudes.
pub fn penalty_share(r: &BoundReport) -> f64 {
    let p = r.penalty_total().abs();
    let c = r.container_total().abs();
    if p + c == 0.0 {
        0.0
    } else {
        p / (p + c)
    }
}

pub fn sweep_rows(base: &RawConfig, axis: &str, values: &[String], seed: Option<u64>, tol: Option<f64>) -> Result<Vec<SweepRow>> {
    let key = resolve_axis(axis)?;
    let mut rows = Vec::new();
    for v in values {
        let mut raw = base.clone();
        raw.set(key, v);
        let mut cfg = ExperimentConfig::from_raw(raw)?;
        apply_overrides(&mut cfg, seed, tol);
        let results = run_games(&cfg)?;
        let mut ids: Vec<BoundId> = Vec::new();
        for r in &results {
            for e in &r.bounds {
                if !ids.contains(&e.report.corollary_id) {
                    ids.push(e.report.corollary_id);
                }
            }
        }
        for id in ids {
            let picked: Vec<&Evaluated> = results
                .iter()
                .flat_map(|r| r.bounds.iter())
                .filter(|e| e.report.corollary_id == id)
                .collect();
            let n = picked.len() as f64;
            rows.push(SweepRow {
                value: v.clone(),
                bound: id,
                seeds: picked.len(),
                total_bound: picked.iter().map(|e| e.report.total_bound).sum::<f64>() / n,
                played_regret: picked.iter().map(|e| e.report.played_regret).sum::<f64>() / n,
                margin: picked.iter().map(|e| e.report.margin).fold(f64::INFINITY, f64::min),
                penalty_share: picked.iter().map(|e| penalty_share(&e.report)).sum::<f64>() / n,
                failures: picked.iter().filter(|e| !e.verdict.pass).count(),
                regret_kind: picked[0].report.regret_kind,
            });
        }
    }
    Ok(rows)
}

/// `sweep`: one summary row per value and evaluator, plus a plot. Returns
/// the number of failed checks.
pub fn sweep(
    base: &RawConfig,
    axis: &str,
    values: &[String],
    seed: Option<u64>,
    tol: Option<f64>,
    out_dir: &Path,
) -> Result<usize> {
    let rows = sweep_rows(base, axis, values, seed, tol)?;
    let key = resolve_axis(axis)?;
    std::fs::create_dir_all(out_dir)?;
    report::write_sweep_csv(&out_dir.join("sweep.csv"), key, &rows)?;
    if !rows.is_empty() {
        report::plot_sweep(&out_dir.join("sweep.svg"), key, &rows)?;
    }
    print!("{}", report::sweep_table(key, &rows));
    Ok(rows.iter().map(|r| r.failures).sum())
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, seed: Option<u64>, tol: Option<f64>) {
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    if let Some(t) = tol {
        cfg.tolerance = t;
    }
}

/// `verify`: re-evaluates bounds on a stored log. Returns the number of
/// failed checks.
pub fn verify(log_path: &Path, selection: &BoundSelection, opts: EvalOptions, tol: f64) -> Result<usize> {
    let (log, path) = crate::logio::read_log(log_path)?;
    let drift = log.replay_deviation().map_err(runtime)?;
    if drift > 1e-9 {
        return Err(runtime(format!("log does not replay: plays deviate by {drift:.3e}")));
    }
    let (bounds, skipped) = check_log(&log, &path, selection, opts, tol)?;
    for e in &bounds {
        println!("{}", report::verdict_line(log.seed, e));
    }
    for (id, why) in &skipped {
        println!("seed {} {:<20} SKIP ({why})", log.seed, id.name());
    }
    Ok(bounds.iter().filter(|e| !e.verdict.pass).count())
}
