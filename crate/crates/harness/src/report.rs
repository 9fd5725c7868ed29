use std::path::Path;

use optimist_core::bounds::{BoundReport, RegretKind};
use plotters::prelude::*;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{runtime, Result};
use crate::run::{penalty_share, Evaluated, GameResult, SweepRow};

pub const BOUND_HEADER: [&str; 7] = ["t", "container", "penalty", "subtraction", "cum_bound", "cum_regret", "margin"];

pub const SWEEP_HEADER: [&str; 11] = [
    "value",
    "bound",
    "seeds",
    "total_bound",
    "played_regret",
    "margin",
    "penalty_share",
    "bound_per_doubling",
    "regret_per_doubling",
    "failures",
    "regret_kind",
];

pub fn write_bound_csv(path: &Path, r: &BoundReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(BOUND_HEADER)?;
    let bound = r.cumulative_bound();
    let regret = r.cumulative_regret();
    for i in 0..r.horizon() {
        w.write_record([
            (i + 1).to_string(),
            r.container_terms[i].to_string(),
            r.penalty_terms[i].to_string(),
            r.subtraction_terms[i].to_string(),
            bound[i].to_string(),
            regret[i].to_string(),
            (bound[i] - regret[i]).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn regret_kind(k: RegretKind) -> &'static str {
    match k {
        RegretKind::Loss => "loss",
        RegretKind::Linearized => "linearized",
    }
}

pub fn verdict_line(seed: u64, e: &Evaluated) -> String {
    let r = &e.report;
    format!(
        "seed {seed} {:<20} {} bound {:.6e} regret {:.6e} margin {:+.3e}{}",
        r.corollary_id.name(),
        if e.verdict.pass { "PASS" } else { "FAIL" },
        r.total_bound,
        r.played_regret,
        r.margin,
        if e.verdict.vacuous { " (vacuous)" } else { "" }
    )
}

fn bound_json(e: &Evaluated) -> Value {
    let r = &e.report;
    json!({
        "id": r.corollary_id.name(),
        "pass": e.verdict.pass,
        "vacuous": e.verdict.vacuous,
        "total_bound": r.total_bound,
        "container": r.container_total(),
        "penalty": r.penalty_total(),
        "subtraction": r.subtraction_total(),
        "penalty_share": penalty_share(r),
        "played_regret": r.played_regret,
        "linearized_regret": r.linearized_regret,
        "regret_kind": regret_kind(r.regret_kind),
        "margin": r.margin,
        "worst_cumulative_margin": e.verdict.worst_cumulative_margin,
        "worst_round": e.verdict.worst_round,
        "rho": r.rho.value(),
        "warnings": r.warnings,
    })
}

pub fn write_summary(path: &Path, cfg: &ExperimentConfig, results: &[GameResult]) -> Result<()> {
    let games: Vec<Value> = results
        .iter()
        .map(|g| {
            json!({
                "seed": g.seed,
                "horizon": g.log.horizon(),
                "adversary": g.log.adversary,
                "hint_oracle": g.log.hint_oracle,
                "clairvoyant": g.log.clairvoyant,
                "comparator_path_length": g.path.path_length(),
                "bounds": g.bounds.iter().map(bound_json).collect::<Vec<_>>(),
                "skipped": g.skipped.iter().map(|(id, why)| json!({"id": id.name(), "reason": why})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let violations: usize = results.iter().map(GameResult::violations).sum();
    let doc = json!({
        "config": cfg.raw.entries(),
        "tolerance": cfg.tolerance,
        "violations": violations,
        "pass": violations == 0,
        "games": games,
    });
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-9);
    (lo - pad, hi + pad)
}

fn plot_err<E: std::fmt::Debug>(e: E) -> crate::error::HarnessError {
    runtime(format!("plot: {e:?}"))
}

/// Cumulative bound per evaluator against the cumulative regret.
pub fn plot_game(path: &Path, g: &GameResult) -> Result<()> {
    let horizon = g.log.horizon();
    let curves: Vec<(String, Vec<f64>)> = g
        .bounds
        .iter()
        .map(|e| (e.report.corollary_id.name().to_string(), e.report.cumulative_bound()))
        .collect();
    let regret = g.bounds[0].report.cumulative_regret();
    let (lo, hi) = padded_range(curves.iter().flat_map(|(_, c)| c.iter().copied()).chain(regret.iter().copied()));

    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("seed {}: cumulative bound vs regret", g.seed), ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(64)
        .build_cartesian_2d(1f64..horizon.max(2) as f64, lo..hi)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("round").y_desc("cumulative").draw().map_err(plot_err)?;
    for (i, (name, c)) in curves.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(c.iter().enumerate().map(|(t, v)| ((t + 1) as f64, *v)), color))
            .map_err(plot_err)?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
    }
    chart
        .draw_series(LineSeries::new(
            regret.iter().enumerate().map(|(t, v)| ((t + 1) as f64, *v)),
            BLACK.stroke_width(2),
        ))
        .map_err(plot_err)?
        .label(format!("regret ({})", regret_kind(g.bounds[0].report.regret_kind)))
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], BLACK.stroke_width(2)));
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperLeft)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Growth factor per doubling of the axis value, when both points are
/// positive.
fn per_doubling(prev: Option<(f64, f64)>, x: f64, y: f64) -> Option<f64> {
    let (px, py) = prev?;
    if px > 0.0 && x > px && py > 0.0 && y > 0.0 {
        Some((y / py).powf(1.0 / (x / px).log2()))
    } else {
        None
    }
}

/// Rows with the per-doubling columns filled in (horizon sweeps only).
fn with_growth(key: &str, rows: &[SweepRow]) -> Vec<(SweepRow, Option<f64>, Option<f64>)> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let prev = rows[..i].iter().rev().find(|p| p.bound == r.bound);
        let x: f64 = r.value.parse().unwrap_or(f64::NAN);
        let (bd, rd) = match (key == "horizon", prev) {
            (true, Some(p)) => {
                let px: f64 = p.value.parse().unwrap_or(f64::NAN);
                (
                    per_doubling(Some((px, p.total_bound)), x, r.total_bound),
                    per_doubling(Some((px, p.played_regret)), x, r.played_regret),
                )
            }
            _ => (None, None),
        };
        out.push((r.clone(), bd, rd));
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_sweep_csv(path: &Path, key: &str, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SWEEP_HEADER)?;
    for (r, bd, rd) in with_growth(key, rows) {
        w.write_record([
            r.value.clone(),
            r.bound.name().to_string(),
            r.seeds.to_string(),
            r.total_bound.to_string(),
            r.played_regret.to_string(),
            r.margin.to_string(),
            r.penalty_share.to_string(),
            opt(bd),
            opt(rd),
            r.failures.to_string(),
            regret_kind(r.regret_kind).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_table(key: &str, rows: &[SweepRow]) -> String {
    let mut s = format!(
        "{:>10} {:<20} {:>5} {:>13} {:>13} {:>11} {:>8} {:>8}\n",
        key, "bound", "seeds", "bound", "regret", "min margin", "penalty", "x/2T"
    );
    for (r, bd, _) in with_growth(key, rows) {
        s += &format!(
            "{:>10} {:<20} {:>5} {:>13.5e} {:>13.5e} {:>+11.3e} {:>8.4} {:>8}\n",
            r.value,
            r.bound.name(),
            r.seeds,
            r.total_bound,
            r.played_regret,
            r.margin,
            r.penalty_share,
            bd.map_or("-".to_string(), |v| format!("{v:.3}"))
        );
    }
    s
}

/// Mean bound and regret against the swept value, one pair of curves per
/// evaluator.
pub fn plot_sweep(path: &Path, key: &str, rows: &[SweepRow]) -> Result<()> {
    let xs: Vec<f64> = rows.iter().map(|r| r.value.parse().unwrap_or(f64::NAN)).collect();
    let log_x = xs.iter().all(|x| *x > 0.0) && {
        let (lo, hi) = padded_range(xs.iter().copied());
        hi / lo.max(f64::MIN_POSITIVE) > 100.0
    };
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let (x0, x1) = padded_range(xs.iter().map(|x| tx(*x)));
    let (y0, y1) = padded_range(rows.iter().flat_map(|r| [r.total_bound, r.played_regret]));

    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("sweep over {key}"), ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    let x_desc = if log_x { format!("log10 {key}") } else { key.to_string() };
    chart.configure_mesh().x_desc(x_desc).y_desc("mean over seeds").draw().map_err(plot_err)?;

    let mut ids = Vec::new();
    for r in rows {
        if !ids.contains(&r.bound) {
            ids.push(r.bound);
        }
    }
    for (i, id) in ids.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let pts: Vec<(f64, &SweepRow)> = xs.iter().zip(rows).filter(|(_, r)| r.bound == *id).map(|(x, r)| (tx(*x), r)).collect();
        chart
            .draw_series(LineSeries::new(pts.iter().map(|(x, r)| (*x, r.total_bound)), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("{} bound", id.name()))
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart
            .draw_series(LineSeries::new(pts.iter().map(|(x, r)| (*x, r.played_regret)), color))
            .map_err(plot_err)?;
        chart
            .draw_series(pts.iter().map(|(x, r)| Circle::new((*x, r.played_regret), 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperLeft)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}
