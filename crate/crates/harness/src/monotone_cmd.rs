use std::path::Path;

use optimist_core::game::derive_seed;
use optimist_core::monotone::{loop_integral, regret_n_estimate, RegretEstimate, RegretSearch};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::MonotoneConfig;
use crate::error::Result;

pub const LOOP_HEADER: [&str; 4] = ["loop", "shape", "vertices", "circulation"];
pub const REGRET_HEADER: [&str; 7] = ["instance", "n", "value", "lower", "upper", "budget_used", "potential_diff"];

#[derive(Debug, Clone, PartialEq)]
pub struct LoopRow {
    pub shape: &'static str,
    pub vertices: usize,
    pub circulation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub estimates: Vec<RegretEstimate>,
    /// `φ(x) − φ(z)` when the operator has a potential.
    pub potential_diff: Option<f64>,
}

pub fn loops(cfg: &MonotoneConfig) -> Result<Vec<LoopRow>> {
    let dim = cfg.operator.dim();
    let mut rows = Vec::new();
    if dim >= 2 {
        let corner = |a: f64, b: f64| {
            let mut v = vec![0.0; dim];
            v[0] = a;
            v[1] = b;
            v
        };
        let square = vec![corner(0.0, 0.0), corner(1.0, 0.0), corner(1.0, 1.0), corner(0.0, 1.0), corner(0.0, 0.0)];
        rows.push(LoopRow { shape: "unit-square", vertices: 4, circulation: loop_integral(&cfg.operator, &square, cfg.k)? });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
    for i in 0..cfg.loops {
        let k = 3 + i % 4;
        let mut pts: Vec<Vec<f64>> = (0..k).map(|_| cfg.set.sample_with(&mut rng)).collect();
        pts.push(pts[0].clone());
        rows.push(LoopRow { shape: "random", vertices: k, circulation: loop_integral(&cfg.operator, &pts, cfg.k)? });
    }
    Ok(rows)
}

pub fn instances(cfg: &MonotoneConfig) -> Result<Vec<Instance>> {
    (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(cfg.seed, 1 + i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = cfg.set.sample_with(&mut rng);
            let x = cfg.set.sample_with(&mut rng);
            let estimates = (0..=cfg.n_max)
                .map(|n| {
                    let search = RegretSearch { n, budget: cfg.budget, seed, k: cfg.k, restarts: cfg.restarts };
                    regret_n_estimate(&cfg.operator, &z, &x, &cfg.set, search)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let potential_diff = match (cfg.operator.potential(&x), cfg.operator.potential(&z)) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            };
            Ok(Instance { estimates, potential_diff })
        })
        .collect()
}

/// Problems found in the tables: estimates growing with `n`, or conservative
/// estimates away from the potential difference.
pub fn findings(cfg: &MonotoneConfig, inst: &[Instance]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, it) in inst.iter().enumerate() {
        for w in it.estimates.windows(2) {
            if w[1].value > w[0].value + 1e-12 {
                out.push(format!("instance {i}: Regret^{} = {} exceeds Regret^{} = {}", w[1].n, w[1].value, w[0].n, w[0].value));
            }
        }
        if let Some(d) = it.potential_diff {
            for e in &it.estimates {
                if (e.value - d).abs() > cfg.tolerance {
                    out.push(format!("instance {i}: Regret^{} = {} vs potential difference {d}", e.n, e.value));
                }
            }
        }
    }
    out
}

/// `monotone`: loop residuals and Regret^n tables. Returns the number of
/// findings.
pub fn monotone(cfg: &MonotoneConfig, out_dir: &Path) -> Result<usize> {
    std::fs::create_dir_all(out_dir)?;
    let loop_rows = loops(cfg)?;
    let mut w = csv::Writer::from_path(out_dir.join("loops.csv"))?;
    w.write_record(LOOP_HEADER)?;
    for (i, r) in loop_rows.iter().enumerate() {
        w.write_record([i.to_string(), r.shape.to_string(), r.vertices.to_string(), r.circulation.to_string()])?;
    }
    w.flush()?;

    let inst = instances(cfg)?;
    let mut w = csv::Writer::from_path(out_dir.join("regret_n.csv"))?;
    w.write_record(REGRET_HEADER)?;
    for (i, it) in inst.iter().enumerate() {
        for e in &it.estimates {
            w.write_record([
                i.to_string(),
                e.n.to_string(),
                e.value.to_string(),
                e.lower.to_string(),
                e.upper.to_string(),
                e.budget_used.to_string(),
                it.potential_diff.map_or(String::new(), |d| d.to_string()),
            ])?;
        }
    }
    w.flush()?;

    println!(
        "operator {} (conservative: {}), dimension {}",
        cfg.raw.get("monotone.operator").unwrap_or("skew"),
        cfg.operator.is_conservative(),
        cfg.operator.dim()
    );
    if let Some(sq) = loop_rows.iter().find(|r| r.shape == "unit-square") {
        println!("unit-square circulation {:.12}", sq.circulation);
    }
    let worst = loop_rows.iter().map(|r| r.circulation.abs()).fold(0.0, f64::max);
    println!("{} loops, max |circulation| {worst:.6e}", loop_rows.len());
    for n in 0..=cfg.n_max {
        let mean = inst.iter().map(|it| it.estimates[n].value).sum::<f64>() / inst.len().max(1) as f64;
        println!("mean Regret^{n} over {} instances: {mean:.6e}", inst.len());
    }
    let found = findings(cfg, &inst);
    for f in &found {
        println!("FAIL {f}");
    }
    Ok(found.len())
}
