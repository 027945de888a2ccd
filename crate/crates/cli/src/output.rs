//! Artifact writers. Every file is written to a temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nltrace_core::verify::InequalityReport;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiments::RunOutput;

pub const RESULTS_COLUMNS: [&str; 20] = [
    "experiment", "theorem_id", "family", "d", "s", "p", "theta", "a", "b", "kappa", "theta0", "M", "lhs", "rhs", "ratio",
    "level", "delta_cut", "ledger", "seed", "pass",
];

/// Env var that re-roots relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "NLTRACE_OUTPUT_ROOT";

pub fn output_dir(cfg: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    let dir = override_dir.map(Path::to_path_buf).or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("runs"));
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir,
    }
}

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target).with_context(|| format!("writing {}", target.display()))?;
    Ok(target)
}

pub fn results_csv(experiment: &str, reports: &[InequalityReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_COLUMNS)?;
    for r in reports {
        w.write_record([
            experiment.to_string(),
            r.theorem_id.clone(),
            r.family.clone(),
            r.d.to_string(),
            num(r.s),
            num(r.p),
            num(r.theta),
            opt(r.a),
            opt(r.b),
            opt(r.kappa),
            opt(r.theta0),
            opt(r.m),
            num(r.lhs),
            num(r.rhs),
            opt(r.ratio),
            r.level.to_string(),
            num(r.delta_cut),
            num(r.ledger),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.pass.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Serialize)]
struct TheoremSummary {
    checks: usize,
    failed: usize,
    worst_ratio: Option<f64>,
    max_drift: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    experiment: String,
    seed: u64,
    deterministic: bool,
    pass: bool,
    checks: usize,
    failed: Vec<String>,
    theorems: BTreeMap<String, TheoremSummary>,
    ledger: Ledger,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstacle: Option<ObstacleSummary<'a>>,
}

#[derive(Debug, Serialize)]
struct Ledger {
    delta_cut: Option<f64>,
    max_excluded_measure: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ObstacleSummary<'a> {
    ring_width: f64,
    agreement: Option<f64>,
    solvers: Vec<SolverSummary<'a>>,
}

#[derive(Debug, Serialize)]
struct SolverSummary<'a> {
    method: String,
    energy: f64,
    iterations: usize,
    kkt: &'a nltrace_core::obstacle::Kkt,
}

fn summary_json(cfg: &ExperimentConfig, out: &RunOutput) -> Result<Vec<u8>> {
    let mut theorems: BTreeMap<String, TheoremSummary> = BTreeMap::new();
    let mut failed = Vec::new();
    for r in &out.reports {
        let t = theorems.entry(r.theorem_id.clone()).or_insert(TheoremSummary {
            checks: 0,
            failed: 0,
            worst_ratio: None,
            max_drift: None,
        });
        t.checks += 1;
        if !r.pass {
            t.failed += 1;
            failed.push(format!("{} {} level {}", r.theorem_id, r.family, r.level));
        }
        if let Some(x) = r.ratio {
            t.worst_ratio = Some(t.worst_ratio.map_or(x, |w| w.max(x)));
        }
        if let Some(x) = r.drift {
            t.max_drift = Some(t.max_drift.map_or(x, |w| w.max(x)));
        }
    }
    let cut = out.reports.iter().map(|r| r.delta_cut).filter(|&c| c > 0.0).fold(None, |a: Option<f64>, c| Some(a.map_or(c, |a| a.min(c))));
    let led = out.reports.iter().map(|r| r.ledger).fold(None, |a: Option<f64>, c| Some(a.map_or(c, |a| a.max(c))));
    let obstacle = out.obstacle.as_ref().map(|o| ObstacleSummary {
        ring_width: o.results.first().map_or(0.0, |r| r.ring_width),
        agreement: o.agreement,
        solvers: o
            .results
            .iter()
            .map(|r| SolverSummary { method: r.method.to_string(), energy: r.energy, iterations: r.iterations, kkt: &r.kkt })
            .collect(),
    });
    let s = Summary {
        experiment: cfg.experiment.name().into(),
        seed: cfg.seed,
        deterministic: cfg.deterministic,
        pass: out.passed(),
        checks: out.reports.len(),
        failed,
        theorems,
        ledger: Ledger { delta_cut: cut, max_excluded_measure: led },
        obstacle,
    };
    let mut v = serde_json::to_vec_pretty(&s)?;
    v.push(b'\n');
    Ok(v)
}

fn convergence_csv(out: &RunOutput) -> Result<Option<Vec<u8>>> {
    let Some(rows) = &out.convergence else { return Ok(None) };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theorem_id", "family", "level", "ratio", "drift"])?;
    for r in rows {
        w.write_record([r.theorem_id.clone(), r.family.clone(), r.level.to_string(), opt(r.ratio), opt(r.drift)])?;
    }
    Ok(Some(w.into_inner()?))
}

fn solution_csv(out: &RunOutput) -> Result<Option<Vec<u8>>> {
    let Some(o) = &out.obstacle else { return Ok(None) };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["node".to_string(), "x".into(), "y".into(), "pinned".into()];
    for r in &o.results {
        header.push(format!("{}_value", r.method));
        header.push(format!("{}_active", r.method));
    }
    w.write_record(&header)?;
    for i in 0..o.nodes.len() {
        let mut row = vec![i.to_string(), num(o.nodes[i][0]), num(o.nodes[i][1]), o.pinned[i].to_string()];
        for r in &o.results {
            let active = o.obstacle[i] > f64::NEG_INFINITY && r.values[i] - o.obstacle[i] <= 1e-12;
            row.push(num(r.values[i]));
            row.push(active.to_string());
        }
        w.write_record(&row)?;
    }
    Ok(Some(w.into_inner()?))
}

/// Writes every artifact of a run and returns the paths written.
pub fn write_all(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = vec![write_atomic(dir, "config.resolved.toml", cfg.to_toml().as_bytes())?];
    if cfg.wants("csv") {
        written.push(write_atomic(dir, "results.csv", &results_csv(cfg.experiment.name(), &out.reports)?)?);
        if let Some(c) = convergence_csv(out)? {
            written.push(write_atomic(dir, "convergence.csv", &c)?);
        }
    }
    if cfg.wants("json") {
        written.push(write_atomic(dir, "summary.json", &summary_json(cfg, out)?)?);
    }
    if let Some(o) = &out.obstacle {
        if cfg.wants("solution") || cfg.wants("csv") {
            if let Some(c) = solution_csv(out)? {
                written.push(write_atomic(dir, "solution.csv", &c)?);
            }
        }
        if cfg.wants("json") {
            let kkt: BTreeMap<String, _> = o.results.iter().map(|r| (r.method.to_string(), &r.kkt)).collect();
            let mut v = serde_json::to_vec_pretty(&kkt)?;
            v.push(b'\n');
            written.push(write_atomic(dir, "kkt.json", &v)?);
        }
    }
    Ok(written)
}
