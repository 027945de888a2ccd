//! Row-by-row comparison of two results.csv files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

const KEY_COLUMNS: [&str; 14] =
    ["theorem_id", "family", "d", "s", "p", "theta", "a", "b", "kappa", "theta0", "M", "level", "delta_cut", "seed"];
const METRICS: [&str; 3] = ["lhs", "rhs", "ratio"];

#[derive(Debug, Clone, PartialEq)]
pub struct MetricDiff {
    pub key: String,
    pub metric: String,
    pub baseline: String,
    pub candidate: String,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CompareReport {
    pub rows: usize,
    pub bitwise_equal: bool,
    pub diffs: Vec<MetricDiff>,
    pub missing: Vec<String>,
    pub max_rel_diff: f64,
}

impl CompareReport {
    pub fn within(&self, rel_tol: f64) -> bool {
        self.missing.is_empty() && self.max_rel_diff <= rel_tol
    }
}

fn results_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("results.csv")
    } else {
        p.to_path_buf()
    }
}

type Table = (String, BTreeMap<String, BTreeMap<String, String>>);

fn load(p: &Path) -> Result<Table> {
    let path = results_path(p);
    let mut r = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let mut experiment = None;
    let mut rows = BTreeMap::new();
    for rec in r.records() {
        let rec = rec?;
        let row: BTreeMap<String, String> = headers.iter().zip(rec.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect();
        let exp = row.get("experiment").cloned().unwrap_or_default();
        match &experiment {
            None => experiment = Some(exp),
            Some(e) if *e != exp => bail!("{} mixes experiments {e} and {exp}", path.display()),
            _ => {}
        }
        let key = KEY_COLUMNS.iter().map(|k| row.get(*k).map(String::as_str).unwrap_or("")).collect::<Vec<_>>().join("|");
        rows.insert(key, row);
    }
    Ok((experiment.unwrap_or_default(), rows))
}

fn rel(a: &str, b: &str) -> f64 {
    if a == b {
        return 0.0;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) if x == y => 0.0,
        (Ok(x), Ok(y)) => (x - y).abs() / x.abs().max(y.abs()),
        _ => f64::INFINITY,
    }
}

pub fn compare(baseline: &Path, candidate: &Path) -> Result<CompareReport> {
    let (ea, a) = load(baseline)?;
    let (eb, b) = load(candidate)?;
    if ea != eb {
        bail!("experiment mismatch: baseline is '{ea}', candidate is '{eb}'");
    }
    let bytes_a = std::fs::read(results_path(baseline))?;
    let bytes_b = std::fs::read(results_path(candidate))?;
    let mut rep = CompareReport { rows: a.len(), bitwise_equal: bytes_a == bytes_b, ..Default::default() };
    for key in a.keys().filter(|k| !b.contains_key(*k)).chain(b.keys().filter(|k| !a.contains_key(*k))) {
        rep.missing.push(key.clone());
    }
    for (key, ra) in &a {
        let Some(rb) = b.get(key) else { continue };
        for m in METRICS {
            let (x, y) = (ra.get(m).cloned().unwrap_or_default(), rb.get(m).cloned().unwrap_or_default());
            let d = rel(&x, &y);
            if d > 0.0 {
                rep.max_rel_diff = rep.max_rel_diff.max(d);
                rep.diffs.push(MetricDiff { key: key.clone(), metric: m.into(), baseline: x, candidate: y, rel_diff: d });
            }
        }
    }
    Ok(rep)
}
