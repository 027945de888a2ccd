use serde::Serialize;

use crate::geometry::MeshConfig;
use crate::kernel::KernelParams;

/// Relative drift |a − b| / max(|a|, |b|), zero when both vanish.
pub fn drift(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

pub const DRIFT_TOL: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolated {
    pub value: f64,
    /// The cutoff sequence was monotone and contracting, so Aitken's Δ² was applied.
    pub monotone: bool,
}

/// Aitken Δ² limit of a sequence sampled at geometrically shrinking cutoffs.
pub fn aitken(xs: &[f64]) -> Extrapolated {
    let n = xs.len();
    if n < 3 {
        return Extrapolated { value: xs.last().copied().unwrap_or(0.0), monotone: false };
    }
    let (x0, x1, x2) = (xs[n - 3], xs[n - 2], xs[n - 1]);
    let (d1, d2) = (x1 - x0, x2 - x1);
    if d2 == 0.0 {
        return Extrapolated { value: x2, monotone: true };
    }
    if d1 == 0.0 || d1.signum() != d2.signum() {
        return Extrapolated { value: x2, monotone: false };
    }
    let r = d2 / d1;
    if !(r < 1.0) {
        return Extrapolated { value: x2, monotone: false };
    }
    Extrapolated { value: x2 + d2 * r / (1.0 - r), monotone: true }
}

/// One measured instance of an inequality lhs ≤ C·rhs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub theorem_id: String,
    pub family: String,
    pub d: usize,
    pub s: f64,
    pub p: f64,
    pub theta: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub kappa: Option<f64>,
    pub theta0: Option<f64>,
    pub m: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs; absent when rhs = 0.
    pub ratio: Option<f64>,
    pub level: u32,
    pub delta_cut: f64,
    /// Measure of the excluded boundary layer at the finest cutoff.
    pub ledger: f64,
    pub seed: Option<u64>,
    /// Drift of the ratio against the previous refinement level.
    pub drift: Option<f64>,
    /// Closed-form upper bound on the ratio, where the proof supplies one.
    pub envelope: Option<f64>,
    pub monotone: bool,
    pub pass: bool,
    pub note: String,
}

impl InequalityReport {
    pub fn new(theorem_id: &str, family: &str, params: &KernelParams, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            Some(lhs / rhs)
        } else if lhs == 0.0 {
            Some(0.0)
        } else {
            None
        };
        Self {
            theorem_id: theorem_id.into(),
            family: family.into(),
            d: params.d,
            s: params.s,
            p: params.p,
            theta: params.theta,
            a: None,
            b: None,
            kappa: None,
            theta0: None,
            m: None,
            lhs,
            rhs,
            ratio,
            level: 0,
            delta_cut: 0.0,
            ledger: 0.0,
            seed: None,
            drift: None,
            envelope: None,
            monotone: true,
            pass: ratio.is_some_and(f64::is_finite),
            note: String::new(),
        }
    }

    pub fn with_level(mut self, level: u32, delta_cut: f64, ledger: f64) -> Self {
        self.level = level;
        self.delta_cut = delta_cut;
        self.ledger = ledger;
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_abk(mut self, a: f64, b: f64, kappa: Option<f64>) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self.kappa = kappa;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let n = note.into();
        if self.note.is_empty() {
            self.note = n;
        } else if !n.is_empty() {
            self.note = format!("{}; {n}", self.note);
        }
        self
    }

    /// Slack of the closed-form envelope over the measured ratio.
    pub fn slack(&self) -> Option<f64> {
        match (self.envelope, self.ratio) {
            (Some(e), Some(r)) if r > 0.0 => Some(e / r),
            (Some(_), Some(_)) => Some(f64::INFINITY),
            _ => None,
        }
    }

    fn key(&self) -> (String, String, String) {
        let aux = format!(
            "{}|{}|{}|{:?}|{:?}|{:?}|{:?}|{:?}",
            self.d, self.s, self.p, self.theta, self.a, self.b, self.theta0, self.m
        );
        (self.theorem_id.clone(), self.family.clone(), aux)
    }
}

/// Marks each report by finiteness and by drift against the previous level of the same cell.
pub fn apply_stability(reports: &mut [InequalityReport], tol: f64) {
    for i in 0..reports.len() {
        let prev = (0..i)
            .rev()
            .find(|&j| reports[j].key() == reports[i].key() && reports[j].level + 1 == reports[i].level)
            .and_then(|j| reports[j].ratio);
        let finite = reports[i].ratio.is_some_and(f64::is_finite);
        let dr = match (prev, reports[i].ratio) {
            (Some(a), Some(b)) => Some(drift(a, b)),
            _ => None,
        };
        reports[i].drift = dr;
        reports[i].pass = reports[i].pass && finite && dr.is_none_or(|d| d < tol);
    }
}

/// Mesh resolution, cutoff ladder and refinement levels shared by the mesh-based checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolution {
    pub mesh: MeshConfig,
    pub cuts: Vec<f64>,
    pub levels: Vec<u32>,
}

impl Default for Resolution {
    fn default() -> Self {
        let cuts = vec![2f64.powi(-5), 2f64.powi(-6), 2f64.powi(-7)];
        Self { mesh: MeshConfig::new(0.125, 2f64.powi(-7), 0.5), cuts, levels: vec![0, 1] }
    }
}

impl Resolution {
    pub fn finest_cut(&self) -> f64 {
        self.cuts.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mesh_at(&self, level: u32) -> MeshConfig {
        self.mesh.with_delta_cut(self.finest_cut()).refined(level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aitken_is_exact_on_geometric_sequences() {
        let xs: Vec<f64> = (0..3).map(|k| 2.0 - 0.5f64.powi(k)).collect();
        let e = aitken(&xs);
        assert!(e.monotone);
        assert!((e.value - 2.0).abs() < 1e-14);
        assert!(!aitken(&[1.0, 2.0, 1.5]).monotone);
        assert_eq!(aitken(&[1.0, 1.0, 1.0]).value, 1.0);
    }

    #[test]
    fn drift_definition() {
        assert_eq!(drift(0.0, 0.0), 0.0);
        assert!((drift(1.0, 1.1) - 0.1 / 1.1).abs() < 1e-15);
    }
}
