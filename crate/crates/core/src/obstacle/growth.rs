use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convex integrand F of the obstacle energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// F(t) = |t|^p.
    #[default]
    Power,
    /// F(t) = |t|^p + 0.1·t²|t|^{p−2}, which equals 1.1|t|^p.
    PerturbedPower,
}

/// Growth constants c₁|t|^p ≤ F(t) ≤ c₂|t|^p and |F′(t)| ≤ c₃|t|^{p−1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Growth {
    fn scale(&self) -> f64 {
        match self {
            Self::Power => 1.0,
            Self::PerturbedPower => 1.1,
        }
    }

    pub fn f(&self, t: f64, p: f64) -> f64 {
        self.scale() * crate::norms::abs_pow(t, p)
    }

    pub fn df(&self, t: f64, p: f64) -> f64 {
        let a = t.abs();
        let v = if p == 2.0 {
            2.0 * t
        } else if a == 0.0 {
            0.0
        } else {
            p * a.powf(p - 1.0) * t.signum()
        };
        self.scale() * v
    }

    pub fn d2f(&self, t: f64, p: f64) -> f64 {
        let a = t.abs();
        let v = if p == 2.0 {
            2.0
        } else if a == 0.0 {
            0.0
        } else {
            p * (p - 1.0) * a.powf(p - 2.0)
        };
        self.scale() * v
    }

    /// F(a + d) − F(a) without cancellation when d is small against a.
    pub fn delta(&self, a: f64, d: f64, p: f64) -> f64 {
        let s = self.scale();
        if p == 2.0 {
            return s * d * (2.0 * a + d);
        }
        let b = a + d;
        if a != 0.0 && a.signum() == b.signum() {
            return s * a.abs().powf(p) * (p * (d / a).ln_1p()).exp_m1();
        }
        s * (crate::norms::abs_pow(b, p) - crate::norms::abs_pow(a, p))
    }

    /// Constants read off by sampling t ∈ [−10, 10], checked against the closed forms.
    pub fn verified_constants(&self, p: f64) -> Result<GrowthConstants> {
        let (mut lo, mut hi, mut d) = (f64::INFINITY, 0.0f64, 0.0f64);
        for k in 0..=4000 {
            let t = -10.0 + 20.0 * k as f64 / 4000.0;
            if t == 0.0 {
                continue;
            }
            let base = t.abs().powf(p);
            let q = self.f(t, p) / base;
            lo = lo.min(q);
            hi = hi.max(q);
            d = d.max(self.df(t, p).abs() / t.abs().powf(p - 1.0));
        }
        let s = self.scale();
        let c = GrowthConstants { c1: s, c2: s, c3: s * p };
        let tol = 1e-9;
        if lo < c.c1 * (1.0 - tol) || hi > c.c2 * (1.0 + tol) || d > c.c3 * (1.0 + tol) {
            return Err(Error::Validity(format!(
                "growth bounds fail on samples: c1 ≤ {lo}, c2 ≥ {hi}, c3 ≥ {d}"
            )));
        }
        Ok(c)
    }
}
