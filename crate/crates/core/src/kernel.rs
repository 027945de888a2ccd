//! Heterogeneous-horizon interaction kernel and interaction coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub d: usize,
    pub s: f64,
    pub p: f64,
    pub theta: f64,
}

impl KernelParams {
    pub fn new(d: usize, s: f64, p: f64, theta: f64) -> Result<Self> {
        let k = Self { d, s, p, theta };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(Error::Validity(format!("dimension must be 1, 2 or 3; got {}", self.d)));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::Validity(format!("s must lie in (0, 1]; got {}", self.s)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::Validity(format!("p must lie in [1, ∞); got {}", self.p)));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Validity(format!("theta must lie in (0, 1]; got {}", self.theta)));
        }
        Ok(())
    }

    pub fn mu(&self) -> f64 {
        self.d as f64 + self.p * self.s
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    pub fn hardy_valid(&self) -> bool {
        self.sp() > 1.0
    }

    pub fn comparison_valid(&self) -> bool {
        self.sp() >= 1.0
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// (ϑδ)^{−μ}, the kernel weight carried by a horizon ball of center distance δ.
    pub fn ball_weight(&self, delta: f64) -> f64 {
        (self.theta * delta).powf(-self.mu())
    }
}

/// Symmetrized kernel γ(x, y) evaluated from the two boundary distances.
pub fn gamma_from(params: &KernelParams, x: &Point, y: &Point, dx: f64, dy: f64) -> Result<f64> {
    if dx <= 0.0 || dy <= 0.0 {
        return Err(Error::Singularity(format!(
            "kernel evaluated at a boundary point (δ(x) = {dx}, δ(y) = {dy})"
        )));
    }
    let r = crate::geometry::dist(x, y);
    let mut g = 0.0;
    for d in [dx, dy] {
        if r < params.theta * d {
            g += params.ball_weight(d);
        }
    }
    Ok(g)
}

pub fn gamma(params: &KernelParams, domain: &DomainSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let dx = domain.distance_to_boundary(x)?;
    let dy = domain.distance_to_boundary(y)?;
    let (px, py) = (crate::geometry::point_from(x), crate::geometry::point_from(y));
    gamma_from(params, &px, &py, dx, dy)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Constant { alpha: f64 },
    /// α₁ when x and y sit on cells of equal parity of a lattice of the given scale, α₂ otherwise.
    Checkerboard { alpha1: f64, alpha2: f64, scale: f64 },
    /// Interpolates between α₁ and α₂ with the mean radius (|x| + |y|)/2, clamped to [0, 1].
    Radial { alpha1: f64, alpha2: f64 },
}

impl Coefficient {
    pub fn validate(&self) -> Result<()> {
        let (a1, a2) = self.bounds();
        if !(a1 > 0.0 && a1 <= a2 && a2.is_finite()) {
            return Err(Error::Validity(format!("coefficient bounds must satisfy 0 < α₁ ≤ α₂ < ∞; got ({a1}, {a2})")));
        }
        if let Self::Checkerboard { scale, .. } = self {
            if !(*scale > 0.0) {
                return Err(Error::Validity("checkerboard scale must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::Constant { alpha } => (alpha, alpha),
            Self::Checkerboard { alpha1, alpha2, .. } | Self::Radial { alpha1, alpha2 } => {
                (alpha1.min(alpha2), alpha1.max(alpha2))
            }
        }
    }

    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        match *self {
            Self::Constant { alpha } => alpha,
            Self::Checkerboard { alpha1, alpha2, scale } => {
                let parity = |p: &Point| {
                    let k: i64 = p.iter().map(|v| (v / scale).floor() as i64).sum();
                    k.rem_euclid(2)
                };
                if parity(x) == parity(y) {
                    alpha1
                } else {
                    alpha2
                }
            }
            Self::Radial { alpha1, alpha2 } => {
                let norm = |p: &Point| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                let t = (0.5 * (norm(x) + norm(y))).clamp(0.0, 1.0);
                alpha1 + (alpha2 - alpha1) * t
            }
        }
    }
}
