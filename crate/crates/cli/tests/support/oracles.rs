//! Continuum quadrature oracles for the seminorms, sharing no code with the mesh machinery.
//! Every singular inner integral is taken along y = x + t with t = R·τ^m, where m removes the
//! power singularity at t = 0, then integrated by composite Gauss–Legendre.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

pub struct Rule {
    gl: Vec<(f64, f64)>,
    panels: usize,
}

impl Rule {
    pub fn new(order: usize, panels: usize) -> Self {
        Self { gl: gauss_legendre(order), panels }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / self.panels as f64;
        let mut acc = 0.0;
        for k in 0..self.panels {
            let lo = a + k as f64 * h;
            acc += self.gl.iter().map(|&(x, w)| w * f(lo + h * x)).sum::<f64>() * h;
        }
        acc
    }

    /// ∫_0^R t^{-e} φ(t) dt for φ(t) = O(t^p), via t = R τ^m with m = 1/(p − e + 1).
    pub fn singular(&self, r: f64, e: f64, p: f64, mut phi: impl FnMut(f64) -> f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let m = 1.0 / (p - e + 1.0);
        self.integrate(0.0, 1.0, |tau| {
            if tau == 0.0 {
                return 0.0;
            }
            let t = r * tau.powf(m);
            phi(t) * t.powf(-e) * r * m * tau.powf(m - 1.0)
        })
    }
}

fn pw(x: f64, p: f64) -> f64 {
    x.abs().powf(p)
}

/// |u|^p_{W^{s,p}(0,M)} = 2 ∫_0^M ∫_0^{M−t} |u(x+t) − u(x)|^p t^{−1−sp} dx dt.
pub fn gagliardo_1d(u: impl Fn(f64) -> f64, m: f64, s: f64, p: f64, rule: &Rule) -> f64 {
    2.0 * rule.singular(m, 1.0 + s * p, p, |t| rule.integrate(0.0, m - t, |x| pw(u(x + t) - u(x), p)))
}

/// Same form on a boundary segment [a, b] with kernel exponent e.
pub fn segment_seminorm(g: impl Fn(f64) -> f64, a: f64, b: f64, e: f64, p: f64, rule: &Rule) -> f64 {
    2.0 * rule.singular(b - a, e, p, |t| rule.integrate(a, b - t, |x| pw(g(x + t) - g(x), p)))
}

/// ∫_{cut}^M (ϑx)^{−μ} ∫_{B(x, ϑx) ∩ (0, M)} |u(y) − u(x)|^p dy dx with μ = 1 + sp.
pub fn nonlocal_1d(u: impl Fn(f64) -> f64, m: f64, s: f64, p: f64, theta: f64, cut: f64, rule: &Rule) -> f64 {
    let mu = 1.0 + s * p;
    let row = |x: f64| {
        let r = theta * x;
        let fwd = rule.singular(r.min(m - x), 0.0, p, |t| pw(u(x + t) - u(x), p));
        let back = rule.singular(r.min(x), 0.0, p, |t| pw(u(x - t) - u(x), p));
        (theta * x).powf(-mu) * (fwd + back)
    };
    let kink = m / (1.0 + theta);
    if kink > cut {
        rule.integrate(cut, kink, row) + rule.integrate(kink, m, row)
    } else {
        rule.integrate(cut, m, row)
    }
}

/// Rectangle [x0, x1] × [y0, y1].
#[derive(Clone, Copy)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    fn exit(&self, x: f64, y: f64, c: f64, s: f64) -> f64 {
        let mut t = f64::INFINITY;
        if c > 0.0 {
            t = t.min((self.x1 - x) / c);
        } else if c < 0.0 {
            t = t.min((self.x0 - x) / c);
        }
        if s > 0.0 {
            t = t.min((self.y1 - y) / s);
        } else if s < 0.0 {
            t = t.min((self.y0 - y) / s);
        }
        t.max(0.0)
    }

    /// ∫∫ f(x, y) over [x0, x1] × [max(y0, ylo), y1].
    fn integrate(&self, outer: &Rule, ylo: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
        outer.integrate(self.x0, self.x1, |x| outer.integrate(self.y0.max(ylo), self.y1, |y| f(x, y)))
    }
}

/// Angular integral ∫_0^{2π} g(φ, exit distance) dφ, split at the four corner directions.
fn around(rect: &Rect, x: f64, y: f64, angular: &Rule, mut g: impl FnMut(f64, f64, f64) -> f64) -> f64 {
    let mut cuts: Vec<f64> = [(rect.x0, rect.y0), (rect.x1, rect.y0), (rect.x1, rect.y1), (rect.x0, rect.y1)]
        .iter()
        .map(|&(cx, cy)| (cy - y).atan2(cx - x).rem_euclid(2.0 * PI))
        .collect();
    cuts.push(0.0);
    cuts.push(2.0 * PI);
    cuts.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        acc += angular.integrate(w[0], w[1], |phi| {
            let (sn, cs) = phi.sin_cos();
            g(cs, sn, rect.exit(x, y, cs, sn))
        });
    }
    acc
}

/// W^{s,p} Gagliardo seminorm (p-th power) of u on a rectangle, in polar coordinates about x.
pub fn gagliardo_rect(u: impl Fn(f64, f64) -> f64 + Sync, rect: Rect, s: f64, p: f64, outer: &Rule, angular: &Rule, radial: &Rule) -> f64 {
    rect.integrate(outer, f64::NEG_INFINITY, |x, y| {
        let ux = u(x, y);
        around(&rect, x, y, angular, |c, sn, rmax| {
            radial.singular(rmax, 1.0 + s * p, p, |t| pw(u(x + t * c, y + t * sn) - ux, p))
        })
    })
}

/// Heterogeneous-horizon seminorm (p-th power) on a rectangle with δ = y − y0, rows with δ ≥ cut.
pub fn nonlocal_rect(
    u: impl Fn(f64, f64) -> f64 + Sync,
    rect: Rect,
    s: f64,
    p: f64,
    theta: f64,
    cut: f64,
    outer: &Rule,
    angular: &Rule,
    radial: &Rule,
) -> f64 {
    let mu = 2.0 + s * p;
    rect.integrate(outer, rect.y0 + cut, |x, y| {
        let r = theta * (y - rect.y0);
        let ux = u(x, y);
        r.powf(-mu)
            * around(&rect, x, y, angular, |c, sn, rmax| {
                radial.singular(rmax.min(r), -1.0, p, |t| pw(u(x + t * c, y + t * sn) - ux, p))
            })
    })
}
