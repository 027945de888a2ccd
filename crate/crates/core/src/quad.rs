//! Small quadrature and measure helpers shared by the norm and verification code.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(&xi, &wi)| (mid + half * xi, half * wi)).collect()
}

/// Product rule on S^{d-1}: unit directions with weights summing to the sphere area.
pub fn sphere_rule(d: usize) -> Vec<([f64; 3], f64)> {
    match d {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => (0..64)
            .flat_map(|k| {
                let h = 2.0 * PI / 64.0;
                gauss_on(k as f64 * h, (k + 1) as f64 * h, 4)
            })
            .map(|(phi, w)| ([phi.cos(), phi.sin(), 0.0], w))
            .collect(),
        3 => {
            let zs: Vec<(f64, f64)> = (0..8).flat_map(|k| gauss_on(-1.0 + k as f64 * 0.25, -0.75 + k as f64 * 0.25, 4)).collect();
            let phis: Vec<(f64, f64)> = (0..24).flat_map(|k| {
                let h = 2.0 * PI / 24.0;
                gauss_on(k as f64 * h, (k + 1) as f64 * h, 4)
            }).collect();
            let mut out = Vec::with_capacity(zs.len() * phis.len());
            for &(z, wz) in &zs {
                let r = (1.0 - z * z).max(0.0).sqrt();
                for &(phi, wp) in &phis {
                    out.push(([r * phi.cos(), r * phi.sin(), z], wz * wp));
                }
            }
            out
        }
        _ => panic!("dimension {d} unsupported"),
    }
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("dimension {d} unsupported"),
    }
}

/// Surface measure of the unit sphere S^{d-1}.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Average of |e·ω|^p over unit directions ω in R^k.
pub fn direction_average(k: usize, p: f64) -> f64 {
    match k {
        1 => 1.0,
        2 => {
            let n = 4096;
            let mut acc = 0.0;
            for i in 0..n {
                let t = (i as f64 + 0.5) * 0.5 * PI / n as f64;
                acc += t.cos().powf(p);
            }
            acc / n as f64
        }
        3 => 1.0 / (p + 1.0),
        _ => panic!("dimension {k} unsupported"),
    }
}

/// I_k(a) = ∫_{[0,1]^k} ∫_{[0,1]^k} |x−y|^a dx dy, for a > −k.
pub fn cube_self_moment(k: usize, a: f64) -> f64 {
    assert!(a > -(k as f64), "moment exponent {a} not integrable in dimension {k}");
    match k {
        1 => 2.0 / ((a + 1.0) * (a + 2.0)),
        2 => {
            let radial = |c: f64, s: f64| {
                let r = 1.0 / c.max(s);
                r.powf(a + 2.0) / (a + 2.0) - (c + s) * r.powf(a + 3.0) / (a + 3.0)
                    + c * s * r.powf(a + 4.0) / (a + 4.0)
            };
            let mut acc = 0.0;
            for (lo, hi) in [(0.0, PI / 4.0), (PI / 4.0, PI / 2.0)] {
                for (t, w) in gauss_on(lo, hi, 48) {
                    acc += w * radial(t.cos(), t.sin());
                }
            }
            4.0 * acc
        }
        3 => {
            let mut acc = 0.0;
            let phis = [(0.0, 0.6154797086703873), (0.6154797086703873, PI / 4.0), (PI / 4.0, PI / 2.0)];
            for (plo, phi_hi) in phis {
                for (phi, wp) in gauss_on(plo, phi_hi, 32) {
                    for (tlo, thi) in [(0.0, PI / 4.0), (PI / 4.0, PI / 2.0)] {
                        for (th, wt) in gauss_on(tlo, thi, 32) {
                            let n = [phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()];
                            let r = 1.0 / n[0].max(n[1]).max(n[2]);
                            let e1 = n[0] + n[1] + n[2];
                            let e2 = n[0] * n[1] + n[0] * n[2] + n[1] * n[2];
                            let e3 = n[0] * n[1] * n[2];
                            let v = r.powf(a + 3.0) / (a + 3.0) - e1 * r.powf(a + 4.0) / (a + 4.0)
                                + e2 * r.powf(a + 5.0) / (a + 5.0)
                                - e3 * r.powf(a + 6.0) / (a + 6.0);
                            acc += wp * wt * phi.sin() * v;
                        }
                    }
                }
            }
            8.0 * acc
        }
        _ => panic!("dimension {k} unsupported"),
    }
}
