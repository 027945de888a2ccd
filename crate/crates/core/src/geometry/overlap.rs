//! Measure of the intersection of a cell with a horizon ball.

use super::domain::Point;

pub fn interval_overlap(c: f64, r: f64, lo: f64, hi: f64) -> f64 {
    ((c + r).min(hi) - (c - r).max(lo)).max(0.0)
}

/// Area of the disc of radius r centered at the origin intersected with {X < x, Y < y}.
fn quadrant_area(x: f64, y: f64, r: f64) -> f64 {
    if x <= -r || y <= -r {
        return 0.0;
    }
    let x = x.min(r);
    let prim = |t: f64| {
        let u = (t / r).clamp(-1.0, 1.0);
        0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * u.asin())
    };
    let seg = |a: f64, b: f64| if b > a { prim(b) - prim(a) } else { 0.0 };
    if y >= r {
        return 2.0 * seg(-r, x);
    }
    let c = (r * r - y * y).sqrt();
    if y >= 0.0 {
        let mut area = 2.0 * seg(-r, x.min(-c));
        if x > -c {
            let hi = x.min(c);
            area += y * (hi + c) + seg(-c, hi);
        }
        if x > c {
            area += 2.0 * seg(c, x);
        }
        area
    } else {
        if x <= -c {
            return 0.0;
        }
        let hi = x.min(c);
        y * (hi + c) + seg(-c, hi)
    }
}

/// Exact area of disc(center, r) ∩ [x0, x1] × [y0, y1].
pub fn disc_rect_area(center: [f64; 2], r: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let (x0, x1) = (lo[0] - center[0], hi[0] - center[0]);
    let (y0, y1) = (lo[1] - center[1], hi[1] - center[1]);
    let a = quadrant_area(x1, y1, r) - quadrant_area(x0, y1, r) - quadrant_area(x1, y0, r)
        + quadrant_area(x0, y0, r);
    a.max(0.0)
}

/// Squared distance from `c` to the nearest and farthest points of a box.
pub fn box_distance_range(c: &Point, lo: &Point, hi: &Point, dim: usize) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for k in 0..dim {
        let dn = if c[k] < lo[k] {
            lo[k] - c[k]
        } else if c[k] > hi[k] {
            c[k] - hi[k]
        } else {
            0.0
        };
        let df = (c[k] - lo[k]).abs().max((hi[k] - c[k]).abs());
        near += dn * dn;
        far += df * df;
    }
    (near, far)
}

/// Box–ball overlap: exact for d ≤ 2, tensor subsampling for d = 3.
pub fn box_ball_overlap(c: &Point, r: f64, lo: &Point, hi: &Point, dim: usize) -> f64 {
    let (near, far) = box_distance_range(c, lo, hi, dim);
    let r2 = r * r;
    if near >= r2 {
        return 0.0;
    }
    let vol: f64 = (0..dim).map(|k| hi[k] - lo[k]).product();
    if far < r2 {
        return vol;
    }
    match dim {
        1 => interval_overlap(c[0], r, lo[0], hi[0]),
        2 => disc_rect_area([c[0], c[1]], r, [lo[0], lo[1]], [hi[0], hi[1]]),
        _ => {
            const K: usize = 8;
            let mut hits = 0usize;
            for i in 0..K {
                for j in 0..K {
                    for l in 0..K {
                        let p = [
                            lo[0] + (i as f64 + 0.5) / K as f64 * (hi[0] - lo[0]),
                            lo[1] + (j as f64 + 0.5) / K as f64 * (hi[1] - lo[1]),
                            lo[2] + (l as f64 + 0.5) / K as f64 * (hi[2] - lo[2]),
                        ];
                        let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2);
                        if d2 < r2 {
                            hits += 1;
                        }
                    }
                }
            }
            vol * hits as f64 / (K * K * K) as f64
        }
    }
}
