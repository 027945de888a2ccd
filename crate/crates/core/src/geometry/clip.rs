//! Polygon ∩ axis-aligned box by Sutherland–Hodgman clipping.

fn clip_half(poly: &[[f64; 2]], axis: usize, bound: f64, keep_greater: bool) -> Vec<[f64; 2]> {
    let inside = |p: &[f64; 2]| if keep_greater { p[axis] >= bound } else { p[axis] <= bound };
    let mut out = Vec::with_capacity(poly.len() + 4);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let prev = poly[(i + n - 1) % n];
        let (ci, pi) = (inside(&cur), inside(&prev));
        if ci != pi {
            let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
            let mut q = [prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])];
            q[axis] = bound;
            out.push(q);
        }
        if ci {
            out.push(cur);
        }
    }
    out
}

pub fn clip_to_box(poly: &[[f64; 2]], lo: [f64; 2], hi: [f64; 2]) -> Vec<[f64; 2]> {
    let mut p = poly.to_vec();
    for (axis, bound, greater) in [(0, lo[0], true), (0, hi[0], false), (1, lo[1], true), (1, hi[1], false)] {
        if p.is_empty() {
            break;
        }
        p = clip_half(&p, axis, bound, greater);
    }
    p
}

/// Signed area and centroid of a polygon.
pub fn area_centroid(poly: &[[f64; 2]]) -> (f64, [f64; 2]) {
    let n = poly.len();
    if n < 3 {
        return (0.0, [0.0, 0.0]);
    }
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    // shift to the first vertex for conditioning
    let o = poly[0];
    for i in 0..n {
        let p = [poly[i][0] - o[0], poly[i][1] - o[1]];
        let q = [poly[(i + 1) % n][0] - o[0], poly[(i + 1) % n][1] - o[1]];
        let cr = p[0] * q[1] - q[0] * p[1];
        a += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    let area = 0.5 * a;
    if area.abs() < 1e-300 {
        return (0.0, o);
    }
    (area, [o[0] + cx / (6.0 * area), o[1] + cy / (6.0 * area)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_triangle() {
        let tri = [[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]];
        let c = clip_to_box(&tri, [0.0, 0.0], [1.0, 1.0]);
        let (a, _) = area_centroid(&c);
        assert!((a - 1.0).abs() < 1e-15);
        let c = clip_to_box(&tri, [1.0, 1.0], [2.0, 2.0]);
        assert!(area_centroid(&c).0.abs() < 1e-15);
        let c = clip_to_box(&tri, [0.5, 0.0], [1.5, 1.0]);
        assert!((area_centroid(&c).0 - 0.875).abs() < 1e-15);
    }
}
