use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points are stored with three coordinates; unused trailing entries are zero.
/// The normal coordinate of strips and hypographs is the last used one.
pub type Point = [f64; 3];

const TOL: f64 = 1e-12;

pub fn point_from(x: &[f64]) -> Point {
    let mut p = [0.0; 3];
    for (i, v) in x.iter().take(3).enumerate() {
        p[i] = *v;
    }
    p
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentialBc {
    Truncated,
    Periodic,
}

/// Piecewise-linear boundary profile ζ given by breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
}

impl Profile {
    pub fn new(xs: Vec<f64>, zs: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != zs.len() {
            return Err(Error::Domain("profile needs ≥ 2 breakpoints with matching heights".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("profile breakpoints must be strictly increasing".into()));
        }
        if xs.iter().chain(&zs).any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile breakpoints must be finite".into()));
        }
        Ok(Self { xs, zs })
    }

    /// Linear interpolation, extended by the end slopes outside the breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let k = match self.xs.partition_point(|&b| b <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let (z0, z1) = (self.zs[k], self.zs[k + 1]);
        z0 + (z1 - z0) * (x - x0) / (x1 - x0)
    }

    pub fn lipschitz(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.zs.windows(2))
            .map(|(x, z)| ((z[1] - z[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    /// Range of ζ over [a, b].
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut lo = self.eval(a).min(self.eval(b));
        let mut hi = self.eval(a).max(self.eval(b));
        for (x, z) in self.xs.iter().zip(&self.zs) {
            if *x > a && *x < b {
                lo = lo.min(*z);
                hi = hi.max(*z);
            }
        }
        (lo, hi)
    }

    /// Breakpoints of the graph restricted to [a, b], including the end points.
    pub fn polyline_on(&self, a: f64, b: f64) -> Vec<[f64; 2]> {
        let mut pts = vec![[a, self.eval(a)]];
        for (x, z) in self.xs.iter().zip(&self.zs) {
            if *x > a && *x < b {
                pts.push([*x, *z]);
            }
        }
        pts.push([b, self.eval(b)]);
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    /// (0, M] with boundary {0}.
    Interval { m: f64 },
    /// [-L, L]^{d-1} × (0, M] with boundary x_d = 0.
    Strip { d: usize, m: f64, l: f64, bc: TangentialBc },
    /// Simple, positively oriented polygon; the whole polygon boundary is Γ.
    Polygon2D { vertices: Vec<[f64; 2]> },
    /// {(x', x_d): |x'| ≤ L, ζ(x') < x_d ≤ ζ(x') + height}; Γ is the graph of ζ.
    Hypograph2D { profile: Profile, half_width: f64, height: f64 },
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (vx, vy) = (b[0] - a[0], b[1] - a[1]);
    let (wx, wy) = (p[0] - a[0], p[1] - a[1]);
    let len2 = vx * vx + vy * vy;
    let t = if len2 > 0.0 { ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (dx, dy) = (wx - t * vx, wy - t * vy);
    (dx * dx + dy * dy).sqrt()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2], o: f64| {
        o == 0.0
            && r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

pub fn polygon_signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (p, q) = (v[i], v[(i + 1) % n]);
        acc += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * acc
}

pub fn polygon_contains(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

impl DomainSpec {
    pub fn interval(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Domain(format!("interval length must be positive; got {m}")));
        }
        Ok(Self::Interval { m })
    }

    pub fn strip(d: usize, m: f64, l: f64, bc: TangentialBc) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::Domain(format!("strip dimension must be 1, 2 or 3; got {d}")));
        }
        if !(m > 0.0 && m.is_finite() && l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("strip needs M > 0 and L > 0; got M = {m}, L = {l}")));
        }
        Ok(Self::Strip { d, m, l, bc })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Domain("polygon needs at least 3 vertices".into()));
        }
        if polygon_signed_area(&vertices) <= 0.0 {
            return Err(Error::Domain("polygon must be positively oriented".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                if segments_cross(a, b, c, d) {
                    return Err(Error::Domain(format!("polygon edges {i} and {j} intersect")));
                }
            }
        }
        Ok(Self::Polygon2D { vertices })
    }

    pub fn unit_square() -> Self {
        Self::Polygon2D { vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] }
    }

    pub fn hypograph(profile: Profile, half_width: f64, height: f64) -> Result<Self> {
        if !(half_width > 0.0 && height > 0.0) {
            return Err(Error::Domain("hypograph needs positive half-width and height".into()));
        }
        if !profile.lipschitz().is_finite() {
            return Err(Error::Domain("hypograph profile must have finite Lipschitz constant".into()));
        }
        Ok(Self::Hypograph2D { profile, half_width, height })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            Self::Strip { d, .. } => *d,
            Self::Polygon2D { .. } | Self::Hypograph2D { .. } => 2,
        }
    }

    pub fn is_strip_like(&self) -> bool {
        matches!(self, Self::Interval { .. } | Self::Strip { .. })
    }

    /// Height M of interval/strip domains.
    pub fn height(&self) -> Option<f64> {
        match self {
            Self::Interval { m } | Self::Strip { m, .. } => Some(*m),
            Self::Hypograph2D { height, .. } => Some(*height),
            Self::Polygon2D { .. } => None,
        }
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Self::Hypograph2D { profile, .. } => Some(profile.lipschitz()),
            _ => None,
        }
    }

    /// Tangential period for periodic strips.
    pub fn period(&self) -> Option<f64> {
        match self {
            Self::Strip { d, l, bc: TangentialBc::Periodic, .. } if *d > 1 => Some(2.0 * l),
            _ => None,
        }
    }

    /// |Ω ∩ computational box|.
    pub fn measure(&self) -> f64 {
        match self {
            Self::Interval { m } => *m,
            Self::Strip { d, m, l, .. } => m * (2.0 * l).powi(*d as i32 - 1),
            Self::Polygon2D { vertices } => polygon_signed_area(vertices),
            Self::Hypograph2D { half_width, height, .. } => 2.0 * half_width * height,
        }
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        dist(&lo, &hi)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Self::Interval { m } => ([0.0; 3], [*m, 0.0, 0.0]),
            Self::Strip { d, m, l, .. } => {
                let mut lo = [0.0; 3];
                let mut hi = [0.0; 3];
                for k in 0..d - 1 {
                    lo[k] = -l;
                    hi[k] = *l;
                }
                hi[d - 1] = *m;
                (lo, hi)
            }
            Self::Polygon2D { vertices } => {
                let mut lo = [f64::INFINITY, f64::INFINITY, 0.0];
                let mut hi = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0];
                for v in vertices {
                    lo[0] = lo[0].min(v[0]);
                    lo[1] = lo[1].min(v[1]);
                    hi[0] = hi[0].max(v[0]);
                    hi[1] = hi[1].max(v[1]);
                }
                (lo, hi)
            }
            Self::Hypograph2D { profile, half_width, height } => {
                let (zlo, zhi) = profile.range_on(-half_width, *half_width);
                ([-half_width, zlo, 0.0], [*half_width, zhi + height, 0.0])
            }
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Self::Interval { m } => x[0] >= -TOL && x[0] <= m + TOL,
            Self::Strip { d, m, l, .. } => {
                (0..d - 1).all(|k| x[k].abs() <= l + TOL) && x[d - 1] >= -TOL && x[d - 1] <= m + TOL
            }
            Self::Polygon2D { vertices } => {
                let p = [x[0], x[1]];
                polygon_contains(vertices, p) || self.raw_delta(x) <= TOL
            }
            Self::Hypograph2D { profile, half_width, height } => {
                let z = profile.eval(x[0]);
                x[0].abs() <= half_width + TOL && x[1] >= z - TOL && x[1] <= z + height + TOL
            }
        }
    }

    /// Distance to Γ without the membership check (also meaningful outside Ω).
    pub fn raw_delta(&self, x: &Point) -> f64 {
        match self {
            Self::Interval { .. } => x[0].abs(),
            Self::Strip { d, .. } => x[d - 1].abs(),
            Self::Polygon2D { vertices } => {
                let p = [x[0], x[1]];
                let n = vertices.len();
                (0..n)
                    .map(|i| seg_dist(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            Self::Hypograph2D { profile, half_width, .. } => {
                let p = [x[0], x[1]];
                profile
                    .polyline_on(-half_width, *half_width)
                    .windows(2)
                    .map(|s| seg_dist(p, s[0], s[1]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        let p = point_from(x);
        if x.len() != self.dim() {
            return Err(Error::Domain(format!("expected a {}-d point, got {} coordinates", self.dim(), x.len())));
        }
        if !self.contains(&p) {
            return Err(Error::Domain(format!("point {x:?} lies outside the closed domain")));
        }
        Ok(self.raw_delta(&p))
    }

    /// Parameter intervals {ρ > 0 : x + ρ·dir ∈ Ω} along a unit direction. On a periodic strip the
    /// tangential extent is the minimal-image window of half-width L around x.
    pub fn ray_chords(&self, x: &Point, dir: &Point) -> Vec<(f64, f64)> {
        let box_exit = |lo: &[f64], hi: &[f64], k: usize| {
            (0..k)
                .map(|a| {
                    if dir[a] > 0.0 {
                        (hi[a] - x[a]) / dir[a]
                    } else if dir[a] < 0.0 {
                        (lo[a] - x[a]) / dir[a]
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min)
                .max(0.0)
        };
        match self {
            Self::Interval { m } => vec![(0.0, box_exit(&[0.0], &[*m], 1))],
            Self::Strip { d, m, l, bc } => {
                let (mut lo, mut hi) = ([0.0; 3], [0.0; 3]);
                for k in 0..d - 1 {
                    let c = if *bc == TangentialBc::Periodic { x[k] } else { 0.0 };
                    lo[k] = c - l;
                    hi[k] = c + l;
                }
                hi[d - 1] = *m;
                vec![(0.0, box_exit(&lo, &hi, *d))]
            }
            Self::Polygon2D { vertices } => {
                let n = vertices.len();
                self.chords_through((0..n).map(|i| (vertices[i], vertices[(i + 1) % n])), x, dir)
            }
            Self::Hypograph2D { profile, half_width, height } => {
                let bottom = profile.polyline_on(-half_width, *half_width);
                let top: Vec<[f64; 2]> = bottom.iter().map(|q| [q[0], q[1] + height]).collect();
                let (a, b) = (bottom[0], *bottom.last().unwrap());
                let sides = [(a, top[0]), (b, *top.last().unwrap())];
                let segs = bottom.windows(2).chain(top.windows(2)).map(|w| (w[0], w[1])).chain(sides);
                self.chords_through(segs, x, dir)
            }
        }
    }

    fn chords_through(&self, segs: impl Iterator<Item = ([f64; 2], [f64; 2])>, x: &Point, dir: &Point) -> Vec<(f64, f64)> {
        let mut ts = vec![0.0];
        for (a, b) in segs {
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let den = dir[0] * ey - dir[1] * ex;
            if den.abs() < 1e-300 {
                continue;
            }
            let (wx, wy) = (a[0] - x[0], a[1] - x[1]);
            let t = (wx * ey - wy * ex) / den;
            let u = (wx * dir[1] - wy * dir[0]) / den;
            if t > TOL && (-TOL..=1.0 + TOL).contains(&u) {
                ts.push(t);
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        ts.windows(2)
            .filter(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.contains(&[x[0] + mid * dir[0], x[1] + mid * dir[1], 0.0])
            })
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Distance-comparison constant K₁ with δ(w) ≤ |w_d − ζ(w')| ≤ K₁ δ(w).
    pub fn flattening_constant(&self) -> f64 {
        match self {
            Self::Hypograph2D { profile, .. } => (1.0 + profile.lipschitz().powi(2)).sqrt(),
            _ => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vee() -> DomainSpec {
        let p = Profile::new(vec![-4.0, 0.0, 4.0], vec![2.0, 0.0, 2.0]).unwrap();
        DomainSpec::hypograph(p, 4.0, 3.0).unwrap()
    }

    #[test]
    fn strip_and_square_distances() {
        let s = DomainSpec::strip(2, 1.0, 1.0, TangentialBc::Truncated).unwrap();
        assert_eq!(s.distance_to_boundary(&[0.3, 0.25]).unwrap(), 0.25);
        let q = DomainSpec::unit_square();
        assert_eq!(q.distance_to_boundary(&[0.5, 0.5]).unwrap(), 0.5);
        assert!(matches!(q.distance_to_boundary(&[1.5, 0.5]), Err(Error::Domain(_))));
    }

    #[test]
    fn hypograph_distance_matches_line_formula_and_sampling() {
        let h = vee();
        let got = h.distance_to_boundary(&[0.0, 1.0]).unwrap();
        assert!((got - 1.0 / 1.25f64.sqrt()).abs() < 1e-12);
        // dense sampling of the graph
        let mut best = f64::INFINITY;
        for i in 0..=400_000 {
            let t = -4.0 + 8.0 * i as f64 / 400_000.0;
            let z = 0.5 * t.abs();
            best = best.min((t * t + (z - 1.0) * (z - 1.0)).sqrt());
        }
        assert!((got - best).abs() < 1e-6);
    }

    #[test]
    fn ray_chords_cover_the_domain() {
        let l = DomainSpec::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        let c = l.ray_chords(&[0.5, 1.5, 0.0], &[1.0, 0.0, 0.0]);
        assert_eq!(c.len(), 1);
        assert!((c[0].1 - 0.5).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        let c = l.ray_chords(&[1.5, 0.25, 0.0], &[-s, s, 0.0]);
        assert!((c[0].1 - 1.5 / s).abs() < 1e-12, "{c:?}");
        let c = l.ray_chords(&[1.5, 0.5, 0.0], &[-s, s, 0.0]);
        assert!((c[0].1 - 0.5 / s).abs() < 1e-12, "{c:?}");
        // area recovered as ∫ dφ ∫ ρ dρ
        let x = [1.5, 0.5, 0.0];
        let mut area = 0.0;
        for (phi, w) in crate::quad::gauss_on(0.0, 2.0 * std::f64::consts::PI, 2000) {
            let d = [phi.cos(), phi.sin(), 0.0];
            area += w * l.ray_chords(&x, &d).iter().map(|(a, b)| 0.5 * (b * b - a * a)).sum::<f64>();
        }
        assert!((area - 3.0).abs() < 1e-3, "{area}");
        let h = vee();
        let x = [0.0, 1.5, 0.0];
        let mut area = 0.0;
        for (phi, w) in crate::quad::gauss_on(0.0, 2.0 * std::f64::consts::PI, 2000) {
            let d = [phi.cos(), phi.sin(), 0.0];
            area += w * h.ray_chords(&x, &d).iter().map(|(a, b)| 0.5 * (b * b - a * a)).sum::<f64>();
        }
        assert!((area - h.measure()).abs() < 1e-2, "{area} vs {}", h.measure());
    }

    #[test]
    fn polygon_validation() {
        assert!(DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(DomainSpec::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        let l = DomainSpec::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
        assert!((l.measure() - 3.0).abs() < 1e-15);
        assert!(!l.contains(&[1.5, 1.5, 0.0]));
    }

    #[test]
    fn hypograph_comparison_constant() {
        let h = vee();
        let k1 = h.flattening_constant();
        let DomainSpec::Hypograph2D { profile, .. } = &h else { unreachable!() };
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            for j in 1..100 {
                let x = -3.0 + 6.0 * i as f64 / 199.0;
                let t = 2.0 * j as f64 / 100.0;
                let w = [x, profile.eval(x) + t, 0.0];
                let d = h.raw_delta(&w);
                assert!(d <= t + 1e-12);
                worst = worst.max(t / d);
            }
        }
        assert!(worst <= k1 + 1e-8, "{worst} > {k1}");
    }
}
