//! Quadrature on the designated boundary Γ.

use super::domain::{dist, DomainSpec, Point};

#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    /// Intrinsic dimension of Γ (d − 1).
    pub dim: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Intrinsic coordinates (arc length, or x' on flat boundaries).
    pub param: Vec<[f64; 2]>,
    /// Cell side in intrinsic coordinates.
    pub spacing: Vec<f64>,
    /// Adjacent boundary cells, used for tangential gradient estimates.
    pub adjacency: Vec<Vec<u32>>,
    /// Period of the intrinsic coordinate along closed or periodic boundaries.
    pub period: Option<f64>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        crate::sum::pairwise_sum(&self.weights)
    }

    pub fn build(domain: &DomainSpec, h: f64) -> Self {
        match domain {
            DomainSpec::Interval { .. } | DomainSpec::Strip { d: 1, .. } => Self {
                dim: 0,
                points: vec![[0.0; 3]],
                weights: vec![1.0],
                param: vec![[0.0; 2]],
                spacing: vec![0.0],
                adjacency: vec![vec![]],
                period: None,
            },
            DomainSpec::Strip { d: 2, l, bc, .. } => {
                let n = ((2.0 * l / h).ceil() as usize).max(2);
                let hb = 2.0 * l / n as f64;
                let periodic = *bc == super::TangentialBc::Periodic;
                let mut m = Self::empty(1);
                m.period = periodic.then_some(2.0 * l);
                for i in 0..n {
                    let x = -l + (i as f64 + 0.5) * hb;
                    m.points.push([x, 0.0, 0.0]);
                    m.weights.push(hb);
                    m.param.push([x, 0.0]);
                    m.spacing.push(hb);
                    m.adjacency.push(chain_neighbors(i, n, periodic));
                }
                m
            }
            DomainSpec::Strip { l, bc, .. } => {
                let n = ((2.0 * l / h).ceil() as usize).clamp(2, 256);
                let hb = 2.0 * l / n as f64;
                let periodic = *bc == super::TangentialBc::Periodic;
                let mut m = Self::empty(2);
                m.period = periodic.then_some(2.0 * l);
                for i in 0..n {
                    for j in 0..n {
                        let (x, y) = (-l + (i as f64 + 0.5) * hb, -l + (j as f64 + 0.5) * hb);
                        m.points.push([x, y, 0.0]);
                        m.weights.push(hb * hb);
                        m.param.push([x, y]);
                        m.spacing.push(hb);
                        let mut adj = Vec::new();
                        for a in chain_neighbors(i, n, periodic) {
                            adj.push(a * n as u32 + j as u32);
                        }
                        for b in chain_neighbors(j, n, periodic) {
                            adj.push((i * n) as u32 + b);
                        }
                        m.adjacency.push(adj);
                    }
                }
                m
            }
            DomainSpec::Polygon2D { vertices } => {
                let nv = vertices.len();
                let loop_pts: Vec<[f64; 2]> = (0..=nv).map(|i| vertices[i % nv]).collect();
                Self::polyline(&loop_pts, h, true)
            }
            DomainSpec::Hypograph2D { profile, half_width, .. } => {
                Self::polyline(&profile.polyline_on(-half_width, *half_width), h, false)
            }
        }
    }

    fn empty(dim: usize) -> Self {
        Self { dim, points: vec![], weights: vec![], param: vec![], spacing: vec![], adjacency: vec![], period: None }
    }

    fn polyline(pts: &[[f64; 2]], h: f64, closed: bool) -> Self {
        let mut m = Self::empty(1);
        let mut arc = 0.0;
        for s in pts.windows(2) {
            let (a, b) = (s[0], s[1]);
            let len = dist(&[a[0], a[1], 0.0], &[b[0], b[1], 0.0]);
            if len <= 0.0 {
                continue;
            }
            let n = ((len / h).ceil() as usize).max(1);
            let hs = len / n as f64;
            for i in 0..n {
                let t = (i as f64 + 0.5) / n as f64;
                m.points.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), 0.0]);
                m.weights.push(hs);
                m.param.push([arc + (i as f64 + 0.5) * hs, 0.0]);
                m.spacing.push(hs);
            }
            arc += len;
        }
        let n = m.points.len();
        m.adjacency = (0..n).map(|i| chain_neighbors(i, n, closed)).collect();
        m.period = closed.then_some(arc);
        m
    }
}

fn chain_neighbors(i: usize, n: usize, wrap: bool) -> Vec<u32> {
    let mut v = Vec::with_capacity(2);
    if i > 0 {
        v.push(i as u32 - 1);
    } else if wrap && n > 2 {
        v.push(n as u32 - 1);
    }
    if i + 1 < n {
        v.push(i as u32 + 1);
    } else if wrap && n > 2 {
        v.push(0);
    }
    v
}
