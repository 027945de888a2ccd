//! Graded quadrature meshes resolving horizon balls near Γ.

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryMesh;
use super::clip::{area_centroid, clip_to_box};
use super::domain::{polygon_contains, DomainSpec, Point};
use super::overlap::{box_ball_overlap, box_distance_range};
use super::tree::CellTree;
use crate::error::{Error, Result};
use crate::kernel::KernelParams;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshConfig {
    pub target_h: f64,
    pub delta_cut: f64,
    pub rho: f64,
    pub max_cells: usize,
    /// Boundary cell size; defaults to the finest volume resolution.
    pub boundary_h: Option<f64>,
}

impl MeshConfig {
    pub fn new(target_h: f64, delta_cut: f64, rho: f64) -> Self {
        Self { target_h, delta_cut, rho, max_cells: 3_000_000, boundary_h: None }
    }

    /// Refinement level ℓ halves target_h and the boundary size, and shrinks ρ by 2^{-ℓ/2}.
    pub fn refined(&self, level: u32) -> Self {
        let f = 0.5f64.powi(level as i32);
        Self {
            target_h: self.target_h * f,
            rho: self.rho * f.sqrt(),
            boundary_h: self.boundary_h.map(|h| h * f),
            ..*self
        }
    }

    pub fn with_delta_cut(&self, delta_cut: f64) -> Self {
        Self { delta_cut, ..*self }
    }

    fn validate(&self, domain: &DomainSpec) -> Result<()> {
        if !(self.target_h > 0.0 && self.target_h.is_finite()) {
            return Err(Error::Validity(format!("target_h must be positive; got {}", self.target_h)));
        }
        if !(self.delta_cut > 0.0 && self.delta_cut < domain.diameter()) {
            return Err(Error::Validity(format!(
                "delta_cut must lie in (0, diam Ω); got {}",
                self.delta_cut
            )));
        }
        if !(self.rho > 0.0 && self.rho <= 0.5) {
            return Err(Error::Validity(format!("rho must lie in (0, 1/2]; got {}", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grading {
    pub target_h: f64,
    pub delta_cut: f64,
    pub rho: f64,
    pub theta: f64,
    pub uniform: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Box,
    Clipped,
    Sheared,
}

/// Compressed per-node horizon lists with the measure of each cell inside the ball.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    pub offsets: Vec<usize>,
    pub index: Vec<u32>,
    pub measure: Vec<f64>,
}

impl NeighborIndex {
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.index[a..b], &self.measure[a..b])
    }

    pub fn total_entries(&self) -> usize {
        self.index.len()
    }
}

#[derive(Debug)]
pub struct QuadratureMesh {
    pub id: u64,
    pub domain: DomainSpec,
    pub dim: usize,
    pub grading: Grading,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub delta: Vec<f64>,
    pub boundary: BoundaryMesh,
    lo: Vec<Point>,
    hi: Vec<Point>,
    aabb_lo: Vec<Point>,
    aabb_hi: Vec<Point>,
    shape: Vec<Shape>,
    tree: CellTree,
    neighbors: OnceLock<NeighborIndex>,
}

const SUB: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Inside,
    Outside,
    Partial,
}

struct Builder<'a> {
    domain: &'a DomainSpec,
    dim: usize,
    theta: f64,
    cfg: MeshConfig,
    k1: f64,
    lip: f64,
    uniform: bool,
}

struct Cells {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    lo: Vec<Point>,
    hi: Vec<Point>,
    aabb_lo: Vec<Point>,
    aabb_hi: Vec<Point>,
    shape: Vec<Shape>,
}

impl Builder<'_> {
    fn param_box(&self) -> (Point, Point) {
        match self.domain {
            DomainSpec::Hypograph2D { half_width, height, .. } => ([-half_width, 0.0, 0.0], [*half_width, *height, 0.0]),
            d => d.bounding_box(),
        }
    }

    fn diam(&self, lo: &Point, hi: &Point) -> f64 {
        let h: Vec<f64> = (0..self.dim).map(|k| hi[k] - lo[k]).collect();
        match self.domain {
            DomainSpec::Hypograph2D { .. } => (h[0] * h[0] + (h[1] + self.lip * h[0]).powi(2)).sqrt(),
            _ => h.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// (δ lower bound, δ upper bound, class) over a parameter box.
    fn bounds(&self, lo: &Point, hi: &Point, diam: f64) -> (f64, f64, Class) {
        let d = self.dim;
        match self.domain {
            DomainSpec::Interval { .. } | DomainSpec::Strip { .. } => (lo[d - 1], hi[d - 1], Class::Inside),
            DomainSpec::Hypograph2D { .. } => (lo[1] / self.k1, hi[1], Class::Inside),
            DomainSpec::Polygon2D { vertices } => {
                let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.0];
                let dc = self.domain.raw_delta(&c);
                let half = 0.5 * diam;
                if dc >= half {
                    if polygon_contains(vertices, [c[0], c[1]]) {
                        (dc - half, dc + half, Class::Inside)
                    } else {
                        (0.0, 0.0, Class::Outside)
                    }
                } else {
                    (0.0, dc + half, Class::Partial)
                }
            }
        }
    }

    fn build(&self, counts: [usize; 3]) -> Result<Cells> {
        let (blo, bhi) = self.param_box();
        let d = self.dim;
        let mut stack: Vec<(Point, Point)> = Vec::new();
        let total: usize = counts[..d].iter().product();
        for flat in (0..total).rev() {
            let mut rem = flat;
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for k in (0..d).rev() {
                let i = rem % counts[k];
                rem /= counts[k];
                let h = (bhi[k] - blo[k]) / counts[k] as f64;
                lo[k] = blo[k] + i as f64 * h;
                hi[k] = if i + 1 == counts[k] { bhi[k] } else { blo[k] + (i + 1) as f64 * h };
            }
            stack.push((lo, hi));
        }
        let mut out = Cells {
            nodes: vec![],
            weights: vec![],
            lo: vec![],
            hi: vec![],
            aabb_lo: vec![],
            aabb_hi: vec![],
            shape: vec![],
        };
        let dc = self.cfg.delta_cut;
        while let Some((lo, hi)) = stack.pop() {
            if out.nodes.len() + stack.len() > self.cfg.max_cells {
                return Err(Error::Resource(format!(
                    "graded mesh exceeds the cell budget of {} (target_h = {}, delta_cut = {}, rho = {}, theta = {})",
                    self.cfg.max_cells, self.cfg.target_h, dc, self.cfg.rho, self.theta
                )));
            }
            let diam = self.diam(&lo, &hi);
            let (dlb, dub, class) = self.bounds(&lo, &hi, diam);
            if class == Class::Outside {
                continue;
            }
            let need = self.cfg.rho * self.theta * dlb.max(dc);
            let reachable = dub > (1.0 - self.theta) * dc;
            if !self.uniform && diam > need && reachable {
                let mid: Vec<f64> = (0..d).map(|k| 0.5 * (lo[k] + hi[k])).collect();
                for child in (0..1usize << d).rev() {
                    let mut clo = lo;
                    let mut chi = hi;
                    for k in 0..d {
                        if child >> k & 1 == 1 {
                            clo[k] = mid[k];
                        } else {
                            chi[k] = mid[k];
                        }
                    }
                    stack.push((clo, chi));
                }
                continue;
            }
            self.emit(&mut out, lo, hi, class);
        }
        if out.nodes.is_empty() {
            return Err(Error::Domain("mesh has no cells inside the domain".into()));
        }
        Ok(out)
    }

    fn emit(&self, out: &mut Cells, lo: Point, hi: Point, class: Class) {
        let d = self.dim;
        let vol: f64 = (0..d).map(|k| hi[k] - lo[k]).product();
        let mut center = [0.0; 3];
        for k in 0..d {
            center[k] = 0.5 * (lo[k] + hi[k]);
        }
        match self.domain {
            DomainSpec::Polygon2D { vertices } if class == Class::Partial => {
                let clipped = clip_to_box(vertices, [lo[0], lo[1]], [hi[0], hi[1]]);
                let (area, c) = area_centroid(&clipped);
                if area <= 1e-15 * vol {
                    return;
                }
                let mut node = [c[0], c[1], 0.0];
                if !polygon_contains(vertices, c) {
                    let mut best = f64::INFINITY;
                    for i in 0..SUB {
                        for j in 0..SUB {
                            let q = [
                                lo[0] + (i as f64 + 0.5) / SUB as f64 * (hi[0] - lo[0]),
                                lo[1] + (j as f64 + 0.5) / SUB as f64 * (hi[1] - lo[1]),
                            ];
                            let dq = (q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2);
                            if polygon_contains(vertices, q) && dq < best {
                                best = dq;
                                node = [q[0], q[1], 0.0];
                            }
                        }
                    }
                }
                out.nodes.push(node);
                out.weights.push(area);
                out.aabb_lo.push(lo);
                out.aabb_hi.push(hi);
                out.shape.push(Shape::Clipped);
            }
            DomainSpec::Hypograph2D { profile, .. } => {
                let (zlo, zhi) = profile.range_on(lo[0], hi[0]);
                out.nodes.push([center[0], center[1] + profile.eval(center[0]), 0.0]);
                out.weights.push(vol);
                out.aabb_lo.push([lo[0], lo[1] + zlo, 0.0]);
                out.aabb_hi.push([hi[0], hi[1] + zhi, 0.0]);
                out.shape.push(Shape::Sheared);
            }
            _ => {
                out.nodes.push(center);
                out.weights.push(vol);
                out.aabb_lo.push(lo);
                out.aabb_hi.push(hi);
                out.shape.push(Shape::Box);
            }
        }
        out.lo.push(lo);
        out.hi.push(hi);
    }
}

fn assemble(domain: &DomainSpec, theta: f64, cfg: MeshConfig, uniform: bool, counts: Option<[usize; 3]>) -> Result<QuadratureMesh> {
    cfg.validate(domain)?;
    let dim = domain.dim();
    let b = Builder {
        domain,
        dim,
        theta,
        cfg,
        k1: domain.flattening_constant(),
        lip: domain.lipschitz().unwrap_or(0.0),
        uniform,
    };
    let counts = counts.unwrap_or_else(|| {
        let (lo, hi) = b.param_box();
        let mut c = [1usize; 3];
        for k in 0..dim {
            c[k] = ((hi[k] - lo[k]) / cfg.target_h).ceil().max(1.0) as usize;
        }
        c
    });
    let cells = b.build(counts)?;
    let delta: Vec<f64> = cells.nodes.iter().map(|x| domain.raw_delta(x)).collect();
    let tree = CellTree::build(&cells.aabb_lo, &cells.aabb_hi, dim);
    let bh = cfg.boundary_h.unwrap_or_else(|| {
        let finest = cfg.rho * theta * cfg.delta_cut;
        let (lo, hi) = domain.bounding_box();
        let extent = (0..dim.max(2) - 1).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(1e-300);
        let perimeter = match domain {
            DomainSpec::Polygon2D { .. } => 2.0 * (hi[0] - lo[0] + hi[1] - lo[1]),
            _ => extent * domain.flattening_constant(),
        };
        finest.min(cfg.target_h).max(perimeter / 4096.0)
    });
    let boundary = BoundaryMesh::build(domain, bh);
    Ok(QuadratureMesh {
        id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        domain: domain.clone(),
        dim,
        grading: Grading { target_h: cfg.target_h, delta_cut: cfg.delta_cut, rho: cfg.rho, theta, uniform },
        nodes: cells.nodes,
        weights: cells.weights,
        delta,
        boundary,
        lo: cells.lo,
        hi: cells.hi,
        aabb_lo: cells.aabb_lo,
        aabb_hi: cells.aabb_hi,
        shape: cells.shape,
        tree,
        neighbors: OnceLock::new(),
    })
}

fn check_dim(domain: &DomainSpec, params: &KernelParams) -> Result<()> {
    if domain.dim() != params.d {
        return Err(Error::Shape(format!(
            "kernel dimension {} does not match the {}-d domain",
            params.d,
            domain.dim()
        )));
    }
    params.validate()
}

/// Dyadic refinement until every cell with δ ≥ delta_cut has diameter ≤ ρ·ϑ·δ.
pub fn build_graded_mesh(domain: &DomainSpec, params: &KernelParams, cfg: &MeshConfig) -> Result<QuadratureMesh> {
    check_dim(domain, params)?;
    assemble(domain, params.theta, *cfg, false, None)
}

/// Uniform tensor grid with `counts[k]` cells along axis k (clipped for polygons).
pub fn build_uniform_mesh(domain: &DomainSpec, params: &KernelParams, counts: &[usize], delta_cut: f64) -> Result<QuadratureMesh> {
    check_dim(domain, params)?;
    if counts.len() != domain.dim() || counts.iter().any(|&c| c == 0) {
        return Err(Error::Shape("one positive cell count per axis is required".into()));
    }
    let mut c = [1usize; 3];
    c[..counts.len()].copy_from_slice(counts);
    let (lo, hi) = domain.bounding_box();
    let h = (0..domain.dim()).map(|k| (hi[k] - lo[k]) / c[k] as f64).fold(0.0, f64::max);
    let cfg = MeshConfig { boundary_h: Some(h), ..MeshConfig::new(h, delta_cut, 0.5) };
    assemble(domain, params.theta, cfg, true, Some(c))
}

impl QuadratureMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn delta_cut(&self) -> f64 {
        self.grading.delta_cut
    }

    pub fn theta(&self) -> f64 {
        self.grading.theta
    }

    /// Nodes at or above the boundary-layer cutoff take part in singular quadrature.
    pub fn is_active(&self, i: usize) -> bool {
        self.delta[i] >= self.grading.delta_cut
    }

    pub fn active_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_active(i)).count()
    }

    pub fn total_measure(&self) -> f64 {
        crate::sum::pairwise_sum(&self.weights)
    }

    /// Measure of the excluded boundary layer δ < cut.
    pub fn excluded_measure(&self, cut: f64) -> f64 {
        let w: Vec<f64> = (0..self.len()).map(|i| if self.delta[i] < cut { self.weights[i] } else { 0.0 }).collect();
        crate::sum::pairwise_sum(&w)
    }

    /// Upper bound on the physical diameter of cell i.
    pub fn cell_diameter(&self, i: usize) -> f64 {
        let (lo, hi) = (&self.lo[i], &self.hi[i]);
        let h: Vec<f64> = (0..self.dim).map(|k| hi[k] - lo[k]).collect();
        match self.shape[i] {
            Shape::Sheared => {
                let lip = self.domain.lipschitz().unwrap_or(0.0);
                (h[0] * h[0] + (h[1] + lip * h[0]).powi(2)).sqrt()
            }
            _ => h.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// Largest cell-diameter-to-horizon ratio over active nodes.
    pub fn resolution_ratio(&self) -> f64 {
        (0..self.len())
            .filter(|&i| self.is_active(i))
            .map(|i| self.cell_diameter(i) / (self.theta() * self.delta[i]))
            .fold(0.0, f64::max)
    }

    /// Measure of cell j inside the open ball B(c, r).
    pub fn overlap(&self, j: usize, c: &Point, r: f64) -> f64 {
        let d = self.dim;
        match self.shape[j] {
            Shape::Box => box_ball_overlap(c, r, &self.lo[j], &self.hi[j], d),
            shape => {
                let (near, far) = box_distance_range(c, &self.aabb_lo[j], &self.aabb_hi[j], d);
                let r2 = r * r;
                if near >= r2 {
                    return 0.0;
                }
                if far < r2 {
                    return self.weights[j];
                }
                let (lo, hi) = (&self.lo[j], &self.hi[j]);
                let (mut inside, mut hits) = (0usize, 0usize);
                for a in 0..SUB {
                    for b in 0..SUB {
                        let q0 = lo[0] + (a as f64 + 0.5) / SUB as f64 * (hi[0] - lo[0]);
                        let q1 = lo[1] + (b as f64 + 0.5) / SUB as f64 * (hi[1] - lo[1]);
                        let q = match (shape, &self.domain) {
                            (Shape::Sheared, DomainSpec::Hypograph2D { profile, .. }) => [q0, q1 + profile.eval(q0)],
                            _ => [q0, q1],
                        };
                        let ok = match &self.domain {
                            DomainSpec::Polygon2D { vertices } => polygon_contains(vertices, q),
                            _ => true,
                        };
                        if ok {
                            inside += 1;
                            if (q[0] - c[0]).powi(2) + (q[1] - c[1]).powi(2) < r2 {
                                hits += 1;
                            }
                        }
                    }
                }
                if inside == 0 {
                    let n = &self.nodes[j];
                    return if (n[0] - c[0]).powi(2) + (n[1] - c[1]).powi(2) < r2 { self.weights[j] } else { 0.0 };
                }
                self.weights[j] * hits as f64 / inside as f64
            }
        }
    }

    /// Visits every cell meeting B(c, r) with the measure of the intersection,
    /// wrapping periodic tangential directions.
    pub fn for_each_in_ball<F: FnMut(usize, f64)>(&self, c: &Point, r: f64, mut f: F) {
        match self.domain.period() {
            None => self.tree.for_each_candidate(c, r, |j| {
                let m = self.overlap(j, c, r);
                if m > 0.0 {
                    f(j, m);
                }
            }),
            Some(period) => {
                let half = 0.5 * period;
                let nt = self.dim - 1;
                let shifts: Vec<f64> = vec![-period, 0.0, period];
                let combos = 3usize.pow(nt as u32);
                for combo in 0..combos {
                    let mut cc = *c;
                    let mut rem = combo;
                    let mut useful = true;
                    for k in 0..nt {
                        cc[k] += shifts[rem % 3];
                        rem /= 3;
                        if cc[k] - r >= half || cc[k] + r <= -half {
                            useful = false;
                        }
                    }
                    if !useful {
                        continue;
                    }
                    self.tree.for_each_candidate(&cc, r, |j| {
                        let m = self.overlap(j, &cc, r);
                        if m > 0.0 {
                            f(j, m);
                        }
                    });
                }
            }
        }
    }

    /// Calls `f` for cells whose bounding boxes may meet B(c, r), without wrapping.
    pub fn for_each_near<F: FnMut(usize)>(&self, c: &Point, r: f64, f: F) {
        self.tree.for_each_candidate(c, r, f);
    }

    /// Euclidean distance, using the nearest periodic image in tangential directions.
    pub fn separation(&self, a: &Point, b: &Point) -> f64 {
        let v = self.displacement(a, b);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    /// b − a, taken to the nearest periodic image in tangential directions.
    pub fn displacement(&self, a: &Point, b: &Point) -> Point {
        let period = self.domain.period();
        let mut v = [0.0; 3];
        for k in 0..self.dim {
            v[k] = b[k] - a[k];
            if let Some(p) = period {
                if k + 1 < self.dim {
                    if v[k] > 0.5 * p {
                        v[k] -= p;
                    } else if v[k] < -0.5 * p {
                        v[k] += p;
                    }
                }
            }
        }
        v
    }

    /// Horizon lists for radius ϑ·δ(x) at every node, built once on first use.
    pub fn neighbor_index(&self) -> &NeighborIndex {
        self.neighbors.get_or_init(|| {
            let rows: Vec<Vec<(u32, f64)>> = crate::sum::par_map(self.len(), |i| {
                let mut row = Vec::new();
                self.for_each_in_ball(&self.nodes[i], self.theta() * self.delta[i], |j, m| row.push((j as u32, m)));
                row
            });
            let mut offsets = Vec::with_capacity(rows.len() + 1);
            offsets.push(0);
            let mut index = Vec::new();
            let mut measure = Vec::new();
            for row in rows {
                for (j, m) in row {
                    index.push(j);
                    measure.push(m);
                }
                offsets.push(index.len());
            }
            NeighborIndex { offsets, index, measure }
        })
    }

    /// Index of the cell containing `p` (nearest node among candidates).
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let cands = self.tree.locate(p, &self.aabb_lo, &self.aabb_hi);
        let nearest = |it: &mut dyn Iterator<Item = usize>| {
            it.min_by(|&a, &b| {
                super::dist(&self.nodes[a], p).total_cmp(&super::dist(&self.nodes[b], p)).then(a.cmp(&b))
            })
        };
        if cands.is_empty() {
            if !self.domain.contains(p) {
                return None;
            }
            return nearest(&mut (0..self.len()));
        }
        nearest(&mut cands.into_iter())
    }

    /// Node table as CSV: coordinates, weight, δ, active flag.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let coords: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
        writeln!(w, "{},weight,delta,active", coords.join(","))?;
        for i in 0..self.len() {
            for k in 0..self.dim {
                write!(w, "{:?},", self.nodes[i][k])?;
            }
            writeln!(w, "{:?},{:?},{}", self.weights[i], self.delta[i], self.is_active(i) as u8)?;
        }
        Ok(())
    }
}
