use serde::{Deserialize, Serialize};

use super::growth::{Growth, GrowthConstants};
use crate::error::{precondition, Error, Result};
use crate::geometry::{DomainSpec, Point, QuadratureMesh};
use crate::kernel::{Coefficient, KernelParams};
use crate::norms::FunctionFamily;
use crate::sum::{pairwise_sum, par_map};

/// The obstacle region Ω₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Omega0 {
    /// No obstacle (h ≡ −∞).
    #[default]
    Empty,
    /// Nodes inside the axis-aligned box [lo, hi].
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Nodes with δ(x) ≥ margin.
    Interior { margin: f64 },
}

impl Omega0 {
    pub fn contains(&self, x: &Point, delta: f64) -> bool {
        match self {
            Self::Empty => false,
            Self::Box { lo, hi } => lo.iter().zip(hi).enumerate().all(|(k, (a, b))| x[k] >= *a && x[k] <= *b),
            Self::Interior { margin } => delta >= *margin,
        }
    }
}

/// Nodal data of an obstacle instance. `obstacle` is −∞ off Ω₀.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleData {
    pub phi: Vec<f64>,
    pub obstacle: Vec<f64>,
    pub forcing: Vec<f64>,
}

impl ObstacleData {
    pub fn from_families(
        mesh: &QuadratureMesh,
        phi: &FunctionFamily,
        h: &FunctionFamily,
        omega0: &Omega0,
        forcing: &FunctionFamily,
    ) -> Result<Self> {
        for fam in [phi, h, forcing] {
            fam.validate()?;
        }
        let eval = |fam: &FunctionFamily| -> Vec<f64> {
            mesh.nodes.iter().map(|x| fam.eval(&mesh.domain, x)).collect()
        };
        let obstacle = mesh
            .nodes
            .iter()
            .zip(&mesh.delta)
            .map(|(x, &d)| if omega0.contains(x, d) { h.eval(&mesh.domain, x) } else { f64::NEG_INFINITY })
            .collect();
        Ok(Self { phi: eval(phi), obstacle, forcing: eval(forcing) })
    }
}

/// Row-compressed kernel coefficients K_xy = w_x·|B(x) ∩ cell_y|·A(x,y)·(ϑδ_x)^{−μ}.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Sparse {
    pub offsets: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Sparse {
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for row in rows {
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Self { offsets, cols, vals }
    }

    fn transpose(&self, n: usize) -> Self {
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            let (c, v) = self.row(i);
            for (&j, &k) in c.iter().zip(v) {
                rows[j as usize].push((i as u32, k));
            }
        }
        Self::from_rows(rows)
    }
}

/// Discrete minimization of E(u) − ⟨f,u⟩ over u ≥ h on Ω₀ with u = φ on the pinned ring.
#[derive(Debug, Clone)]
pub struct ObstacleProblem {
    pub domain: DomainSpec,
    pub params: KernelParams,
    pub coefficient: Coefficient,
    pub growth: Growth,
    pub constants: GrowthConstants,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub delta: Vec<f64>,
    pub phi: Vec<f64>,
    pub obstacle: Vec<f64>,
    pub forcing: Vec<f64>,
    /// Nodes with δ < ring_width, held at φ.
    pub pinned: Vec<bool>,
    pub ring_width: f64,
    /// h ≥ 0 on Ω₀; recorded rather than enforced.
    pub obstacle_nonnegative: bool,
    pub(crate) kernel: Sparse,
    pub(crate) kernel_t: Sparse,
}

impl ObstacleProblem {
    pub fn new(
        mesh: &QuadratureMesh,
        params: KernelParams,
        coefficient: Coefficient,
        growth: Growth,
        data: ObstacleData,
    ) -> Result<Self> {
        params.validate()?;
        coefficient.validate()?;
        if !(params.s < 1.0) {
            return Err(precondition("obstacle", "s < 1", format!("s = {}", params.s)));
        }
        if !(params.p > 1.0 && params.sp() > 1.0) {
            return Err(precondition("obstacle", "sp > 1", format!("sp = {}", params.sp())));
        }
        if mesh.dim == 3 {
            return Err(Error::Domain("obstacle problems are limited to d ≤ 2".into()));
        }
        if params.d != mesh.dim {
            return Err(Error::Shape(format!("params.d = {} but the mesh has dimension {}", params.d, mesh.dim)));
        }
        if (params.theta - mesh.theta()).abs() > 1e-15 {
            return Err(Error::Shape(format!(
                "mesh horizon fraction {} differs from params.theta = {}",
                mesh.theta(),
                params.theta
            )));
        }
        let n = mesh.len();
        for (name, v) in [("phi", &data.phi), ("obstacle", &data.obstacle), ("forcing", &data.forcing)] {
            if v.len() != n {
                return Err(Error::Shape(format!("{name} has {} values for {n} nodes", v.len())));
            }
        }
        if data.phi.iter().chain(&data.forcing).any(|v| !v.is_finite()) {
            return Err(Error::Validity("phi and forcing must be finite".into()));
        }
        let constants = growth.verified_constants(params.p)?;
        let ring_width = mesh.delta_cut();
        let pinned: Vec<bool> = mesh.delta.iter().map(|&d| d < ring_width).collect();
        if !pinned.iter().any(|&b| b) {
            return Err(Error::Domain(format!("no nodes lie in the pinned ring δ < {ring_width}")));
        }
        let mut nonneg = true;
        for i in 0..n {
            let h = data.obstacle[i];
            if h == f64::NEG_INFINITY {
                continue;
            }
            if !h.is_finite() {
                return Err(Error::Validity(format!("obstacle value at node {i} is {h}")));
            }
            if pinned[i] {
                return Err(Error::Domain(format!(
                    "Ω₀ must stay away from the boundary; node {i} with δ = {} is in the pinned ring",
                    mesh.delta[i]
                )));
            }
            nonneg &= h >= 0.0;
        }

        let nb = mesh.neighbor_index();
        let rows = par_map(n, |x| {
            let (idx, meas) = nb.row(x);
            let scale = mesh.weights[x] * params.ball_weight(mesh.delta[x]);
            idx.iter()
                .zip(meas)
                .filter(|(&y, _)| y as usize != x)
                .map(|(&y, &m)| (y, scale * m * coefficient.eval(&mesh.nodes[x], &mesh.nodes[y as usize])))
                .collect::<Vec<_>>()
        });
        let kernel = Sparse::from_rows(rows);
        let kernel_t = kernel.transpose(n);
        Ok(Self {
            domain: mesh.domain.clone(),
            params,
            coefficient,
            growth,
            constants,
            nodes: mesh.nodes.clone(),
            weights: mesh.weights.clone(),
            delta: mesh.delta.clone(),
            phi: data.phi,
            obstacle: data.obstacle,
            forcing: data.forcing,
            pinned,
            ring_width,
            obstacle_nonnegative: nonneg,
            kernel,
            kernel_t,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn in_omega0(&self, i: usize) -> bool {
        self.obstacle[i] > f64::NEG_INFINITY
    }

    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.pinned[i]).collect()
    }

    pub fn obstacle_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_omega0(i)).collect()
    }

    pub fn kernel_entries(&self) -> usize {
        self.kernel.cols.len()
    }

    fn check_len(&self, u: &[f64]) {
        assert_eq!(u.len(), self.len(), "values do not live on the problem mesh");
    }

    /// E(u) = Σ_x Σ_{y ∈ B(x)} K_xy F(u_y − u_x).
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.check_len(u);
        let p = self.params.p;
        let rows = par_map(self.len(), |x| {
            let (c, k) = self.kernel.row(x);
            let terms: Vec<f64> = c.iter().zip(k).map(|(&y, &k)| k * self.growth.f(u[y as usize] - u[x], p)).collect();
            pairwise_sum(&terms)
        });
        pairwise_sum(&rows)
    }

    /// ⟨f, u⟩ = Σ w f u.
    pub fn forcing_action(&self, u: &[f64]) -> f64 {
        let t: Vec<f64> = (0..self.len()).map(|i| self.weights[i] * self.forcing[i] * u[i]).collect();
        pairwise_sum(&t)
    }

    /// E(u) − ⟨f, u⟩.
    pub fn objective(&self, u: &[f64]) -> f64 {
        self.energy(u) - self.forcing_action(u)
    }

    /// J(v) − J(u), summed term by term without cancellation.
    pub fn objective_change(&self, u: &[f64], v: &[f64]) -> f64 {
        self.check_len(v);
        let p = self.params.p;
        let rows = par_map(self.len(), |x| {
            let (c, k) = self.kernel.row(x);
            let mut terms: Vec<f64> = c
                .iter()
                .zip(k)
                .map(|(&y, &k)| {
                    let y = y as usize;
                    k * self.growth.delta(u[y] - u[x], (v[y] - u[y]) - (v[x] - u[x]), p)
                })
                .collect();
            terms.push(-self.weights[x] * self.forcing[x] * (v[x] - u[x]));
            pairwise_sum(&terms)
        });
        pairwise_sum(&rows)
    }

    /// ∇E(u) over all nodes.
    pub fn energy_gradient(&self, u: &[f64]) -> Vec<f64> {
        self.check_len(u);
        let p = self.params.p;
        par_map(self.len(), |i| {
            let (c, k) = self.kernel.row(i);
            let out: Vec<f64> = c.iter().zip(k).map(|(&y, &k)| -k * self.growth.df(u[y as usize] - u[i], p)).collect();
            let (c, k) = self.kernel_t.row(i);
            let inc: Vec<f64> = c.iter().zip(k).map(|(&x, &k)| k * self.growth.df(u[i] - u[x as usize], p)).collect();
            pairwise_sum(&out) + pairwise_sum(&inc)
        })
    }

    /// ∇(E − ⟨f,·⟩)(u) over all nodes.
    pub fn objective_gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = self.energy_gradient(u);
        for (i, gi) in g.iter_mut().enumerate() {
            *gi -= self.weights[i] * self.forcing[i];
        }
        g
    }

    /// Diagonal of the Hessian of E at u.
    pub fn hessian_diagonal(&self, u: &[f64]) -> Vec<f64> {
        let p = self.params.p;
        par_map(self.len(), |i| {
            let (c, k) = self.kernel.row(i);
            let a: Vec<f64> = c.iter().zip(k).map(|(&y, &k)| k * self.growth.d2f(u[y as usize] - u[i], p)).collect();
            let (c, k) = self.kernel_t.row(i);
            let b: Vec<f64> = c.iter().zip(k).map(|(&x, &k)| k * self.growth.d2f(u[i] - u[x as usize], p)).collect();
            pairwise_sum(&a) + pairwise_sum(&b)
        })
    }

    /// Pinned nodes set to φ, Ω₀ nodes clamped to max(u, h), all others unchanged.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        self.check_len(u);
        (0..self.len())
            .map(|i| if self.pinned[i] { self.phi[i] } else { u[i].max(self.obstacle[i]) })
            .collect()
    }

    /// The feasible start max(φ, h·χ_{Ω₀}).
    pub fn feasible_start(&self) -> Vec<f64> {
        self.project(&self.phi)
    }

    pub fn is_admissible(&self, u: &[f64]) -> bool {
        (0..self.len()).all(|i| if self.pinned[i] { u[i] == self.phi[i] } else { u[i] >= self.obstacle[i] })
    }

    /// Σ K |u_y − u_x|^p / A(x,y), the coefficient-free quadrature of the same seminorm.
    pub fn seminorm_quadrature(&self, u: &[f64]) -> f64 {
        let p = self.params.p;
        let rows = par_map(self.len(), |x| {
            let (c, k) = self.kernel.row(x);
            let t: Vec<f64> = c
                .iter()
                .zip(k)
                .map(|(&y, &k)| {
                    let y = y as usize;
                    k / self.coefficient.eval(&self.nodes[x], &self.nodes[y]) * crate::norms::abs_pow(u[y] - u[x], p)
                })
                .collect();
            pairwise_sum(&t)
        });
        pairwise_sum(&rows)
    }

    /// Relabels nodes so that new node k is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut inv = vec![usize::MAX; n];
        if perm.len() != n {
            return Err(Error::Shape(format!("permutation of length {} for {n} nodes", perm.len())));
        }
        for (k, &o) in perm.iter().enumerate() {
            if o >= n || inv[o] != usize::MAX {
                return Err(Error::Shape("not a permutation".into()));
            }
            inv[o] = k;
        }
        let pick = |v: &[f64]| perm.iter().map(|&o| v[o]).collect::<Vec<_>>();
        let rows = perm
            .iter()
            .map(|&o| {
                let (c, k) = self.kernel.row(o);
                c.iter().zip(k).map(|(&j, &v)| (inv[j as usize] as u32, v)).collect()
            })
            .collect();
        let kernel = Sparse::from_rows(rows);
        let kernel_t = kernel.transpose(n);
        Ok(Self {
            nodes: perm.iter().map(|&o| self.nodes[o]).collect(),
            weights: pick(&self.weights),
            delta: pick(&self.delta),
            phi: pick(&self.phi),
            obstacle: pick(&self.obstacle),
            forcing: pick(&self.forcing),
            pinned: perm.iter().map(|&o| self.pinned[o]).collect(),
            kernel,
            kernel_t,
            domain: self.domain.clone(),
            ..*self
        })
    }
}
