use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::problem::ObstacleProblem;
use crate::error::{precondition, Error, Result};
use crate::sum::{pairwise_sum, par_map};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ProjectedDescent,
    Psor,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ProjectedDescent => "projected_descent",
            Self::Psor => "psor",
            Self::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kkt {
    /// max over Ω₀ of (h − u)₊.
    pub max_obstacle_violation: f64,
    /// max over free nodes of |min(u − h, ∂J/∂u)|.
    pub complementarity: f64,
    pub boundary_exact: bool,
    pub vi_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverResult {
    pub method: Method,
    pub values: Vec<f64>,
    /// E(u) − ⟨f, u⟩.
    pub energy: f64,
    pub iterations: usize,
    pub kkt: Kkt,
    /// Objective after each accepted step, starting from the initial iterate.
    pub energy_history: Vec<f64>,
    /// J(u_{k+1}) − J(u_k) per accepted step, computed without cancellation.
    pub energy_drops: Vec<f64>,
    pub ring_width: f64,
    pub pinned_nodes: usize,
    pub obstacle_nonnegative: bool,
}

impl SolverResult {
    fn finish(problem: &ObstacleProblem, method: Method, values: Vec<f64>, iterations: usize) -> Self {
        let kkt = kkt(problem, &values);
        Self {
            method,
            energy: problem.objective(&values),
            values,
            iterations,
            kkt,
            energy_history: Vec::new(),
            energy_drops: Vec::new(),
            ring_width: problem.ring_width,
            pinned_nodes: problem.pinned.iter().filter(|&&b| b).count(),
            obstacle_nonnegative: problem.obstacle_nonnegative,
        }
    }

    /// Nodes where the obstacle constraint is active to within `tol`.
    pub fn active(&self, problem: &ObstacleProblem, tol: f64) -> Vec<bool> {
        (0..problem.len())
            .map(|i| problem.in_omega0(i) && self.values[i] - problem.obstacle[i] <= tol)
            .collect()
    }
}

pub fn kkt(problem: &ObstacleProblem, u: &[f64]) -> Kkt {
    let g = problem.objective_gradient(u);
    let (mut viol, mut comp) = (0.0f64, 0.0f64);
    let mut boundary_exact = true;
    for i in 0..problem.len() {
        if problem.pinned[i] {
            boundary_exact &= u[i] == problem.phi[i];
            continue;
        }
        let gap = u[i] - problem.obstacle[i];
        viol = viol.max(-gap);
        comp = comp.max(gap.min(g[i]).abs());
    }
    Kkt { max_obstacle_violation: viol.max(0.0), complementarity: comp, boundary_exact, vi_residual: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsorOptions {
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PsorOptions {
    fn default() -> Self {
        Self { omega: 1.5, tol: 1e-10, max_iter: 100_000 }
    }
}

/// Symmetric rows of the Hessian 2c(D − K − Kᵀ) of a quadratic energy c·Σ K (u_y − u_x)².
struct Quadratic {
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
}

impl Quadratic {
    fn assemble(problem: &ObstacleProblem) -> Result<Self> {
        if problem.params.p != 2.0 {
            return Err(precondition("psor", "p = 2", format!("p = {}", problem.params.p)));
        }
        let c = problem.growth.f(1.0, 2.0);
        let n = problem.len();
        let rows = par_map(n, |i| {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            let mut d = 0.0;
            for sp in [&problem.kernel, &problem.kernel_t] {
                let (cols, vals) = sp.row(i);
                for (&j, &k) in cols.iter().zip(vals) {
                    entries.push((j as usize, -2.0 * c * k));
                    d += 2.0 * c * k;
                }
            }
            entries.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (j, v) in entries {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            (merged, d)
        });
        let (rows, diag): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        for i in problem.free_nodes() {
            if !(diag[i] > 0.0) {
                return Err(Error::Assembly(format!(
                    "zero diagonal at node {i} (δ = {}); the mesh does not resolve its horizon ball",
                    problem.delta[i]
                )));
            }
        }
        Ok(Self { rows, diag })
    }

    fn apply_row(&self, i: usize, u: &[f64]) -> f64 {
        let mut acc = self.diag[i] * u[i];
        for &(j, v) in &self.rows[i] {
            acc += v * u[j];
        }
        acc
    }
}

/// Projected SOR for the p = 2 obstacle problem.
pub fn solve_psor(problem: &ObstacleProblem, opts: PsorOptions, start: Option<&[f64]>) -> Result<SolverResult> {
    if !(opts.omega > 0.0 && opts.omega < 2.0) {
        return Err(Error::Validity(format!("relaxation must lie in (0, 2); got {}", opts.omega)));
    }
    let q = Quadratic::assemble(problem)?;
    let mut u = problem.project(start.unwrap_or(&problem.phi));
    let free = problem.free_nodes();
    let b: Vec<f64> = (0..problem.len()).map(|i| problem.weights[i] * problem.forcing[i]).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut change = 0.0f64;
        for &i in &free {
            let r = b[i] - q.apply_row(i, &u);
            let next = (u[i] + opts.omega * r / q.diag[i]).max(problem.obstacle[i]);
            change = change.max((next - u[i]).abs());
            u[i] = next;
        }
        if change <= opts.tol {
            let natural = free
                .iter()
                .map(|&i| {
                    let r = b[i] - q.apply_row(i, &u);
                    ((u[i] + r / q.diag[i]).max(problem.obstacle[i]) - u[i]).abs()
                })
                .fold(0.0, f64::max);
            if natural <= opts.tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::Stagnation {
            iterations,
            diagnostics: format!("PSOR did not reach tol {} within max_iter", opts.tol),
        });
    }
    Ok(SolverResult::finish(problem, Method::Psor, u, iterations))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000 }
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 50;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let t: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&t)
}

/// Projected gradient descent in the Jacobi metric with Barzilai–Borwein steps and Armijo backtracking.
pub fn solve_projected_descent(problem: &ObstacleProblem, opts: DescentOptions, start: Option<&[f64]>) -> Result<SolverResult> {
    let n = problem.len();
    let mut u = problem.project(start.unwrap_or(&problem.phi));
    let mut j = problem.objective(&u);
    let mut g = problem.objective_gradient(&u);
    let mut history = vec![j];
    let mut drops = Vec::new();
    let mut alpha = 1.0;
    let mut iterations = 0;
    loop {
        let metric = jacobi_metric(problem, &u);
        let trial = |a: f64| -> Vec<f64> {
            let v: Vec<f64> = (0..n).map(|i| u[i] - a * g[i] / metric[i]).collect();
            problem.project(&v)
        };
        let full = trial(1.0);
        let pg = (0..n).map(|i| (full[i] - u[i]).abs()).fold(0.0, f64::max);
        if pg <= opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let mut accepted = None;
        let mut a = alpha;
        for _ in 0..MAX_BACKTRACKS {
            let v = trial(a);
            let step: Vec<f64> = (0..n).map(|i| v[i] - u[i]).collect();
            let slope = dot(&g, &step);
            if slope < 0.0 {
                let dj = problem.objective_change(&u, &v);
                if dj < 0.0 && dj <= ARMIJO * slope {
                    accepted = Some((v, step, dj));
                    break;
                }
            }
            a *= 0.5;
        }
        let Some((v, step, dj)) = accepted else {
            return Err(Error::Stagnation {
                iterations,
                diagnostics: format!(
                    "no energy decrease after {MAX_BACKTRACKS} backtracks; projected step {pg:.3e}, objective {j:.12e}"
                ),
            });
        };
        let g_next = problem.objective_gradient(&v);
        let y: Vec<f64> = (0..n).map(|i| g_next[i] - g[i]).collect();
        let s_metric: Vec<f64> = (0..n).map(|i| step[i] * metric[i]).collect();
        let sy = dot(&step, &y);
        alpha = if sy > 0.0 { (dot(&step, &s_metric) / sy).clamp(1e-6, 1e6) } else { 1.0 };
        u = v;
        g = g_next;
        j = problem.objective(&u);
        history.push(j);
        drops.push(dj);
    }
    let mut res = SolverResult::finish(problem, Method::ProjectedDescent, u, iterations);
    res.energy_history = history;
    res.energy_drops = drops;
    Ok(res)
}

fn jacobi_metric(problem: &ObstacleProblem, u: &[f64]) -> Vec<f64> {
    let mut h = problem.hessian_diagonal(u);
    let top = h.iter().cloned().fold(0.0, f64::max);
    let floor = if top > 0.0 { 1e-8 * top } else { 1.0 };
    for v in h.iter_mut() {
        *v = v.max(floor);
    }
    h
}

/// Largest Ω₀ node count the enumeration oracle accepts.
pub const ORACLE_MAX_NODES: usize = 12;

/// Exact p = 2 solution by enumerating every active set on Ω₀.
pub fn solve_oracle(problem: &ObstacleProblem) -> Result<SolverResult> {
    let q = Quadratic::assemble(problem)?;
    let obs = problem.obstacle_nodes();
    if obs.len() > ORACLE_MAX_NODES {
        return Err(Error::Resource(format!(
            "oracle enumeration supports at most {ORACLE_MAX_NODES} obstacle nodes; got {}",
            obs.len()
        )));
    }
    let n = problem.len();
    let b: Vec<f64> = (0..n).map(|i| problem.weights[i] * problem.forcing[i]).collect();
    let dense = |i: usize, j: usize| -> f64 {
        if i == j {
            q.diag[i]
        } else {
            q.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
        }
    };
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    for mask in 0u32..(1u32 << obs.len()) {
        let mut u = problem.phi.clone();
        let mut fixed = problem.pinned.clone();
        for (k, &i) in obs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                fixed[i] = true;
                u[i] = problem.obstacle[i];
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
        let m = free.len();
        let a = DMatrix::from_fn(m, m, |r, c| dense(free[r], free[c]));
        let rhs = DVector::from_fn(m, |r, _| {
            let i = free[r];
            let coupled: f64 = q.rows[i].iter().filter(|e| fixed[e.0]).map(|e| e.1 * u[e.0]).sum();
            b[i] - coupled
        });
        let Some(x) = a.lu().solve(&rhs) else {
            return Err(Error::Assembly("singular free-node system in oracle".into()));
        };
        for (r, &i) in free.iter().enumerate() {
            u[i] = x[r];
        }
        let tol = 1e-12 * (1.0 + u.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let feasible = free.iter().all(|&i| u[i] >= problem.obstacle[i] - tol);
        let optimal = obs.iter().enumerate().all(|(k, &i)| {
            mask & (1 << k) == 0 || q.apply_row(i, &u) - b[i] >= -1e-12 * scale
        });
        if feasible && optimal {
            let u = problem.project(&u);
            return Ok(SolverResult::finish(problem, Method::Oracle, u, mask as usize + 1));
        }
    }
    Err(Error::Validity("no active set satisfies feasibility and optimality".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViReport {
    /// min over sampled v of ∂J(u)·(v − u) = 2B(u, v − u) − ⟨f, v − u⟩ for F = t².
    pub min_residual: f64,
    pub samples: usize,
    pub worst_sample: usize,
}

impl ViReport {
    pub fn certified(&self, tol: f64) -> bool {
        self.min_residual >= -tol
    }
}

/// Samples admissible v = P(u + η ξ) and reports the smallest first-order residual.
pub fn certify_vi(problem: &ObstacleProblem, u: &[f64], samples: usize, seed: u64) -> Result<ViReport> {
    if !problem.is_admissible(u) {
        return Err(Error::Validity("certify_vi requires an admissible u".into()));
    }
    let g = problem.objective_gradient(u);
    let free = problem.free_nodes();
    let scale = 1.0 + u.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ViReport { min_residual: 0.0, samples, worst_sample: 0 };
    if free.is_empty() {
        return Ok(report);
    }
    let mut xi = vec![0.0; u.len()];
    for k in 0..samples {
        xi.iter_mut().for_each(|v| *v = 0.0);
        let eta = scale * 10f64.powf(rng.gen_range(-4.0..0.0));
        match k % 3 {
            0 => {
                let i = free[rng.gen_range(0..free.len())];
                xi[i] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            }
            1 => {
                for &i in &free {
                    xi[i] = rng.gen_range(-1.0..1.0);
                }
            }
            _ => {
                for &i in &free {
                    let toward = if problem.in_omega0(i) { problem.obstacle[i] - u[i] } else { 0.0 };
                    xi[i] = toward / scale + rng.gen_range(-0.1..0.1);
                }
            }
        }
        let v: Vec<f64> = u.iter().zip(&xi).map(|(a, b)| a + eta * b).collect();
        let v = problem.project(&v);
        let dir: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - b).collect();
        let r = dot(&g, &dir);
        if r < report.min_residual {
            report.min_residual = r;
            report.worst_sample = k;
        }
    }
    Ok(report)
}
