//! Dispatch from a resolved config to the verification and obstacle routines.

use nltrace_core::obstacle::{
    certify_vi, solve_oracle, solve_projected_descent, solve_psor, ObstacleData, ObstacleProblem, SolverResult, ViReport,
};
use nltrace_core::verify::{self, families, InequalityReport};
use nltrace_core::{build_graded_mesh, build_uniform_mesh, FunctionFamily, MeshConfig, Result};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};

#[derive(Debug, Clone, Serialize)]
pub struct ObstacleOutcome {
    pub results: Vec<SolverResult>,
    pub vi: Vec<ViReport>,
    /// Max-norm distance between every pair of solver outputs.
    pub agreement: Option<f64>,
    pub nodes: Vec<[f64; 3]>,
    pub obstacle: Vec<f64>,
    pub pinned: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub theorem_id: String,
    pub family: String,
    pub level: u32,
    pub ratio: Option<f64>,
    pub drift: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunOutput {
    pub reports: Vec<InequalityReport>,
    pub obstacle: Option<ObstacleOutcome>,
    pub convergence: Option<Vec<ConvergenceRow>>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.experiment {
        Experiment::ConvergenceStudy => {
            let reports = run_verify(cfg, cfg.effective_experiment())?;
            let rows = reports
                .iter()
                .map(|r| ConvergenceRow {
                    theorem_id: r.theorem_id.clone(),
                    family: r.family.clone(),
                    level: r.level,
                    ratio: r.ratio,
                    drift: r.drift,
                })
                .collect();
            Ok(RunOutput { reports, obstacle: None, convergence: Some(rows) })
        }
        Experiment::SolveObstacle => run_obstacle(cfg),
        e => Ok(RunOutput { reports: run_verify(cfg, e)?, ..Default::default() }),
    }
}

fn run_verify(cfg: &ExperimentConfig, exp: Experiment) -> Result<Vec<InequalityReport>> {
    let domain = cfg.domain_spec()?;
    let params = cfg.kernel_params()?;
    let res = cfg.resolution();
    let given = cfg.families()?;
    let pick = |default: Vec<FunctionFamily>| given.clone().unwrap_or(default);
    let p = &cfg.params;
    let mut reports = match exp {
        Experiment::VerifyHardy1d => {
            let m = domain.height().unwrap_or(1.0);
            let fams = pick(vec![FunctionFamily::coord(0), FunctionFamily::Coord { axis: 0, power: 2.0 }]);
            let mut out = Vec::new();
            for f in &fams {
                out.extend(verify::verify_hardy_1d(
                    f,
                    p.a.unwrap_or(0.5),
                    p.b.unwrap_or(1.0),
                    params.s,
                    params.p,
                    m,
                    &res.cuts,
                    &res.levels,
                )?);
            }
            out
        }
        Experiment::VerifyHardyStrip => {
            let fams = pick(families::zero_trace(&domain));
            let mut out = verify::verify_hardy_strip(&domain, &fams, &params, &res)?;
            let thetas = p.thetas.clone().unwrap_or_default();
            if !thetas.is_empty() {
                out.extend(verify::verify_hardy_strip_theta(&domain, &fams, &params, &thetas, &res)?);
            }
            out
        }
        Experiment::VerifyTraceStrip => {
            let fams = pick(families::with_trace(&domain));
            let thetas = p.thetas.clone().unwrap_or_else(|| vec![params.theta]);
            verify::verify_trace_strip(&domain, &fams, &params, &thetas, &res)?
        }
        Experiment::VerifyTraceLipschitz => verify::verify_trace_lipschitz(&domain, &pick(families::with_trace(&domain)), &params, &res)?,
        Experiment::VerifyPoincare => verify::verify_poincare(&domain, &pick(families::zero_trace(&domain)), &params, &res)?,
        Experiment::VerifyComparison => {
            verify::verify_seminorm_comparison(&domain, &pick(families::with_trace(&domain)), &params, p.theta0.unwrap_or(0.5), &res)?
        }
        Experiment::VerifyMultiplier => {
            let psi = FunctionFamily::parse(cfg.family.psi.as_deref().unwrap_or("ramp(0, 0, 1)"))?;
            verify::verify_multiplier(&domain, &pick(families::with_trace(&domain)), &psi, &params, &res)?
        }
        Experiment::VerifyDirectional => verify::verify_normal_tangential(&domain, &pick(families::with_trace(&domain)), &params, &res)?,
        Experiment::VerifyElementary => verify::check_elementary_inequalities(
            params.p,
            p.epsilon.unwrap_or(0.5),
            p.q.unwrap_or(2.0),
            p.samples.unwrap_or(10_000),
            cfg.seed,
        )?,
        Experiment::SolveObstacle | Experiment::ConvergenceStudy => unreachable!("dispatched in run"),
    };
    for r in reports.iter_mut() {
        r.seed.get_or_insert(cfg.seed);
    }
    Ok(reports)
}

fn run_obstacle(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let domain = cfg.domain_spec()?;
    let params = cfg.kernel_params()?;
    let cut = cfg.mesh.delta_cut.unwrap_or(0.05);
    let mesh = match &cfg.mesh.uniform {
        Some(counts) => build_uniform_mesh(&domain, &params, counts, cut)?,
        None => {
            let mut m = MeshConfig::new(cfg.mesh.target_h.unwrap_or(0.125), cut, cfg.mesh.rho.unwrap_or(0.5));
            if let Some(c) = cfg.mesh.max_cells {
                m.max_cells = c;
            }
            build_graded_mesh(&domain, &params, &m)?
        }
    };
    let o = &cfg.obstacle;
    let fam = |s: &Option<String>, default: &str| FunctionFamily::parse(s.as_deref().unwrap_or(default));
    let data = ObstacleData::from_families(
        &mesh,
        &fam(&o.phi, "const(0)")?,
        &fam(&o.h, "const(0)")?,
        &o.omega0.clone().unwrap_or_default(),
        &fam(&o.forcing, "const(1)")?,
    )?;
    let problem = ObstacleProblem::new(
        &mesh,
        params,
        o.coefficient.unwrap_or(nltrace_core::kernel::Coefficient::Constant { alpha: 1.0 }),
        o.growth.unwrap_or_default(),
        data,
    )?;
    let method = cfg.solver.method.as_deref().unwrap_or("all");
    let quadratic = params.p == 2.0;
    let mut results = Vec::new();
    if method == "psor" || (method == "all" && quadratic) {
        results.push(solve_psor(&problem, cfg.psor_options(), None)?);
    }
    if matches!(method, "projected_descent" | "all") {
        results.push(solve_projected_descent(&problem, cfg.descent_options(), None)?);
    }
    if method == "oracle" || (method == "all" && quadratic && problem.obstacle_nodes().len() <= nltrace_core::obstacle::ORACLE_MAX_NODES) {
        results.push(solve_oracle(&problem)?);
    }
    let samples = cfg.solver.vi_samples.unwrap_or(1000);
    let mut vi = Vec::new();
    for (k, r) in results.iter_mut().enumerate() {
        let rep = certify_vi(&problem, &r.values, samples, cfg.seed.wrapping_add(k as u64))?;
        r.kkt.vi_residual = Some(rep.min_residual);
        vi.push(rep);
    }
    let mut agreement = None;
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let d = results[i].values.iter().zip(&results[j].values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            agreement = Some(agreement.map_or(d, |a: f64| a.max(d)));
        }
    }
    let tol = cfg.solver.tol.unwrap_or(1e-10);
    let mut reports = Vec::new();
    for (r, v) in results.iter().zip(&vi) {
        let mut rep = InequalityReport::new("obstacle", &r.method.to_string(), &params, r.energy, r.kkt.complementarity)
            .with_level(0, problem.ring_width, mesh.excluded_measure(problem.ring_width))
            .with_note(format!(
                "iterations={}; max_violation={:e}; vi_residual={:e}; h_nonnegative={}",
                r.iterations, r.kkt.max_obstacle_violation, v.min_residual, r.obstacle_nonnegative
            ));
        rep.ratio = None;
        rep.seed = Some(cfg.seed);
        rep.pass = r.kkt.max_obstacle_violation <= 1e-10
            && r.kkt.boundary_exact
            && r.kkt.complementarity <= (1e2 * tol).max(1e-8)
            && v.certified(1e-8);
        reports.push(rep);
    }
    if let Some(a) = agreement {
        let mut rep = InequalityReport::new("obstacle.agreement", method, &params, a, 0.0)
            .with_level(0, problem.ring_width, mesh.excluded_measure(problem.ring_width));
        rep.ratio = None;
        rep.seed = Some(cfg.seed);
        rep.pass = a <= 1e-6;
        reports.push(rep);
    }
    Ok(RunOutput {
        reports,
        obstacle: Some(ObstacleOutcome {
            results,
            vi,
            agreement,
            nodes: problem.nodes.clone(),
            obstacle: problem.obstacle.clone(),
            pinned: problem.pinned.clone(),
        }),
        convergence: None,
    })
}
