//! Experiment configuration: TOML sections with every default made explicit on resolve.

use std::fmt;
use std::path::{Path, PathBuf};

use nltrace_core::geometry::Profile;
use nltrace_core::kernel::Coefficient;
use nltrace_core::obstacle::{DescentOptions, Growth, Omega0, PsorOptions};
use nltrace_core::verify::Resolution;
use nltrace_core::{DomainSpec, FunctionFamily, KernelParams, MeshConfig, TangentialBc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[serde(rename = "verify_hardy_1d")]
    VerifyHardy1d,
    VerifyHardyStrip,
    VerifyTraceStrip,
    VerifyTraceLipschitz,
    VerifyPoincare,
    VerifyComparison,
    VerifyMultiplier,
    VerifyDirectional,
    VerifyElementary,
    SolveObstacle,
    ConvergenceStudy,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Self::VerifyHardy1d,
        Self::VerifyHardyStrip,
        Self::VerifyTraceStrip,
        Self::VerifyTraceLipschitz,
        Self::VerifyPoincare,
        Self::VerifyComparison,
        Self::VerifyMultiplier,
        Self::VerifyDirectional,
        Self::VerifyElementary,
        Self::SolveObstacle,
        Self::ConvergenceStudy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::VerifyHardy1d => "verify_hardy_1d",
            Self::VerifyHardyStrip => "verify_hardy_strip",
            Self::VerifyTraceStrip => "verify_trace_strip",
            Self::VerifyTraceLipschitz => "verify_trace_lipschitz",
            Self::VerifyPoincare => "verify_poincare",
            Self::VerifyComparison => "verify_comparison",
            Self::VerifyMultiplier => "verify_multiplier",
            Self::VerifyDirectional => "verify_directional",
            Self::VerifyElementary => "verify_elementary",
            Self::SolveObstacle => "solve_obstacle",
            Self::ConvergenceStudy => "convergence_study",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::VerifyHardy1d => "1-D Hardy inequality on (0, M) with closed-form anchors",
            Self::VerifyHardyStrip => "Hardy inequality on strips, plus the theta-explicit sweep",
            Self::VerifyTraceStrip => "L^p and fractional trace bounds on strips",
            Self::VerifyTraceLipschitz => "trace bound on polygons and Lipschitz hypographs",
            Self::VerifyPoincare => "Poincaré inequality for zero-trace functions on bounded domains",
            Self::VerifyComparison => "comparison of seminorms across horizon fractions",
            Self::VerifyMultiplier => "stability under Lipschitz multipliers",
            Self::VerifyDirectional => "normal and tangential seminorm control on strips",
            Self::VerifyElementary => "scalar inequalities behind the 1-D Hardy argument",
            Self::SolveObstacle => "nonlocal obstacle problem with KKT and VI diagnostics",
            Self::ConvergenceStudy => "ratio tables over refinement levels for another experiment",
        }
    }

    /// Experiments whose theorem needs sp > 1.
    pub fn needs_hardy_exponent(&self) -> Option<&'static str> {
        match self {
            Self::VerifyHardy1d => Some("hardy_1d"),
            Self::VerifyHardyStrip => Some("hardy_strip"),
            Self::VerifyTraceStrip => Some("trace_strip"),
            Self::VerifyTraceLipschitz => Some("trace_lipschitz"),
            Self::VerifyPoincare => Some("poincare"),
            Self::VerifyDirectional => Some("normal_tangential"),
            Self::SolveObstacle => Some("obstacle"),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub deterministic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default)]
    pub domain: DomainBlock,
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub mesh: MeshBlock,
    #[serde(default)]
    pub family: FamilyBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub obstacle: ObstacleBlock,
    #[serde(default)]
    pub study: StudyBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    /// interval, strip, polygon, unit_square or hypograph.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<TangentialBc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_z: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
}

impl Default for DomainBlock {
    fn default() -> Self {
        Self {
            kind: String::new(),
            d: None,
            m: None,
            l: None,
            bc: None,
            vertices: None,
            profile_x: None,
            profile_z: None,
            half_width: None,
            height: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MeshBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_h: Option<f64>,
    /// Finest boundary-layer cutoff; the ladder halves upward from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_cut: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cells: Option<usize>,
    /// Uniform cell counts per axis (obstacle runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FamilyBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    /// psor, projected_descent, oracle, or all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vi_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ObstacleBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<Growth>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<Omega0>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StudyBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Any of csv, json, solution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<String>>,
}

/// A configuration error, anchored to a line of the source when one can be identified.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.path, l, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Source text kept for anchoring semantic errors to the key that caused them.
#[derive(Debug, Clone)]
pub struct Source {
    pub path: String,
    pub text: String,
}

impl Source {
    /// 1-based line of `key` inside `[section]` (top level when `section` is empty).
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        let mut section_line = None;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('[') {
                current = rest.trim_end_matches(']').trim().to_string();
                if current == section {
                    section_line = Some(i + 1);
                }
                continue;
            }
            if current == section {
                if let Some((k, _)) = line.split_once('=') {
                    if k.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        section_line
    }

    pub fn error(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { path: self.path.clone(), line: self.line_of(section, key), message: message.into() }
    }
}

pub fn load(path: &Path) -> Result<(ExperimentConfig, Source), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        path: path.display().to_string(),
        line: None,
        message: format!("cannot read config: {e}"),
    })?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, path: &str) -> Result<(ExperimentConfig, Source), ConfigError> {
    let src = Source { path: path.to_string(), text: text.to_string() };
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        ConfigError { path: path.to_string(), line, message: e.message().to_string() }
    })?;
    let cfg = cfg.resolve(&src)?;
    Ok((cfg, src))
}

fn default_domain(exp: Experiment) -> DomainBlock {
    let mut d = DomainBlock::default();
    match exp {
        Experiment::VerifyHardy1d | Experiment::VerifyElementary => {
            d.kind = "interval".into();
            d.m = Some(1.0);
        }
        Experiment::VerifyTraceLipschitz | Experiment::VerifyPoincare | Experiment::VerifyMultiplier => {
            d.kind = "unit_square".into();
        }
        Experiment::SolveObstacle => {
            d.kind = "interval".into();
            d.m = Some(1.0);
        }
        _ => {
            d.kind = "strip".into();
            d.d = Some(2);
            d.m = Some(1.0);
            d.l = Some(0.5);
            d.bc = Some(TangentialBc::Periodic);
        }
    }
    d
}

impl ExperimentConfig {
    /// Fills every default so that the echoed config fully determines the run.
    pub fn resolve(mut self, src: &Source) -> Result<Self, ConfigError> {
        let exp = self.effective_experiment();
        if self.experiment == Experiment::ConvergenceStudy {
            match self.study.experiment {
                None => return Err(src.error("study", "experiment", "convergence_study needs [study] experiment")),
                Some(Experiment::ConvergenceStudy) | Some(Experiment::SolveObstacle) | Some(Experiment::VerifyElementary) => {
                    return Err(src.error("study", "experiment", "convergence_study needs a mesh-based verify experiment"));
                }
                _ => {}
            }
        }
        if self.domain.kind.is_empty() {
            self.domain = default_domain(exp);
        }
        let dom = &mut self.domain;
        match dom.kind.as_str() {
            "interval" => {
                dom.m.get_or_insert(1.0);
            }
            "strip" => {
                dom.d.get_or_insert(2);
                dom.m.get_or_insert(1.0);
                dom.l.get_or_insert(0.5);
                dom.bc.get_or_insert(TangentialBc::Periodic);
            }
            "unit_square" | "polygon" => {}
            "hypograph" => {
                dom.half_width.get_or_insert(1.0);
                dom.height.get_or_insert(1.0);
            }
            other => {
                return Err(src.error("domain", "kind", format!(
                    "unknown domain kind '{other}'; expected interval, strip, polygon, unit_square or hypograph"
                )))
            }
        }

        let p = &mut self.params;
        let (s0, p0) = match exp {
            Experiment::VerifyHardy1d => (0.75, 2.0),
            Experiment::SolveObstacle => (0.6, 2.0),
            _ => (0.8, 1.5),
        };
        p.s.get_or_insert(s0);
        p.p.get_or_insert(p0);
        p.theta.get_or_insert(match exp {
            Experiment::VerifyHardy1d | Experiment::SolveObstacle => 1.0,
            _ => 0.5,
        });
        match exp {
            Experiment::VerifyHardy1d => {
                p.a.get_or_insert(0.5);
                p.b.get_or_insert(1.0);
            }
            Experiment::VerifyHardyStrip => {
                p.thetas.get_or_insert(vec![1.0, 0.5, 0.25, 0.125]);
            }
            Experiment::VerifyTraceStrip => {
                let t = p.theta.unwrap_or(0.5);
                p.thetas.get_or_insert(vec![t]);
            }
            Experiment::VerifyComparison => {
                p.theta0.get_or_insert(0.5);
            }
            Experiment::VerifyElementary => {
                p.epsilon.get_or_insert(0.5);
                p.q.get_or_insert(2.0);
                p.samples.get_or_insert(10_000);
            }
            _ => {}
        }

        let dim = self.domain_dim();
        let m = &mut self.mesh;
        if exp == Experiment::SolveObstacle {
            if m.uniform.is_none() && m.target_h.is_none() {
                m.uniform = Some(vec![20; dim]);
            }
            if m.delta_cut.is_none() {
                let n = m.uniform.as_ref().map_or(20, |u| u[0]);
                m.delta_cut = Some(1.0 / n as f64);
            }
        } else {
            let def = Resolution::default();
            m.target_h.get_or_insert(def.mesh.target_h);
            m.rho.get_or_insert(def.mesh.rho);
            m.levels.get_or_insert(def.levels.clone());
            m.max_cells.get_or_insert(def.mesh.max_cells);
            match (&m.cuts, m.delta_cut) {
                (None, None) => {
                    m.cuts = Some(def.cuts.clone());
                    m.delta_cut = Some(def.finest_cut());
                }
                (None, Some(c)) => m.cuts = Some(vec![4.0 * c, 2.0 * c, c]),
                (Some(cuts), None) => m.delta_cut = Some(cuts.iter().copied().fold(f64::INFINITY, f64::min)),
                (Some(_), Some(_)) => {}
            }
        }

        if exp == Experiment::VerifyMultiplier {
            self.family.psi.get_or_insert_with(|| "ramp(0, 0, 1)".into());
        }
        if exp == Experiment::SolveObstacle {
            let s = &mut self.solver;
            s.method.get_or_insert_with(|| "all".into());
            s.omega.get_or_insert(PsorOptions::default().omega);
            s.tol.get_or_insert(PsorOptions::default().tol);
            s.max_iter.get_or_insert(PsorOptions::default().max_iter);
            s.vi_samples.get_or_insert(1000);
            let o = &mut self.obstacle;
            o.growth.get_or_insert(Growth::Power);
            o.coefficient.get_or_insert(Coefficient::Constant { alpha: 1.0 });
            o.phi.get_or_insert_with(|| "const(0)".into());
            o.h.get_or_insert_with(|| "const(0)".into());
            o.forcing.get_or_insert_with(|| "const(1)".into());
            o.omega0.get_or_insert(Omega0::Interior { margin: 0.3 });
        }
        self.output.dir.get_or_insert_with(|| PathBuf::from("runs").join(self.experiment.name()));
        self.output.formats.get_or_insert_with(|| vec!["csv".into(), "json".into()]);
        self.validate(src)?;
        Ok(self)
    }

    /// The experiment whose settings drive defaults (the studied one for convergence studies).
    pub fn effective_experiment(&self) -> Experiment {
        match (self.experiment, self.study.experiment) {
            (Experiment::ConvergenceStudy, Some(e)) => e,
            (e, _) => e,
        }
    }

    fn domain_dim(&self) -> usize {
        match self.domain.kind.as_str() {
            "interval" => 1,
            "strip" => self.domain.d.unwrap_or(2),
            _ => 2,
        }
    }

    fn validate(&self, src: &Source) -> Result<(), ConfigError> {
        self.domain_spec().map_err(|e| src.error("domain", "kind", e.to_string()))?;
        let params = self.kernel_params().map_err(|e| src.error("params", "s", e.to_string()))?;
        if let Some(theorem) = self.effective_experiment().needs_hardy_exponent() {
            if !params.hardy_valid() {
                let line = src.line_of("params", "s").or_else(|| src.line_of("params", "p"));
                return Err(ConfigError {
                    path: src.path.clone(),
                    line,
                    message: format!("{theorem} requires sp > 1; got sp = {}", params.sp()),
                });
            }
        }
        for (key, f) in self.family_sources() {
            FunctionFamily::parse(&f).map_err(|e| src.error(key.0, key.1, e.to_string()))?;
        }
        if let Some(levels) = &self.mesh.levels {
            if levels.is_empty() {
                return Err(src.error("mesh", "levels", "at least one refinement level is required"));
            }
        }
        if let Some(cuts) = &self.mesh.cuts {
            if cuts.is_empty() || cuts.iter().any(|&c| !(c > 0.0)) {
                return Err(src.error("mesh", "cuts", "cutoffs must be positive and non-empty"));
            }
        }
        if let Some(m) = &self.solver.method {
            if !["psor", "projected_descent", "oracle", "all"].contains(&m.as_str()) {
                return Err(src.error("solver", "method", format!(
                    "unknown solver '{m}'; expected psor, projected_descent, oracle or all"
                )));
            }
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(src.error("", "threads", "threads must be positive"));
            }
        }
        if let Some(formats) = &self.output.formats {
            for f in formats {
                if !["csv", "json", "solution"].contains(&f.as_str()) {
                    return Err(src.error("output", "formats", format!("unknown output format '{f}'")));
                }
            }
        }
        Ok(())
    }

    fn family_sources(&self) -> Vec<((&'static str, &'static str), String)> {
        let mut out = Vec::new();
        for f in self.family.functions.iter().flatten() {
            out.push((("family", "functions"), f.clone()));
        }
        if let Some(p) = &self.family.psi {
            out.push((("family", "psi"), p.clone()));
        }
        for (key, v) in [("phi", &self.obstacle.phi), ("h", &self.obstacle.h), ("forcing", &self.obstacle.forcing)] {
            if let Some(v) = v {
                out.push((("obstacle", key), v.clone()));
            }
        }
        out
    }

    pub fn domain_spec(&self) -> nltrace_core::Result<DomainSpec> {
        let d = &self.domain;
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| nltrace_core::Error::Domain(format!("domain kind '{}' needs '{what}'", d.kind)))
        };
        match d.kind.as_str() {
            "interval" => DomainSpec::interval(need(d.m, "m")?),
            "strip" => DomainSpec::strip(d.d.unwrap_or(2), need(d.m, "m")?, need(d.l, "l")?, d.bc.unwrap_or(TangentialBc::Periodic)),
            "unit_square" => Ok(DomainSpec::unit_square()),
            "polygon" => DomainSpec::polygon(
                d.vertices.clone().ok_or_else(|| nltrace_core::Error::Domain("polygon needs 'vertices'".into()))?,
            ),
            "hypograph" => {
                let xs = d.profile_x.clone().ok_or_else(|| nltrace_core::Error::Domain("hypograph needs 'profile_x'".into()))?;
                let zs = d.profile_z.clone().ok_or_else(|| nltrace_core::Error::Domain("hypograph needs 'profile_z'".into()))?;
                DomainSpec::hypograph(Profile::new(xs, zs)?, need(d.half_width, "half_width")?, need(d.height, "height")?)
            }
            other => Err(nltrace_core::Error::Domain(format!("unknown domain kind '{other}'"))),
        }
    }

    pub fn kernel_params(&self) -> nltrace_core::Result<KernelParams> {
        let p = &self.params;
        let d = match self.domain.kind.as_str() {
            "interval" => 1,
            "strip" => self.domain.d.unwrap_or(2),
            _ => 2,
        };
        KernelParams::new(d, p.s.unwrap_or(0.8), p.p.unwrap_or(1.5), p.theta.unwrap_or(0.5))
    }

    pub fn resolution(&self) -> Resolution {
        let def = Resolution::default();
        let m = &self.mesh;
        let cuts = m.cuts.clone().unwrap_or(def.cuts);
        let finest = cuts.iter().copied().fold(f64::INFINITY, f64::min);
        let mut mesh = MeshConfig::new(m.target_h.unwrap_or(def.mesh.target_h), finest, m.rho.unwrap_or(def.mesh.rho));
        mesh.max_cells = m.max_cells.unwrap_or(def.mesh.max_cells);
        Resolution { mesh, cuts, levels: m.levels.clone().unwrap_or(def.levels) }
    }

    pub fn families(&self) -> nltrace_core::Result<Option<Vec<FunctionFamily>>> {
        self.family
            .functions
            .as_ref()
            .map(|fs| fs.iter().map(|f| FunctionFamily::parse(f)).collect())
            .transpose()
    }

    pub fn psor_options(&self) -> PsorOptions {
        let d = PsorOptions::default();
        PsorOptions {
            omega: self.solver.omega.unwrap_or(d.omega),
            tol: self.solver.tol.unwrap_or(d.tol),
            max_iter: self.solver.max_iter.unwrap_or(d.max_iter),
        }
    }

    pub fn descent_options(&self) -> DescentOptions {
        let d = DescentOptions::default();
        DescentOptions { tol: self.solver.tol.unwrap_or(d.tol), max_iter: self.solver.max_iter.unwrap_or(d.max_iter) }
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.as_ref().is_some_and(|f| f.iter().any(|x| x == format))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("resolved config serializes")
    }
}
