use super::report::{aitken, Extrapolated, Resolution};
use crate::error::Result;
use crate::geometry::{build_graded_mesh, DomainSpec, QuadratureMesh};
use crate::kernel::KernelParams;
use crate::norms::{hardy_contributions, ladder_sums, lp_power, nonlocal_contributions, FunctionFamily, GridFunction};

pub(crate) struct Level {
    pub mesh: QuadratureMesh,
    pub us: Vec<GridFunction>,
}

impl Level {
    pub fn build(domain: &DomainSpec, params: &KernelParams, families: &[FunctionFamily], res: &Resolution, level: u32) -> Result<Self> {
        let mesh = build_graded_mesh(domain, params, &res.mesh_at(level))?;
        let us = families.iter().map(|f| GridFunction::from_family(&mesh, f)).collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, us })
    }

    pub fn refs(&self) -> Vec<&GridFunction> {
        self.us.iter().collect()
    }

    pub fn ledger(&self, res: &Resolution) -> f64 {
        self.mesh.excluded_measure(res.finest_cut())
    }

    /// Extrapolated |u|^p_{𝔚_ϑ} for every function, sharing one traversal.
    pub fn seminorms(&self, params: &KernelParams, res: &Resolution) -> Result<Vec<Extrapolated>> {
        self.seminorms_of(&self.refs(), params, res)
    }

    pub fn seminorms_of(&self, us: &[&GridFunction], params: &KernelParams, res: &Resolution) -> Result<Vec<Extrapolated>> {
        let c = nonlocal_contributions(&self.mesh, us, params, res.finest_cut())?;
        Ok(c.iter().map(|v| aitken(&ladder_sums(&self.mesh, v, &res.cuts))).collect())
    }

    pub fn hardy(&self, params: &KernelParams, res: &Resolution, theorem: &str) -> Result<Vec<Extrapolated>> {
        self.us
            .iter()
            .map(|u| {
                let c = hardy_contributions(&self.mesh, u, params, theorem)?;
                Ok(aitken(&ladder_sums(&self.mesh, &c, &res.cuts)))
            })
            .collect()
    }

    pub fn lp(&self, p: f64) -> Result<Vec<f64>> {
        self.us.iter().map(|u| lp_power(&self.mesh, u, p)).collect()
    }
}
