use std::fmt;
use std::sync::Arc;

use super::family::FunctionFamily;
use crate::error::{Error, Result};
use crate::geometry::{Point, QuadratureMesh};
use crate::sum::par_map;

pub type Source = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Nodal values of a scalar field on one mesh, with its trace on Γ when known.
#[derive(Clone)]
pub struct GridFunction {
    pub mesh_id: u64,
    pub values: Vec<f64>,
    pub boundary_values: Option<Vec<f64>>,
    pub family_tag: String,
    pub seed: Option<u64>,
    source: Option<Source>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("mesh_id", &self.mesh_id)
            .field("len", &self.values.len())
            .field("family_tag", &self.family_tag)
            .field("seed", &self.seed)
            .finish()
    }
}

impl GridFunction {
    pub fn from_family(mesh: &QuadratureMesh, family: &FunctionFamily) -> Result<Self> {
        family.validate()?;
        let domain = mesh.domain.clone();
        let fam = family.clone();
        let mut g = Self::from_fn(mesh, &family.to_string(), move |x| fam.eval(&domain, x));
        g.seed = family.seed();
        Ok(g)
    }

    /// Samples `f` at the nodes and on Γ, keeping it for off-node evaluation.
    pub fn from_fn<F>(mesh: &QuadratureMesh, tag: &str, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        let source: Source = Arc::new(f);
        let values = par_map(mesh.len(), |i| source(&mesh.nodes[i]));
        let boundary_values = mesh.boundary.points.iter().map(|x| source(x)).collect();
        Self {
            mesh_id: mesh.id,
            values,
            boundary_values: Some(boundary_values),
            family_tag: tag.to_string(),
            seed: None,
            source: Some(source),
        }
    }

    pub fn from_values(mesh: &QuadratureMesh, values: Vec<f64>, boundary_values: Option<Vec<f64>>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Shape(format!("{} values for a mesh of {} nodes", values.len(), mesh.len())));
        }
        if let Some(b) = &boundary_values {
            if b.len() != mesh.boundary.len() {
                return Err(Error::Shape(format!(
                    "{} boundary values for {} boundary nodes",
                    b.len(),
                    mesh.boundary.len()
                )));
            }
        }
        if values.iter().chain(boundary_values.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Validity("grid function values must be finite".into()));
        }
        Ok(Self { mesh_id: mesh.id, values, boundary_values, family_tag: "values".into(), seed: None, source: None })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    pub fn check_mesh(&self, mesh: &QuadratureMesh) -> Result<()> {
        if self.mesh_id != mesh.id || self.values.len() != mesh.len() {
            return Err(Error::Shape(format!(
                "grid function belongs to mesh {} but mesh {} was given",
                self.mesh_id, mesh.id
            )));
        }
        Ok(())
    }

    /// Value at an arbitrary point: the generating function if known, else the containing cell.
    pub fn eval_at(&self, mesh: &QuadratureMesh, x: &Point) -> f64 {
        match &self.source {
            Some(f) => f(x),
            None => mesh.locate(x).map_or(0.0, |i| self.values[i]),
        }
    }

    pub fn eval_at_source(&self, x: &Point) -> Option<f64> {
        self.source.as_ref().map(|f| f(x))
    }

    pub fn max_abs_trace(&self) -> Option<f64> {
        self.boundary_values.as_ref().map(|b| b.iter().fold(0.0, |m, v| f64::max(m, v.abs())))
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let source = self.source.clone().map(|f| Arc::new(move |x: &Point| lambda * f(x)) as Source);
        Self {
            mesh_id: self.mesh_id,
            values: self.values.iter().map(|v| lambda * v).collect(),
            boundary_values: self.boundary_values.as_ref().map(|b| b.iter().map(|v| lambda * v).collect()),
            family_tag: format!("scale({lambda:?}, {})", self.family_tag),
            seed: self.seed,
            source,
        }
    }

    fn combine(&self, other: &Self, name: &str, op: fn(f64, f64) -> f64) -> Result<Self> {
        if self.mesh_id != other.mesh_id || self.len() != other.len() {
            return Err(Error::Shape("grid functions live on different meshes".into()));
        }
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect::<Vec<_>>();
        let boundary_values = match (&self.boundary_values, &other.boundary_values) {
            (Some(a), Some(b)) => Some(zip(a, b)),
            _ => None,
        };
        let source = match (&self.source, &other.source) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |x: &Point| op(f(x), g(x))) as Source)
            }
            _ => None,
        };
        Ok(Self {
            mesh_id: self.mesh_id,
            values: zip(&self.values, &other.values),
            boundary_values,
            family_tag: format!("{name}({}, {})", self.family_tag, other.family_tag),
            seed: self.seed.or(other.seed),
            source,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, "sum", |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, "prod", |a, b| a * b)
    }
}
