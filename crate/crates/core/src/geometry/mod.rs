mod boundary;
mod clip;
mod domain;
mod mesh;
mod overlap;
mod pullback;
mod tree;

pub use boundary::BoundaryMesh;
pub use domain::{dist, point_from, polygon_contains, DomainSpec, Point, Profile, TangentialBc};
pub use mesh::{build_graded_mesh, build_uniform_mesh, Grading, MeshConfig, NeighborIndex, QuadratureMesh};
pub use pullback::hypograph_pullback;
pub use overlap::{box_ball_overlap, disc_rect_area, interval_overlap};

pub fn distance_to_boundary(domain: &DomainSpec, x: &[f64]) -> crate::error::Result<f64> {
    domain.distance_to_boundary(x)
}
