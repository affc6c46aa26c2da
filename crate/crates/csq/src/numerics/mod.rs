//! Chart-level quadrature, domain truncation, finite differences and mesh
//! generation shared by the other modules.

pub mod adaptive;
pub mod diff;
pub mod gauss;
pub mod mesh;
pub mod partition;

pub use adaptive::{
    integrate_chart, integrate_disk_vec, integrate_interval, integrate_rect_vec, AdaptiveOpts,
    QuadResult, TruncatedDomain,
};
pub use diff::mixed_second_difference;
pub use gauss::{gauss_legendre, QuadratureRule};
pub use mesh::TriangleMesh;
pub use partition::Partition;
