//! Per-vertex curvature estimation on triangle meshes.

pub mod baselines;
pub mod bench;
pub mod calculus;
pub mod cli;
pub mod estimate;
pub mod gauss;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod shapes;

pub use estimate::{estimate_curvatures, CurvatureResult, EstimateError, Method, NormalField};
pub use mesh::{MeshError, TriMesh};
