//! Normal-curvature estimators used as comparison baselines.
//!
//! Both methods sample the normal curvature along each edge leaving a vertex
//! with the chord/circle estimate `k_n(t_i) = 2 <v_i - v, N> / |v_i - v|²`,
//! where `t_i` is the edge projected onto the tangent plane. Taubin's method
//! integrates those samples into a 3x3 matrix; Chen–Schmitt fits the Euler
//! formula to them by least squares.

mod chen_schmitt;
mod taubin;

pub use chen_schmitt::{
    chen_schmitt_estimate, chen_schmitt_with_normal, fit_euler, EulerFit, EULER_MAX_CONDITION,
};
pub use taubin::{
    kappas_from_taubin, taubin_estimate, taubin_from_kappas, taubin_from_samples,
    taubin_with_normal, TaubinMatrix,
};

use nalgebra::Vector3;

use crate::calculus::{self, CalculusError};
use crate::estimate::EstimateError;
use crate::gauss;
use crate::mesh::TriMesh;

/// Tangent projections shorter than this fraction of the edge are rejected.
pub const PROJECTION_EPS: f64 = 1e-12;

/// How per-neighbor weights are derived from the faces sharing each edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// Sum of the areas of the faces containing the edge.
    Area,
    /// Sum of the centroid weights of the faces containing the edge.
    Centroid,
}

/// One edge of a vertex star seen as a normal-curvature sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborSample {
    pub neighbor: usize,
    /// Unit tangent direction `t_i`.
    pub t: Vector3<f64>,
    /// Estimated normal curvature along `t`.
    pub kn: f64,
    pub weight: f64,
}

/// `κ1 cos²θ + κ2 sin²θ`.
pub fn euler_normal_curvature(kappa1: f64, kappa2: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    kappa1 * c * c + kappa2 * s * s
}

/// Normal-curvature samples for every neighbor of `v`, weights summing to 1.
pub fn neighbor_samples(
    mesh: &TriMesh,
    v: usize,
    normal: &Vector3<f64>,
    scheme: WeightScheme,
) -> Result<Vec<NeighborSample>, EstimateError> {
    let len = normal.norm();
    if !((len - 1.0).abs() <= gauss::UNIT_TOLERANCE) {
        return Err(EstimateError::NonUnitNormal(len));
    }
    if mesh.incident_faces(v).is_empty() {
        return Err(CalculusError::IsolatedVertex(v).into());
    }
    let centroid = match scheme {
        WeightScheme::Centroid => Some(calculus::centroid_weights(mesh, v)?),
        WeightScheme::Area => None,
    };
    let p = mesh.vertex(v);
    let mut samples = Vec::with_capacity(mesh.neighbors(v).len());
    for &w in mesh.neighbors(v) {
        let d = mesh.vertex(w) - p;
        let height = d.dot(normal);
        let proj = d - height * normal;
        let proj_len = proj.norm();
        if !(proj_len >= PROJECTION_EPS * d.norm()) || proj_len == 0.0 {
            return Err(EstimateError::DegenerateProjection {
                vertex: v,
                neighbor: w,
            });
        }
        let weight = match &centroid {
            Some(cw) => mesh
                .faces_on_edge(v, w)
                .filter_map(|f| cw.weight_of(f))
                .sum(),
            None => mesh
                .faces_on_edge(v, w)
                .map(|f| mesh.face_geometry(f).area)
                .sum(),
        };
        samples.push(NeighborSample {
            neighbor: w,
            t: proj / proj_len,
            kn: 2.0 * height / d.norm_squared(),
            weight,
        });
    }
    let total: f64 = samples.iter().map(|s| s.weight).sum();
    for s in &mut samples {
        s.weight /= total;
    }
    Ok(samples)
}
