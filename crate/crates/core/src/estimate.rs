//! Per-vertex curvature records and the mesh-level estimation driver.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{self, WeightScheme};
use crate::calculus::{self, CalculusError, VertexFunction};
use crate::gauss;
use crate::mesh::TriMesh;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("mesh has no vertices")]
    EmptyMesh,
    #[error("normal has length {0}, expected 1")]
    NonUnitNormal(f64),
    #[error("no normal available at vertex {0}")]
    MissingNormal(usize),
    #[error("normal field has {got} entries for a mesh with {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("vertex {vertex} has {count} neighbor samples, at least 3 are needed")]
    TooFewNeighbors { vertex: usize, count: usize },
    #[error("neighbor {neighbor} of vertex {vertex} projects to zero on the tangent plane")]
    DegenerateProjection { vertex: usize, neighbor: usize },
    #[error("normal-curvature fit at vertex {vertex} is rank deficient (condition {condition:e})")]
    RankDeficientFit { vertex: usize, condition: f64 },
}

/// Estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Differential of the centroid-weighted Gauss map.
    GaussGrad,
    /// Taubin's integral method with area weights.
    TaubinArea,
    /// Taubin's integral method with centroid weights.
    TaubinCentroid,
    /// Chen–Schmitt least-squares fit of the Euler formula.
    ChenSchmitt,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::GaussGrad,
        Method::TaubinArea,
        Method::TaubinCentroid,
        Method::ChenSchmitt,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::GaussGrad => "gauss-grad",
            Method::TaubinArea => "taubin-area",
            Method::TaubinCentroid => "taubin-centroid",
            Method::ChenSchmitt => "chen-schmitt",
        }
    }

    /// How the vertex normals this method consumes are averaged.
    pub fn normal_weighting(self) -> NormalWeighting {
        match self {
            Method::TaubinArea => NormalWeighting::Area,
            _ => NormalWeighting::Centroid,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method `{0}`")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| UnknownMethod(s.to_owned()))
    }
}

/// Curvature estimate at one vertex.
///
/// `kappa1 >= kappa2`; `K = κ1 κ2` and `H = (κ1 + κ2) / 2` up to rounding.
/// Degraded vertices carry NaN in every numeric field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureResult {
    pub gaussian: f64,
    pub mean: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub dir1: Vector3<f64>,
    pub dir2: Vector3<f64>,
    pub method: Method,
    pub boundary: bool,
    pub degraded: bool,
    /// Principal curvatures coincide; the directions are arbitrary.
    pub umbilic: bool,
    /// Antisymmetric residual `|a_12 - a_21|` of the estimated shape
    /// operator (gauss-grad only, zero otherwise).
    pub asymmetry: f64,
}

impl CurvatureResult {
    pub fn degraded(method: Method, boundary: bool) -> Self {
        let nan3 = Vector3::repeat(f64::NAN);
        Self {
            gaussian: f64::NAN,
            mean: f64::NAN,
            kappa1: f64::NAN,
            kappa2: f64::NAN,
            dir1: nan3,
            dir2: nan3,
            method,
            boundary,
            degraded: true,
            umbilic: false,
            asymmetry: f64::NAN,
        }
    }
}

/// How face normals are averaged into vertex normals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalWeighting {
    Centroid,
    Area,
}

/// Unit normals per vertex. Entries may be missing where the normal is
/// undefined; estimators touching such a vertex fail for that vertex only.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    normals: Vec<Option<Vector3<f64>>>,
}

impl NormalField {
    /// Field from explicit vectors, each of unit length within 1e-9.
    pub fn from_vectors(mesh: &TriMesh, normals: Vec<Vector3<f64>>) -> Result<Self, EstimateError> {
        if normals.len() != mesh.n_vertices() {
            return Err(EstimateError::FieldLength {
                expected: mesh.n_vertices(),
                got: normals.len(),
            });
        }
        if let Some(bad) = normals
            .iter()
            .find(|n| !((n.norm() - 1.0).abs() <= gauss::UNIT_TOLERANCE))
        {
            return Err(EstimateError::NonUnitNormal(bad.norm()));
        }
        Ok(Self {
            normals: normals.into_iter().map(Some).collect(),
        })
    }

    /// Estimated vertex normals, leaving undefined ones empty.
    pub fn estimate(mesh: &TriMesh, weighting: NormalWeighting) -> Self {
        let normals = (0..mesh.n_vertices())
            .into_par_iter()
            .map(|v| match weighting {
                NormalWeighting::Centroid => calculus::vertex_normal(mesh, v).ok(),
                NormalWeighting::Area => calculus::area_weighted_normal(mesh, v).ok(),
            })
            .collect();
        Self { normals }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<Vector3<f64>> {
        self.normals.get(v).copied().flatten()
    }

    pub fn at(&self, v: usize) -> Result<Vector3<f64>, EstimateError> {
        self.get(v).ok_or(EstimateError::MissingNormal(v))
    }

    /// The three coordinate functions `n_1, n_2, n_3`. Requires every
    /// normal to be present.
    pub fn components(&self, mesh: &TriMesh) -> Result<[VertexFunction; 3], EstimateError> {
        let vectors = (0..self.len())
            .map(|v| self.at(v))
            .collect::<Result<Vec<_>, _>>()?;
        let component =
            |c: usize| VertexFunction::new(mesh, vectors.iter().map(|n| n[c]).collect());
        Ok([component(0)?, component(1)?, component(2)?])
    }

    /// Fails unless the normals at `v` and all its neighbors are present.
    pub(crate) fn check_star(&self, mesh: &TriMesh, v: usize) -> Result<(), EstimateError> {
        if self.len() != mesh.n_vertices() {
            return Err(EstimateError::FieldLength {
                expected: mesh.n_vertices(),
                got: self.len(),
            });
        }
        for &w in std::iter::once(&v).chain(mesh.neighbors(v)) {
            self.at(w)?;
        }
        Ok(())
    }
}

/// Estimate at vertex `v` with the given normals. The baselines only read
/// the normal at `v`.
pub fn estimate_vertex(
    mesh: &TriMesh,
    normals: &NormalField,
    v: usize,
    method: Method,
) -> Result<CurvatureResult, EstimateError> {
    match method {
        Method::GaussGrad => gauss::gauss_grad_at(mesh, normals, v),
        Method::TaubinArea => {
            baselines::taubin_with_normal(mesh, v, &normals.at(v)?, WeightScheme::Area)
        }
        Method::TaubinCentroid => {
            baselines::taubin_with_normal(mesh, v, &normals.at(v)?, WeightScheme::Centroid)
        }
        Method::ChenSchmitt => baselines::chen_schmitt_with_normal(mesh, v, &normals.at(v)?),
    }
}

/// Curvature at every vertex. Vertices where any step fails come back
/// flagged `degraded` with NaN values.
pub fn estimate_curvatures(
    mesh: &TriMesh,
    method: Method,
) -> Result<Vec<CurvatureResult>, EstimateError> {
    if mesh.is_empty() {
        return Err(EstimateError::EmptyMesh);
    }
    let normals = NormalField::estimate(mesh, method.normal_weighting());
    Ok(estimate_curvatures_with(mesh, &normals, method))
}

/// Like [`estimate_curvatures`] but with caller-supplied normals.
pub fn estimate_curvatures_with(
    mesh: &TriMesh,
    normals: &NormalField,
    method: Method,
) -> Vec<CurvatureResult> {
    (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            estimate_vertex(mesh, normals, v, method)
                .unwrap_or_else(|_| CurvatureResult::degraded(method, mesh.is_boundary(v)))
        })
        .collect()
}
