use nalgebra::{Matrix3, Vector3};

use super::{neighbor_samples, NeighborSample, WeightScheme};
use crate::calculus;
use crate::estimate::{CurvatureResult, EstimateError, Method};
use crate::gauss::{is_umbilic, TangentBasis};
use crate::linalg::{canonical_sign, sym_eigen2};
use crate::mesh::TriMesh;

/// The weighted sum `B = Σ w_i k_n(t_i) t_i t_iᵀ` and its tangent-plane
/// eigen-structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaubinMatrix {
    pub b: Matrix3<f64>,
    /// Tangent-plane eigenvalues, `m1 >= m2`.
    pub m1: f64,
    pub m2: f64,
    /// Unit eigenvectors for `m1` and `m2`.
    pub t1: Vector3<f64>,
    pub t2: Vector3<f64>,
    /// `|B n| / |B|_F`, zero when `B` vanishes.
    pub residual: f64,
}

/// `κ1 = 3 m1 - m2`, `κ2 = 3 m2 - m1`.
pub fn kappas_from_taubin(m1: f64, m2: f64) -> (f64, f64) {
    (3.0 * m1 - m2, 3.0 * m2 - m1)
}

/// Inverse of [`kappas_from_taubin`].
pub fn taubin_from_kappas(kappa1: f64, kappa2: f64) -> (f64, f64) {
    ((3.0 * kappa1 + kappa2) / 8.0, (3.0 * kappa2 + kappa1) / 8.0)
}

pub fn taubin_from_samples(
    samples: &[NeighborSample],
    normal: &Vector3<f64>,
) -> Result<TaubinMatrix, EstimateError> {
    let basis = TangentBasis::from_normal(normal)?;
    let b: Matrix3<f64> = samples
        .iter()
        .map(|s| (s.weight * s.kn) * s.t * s.t.transpose())
        .sum();
    let e = [basis.e1, basis.e2];
    let block = |i: usize, j: usize| e[i].dot(&(b * e[j]));
    let eig = sym_eigen2(block(0, 0), 0.5 * (block(0, 1) + block(1, 0)), block(1, 1));
    let frob = b.norm();
    let residual = if frob > 0.0 {
        (b * basis.n).norm() / frob
    } else {
        0.0
    };
    Ok(TaubinMatrix {
        b,
        m1: eig.max.0,
        m2: eig.min.0,
        t1: basis.lift(eig.max.1.x, eig.max.1.y),
        t2: basis.lift(eig.min.1.x, eig.min.1.y),
        residual,
    })
}

/// Taubin estimate at `v` using the normal that matches the weight scheme:
/// area-weighted for [`WeightScheme::Area`], centroid-weighted otherwise.
pub fn taubin_estimate(
    mesh: &TriMesh,
    v: usize,
    scheme: WeightScheme,
) -> Result<CurvatureResult, EstimateError> {
    let normal = match scheme {
        WeightScheme::Area => calculus::area_weighted_normal(mesh, v)?,
        WeightScheme::Centroid => calculus::vertex_normal(mesh, v)?,
    };
    taubin_with_normal(mesh, v, &normal, scheme)
}

pub fn taubin_with_normal(
    mesh: &TriMesh,
    v: usize,
    normal: &Vector3<f64>,
    scheme: WeightScheme,
) -> Result<CurvatureResult, EstimateError> {
    let count = mesh.neighbors(v).len();
    if count < 3 {
        return Err(EstimateError::TooFewNeighbors { vertex: v, count });
    }
    let samples = neighbor_samples(mesh, v, normal, scheme)?;
    let tm = taubin_from_samples(&samples, normal)?;
    let (kappa1, kappa2) = kappas_from_taubin(tm.m1, tm.m2);
    Ok(CurvatureResult {
        gaussian: kappa1 * kappa2,
        mean: 0.5 * (kappa1 + kappa2),
        kappa1,
        kappa2,
        dir1: canonical_sign(tm.t1),
        dir2: canonical_sign(tm.t2),
        method: match scheme {
            WeightScheme::Area => Method::TaubinArea,
            WeightScheme::Centroid => Method::TaubinCentroid,
        },
        boundary: mesh.is_boundary(v),
        degraded: false,
        umbilic: is_umbilic(kappa1, kappa2),
        asymmetry: 0.0,
    })
}
