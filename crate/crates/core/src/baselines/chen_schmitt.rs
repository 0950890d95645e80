use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use super::{neighbor_samples, WeightScheme};
use crate::calculus;
use crate::estimate::{CurvatureResult, EstimateError, Method};
use crate::gauss::{is_umbilic, TangentBasis};
use crate::linalg::canonical_sign;
use crate::mesh::TriMesh;

/// Normal-equation matrices with a larger condition number are rejected.
pub const EULER_MAX_CONDITION: f64 = 1e12;

/// Angles closer than this (mod π) count as one direction.
const DISTINCT_ANGLE_EPS: f64 = 1e-9;

/// Least-squares fit of `k_n(θ) = C1 cos²θ + C2 cosθ sinθ + C3 sin²θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerFit {
    pub c: [f64; 3],
    /// Angle of the first principal direction measured from `r1`.
    pub theta0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub frame: (Vector3<f64>, Vector3<f64>),
    /// Root-mean-square misfit of the samples.
    pub residual: f64,
    pub umbilic: bool,
}

impl EulerFit {
    /// Principal directions `cos θ0 r1 + sin θ0 r2` and its right-angle
    /// rotation.
    pub fn directions(&self) -> (Vector3<f64>, Vector3<f64>) {
        let (r1, r2) = self.frame;
        let (s, c) = self.theta0.sin_cos();
        (c * r1 + s * r2, -s * r1 + c * r2)
    }
}

fn distinct_directions(angles: &[f64]) -> usize {
    let mut reduced: Vec<f64> = angles.iter().map(|a| a.rem_euclid(PI)).collect();
    reduced.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for &a in &reduced {
        if a - last > DISTINCT_ANGLE_EPS {
            count += 1;
            last = a;
        }
    }
    // 0 and π - ε are the same direction.
    if count > 1 && reduced[0] + PI - reduced[reduced.len() - 1] <= DISTINCT_ANGLE_EPS {
        count -= 1;
    }
    count
}

/// Fits the Euler model to samples `kn[i]` at angles `angles[i]` measured in
/// `frame`.
pub fn fit_euler(
    angles: &[f64],
    kn: &[f64],
    frame: (Vector3<f64>, Vector3<f64>),
    vertex: usize,
) -> Result<EulerFit, EstimateError> {
    debug_assert_eq!(angles.len(), kn.len());
    if angles.len() < 3 {
        return Err(EstimateError::TooFewNeighbors {
            vertex,
            count: angles.len(),
        });
    }
    if distinct_directions(angles) < 3 {
        return Err(EstimateError::RankDeficientFit {
            vertex,
            condition: f64::INFINITY,
        });
    }
    let rows: Vec<Vector3<f64>> = angles
        .iter()
        .map(|t| {
            let (s, c) = t.sin_cos();
            Vector3::new(c * c, c * s, s * s)
        })
        .collect();
    let ata: Matrix3<f64> = rows.iter().map(|r| r * r.transpose()).sum();
    let atb: Vector3<f64> = rows.iter().zip(kn).map(|(r, &k)| r * k).sum();

    let eig = ata.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= EULER_MAX_CONDITION) {
        return Err(EstimateError::RankDeficientFit { vertex, condition });
    }
    let sol = ata
        .cholesky()
        .map(|ch| ch.solve(&atb))
        .ok_or(EstimateError::RankDeficientFit { vertex, condition })?;
    let c = [sol.x, sol.y, sol.z];

    let sum = c[0] + c[2];
    let diff = c[0] - c[2];
    let spread = diff.hypot(c[1]);
    let kappa1 = 0.5 * (sum + spread);
    let kappa2 = 0.5 * (sum - spread);
    let umbilic = is_umbilic(kappa1, kappa2);
    let theta0 = if umbilic { 0.0 } else { 0.5 * c[1].atan2(diff) };
    let sq: f64 = rows
        .iter()
        .zip(kn)
        .map(|(r, &k)| (r.dot(&sol) - k).powi(2))
        .sum();
    Ok(EulerFit {
        c,
        theta0,
        kappa1,
        kappa2,
        frame,
        residual: (sq / angles.len() as f64).sqrt(),
        umbilic,
    })
}

/// Chen–Schmitt estimate at `v` using the centroid-weighted vertex normal.
pub fn chen_schmitt_estimate(mesh: &TriMesh, v: usize) -> Result<CurvatureResult, EstimateError> {
    let normal = calculus::vertex_normal(mesh, v)?;
    chen_schmitt_with_normal(mesh, v, &normal)
}

pub fn chen_schmitt_with_normal(
    mesh: &TriMesh,
    v: usize,
    normal: &Vector3<f64>,
) -> Result<CurvatureResult, EstimateError> {
    let count = mesh.neighbors(v).len();
    if count < 3 {
        return Err(EstimateError::TooFewNeighbors { vertex: v, count });
    }
    let basis = TangentBasis::from_normal(normal)?;
    // The fit is unweighted; the scheme only affects the discarded weights.
    let samples = neighbor_samples(mesh, v, normal, WeightScheme::Area)?;
    let angles: Vec<f64> = samples
        .iter()
        .map(|s| s.t.dot(&basis.e2).atan2(s.t.dot(&basis.e1)))
        .collect();
    let kn: Vec<f64> = samples.iter().map(|s| s.kn).collect();
    let fit = fit_euler(&angles, &kn, (basis.e1, basis.e2), v)?;
    let (d1, d2) = fit.directions();
    Ok(CurvatureResult {
        gaussian: fit.kappa1 * fit.kappa2,
        mean: 0.5 * (fit.kappa1 + fit.kappa2),
        kappa1: fit.kappa1,
        kappa2: fit.kappa2,
        dir1: canonical_sign(d1),
        dir2: canonical_sign(d2),
        method: Method::ChenSchmitt,
        boundary: mesh.is_boundary(v),
        degraded: false,
        umbilic: fit.umbilic,
        asymmetry: 0.0,
    })
}
