//! Curvature from the differential of the discrete Gauss map.
//!
//! Each component of the vertex normal field is a function on the vertices,
//! so its piecewise-linear gradient is defined. Stacking the three gradients
//! gives a 3x3 estimate of `dN`; restricted to an orthonormal tangent basis
//! `{e1, e2}` at the vertex it becomes the 2x2 matrix `a_ij = <e_i, dN e_j>`.
//! Then `K = det A`, `H = -tr A / 2`, and the eigenvalues of `A` are `-κ1`,
//! `-κ2`.
//!
//! Sign convention: on the unit sphere with outward normals `dN` is the
//! identity on the tangent plane, so `κ1 = κ2 = -1` and `H = -1`.

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;

use crate::calculus::{self, CalculusError};
use crate::estimate::{CurvatureResult, EstimateError, Method, NormalField};
use crate::linalg::{canonical_sign, sym_eigen2};
use crate::mesh::TriMesh;

/// Accepted deviation of a normal from unit length.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Principal curvatures closer than this (relative to `max(1, |κ1|)`) make
/// the principal directions indeterminate.
pub const UMBILIC_TOLERANCE: f64 = 1e-9;

/// Right-handed orthonormal frame `(e1, e2, n)` at a vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentBasis {
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub n: Vector3<f64>,
}

impl TangentBasis {
    /// Deterministic frame around `normal`: the coordinate axis with the
    /// smallest `|n_k|` (lowest index on ties), made orthogonal to `n`, is
    /// `e1`, and `e2 = n × e1`.
    pub fn from_normal(normal: &Vector3<f64>) -> Result<Self, EstimateError> {
        let len = normal.norm();
        if !((len - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(EstimateError::NonUnitNormal(len));
        }
        let n = normal / len;
        let mut axis = 0;
        for k in 1..3 {
            if n[k].abs() < n[axis].abs() {
                axis = k;
            }
        }
        let mut e1 = Vector3::zeros();
        e1[axis] = 1.0;
        e1 -= e1.dot(&n) * n;
        e1.normalize_mut();
        let e2 = n.cross(&e1);
        Ok(Self { e1, e2, n })
    }

    /// The same tangent plane with `e1, e2` rotated by `angle` about `n`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            e1: c * self.e1 + s * self.e2,
            e2: -s * self.e1 + c * self.e2,
            n: self.n,
        }
    }

    /// Maps tangent coordinates to a 3D vector.
    pub fn lift(&self, x: f64, y: f64) -> Vector3<f64> {
        x * self.e1 + y * self.e2
    }
}

/// `dN` restricted to a tangent basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOperator2 {
    pub a: Matrix2<f64>,
    pub basis: TangentBasis,
    pub symmetrized: bool,
    /// `|a_12 - a_21|` of the matrix before symmetrization.
    pub asymmetry: f64,
}

/// Centroid-weighted unit normals at every vertex. Fails on the first
/// vertex whose normal is undefined.
pub fn gauss_map_field(mesh: &TriMesh) -> Result<NormalField, EstimateError> {
    let normals = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| calculus::vertex_normal(mesh, v))
        .collect::<Result<Vec<_>, CalculusError>>()?;
    NormalField::from_vectors(mesh, normals)
}

/// `dN` at `v`: column `c` is the vertex gradient of normal component `c`.
pub fn estimate_dn(
    mesh: &TriMesh,
    field: &NormalField,
    v: usize,
) -> Result<Matrix3<f64>, EstimateError> {
    field.check_star(mesh, v)?;
    Ok(calculus::vertex_gradient_vec3_by(mesh, v, |w| {
        field.get(w).expect("star normals checked")
    })?)
}

pub fn project_shape_operator(
    dn: &Matrix3<f64>,
    basis: &TangentBasis,
    symmetrize: bool,
) -> ShapeOperator2 {
    let e = [basis.e1, basis.e2];
    let a = Matrix2::from_fn(|i, j| e[i].dot(&(dn * e[j])));
    let asymmetry = (a[(0, 1)] - a[(1, 0)]).abs();
    ShapeOperator2 {
        a: if symmetrize { symmetric_part(&a) } else { a },
        basis: *basis,
        symmetrized: symmetrize,
        asymmetry,
    }
}

fn symmetric_part(a: &Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (a[(0, 1)] + a[(1, 0)]);
    Matrix2::new(a[(0, 0)], off, off, a[(1, 1)])
}

/// K, H, principal curvatures and directions of a shape operator. A
/// non-symmetrized operator is replaced by its symmetric part first.
pub fn curvatures_from_shape_operator(op: &ShapeOperator2) -> CurvatureResult {
    let a = if op.symmetrized {
        op.a
    } else {
        symmetric_part(&op.a)
    };
    let gaussian = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let mean = -0.5 * (a[(0, 0)] + a[(1, 1)]);
    let eig = sym_eigen2(a[(0, 0)], a[(0, 1)], a[(1, 1)]);
    // κ = -λ, so the largest κ belongs to the smallest eigenvalue.
    let (kappa1, kappa2) = (-eig.min.0, -eig.max.0);
    let dir1 = canonical_sign(op.basis.lift(eig.min.1.x, eig.min.1.y));
    let dir2 = canonical_sign(op.basis.lift(eig.max.1.x, eig.max.1.y));
    CurvatureResult {
        gaussian,
        mean,
        kappa1,
        kappa2,
        dir1,
        dir2,
        method: Method::GaussGrad,
        boundary: false,
        degraded: false,
        umbilic: is_umbilic(kappa1, kappa2),
        asymmetry: op.asymmetry,
    }
}

pub(crate) fn is_umbilic(kappa1: f64, kappa2: f64) -> bool {
    (kappa1 - kappa2).abs() < UMBILIC_TOLERANCE * kappa1.abs().max(1.0)
}

/// Full pipeline at one vertex given the Gauss map.
pub fn gauss_grad_at(
    mesh: &TriMesh,
    field: &NormalField,
    v: usize,
) -> Result<CurvatureResult, EstimateError> {
    let normal = field.at(v)?;
    let basis = TangentBasis::from_normal(&normal)?;
    let dn = estimate_dn(mesh, field, v)?;
    let op = project_shape_operator(&dn, &basis, true);
    let mut result = curvatures_from_shape_operator(&op);
    result.boundary = mesh.is_boundary(v);
    Ok(result)
}
