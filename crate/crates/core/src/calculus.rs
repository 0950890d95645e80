//! Piecewise-linear calculus on triangle meshes.
//!
//! A function given by its values at the vertices extends affinely over each
//! face. Its gradient on a face is the unique in-plane vector whose inner
//! products with the two edges leaving a corner reproduce the value
//! differences along those edges. A vertex gradient is the convex
//! combination of the face gradients around the vertex under centroid
//! weights, `w_f ∝ 1 / |G_f - v|²`. The same weights average face normals
//! into vertex normals.

use nalgebra::{Matrix2, Matrix3, Point3, Vector2, Vector3};
use thiserror::Error;

use crate::mesh::TriMesh;

/// Slack allowed on barycentric coordinates in point-in-face tests.
pub const BARY_EPS: f64 = 1e-10;

/// Below this norm a weighted sum of unit face normals counts as cancelled.
pub const NORMAL_SUM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("vertex {0} has no incident faces")]
    IsolatedVertex(usize),
    #[error("weighted face normals cancel at vertex {0}")]
    ZeroNormalSum(usize),
    #[error("Gram matrix of face {0} is singular")]
    SingularGramMatrix(usize),
    #[error("point lies outside face {face} (barycentric {bary:?})")]
    PointOutsideFace { face: usize, bary: [f64; 3] },
    #[error("vertex {vertex} is not a corner of face {face}")]
    VertexNotInFace { vertex: usize, face: usize },
    #[error("function has {got} values for a mesh with {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("function value at vertex {0} is not finite")]
    NonFiniteValue(usize),
}

/// A scalar function on the vertices of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    pub fn new(mesh: &TriMesh, values: Vec<f64>) -> Result<Self, CalculusError> {
        if values.len() != mesh.n_vertices() {
            return Err(CalculusError::LengthMismatch {
                expected: mesh.n_vertices(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(CalculusError::NonFiniteValue(v));
        }
        Ok(Self(values))
    }

    /// Samples `f` at every vertex position.
    pub fn from_positions<F>(mesh: &TriMesh, f: F) -> Result<Self, CalculusError>
    where
        F: Fn(&Point3<f64>) -> f64,
    {
        Self::new(mesh, mesh.vertices().iter().map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check_len(&self, mesh: &TriMesh) -> Result<(), CalculusError> {
        if self.0.len() == mesh.n_vertices() {
            Ok(())
        } else {
            Err(CalculusError::LengthMismatch {
                expected: mesh.n_vertices(),
                got: self.0.len(),
            })
        }
    }
}

impl std::ops::Index<usize> for VertexFunction {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}

/// Centroid weights of the faces around one vertex, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidWeights {
    pub vertex: usize,
    /// `(face, weight)` in the order of the vertex's incident faces.
    pub entries: Vec<(usize, f64)>,
}

impl CentroidWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn weight_of(&self, face: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|(f, _)| *f == face)
            .map(|&(_, w)| w)
    }
}

/// A face seen from one of its corners: the two outgoing edges and the
/// inverse of their Gram matrix.
struct CornerFrame {
    j: usize,
    k: usize,
    edge_j: Vector3<f64>,
    edge_k: Vector3<f64>,
    gram_inv: Matrix2<f64>,
}

impl CornerFrame {
    fn new(mesh: &TriMesh, f: usize, at: usize) -> Result<Self, CalculusError> {
        let tri = mesh.face(f);
        let pos = tri
            .iter()
            .position(|&c| c == at)
            .ok_or(CalculusError::VertexNotInFace {
                vertex: at,
                face: f,
            })?;
        let (j, k) = (tri[(pos + 1) % 3], tri[(pos + 2) % 3]);
        let origin = mesh.vertex(at);
        let edge_j = mesh.vertex(j) - origin;
        let edge_k = mesh.vertex(k) - origin;
        let g11 = edge_j.dot(&edge_j);
        let g12 = edge_j.dot(&edge_k);
        let g22 = edge_k.dot(&edge_k);
        let det = g11 * g22 - g12 * g12;
        let eps = mesh.area_epsilon();
        if !(det >= eps * eps) || det == 0.0 {
            return Err(CalculusError::SingularGramMatrix(f));
        }
        let gram_inv = Matrix2::new(g22, -g12, -g12, g11) / det;
        Ok(Self {
            j,
            k,
            edge_j,
            edge_k,
            gram_inv,
        })
    }

    /// Edge coefficients `(a, b)` of the gradient for value differences
    /// `dj = g(v_j) - g(v_i)` and `dk = g(v_k) - g(v_i)`.
    fn coefficients(&self, dj: f64, dk: f64) -> Vector2<f64> {
        self.gram_inv * Vector2::new(dj, dk)
    }

    fn gradient(&self, dj: f64, dk: f64) -> Vector3<f64> {
        let ab = self.coefficients(dj, dk);
        self.edge_j * ab.x + self.edge_k * ab.y
    }
}

/// Value at `p` of the piecewise-linear extension of `g` over face `f`.
///
/// Points off the face plane are evaluated at their orthogonal projection.
pub fn evaluate_pl(
    mesh: &TriMesh,
    g: &VertexFunction,
    f: usize,
    p: &Point3<f64>,
) -> Result<f64, CalculusError> {
    g.check_len(mesh)?;
    let [i, _, _] = mesh.face(f);
    let frame = CornerFrame::new(mesh, f, i)?;
    let d = p - mesh.vertex(i);
    let bc = frame.coefficients(d.dot(&frame.edge_j), d.dot(&frame.edge_k));
    let bary = [1.0 - bc.x - bc.y, bc.x, bc.y];
    if bary.iter().any(|&c| c < -BARY_EPS) {
        return Err(CalculusError::PointOutsideFace { face: f, bary });
    }
    Ok(bary[0] * g[i] + bary[1] * g[frame.j] + bary[2] * g[frame.k])
}

/// Gradient of the affine extension of `g` on face `f`, computed from the
/// corner `at`.
pub fn face_gradient(
    mesh: &TriMesh,
    g: &VertexFunction,
    f: usize,
    at: usize,
) -> Result<Vector3<f64>, CalculusError> {
    g.check_len(mesh)?;
    let frame = CornerFrame::new(mesh, f, at)?;
    Ok(frame.gradient(g[frame.j] - g[at], g[frame.k] - g[at]))
}

pub fn centroid_weights(mesh: &TriMesh, v: usize) -> Result<CentroidWeights, CalculusError> {
    let faces = mesh.incident_faces(v);
    if faces.is_empty() {
        return Err(CalculusError::IsolatedVertex(v));
    }
    let p = mesh.vertex(v);
    let mut entries: Vec<(usize, f64)> = faces
        .iter()
        .map(|&f| {
            let d2 = (mesh.face_geometry(f).centroid - p).norm_squared();
            // The centroid is interior to a non-degenerate face.
            debug_assert!(d2 > 0.0);
            (f, 1.0 / d2)
        })
        .collect();
    let total: f64 = entries.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut entries {
        *w /= total;
    }
    Ok(CentroidWeights { vertex: v, entries })
}

/// Centroid-weighted combination of the face gradients of `g` around `v`.
pub fn vertex_gradient(
    mesh: &TriMesh,
    g: &VertexFunction,
    v: usize,
) -> Result<Vector3<f64>, CalculusError> {
    g.check_len(mesh)?;
    let weights = centroid_weights(mesh, v)?;
    let mut grad = Vector3::zeros();
    for (f, w) in weights.iter() {
        let frame = CornerFrame::new(mesh, f, v)?;
        grad += w * frame.gradient(g[frame.j] - g[v], g[frame.k] - g[v]);
    }
    Ok(grad)
}

/// Vertex gradients of the three components of a vector field at once.
/// Column `c` of the result is the gradient of component `c`.
pub fn vertex_gradient_vec3(
    mesh: &TriMesh,
    field: &[Vector3<f64>],
    v: usize,
) -> Result<Matrix3<f64>, CalculusError> {
    if field.len() != mesh.n_vertices() {
        return Err(CalculusError::LengthMismatch {
            expected: mesh.n_vertices(),
            got: field.len(),
        });
    }
    vertex_gradient_vec3_by(mesh, v, |w| field[w])
}

/// [`vertex_gradient_vec3`] reading field values through `value`, which is
/// only called for `v` and its neighbors.
pub fn vertex_gradient_vec3_by<F>(
    mesh: &TriMesh,
    v: usize,
    value: F,
) -> Result<Matrix3<f64>, CalculusError>
where
    F: Fn(usize) -> Vector3<f64>,
{
    let weights = centroid_weights(mesh, v)?;
    let at_v = value(v);
    let mut jac = Matrix3::zeros();
    for (f, w) in weights.iter() {
        let frame = CornerFrame::new(mesh, f, v)?;
        let dj = value(frame.j) - at_v;
        let dk = value(frame.k) - at_v;
        // Edge coefficients per component.
        let a = frame.gram_inv[(0, 0)] * dj + frame.gram_inv[(0, 1)] * dk;
        let b = frame.gram_inv[(1, 0)] * dj + frame.gram_inv[(1, 1)] * dk;
        jac += w * (frame.edge_j * a.transpose() + frame.edge_k * b.transpose());
    }
    Ok(jac)
}

/// Unit vertex normal: normalized centroid-weighted sum of incident face
/// normals.
pub fn vertex_normal(mesh: &TriMesh, v: usize) -> Result<Vector3<f64>, CalculusError> {
    let weights = centroid_weights(mesh, v)?;
    let sum: Vector3<f64> = weights
        .iter()
        .map(|(f, w)| w * mesh.face_geometry(f).unit_normal)
        .sum();
    normalize_sum(sum, v)
}

/// Unit vertex normal from area-weighted face normals.
pub fn area_weighted_normal(mesh: &TriMesh, v: usize) -> Result<Vector3<f64>, CalculusError> {
    let faces = mesh.incident_faces(v);
    if faces.is_empty() {
        return Err(CalculusError::IsolatedVertex(v));
    }
    let total: f64 = faces.iter().map(|&f| mesh.face_geometry(f).area).sum();
    let sum: Vector3<f64> = faces
        .iter()
        .map(|&f| {
            let g = mesh.face_geometry(f);
            (g.area / total) * g.unit_normal
        })
        .sum();
    normalize_sum(sum, v)
}

fn normalize_sum(sum: Vector3<f64>, v: usize) -> Result<Vector3<f64>, CalculusError> {
    let norm = sum.norm();
    if !(norm >= NORMAL_SUM_EPS) {
        return Err(CalculusError::ZeroNormalSum(v));
    }
    Ok(sum / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn p(x: f64, y: f64, z: f64) -> Point3<f64> {
        Point3::new(x, y, z)
    }

    fn tri(c: [Point3<f64>; 3]) -> TriMesh {
        TriMesh::new(c.to_vec(), vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn evaluate_at_vertex_centroid_and_edge() {
        let m = tri([p(0., 0., 0.), p(3., 0., 0.), p(0., 3., 0.)]);
        let g = VertexFunction::new(&m, vec![0.0, 3.0, 6.0]).unwrap();
        assert_eq!(evaluate_pl(&m, &g, 0, &p(3., 0., 0.)).unwrap(), 3.0);
        let c = m.face_geometry(0).centroid;
        assert!((evaluate_pl(&m, &g, 0, &c).unwrap() - 3.0).abs() < 1e-14);

        let g = VertexFunction::new(&m, vec![2.0, 4.0, 99.0]).unwrap();
        assert!((evaluate_pl(&m, &g, 0, &p(1.5, 0., 0.)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn evaluate_rejects_outside_points() {
        let m = tri([p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)]);
        let g = VertexFunction::new(&m, vec![0.0; 3]).unwrap();
        assert!(matches!(
            evaluate_pl(&m, &g, 0, &p(1.0, 1.0, 0.)),
            Err(CalculusError::PointOutsideFace { face: 0, .. })
        ));
        // Rounding-level excursions along an edge are accepted.
        assert!(evaluate_pl(&m, &g, 0, &p(0.5, -1e-12, 0.)).is_ok());
    }

    #[test]
    fn face_gradient_examples() {
        let m = tri([p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)]);
        let g = VertexFunction::new(&m, vec![0.0, 2.0, 3.0]).unwrap();
        for at in 0..3 {
            let grad = face_gradient(&m, &g, 0, at).unwrap();
            assert!((grad - Vector3::new(2., 3., 0.)).norm() < 1e-14);
        }
        let c = VertexFunction::new(&m, vec![7.0; 3]).unwrap();
        assert_eq!(face_gradient(&m, &c, 0, 1).unwrap(), Vector3::zeros());

        // Frozen from a hand solve of the Gram system [[4,0],[0,1]] (a,b) =
        // (2,3): a = 1/2, b = 3, gradient = a(2,0,0) + b(0,1,0).
        let m = tri([p(0., 0., 0.), p(2., 0., 0.), p(0., 1., 0.)]);
        let g = VertexFunction::new(&m, vec![0.0, 2.0, 3.0]).unwrap();
        let grad = face_gradient(&m, &g, 0, 0).unwrap();
        assert!((grad - Vector3::new(1., 3., 0.)).norm() < 1e-14);
        assert!((grad.dot(&Vector3::new(2., 0., 0.)) - 2.0).abs() < 1e-12);
        assert!((grad.dot(&Vector3::new(0., 1., 0.)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn face_gradient_requires_corner() {
        let m = shapes::planar_grid(3, 3, 1.0);
        let g = VertexFunction::from_positions(&m, |q| q.x).unwrap();
        assert_eq!(
            face_gradient(&m, &g, 0, 8),
            Err(CalculusError::VertexNotInFace { vertex: 8, face: 0 })
        );
    }

    #[test]
    fn centroid_weight_examples() {
        let fan = shapes::cone_fan(6, 1.0, 0.0, 0.0);
        let w = centroid_weights(&fan, 0).unwrap();
        assert_eq!(w.entries.len(), 6);
        for (_, x) in w.iter() {
            assert!((x - 1.0 / 6.0).abs() < 1e-14);
        }
        let single = tri([p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)]);
        assert_eq!(
            centroid_weights(&single, 0).unwrap().entries,
            vec![(0, 1.0)]
        );
    }

    #[test]
    fn centroid_weights_follow_inverse_square_distance() {
        // Two faces around the origin whose centroids sit at distance 1 and 2.
        let m = TriMesh::new(
            vec![
                p(0., 0., 0.),
                p(1.5, 1.5, 0.),
                p(1.5, -1.5, 0.),
                p(-3.0, 3.0, 0.),
                p(-3.0, -3.0, 0.),
            ],
            vec![[0, 2, 1], [0, 3, 4]],
        )
        .unwrap();
        let w = centroid_weights(&m, 0).unwrap();
        assert!((w.weight_of(0).unwrap() - 0.8).abs() < 1e-14);
        assert!((w.weight_of(1).unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn isolated_vertex_is_an_error() {
        let m = TriMesh::new(
            vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(5., 5., 5.)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(
            centroid_weights(&m, 3),
            Err(CalculusError::IsolatedVertex(3))
        );
        assert_eq!(vertex_normal(&m, 3), Err(CalculusError::IsolatedVertex(3)));
        let g = VertexFunction::new(&m, vec![0.0; 4]).unwrap();
        assert_eq!(
            vertex_gradient(&m, &g, 3),
            Err(CalculusError::IsolatedVertex(3))
        );
    }

    #[test]
    fn planar_gradient_of_x() {
        let m = shapes::planar_grid(5, 5, 0.5);
        let g = VertexFunction::from_positions(&m, |q| q.x).unwrap();
        for v in 0..m.n_vertices() {
            let grad = vertex_gradient(&m, &g, v).unwrap();
            assert!((grad - Vector3::new(1., 0., 0.)).norm() < 1e-12);
        }
        let c = VertexFunction::new(&m, vec![-2.5; m.n_vertices()]).unwrap();
        assert_eq!(vertex_gradient(&m, &c, 12).unwrap(), Vector3::zeros());
    }

    #[test]
    fn sphere_gradient_of_height_is_tangential_projection() {
        let m = shapes::icosphere(3);
        let g = VertexFunction::from_positions(&m, |q| q.z).unwrap();
        let v = (0..m.n_vertices())
            .min_by(|&a, &b| m.vertex(a).z.abs().total_cmp(&m.vertex(b).z.abs()))
            .unwrap();
        let n = m.vertex(v).coords;
        let expected = Vector3::z() - n.z * n;
        let grad = vertex_gradient(&m, &g, v).unwrap();
        assert!((grad - expected).norm() < 5e-2, "{grad} vs {expected}");
    }

    #[test]
    fn vector_gradient_matches_componentwise() {
        let m = shapes::icosphere(2);
        let field: Vec<Vector3<f64>> = m
            .vertices()
            .iter()
            .map(|q| Vector3::new(q.x * q.y, q.z.sin(), q.x + 2.0 * q.z))
            .collect();
        for v in [0, 17, 100] {
            let jac = vertex_gradient_vec3(&m, &field, v).unwrap();
            for c in 0..3 {
                let g = VertexFunction::new(&m, field.iter().map(|n| n[c]).collect()).unwrap();
                let grad = vertex_gradient(&m, &g, v).unwrap();
                assert!((jac.column(c) - grad).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn normals_of_flat_fan_pyramid_and_sphere() {
        let fan = shapes::cone_fan(7, 1.0, 0.0, 0.3);
        assert!((vertex_normal(&fan, 0).unwrap() - Vector3::z()).norm() < 1e-15);

        let pyramid = shapes::square_pyramid(0.7);
        let n = vertex_normal(&pyramid, 0).unwrap();
        assert!(n.x.abs() < 1e-15 && n.y.abs() < 1e-15);
        assert!((n.z - 1.0).abs() < 1e-15);

        let sphere = shapes::icosphere(3);
        for v in 0..sphere.n_vertices() {
            let n = vertex_normal(&sphere, v).unwrap();
            assert!((n.norm() - 1.0).abs() < 1e-12);
            let angle = n
                .cross(&sphere.vertex(v).coords)
                .norm()
                .atan2(n.dot(&sphere.vertex(v).coords));
            assert!(angle < 1e-2);
        }
    }

    #[test]
    fn folded_star_has_no_normal() {
        // Each face is doubled with the opposite winding, so the weighted
        // normals cancel pairwise.
        let m = TriMesh::new(
            vec![
                p(0., 0., 0.),
                p(1., 0., 0.),
                p(0., 1., 0.),
                p(-1., 0., 0.),
                p(0., -1., 0.),
            ],
            vec![[0, 1, 2], [0, 2, 1], [0, 3, 4], [0, 4, 3]],
        )
        .unwrap();
        assert_eq!(vertex_normal(&m, 0), Err(CalculusError::ZeroNormalSum(0)));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let m = shapes::planar_grid(2, 2, 1.0);
        assert_eq!(
            VertexFunction::new(&m, vec![0.0; 3]).unwrap_err(),
            CalculusError::LengthMismatch {
                expected: 4,
                got: 3
            }
        );
        assert_eq!(
            VertexFunction::new(&m, vec![0.0, f64::INFINITY, 0.0, 0.0]).unwrap_err(),
            CalculusError::NonFiniteValue(1)
        );
    }
}
