#![allow(dead_code)]

use std::path::PathBuf;

use curvest::bench::PolySurface;
use curvest::calculus::{vertex_gradient, VertexFunction};
use curvest::estimate::{estimate_curvatures, CurvatureResult, Method};
use curvest::gauss::{
    curvatures_from_shape_operator, estimate_dn, gauss_map_field, project_shape_operator,
    TangentBasis,
};
use curvest::TriMesh;
use nalgebra::{Point3, Rotation3, Unit, Vector3};
use num_complex::Complex64;
use rand::Rng;

/// `f(u, v)` with complex arguments.
fn eval_complex(s: &PolySurface, u: Complex64, v: Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut ui = Complex64::new(1.0, 0.0);
    for i in 0..=s.degree_u() {
        let mut vj = Complex64::new(1.0, 0.0);
        for j in 0..=s.degree_v() {
            total += ui * vj * s.coeff(i, j);
            vj *= v;
        }
        ui *= u;
    }
    total
}

const COMPLEX_STEP: f64 = 1e-30;
const FD_STEP: f64 = 1e-5;

/// `(f_u, f_v)` by complex-step differentiation.
fn gradient_cs(s: &PolySurface, u: f64, v: f64) -> (f64, f64) {
    let h = Complex64::new(0.0, COMPLEX_STEP);
    let re = |x: f64| Complex64::new(x, 0.0);
    let fu = eval_complex(s, re(u) + h, re(v)).im / COMPLEX_STEP;
    let fv = eval_complex(s, re(u), re(v) + h).im / COMPLEX_STEP;
    (fu, fv)
}

fn normal_cs(s: &PolySurface, u: f64, v: f64) -> Vector3<f64> {
    let (fu, fv) = gradient_cs(s, u, v);
    Vector3::new(-fu, -fv, 1.0).normalize()
}

/// `(K, H)` from the first and second fundamental forms, with the normal
/// differentiated by central differences. Upward normal.
pub fn fd_curvature(s: &PolySurface, u: f64, v: f64) -> (f64, f64) {
    let (fu, fv) = gradient_cs(s, u, v);
    let ru = Vector3::new(1.0, 0.0, fu);
    let rv = Vector3::new(0.0, 1.0, fv);
    let h = FD_STEP;
    let nu = (normal_cs(s, u + h, v) - normal_cs(s, u - h, v)) / (2.0 * h);
    let nv = (normal_cs(s, u, v + h) - normal_cs(s, u, v - h)) / (2.0 * h);
    let (e, f, g) = (ru.dot(&ru), ru.dot(&rv), rv.dot(&rv));
    let l = -nu.dot(&ru);
    let m = -0.5 * (nu.dot(&rv) + nv.dot(&ru));
    let n = -nv.dot(&rv);
    let det = e * g - f * f;
    (
        (l * n - m * m) / det,
        (e * n - 2.0 * f * m + g * l) / (2.0 * det),
    )
}

/// A point in `[-1, 1]²` where `|∇f| < max_grad`.
pub fn point_with_bounded_gradient<R: Rng>(
    rng: &mut R,
    s: &PolySurface,
    max_grad: f64,
) -> Option<(f64, f64)> {
    for _ in 0..1000 {
        let (u, v) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (fu, fv) = gradient_cs(s, u, v);
        if fu.hypot(fv) < max_grad {
            return Some((u, v));
        }
    }
    None
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Jittered 7x7 height-field patch of a random cubic around the origin.
pub fn random_patch<R: Rng>(rng: &mut R) -> TriMesh {
    let mut terms = Vec::new();
    for i in 0..=3 {
        for j in 0..=3 - i {
            terms.push((i, j, rng.random_range(-2.0..2.0)));
        }
    }
    let s = PolySurface::from_terms(&terms);
    let grid = curvest::shapes::planar_grid(7, 7, 0.1);
    let jitter: Vec<(f64, f64)> = (0..grid.n_vertices())
        .map(|_| (rng.random_range(-0.02..0.02), rng.random_range(-0.02..0.02)))
        .collect();
    grid.map_vertices(|p| {
        let k = ((p.y / 0.1).round() * 7.0 + (p.x / 0.1).round()) as usize;
        let (x, y) = (p.x - 0.3 + jitter[k].0, p.y - 0.3 + jitter[k].1);
        Point3::new(x, y, s.eval(x, y))
    })
    .expect("patch is valid")
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation3<f64> {
    let axis = Vector3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    let axis = Unit::try_new(axis, 1e-6).unwrap_or(Vector3::z_axis());
    Rotation3::from_axis_angle(&axis, rng.random_range(-3.1..3.1))
}

fn interior_pairs<'a>(
    mesh: &'a TriMesh,
    a: &'a [CurvatureResult],
    b: &'a [CurvatureResult],
) -> impl Iterator<Item = (usize, &'a CurvatureResult, &'a CurvatureResult)> + 'a {
    (0..mesh.n_vertices())
        .filter(move |&v| !mesh.is_boundary(v) && !a[v].degraded && !b[v].degraded)
        .map(move |v| (v, &a[v], &b[v]))
}

fn direction_angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.dot(b).abs().min(1.0).acos()
}

/// Rotating and translating the mesh leaves the curvatures unchanged and
/// rotates the principal directions.
pub fn check_rigid_motion<R: Rng>(rng: &mut R) -> Result<(), String> {
    let mesh = random_patch(rng);
    let rot = random_rotation(rng);
    let shift = Vector3::new(
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
    );
    let moved = mesh.map_vertices(|p| rot * p + shift).unwrap();
    for method in Method::ALL {
        let a = estimate_curvatures(&mesh, method).unwrap();
        let b = estimate_curvatures(&moved, method).unwrap();
        for (v, ra, rb) in interior_pairs(&mesh, &a, &b) {
            for (x, y) in [
                (ra.gaussian, rb.gaussian),
                (ra.mean, rb.mean),
                (ra.kappa1, rb.kappa1),
                (ra.kappa2, rb.kappa2),
            ] {
                if !close(x, y, 1e-9) {
                    return Err(format!("{method} vertex {v}: {x} vs {y}"));
                }
            }
            if (ra.kappa1 - ra.kappa2).abs() > 1e-6 * ra.kappa1.abs().max(1.0) {
                let angle = direction_angle(&(rot * ra.dir1), &rb.dir1);
                if angle > 1e-6 {
                    return Err(format!("{method} vertex {v}: direction off by {angle}"));
                }
            }
        }
    }
    Ok(())
}

/// Scaling by `s` divides κ and H by `s` and K by `s²`.
pub fn check_scale<R: Rng>(rng: &mut R) -> Result<(), String> {
    let mesh = random_patch(rng);
    let s: f64 = rng.random_range(-2.3f64..2.3).exp();
    let scaled = mesh.map_vertices(|p| Point3::from(p.coords * s)).unwrap();
    for method in Method::ALL {
        let a = estimate_curvatures(&mesh, method).unwrap();
        let b = estimate_curvatures(&scaled, method).unwrap();
        for (v, ra, rb) in interior_pairs(&mesh, &a, &b) {
            for (x, y) in [
                (ra.gaussian, rb.gaussian * s * s),
                (ra.mean, rb.mean * s),
                (ra.kappa1, rb.kappa1 * s),
                (ra.kappa2, rb.kappa2 * s),
            ] {
                if !close(x, y, 1e-9) {
                    return Err(format!("{method} vertex {v}, scale {s}: {x} vs {y}"));
                }
            }
        }
    }
    Ok(())
}

/// Reversing every face keeps K, negates H and swaps `κ1, κ2 -> -κ2, -κ1`.
pub fn check_orientation_flip<R: Rng>(rng: &mut R) -> Result<(), String> {
    let mesh = random_patch(rng);
    let flipped = mesh.flipped();
    for method in Method::ALL {
        let a = estimate_curvatures(&mesh, method).unwrap();
        let b = estimate_curvatures(&flipped, method).unwrap();
        for (v, ra, rb) in interior_pairs(&mesh, &a, &b) {
            for (x, y) in [
                (ra.gaussian, rb.gaussian),
                (ra.mean, -rb.mean),
                (ra.kappa1, -rb.kappa2),
                (ra.kappa2, -rb.kappa1),
            ] {
                if !close(x, y, 1e-9) {
                    return Err(format!("{method} vertex {v}: {x} vs {y}"));
                }
            }
        }
    }
    Ok(())
}

/// The shape operator's invariants do not depend on the tangent basis.
pub fn check_basis_independence<R: Rng>(rng: &mut R) -> Result<(), String> {
    let mesh = random_patch(rng);
    let field = gauss_map_field(&mesh).unwrap();
    for v in (0..mesh.n_vertices()).filter(|&v| !mesh.is_boundary(v)) {
        let dn = estimate_dn(&mesh, &field, v).unwrap();
        let base = TangentBasis::from_normal(&field.at(v).unwrap()).unwrap();
        let other = base.rotated(rng.random_range(0.0..std::f64::consts::TAU));
        let a = curvatures_from_shape_operator(&project_shape_operator(&dn, &base, true));
        let b = curvatures_from_shape_operator(&project_shape_operator(&dn, &other, true));
        for (x, y) in [
            (a.gaussian, b.gaussian),
            (a.mean, b.mean),
            (a.kappa1, b.kappa1),
            (a.kappa2, b.kappa2),
        ] {
            if !close(x, y, 1e-10) {
                return Err(format!("vertex {v}: {x} vs {y}"));
            }
        }
    }
    Ok(())
}

/// On a planar mesh the vertex gradient of a linear function is the
/// tangential part of its coefficient vector.
pub fn check_linear_reproduction<R: Rng>(rng: &mut R) -> Result<(), String> {
    let rot = random_rotation(rng);
    let grid = curvest::shapes::planar_grid(6, 6, 0.2);
    let jitter: Vec<(f64, f64)> = (0..grid.n_vertices())
        .map(|_| (rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
        .collect();
    let mesh = grid
        .map_vertices(|p| {
            let k = ((p.y / 0.2).round() * 6.0 + (p.x / 0.2).round()) as usize;
            rot * Point3::new(p.x + jitter[k].0, p.y + jitter[k].1, 0.0)
        })
        .unwrap();
    let a = Vector3::new(
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
    );
    let b = rng.random_range(-3.0..3.0);
    let g = VertexFunction::from_positions(&mesh, |p| a.dot(&p.coords) + b).unwrap();
    let n = rot * Vector3::z();
    let expected = a - a.dot(&n) * n;
    for v in 0..mesh.n_vertices() {
        let grad = vertex_gradient(&mesh, &g, v).unwrap();
        if (grad - expected).norm() > 1e-10 * a.norm().max(1.0) {
            return Err(format!("vertex {v}: {grad:?} vs {expected:?}"));
        }
    }
    Ok(())
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Expected parse outcome of a fixture file.
pub enum Expect {
    Mesh { vertices: usize, faces: usize },
    Error { kind: &'static str, line: usize },
}

pub const PARSER_CORPUS: &[(&str, Expect)] = &[
    (
        "minimal.off",
        Expect::Mesh {
            vertices: 3,
            faces: 1,
        },
    ),
    (
        "comments.off",
        Expect::Mesh {
            vertices: 4,
            faces: 2,
        },
    ),
    (
        "minimal.obj",
        Expect::Mesh {
            vertices: 3,
            faces: 1,
        },
    ),
    (
        "relative.obj",
        Expect::Mesh {
            vertices: 4,
            faces: 2,
        },
    ),
    (
        "suffixes.obj",
        Expect::Mesh {
            vertices: 4,
            faces: 2,
        },
    ),
    (
        "quad_face.off",
        Expect::Error {
            kind: "NonTriangleFace",
            line: 7,
        },
    ),
    (
        "missing_face.off",
        Expect::Error {
            kind: "CountMismatch",
            line: 2,
        },
    ),
    (
        "bad_number.off",
        Expect::Error {
            kind: "Syntax",
            line: 4,
        },
    ),
    (
        "degenerate.off",
        Expect::Error {
            kind: "Mesh",
            line: 6,
        },
    ),
    (
        "out_of_range.obj",
        Expect::Error {
            kind: "IndexOutOfRange",
            line: 4,
        },
    ),
    (
        "zero_index.obj",
        Expect::Error {
            kind: "Syntax",
            line: 4,
        },
    ),
];

pub fn error_kind(e: &curvest::io::ParseError) -> &'static str {
    use curvest::io::ParseError::*;
    match e {
        Syntax { .. } => "Syntax",
        NonTriangleFace { .. } => "NonTriangleFace",
        CountMismatch { .. } => "CountMismatch",
        IndexOutOfRange { .. } => "IndexOutOfRange",
        Mesh { .. } => "Mesh",
    }
}

/// Checks one corpus entry against its expectation.
pub fn check_fixture(name: &str, expect: &Expect) -> Result<(), String> {
    let path = fixture(name);
    let format = curvest::io::MeshFormat::from_path(&path).ok_or("unknown extension")?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    match (format.parse(&text), expect) {
        (Ok(m), Expect::Mesh { vertices, faces }) => {
            if (m.n_vertices(), m.n_faces()) == (*vertices, *faces) {
                Ok(())
            } else {
                Err(format!("{name}: got {}v/{}f", m.n_vertices(), m.n_faces()))
            }
        }
        (Err(e), Expect::Error { kind, line }) => {
            if error_kind(&e) == *kind && e.line() == *line {
                Ok(())
            } else {
                Err(format!("{name}: got {e:?}"))
            }
        }
        (Ok(_), Expect::Error { kind, .. }) => Err(format!("{name}: parsed, expected {kind}")),
        (Err(e), Expect::Mesh { .. }) => Err(format!("{name}: {e}")),
    }
}
