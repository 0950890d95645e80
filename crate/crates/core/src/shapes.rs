//! Procedural test meshes with known curvature.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use nalgebra::Point3;

use crate::mesh::TriMesh;

/// Regular icosahedron inscribed in the unit sphere, outward winding.
pub fn icosahedron() -> TriMesh {
    let (vertices, faces) = icosahedron_soup();
    TriMesh::new(vertices, faces).expect("icosahedron is valid")
}

fn icosahedron_soup() -> (Vec<Point3<f64>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let vertices = raw
        .iter()
        .map(|&[x, y, z]| Point3::from(Point3::new(x, y, z).coords.normalize()))
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

/// Unit icosphere: the icosahedron with each face split into four `level`
/// times, new vertices pushed onto the sphere. Level 0 is the icosahedron.
pub fn icosphere(level: u32) -> TriMesh {
    let (mut vertices, mut faces) = icosahedron_soup();
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point3<f64>>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = (vertices[a].coords + vertices[b].coords).normalize();
                vertices.push(Point3::from(m));
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(vertices, faces).expect("icosphere is valid")
}

/// Planar `nx` x `ny` vertex grid in the xy-plane with spacing `h`, normals
/// along +z.
pub fn planar_grid(nx: usize, ny: usize, h: f64) -> TriMesh {
    assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 vertices");
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push(Point3::new(i as f64 * h, j as f64 * h, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let mut faces = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(vertices, faces).expect("grid is valid")
}

/// Open cylinder of the given radius around the z axis, `n_around` vertices
/// per ring and `n_rings` rings spanning `height`. Alternate rings are
/// rotated by half a step so interior vertices have valence 6. Outward
/// winding.
pub fn cylinder(radius: f64, height: f64, n_around: usize, n_rings: usize) -> TriMesh {
    assert!(n_around >= 3 && n_rings >= 2);
    let step = TAU / n_around as f64;
    let dz = height / (n_rings - 1) as f64;
    let mut vertices = Vec::with_capacity(n_around * n_rings);
    for j in 0..n_rings {
        let offset = if j % 2 == 1 { 0.5 * step } else { 0.0 };
        for i in 0..n_around {
            let t = offset + i as f64 * step;
            vertices.push(Point3::new(
                radius * t.cos(),
                radius * t.sin(),
                j as f64 * dz - 0.5 * height,
            ));
        }
    }
    let id = |i: usize, j: usize| j * n_around + i % n_around;
    let mut faces = Vec::new();
    for j in 0..n_rings - 1 {
        for i in 0..n_around {
            if j % 2 == 0 {
                // Upper vertex i sits between lower i and i + 1.
                faces.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                faces.push([id(i, j + 1), id(i + 1, j), id(i + 1, j + 1)]);
            } else {
                // Lower vertex i sits between upper i and i + 1.
                faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            }
        }
    }
    TriMesh::new(vertices, faces).expect("cylinder is valid")
}

/// Closed fan: apex at the origin, `n` ring vertices evenly spaced on the
/// circle of `radius` at height `height`, starting at angle `phase`.
/// Counterclockwise seen from +z. Vertex 0 is the apex.
pub fn cone_fan(n: usize, radius: f64, height: f64, phase: f64) -> TriMesh {
    assert!(n >= 3);
    let mut vertices = vec![Point3::origin()];
    for i in 0..n {
        let t = phase + TAU * i as f64 / n as f64;
        vertices.push(Point3::new(radius * t.cos(), radius * t.sin(), height));
    }
    let faces = (0..n).map(|i| [0, 1 + i, 1 + (i + 1) % n]).collect();
    TriMesh::new(vertices, faces).expect("cone fan is valid")
}

/// Square pyramid with its apex at (0, 0, `height`) over the unit square
/// centered at the origin; the base is left open.
pub fn square_pyramid(height: f64) -> TriMesh {
    let mut vertices = vec![Point3::new(0.0, 0.0, height)];
    for i in 0..4 {
        let t = 0.25 * PI + 0.5 * PI * i as f64;
        vertices.push(Point3::new(t.cos(), t.sin(), 0.0));
    }
    let faces = (0..4).map(|i| [0, 1 + i, 1 + (i + 1) % 4]).collect();
    TriMesh::new(vertices, faces).expect("pyramid is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts_and_outward_winding() {
        for level in 0..=3 {
            let m = icosphere(level);
            let f = 20 * 4usize.pow(level);
            assert_eq!(m.n_faces(), f);
            assert_eq!(m.n_vertices(), f / 2 + 2);
            assert!(m.check_orientation().is_consistent());
            for f in 0..m.n_faces() {
                let g = m.face_geometry(f);
                assert!(g.unit_normal.dot(&g.centroid.coords) > 0.0);
            }
            for v in 0..m.n_vertices() {
                assert!(!m.is_boundary(v));
                assert!((m.vertex(v).coords.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn icosphere_area_increases_toward_sphere() {
        let areas: Vec<f64> = (0..=4).map(|k| icosphere(k).total_area()).collect();
        for w in areas.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(areas[4] < 4.0 * PI);
        assert!(4.0 * PI - areas[4] < 0.02);
    }

    #[test]
    fn cylinder_is_outward_and_consistent() {
        let m = cylinder(2.0, 4.0, 24, 9);
        assert!(m.check_orientation().is_consistent());
        for f in 0..m.n_faces() {
            let g = m.face_geometry(f);
            let radial = nalgebra::Vector3::new(g.centroid.x, g.centroid.y, 0.0);
            assert!(g.unit_normal.dot(&radial) > 0.0);
        }
        let interior = (0..m.n_vertices()).filter(|&v| !m.is_boundary(v)).count();
        assert_eq!(interior, 24 * 7);
        for v in (0..m.n_vertices()).filter(|&v| !m.is_boundary(v)) {
            assert_eq!(m.neighbors(v).len(), 6);
        }
    }

    #[test]
    fn grid_interior_valence() {
        let m = planar_grid(4, 4, 1.0);
        assert_eq!(m.n_faces(), 18);
        let interior: Vec<usize> = (0..16).filter(|&v| !m.is_boundary(v)).collect();
        assert_eq!(interior, vec![5, 6, 9, 10]);
        for v in interior {
            assert_eq!(m.neighbors(v).len(), 6);
        }
    }
}
