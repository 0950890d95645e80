//! Indexed triangle mesh with precomputed one-ring adjacency and per-face
//! geometry.
//!
//! A [`TriMesh`] is immutable once built. Construction validates every face
//! (indices in range, no repeated corner, positive area) and computes, for
//! each vertex, its star: the neighbor vertices `Ng(v)` and incident faces
//! `T(v)`. All queries afterwards are read-only, so a mesh can be shared
//! freely across threads.

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

/// Relative factor for the degenerate-face threshold; the absolute threshold
/// is this times the squared bounding-box diagonal.
pub const AREA_EPS_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {n_vertices} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("face {face} repeats vertex {index}")]
    DuplicateVertexInFace { face: usize, index: usize },
    #[error("face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
}

/// Area, centroid and unit normal of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub area: f64,
    pub centroid: Point3<f64>,
    /// Unit normal on the side given by counterclockwise winding.
    pub unit_normal: Vector3<f64>,
}

impl FaceGeometry {
    /// Geometry of the triangle `(a, b, c)`, or `None` when its area does not
    /// exceed `area_eps`.
    pub fn from_corners(
        a: &Point3<f64>,
        b: &Point3<f64>,
        c: &Point3<f64>,
        area_eps: f64,
    ) -> Option<Self> {
        let cross = (b - a).cross(&(c - a));
        let norm = cross.norm();
        let area = 0.5 * norm;
        // `!(x > eps)` also rejects NaN.
        if !(area > area_eps) {
            return None;
        }
        let centroid = Point3::from((a.coords + b.coords + c.coords) / 3.0);
        Some(Self {
            area,
            centroid,
            unit_normal: cross / norm,
        })
    }
}

/// The one-ring of a vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexStar {
    /// `Ng(v)`. Counterclockwise cyclic order when the star is a disk,
    /// first-seen order otherwise.
    pub neighbors: Vec<usize>,
    /// `T(v)`, in ascending face index.
    pub incident_faces: Vec<usize>,
    /// True when the incident faces do not close up into a single cycle
    /// around the vertex (mesh boundary or non-manifold star). Isolated
    /// vertices are not flagged; check `incident_faces.is_empty()`.
    pub is_boundary: bool,
}

/// Result of [`TriMesh::check_orientation`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrientationReport {
    /// Edges `(lo, hi)` shared by two faces that traverse them in the same
    /// direction.
    pub inconsistent_edges: Vec<(usize, usize)>,
    /// Edges `(lo, hi)` shared by more than two faces.
    pub non_manifold_edges: Vec<(usize, usize)>,
    /// Number of edges with exactly one incident face.
    pub boundary_edges: usize,
}

impl OrientationReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistent_edges.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    geometry: Vec<FaceGeometry>,
    stars: Vec<VertexStar>,
    area_eps: f64,
}

impl TriMesh {
    /// Validates the faces and precomputes adjacency and face geometry.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if let Some(err) = validate(&vertices, &faces).into_iter().next() {
            return Err(err);
        }
        let n_vertices = vertices.len();
        let area_eps = area_epsilon_for(&vertices);
        let geometry = faces
            .iter()
            .map(|&[a, b, c]| {
                FaceGeometry::from_corners(&vertices[a], &vertices[b], &vertices[c], area_eps)
                    .expect("validated face")
            })
            .collect();
        let stars = build_stars(n_vertices, &faces);
        Ok(Self {
            vertices,
            faces,
            geometry,
            stars,
            area_eps,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    #[inline]
    pub fn vertex(&self, v: usize) -> &Point3<f64> {
        &self.vertices[v]
    }

    #[inline]
    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    #[inline]
    pub fn face_geometry(&self, f: usize) -> &FaceGeometry {
        &self.geometry[f]
    }

    #[inline]
    pub fn star(&self, v: usize) -> &VertexStar {
        &self.stars[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.stars[v].neighbors
    }

    #[inline]
    pub fn incident_faces(&self, v: usize) -> &[usize] {
        &self.stars[v].incident_faces
    }

    #[inline]
    pub fn is_boundary(&self, v: usize) -> bool {
        self.stars[v].is_boundary
    }

    /// Faces incident to both `v` and `w`.
    pub fn faces_on_edge(&self, v: usize, w: usize) -> impl Iterator<Item = usize> + '_ {
        self.stars[v]
            .incident_faces
            .iter()
            .copied()
            .filter(move |&f| self.faces[f].contains(&w))
    }

    /// Absolute area threshold below which faces count as degenerate.
    pub fn area_epsilon(&self) -> f64 {
        self.area_eps
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    /// Lists edges whose two incident faces disagree on winding.
    pub fn check_orientation(&self) -> OrientationReport {
        // Undirected edge -> directions in which incident faces traverse it.
        let mut edges: BTreeMap<(usize, usize), Vec<bool>> = BTreeMap::new();
        for tri in &self.faces {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push(a < b);
            }
        }
        let mut report = OrientationReport::default();
        for (edge, dirs) in edges {
            match dirs.len() {
                1 => report.boundary_edges += 1,
                2 => {
                    if dirs[0] == dirs[1] {
                        report.inconsistent_edges.push(edge);
                    }
                }
                _ => report.non_manifold_edges.push(edge),
            }
        }
        report
    }

    /// Copy of the mesh with every face winding reversed.
    pub fn flipped(&self) -> TriMesh {
        let faces = self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect();
        TriMesh::new(self.vertices.clone(), faces).expect("flipping preserves validity")
    }

    /// Copy of the mesh with `map` applied to every vertex position.
    pub fn map_vertices<F>(&self, map: F) -> Result<TriMesh, MeshError>
    where
        F: Fn(&Point3<f64>) -> Point3<f64>,
    {
        TriMesh::new(self.vertices.iter().map(map).collect(), self.faces.clone())
    }
}

fn area_epsilon_for(vertices: &[Point3<f64>]) -> f64 {
    let diagonal = bounding_box_diagonal(vertices);
    AREA_EPS_FACTOR * diagonal * diagonal
}

/// Every problem that keeps `(vertices, faces)` from forming a [`TriMesh`]:
/// non-finite vertices first, then bad indices, then degenerate faces.
/// [`TriMesh::new`] reports the first entry.
pub fn validate(vertices: &[Point3<f64>], faces: &[[usize; 3]]) -> Vec<MeshError> {
    let mut errors: Vec<MeshError> = vertices
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.coords.iter().all(|c| c.is_finite()))
        .map(|(vertex, _)| MeshError::NonFiniteVertex { vertex })
        .collect();
    let n_vertices = vertices.len();
    let mut indexable = vec![true; faces.len()];
    for (face, tri) in faces.iter().enumerate() {
        for (k, &index) in tri.iter().enumerate() {
            if index >= n_vertices {
                errors.push(MeshError::IndexOutOfRange {
                    face,
                    index,
                    n_vertices,
                });
                indexable[face] = false;
                break;
            }
            if tri[..k].contains(&index) {
                errors.push(MeshError::DuplicateVertexInFace { face, index });
                indexable[face] = false;
                break;
            }
        }
    }
    let area_eps = area_epsilon_for(vertices);
    for (face, &[a, b, c]) in faces.iter().enumerate() {
        if !indexable[face] {
            continue;
        }
        let (pa, pb, pc) = (&vertices[a], &vertices[b], &vertices[c]);
        if FaceGeometry::from_corners(pa, pb, pc, area_eps).is_none() {
            let area = 0.5 * (pb - pa).cross(&(pc - pa)).norm();
            errors.push(MeshError::DegenerateFace { face, area });
        }
    }
    errors
}

pub fn bounding_box_diagonal(points: &[Point3<f64>]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let (lo, hi) = points
        .iter()
        .fold((first.coords, first.coords), |(lo, hi), p| {
            (lo.inf(&p.coords), hi.sup(&p.coords))
        });
    (hi - lo).norm()
}

/// One link edge of a vertex star: the face and its two other corners in
/// counterclockwise order around the vertex.
#[derive(Clone, Copy)]
struct LinkEdge {
    face: usize,
    from: usize,
    to: usize,
}

fn build_stars(n_vertices: usize, faces: &[[usize; 3]]) -> Vec<VertexStar> {
    let mut links: Vec<Vec<LinkEdge>> = vec![Vec::new(); n_vertices];
    for (face, tri) in faces.iter().enumerate() {
        for k in 0..3 {
            links[tri[k]].push(LinkEdge {
                face,
                from: tri[(k + 1) % 3],
                to: tri[(k + 2) % 3],
            });
        }
    }
    links.iter().map(|link| star_from_link(link)).collect()
}

fn star_from_link(link: &[LinkEdge]) -> VertexStar {
    let incident_faces: Vec<usize> = link.iter().map(|e| e.face).collect();
    let mut first_seen = Vec::new();
    for e in link {
        for w in [e.from, e.to] {
            if !first_seen.contains(&w) {
                first_seen.push(w);
            }
        }
    }
    if link.is_empty() {
        return VertexStar::default();
    }
    match walk_link(link, first_seen.len()) {
        Some((neighbors, closed)) => VertexStar {
            neighbors,
            incident_faces,
            is_boundary: !closed,
        },
        None => VertexStar {
            neighbors: first_seen,
            incident_faces,
            is_boundary: true,
        },
    }
}

/// Orders the link vertices by walking the link graph. Returns `None` when
/// the link is not a single simple path or cycle; otherwise the ordered
/// vertices and whether the link closes.
fn walk_link(link: &[LinkEdge], n_neighbors: usize) -> Option<(Vec<usize>, bool)> {
    // Link vertex -> incident link edge ids, ignoring direction.
    let mut incidence: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, e) in link.iter().enumerate() {
        incidence.entry(e.from).or_default().push(id);
        incidence.entry(e.to).or_default().push(id);
    }
    if incidence.values().any(|ids| ids.len() > 2) {
        return None;
    }
    let endpoints: Vec<usize> = incidence
        .iter()
        .filter(|(_, ids)| ids.len() == 1)
        .map(|(&w, _)| w)
        .collect();
    let (start, closed) = match endpoints.len() {
        0 => (link[0].from, true),
        // Start where the counterclockwise walk begins when the winding allows.
        2 => match endpoints
            .iter()
            .find(|&&w| link[incidence[&w][0]].from == w)
        {
            Some(&w) => (w, false),
            None => (endpoints[0], false),
        },
        _ => return None,
    };

    let other = |id: usize, w: usize| {
        let e = link[id];
        if e.from == w {
            e.to
        } else {
            e.from
        }
    };
    let mut order = vec![start];
    let mut edge = if closed {
        // Follow the first link edge in its own direction.
        0
    } else {
        incidence[&start][0]
    };
    let mut current = other(edge, start);
    loop {
        if current == start {
            break;
        }
        order.push(current);
        match incidence[&current].iter().find(|&&id| id != edge) {
            Some(&next) => {
                edge = next;
                current = other(edge, current);
            }
            None => break,
        }
        if order.len() > n_neighbors {
            return None;
        }
    }
    (order.len() == n_neighbors).then_some((order, closed))
}
