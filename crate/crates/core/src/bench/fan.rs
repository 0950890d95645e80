use std::f64::consts::{PI, TAU};
use std::ops::RangeInclusive;

use nalgebra::Point3;
use rand::Rng;

use super::surface::PolySurface;
use super::BenchError;
use crate::mesh::{MeshError, TriMesh};

/// Angles closer than this are treated as duplicates.
pub const ANGLE_DEDUP_EPS: f64 = 1e-9;

/// Largest admissible gap between consecutive fan angles.
pub const MAX_ANGLE_GAP: f64 = 1.9 * PI;

/// Attempts before [`random_fan`] gives up.
pub const MAX_REDRAWS: usize = 1000;

/// Ring of `n_V` neighbors around the origin, in polar coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FanSpec {
    angles: Vec<f64>,
    radii: Vec<f64>,
}

impl FanSpec {
    pub fn new(angles: Vec<f64>, radii: Vec<f64>) -> Result<Self, BenchError> {
        let bad = |msg: &str| Err(BenchError::InvalidFan(msg.to_owned()));
        if angles.len() != radii.len() {
            return bad("angle and radius counts differ");
        }
        if angles.len() < 3 {
            return bad("a fan needs at least 3 neighbors");
        }
        if !angles.iter().all(|a| (0.0..TAU).contains(a)) {
            return bad("angles must lie in [0, 2π)");
        }
        if !angles.windows(2).all(|w| w[0] < w[1]) {
            return bad("angles must be strictly increasing");
        }
        if !radii.iter().all(|r| r.is_finite() && *r > 0.0) {
            return bad("radii must be positive");
        }
        Ok(Self { angles, radii })
    }

    /// `n` equally spaced neighbors at distance `radius`.
    pub fn symmetric(n: usize, radius: f64) -> Result<Self, BenchError> {
        let angles = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        Self::new(angles, vec![radius; n])
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Parameter-plane position of neighbor `i`.
    pub fn uv(&self, i: usize) -> (f64, f64) {
        let (s, c) = self.angles[i].sin_cos();
        (self.radii[i] * c, self.radii[i] * s)
    }

    /// Consecutive gaps, the last one wrapping around through 2π.
    pub fn gaps(&self) -> Vec<f64> {
        let n = self.angles.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    self.angles[i + 1] - self.angles[i]
                } else {
                    self.angles[0] + TAU - self.angles[n - 1]
                }
            })
            .collect()
    }
}

fn admissible_angles(mut angles: Vec<f64>) -> Option<Vec<f64>> {
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let wrap = angles[0] + TAU - angles[n - 1];
    let ok = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(wrap))
        .all(|g| g > ANGLE_DEDUP_EPS && g < MAX_ANGLE_GAP);
    ok.then_some(angles)
}

/// Draws `n_v` angles from `angle` until they are distinct and leave no gap
/// of `1.9π` or more, then `n_v` radii from `radius`. Returns the fan and the
/// number of rejected draws.
pub fn draw_fan<S: ?Sized>(
    n_v: usize,
    source: &mut S,
    mut angle: impl FnMut(&mut S) -> f64,
    mut radius: impl FnMut(&mut S) -> f64,
) -> Result<(FanSpec, usize), BenchError> {
    if n_v < 3 {
        return Err(BenchError::InvalidFan(
            "a fan needs at least 3 neighbors".into(),
        ));
    }
    for redraws in 0..MAX_REDRAWS {
        let draw: Vec<f64> = (0..n_v).map(|_| angle(source)).collect();
        if let Some(angles) = admissible_angles(draw) {
            let radii = (0..n_v).map(|_| radius(source)).collect();
            return Ok((FanSpec::new(angles, radii)?, redraws));
        }
    }
    Err(BenchError::RetryExhausted {
        attempts: MAX_REDRAWS,
    })
}

/// Random fan: `n_V` uniform in `valence`, angles uniform in `[0, 2π)`,
/// radii uniform in `radii`.
pub fn random_fan<R: Rng + ?Sized>(
    rng: &mut R,
    valence: RangeInclusive<usize>,
    radii: RangeInclusive<f64>,
) -> Result<FanSpec, BenchError> {
    let n_v = rng.random_range(valence);
    draw_fan(
        n_v,
        rng,
        |r| r.random_range(0.0..TAU),
        |r| r.random_range(radii.clone()),
    )
    .map(|(fan, _)| fan)
}

/// Mesh of the fan lifted onto `surface`: vertex 0 is `(0, 0, f(0, 0))`,
/// vertex `i + 1` is neighbor `i`, and face `i` is `(0, i + 1, i + 2)`
/// wrapping around, counterclockwise seen from above. Returns the mesh and
/// the center vertex.
pub fn build_fan_mesh(surface: &PolySurface, fan: &FanSpec) -> Result<(TriMesh, usize), MeshError> {
    let n = fan.len();
    let mut vertices = Vec::with_capacity(n + 1);
    vertices.push(Point3::new(0.0, 0.0, surface.eval(0.0, 0.0)));
    for i in 0..n {
        let (u, v) = fan.uv(i);
        vertices.push(Point3::new(u, v, surface.eval(u, v)));
    }
    let faces = (0..n).map(|i| [0, i + 1, (i + 1) % n + 1]).collect();
    Ok((TriMesh::new(vertices, faces)?, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructed_square_fan() {
        let angles = vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        let fan = FanSpec::new(angles.clone(), vec![1.0; 4]).unwrap();
        assert!(fan.gaps().iter().all(|g| (g - PI / 2.0).abs() < 1e-15));
        let mut it = angles.into_iter();
        let (drawn, redraws) = draw_fan(4, &mut it, |it| it.next().unwrap(), |_| 1.0).unwrap();
        assert_eq!((drawn, redraws), (fan, 0));
    }

    #[test]
    fn duplicate_angles_force_a_redraw() {
        let mut it = [1.0, 1.0, 4.0, 0.5, 2.5, 4.5].into_iter();
        let (fan, redraws) = draw_fan(3, &mut it, |it| it.next().unwrap(), |_| 0.1).unwrap();
        assert_eq!(redraws, 1);
        assert_eq!(fan.angles(), &[0.5, 2.5, 4.5]);
    }

    #[test]
    fn wide_gap_forces_a_redraw() {
        // 0.0, 0.1, 0.2 leaves a wrap-around gap of 2π - 0.2 > 1.9π.
        let mut it = [0.2, 0.0, 0.1, 0.0, 2.0, 4.0].into_iter();
        let (fan, redraws) = draw_fan(3, &mut it, |it| it.next().unwrap(), |_| 0.1).unwrap();
        assert_eq!(redraws, 1);
        assert!(fan.gaps().iter().all(|&g| g > 0.0 && g < MAX_ANGLE_GAP));
    }

    #[test]
    fn hopeless_draws_exhaust_retries() {
        assert_eq!(
            draw_fan(3, &mut (), |_| 1.0, |_| 1.0),
            Err(BenchError::RetryExhausted {
                attempts: MAX_REDRAWS
            })
        );
    }

    #[test]
    fn random_fans_are_valid_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let fan = random_fan(&mut rng, 3..=9, 0.05..=0.15).unwrap();
            assert!((3..=9).contains(&fan.len()));
            assert!(fan.radii().iter().all(|r| (0.05..=0.15).contains(r)));
            assert!(fan
                .gaps()
                .iter()
                .all(|&g| g > ANGLE_DEDUP_EPS && g < MAX_ANGLE_GAP));
        }
        let a = random_fan(&mut ChaCha8Rng::seed_from_u64(5), 5..=9, 0.05..=0.15).unwrap();
        let b = random_fan(&mut ChaCha8Rng::seed_from_u64(5), 5..=9, 0.05..=0.15).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fan_mesh_layout() {
        let s = PolySurface::from_terms(&[(2, 0, 1.0), (1, 1, -2.0)]);
        let fan = FanSpec::new(vec![0.3, 2.0, 4.0], vec![0.1, 0.2, 0.1]).unwrap();
        let (m, c) = build_fan_mesh(&s, &fan).unwrap();
        assert_eq!((m.n_vertices(), m.n_faces(), c), (4, 3, 0));
        assert!(!m.is_boundary(0));
        for f in 0..m.n_faces() {
            assert!(m.face_geometry(f).unit_normal.z > 0.0);
        }
        let (u, v) = fan.uv(1);
        assert_eq!(m.vertex(2).z, s.eval(u, v));
    }
}
