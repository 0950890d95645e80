//! Closed-form helpers for small symmetric matrices.

use nalgebra::{Vector2, Vector3};

/// Eigen-decomposition of the symmetric matrix `[[a, b], [b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen2 {
    /// Larger eigenvalue and its unit eigenvector.
    pub max: (f64, Vector2<f64>),
    /// Smaller eigenvalue and its unit eigenvector.
    pub min: (f64, Vector2<f64>),
}

impl SymEigen2 {
    pub fn gap(&self) -> f64 {
        self.max.0 - self.min.0
    }
}

pub fn sym_eigen2(a: f64, b: f64, d: f64) -> SymEigen2 {
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let radius = half_diff.hypot(b);
    // Rotation angle of the eigenbasis; atan2(0, 0) = 0 keeps the axes at
    // a multiple of the identity.
    let phi = 0.5 * b.atan2(half_diff);
    let (s, c) = phi.sin_cos();
    SymEigen2 {
        max: (mean + radius, Vector2::new(c, s)),
        min: (mean - radius, Vector2::new(-s, c)),
    }
}

/// Flips `v` so that its largest-magnitude component is positive.
pub fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let mut lead = 0;
    for k in 1..3 {
        if v[k].abs() > v[lead].abs() {
            lead = k;
        }
    }
    if v[lead] < 0.0 {
        -v
    } else {
        v
    }
}
