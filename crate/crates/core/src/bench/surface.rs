use std::ops::RangeInclusive;

use nalgebra::Vector3;
use rand::Rng;

use super::BenchError;

/// Polynomial height field `f(u, v) = Σ c_ij u^i v^j`, `0 <= i <= m`,
/// `0 <= j <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySurface {
    degree_u: usize,
    degree_v: usize,
    /// Row-major `(m + 1) x (n + 1)` grid, `c_ij` at `i * (n + 1) + j`.
    coeffs: Vec<f64>,
}

/// Value and partial derivatives up to second order at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MongeJet {
    pub f: f64,
    pub fu: f64,
    pub fv: f64,
    pub fuu: f64,
    pub fuv: f64,
    pub fvv: f64,
}

/// Curvature of a Monge patch with the upward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MongeCurvature {
    pub gaussian: f64,
    pub mean: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub normal: Vector3<f64>,
}

impl PolySurface {
    pub fn new(degree_u: usize, degree_v: usize, coeffs: Vec<f64>) -> Result<Self, BenchError> {
        let expected = (degree_u + 1) * (degree_v + 1);
        if coeffs.len() != expected {
            return Err(BenchError::InvalidConfig(format!(
                "{} coefficients for a {degree_u}x{degree_v} polynomial, expected {expected}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(BenchError::InvalidConfig("non-finite coefficient".into()));
        }
        Ok(Self {
            degree_u,
            degree_v,
            coeffs,
        })
    }

    /// Surface from `(i, j, c_ij)` terms; unlisted coefficients are zero.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let m = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let n = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![0.0; (m + 1) * (n + 1)];
        for &(i, j, c) in terms {
            coeffs[i * (n + 1) + j] += c;
        }
        Self::new(m, n, coeffs).expect("finite terms")
    }

    pub fn zero() -> Self {
        Self::from_terms(&[])
    }

    pub fn degree_u(&self) -> usize {
        self.degree_u
    }

    pub fn degree_v(&self) -> usize {
        self.degree_v
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.degree_u || j > self.degree_v {
            return 0.0;
        }
        self.coeffs[i * (self.degree_v + 1) + j]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.jet(u, v).f
    }

    /// Exact derivatives by term-wise differentiation.
    pub fn jet(&self, u: f64, v: f64) -> MongeJet {
        // Powers with their first and second derivative factors.
        let powers = |x: f64, deg: usize| {
            let mut p = vec![[0.0; 3]; deg + 1];
            let mut xk = 1.0;
            for row in p.iter_mut() {
                row[0] = xk;
                xk *= x;
            }
            for k in 1..=deg {
                p[k][1] = k as f64 * p[k - 1][0];
            }
            for k in 2..=deg {
                p[k][2] = (k * (k - 1)) as f64 * p[k - 2][0];
            }
            p
        };
        let pu = powers(u, self.degree_u);
        let pv = powers(v, self.degree_v);
        let mut jet = MongeJet {
            f: 0.0,
            fu: 0.0,
            fv: 0.0,
            fuu: 0.0,
            fuv: 0.0,
            fvv: 0.0,
        };
        for (i, a) in pu.iter().enumerate() {
            for (j, b) in pv.iter().enumerate() {
                let c = self.coeffs[i * (self.degree_v + 1) + j];
                jet.f += c * a[0] * b[0];
                jet.fu += c * a[1] * b[0];
                jet.fv += c * a[0] * b[1];
                jet.fuu += c * a[2] * b[0];
                jet.fuv += c * a[1] * b[1];
                jet.fvv += c * a[0] * b[2];
            }
        }
        jet
    }

    /// Upward unit normal `(-f_u, -f_v, 1) / W`.
    pub fn normal(&self, u: f64, v: f64) -> Vector3<f64> {
        let j = self.jet(u, v);
        Vector3::new(-j.fu, -j.fv, 1.0).normalize()
    }
}

/// Exact curvature of the graph of `surface` at `(u, v)`, oriented by the
/// upward normal. With that orientation the paraboloid `u² + v²` has
/// `κ1 = κ2 = 2`, matching the estimators' sign convention.
pub fn analytic_curvature(surface: &PolySurface, u: f64, v: f64) -> MongeCurvature {
    let MongeJet {
        fu,
        fv,
        fuu,
        fuv,
        fvv,
        ..
    } = surface.jet(u, v);
    let w2 = 1.0 + fu * fu + fv * fv;
    let w = w2.sqrt();
    let gaussian = (fuu * fvv - fuv * fuv) / (w2 * w2);
    let mean =
        ((1.0 + fu * fu) * fvv - 2.0 * fu * fv * fuv + (1.0 + fv * fv) * fuu) / (2.0 * w2 * w);
    let disc = (mean * mean - gaussian).max(0.0).sqrt();
    MongeCurvature {
        gaussian,
        mean,
        kappa1: mean + disc,
        kappa2: mean - disc,
        normal: Vector3::new(-fu, -fv, 1.0) / w,
    }
}

/// Degrees uniform in `degrees`, coefficients i.i.d. uniform in
/// `[-bound, bound]`.
pub fn random_surface<R: Rng + ?Sized>(
    rng: &mut R,
    degrees: RangeInclusive<usize>,
    bound: f64,
) -> PolySurface {
    let m = rng.random_range(degrees.clone());
    let n = rng.random_range(degrees);
    let coeffs = (0..(m + 1) * (n + 1))
        .map(|_| {
            if bound > 0.0 {
                rng.random_range(-bound..=bound)
            } else {
                0.0
            }
        })
        .collect();
    PolySurface::new(m, n, coeffs).expect("finite coefficients")
}
