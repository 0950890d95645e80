//! Random-surface benchmark.
//!
//! Each trial pairs a random polynomial height field with a random fan of
//! neighbors around the origin, builds the one-ring mesh, and compares every
//! method's estimate at the center vertex with the exact curvature of the
//! height field. Surfaces and fans are drawn from independent RNG substreams
//! keyed by their index, so fan `p` is the same for every surface and the
//! report does not depend on scheduling.

mod fan;
mod surface;

pub use fan::{
    build_fan_mesh, draw_fan, random_fan, FanSpec, ANGLE_DEDUP_EPS, MAX_ANGLE_GAP, MAX_REDRAWS,
};
pub use surface::{analytic_curvature, random_surface, MongeCurvature, MongeJet, PolySurface};

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::estimate::{self, Method, NormalField};
use crate::mesh::TriMesh;

/// Floor of the relative-error denominator.
pub const ERR_EPS: f64 = 1e-8;

/// Trials whose exact `|K|` is below this are left out of the K statistics.
pub const NEAR_ZERO_K: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("no admissible fan after {attempts} draws")]
    RetryExhausted { attempts: usize },
}

/// `|truth - estimate| / max(|truth|, 1e-8)`.
pub fn relative_error(truth: f64, estimate: f64) -> f64 {
    (truth - estimate).abs() / truth.abs().max(ERR_EPS)
}

/// Where the vertex normals of a trial mesh come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalSource {
    /// The height field's exact upward normal at every vertex.
    Exact,
    /// Each method's own vertex-normal estimate from the fan faces.
    Estimated,
}

impl NormalSource {
    pub fn tag(self) -> &'static str {
        match self {
            NormalSource::Exact => "exact",
            NormalSource::Estimated => "estimated",
        }
    }
}

impl fmt::Display for NormalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NormalSource {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(NormalSource::Exact),
            "estimated" => Ok(NormalSource::Estimated),
            _ => Err(BenchError::InvalidConfig(format!(
                "unknown normal source `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_surfaces: usize,
    pub n_partitions: usize,
    pub seed: u64,
    /// Range of both polynomial degrees `m` and `n`.
    pub degrees: RangeInclusive<usize>,
    pub coeff_bound: f64,
    pub radii: RangeInclusive<f64>,
    /// Range of the neighbor count `n_V`.
    pub valence: RangeInclusive<usize>,
    pub methods: Vec<Method>,
    pub normals: NormalSource,
    /// Keep one [`TrialRecord`] per trial and method in the report.
    pub keep_trials: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_surfaces: 100,
            n_partitions: 100,
            seed: 0,
            degrees: 2..=3,
            coeff_bound: 5.0,
            radii: 0.05..=0.15,
            valence: 5..=9,
            methods: Method::ALL.to_vec(),
            normals: NormalSource::Exact,
            keep_trials: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |msg: &str| Err(BenchError::InvalidConfig(msg.to_owned()));
        if self.n_surfaces == 0 || self.n_partitions == 0 {
            return bad("surface and partition counts must be at least 1");
        }
        if self.degrees.is_empty() {
            return bad("empty degree range");
        }
        if !(self.coeff_bound >= 0.0 && self.coeff_bound.is_finite()) {
            return bad("coefficient bound must be finite and non-negative");
        }
        let (r0, r1) = (*self.radii.start(), *self.radii.end());
        if !(r0 > 0.0 && r0 <= r1 && r1.is_finite()) {
            return bad("radius range must be positive and non-empty");
        }
        if self.valence.is_empty() || *self.valence.start() < 3 {
            return bad("valence range must be non-empty and start at 3 or more");
        }
        if self.methods.is_empty() {
            return bad("no methods selected");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    /// Counted in both the K and H statistics.
    Kept,
    /// Exact `|K|` below [`NEAR_ZERO_K`]; counted in the H statistics only.
    NearZeroK,
    /// The estimator or the mesh construction failed.
    Degraded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub surface: usize,
    pub partition: usize,
    pub method: Method,
    pub true_k: f64,
    pub true_h: f64,
    pub est_k: f64,
    pub est_h: f64,
    pub err_k: f64,
    pub err_h: f64,
    pub status: TrialStatus,
}

/// Aggregate over a set of trials for one method. Means and standard
/// deviations (population) of `Err(K)` cover `n_kept` trials, those of
/// `Err(H)` cover `n_kept + n_excluded`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodStats {
    pub method: Method,
    pub mean_err_k: f64,
    pub std_err_k: f64,
    pub mean_err_h: f64,
    pub std_err_h: f64,
    pub n_kept: usize,
    pub n_excluded: usize,
    pub n_degraded: usize,
}

impl MethodStats {
    pub fn total(&self) -> usize {
        self.n_kept + self.n_excluded + self.n_degraded
    }

    fn from_trials<'a>(method: Method, trials: impl Iterator<Item = &'a TrialRecord>) -> Self {
        let mut err_k = Vec::new();
        let mut err_h = Vec::new();
        let mut n_degraded = 0;
        for t in trials {
            match t.status {
                TrialStatus::Kept => {
                    err_k.push(t.err_k);
                    err_h.push(t.err_h);
                }
                TrialStatus::NearZeroK => err_h.push(t.err_h),
                TrialStatus::Degraded => n_degraded += 1,
            }
        }
        let (mean_err_k, std_err_k) = mean_std(&err_k);
        let (mean_err_h, std_err_h) = mean_std(&err_h);
        Self {
            method,
            mean_err_k,
            std_err_k,
            mean_err_h,
            std_err_h,
            n_kept: err_k.len(),
            n_excluded: err_h.len() - err_k.len(),
            n_degraded,
        }
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    /// One entry per configured method, over all trials.
    pub overall: Vec<MethodStats>,
    /// `per_surface[s]` aggregates surface `s` over all partitions.
    pub per_surface: Vec<Vec<MethodStats>>,
    /// `per_partition[p]` aggregates partition `p` over all surfaces.
    pub per_partition: Vec<Vec<MethodStats>>,
    /// Surface-major, then partition, then method; empty unless requested.
    pub trials: Vec<TrialRecord>,
}

impl BenchReport {
    pub fn overall_for(&self, method: Method) -> Option<&MethodStats> {
        self.overall.iter().find(|s| s.method == method)
    }
}

const SURFACE_STREAM: u64 = 1;
const PARTITION_STREAM: u64 = 2;

fn substream(seed: u64, kind: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 56) | index as u64);
    rng
}

/// Surface `s` of the ensemble.
pub fn ensemble_surface(config: &BenchConfig, s: usize) -> PolySurface {
    let mut rng = substream(config.seed, SURFACE_STREAM, s);
    random_surface(&mut rng, config.degrees.clone(), config.coeff_bound)
}

/// Fan `p` of the ensemble.
pub fn ensemble_fan(config: &BenchConfig, p: usize) -> Result<FanSpec, BenchError> {
    let mut rng = substream(config.seed, PARTITION_STREAM, p);
    random_fan(&mut rng, config.valence.clone(), config.radii.clone())
}

fn exact_normals(mesh: &TriMesh, surface: &PolySurface) -> NormalField {
    let normals = mesh
        .vertices()
        .iter()
        .map(|p| surface.normal(p.x, p.y))
        .collect();
    NormalField::from_vectors(mesh, normals).expect("unit normals for every vertex")
}

/// Estimate at the center of the fan mesh, `None` when the method fails.
fn center_estimate(
    mesh: &TriMesh,
    center: usize,
    surface: &PolySurface,
    method: Method,
    source: NormalSource,
) -> Option<(f64, f64)> {
    let field = match source {
        NormalSource::Exact => exact_normals(mesh, surface),
        NormalSource::Estimated => NormalField::estimate(mesh, method.normal_weighting()),
    };
    let r = estimate::estimate_vertex(mesh, &field, center, method).ok()?;
    (r.gaussian.is_finite() && r.mean.is_finite()).then_some((r.gaussian, r.mean))
}

fn run_trial(
    config: &BenchConfig,
    surface: &PolySurface,
    fan: Option<&FanSpec>,
    s: usize,
    p: usize,
) -> Vec<TrialRecord> {
    let truth = analytic_curvature(surface, 0.0, 0.0);
    let mesh = fan.and_then(|f| build_fan_mesh(surface, f).ok());
    config
        .methods
        .iter()
        .map(|&method| {
            let est = mesh
                .as_ref()
                .and_then(|(m, c)| center_estimate(m, *c, surface, method, config.normals));
            let (est_k, est_h, status) = match est {
                None => (f64::NAN, f64::NAN, TrialStatus::Degraded),
                Some((k, h)) if truth.gaussian.abs() < NEAR_ZERO_K => {
                    (k, h, TrialStatus::NearZeroK)
                }
                Some((k, h)) => (k, h, TrialStatus::Kept),
            };
            TrialRecord {
                surface: s,
                partition: p,
                method,
                true_k: truth.gaussian,
                true_h: truth.mean,
                est_k,
                est_h,
                err_k: relative_error(truth.gaussian, est_k),
                err_h: relative_error(truth.mean, est_h),
                status,
            }
        })
        .collect()
}

/// Runs every surface against every partition. Trials run in parallel; the
/// report is identical for any thread count.
pub fn run_ensemble(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let (ns, np) = (config.n_surfaces, config.n_partitions);
    let surfaces: Vec<PolySurface> = (0..ns)
        .into_par_iter()
        .map(|s| ensemble_surface(config, s))
        .collect();
    let fans: Vec<Option<FanSpec>> = (0..np)
        .into_par_iter()
        .map(|p| ensemble_fan(config, p).ok())
        .collect();
    let trials: Vec<TrialRecord> = (0..ns * np)
        .into_par_iter()
        .flat_map_iter(|i| {
            let (s, p) = (i / np, i % np);
            run_trial(config, &surfaces[s], fans[p].as_ref(), s, p)
        })
        .collect();

    let nm = config.methods.len();
    let at = |s: usize, p: usize, k: usize| &trials[(s * np + p) * nm + k];
    let stats = |cells: Vec<(usize, usize)>| -> Vec<MethodStats> {
        config
            .methods
            .iter()
            .enumerate()
            .map(|(k, &m)| MethodStats::from_trials(m, cells.iter().map(|&(s, p)| at(s, p, k))))
            .collect()
    };
    let overall = stats((0..ns).flat_map(|s| (0..np).map(move |p| (s, p))).collect());
    let per_surface = (0..ns)
        .map(|s| stats((0..np).map(|p| (s, p)).collect()))
        .collect();
    let per_partition = (0..np)
        .map(|p| stats((0..ns).map(|s| (s, p)).collect()))
        .collect();
    Ok(BenchReport {
        config: config.clone(),
        overall,
        per_surface,
        per_partition,
        trials: if config.keep_trials {
            trials
        } else {
            Vec::new()
        },
    })
}
