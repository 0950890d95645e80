use std::fmt::Write;

use crate::bench::{BenchReport, MethodStats};
use crate::estimate::CurvatureResult;
use crate::mesh::TriMesh;

/// Run metadata written as `# key=value` lines at the top of every CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    /// Manifest starting with the tool name, version and `command`.
    pub fn new(command: &str) -> Self {
        Self::default()
            .with("tool", env!("CARGO_PKG_NAME"))
            .with("version", env!("CARGO_PKG_VERSION"))
            .with("command", command)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn write_to(&self, out: &mut String) {
        for (k, v) in &self.entries {
            let v = v.replace(['\n', '\r'], " ");
            let _ = writeln!(out, "# {k}={v}");
        }
    }
}

/// 17 significant digits, `nan`, `inf` and `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// One row per vertex and method, vertex-major. `results[k][v]` is the
/// estimate of method `k` at vertex `v`.
pub fn write_curvature_csv(
    mesh: &TriMesh,
    results: &[Vec<CurvatureResult>],
    manifest: &Manifest,
) -> String {
    let mut out = String::new();
    manifest.write_to(&mut out);
    out.push_str("vertex,x,y,z,method,K,H,k1,k2,d1x,d1y,d1z,d2x,d2y,d2z,boundary,degraded\n");
    for (v, p) in mesh.vertices().iter().enumerate() {
        for r in results.iter().map(|rs| &rs[v]) {
            let floats = [
                p.x, p.y, p.z, r.gaussian, r.mean, r.kappa1, r.kappa2, r.dir1.x, r.dir1.y,
                r.dir1.z, r.dir2.x, r.dir2.y, r.dir2.z,
            ]
            .map(format_float);
            let _ = writeln!(
                out,
                "{v},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                floats[0],
                floats[1],
                floats[2],
                r.method,
                floats[3],
                floats[4],
                floats[5],
                floats[6],
                floats[7],
                floats[8],
                floats[9],
                floats[10],
                floats[11],
                floats[12],
                u8::from(r.boundary),
                u8::from(r.degraded),
            );
        }
    }
    out
}

fn stats_row(out: &mut String, sweep: &str, unit: Option<usize>, s: &MethodStats) {
    let unit = unit.map(|u| u.to_string()).unwrap_or_default();
    let _ = writeln!(
        out,
        "{sweep},{unit},{},{},{},{},{},{},{},{}",
        s.method,
        format_float(s.mean_err_k),
        format_float(s.std_err_k),
        format_float(s.mean_err_h),
        format_float(s.std_err_h),
        s.n_kept,
        s.n_excluded,
        s.n_degraded,
    );
}

/// Overall rows first (empty `unit_index`), then `per-surface` and
/// `per-partition` rows in unit order.
pub fn write_bench_csv(report: &BenchReport, manifest: &Manifest) -> String {
    let mut out = String::new();
    manifest.write_to(&mut out);
    out.push_str("sweep,unit_index,method,mean_errK,std_errK,mean_errH,std_errH,n_kept,n_excluded,n_degraded\n");
    for s in &report.overall {
        stats_row(&mut out, "overall", None, s);
    }
    for (sweep, rows) in [
        ("per-surface", &report.per_surface),
        ("per-partition", &report.per_partition),
    ] {
        for (unit, stats) in rows.iter().enumerate() {
            for s in stats {
                stats_row(&mut out, sweep, Some(unit), s);
            }
        }
    }
    out
}
