//! The `curvest` command line.
//!
//! Exit codes: 0 success, 1 usage or input parse error, 2 `check` found
//! problems, 3 runtime failure.

use std::fmt::Display;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bench::{run_ensemble, BenchConfig, NormalSource};
use crate::estimate::{estimate_curvatures, Method};
use crate::io::{write_bench_csv, write_curvature_csv, Manifest, MeshFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FINDINGS: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "curvest",
    version,
    about = "Per-vertex curvature estimation on triangle meshes"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CURVEST_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate curvature at every vertex of an OFF or OBJ mesh.
    Estimate(EstimateArgs),
    /// Run the random-surface benchmark.
    Bench(BenchArgs),
    /// Report degenerate faces, winding problems and isolated vertices.
    Check(CheckArgs),
}

#[derive(Debug, Clone)]
struct MethodSet(Vec<Method>);

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// gauss-grad, taubin-area, taubin-centroid, chen-schmitt or all.
    #[arg(long, default_value = "all", value_parser = parse_method_choice)]
    method: MethodSet,
    /// Output CSV (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record the wall-clock time in the manifest.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    surfaces: usize,
    #[arg(long, default_value_t = 100)]
    partitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Polynomial degree range LO:HI.
    #[arg(long, default_value = "2:3", value_parser = parse_range::<usize>)]
    degrees: RangeInclusive<usize>,
    /// Neighbor radius range LO:HI.
    #[arg(long, default_value = "0.05:0.15", value_parser = parse_range::<f64>)]
    radii: RangeInclusive<f64>,
    /// Neighbor count range LO:HI.
    #[arg(long, default_value = "5:9", value_parser = parse_range::<usize>)]
    valence: RangeInclusive<usize>,
    /// Comma-separated method list, or all.
    #[arg(long, default_value = "all", value_parser = parse_method_list)]
    methods: MethodSet,
    #[arg(long, default_value_t = 5.0)]
    coeff_bound: f64,
    /// exact or estimated.
    #[arg(long, default_value = "exact")]
    normals: NormalSource,
    /// Output CSV (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Record the wall-clock time in the manifest.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
}

fn parse_method_choice(s: &str) -> Result<MethodSet, String> {
    if s == "all" {
        return Ok(MethodSet(Method::ALL.to_vec()));
    }
    s.parse::<Method>()
        .map(|m| MethodSet(vec![m]))
        .map_err(|e| e.to_string())
}

fn parse_method_list(s: &str) -> Result<MethodSet, String> {
    if s == "all" {
        return Ok(MethodSet(Method::ALL.to_vec()));
    }
    let mut methods = Vec::new();
    for tag in s.split(',') {
        let m: Method = tag
            .trim()
            .parse()
            .map_err(|e: crate::estimate::UnknownMethod| e.to_string())?;
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    Ok(MethodSet(methods))
}

fn parse_range<T>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T: FromStr + PartialOrd + Copy,
    T::Err: Display,
{
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: T = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi: T = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    if !(lo <= hi) {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}

fn range_text<T: Display>(r: &RangeInclusive<T>) -> String {
    format!("{}:{}", r.start(), r.end())
}

fn methods_text(methods: &[Method]) -> String {
    methods
        .iter()
        .map(|m| m.tag())
        .collect::<Vec<_>>()
        .join(",")
}

/// Failure carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn runtime(message: impl Display) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.to_string(),
        }
    }
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn read_input(path: &Path) -> Result<(MeshFormat, String), Failure> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        Failure::usage(format!(
            "{}: unknown mesh format, expected .off or .obj",
            path.display()
        ))
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    Ok((format, text))
}

/// Exit code and text for standard output.
type Outcome = Result<(i32, String), Failure>;

/// Writes `text` to `output`, or hands it back for standard output.
fn emit(output: Option<&Path>, text: String) -> Result<String, Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map(|()| String::new())
            .map_err(|e| Failure::runtime(format!("{}: {e}", path.display()))),
        None => Ok(text),
    }
}

fn estimate(args: &EstimateArgs) -> Outcome {
    let (format, text) = read_input(&args.input)?;
    let mesh = format
        .parse(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.input.display())))?;
    let methods = &args.method.0;
    let results = methods
        .iter()
        .map(|&m| estimate_curvatures(&mesh, m))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::runtime(format!("{}: {e}", args.input.display())))?;
    let mut manifest = Manifest::new("estimate")
        .with("input", args.input.display())
        .with("format", format)
        .with("methods", methods_text(methods))
        .with("vertices", mesh.n_vertices())
        .with("faces", mesh.n_faces());
    if args.timestamp {
        manifest = manifest.with("timestamp", unix_time());
    }
    let text = emit(
        args.output.as_deref(),
        write_curvature_csv(&mesh, &results, &manifest),
    )?;
    Ok((EXIT_OK, text))
}

fn bench(args: &BenchArgs) -> Outcome {
    let config = BenchConfig {
        n_surfaces: args.surfaces,
        n_partitions: args.partitions,
        seed: args.seed,
        degrees: args.degrees.clone(),
        coeff_bound: args.coeff_bound,
        radii: args.radii.clone(),
        valence: args.valence.clone(),
        methods: args.methods.0.clone(),
        normals: args.normals,
        keep_trials: false,
    };
    config.validate().map_err(Failure::usage)?;
    let report = run_ensemble(&config).map_err(Failure::runtime)?;
    let mut manifest = Manifest::new("bench")
        .with("seed", config.seed)
        .with("surfaces", config.n_surfaces)
        .with("partitions", config.n_partitions)
        .with("degrees", range_text(&config.degrees))
        .with("coeff_bound", config.coeff_bound)
        .with("radii", range_text(&config.radii))
        .with("valence", range_text(&config.valence))
        .with("methods", methods_text(&config.methods))
        .with("normals", config.normals);
    if args.timestamp {
        manifest = manifest.with("timestamp", unix_time());
    }
    let text = emit(args.output.as_deref(), write_bench_csv(&report, &manifest))?;
    Ok((EXIT_OK, text))
}

fn check(args: &CheckArgs) -> Outcome {
    let (format, text) = read_input(&args.input)?;
    let raw = format
        .parse_raw(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.input.display())))?;
    let mut lines = vec![format!(
        "{}: {} vertices, {} faces",
        args.input.display(),
        raw.vertices.len(),
        raw.faces.len()
    )];
    let mut findings = 0;
    let problems = raw.problems();
    if problems.is_empty() {
        let mesh = raw.build().map_err(Failure::usage)?;
        let report = mesh.check_orientation();
        for (a, b) in &report.inconsistent_edges {
            lines.push(format!("inconsistent winding on edge {a}-{b}"));
        }
        for (a, b) in &report.non_manifold_edges {
            lines.push(format!("non-manifold edge {a}-{b}"));
        }
        for v in (0..mesh.n_vertices()).filter(|&v| mesh.incident_faces(v).is_empty()) {
            lines.push(format!("isolated vertex {v}"));
        }
        findings = lines.len() - 1;
        lines.push(format!("boundary edges: {}", report.boundary_edges));
    } else {
        for p in &problems {
            lines.push(p.to_string());
            findings += 1;
        }
        lines.push("orientation not checked".into());
    }
    lines.push(if findings == 0 {
        "clean".to_owned()
    } else {
        format!("{findings} finding(s)")
    });
    let code = if findings == 0 {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    };
    Ok((code, lines.join("\n") + "\n"))
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Bench(a) => bench(a),
        Command::Check(a) => check(a),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Regular output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::runtime(e)),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok((code, text)) => match out.write_all(text.as_bytes()) {
            Ok(()) => code,
            Err(e) => {
                let _ = writeln!(err, "error: writing output: {e}");
                EXIT_RUNTIME
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
