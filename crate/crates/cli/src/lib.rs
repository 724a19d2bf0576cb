//! CLI surface over the unifinsler library: metric selection (catalog name
//! or expression), verdict checks, region sweeps, curvature maps, geodesic
//! traces and the unit-sphere length experiment, with CSV/JSON emission.
//!
//! Exit codes: 0 success (and, for `check`, all points strongly convex);
//! 2 mathematical verdict failure (`check` found a non-convex point);
//! 64 usage error; 65 domain/data error; 1 internal error.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use unifinsler::curvature::{curvature_report_ts, curvature_to_csv, holomorphic_curvature};
use unifinsler::dynamics::{integrate_geodesic, polygonal_length};
use unifinsler::error::Error as CoreError;
use unifinsler::geometry::PointDirection;
use unifinsler::metric::{resolve, MetricDefn};
use unifinsler::output::g17;
use unifinsler::parallel::par_map_indexed;
use unifinsler::sample::random_point;
use unifinsler::tensors::{
    convexity_report_ts_eps, region_sweep_eps, sweep_to_csv, ConvexityReport, STRICTNESS_EPS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

const CONVENTIONS: &str = "Conventions: a metric is F(z, v) = sqrt(r * phi(t, s)) on C^n with\n\
    r = |v|^2, t = |z|^2, s = |<z, v>|^2 / |v|^2 and <z, v> = sum z conj(v);\n\
    abstract (t, s) points must satisfy 0 <= s <= t. Metrics are catalog\n\
    names (try `unifinsler list`) or expressions over t, s, exp, log, sqrt.";

#[derive(Parser)]
#[command(
    name = "unifinsler",
    about = "U(n)-invariant complex Finsler metrics: convexity, sprays, curvature",
    after_help = CONVENTIONS,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct MetricOpt {
    /// Catalog name or phi(t, s) expression, e.g. "wrona" or "(1+s)^2".
    #[arg(long)]
    metric: String,
    /// Complex dimension n >= 2 of the ambient space.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PointOpts {
    /// Abstract invariants "t,s" (repeatable); a canonical witness pair is
    /// constructed via U(n)-invariance.
    #[arg(long = "point-ts", value_name = "T,S")]
    point_ts: Vec<String>,
    /// Full point "z1,..,zn;v1,..,vn" with complex entries like "0.3-0.2i"
    /// (repeatable).
    #[arg(long = "point", value_name = "Z;V")]
    point: Vec<String>,
    /// Sample this many random guard-valid points instead.
    #[arg(long)]
    random: Option<usize>,
    /// RNG seed for --random (identical seeds give identical output).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the catalog metrics with their guards.
    List,
    /// Convexity/pseudoconvexity verdicts at points; exits 2 when any
    /// sampled point fails strong convexity.
    #[command(after_help = CONVENTIONS)]
    Check {
        #[command(flatten)]
        metric: MetricOpt,
        #[command(flatten)]
        points: PointOpts,
        /// Output format: csv or json.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Override the strict-inequality tolerance: a condition "> 0"
        /// passes at value > eps * max(1, phi^2).
        #[arg(long = "strictness-eps", default_value_t = STRICTNESS_EPS)]
        strictness_eps: f64,
    },
    /// Verdict sweep over a (t, s) grid; CSV columns
    /// t,s,c0,k1,ktilde,pseudoconvex,convex,excluded.
    #[command(after_help = CONVENTIONS)]
    Sweep {
        #[command(flatten)]
        metric: MetricOpt,
        /// Grid range "lo,hi" for t.
        #[arg(long = "t-range", value_name = "LO,HI")]
        t_range: String,
        /// Grid range "lo,hi" for s.
        #[arg(long = "s-range", value_name = "LO,HI")]
        s_range: String,
        /// Points per axis.
        #[arg(long)]
        grid: usize,
        /// Worker threads (default: UNIFINSLER_WORKERS or all cores);
        /// output bytes do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        /// Override the strict-inequality tolerance: a condition "> 0"
        /// passes at value > eps * max(1, phi^2).
        #[arg(long = "strictness-eps", default_value_t = STRICTNESS_EPS)]
        strictness_eps: f64,
    },
    /// Holomorphic sectional curvature K_F at points or over a (t, s)
    /// grid; CSV columns t,s,K_F,k1,k4,k5.
    #[command(after_help = CONVENTIONS)]
    Curvature {
        #[command(flatten)]
        metric: MetricOpt,
        #[command(flatten)]
        points: PointOpts,
        /// Map mode: points per axis of a (t, s) grid (needs the ranges;
        /// guard-violating and singular cells are omitted).
        #[arg(long)]
        grid: Option<usize>,
        /// Grid range "lo,hi" for t.
        #[arg(long = "t-range", value_name = "LO,HI")]
        t_range: Option<String>,
        /// Grid range "lo,hi" for s.
        #[arg(long = "s-range", value_name = "LO,HI")]
        s_range: Option<String>,
    },
    /// Integrate a real geodesic by fixed-step RK4; CSV trace
    /// tau,x_1..x_2n,u_1..u_2n,F. On a domain exit the partial trace is
    /// still written and the exit code is 65.
    #[command(after_help = CONVENTIONS)]
    Geodesic {
        #[command(flatten)]
        metric: MetricOpt,
        /// Start position, 2n comma-separated reals (real parts of z,
        /// then imaginary parts).
        #[arg(long)]
        x0: String,
        /// Start velocity, 2n comma-separated reals.
        #[arg(long)]
        u0: String,
        /// Step size.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Number of steps.
        #[arg(long)]
        steps: usize,
    },
    /// Polygonal length of a great-circle arc on the unit sphere, by
    /// literal segment sum and closed form; JSON output.
    #[command(after_help = CONVENTIONS)]
    SphereLength {
        #[command(flatten)]
        metric: MetricOpt,
        /// Arc angle in (0, pi/2).
        #[arg(long)]
        alpha: f64,
        /// Number of polygon segments.
        #[arg(long, default_value_t = 4096)]
        segments: usize,
        /// Rescale the metric so phi(1, 0) = 1 first.
        #[arg(long, default_value_t = false)]
        normalize: bool,
    },
}

/// Entry point used by both `main` and the tests; returns the process exit
/// code and writes report output to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e.downcast_ref::<CoreError>() {
                Some(CoreError::InternalInconsistency(_)) | None => EXIT_INTERNAL,
                Some(_) => EXIT_DATA,
            }
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, AnyError> {
    match cli.command {
        Cmd::List => {
            for m in unifinsler::catalog() {
                writeln!(
                    out,
                    "{:20} phi = {:28} guard: {}",
                    m.name,
                    m.body.to_string(),
                    m.guard.describe()
                )?;
            }
            Ok(EXIT_OK)
        }
        Cmd::Check {
            metric,
            points,
            format,
            strictness_eps,
        } => cmd_check(metric, points, &format, strictness_eps, out),
        Cmd::Sweep {
            metric,
            t_range,
            s_range,
            grid,
            workers,
            strictness_eps,
        } => cmd_sweep(
            metric,
            &t_range,
            &s_range,
            grid,
            workers,
            strictness_eps,
            out,
        ),
        Cmd::Curvature {
            metric,
            points,
            grid,
            t_range,
            s_range,
        } => cmd_curvature(metric, points, grid, t_range, s_range, out),
        Cmd::Geodesic {
            metric,
            x0,
            u0,
            h,
            steps,
        } => cmd_geodesic(metric, &x0, &u0, h, steps, out),
        Cmd::SphereLength {
            metric,
            alpha,
            segments,
            normalize,
        } => cmd_sphere_length(metric, alpha, segments, normalize, out),
    }
}

fn emit(output: &Option<PathBuf>, out: &mut dyn Write, body: &str) -> Result<(), AnyError> {
    match output {
        Some(path) => {
            let mut f = File::create(path)?;
            f.write_all(body.as_bytes())?;
        }
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn usage(msg: impl Into<String>) -> AnyError {
    Box::new(CoreError::InvalidInvariants(msg.into()))
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), AnyError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("{what} must be 'a,b', got '{text}'")));
    }
    let a: f64 = parts[0].trim().parse()?;
    let b: f64 = parts[1].trim().parse()?;
    Ok((a, b))
}

fn parse_reals(text: &str) -> Result<Vec<f64>, AnyError> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

/// One complex literal: "1.5", "-2i", "i", "0.4+0.1i", "0.4-0.1i".
fn parse_complex(text: &str) -> Result<Complex64, AnyError> {
    let src = text.trim().replace(' ', "");
    if src.is_empty() {
        return Err(usage("empty complex literal"));
    }
    if !src.ends_with('i') {
        return Ok(Complex64::new(src.parse()?, 0.0));
    }
    let body = &src[..src.len() - 1];
    // Find a +/- separating real and imaginary parts (not leading, not an
    // exponent sign).
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse()?;
            let im_text = &body[k..];
            let im: f64 = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_text.parse()?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                _ => body.parse()?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn parse_zv(text: &str, n: usize) -> Result<PointDirection, AnyError> {
    let halves: Vec<&str> = text.split(';').collect();
    if halves.len() != 2 {
        return Err(usage(format!(
            "--point must be 'z1,..;v1,..', got '{text}'"
        )));
    }
    let z: Vec<Complex64> = halves[0]
        .split(',')
        .map(parse_complex)
        .collect::<Result<_, _>>()?;
    let v: Vec<Complex64> = halves[1]
        .split(',')
        .map(parse_complex)
        .collect::<Result<_, _>>()?;
    if z.len() != n || v.len() != n {
        return Err(usage(format!(
            "--point expects {n} components per vector, got {} and {}",
            z.len(),
            v.len()
        )));
    }
    Ok(PointDirection::new(z, v)?)
}

/// Resolve the requested evaluation points: explicit (t, s) pairs, explicit
/// (z, v) pairs, then the seeded random sample.
fn gather_points(
    metric: &MetricDefn,
    n: usize,
    points: &PointOpts,
) -> Result<Vec<PointDirection>, AnyError> {
    let mut out = Vec::new();
    for text in &points.point_ts {
        let (t, s) = parse_pair(text, "--point-ts")?;
        out.push(PointDirection::from_invariants(n, t, s)?);
    }
    for text in &points.point {
        out.push(parse_zv(text, n)?);
    }
    if let Some(k) = points.random {
        let mut rng = ChaCha8Rng::seed_from_u64(points.seed);
        for _ in 0..k {
            out.push(random_point(metric, n, &mut rng));
        }
    }
    if out.is_empty() {
        return Err(usage(
            "no points requested: pass --point-ts, --point or --random",
        ));
    }
    Ok(out)
}

const CHECK_CSV_HEADER: &str = "t,s,c0,k1,ktilde,c0_plus_t_phis,pseudoconvex,convex";

fn check_row_csv(rep: &ConvexityReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        g17(rep.t),
        g17(rep.s),
        g17(rep.c0),
        g17(rep.k1),
        g17(rep.k_tilde),
        g17(rep.c0_plus_t_phi_s),
        rep.pseudoconvex.as_str(),
        rep.convex.as_str()
    )
}

fn check_row_json(rep: &ConvexityReport) -> String {
    format!(
        "{{\"t\": {}, \"s\": {}, \"c0\": {}, \"k1\": {}, \"ktilde\": {}, \"c0_plus_t_phis\": {}, \"pseudoconvex\": \"{}\", \"convex\": \"{}\"}}",
        g17(rep.t),
        g17(rep.s),
        g17(rep.c0),
        g17(rep.k1),
        g17(rep.k_tilde),
        g17(rep.c0_plus_t_phi_s),
        rep.pseudoconvex.as_str(),
        rep.convex.as_str()
    )
}

fn cmd_check(
    metric: MetricOpt,
    points: PointOpts,
    format: &str,
    strictness_eps: f64,
    out: &mut dyn Write,
) -> Result<i32, AnyError> {
    let m = resolve(&metric.metric)?;
    let pts = gather_points(&m, metric.n, &points)?;
    let reports: Vec<ConvexityReport> = pts
        .iter()
        .map(|p| convexity_report_ts_eps(&m, p.t, p.s, metric.n, strictness_eps))
        .collect::<Result<_, _>>()?;
    let all_convex = reports.iter().all(|r| r.convex.is_positive());
    let body = match format {
        "csv" => {
            let mut body = String::from(CHECK_CSV_HEADER);
            body.push('\n');
            for rep in &reports {
                body.push_str(&check_row_csv(rep));
                body.push('\n');
            }
            body
        }
        "json" => {
            let rows: Vec<String> = reports.iter().map(check_row_json).collect();
            format!(
                "{{\"rows\": [{}], \"all_convex\": {}}}\n",
                rows.join(", "),
                all_convex
            )
        }
        other => return Err(usage(format!("unknown format '{other}' (csv or json)"))),
    };
    emit(&metric.output, out, &body)?;
    Ok(if all_convex { EXIT_OK } else { EXIT_VERDICT })
}

fn default_workers() -> usize {
    std::env::var("UNIFINSLER_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    metric: MetricOpt,
    t_range: &str,
    s_range: &str,
    grid: usize,
    workers: Option<usize>,
    strictness_eps: f64,
    out: &mut dyn Write,
) -> Result<i32, AnyError> {
    let m = resolve(&metric.metric)?;
    let t_range = parse_pair(t_range, "--t-range")?;
    let s_range = parse_pair(s_range, "--s-range")?;
    let workers = workers.unwrap_or_else(default_workers);
    let rows = region_sweep_eps(
        &m,
        t_range,
        s_range,
        grid,
        metric.n,
        workers,
        strictness_eps,
    )?;
    emit(&metric.output, out, &sweep_to_csv(&rows))?;
    Ok(EXIT_OK)
}

fn cmd_curvature(
    metric: MetricOpt,
    points: PointOpts,
    grid: Option<usize>,
    t_range: Option<String>,
    s_range: Option<String>,
    out: &mut dyn Write,
) -> Result<i32, AnyError> {
    let m = resolve(&metric.metric)?;
    let reports: Vec<(f64, f64, _)> = if let Some(grid_n) = grid {
        if grid_n < 2 {
            return Err(usage("--grid must be at least 2"));
        }
        let (t_lo, t_hi) = parse_pair(
            t_range
                .as_deref()
                .ok_or_else(|| usage("--grid needs --t-range"))?,
            "--t-range",
        )?;
        let (s_lo, s_hi) = parse_pair(
            s_range
                .as_deref()
                .ok_or_else(|| usage("--grid needs --s-range"))?,
            "--s-range",
        )?;
        let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64;
        let cells: Vec<(f64, f64)> = (0..grid_n)
            .flat_map(|i| (0..grid_n).map(move |j| (at(t_lo, t_hi, i), at(s_lo, s_hi, j))))
            .filter(|&(t, s)| s <= t)
            .collect();
        par_map_indexed(cells.len(), default_workers(), |i| {
            let (t, s) = cells[i];
            curvature_report_ts(&m, t, s).ok().map(|rep| (t, s, rep))
        })
        .into_iter()
        .flatten()
        .collect()
    } else {
        let pts = gather_points(&m, metric.n, &points)?;
        par_map_indexed(pts.len(), default_workers(), |i| {
            holomorphic_curvature(&m, &pts[i]).map(|rep| (pts[i].t, pts[i].s, rep))
        })
        .into_iter()
        .collect::<Result<_, _>>()?
    };
    emit(&metric.output, out, &curvature_to_csv(&reports))?;
    Ok(EXIT_OK)
}

fn cmd_geodesic(
    metric: MetricOpt,
    x0: &str,
    u0: &str,
    h: f64,
    steps: usize,
    out: &mut dyn Write,
) -> Result<i32, AnyError> {
    let m = resolve(&metric.metric)?;
    let x0 = parse_reals(x0)?;
    let u0 = parse_reals(u0)?;
    if x0.len() != u0.len() || x0.len() != 2 * metric.n {
        return Err(usage(format!(
            "--x0/--u0 must both have 2n = {} components",
            2 * metric.n
        )));
    }
    match integrate_geodesic(&m, &x0, &u0, h, steps) {
        Ok(trace) => {
            emit(&metric.output, out, &trace.to_csv())?;
            Ok(EXIT_OK)
        }
        Err(abort) => {
            // Keep the partial trace, then report the abort as a data error.
            emit(&metric.output, out, &abort.partial.to_csv())?;
            Err(Box::new(CoreError::Domain(abort.to_string())))
        }
    }
}

fn cmd_sphere_length(
    metric: MetricOpt,
    alpha: f64,
    segments: usize,
    normalize: bool,
    out: &mut dyn Write,
) -> Result<i32, AnyError> {
    let mut m = resolve(&metric.metric)?;
    if normalize {
        m = m.normalized()?;
    }
    let exp = polygonal_length(&m, alpha, segments)?;
    let mut body = exp.to_json();
    body.push('\n');
    emit(&metric.output, out, &body)?;
    Ok(EXIT_OK)
}
