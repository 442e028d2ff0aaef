//! Command-line front end: classification tables, moment-polytope geometry,
//! verification suites and parameter sweeps, with JSON and CSV output.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure,
//! 2 invalid or ambiguous input, 3 capability cap (vertex enumeration).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rayon::prelude::*;
use serde_json::{json, Value};

use rscompact::alcove::AlcovePoint;
use rscompact::coupling::{self, Classification, Coupling};
use rscompact::error::Error;
use rscompact::verify::{self, CheckStatus, Suite, SuiteConfig};
use rscompact::zpolytope::{self, Polytope, VertexPoint};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rscompact",
    version,
    about = "Compactified trigonometric Ruijsenaars-Schneider systems: coupling classification, moment polytopes, constraint verification",
    after_help = "Couplings are given as --y r/s, meaning y = (r/s)*pi, and are then handled in \
exact rational arithmetic; floating-point input needs an explicit rad: prefix (--y rad:0.9425). \
Alcove points and vertex coordinates are printed in units of pi."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// matrix size n of SU(n)
    #[arg(long)]
    n: usize,
    /// coupling y: "r/s" for (r/s)*pi, or "rad:<float>" for radians
    #[arg(long)]
    y: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the coupling as irregular / type_i / type_ii
    Classify {
        #[command(flatten)]
        common: CommonOpts,
        /// include the full table of type (i) intervals for this n (JSON only)
        #[arg(long)]
        table: bool,
    },
    /// Moment-polytope geometry of A_y
    Geometry {
        #[command(subcommand)]
        what: GeometryCmd,
    },
    /// Run residual verification suites on seeded random samples
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// which suite to run
        #[arg(value_parser = ["all", "lax", "moment", "duality", "toric", "zsum"], default_value = "all")]
        suite: String,
        /// random samples per check
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// master RNG seed; per-sample seeds are derived from (seed, index)
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// pass/fail tolerance for the residual checks
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// symplectic scale of the toric model
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Sweep y over a grid or over exact rationals, one CSV row per value
    Scan {
        /// matrix size n of SU(n)
        #[arg(long)]
        n: usize,
        /// number of uniform grid points strictly inside (y-min, y-max)
        #[arg(long, conflicts_with = "rationals_only")]
        steps: Option<usize>,
        /// sweep all exact rationals y = (r/s)*pi with s <= this bound
        #[arg(long = "rationals-only")]
        rationals_only: Option<i64>,
        /// lower end of the sweep window, units of pi
        #[arg(long, default_value_t = 0.0)]
        y_min: f64,
        /// upper end of the sweep window, units of pi
        #[arg(long, default_value_t = 1.0)]
        y_max: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Enumerate the vertices of A_y (exact rationals when y is exact)
    Vertices {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Membership of a point in A_y+ together with its z-vector
    Membership {
        #[command(flatten)]
        common: CommonOpts,
        /// alcove point, comma-separated, in units of pi (e.g. 0.25,0.25,0.5)
        #[arg(long, conflicts_with = "xi_rad")]
        xi: Option<String>,
        /// alcove point, comma-separated, in radians
        #[arg(long = "xi-rad")]
        xi_rad: Option<String>,
    },
    /// Fixed points of the torus action over the regular part of A_y
    FixedPoints {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Per-vertex edge counts and the Delzant edge criterion
    Delzant {
        #[command(flatten)]
        common: CommonOpts,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EnumerationCap { .. } => EXIT_CAP,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn parse_coupling(n: usize, y: &str) -> Result<Coupling, Failure> {
    if let Some(rad) = y.strip_prefix("rad:") {
        let v: f64 = rad
            .parse()
            .map_err(|_| Failure::invalid(format!("cannot parse radians from '{rad}'")))?;
        return Ok(Coupling::from_radians(n, v)?);
    }
    let (r, s) = y
        .split_once('/')
        .ok_or_else(|| Failure::invalid(format!("expected r/s or rad:<float>, got '{y}'")))?;
    let r: i64 = r
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("bad numerator '{r}'")))?;
    let s: i64 = s
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("bad denominator '{s}'")))?;
    Ok(Coupling::exact(n, r, s)?)
}

fn rational_str(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn vertex_json(v: &VertexPoint) -> Value {
    match &v.coords_pi {
        Some(coords) => Value::Array(coords.iter().map(|r| json!(rational_str(*r))).collect()),
        None => Value::Array(
            v.coords
                .iter()
                .map(|x| json!(x / std::f64::consts::PI))
                .collect(),
        ),
    }
}

fn vertex_csv(v: &VertexPoint) -> String {
    match &v.coords_pi {
        Some(coords) => coords
            .iter()
            .map(|r| rational_str(*r))
            .collect::<Vec<_>>()
            .join(";"),
        None => v
            .coords
            .iter()
            .map(|x| format!("{}", x / std::f64::consts::PI))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn emit(out: &Option<PathBuf>, payload: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn classification_fields(verdict: &Classification) -> (Value, Value, Value) {
    match verdict {
        Classification::TypeI { p, q, interval } => (
            json!(p),
            json!(q),
            json!([rational_str(interval.a), rational_str(interval.b)]),
        ),
        _ => (Value::Null, Value::Null, Value::Null),
    }
}

fn cmd_classify(common: &CommonOpts, table: bool) -> Result<(), Failure> {
    let c = parse_coupling(common.n, &common.y)?;
    let regular = coupling::is_regular(&c);
    let verdict = coupling::classify(&c)?;
    let (p, q, interval) = classification_fields(&verdict);

    let payload = match common.format {
        Format::Json => {
            let mut report = json!({
                "n": common.n,
                "y": common.y,
                "y_over_pi": c.over_pi(),
                "regular": regular,
                "verdict": verdict.verdict_str(),
                "p": p,
                "q": q,
                "interval": interval,
            });
            if table {
                let rows: Vec<Value> = coupling::type_one_intervals(common.n)
                    .into_iter()
                    .map(|iv| {
                        json!({
                            "p": iv.p,
                            "q": iv.q,
                            "a": rational_str(iv.a),
                            "b": rational_str(iv.b),
                        })
                    })
                    .collect();
                report["intervals"] = Value::Array(rows);
            }
            serde_json::to_string_pretty(&report).expect("serializable")
        }
        Format::Csv => {
            if table {
                return Err(Failure::invalid("--table is only available with --format json"));
            }
            let mut s = String::from("n,y,regular,verdict,p,q,a,b\n");
            let (a, b) = match &verdict {
                Classification::TypeI { interval, .. } => {
                    (rational_str(interval.a), rational_str(interval.b))
                }
                _ => (String::new(), String::new()),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                common.n,
                common.y,
                regular,
                verdict.verdict_str(),
                p.as_i64().map(|v| v.to_string()).unwrap_or_default(),
                q.as_i64().map(|v| v.to_string()).unwrap_or_default(),
                a,
                b
            );
            s
        }
    };
    emit(&common.out, &payload)
}

fn polytope_for(common: &CommonOpts) -> Result<(Coupling, Polytope), Failure> {
    let c = parse_coupling(common.n, &common.y)?;
    let poly = zpolytope::ay_polytope(&c)?;
    Ok((c, poly))
}

fn cmd_geometry_vertices(common: &CommonOpts) -> Result<(), Failure> {
    let (c, poly) = polytope_for(common)?;
    let payload = match common.format {
        Format::Json => {
            let report = json!({
                "n": common.n,
                "y": common.y,
                "k": zpolytope::floor_k(&c),
                "exact": poly.is_exact(),
                "n_vertices": poly.vertices().len(),
                "vertices_pi": poly.vertices().iter().map(vertex_json).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&report).expect("serializable")
        }
        Format::Csv => {
            let mut s = String::from("index,coords_pi\n");
            for (i, v) in poly.vertices().iter().enumerate() {
                let _ = writeln!(s, "{i},{}", vertex_csv(v));
            }
            s
        }
    };
    emit(&common.out, &payload)
}

fn parse_point(n: usize, xi: &Option<String>, xi_rad: &Option<String>) -> Result<AlcovePoint, Failure> {
    let (raw, scale) = match (xi, xi_rad) {
        (Some(v), None) => (v, std::f64::consts::PI),
        (None, Some(v)) => (v, 1.0),
        _ => return Err(Failure::invalid("membership needs exactly one of --xi / --xi-rad")),
    };
    let coords: Result<Vec<f64>, _> = raw.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|_| Failure::invalid(format!("cannot parse point '{raw}'")))?;
    if coords.len() != n {
        return Err(Failure::invalid(format!(
            "point has {} components, expected n = {n}",
            coords.len()
        )));
    }
    Ok(AlcovePoint::with_tol(
        coords.into_iter().map(|x| x * scale).collect(),
        1e-6,
    )?)
}

fn cmd_geometry_membership(
    common: &CommonOpts,
    xi: &Option<String>,
    xi_rad: &Option<String>,
) -> Result<(), Failure> {
    let c = parse_coupling(common.n, &common.y)?;
    if !coupling::is_regular(&c) {
        return Err(Failure::from(Error::IrregularCoupling));
    }
    let point = parse_point(common.n, xi, xi_rad)?;
    let inside = zpolytope::in_ay_plus(&point, &c);
    let z = zpolytope::z_vector(&point, &c);
    let (z_values, z_min, z_sum) = match &z {
        Ok(z) => (
            Value::Array(z.values().iter().map(|v| json!(v)).collect()),
            json!(z.min()),
            json!(z.sum()),
        ),
        Err(_) => (Value::Null, Value::Null, Value::Null),
    };
    let payload = match common.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": common.n,
            "y": common.y,
            "xi_pi": point.coords().iter().map(|x| x / std::f64::consts::PI).collect::<Vec<_>>(),
            "regular_point": point.regular(),
            "in_ay_plus": inside,
            "z": z_values,
            "z_min": z_min,
            "z_sum": z_sum,
        }))
        .expect("serializable"),
        Format::Csv => {
            let mut s = String::from("n,y,regular_point,in_ay_plus,z_min,z_sum\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                common.n,
                common.y,
                point.regular(),
                inside,
                z.as_ref().map(|z| z.min().to_string()).unwrap_or_default(),
                z.as_ref().map(|z| z.sum().to_string()).unwrap_or_default(),
            );
            s
        }
    };
    emit(&common.out, &payload)
}

fn cmd_geometry_fixed_points(common: &CommonOpts) -> Result<(), Failure> {
    let c = parse_coupling(common.n, &common.y)?;
    let points = zpolytope::fixed_points(&c)?;
    let payload = match common.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": common.n,
            "y": common.y,
            "count": points.len(),
            "points_pi": points
                .iter()
                .map(|p| p.coords().iter().map(|x| x / std::f64::consts::PI).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }))
        .expect("serializable"),
        Format::Csv => {
            let mut s = String::from("index,coords_pi\n");
            for (i, p) in points.iter().enumerate() {
                let row = p
                    .coords()
                    .iter()
                    .map(|x| format!("{}", x / std::f64::consts::PI))
                    .collect::<Vec<_>>()
                    .join(";");
                let _ = writeln!(s, "{i},{row}");
            }
            s
        }
    };
    emit(&common.out, &payload)
}

fn cmd_geometry_delzant(common: &CommonOpts) -> Result<(), Failure> {
    let (_, poly) = polytope_for(common)?;
    let counts = zpolytope::delzant_edge_counts(&poly)?;
    let target = common.n - 1;
    let delzant = counts.iter().all(|(_, count)| *count == target);
    let payload = match common.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": common.n,
            "y": common.y,
            "delzant": delzant,
            "edge_target": target,
            "vertices": counts
                .iter()
                .map(|(v, count)| json!({
                    "coords_pi": vertex_json(v),
                    "edge_count": count,
                    "regular": v.regular(),
                }))
                .collect::<Vec<_>>(),
        }))
        .expect("serializable"),
        Format::Csv => {
            let mut s = String::from("index,coords_pi,edge_count,regular\n");
            for (i, (v, count)) in counts.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{count},{}", vertex_csv(v), v.regular());
            }
            s
        }
    };
    emit(&common.out, &payload)
}

fn cmd_verify(
    common: &CommonOpts,
    suite: &str,
    samples: usize,
    seed: u64,
    tol: f64,
    lambda: f64,
) -> Result<bool, Failure> {
    if samples < 1 {
        return Err(Failure::invalid("--samples must be at least 1"));
    }
    if tol <= 0.0 {
        return Err(Failure::invalid("--tol must be positive"));
    }
    let c = parse_coupling(common.n, &common.y)?;
    let suite_kind = Suite::parse(suite).ok_or_else(|| Failure::invalid("unknown suite"))?;
    let cfg = SuiteConfig {
        samples,
        seed,
        tol,
        lambda,
    };
    let outcomes = verify::run_suite(&c, suite_kind, &cfg)?;
    let pass = outcomes.iter().all(|o| o.passed());

    let payload = match common.format {
        Format::Json => {
            let checks: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    let status = match &o.status {
                        CheckStatus::Pass => json!("pass"),
                        CheckStatus::Fail => json!("fail"),
                        CheckStatus::Skipped(reason) => json!({ "skipped": reason }),
                    };
                    let mut row = json!({
                        "name": o.name,
                        "samples": o.samples,
                        "max_residual": o.max_residual,
                        "tol": o.tol,
                        "status": status,
                    });
                    if let Some(f) = &o.failing {
                        row["failing_sample"] = json!({
                            "index": f.index,
                            "xi": f.xi,
                            "theta": f.theta,
                            "residual": f.residual,
                        });
                    }
                    row
                })
                .collect();
            serde_json::to_string_pretty(&json!({
                "n": common.n,
                "y": common.y,
                "suite": suite,
                "samples": samples,
                "seed": seed,
                "tol": tol,
                "lambda": lambda,
                "checks": checks,
                "pass": pass,
            }))
            .expect("serializable")
        }
        Format::Csv => {
            let mut s = String::from("name,samples,max_residual,tol,status\n");
            for o in &outcomes {
                let status = match &o.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skipped(_) => "skipped",
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{status}",
                    o.name, o.samples, o.max_residual, o.tol
                );
            }
            s
        }
    };
    emit(&common.out, &payload)?;
    Ok(pass)
}

struct ScanRow {
    y_label: String,
    regular: bool,
    verdict: String,
    p: Option<i64>,
    q: Option<i64>,
    n_vertices: Option<usize>,
    delzant: Option<bool>,
    min_vertex_component: Option<String>,
}

fn scan_row(n: usize, c: &Coupling, y_label: String) -> ScanRow {
    let regular = coupling::is_regular(c);
    let verdict = match coupling::classify(c) {
        Ok(v) => v,
        Err(_) => {
            return ScanRow {
                y_label,
                regular,
                verdict: "ambiguous".into(),
                p: None,
                q: None,
                n_vertices: None,
                delzant: None,
                min_vertex_component: None,
            }
        }
    };
    let (p, q) = match &verdict {
        Classification::TypeI { p, q, .. } => (Some(*p), Some(*q)),
        _ => (None, None),
    };
    let mut n_vertices = None;
    let mut delzant = None;
    let mut min_vertex_component = None;
    if regular && n <= zpolytope::ENUMERATION_CAP {
        if let Ok(poly) = zpolytope::ay_polytope(c) {
            n_vertices = Some(poly.vertices().len());
            if let Ok(counts) = zpolytope::delzant_edge_counts(&poly) {
                delzant = Some(counts.iter().all(|(_, count)| *count == n - 1));
            }
            min_vertex_component = poly
                .vertices()
                .iter()
                .map(|v| v.min_component_pi())
                .fold(None, |acc: Option<f64>, m| {
                    Some(acc.map_or(m, |a| a.min(m)))
                })
                .map(|m| format!("{m}"));
        }
    }
    ScanRow {
        y_label,
        regular,
        verdict: verdict.verdict_str().into(),
        p,
        q,
        n_vertices,
        delzant,
        min_vertex_component,
    }
}

fn cmd_scan(
    n: usize,
    steps: Option<usize>,
    rationals_only: Option<i64>,
    y_min: f64,
    y_max: f64,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::invalid("n must be at least 2"));
    }
    if !(0.0 <= y_min && y_min < y_max && y_max <= 1.0) {
        return Err(Failure::invalid("need 0 <= y-min < y-max <= 1 (units of pi)"));
    }

    let rows: Vec<ScanRow> = if let Some(s_max) = rationals_only {
        if s_max < 2 {
            return Err(Failure::invalid("--rationals-only bound must be at least 2"));
        }
        let mut values: Vec<Rational64> = Vec::new();
        for s in 2..=s_max {
            for r in 1..s {
                if num_integer::gcd(r, s) == 1 {
                    let v = Rational64::new(r, s);
                    let f = *v.numer() as f64 / *v.denom() as f64;
                    if f > y_min && f < y_max {
                        values.push(v);
                    }
                }
            }
        }
        values.sort();
        values.dedup();
        values
            .par_iter()
            .map(|v| {
                let c = Coupling::exact(n, *v.numer(), *v.denom()).expect("0 < r/s < 1");
                scan_row(n, &c, rational_str(*v))
            })
            .collect()
    } else {
        let steps = steps.ok_or_else(|| Failure::invalid("need --steps or --rationals-only"))?;
        if steps < 1 {
            return Err(Failure::invalid("--steps must be at least 1"));
        }
        (0..steps)
            .into_par_iter()
            .map(|i| {
                let t = y_min + (i + 1) as f64 * (y_max - y_min) / (steps + 1) as f64;
                let c = Coupling::from_radians(n, t * std::f64::consts::PI)
                    .expect("grid point inside (0, pi)");
                scan_row(n, &c, format!("{t}"))
            })
            .collect()
    };

    let payload = match format {
        Format::Csv => {
            let mut s =
                String::from("y,regular,verdict,p,q,n_vertices,delzant,min_vertex_component\n");
            for row in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    row.y_label,
                    row.regular,
                    row.verdict,
                    row.p.map(|v| v.to_string()).unwrap_or_default(),
                    row.q.map(|v| v.to_string()).unwrap_or_default(),
                    row.n_vertices.map(|v| v.to_string()).unwrap_or_default(),
                    row.delzant.map(|v| v.to_string()).unwrap_or_default(),
                    row.min_vertex_component.clone().unwrap_or_default(),
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "y": row.y_label,
                        "regular": row.regular,
                        "verdict": row.verdict,
                        "p": row.p,
                        "q": row.q,
                        "n_vertices": row.n_vertices,
                        "delzant": row.delzant,
                        "min_vertex_component": row.min_vertex_component,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable")
        }
    };
    emit(out, &payload)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Classify { common, table } => {
            cmd_classify(common, *table)?;
            Ok(0)
        }
        Command::Geometry { what } => {
            match what {
                GeometryCmd::Vertices { common } => cmd_geometry_vertices(common)?,
                GeometryCmd::Membership { common, xi, xi_rad } => {
                    cmd_geometry_membership(common, xi, xi_rad)?
                }
                GeometryCmd::FixedPoints { common } => cmd_geometry_fixed_points(common)?,
                GeometryCmd::Delzant { common } => cmd_geometry_delzant(common)?,
            }
            Ok(0)
        }
        Command::Verify {
            common,
            suite,
            samples,
            seed,
            tol,
            lambda,
        } => {
            let pass = cmd_verify(common, suite, *samples, *seed, *tol, *lambda)?;
            Ok(if pass { 0 } else { EXIT_VERIFY_FAILED })
        }
        Command::Scan {
            n,
            steps,
            rationals_only,
            y_min,
            y_max,
            format,
            out,
        } => {
            cmd_scan(*n, *steps, *rationals_only, *y_min, *y_max, *format, out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
