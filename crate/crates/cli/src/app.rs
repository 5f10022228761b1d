//! Command line front end. Every subcommand writes its result to `--out` or stdout;
//! failures are reported on stderr as one `error[CODE]: message` line.

use crate::grid::GridSpec;
use crate::output::{encode_png, encode_ppm, stats_json};
use crate::render::{render, Palette, RenderJob, RenderKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use schwarz_core::cnc::{build_cnc, classify_orbit_traced, OrbitVerdict};
use schwarz_core::rays::{trace_ray, DEFAULT_RAY_DEPTH};
use schwarz_core::symbolic::{conjugacy_e, conjugacy_e_inverse, question_mark, RationalAngle};
use schwarz_core::{ComplexPoint, Error};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Longest ray polyline written to JSON; longer traces are thinned evenly.
const MAX_RAY_POINTS: usize = 2048;
const DEFAULT_CONJ_DEPTH: usize = 48;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "USAGE",
            CliError::Domain(e) => e.code(),
            CliError::Io(_) => "IO_ERROR",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Domain(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ppm,
    Png,
    Json,
    Csv,
}

/// Parses `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part in {s:?}"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part in {s:?}"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(Complex64::new(re, im))
}

/// Parses `RE,IM` or `inf`.
pub fn parse_point(s: &str) -> Result<ComplexPoint, String> {
    if s.trim().eq_ignore_ascii_case("inf") {
        Ok(ComplexPoint::Infinity)
    } else {
        parse_complex(s).map(ComplexPoint::Finite)
    }
}

fn parse_angle(s: &str) -> Result<RationalAngle, String> {
    s.parse()
}

/// Parses `N` (square) or `WxH`.
fn parse_px(s: &str) -> Result<(u32, u32), String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad pixel count in {s:?}"));
    match s.split_once(['x', 'X']) {
        Some((w, h)) => Ok((num(w)?, num(h)?)),
        None => num(s).map(|n| (n, n)),
    }
}

#[derive(Debug, Parser)]
#[command(name = "schwarz", version, about = "Dynamics of Schwarz reflections: deltoid and circle-and-cardioid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Grid center RE,IM
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub center: Option<Complex64>,
    /// Horizontal extent of the grid
    #[arg(long, global = true)]
    pub width: Option<f64>,
    /// Pixels: N or WxH
    #[arg(long, global = true, value_parser = parse_px)]
    pub px: Option<(u32, u32)>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub palette: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file: center_re, center_im, width, px, max_iter, palette
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the plane of the deltoid reflection
    Deltoid,
    /// Render the dynamical plane of F_a
    Dyn {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Complex64,
    },
    /// Render the parameter plane
    Param,
    /// Orbit of a point under F_a
    Orbit {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        z: ComplexPoint,
    },
    /// Dynamical ray of F_a at a pre-periodic angle
    Ray {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Complex64,
        #[arg(long, value_parser = parse_angle)]
        angle: RationalAngle,
        /// Period-block repetitions
        #[arg(long, default_value_t = DEFAULT_RAY_DEPTH)]
        depth: usize,
    },
    /// Minkowski question-mark function at P/Q, or a table over denominators up to N
    Qmark {
        #[arg(long, required_unless_present = "max_den", conflicts_with = "max_den")]
        rational: Option<String>,
        #[arg(long)]
        max_den: Option<u64>,
    },
    /// Circle conjugacy E at a circle point, its inverse at an angle, or a sampled table
    ConjE {
        #[arg(long, value_parser = parse_angle, conflicts_with_all = ["point", "samples"])]
        angle: Option<RationalAngle>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, conflicts_with = "samples")]
        point: Option<Complex64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CONJ_DEPTH)]
        depth: usize,
    },
    /// Circumcircle of the cardioid centered at a
    Circum {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        a: Complex64,
    },
}

/// Values a config file may set.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Config {
    pub center_re: Option<f64>,
    pub center_im: Option<f64>,
    pub width: Option<f64>,
    pub px: Option<(u32, u32)>,
    pub max_iter: Option<usize>,
    pub palette: Option<String>,
}

pub fn parse_config(text: &str) -> Result<Config, String> {
    let mut cfg = Config::default();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
        let value = value.trim().trim_matches('"');
        let bad = |what: &str| format!("line {}: bad {what} {value:?}", n + 1);
        match key.trim() {
            "center_re" => cfg.center_re = Some(value.parse().map_err(|_| bad("center_re"))?),
            "center_im" => cfg.center_im = Some(value.parse().map_err(|_| bad("center_im"))?),
            "width" => cfg.width = Some(value.parse().map_err(|_| bad("width"))?),
            "px" => cfg.px = Some(parse_px(value)?),
            "max_iter" => cfg.max_iter = Some(value.parse().map_err(|_| bad("max_iter"))?),
            "palette" => cfg.palette = Some(value.to_string()),
            other => return Err(format!("line {}: unknown key {other:?}", n + 1)),
        }
    }
    Ok(cfg)
}

struct Settings {
    center: Complex64,
    width: f64,
    px: (u32, u32),
    max_iter: usize,
    palette: Palette,
}

/// Defaults for the command, then the config file, then flags.
fn settings(command: &Command, shared: &Shared) -> CliResult<Settings> {
    let (center, width) = match command {
        Command::Dyn { .. } => (Complex64::new(-0.5, 0.0), 6.0),
        Command::Param => (Complex64::new(0.0, 0.0), 3.0),
        _ => (Complex64::new(0.0, 0.0), 4.0),
    };
    let mut s = Settings { center, width, px: (512, 512), max_iter: 500, palette: Palette::Classic };
    if let Some(path) = &shared.config {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg = parse_config(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        s.center = Complex64::new(cfg.center_re.unwrap_or(s.center.re), cfg.center_im.unwrap_or(s.center.im));
        s.width = cfg.width.unwrap_or(s.width);
        s.px = cfg.px.unwrap_or(s.px);
        s.max_iter = cfg.max_iter.unwrap_or(s.max_iter);
        if let Some(p) = cfg.palette {
            s.palette = p.parse().map_err(usage)?;
        }
    }
    s.center = shared.center.unwrap_or(s.center);
    s.width = shared.width.unwrap_or(s.width);
    s.px = shared.px.unwrap_or(s.px);
    s.max_iter = shared.max_iter.unwrap_or(s.max_iter);
    if let Some(p) = &shared.palette {
        s.palette = p.parse().map_err(usage)?;
    }
    if s.max_iter == 0 {
        return Err(usage("max-iter must be at least 1"));
    }
    Ok(s)
}

/// Shortest decimal form with at most 12 fractional digits.
fn fmt_num(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im.abs() <= 1e-12 {
        fmt_num(z.re)
    } else {
        format!("{},{}", fmt_num(z.re), fmt_num(z.im))
    }
}

fn point_json(p: ComplexPoint) -> Value {
    match p {
        ComplexPoint::Infinity => json!("inf"),
        ComplexPoint::Finite(z) => json!([z.re, z.im]),
    }
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn verdict_json(v: &OrbitVerdict) -> Value {
    match v {
        OrbitVerdict::Escaped { rank, word } => json!({"kind": "ESCAPED", "rank": rank, "word": word.symbols()}),
        OrbitVerdict::NonEscaping { cycle: Some(c) } => json!({
            "kind": "NON_ESCAPING",
            "period": c.period,
            "representative": pair(c.representative),
            "multiplier": c.multiplier_magnitude,
            "cycle_kind": c.kind.name(),
        }),
        OrbitVerdict::NonEscaping { cycle: None } => json!({"kind": "NON_ESCAPING"}),
        OrbitVerdict::Undetermined => json!({"kind": "UNDETERMINED"}),
    }
}

fn big_to_string(q: &BigRational) -> String {
    if q.denom() == &1.into() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec(v).expect("JSON values serialize");
    out.push(b'\n');
    out
}

fn csv_bytes(rows: &[(String, String, String)]) -> Vec<u8> {
    let mut out = String::from("input,output,error_bound\n");
    for (i, o, e) in rows {
        out.push_str(&format!("\"{i}\",\"{o}\",{e}\n"));
    }
    out.into_bytes()
}

fn image_command(kind: RenderKind, shared: &Shared, s: &Settings) -> CliResult<Vec<u8>> {
    let grid = GridSpec::new(s.center, s.width, s.px.0, s.px.1).map_err(usage)?;
    let job = RenderJob { kind, grid, max_iter: s.max_iter, palette: s.palette };
    let r = render(&job)?;
    match shared.format.unwrap_or(Format::Ppm) {
        Format::Ppm => Ok(encode_ppm(&r)),
        Format::Png => encode_png(&r).map_err(CliError::Io),
        Format::Json => Ok(json_bytes(&stats_json(&r))),
        Format::Csv => Err(usage("renders are written as ppm, png or json")),
    }
}

fn qmark_command(rational: Option<&str>, max_den: Option<u64>, format: Option<Format>) -> CliResult<Vec<u8>> {
    let mut rows = Vec::new();
    if let Some(text) = rational {
        let (p, q) = text.split_once('/').unwrap_or((text, "1"));
        let p: u64 = p.trim().parse().map_err(|_| usage(format!("bad rational {text:?}")))?;
        let q: u64 = q.trim().parse().map_err(|_| usage(format!("bad rational {text:?}")))?;
        if q == 0 {
            return Err(usage(format!("zero denominator in {text:?}")));
        }
        rows.push((format!("{p}/{q}"), big_to_string(&question_mark(p, q)?)));
    } else {
        let n = max_den.unwrap_or(1).max(1);
        let mut fracs: Vec<(u64, u64)> = (1..=n)
            .flat_map(|q| (0..=q).map(move |p| (p, q)))
            .filter(|&(p, q)| p.gcd(&q) == 1)
            .collect();
        fracs.sort_by(|x, y| (x.0 as u128 * y.1 as u128).cmp(&(y.0 as u128 * x.1 as u128)));
        for (p, q) in fracs {
            rows.push((format!("{p}/{q}"), big_to_string(&question_mark(p, q)?)));
        }
    }
    match format {
        None => Ok(rows.iter().map(|r| format!("{}\n", r.1)).collect::<String>().into_bytes()),
        Some(Format::Csv) => {
            Ok(csv_bytes(&rows.into_iter().map(|(i, o)| (i, o, "0".to_string())).collect::<Vec<_>>()))
        }
        Some(Format::Json) => Ok(json_bytes(&Value::Array(
            rows.into_iter().map(|(i, o)| json!({"input": i, "output": o, "error_bound": 0})).collect(),
        ))),
        Some(_) => Err(usage("qmark writes text, csv or json")),
    }
}

fn conj_e_command(
    angle: Option<RationalAngle>,
    point: Option<Complex64>,
    samples: Option<usize>,
    depth: usize,
    format: Option<Format>,
) -> CliResult<Vec<u8>> {
    // (input, output, error bound)
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    let mut forward = |zeta: Complex64| -> CliResult<()> {
        if zeta.norm() == 0.0 {
            return Err(CliError::Domain(Error::Domain("E is defined on the unit circle".into())));
        }
        let e = conjugacy_e(zeta, depth);
        let out = match &e.exact {
            Some(q) => big_to_string(q),
            None => format!("{}", e.angle),
        };
        rows.push((fmt_complex(zeta / zeta.norm()).to_string(), out, e.error));
        Ok(())
    };
    match (angle, point, samples) {
        (Some(theta), _, _) => {
            let p = conjugacy_e_inverse(theta, depth);
            rows.push((theta.to_string(), format!("{},{}", p.point.re, p.point.im), p.error));
        }
        (None, Some(z), _) => forward(z)?,
        (None, None, Some(n)) => {
            for j in 0..n.max(1) {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n.max(1) as f64;
                forward(Complex64::from_polar(1.0, t))?;
            }
        }
        (None, None, None) => return Err(usage("conj-e needs --angle, --point or --samples")),
    }
    match format {
        None => Ok(rows.iter().map(|(_, o, e)| format!("{o} error={e}\n")).collect::<String>().into_bytes()),
        Some(Format::Csv) => {
            Ok(csv_bytes(&rows.into_iter().map(|(i, o, e)| (i, o, e.to_string())).collect::<Vec<_>>()))
        }
        Some(Format::Json) => Ok(json_bytes(&Value::Array(
            rows.into_iter().map(|(i, o, e)| json!({"input": i, "output": o, "error_bound": e})).collect(),
        ))),
        Some(_) => Err(usage("conj-e writes text, csv or json")),
    }
}

fn execute(cli: &Cli) -> CliResult<Vec<u8>> {
    let shared = &cli.shared;
    let s = settings(&cli.command, shared)?;
    match &cli.command {
        Command::Deltoid => image_command(RenderKind::Deltoid, shared, &s),
        Command::Dyn { a } => image_command(RenderKind::CncDynamical(*a), shared, &s),
        Command::Param => image_command(RenderKind::CncParameter, shared, &s),
        Command::Orbit { a, z } => {
            if !matches!(shared.format, None | Some(Format::Json)) {
                return Err(usage("orbit writes json"));
            }
            let map = build_cnc(*a)?;
            let mut trace = Vec::new();
            let verdict = classify_orbit_traced(&map, *z, s.max_iter, Some(&mut trace));
            Ok(json_bytes(&json!({
                "a": pair(*a),
                "z0": point_json(*z),
                "orbit": trace.into_iter().map(point_json).collect::<Vec<_>>(),
                "verdict": verdict_json(&verdict),
            })))
        }
        Command::Ray { a, angle, depth } => {
            if !matches!(shared.format, None | Some(Format::Json)) {
                return Err(usage("ray writes json"));
            }
            let map = build_cnc(*a)?;
            let ray = trace_ray(&map, *angle, *depth)?;
            let stride = ray.points.len().div_ceil(MAX_RAY_POINTS).max(1);
            let mut points: Vec<Value> = ray.points.iter().step_by(stride).map(|&z| pair(z)).collect();
            if (ray.points.len() - 1) % stride != 0 {
                points.push(pair(*ray.points.last().expect("ray has a base point")));
            }
            Ok(json_bytes(&json!({
                "a": pair(*a),
                "angle": angle.to_string(),
                "word": {"preperiod": ray.word.preperiod, "period": ray.word.period},
                "points": points,
                "landing": ray.landing.map(pair),
                "landing_error": ray.landing_error,
                "converged": ray.converged,
            })))
        }
        Command::Qmark { rational, max_den } => qmark_command(rational.as_deref(), *max_den, shared.format),
        Command::ConjE { angle, point, samples, depth } => {
            conj_e_command(*angle, *point, *samples, *depth, shared.format)
        }
        Command::Circum { a } => {
            let map = build_cnc(*a)?;
            match shared.format {
                None => Ok(format!("r={} alpha={}\n", fmt_num(map.r_a), fmt_complex(map.alpha_a)).into_bytes()),
                Some(Format::Json) => Ok(json_bytes(&json!({
                    "a": pair(*a),
                    "r": map.r_a,
                    "alpha": pair(map.alpha_a),
                    "tangency_angle": map.tangency_angle,
                }))),
                Some(_) => Err(usage("circum writes text or json")),
            }
        }
    }
}

fn emit(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let summary: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(stderr, "error[USAGE]: {}", summary.join(" ").trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    match execute(&cli).and_then(|bytes| emit(&bytes, cli.shared.out.as_deref(), stdout)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {}", e.code(), e.message().replace('\n', " "));
            e.exit_code()
        }
    }
}
