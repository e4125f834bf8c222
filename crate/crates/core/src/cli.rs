//! Command-line front end: flag and TOML parsing, built-in problems and CSV
//! output. The binary is a thin wrapper around [`main_with_args`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Deserialize;

use crate::analysis::{
    consistency_order, convergence_table_with, stability_check, ConsistencyLadder, Sweep,
};
use crate::discretize::{BeamData, BeamParams, BeamProblem, DtRule, Grid, InitialMoment};
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::stepper::{solve, SolveOptions};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "COMPACT_BEAM_THREADS";

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const ASSERTION: i32 = 2;
    pub const IO: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

/// A built-in manufactured problem on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Builtin {
    pub id: u8,
    pub u_exact: &'static str,
    pub params: BeamParams,
}

pub const BUILTINS: [Builtin; 3] = [
    Builtin {
        id: 1,
        u_exact: "sin(pi*x)*cos(pi*t)",
        params: BeamParams {
            ei: 98.0,
            rho: 0.685,
            c: 0.75,
        },
    },
    Builtin {
        id: 2,
        u_exact: "sinh(t)*cos(pi*x)",
        params: BeamParams {
            ei: 1.0,
            rho: 1.0,
            c: 1.0,
        },
    },
    Builtin {
        id: 3,
        u_exact: "exp(-t)*sin(pi*x)",
        params: BeamParams {
            ei: 98.0,
            rho: 0.68,
            c: 7.5,
        },
    },
];

pub fn builtin(id: u8) -> Option<Builtin> {
    BUILTINS.iter().copied().find(|b| b.id == id)
}

impl Builtin {
    pub fn problem(&self, time: f64) -> Result<BeamProblem> {
        self.problem_with(self.params, time)
    }

    pub fn problem_with(&self, params: BeamParams, time: f64) -> Result<BeamProblem> {
        BeamProblem::manufactured(parse(self.u_exact)?, params, 1.0, time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Converge,
    Stability,
    Consistency,
}

impl Command {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "solve" => Some(Command::Solve),
            "converge" => Some(Command::Converge),
            "stability" => Some(Command::Stability),
            "consistency" => Some(Command::Consistency),
            _ => None,
        }
    }
}

/// Where the problem came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Builtin(u8),
    Manufactured(String),
    Custom,
}

/// A validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub source: ProblemSource,
    /// Problem with its horizon set to `t_eval`.
    pub problem: BeamProblem,
    pub t_eval: f64,
    pub nx: usize,
    pub ladder: Vec<usize>,
    pub dt: DtRule,
    pub stride: Option<usize>,
    pub initial_moment: InitialMoment,
    pub consistency: ConsistencyLadder,
    pub output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Raw schema shared by the TOML file and the flags.

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<String>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub problem: RawProblem,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub consistency: RawConsistency,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub example: Option<i64>,
    pub u_exact: Option<String>,
    pub xi1: Option<String>,
    pub xi2: Option<String>,
    pub mu0: Option<String>,
    pub mu1: Option<String>,
    pub mu2: Option<String>,
    pub mu3: Option<String>,
    pub f: Option<String>,
    pub ei: Option<f64>,
    pub rho: Option<f64>,
    pub c: Option<f64>,
    pub length: Option<f64>,
    /// Final time, which is also the evaluation time.
    pub time: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub nx: Option<i64>,
    pub ladder: Option<Vec<i64>>,
    pub dt: Option<RawDt>,
    pub stride: Option<i64>,
    pub initial_moment: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RawDt {
    Value(f64),
    Rule(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConsistency {
    pub temporal_nx: Option<i64>,
    pub temporal_dts: Option<Vec<f64>>,
}

/// Parse a TOML run description.
pub fn load_config_str(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| Error::config(toml_field(text, &e), e.message().to_string()))?;
    validate(raw)
}

/// Dotted path of the key an error points at, from its source span.
fn toml_field(text: &str, err: &toml::de::Error) -> String {
    let Some(span) = err.span() else {
        return "<document>".into();
    };
    let before = &text[..span.start.min(text.len())];
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[line_start..]
        .find('\n')
        .map_or(text.len(), |i| line_start + i);
    let line = &text[line_start..line_end];
    let table = before[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('[') && l.ends_with(']'))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim());
    let key = line.split('=').next().unwrap_or("").trim();
    match (table, key.is_empty() || line.trim_start().starts_with('[')) {
        (_, true) => line
            .trim()
            .trim_matches(|c| c == '[' || c == ']')
            .to_string(),
        (Some(t), false) => format!("{t}.{key}"),
        (None, false) => key.to_string(),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    load_config_str(&std::fs::read_to_string(path)?)
}

fn count(field: &str, v: i64, min: i64) -> Result<usize> {
    if v < min {
        return Err(Error::config(
            field,
            format!("must be at least {min}, got {v}"),
        ));
    }
    Ok(v as usize)
}

fn expr(field: &str, src: &str) -> Result<Expr> {
    parse(src).map_err(|e| Error::config(field, format!("{e} in `{src}`")))
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be positive, got {v}")))
    }
}

fn build_problem(p: &RawProblem, time: f64) -> Result<(ProblemSource, BeamProblem)> {
    let custom = [&p.xi1, &p.xi2, &p.mu0, &p.mu1, &p.mu2, &p.mu3, &p.f];
    let has_custom = custom.iter().any(|e| e.is_some());
    let sources = p.example.is_some() as usize + p.u_exact.is_some() as usize + has_custom as usize;
    if sources != 1 {
        return Err(Error::config(
            "problem",
            "give exactly one of `example`, `u_exact` or the data expressions xi1, xi2, mu0..mu3, f",
        ));
    }
    let length = positive("problem.length", p.length.unwrap_or(1.0))?;
    let explicit = |base: Option<BeamParams>| -> Result<BeamParams> {
        let pick = |field: &str, v: Option<f64>, d: Option<f64>| {
            v.or(d).ok_or_else(|| {
                Error::config(format!("problem.{field}"), "required for custom problems")
            })
        };
        Ok(BeamParams::new(
            pick("ei", p.ei, base.map(|b| b.ei))?,
            pick("rho", p.rho, base.map(|b| b.rho))?,
            pick("c", p.c, base.map(|b| b.c))?,
        ))
    };
    if let Some(id) = p.example {
        let b = u8::try_from(id).ok().and_then(builtin).ok_or_else(|| {
            Error::config(
                "problem.example",
                format!("unknown example {id}, expected 1, 2 or 3"),
            )
        })?;
        if p.length.is_some_and(|l| l != 1.0) {
            return Err(Error::config(
                "problem.length",
                "built-in examples live on [0, 1]",
            ));
        }
        let params = explicit(Some(b.params))?;
        return Ok((ProblemSource::Builtin(b.id), b.problem_with(params, time)?));
    }
    let params = explicit(None)?;
    if let Some(src) = &p.u_exact {
        let u = expr("problem.u_exact", src)?;
        return Ok((
            ProblemSource::Manufactured(src.clone()),
            BeamProblem::manufactured(u, params, length, time)?,
        ));
    }
    let names = ["xi1", "xi2", "mu0", "mu1", "mu2", "mu3", "f"];
    let mut exprs = Vec::with_capacity(7);
    for (name, src) in names.iter().zip(custom) {
        let field = format!("problem.{name}");
        let src = src
            .as_deref()
            .ok_or_else(|| Error::config(&field, "required when giving data expressions"))?;
        exprs.push(expr(&field, src)?);
    }
    let mut it = exprs.into_iter();
    let mut next = || it.next().expect("seven expressions");
    let data = BeamData {
        params,
        length,
        time,
        u_exact: None,
        xi1: next(),
        xi2: next(),
        mu0: next(),
        mu1: next(),
        mu2: next(),
        mu3: next(),
        f: next(),
    };
    Ok((ProblemSource::Custom, BeamProblem::new(data)?))
}

/// Validate a raw description and apply per-command defaults.
pub fn validate(raw: RawConfig) -> Result<RunConfig> {
    let name = raw
        .command
        .as_deref()
        .ok_or_else(|| Error::config("command", "missing"))?;
    let command = Command::from_name(name).ok_or_else(|| {
        Error::config(
            "command",
            format!("unknown command `{name}`, expected solve, converge, stability or consistency"),
        )
    })?;
    let t_eval = positive("problem.time", raw.problem.time.unwrap_or(1.0))?;
    let (source, problem) = build_problem(&raw.problem, t_eval)?;

    let g = &raw.grid;
    let nx = count("grid.nx", g.nx.unwrap_or(32), 3)?;
    let ladder = match &g.ladder {
        Some(l) => l
            .iter()
            .enumerate()
            .map(|(i, v)| count(&format!("grid.ladder[{i}]"), *v, 3))
            .collect::<Result<Vec<_>>>()?,
        None => match command {
            Command::Consistency => ConsistencyLadder::default().spatial,
            _ => Vec::new(),
        },
    };
    if ladder.is_empty() && matches!(command, Command::Converge | Command::Consistency) {
        return Err(Error::config("grid.ladder", "must list at least one Nx"));
    }
    let dt = match &g.dt {
        None => DtRule::SquareOfH,
        Some(RawDt::Rule(s)) if s == "h2" => DtRule::SquareOfH,
        Some(RawDt::Rule(s)) => match s.parse::<f64>() {
            Ok(v) => DtRule::Fixed(positive("grid.dt", v)?),
            Err(_) => {
                return Err(Error::config(
                    "grid.dt",
                    format!("expected `h2` or a number, got `{s}`"),
                ))
            }
        },
        Some(RawDt::Value(v)) => DtRule::Fixed(positive("grid.dt", *v)?),
    };
    let stride = g.stride.map(|s| count("grid.stride", s, 1)).transpose()?;
    let initial_moment = match g.initial_moment.as_deref() {
        None | Some("exact") => InitialMoment::Exact,
        Some("compact") => InitialMoment::Compact,
        Some(other) => {
            return Err(Error::config(
                "grid.initial_moment",
                format!("expected `exact` or `compact`, got `{other}`"),
            ))
        }
    };
    let defaults = ConsistencyLadder::default();
    let consistency = ConsistencyLadder {
        spatial: ladder.clone(),
        temporal_nx: match raw.consistency.temporal_nx {
            Some(v) => count("consistency.temporal_nx", v, 3)?,
            None => defaults.temporal_nx,
        },
        temporal_dts: match &raw.consistency.temporal_dts {
            Some(v) => v
                .iter()
                .enumerate()
                .map(|(i, d)| positive(&format!("consistency.temporal_dts[{i}]"), *d))
                .collect::<Result<Vec<_>>>()?,
            None => defaults.temporal_dts,
        },
    };
    Ok(RunConfig {
        command,
        source,
        problem,
        t_eval,
        nx,
        ladder,
        dt,
        stride,
        initial_moment,
        consistency,
        output: raw.output,
    })
}

// ---------------------------------------------------------------------------
// Flags.

#[derive(Debug, Parser)]
#[command(
    name = "compact-beam",
    version,
    about = "Compact finite differences with Crank–Nicolson for the damped beam equation",
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    /// Run description in TOML instead of a subcommand.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<CommandArgs>,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Integrate one problem and print the displacement.
    Solve(SolveArgs),
    /// Error table and observed orders along a mesh ladder.
    Converge(ConvergeArgs),
    /// Spectrum of the semi-discrete operator and of the amplification matrix.
    Stability(StabilityArgs),
    /// Truncation residual of the scheme on the exact solution.
    Consistency(ConsistencyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Built-in example (1, 2 or 3).
    #[arg(long)]
    pub example: Option<i64>,
    /// Exact solution u(x, t); data and forcing are derived from it.
    #[arg(long)]
    pub u_exact: Option<String>,
    #[arg(long)]
    pub xi1: Option<String>,
    #[arg(long)]
    pub xi2: Option<String>,
    #[arg(long)]
    pub mu0: Option<String>,
    #[arg(long)]
    pub mu1: Option<String>,
    #[arg(long)]
    pub mu2: Option<String>,
    #[arg(long)]
    pub mu3: Option<String>,
    /// Forcing f(x, t).
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub ei: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub damping: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MomentArg {
    Exact,
    Compact,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 32)]
    pub nx: i64,
    /// `h2` or a step size.
    #[arg(long, default_value = "h2")]
    pub dt: String,
    /// Final time.
    #[arg(long = "t", default_value_t = 1.0)]
    pub t: f64,
    /// Also print every STRIDE-th time level.
    #[arg(long)]
    pub stride: Option<i64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub initial_moment: MomentArg,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', required = true, num_args = 0..)]
    pub ladder: Vec<i64>,
    #[arg(long, default_value = "h2")]
    pub dt: String,
    #[arg(long = "t", default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub initial_moment: MomentArg,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// One or more meshes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub nx: Vec<i64>,
    #[arg(long, default_value = "h2")]
    pub dt: String,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    pub ladder: Vec<i64>,
    #[arg(long, default_value_t = 256)]
    pub temporal_nx: i64,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025")]
    pub temporal_dts: Vec<f64>,
    #[arg(long = "t", default_value_t = 1.0)]
    pub t: f64,
}

impl ProblemArgs {
    fn into_raw(self, time: Option<f64>) -> (RawProblem, Option<PathBuf>) {
        let raw = RawProblem {
            example: self.example,
            u_exact: self.u_exact,
            xi1: self.xi1,
            xi2: self.xi2,
            mu0: self.mu0,
            mu1: self.mu1,
            mu2: self.mu2,
            mu3: self.mu3,
            f: self.f,
            ei: self.ei,
            rho: self.rho,
            c: self.damping,
            length: self.length,
            time,
        };
        (raw, self.output)
    }
}

fn moment_name(m: MomentArg) -> String {
    match m {
        MomentArg::Exact => "exact".into(),
        MomentArg::Compact => "compact".into(),
    }
}

impl CommandArgs {
    /// Translate flags into the shared raw schema.
    pub fn into_raw(self) -> RawConfig {
        let mut raw = RawConfig::default();
        match self {
            CommandArgs::Solve(a) => {
                raw.command = Some("solve".into());
                (raw.problem, raw.output) = a.problem.into_raw(Some(a.t));
                raw.grid = RawGrid {
                    nx: Some(a.nx),
                    dt: Some(RawDt::Rule(a.dt)),
                    stride: a.stride,
                    initial_moment: Some(moment_name(a.initial_moment)),
                    ..Default::default()
                };
            }
            CommandArgs::Converge(a) => {
                raw.command = Some("converge".into());
                (raw.problem, raw.output) = a.problem.into_raw(Some(a.t));
                raw.grid = RawGrid {
                    ladder: Some(a.ladder),
                    dt: Some(RawDt::Rule(a.dt)),
                    initial_moment: Some(moment_name(a.initial_moment)),
                    ..Default::default()
                };
            }
            CommandArgs::Stability(a) => {
                raw.command = Some("stability".into());
                (raw.problem, raw.output) = a.problem.into_raw(None);
                raw.grid = RawGrid {
                    ladder: Some(a.nx),
                    dt: Some(RawDt::Rule(a.dt)),
                    ..Default::default()
                };
            }
            CommandArgs::Consistency(a) => {
                raw.command = Some("consistency".into());
                (raw.problem, raw.output) = a.problem.into_raw(Some(a.t));
                raw.grid = RawGrid {
                    ladder: Some(a.ladder),
                    ..Default::default()
                };
                raw.consistency = RawConsistency {
                    temporal_nx: Some(a.temporal_nx),
                    temporal_dts: Some(a.temporal_dts),
                };
            }
        }
        raw
    }
}

// ---------------------------------------------------------------------------
// Execution.

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Success,
    /// The run completed but a check built into the command failed.
    AssertionFailed(String),
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn writer(output: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    Ok(csv::Writer::from_writer(sink))
}

/// Execute a validated configuration, writing CSV to its output.
pub fn run(config: &RunConfig) -> Result<RunStatus> {
    let mut out = writer(config.output.as_deref())?;
    let status = run_into(config, &mut out)?;
    out.flush()?;
    Ok(status)
}

/// Execute a configuration into any CSV writer.
pub fn run_into<W: Write>(config: &RunConfig, out: &mut csv::Writer<W>) -> Result<RunStatus> {
    let problem = &config.problem;
    match config.command {
        Command::Solve => {
            let grid = Grid::for_problem(problem, config.nx, config.dt)?;
            info!(
                "solve: Nx = {}, Nt = {}, dt = {:e}",
                grid.nx(),
                grid.nt(),
                grid.dt()
            );
            let opts = SolveOptions {
                stride: config.stride,
                initial_moment: config.initial_moment,
            };
            let traj = solve(problem, &grid, opts)?;
            out.write_record(["t", "x", "u_numeric", "u_exact", "error"])?;
            for snap in &traj.snapshots {
                for (i, u) in snap.u.iter().enumerate() {
                    let x = grid.x(i);
                    let exact = problem.u_exact().map(|e| e.eval(x, snap.t)).transpose()?;
                    let err = exact.map(|e| (u - e).abs());
                    out.write_record([sci(snap.t), sci(x), sci(*u), opt(exact), opt(err)])?;
                }
            }
            Ok(RunStatus::Success)
        }
        Command::Converge => {
            let opts = SolveOptions {
                stride: None,
                initial_moment: config.initial_moment,
            };
            let report =
                convergence_table_with(problem, &config.ladder, config.dt, config.t_eval, opts)?;
            out.write_record(["mesh", "Nx", "h", "error", "order"])?;
            for (k, r) in report.rows.iter().enumerate() {
                out.write_record([
                    (k + 1).to_string(),
                    r.nx.to_string(),
                    sci(r.h),
                    sci(r.error),
                    opt(r.order),
                ])?;
            }
            out.write_record(["average", "", "", "", &opt(report.average_order)])?;
            Ok(RunStatus::Success)
        }
        Command::Stability => {
            let meshes = if config.ladder.is_empty() {
                vec![config.nx]
            } else {
                config.ladder.clone()
            };
            let params = problem.params();
            out.write_record([
                "Nx",
                "dt",
                "EI",
                "rho",
                "c",
                "max_re",
                "rho_q",
                "pass",
                "converged",
            ])?;
            let mut failed = Vec::new();
            for nx in meshes {
                let grid = Grid::for_problem(problem, nx, config.dt)?;
                let r = stability_check(&params, &grid)?;
                if !r.pass() {
                    failed.push(nx);
                }
                out.write_record([
                    nx.to_string(),
                    sci(grid.dt()),
                    sci(params.ei),
                    sci(params.rho),
                    sci(params.c),
                    sci(r.max_real_part()),
                    sci(r.rho_q()),
                    r.pass().to_string(),
                    r.converged().to_string(),
                ])?;
            }
            Ok(if failed.is_empty() {
                RunStatus::Success
            } else {
                RunStatus::AssertionFailed(format!("spectral radius above 1 for Nx = {failed:?}"))
            })
        }
        Command::Consistency => {
            let report = consistency_order(problem, &config.consistency)?;
            out.write_record(["sweep", "Nx", "h", "dt", "residual", "order"])?;
            let name = |s: Sweep| match s {
                Sweep::Space => "space",
                Sweep::Time => "time",
            };
            for r in &report.rows {
                out.write_record([
                    name(r.sweep).to_string(),
                    r.nx.to_string(),
                    sci(r.h),
                    sci(r.dt),
                    sci(r.residual),
                    String::new(),
                ])?;
            }
            for (sweep, order) in [
                (Sweep::Space, report.spatial_order),
                (Sweep::Time, report.temporal_order),
            ] {
                out.write_record([name(sweep), "", "", "", "", &opt(order)])?;
            }
            Ok(RunStatus::Success)
        }
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::Config { .. }
        | Error::InvalidProblem(_)
        | Error::InvalidGrid(_) => exit::CONFIG,
        Error::Io(_) | Error::Csv(_) => exit::IO,
        Error::Eval(_) | Error::Linalg(_) => exit::NUMERICAL,
    }
}

/// Apply the thread-count override, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            Error::config(
                THREADS_ENV,
                format!("expected a positive integer, got `{value}`"),
            )
        })?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Parse arguments into a configuration.
pub fn config_from_args<I, T>(args: I) -> std::result::Result<RunConfig, CliFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliFailure::Usage)?;
    let result = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path),
        (None, Some(cmd)) => validate(cmd.into_raw()),
        _ => Err(Error::config(
            "command",
            "give a subcommand or --config FILE",
        )),
    };
    result.map_err(CliFailure::Run)
}

#[derive(Debug)]
pub enum CliFailure {
    Usage(clap::Error),
    Run(Error),
}

/// Full program: parse, run, report. Returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match config_from_args(args) {
        Ok(c) => c,
        Err(CliFailure::Usage(e)) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::CONFIG
            } else {
                exit::SUCCESS
            };
        }
        Err(CliFailure::Run(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match run(&config) {
        Ok(RunStatus::Success) => exit::SUCCESS,
        Ok(RunStatus::AssertionFailed(msg)) => {
            eprintln!("check failed: {msg}");
            exit::ASSERTION
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let mut full = vec!["compact-beam"];
        full.extend_from_slice(args);
        match config_from_args(full) {
            Ok(c) => c,
            Err(e) => panic!("{e:?}"),
        }
    }

    fn run_to_string(c: &RunConfig) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        run_into(c, &mut w).unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    #[test]
    fn converge_flags() {
        let c = cfg(&[
            "converge",
            "--example",
            "1",
            "--ladder",
            "32,64,128,256",
            "--dt",
            "h2",
            "--t",
            "1.0",
        ]);
        assert_eq!(c.command, Command::Converge);
        assert_eq!(c.ladder, vec![32, 64, 128, 256]);
        assert_eq!(c.dt, DtRule::SquareOfH);
        assert_eq!(c.source, ProblemSource::Builtin(1));
        assert_eq!(c.problem.params(), BeamParams::new(98.0, 0.685, 0.75));
    }

    #[test]
    fn empty_ladder_is_a_config_error() {
        let err = config_from_args(["compact-beam", "converge", "--example", "1", "--ladder", ""]);
        match err {
            Err(CliFailure::Run(e)) => assert_eq!(exit_code(&e), exit::CONFIG),
            Err(CliFailure::Usage(e)) => assert!(e.use_stderr()),
            Ok(_) => panic!("accepted an empty ladder"),
        }
        let e = load_config_str(
            "command = \"converge\"\n[problem]\nexample = 1\n[grid]\nladder = []\n",
        )
        .unwrap_err();
        assert!(
            matches!(e, Error::Config { ref field, .. } if field == "grid.ladder"),
            "{e}"
        );
    }

    #[test]
    fn parameter_overrides() {
        let c = cfg(&[
            "solve",
            "--example",
            "1",
            "--ei",
            "1",
            "--rho",
            "1",
            "--damping",
            "1",
        ]);
        assert_eq!(c.problem.params(), BeamParams::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn custom_expression_matches_builtin() {
        let a = cfg(&["converge", "--example", "3", "--ladder", "8,16"]);
        let b = cfg(&[
            "converge",
            "--u-exact",
            "exp(-t)*sin(pi*x)",
            "--ei",
            "98",
            "--rho",
            "0.68",
            "--damping",
            "7.5",
            "--ladder",
            "8,16",
        ]);
        assert_eq!(run_to_string(&a), run_to_string(&b));
    }

    #[test]
    fn custom_problem_needs_constants() {
        let e = config_from_args(["compact-beam", "solve", "--u-exact", "sin(pi*x)"]).unwrap_err();
        match e {
            CliFailure::Run(Error::Config { field, .. }) => assert_eq!(field, "problem.ei"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn expression_errors_carry_position() {
        let e = config_from_args([
            "compact-beam",
            "solve",
            "--u-exact",
            "sin(pi*x",
            "--ei",
            "1",
            "--rho",
            "1",
            "--damping",
            "1",
        ])
        .unwrap_err();
        match e {
            CliFailure::Run(Error::Config { field, message }) => {
                assert_eq!(field, "problem.u_exact");
                assert!(message.contains("byte 8"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn toml_schema() {
        let text = r#"
command = "stability"
[problem]
example = 1
[grid]
ladder = [8, 16]
dt = 0.01
"#;
        let c = load_config_str(text).unwrap();
        assert_eq!(c.command, Command::Stability);
        assert_eq!(c.dt, DtRule::Fixed(0.01));
        let out = run_to_string(&c);
        assert_eq!(out.lines().count(), 3);
        assert!(out.starts_with("Nx,dt,EI,rho,c,max_re,rho_q,pass,converged\n"));
    }

    #[test]
    fn toml_errors_name_the_field() {
        let e = load_config_str("command = \"solve\"\n[problem]\nexample = 1\nbogus = 2\n")
            .unwrap_err();
        assert!(
            matches!(e, Error::Config { ref field, .. } if field == "problem.bogus"),
            "{e}"
        );
        let e = load_config_str("command = \"solve\"\n[grid]\nnx = \"many\"\n").unwrap_err();
        assert!(
            matches!(e, Error::Config { ref field, .. } if field == "grid.nx"),
            "{e}"
        );
        let e = load_config_str("command = \"solve\"\n[problem]\nexample = 4\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "problem.example"));
        let e = load_config_str("command = \"solve\"\n[problem]\nexample = 1\n[grid]\nnx = 2\n")
            .unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "grid.nx"));
        let e = load_config_str("command = \"fly\"\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "command"));
    }

    #[test]
    fn two_problem_sources_are_rejected() {
        let e = config_from_args(["compact-beam", "solve", "--example", "1", "--u-exact", "x"])
            .unwrap_err();
        assert!(matches!(e, CliFailure::Run(Error::Config { .. })));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidGrid("x".into())), exit::CONFIG);
        assert_eq!(exit_code(&Error::Io(io::Error::other("x"))), exit::IO);
        assert_eq!(
            exit_code(&crate::expr::EvalError::DivisionByZero.into()),
            exit::NUMERICAL
        );
    }
}
