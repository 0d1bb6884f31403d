//! Command-line interface: sweep, compare, transplant, spectrum, poles,
//! builtin.
//!
//! Frequencies on the command line are in GHz and converted to Hz
//! internally. Exit codes: 0 success, 1 error, 2 when a verdict-style
//! command (compare/transplant) finds its property violated at the
//! configured tolerance.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    check_transplantation, compare_isoscattering, sweep, AnalysisError, SweepRecord,
    TransplantationMatrix,
};
use crate::graph::{builtin_source, BoundaryCondition, BuiltinGraph, GraphError, MetricGraph};
use crate::io::{
    parse_graph, serialize_graph, sweep_csv_string, write_poles_csv, write_spectrum_csv, IoError,
};
use crate::solver::{eigenvalues, find_poles, LossModel, SolverError};

const GHZ: f64 = 1e9;

#[derive(Debug, Parser)]
#[command(
    name = "isoscatter",
    version,
    about = "Scattering matrices, spectra and resonance poles of open metric graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the scattering matrix over a frequency band and emit CSV
    Sweep(SweepArgs),
    /// Sweep two graphs and compare determinant amplitude and phase
    Compare(CompareArgs),
    /// Verify the transplantation relation between two graphs
    Transplant(TransplantArgs),
    /// Real eigenvalues of a closed graph via the sigma_min scan
    Spectrum(SpectrumArgs),
    /// Complex resonance poles inside a rectangle
    Poles(PolesArgs),
    /// Write a bundled graph description file
    Builtin(BuiltinArgs),
}

/// Frequency band shared by the sweep-based commands.
#[derive(Debug, Args)]
pub struct BandArgs {
    /// Lower band edge, GHz
    #[arg(long, default_value_t = 0.01)]
    pub fmin: f64,
    /// Upper band edge, GHz
    #[arg(long, default_value_t = 1.7)]
    pub fmax: f64,
    /// Number of grid points (inclusive of both edges)
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
    /// Loss model: lossless | constant:im_k | sqrt:beta,nu_ref_ghz
    #[arg(long, default_value = "lossless")]
    pub loss: LossSpec,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Graph file path or builtin name (paper-I, paper-II)
    pub graph: String,
    #[command(flatten)]
    pub band: BandArgs,
    /// Boundary override, vertex:condition (e.g. 5:dirichlet)
    #[arg(long = "set-bc")]
    pub set_bc: Vec<BcOverride>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub graph_a: String,
    pub graph_b: String,
    #[command(flatten)]
    pub band: BandArgs,
    /// Boundary override, vertex:condition@a|b (e.g. 5:dirichlet@b)
    #[arg(long = "set-bc")]
    pub set_bc: Vec<BcOverride>,
    /// Tolerance preset for the verdict
    #[arg(long, value_enum, default_value_t = TolPreset::Exact)]
    pub tol: TolPreset,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the first sweep as CSV
    #[arg(long)]
    pub csv_a: Option<PathBuf>,
    /// Also write the second sweep as CSV
    #[arg(long)]
    pub csv_b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransplantArgs {
    pub graph_a: String,
    pub graph_b: String,
    #[command(flatten)]
    pub band: BandArgs,
    /// Boundary override, vertex:condition@a|b (e.g. 5:dirichlet@b)
    #[arg(long = "set-bc")]
    pub set_bc: Vec<BcOverride>,
    /// Tolerance preset for the verdict
    #[arg(long, value_enum, default_value_t = TolPreset::Exact)]
    pub tol: TolPreset,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Graph file path or builtin name
    pub graph: String,
    /// Scan start, 1/m
    #[arg(long, default_value_t = 0.05)]
    pub kmin: f64,
    /// Scan end, 1/m
    #[arg(long, default_value_t = 40.0)]
    pub kmax: f64,
    /// Scan step, 1/m
    #[arg(long, default_value_t = 0.02)]
    pub step: f64,
    /// Remove leads before scanning (the scan needs a closed graph)
    #[arg(long)]
    pub drop_leads: bool,
    /// Boundary override, vertex:condition (e.g. 5:dirichlet)
    #[arg(long = "set-bc")]
    pub set_bc: Vec<BcOverride>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    /// Graph file path or builtin name
    pub graph: String,
    /// Rectangle edges, 1/m
    #[arg(long, default_value_t = 0.0)]
    pub re_min: f64,
    #[arg(long, default_value_t = 40.0)]
    pub re_max: f64,
    #[arg(long, default_value_t = -3.0)]
    pub im_min: f64,
    #[arg(long, default_value_t = 0.0)]
    pub im_max: f64,
    /// Scan grid, n_re x n_im (e.g. 400x60)
    #[arg(long, default_value = "400x60")]
    pub grid: GridSpec,
    /// Boundary override, vertex:condition (e.g. 5:dirichlet)
    #[arg(long = "set-bc")]
    pub set_bc: Vec<BcOverride>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuiltinArgs {
    /// Which bundled network (paper-I or paper-II)
    pub name: BuiltinGraph,
    /// Destination path (defaults to the builtin name plus .json)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parsed `--loss` flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec(pub LossModel<f64>);

impl FromStr for LossSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "lossless" {
            return Ok(LossSpec(LossModel::Lossless));
        }
        if let Some(value) = s.strip_prefix("constant:") {
            let im_k: f64 = value
                .parse()
                .map_err(|_| format!("bad constant loss value `{value}`"))?;
            return Ok(LossSpec(LossModel::Constant { im_k }));
        }
        if let Some(rest) = s.strip_prefix("sqrt:") {
            let (beta, nu_ref) = rest
                .split_once(',')
                .ok_or_else(|| format!("expected sqrt:<beta>,<nu_ref_ghz>, got `{s}`"))?;
            let beta: f64 = beta.parse().map_err(|_| format!("bad beta `{beta}`"))?;
            let nu_ref_ghz: f64 = nu_ref
                .parse()
                .map_err(|_| format!("bad reference frequency `{nu_ref}`"))?;
            return Ok(LossSpec(LossModel::SqrtFrequency {
                beta,
                nu_ref: nu_ref_ghz * GHZ,
            }));
        }
        Err(format!(
            "unknown loss spec `{s}` (expected lossless, constant:<im_k> or sqrt:<beta>,<nu_ref_ghz>)"
        ))
    }
}

/// Verdict tolerance presets: `exact` for ideal-model identities,
/// `experimental` for perturbed-length studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TolPreset {
    Exact,
    Experimental,
}

impl TolPreset {
    /// `(tol_amp, tol_phase_rad)`.
    pub fn tolerances(self) -> (f64, f64) {
        match self {
            TolPreset::Exact => (1e-8, 1e-8),
            TolPreset::Experimental => (0.05, 0.05),
        }
    }

    fn name(self) -> &'static str {
        match self {
            TolPreset::Exact => "exact",
            TolPreset::Experimental => "experimental",
        }
    }
}

/// Which graph of a two-graph command an override applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverrideTarget {
    A,
    B,
}

/// Parsed `--set-bc` flag: `vertex:condition` with an optional `@a`
/// or `@b` suffix selecting the target graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcOverride {
    pub vertex: u32,
    pub bc: BoundaryCondition,
    pub target: OverrideTarget,
}

impl FromStr for BcOverride {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (spec, target) = match s.split_once('@') {
            Some((spec, "a")) => (spec, OverrideTarget::A),
            Some((spec, "b")) => (spec, OverrideTarget::B),
            Some((_, other)) => {
                return Err(format!("bad override target `@{other}`, expected @a or @b"))
            }
            None => (s, OverrideTarget::A),
        };
        let (vertex, condition) = spec
            .split_once(':')
            .ok_or_else(|| format!("expected <vertex>:<condition>, got `{spec}`"))?;
        let vertex: u32 = vertex
            .parse()
            .map_err(|_| format!("bad vertex id `{vertex}`"))?;
        let bc = match condition {
            "neumann" => BoundaryCondition::Neumann,
            "dirichlet" => BoundaryCondition::Dirichlet,
            other => return Err(format!("unknown condition `{other}`")),
        };
        Ok(BcOverride { vertex, bc, target })
    }
}

/// Parsed `--grid` flag: `n_re x n_im` without spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec(pub usize, pub usize);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n_re, n_im) = s
            .split_once('x')
            .ok_or_else(|| format!("expected <n_re>x<n_im>, got `{s}`"))?;
        let n_re = n_re
            .parse()
            .map_err(|_| format!("bad grid size `{n_re}`"))?;
        let n_im = n_im
            .parse()
            .map_err(|_| format!("bad grid size `{n_im}`"))?;
        Ok(GridSpec(n_re, n_im))
    }
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Exit 0.
    Pass,
    /// A verdict-style command found its property violated: exit 2.
    Violated,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("file not found: {path}")]
    FileNotFound { path: String },
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    WriteFile {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    BadGraph { path: String, source: IoError },
    #[error("override targets graph b but this command takes one graph")]
    OverrideTargetsMissingGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Load a graph from a builtin name or a file path.
pub fn load_graph(source: &str) -> Result<MetricGraph<f64>, CliError> {
    if let Ok(builtin) = source.parse::<BuiltinGraph>() {
        return parse_graph(builtin_source(builtin)).map_err(|e| CliError::BadGraph {
            path: builtin.to_string(),
            source: e,
        });
    }
    let text = fs::read_to_string(source).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::FileNotFound {
                path: source.to_string(),
            }
        } else {
            CliError::Read {
                path: source.to_string(),
                source: e,
            }
        }
    })?;
    parse_graph(&text).map_err(|e| CliError::BadGraph {
        path: source.to_string(),
        source: e,
    })
}

fn apply_overrides(
    graph: MetricGraph<f64>,
    overrides: &[BcOverride],
    target: OverrideTarget,
) -> Result<MetricGraph<f64>, CliError> {
    let mut graph = graph;
    for o in overrides.iter().filter(|o| o.target == target) {
        graph = graph.with_boundary_override(o.vertex, o.bc)?;
    }
    Ok(graph)
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content).map_err(|e| CliError::WriteFile {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn report_float(x: f64) -> String {
    format!("{x:.9e}")
}

fn band_sweep(graph: &MetricGraph<f64>, band: &BandArgs) -> Result<SweepRecord<f64>, CliError> {
    Ok(sweep(
        graph,
        band.fmin * GHZ,
        band.fmax * GHZ,
        band.points,
        &band.loss.0,
    )?)
}

fn band_report_lines(out: &mut String, band: &BandArgs) {
    let _ = writeln!(out, "nu_min_hz = {}", report_float(band.fmin * GHZ));
    let _ = writeln!(out, "nu_max_hz = {}", report_float(band.fmax * GHZ));
    let _ = writeln!(out, "points = {}", band.points);
    let _ = writeln!(out, "loss = {}", band.loss.0);
}

/// Execute one parsed invocation.
pub fn run(cli: &Cli) -> Result<Verdict, CliError> {
    match &cli.command {
        Command::Sweep(args) => {
            if args.set_bc.iter().any(|o| o.target == OverrideTarget::B) {
                return Err(CliError::OverrideTargetsMissingGraph);
            }
            let graph = apply_overrides(load_graph(&args.graph)?, &args.set_bc, OverrideTarget::A)?;
            let record = band_sweep(&graph, &args.band)?;
            if !record.gaps.is_empty() {
                eprintln!(
                    "note: {} singular grid point(s) recorded as gaps",
                    record.gaps.len()
                );
            }
            emit(args.out.as_deref(), &sweep_csv_string(&record))?;
            Ok(Verdict::Pass)
        }
        Command::Compare(args) => {
            let graph_a =
                apply_overrides(load_graph(&args.graph_a)?, &args.set_bc, OverrideTarget::A)?;
            let graph_b =
                apply_overrides(load_graph(&args.graph_b)?, &args.set_bc, OverrideTarget::B)?;
            let sweep_a = band_sweep(&graph_a, &args.band)?;
            let sweep_b = band_sweep(&graph_b, &args.band)?;
            if let Some(path) = &args.csv_a {
                emit(Some(path), &sweep_csv_string(&sweep_a))?;
            }
            if let Some(path) = &args.csv_b {
                emit(Some(path), &sweep_csv_string(&sweep_b))?;
            }
            let (tol_amp, tol_phase) = args.tol.tolerances();
            let report = compare_isoscattering(&sweep_a, &sweep_b, tol_amp, tol_phase)?;

            let mut text = String::new();
            let _ = writeln!(text, "command = compare");
            let _ = writeln!(text, "graph_a = {}", args.graph_a);
            let _ = writeln!(text, "graph_b = {}", args.graph_b);
            band_report_lines(&mut text, &args.band);
            let _ = writeln!(text, "tolerance_preset = {}", args.tol.name());
            let _ = writeln!(text, "tol_amp = {}", report_float(report.tol_amp));
            let _ = writeln!(text, "tol_phase_rad = {}", report_float(report.tol_phase));
            let _ = writeln!(text, "points_compared = {}", report.points_compared);
            let _ = writeln!(text, "gaps_excluded = {}", report.gaps_excluded);
            let _ = writeln!(
                text,
                "max_det_abs_diff = {}",
                report_float(report.max_det_abs_diff)
            );
            let _ = writeln!(
                text,
                "max_phase_diff_rad = {}",
                report_float(report.max_phase_diff)
            );
            let _ = writeln!(text, "l2_det_diff = {}", report_float(report.l2_det_diff));
            let _ = writeln!(
                text,
                "transplant_residual_max = {}",
                report
                    .transplant_residual_max
                    .map_or_else(|| "n/a".to_string(), report_float)
            );
            let _ = writeln!(
                text,
                "verdict_isoscattering = {}",
                report.verdict_isoscattering
            );
            emit(args.out.as_deref(), &text)?;
            Ok(if report.verdict_isoscattering {
                Verdict::Pass
            } else {
                Verdict::Violated
            })
        }
        Command::Transplant(args) => {
            let graph_a =
                apply_overrides(load_graph(&args.graph_a)?, &args.set_bc, OverrideTarget::A)?;
            let graph_b =
                apply_overrides(load_graph(&args.graph_b)?, &args.set_bc, OverrideTarget::B)?;
            let sweep_a = band_sweep(&graph_a, &args.band)?;
            let sweep_b = band_sweep(&graph_b, &args.band)?;
            let residual =
                check_transplantation(&sweep_a, &sweep_b, &TransplantationMatrix::default())?;
            let (tolerance, _) = args.tol.tolerances();
            let verdict = residual <= tolerance;

            let mut text = String::new();
            let _ = writeln!(text, "command = transplant");
            let _ = writeln!(text, "graph_a = {}", args.graph_a);
            let _ = writeln!(text, "graph_b = {}", args.graph_b);
            band_report_lines(&mut text, &args.band);
            let _ = writeln!(text, "tolerance_preset = {}", args.tol.name());
            let _ = writeln!(text, "tolerance = {}", report_float(tolerance));
            let _ = writeln!(text, "transplant_residual_max = {}", report_float(residual));
            let _ = writeln!(text, "verdict_transplantation = {verdict}");
            emit(args.out.as_deref(), &text)?;
            Ok(if verdict {
                Verdict::Pass
            } else {
                Verdict::Violated
            })
        }
        Command::Spectrum(args) => {
            if args.set_bc.iter().any(|o| o.target == OverrideTarget::B) {
                return Err(CliError::OverrideTargetsMissingGraph);
            }
            let mut graph =
                apply_overrides(load_graph(&args.graph)?, &args.set_bc, OverrideTarget::A)?;
            if args.drop_leads {
                graph = graph.without_leads();
            }
            let spectrum = eigenvalues(&graph, args.kmin, args.kmax, args.step)?;
            if let Some(warning) = &spectrum.scan_warning {
                eprintln!("warning: {warning}");
            }
            let mut buffer = Vec::new();
            write_spectrum_csv(&spectrum, &mut buffer)?;
            emit(
                args.out.as_deref(),
                &String::from_utf8(buffer).expect("csv is ascii"),
            )?;
            Ok(Verdict::Pass)
        }
        Command::Poles(args) => {
            if args.set_bc.iter().any(|o| o.target == OverrideTarget::B) {
                return Err(CliError::OverrideTargetsMissingGraph);
            }
            let graph = apply_overrides(load_graph(&args.graph)?, &args.set_bc, OverrideTarget::A)?;
            let set = find_poles(
                &graph,
                (args.re_min, args.re_max),
                (args.im_min, args.im_max),
                (args.grid.0, args.grid.1),
            )?;
            if set.discarded_seeds > 0 {
                eprintln!(
                    "note: {} seed(s) discarded for non-convergence",
                    set.discarded_seeds
                );
            }
            let mut buffer = Vec::new();
            write_poles_csv(&set, &mut buffer)?;
            emit(
                args.out.as_deref(),
                &String::from_utf8(buffer).expect("csv is ascii"),
            )?;
            Ok(Verdict::Pass)
        }
        Command::Builtin(args) => {
            let default_path = PathBuf::from(format!("{}.json", args.name));
            let path = args.out.clone().unwrap_or(default_path);
            emit(Some(&path), builtin_source(args.name))?;
            eprintln!("wrote {}", path.display());
            Ok(Verdict::Pass)
        }
    }
}

/// Round-trip helper used by tests and scripts: canonical text of a loaded
/// graph.
pub fn canonical_graph_text(source: &str) -> Result<String, CliError> {
    Ok(serialize_graph(&load_graph(source)?))
}
