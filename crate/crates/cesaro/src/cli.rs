use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use cesaro_core::ergodic::{cauchy_verdict, correlation_verdict, perturb_on_index_set, s_limit_report, IndexSet};
use cesaro_core::euler::{
    boundary_energy_check, boundary_volume, consistency_report, default_test_set, reynolds_defect,
    reynolds_trace_from_energy, simulate_family, EulerParams,
};
use cesaro_core::field::FieldSequence;
use cesaro_core::Weight;

use crate::config::{Command, ConfigError, RunConfig};
use crate::report::{
    write_json, write_measure_csv, write_tables, BoundJson, ConsistencyJson, EulerJson, PerturbationJson, ReportFile,
    SReportJson,
};
use crate::snapshot::{self, SnapshotError};

pub const SNAPSHOT_FILE: &str = "snapshot.bin";
pub const PERTURBED_FILE: &str = "perturbed.bin";
pub const CONSISTENCY_FILE: &str = "consistency.json";
pub const S_REPORT_FILE: &str = "s_report.json";
pub const MEASURE_FILE: &str = "measure.csv";
pub const PERTURBATION_FILE: &str = "perturbation.json";

#[derive(Debug, Parser)]
#[command(name = "cesaro", version, about = "Statistical convergence diagnostics for sequences of fields")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run a Lax–Friedrichs Euler family; writes a snapshot and a consistency report.
    Simulate(Common),
    /// Statistical-limit report, limit measure CSV, and Euler diagnostics for a sequence.
    Analyze(Common),
    /// Perturb a sequence on a density-zero index set; writes a derived snapshot.
    Perturb(Common),
    /// Merge JSON reports into CSV tables.
    Report(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated checkpoint schedule.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    #[arg(long)]
    tol: Option<f64>,
    /// Snapshot to read instead of the configured input.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Snapshot(#[from] SnapshotError),
    #[error("{0}")]
    Core(#[from] cesaro_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Runs the CLI on `argv` (program name first) and returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
                    eprintln!("cesaro: {}", first.trim_start_matches("error: "));
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cesaro: error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match cli.command {
        Sub::Simulate(c) => (Command::Simulate, c),
        Sub::Analyze(c) => (Command::Analyze, c),
        Sub::Perturb(c) => (Command::Perturb, c),
        Sub::Report(c) => (Command::Report, c),
    };
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(cp) = &common.checkpoints {
        cfg.analysis.checkpoints = cp.clone();
    }
    if let Some(tol) = common.tol {
        cfg.analysis.tol = tol;
    }
    if let Some(input) = &common.input {
        cfg.input.snapshot = Some(input.clone());
        cfg.input.fixture = None;
    }
    cfg.validate(command)?;
    fs::create_dir_all(&common.out).map_err(io_err(&common.out))?;
    match command {
        Command::Simulate => simulate(&cfg, &common.out),
        Command::Analyze => analyze(&cfg, &common.out),
        Command::Perturb => perturb(&cfg, &common.out),
        Command::Report => report(&cfg, &common.out),
    }
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let fc = cfg.family_config()?;
    let family = simulate_family(&fc)?;
    let tests = default_test_set(family.seq.grid());
    let consistency = consistency_report(&family, &tests, &fc.params)?;
    let json = ConsistencyJson::new(&cfg.family.preset, &fc, &family, &tests, &consistency);
    snapshot::save(&out.join(SNAPSHOT_FILE), &family.seq)?;
    let path = out.join(CONSISTENCY_FILE);
    write_json(&path, &ReportFile::Consistency(json.clone())).map_err(io_err(&path))?;
    let worst = json.members.iter().map(|m| m.max_continuity.max(m.max_momentum)).fold(0.0, f64::max);
    println!(
        "simulate: {} members, max residual {worst:.3e}, max mass drift {:.3e}, admissible {}",
        json.members.len(),
        json.max_mass_drift,
        json.admissible
    );
    Ok(())
}

/// The configured input sequence and a short name for it.
fn input(cfg: &RunConfig, out: &Path) -> Result<(FieldSequence, String), CliError> {
    if let Some(seq) = cfg.fixture()? {
        return Ok((seq, format!("fixture:{}", cfg.input.fixture.as_deref().unwrap_or(""))));
    }
    let path = cfg.input.snapshot.clone().unwrap_or_else(|| out.join(SNAPSHOT_FILE));
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok((snapshot::load(&path)?, name))
}

fn euler_diagnostics(cfg: &RunConfig, seq: &FieldSequence) -> Result<Option<EulerJson>, CliError> {
    let grid = seq.grid();
    let d = grid.space_dim();
    if seq.dim() != 1 + d || seq.values().chunks_exact(seq.dim()).any(|u| u[0] <= 0.0) {
        return Ok(None);
    }
    let width = cfg.analysis.boundary_width;
    if (0..d).any(|k| width >= 0.5 * grid.lengths()[k]) {
        return Err(ConfigError {
            field: "analysis.boundary_width".into(),
            reason: "must be below half the box".into(),
        }
        .into());
    }
    let params = EulerParams { space_dim: d, ..cfg.euler_params()? };
    let n = seq.len();
    let defect = reynolds_defect(seq, n, &params)?;
    let traces = reynolds_trace_from_energy(seq, n, &params)?;
    let cells = grid.cells();
    Ok(Some(EulerJson {
        level: n,
        defect_max_frobenius: (0..cells).map(|c| defect.frobenius(c)).fold(0.0, f64::max),
        defect_min_eigenvalue: (0..cells).map(|c| defect.min_eigenvalue(c)).fold(f64::INFINITY, f64::min),
        trace_mismatch: traces.iter().enumerate().map(|(c, t)| (defect.trace(c) - t).abs()).fold(0.0, f64::max),
        boundary_width: width,
        boundary_volume: boundary_volume(grid, width)?,
        boundary_energy_gap: boundary_energy_check(seq, n, width, &params)?,
    }))
}

fn analyze(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (seq, source) = input(cfg, out)?;
    let dict = cfg.dictionary(&seq)?;
    let schedule = cfg.checkpoints(seq.len())?;
    let weights = cfg.weights_for(&schedule)?;
    let tol = cfg.analysis.tol;
    let report = s_limit_report(&seq, &dict, &weights, &schedule, tol)?;
    let correlation = correlation_verdict(&seq, &dict, &schedule, tol, cfg.analysis.span)?;
    let mut cauchy = true;
    for b in dict.observables() {
        cauchy &= cauchy_verdict(&seq, b, &Weight::constant(), &schedule, tol)?.converged;
    }
    let euler = euler_diagnostics(cfg, &seq)?;
    let json = SReportJson::new(source, &dict, &report, &correlation, cauchy, euler);

    let path = out.join(S_REPORT_FILE);
    write_json(&path, &ReportFile::SReport(Box::new(json.clone()))).map_err(io_err(&path))?;
    let path = out.join(MEASURE_FILE);
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_measure_csv(std::io::BufWriter::new(file), &report.limit)?;
    println!(
        "analyze: {} observables x {} weights, converged {} (existence {}, weight independence {}), correlation verdict {}",
        dict.len(),
        weights.len(),
        json.converged,
        json.existence,
        json.weight_independent,
        json.correlation.converged
    );
    Ok(())
}

fn index_set_label(set: &IndexSet) -> String {
    match set {
        IndexSet::Squares => "squares".into(),
        IndexSet::PowersOfTwo => "powers-of-two".into(),
        IndexSet::Custom(list) => format!("custom{list:?}"),
    }
}

fn perturb(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (seq, source) = input(cfg, out)?;
    let set = cfg.index_set()?;
    let magnitude = cfg.perturb.magnitude;
    let perturbed = perturb_on_index_set(&seq, &set, magnitude, cfg.seed)?;
    let measure = seq.grid().measure();
    let reach = magnitude * (seq.dim() as f64).sqrt();
    let bounds = cfg
        .checkpoints(seq.len())?
        .into_iter()
        .map(|n| {
            let density = set.density(n)?;
            Ok(BoundJson { n, density, w1_bound: measure * density * reach })
        })
        .collect::<Result<Vec<_>, cesaro_core::Error>>()?;
    snapshot::save(&out.join(PERTURBED_FILE), &perturbed)?;
    let json = PerturbationJson {
        source,
        index_set: index_set_label(&set),
        magnitude,
        seed: cfg.seed,
        len: seq.len(),
        perturbed_members: set.indices(seq.len())?.len(),
        bounds,
    };
    let path = out.join(PERTURBATION_FILE);
    write_json(&path, &ReportFile::Perturbation(json.clone())).map_err(io_err(&path))?;
    println!("perturb: {} of {} members perturbed on {}", json.perturbed_members, json.len, json.index_set);
    Ok(())
}

fn report(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let inputs: Vec<PathBuf> = if cfg.report.inputs.is_empty() {
        [S_REPORT_FILE, CONSISTENCY_FILE, PERTURBATION_FILE]
            .iter()
            .map(|f| out.join(f))
            .filter(|p| p.exists())
            .collect()
    } else {
        cfg.report.inputs.clone()
    };
    if inputs.is_empty() {
        return Err(ConfigError { field: "report.inputs".into(), reason: "no reports found".into() }.into());
    }
    let mut reports = Vec::with_capacity(inputs.len());
    for path in &inputs {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let parsed: ReportFile = serde_json::from_str(&text)
            .map_err(|source| CliError::Json { path: path.display().to_string(), source })?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        reports.push((name, parsed));
    }
    let written = write_tables(out, &reports)?;
    println!("report: merged {} reports into {}", reports.len(), written.join(", "));
    Ok(())
}
