//! Command-line front end: `decompose` estimates the four-way decomposition
//! from a subject-level CSV, `simulate` draws a synthetic cohort with its
//! simulation truth, and `verify` runs the built-in identity suites.
//!
//! Exit codes: 0 success, 1 identity-suite failure, 2 invalid input or
//! configuration, 3 model-fitting failure.

mod config;
mod outputs;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riskdecomp::boot::{bootstrap_bands, BootError, BootstrapPlan};
use riskdecomp::checks;
use riskdecomp::dataio::{load_csv_reader, write_csv, CsvSchema, DataError};
use riskdecomp::hazards::HazardError;
use riskdecomp::pipeline::decompose_cohort;
use riskdecomp::sim::{emit_cohort, monte_carlo_truth, SimError};

#[derive(Parser)]
#[command(name = "riskdecomp", version, about = "Four-way decomposition of a treatment effect on a target event under competing risks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the decomposition from a subject-level CSV.
    Decompose(DecomposeArgs),
    /// Draw a synthetic cohort and its Monte Carlo truth.
    Simulate(SimulateArgs),
    /// Re-derive the library's identities through independent routes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// Subject-level CSV, one row per subject.
    #[arg(long)]
    input: PathBuf,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated grid points t_0..t_K, e.g. "0,6,12,18".
    #[arg(long)]
    grid: Option<String>,
    /// Bootstrap replicates; 0 skips the bootstrap.
    #[arg(long)]
    boot: Option<usize>,
    /// Bootstrap seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Two-sided confidence level of the bands.
    #[arg(long)]
    level: Option<f64>,
    /// Ridge penalty applied to both hazard fits.
    #[arg(long)]
    ridge: Option<f64>,
    /// Directory for components.csv and manifest.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Column remapping KEY=COLUMN; keys: id, time, event, treatment,
    /// censored, target, competing. Repeatable.
    #[arg(long, value_name = "KEY=COLUMN")]
    schema: Vec<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario: scenario1, scenario2 or scenario3.
    #[arg(long)]
    preset: Option<String>,
    /// TOML run configuration with a [scenario] section.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cohort size.
    #[arg(long)]
    n: Option<usize>,
    /// Scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for cohort.csv, truth.csv and manifest.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random-input trials per identity suite.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed for the random-input suites.
    #[arg(long, default_value_t = 1729)]
    seed: u64,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::invalid(e.to_string())
    }
}

impl From<HazardError> for CliError {
    fn from(e: HazardError) -> Self {
        CliError { code: 3, message: e.to_string() }
    }
}

impl From<BootError> for CliError {
    fn from(e: BootError) -> Self {
        let code = match e {
            // A collapsing resample is a data problem, not a bad request.
            BootError::TooManyFailures { .. } => 3,
            BootError::BadLevel(_) | BootError::NoReplicates => 2,
        };
        CliError { code, message: format!("bootstrap: {e}") }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => Ok(cmd_verify(&args)),
    }
}

/// Reads and parses the optional config, returning it with its digest.
fn read_config(path: Option<&Path>) -> Result<(config::ConfigFile, Option<String>), CliError> {
    match path {
        None => Ok((config::ConfigFile::default(), None)),
        Some(p) => {
            let bytes = fs::read(p)
                .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", p.display())))?;
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::invalid(format!("{} is not UTF-8", p.display())))?;
            let cfg = config::parse_config(&text).map_err(CliError::invalid)?;
            Ok((cfg, Some(outputs::sha256_hex(text.as_bytes()))))
        }
    }
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::invalid(format!("cannot write {}: {e}", path.display()))
}

fn cmd_decompose(args: DecomposeArgs) -> Result<u8, CliError> {
    let (cfg, config_sha256) = read_config(args.config.as_deref())?;
    let spec = config::model_spec(cfg.model.as_ref(), args.ridge);
    let schema = config::csv_schema(&cfg.data, &args.schema, config::covariate_union(&spec))
        .map_err(CliError::invalid)?;
    let grid = match &args.grid {
        Some(text) => Some(config::parse_grid(text).map_err(CliError::invalid)?),
        None => cfg.data.grid.clone(),
    };

    let input = fs::read(&args.input)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", args.input.display())))?;
    let input_sha256 = outputs::sha256_hex(&input);
    let cohort = load_csv_reader(&input[..], &schema, grid.as_deref())?;

    let (curve, report) = decompose_cohort(&cohort, &spec)?;
    let (n_subjects, n_intervals) = (report.n_subjects, report.n_intervals);

    let boot_section = cfg.bootstrap.as_ref();
    let replicates = args.boot.or_else(|| boot_section.and_then(|b| b.replicates)).unwrap_or(0);
    let (bands, bootstrap) = if replicates == 0 {
        (None, None)
    } else {
        let plan = BootstrapPlan {
            replicates,
            seed: args.seed.or_else(|| boot_section.and_then(|b| b.seed)).unwrap_or(0),
            level: args.level.or_else(|| boot_section.and_then(|b| b.level)).unwrap_or(0.95),
        };
        let bands = bootstrap_bands(&cohort, &spec, &plan)?;
        let info = outputs::BootstrapInfo {
            replicates,
            used: bands.replicates_used,
            skipped: bands.skipped,
            seed: plan.seed,
            level: plan.level,
        };
        (Some(bands), Some(info))
    };

    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    let components_path = args.out_dir.join("components.csv");
    write_components_csv_checked(&components_path, &curve, bands.as_ref())?;

    let manifest = outputs::Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "decompose",
        generated_at_unix: outputs::unix_now(),
        config_sha256,
        input_sha256: Some(input_sha256),
        seed: bootstrap.as_ref().map_or(0, |b| b.seed),
        grid: curve.grid.clone(),
        model: Some(spec),
        fits: Some(report),
        bootstrap,
        scenario: None,
    };
    let manifest_path = args.out_dir.join("manifest.json");
    outputs::write_manifest(create(&manifest_path)?, &manifest).map_err(io_err(&manifest_path))?;

    println!(
        "decomposed {n_subjects} subjects over {n_intervals} intervals; wrote {} and {}",
        components_path.display(),
        manifest_path.display()
    );
    Ok(0)
}

fn write_components_csv_checked(
    path: &Path,
    curve: &riskdecomp::decomp::DecompositionCurve,
    bands: Option<&riskdecomp::boot::BootstrapBands>,
) -> Result<(), CliError> {
    outputs::write_components_csv(create(path)?, curve, bands)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let (cfg, config_sha256) = read_config(args.config.as_deref())?;
    let spec =
        config::scenario_spec(cfg.scenario.as_ref(), args.preset.as_deref(), args.n, args.seed)
            .map_err(CliError::invalid)?;

    let cohort = emit_cohort(&spec)?;
    let truth = monte_carlo_truth(&spec)?;

    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    let cohort_path = args.out_dir.join("cohort.csv");
    write_csv(&cohort, &CsvSchema::default(), create(&cohort_path)?)?;
    let truth_path = args.out_dir.join("truth.csv");
    outputs::write_truth_csv(create(&truth_path)?, &truth)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", truth_path.display())))?;

    let manifest = outputs::Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "simulate",
        generated_at_unix: outputs::unix_now(),
        config_sha256,
        input_sha256: None,
        seed: spec.seed,
        grid: spec.grid.clone(),
        model: None,
        fits: None,
        bootstrap: None,
        scenario: Some(spec.clone()),
    };
    let manifest_path = args.out_dir.join("manifest.json");
    outputs::write_manifest(create(&manifest_path)?, &manifest).map_err(io_err(&manifest_path))?;

    println!(
        "simulated {} subjects over {} intervals; wrote {}, {} and {}",
        spec.n,
        spec.n_intervals(),
        cohort_path.display(),
        truth_path.display(),
        manifest_path.display()
    );
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let outcomes = checks::run_all(args.trials, args.seed);
    let mut failed = false;
    for c in &outcomes {
        if c.passed {
            println!(
                "{}/{} {} cases pass (worst deviation {:e})",
                c.cases, c.cases, c.name, c.worst
            );
        } else {
            failed = true;
            println!("{c}");
            print!("{}", c.detail);
        }
    }
    if failed {
        1
    } else {
        0
    }
}
