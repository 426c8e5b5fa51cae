//! Experiment runner CLI.
//!
//! Exit codes: 0 all tolerances met, 1 usage error, 2 tolerance failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use homodiff::experiments::{
    self, ArtifactSink, AxiomsConfig, ConsistencyConfig, DirichletConfig, EvolveConfig,
    ExperimentConfig, ExtinctionConfig, McfConfig, SupportConfig,
};
use homodiff::stencil::StencilKind;

#[derive(Parser)]
#[command(name = "homodiff", version, about = "Statistical averaging operators for homogeneous diffusion: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment config; defaults reproduce the validation suite.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Seed for randomized experiments (overrides the config).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker thread cap (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Directory for CSV/JSON artifacts and grid dumps.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write PGM heatmaps of 2D fields.
    #[arg(long)]
    emit_heatmaps: bool,

    /// Comma-separated step indices at which to dump grid snapshots.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Slope ladders of (phi - M^h phi)/h against the analytic generator.
    Consistency(CommonArgs),
    /// Gaussian heat benchmark: iterated means vs the exact solution.
    Evolve(CommonArgs),
    /// Shrinking circle/sphere under the median flow, with optional
    /// Catte cross-check.
    Mcf(CommonArgs),
    /// Finite extinction of a compact bump under the median flow.
    Extinction(CommonArgs),
    /// Support growth of one mean step.
    Support(CommonArgs),
    /// Dirichlet steady state on the disk vs a harmonic polynomial.
    Dirichlet(CommonArgs),
    /// Randomized operator axioms: stability, monotonicity, translation,
    /// homogeneity, 1D collapse.
    Axioms(CommonArgs),
    /// Dump a sphere stencil as CSV.
    StencilDump(StencilDumpArgs),
}

#[derive(Args)]
struct StencilDumpArgs {
    #[arg(long, default_value_t = 2)]
    dimension: usize,
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 64)]
    k: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Circle)]
    kind: KindArg,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Circle,
    GaussAzimuth,
    Fibonacci,
}

impl From<KindArg> for StencilKind {
    fn from(k: KindArg) -> StencilKind {
        match k {
            KindArg::Circle => StencilKind::UniformCircle,
            KindArg::GaussAzimuth => StencilKind::GaussAzimuth3D,
            KindArg::Fibonacci => StencilKind::SymmetrizedFibonacci3D,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> homodiff::Result<ExitCode> {
    let (args, default_config) = match cli.command {
        Command::Consistency(a) => {
            let c = ExperimentConfig::Consistency(ConsistencyConfig::default());
            (a, c)
        }
        Command::Evolve(a) => (a.clone(), ExperimentConfig::Evolve(EvolveConfig::default())),
        Command::Mcf(a) => (a.clone(), ExperimentConfig::Mcf(McfConfig::default())),
        Command::Extinction(a) => (
            a.clone(),
            ExperimentConfig::Extinction(ExtinctionConfig::default()),
        ),
        Command::Support(a) => (a.clone(), ExperimentConfig::Support(SupportConfig::default())),
        Command::Dirichlet(a) => (
            a.clone(),
            ExperimentConfig::Dirichlet(DirichletConfig::default()),
        ),
        Command::Axioms(a) => (a.clone(), ExperimentConfig::Axioms(AxiomsConfig::default())),
        Command::StencilDump(args) => {
            let csv = experiments::stencil_dump_csv(args.dimension, args.h, args.k, args.kind.into())?;
            match args.out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            return Ok(ExitCode::SUCCESS);
        }
    };

    if let Some(workers) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| homodiff::Error::Usage(format!("worker pool: {e}")))?;
    }

    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let loaded: ExperimentConfig = serde_json::from_str(&text)?;
            if loaded.name() != default_config.name() {
                return Err(homodiff::Error::Usage(format!(
                    "config is for `{}` but the `{}` subcommand was invoked",
                    loaded.name(),
                    default_config.name()
                )));
            }
            loaded
        }
        None => default_config,
    };

    apply_overrides(&mut config, &args);

    let sink = match &args.out {
        Some(dir) => ArtifactSink::to_dir(dir, args.emit_heatmaps)?,
        None => ArtifactSink::discard(),
    };

    let report = experiments::run(&config, &sink)?;
    for check in &report.checks {
        println!(
            "{} {}: measured {:.6e} vs threshold {:.6e} ({})",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.threshold,
            check.detail
        );
    }
    if report.passed {
        println!("{}: all {} checks passed", report.experiment, report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let failures = report.failures().join(", ");
        println!("{}: FAILED [{}]", report.experiment, failures);
        Ok(ExitCode::from(2))
    }
}

fn apply_overrides(config: &mut ExperimentConfig, args: &CommonArgs) {
    if let Some(seed) = args.seed {
        if let ExperimentConfig::Axioms(c) = config {
            c.seed = seed;
        }
    }
    if !args.snapshots.is_empty() {
        match config {
            ExperimentConfig::Evolve(c) => c.snapshots = args.snapshots.clone(),
            ExperimentConfig::Mcf(c) => c.snapshots = args.snapshots.clone(),
            _ => {}
        }
    }
}
