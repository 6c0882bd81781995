use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flowfem_cli::artifact::Artifact;
use flowfem_cli::config::{Overrides, RunConfig};
use flowfem_cli::verify::{self, VerifyOptions};
use flowfem_cli::{commands, write_artifacts, CliError, CliResult};
use flowfem_core::fem1d::InputMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Bx,
    Asy,
}

impl From<Mode> for InputMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bx => InputMode::FluxDensity,
            Mode::Asy => InputMode::VectorPotential,
        }
    }
}

/// Finite element experiments on convection of a magnetic field by a
/// moving conductor.
#[derive(Debug, Parser)]
#[command(name = "flowfem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Input representation of the applied field.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Element order.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: Option<u8>,

    /// Element Peclet number (replaces any configured velocity).
    #[arg(long, global = true)]
    pe: Option<f64>,

    /// Node spacing in metres.
    #[arg(long, global = true)]
    dz: Option<f64>,

    /// Also write an SVG line plot next to each CSV.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single 1D solve with continuum and closed-form references.
    Solve1d,
    /// Peak oscillation error over a range of Peclet numbers.
    SweepError,
    /// Poles, zeros and cancellation of the discrete transfer function.
    Poles,
    /// 2D channel solves over the configured plate separations.
    Solve2d,
    /// Run the acceptance suite.
    Verify {
        #[arg(long, hide = true, allow_negative_numbers = true)]
        perturb_stencil: Option<f64>,
    },
}

fn run(cli: &Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides {
        mode: cli.mode.map(Into::into),
        order: cli.order,
        pe: cli.pe,
        dz: cli.dz,
    });
    cfg.validate()?;
    let hash = cfg.hash();
    let (artifacts, failure): (Vec<Artifact>, Option<CliError>) = match &cli.command {
        Command::Solve1d => (commands::solve1d(&cfg)?, None),
        Command::SweepError => (commands::sweep_error(&cfg)?, None),
        Command::Poles => (commands::poles(&cfg)?, None),
        Command::Solve2d => (commands::solve2d(&cfg)?, None),
        Command::Verify { perturb_stencil } => {
            let opts = VerifyOptions {
                stencil_perturbation: *perturb_stencil,
            };
            let (report, artifacts) = verify::verify(&cfg, &opts)?;
            for c in &report.criteria {
                println!(
                    "criterion {:>2} {}: {} ({})",
                    c.id,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured
                );
            }
            (artifacts, report.error())
        }
    };
    for path in write_artifacts(&artifacts, &cli.out, &hash, cli.plot)? {
        println!("wrote {}", path.display());
    }
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { flowfem_cli::EXIT_CONFIG } else { flowfem_cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::from(flowfem_cli::EXIT_OK),
        Err(e) => {
            eprintln!("flowfem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
