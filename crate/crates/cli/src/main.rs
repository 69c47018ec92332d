mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Analysis, Common, Format, UsageError};

/// Metric divided differences, derivatives and local linear approximants
/// of set-valued functions.
#[derive(Debug, Parser)]
#[command(name = "svcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric pairs, Hausdorff distance and metric difference of two sets
    Pairs(PairsArgs),
    /// Anchored and full divided differences between x0 and x
    Dd(PointArgs),
    /// One-sided derivative fields at x0 (exit 3 if unconverged)
    Derivative(Common),
    /// Local linear approximant at x
    Approx(PointArgs),
    /// Error curve of the approximant and its fitted order
    Order(OrderArgs),
    /// Fitted order of the uniform divided-difference deviation
    Alpha(Common),
    /// Gallery functions
    Gallery {
        #[command(subcommand)]
        command: GalleryCommand,
    },
}

#[derive(Debug, Args)]
struct PairsArgs {
    /// First set as JSON, e.g. `[0, 3]` or `[[0, 0], [1, 2]]`
    #[arg(long)]
    a: Option<String>,
    /// Second set as JSON
    #[arg(long)]
    b: Option<String>,
    /// With a function: compare F(x0) and F(x)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// With `--format csv`, write the fit JSON here instead of stderr
    #[arg(long)]
    fit_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Subcommand)]
enum GalleryCommand {
    /// List gallery functions, their domains and parameters
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Pairs(a) => {
            let an = Analysis::resolve(&a.common, a.x)?;
            commands::pairs(a.a.as_deref(), a.b.as_deref(), &an)
        }
        Command::Dd(a) => commands::dd(&Analysis::resolve(&a.common, a.x)?),
        Command::Derivative(c) => commands::derivative(&Analysis::resolve(&c, None)?),
        Command::Approx(a) => commands::approx(&Analysis::resolve(&a.common, a.x)?),
        Command::Order(a) => {
            commands::order(&Analysis::resolve(&a.common, None)?, a.fit_out.as_deref())
        }
        Command::Alpha(c) => commands::alpha(&Analysis::resolve(&c, None)?),
        Command::Gallery {
            command: GalleryCommand::List { format },
        } => commands::gallery_list(format),
    }
}

/// 2 for bad input, 3 for non-convergence, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    use svcalc_core::Error;
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Unconverged { .. }) => commands::EXIT_UNCONVERGED,
        Some(Error::InsufficientData { .. }) | None => 1,
        Some(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
