//! `majorize`: command-line front end for matrix majorization.
//!
//! Exit codes: 0 for a positive answer (feasible, sufficient, found, yes),
//! 1 for a negative one, 2 for inconclusive, 64 for usage errors, 65 for
//! bad input data, 66 for unreadable input and 70 for solver failures.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use majorize_core::GridSpec;

use crate::commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "majorize", version, about = "Matrix majorization of statistical experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide exact majorization by linear programming.
    CheckExact {
        #[command(flatten)]
        pair: PairArgs,
        /// Residual tolerance for the witness.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compare monotones on a finite grid.
    Certify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Smallest tensor power or catalyst order that makes the LP feasible.
    Search {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = KindArg::LargeSample)]
        kind: KindArg,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Largest number of rows an LP input may have.
        #[arg(long, default_value_t = majorize_core::experiment::DEFAULT_ROW_CAP)]
        row_cap: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Tabulate divergences or homomorphisms as CSV.
    Divergence {
        /// First experiment.
        p: String,
        /// Optional second experiment; adds its values and the margins.
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = DivergenceKind::Renyi)]
        kind: DivergenceKind,
        /// Comma-separated orders for `renyi`; the grid orders otherwise.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Asymptotic thermal convertibility of commuting states.
    Thermal {
        /// JSON with `energies`, `beta`, `rho` and `sigma`.
        input: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Power-universality classification.
    Classify {
        input: String,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
    },
    /// Print the canonical form of an experiment.
    Canon {
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct PairArgs {
    /// First experiment (`.json` or `.csv`, `-` for JSON on stdin).
    p: String,
    /// Second experiment.
    q: String,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 8)]
    grid_resolution: usize,
    #[arg(long, default_value_t = 64.0)]
    alpha_max: f64,
    /// Leave out the order-infinity checks.
    #[arg(long)]
    no_infinity: bool,
    /// Margins within this distance of zero are ties.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            simplex_resolution: self.grid_resolution,
            alpha_max: self.alpha_max,
            include_infinity: !self.no_infinity,
            tie_tol: self.tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Auto,
    Minimal,
    Dominating,
    Dichotomy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    LargeSample,
    Catalytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DivergenceKind {
    Renyi,
    Phi,
    Multivar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("MAJORIZE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("MAJORIZE_THREADS must be a positive integer, got {raw:?}")))?;
    // a second initialisation only happens in tests; ignoring it is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match cli.command {
        Command::CheckExact { pair, tol } => commands::check_exact(&pair.p, &pair.q, tol),
        Command::Certify { pair, regime, mode, grid, format } => {
            commands::certify(&pair.p, &pair.q, regime, mode, &grid.spec(), format)
        }
        Command::Search { pair, kind, n_max, row_cap, tol } => {
            commands::search(&pair.p, &pair.q, kind, n_max, row_cap, tol)
        }
        Command::Divergence { p, q, kind, alpha, grid } => {
            commands::divergence(&p, q.as_deref(), kind, alpha.as_deref(), &grid.spec())
        }
        Command::Thermal { input, grid } => commands::thermal(&input, &grid.spec()),
        Command::Classify { input, regime } => commands::classify(&input, regime),
        Command::Canon { input, format } => commands::canon(&input, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("majorize: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
