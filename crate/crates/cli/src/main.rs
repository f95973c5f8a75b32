use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use m0n::MarkedSet;
use m0n_cli::check::{run_check, Suite};
use m0n_cli::{explain::explain, parse, run_enumerate, run_eval, CliError, Format};

/// Intersection numbers on the moduli space of stable rational curves.
#[derive(Parser)]
#[command(name = "m0n", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a product of boundary divisors and psi classes.
    Eval {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// The product, e.g. "D{1,2}^2 psi3"; read from stdin when absent.
        expr: Option<String>,
    },
    /// Show each step of an evaluation.
    Explain {
        #[arg(long)]
        n: u32,
        /// Show the coloring used to meet each divisor with the stratum.
        #[arg(long)]
        coloring: bool,
        expr: Option<String>,
    },
    /// List the stable trees on n labels.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        codim: Option<u32>,
        #[arg(long)]
        count_only: bool,
    },
    /// Cross-check the evaluator against independent oracles.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        n_max: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn read_expr(expr: Option<String>) -> Result<String, CliError> {
    match expr {
        Some(e) => Ok(e),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn run(cli: Cli) -> Result<(String, u8), CliError> {
    match cli.command {
        Command::Eval { n, format, expr } => {
            let text = read_expr(expr)?;
            let expr = parse(text.trim(), MarkedSet::new(n)?)?;
            Ok((run_eval(&expr, format)?, 0))
        }
        Command::Explain { n, coloring, expr } => {
            let text = read_expr(expr)?;
            let expr = parse(text.trim(), MarkedSet::new(n)?)?;
            Ok((explain(&expr, coloring)?, 0))
        }
        Command::Enumerate {
            n,
            codim,
            count_only,
        } => Ok((run_enumerate(n, codim, count_only)?, 0)),
        Command::Check {
            suite,
            n_max,
            seed,
            json,
        } => {
            let report = run_check(suite, n_max, seed)?;
            let out = if json { report.json() } else { report.text() };
            Ok((out, if report.passed() { 0 } else { 4 }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("m0n: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
