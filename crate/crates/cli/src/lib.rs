//! Library side of the `m0n` command line tool: expression parsing,
//! rendering, step-by-step explanations and oracle check suites.

pub mod check;
pub mod explain;
pub mod parse;
pub mod render;

use std::fmt::Write;

use m0n::{enumerate_stable_trees, evaluate, product_to_decorated, EvalResult};
use thiserror::Error;

pub use parse::{parse, Expression, ParseError};
pub use render::Evaluation;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lib(#[from] m0n::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 3 for a product whose degree is not the
    /// dimension, 2 for every other input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(m0n::Error::DegreeMismatch { .. }) => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
}

pub fn evaluate_expression(expr: &Expression) -> Result<Evaluation, CliError> {
    let product = expr.to_product()?;
    let decorated = product_to_decorated(&product)?;
    let result = match &decorated {
        Some(d) => evaluate(d)?,
        None => EvalResult::empty(),
    };
    Ok(Evaluation {
        n: expr.n(),
        decorated,
        result,
    })
}

pub fn run_eval(expr: &Expression, format: Format) -> Result<String, CliError> {
    let ev = evaluate_expression(expr)?;
    Ok(match format {
        Format::Text => render::text(&ev),
        Format::Json => render::json(&ev),
        Format::Dot => render::dot(&ev),
    })
}

/// Lists the stable trees on `n` labels (with `codim` internal edges, or all
/// of them), one per line, followed by a count.
pub fn run_enumerate(n: u32, codim: Option<u32>, count_only: bool) -> Result<String, CliError> {
    let trees = enumerate_stable_trees(n, codim)?;
    let mut out = String::new();
    if !count_only {
        for t in &trees {
            writeln!(out, "{t}").unwrap();
        }
    }
    writeln!(out, "{}", trees.len()).unwrap();
    Ok(out)
}
