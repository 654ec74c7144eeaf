//! `cifc` command implementations. `main.rs` only parses arguments and maps
//! [`CliError`] to the process exit code.

pub mod args;
pub mod commands;
pub mod inputs;

use std::fmt;

pub use args::{Cli, Command};

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files.
    Input(String),
    /// The requested computation is not defined for the inputs.
    Eval(String),
    /// A scheme failed zero-error verification.
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Eval(_) => 3,
            CliError::Verify(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Eval(m) => write!(f, "evaluation error: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub(crate) fn input_err(e: impl fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub(crate) fn eval_err(e: impl fmt::Display) -> CliError {
    CliError::Eval(e.to_string())
}

/// Runs `cli` inside a rayon pool capped by `CIFC_THREADS` (when set).
pub fn run(cli: Cli) -> Result<(), CliError> {
    let threads = match std::env::var("CIFC_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| {
                    CliError::Input(format!("CIFC_THREADS='{v}' is not a positive integer"))
                })?,
        ),
        Err(_) => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(input_err)?;
    pool.install(|| commands::dispatch(cli))
}
