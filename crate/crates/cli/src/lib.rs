//! Front end for the `qcrypto` binary: argument parsing, one builder per
//! subcommand, and the `report all` regeneration run.

pub mod commands;
pub mod output;
pub mod report;

use qcrypto::auth::AuthError;
use qcrypto::channels::ChannelError;
use qcrypto::dl04game::GameError;
use qcrypto::keyagree::KeyAgreeError;
use qcrypto::keydist::KeyDistError;
use std::ffi::OsString;
use thiserror::Error;

/// Master seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0xD104;

pub const EXIT_MISS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag values; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A solver or numerical routine failed; exit code 3.
    #[error("{0}")]
    Compute(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0} acceptance check(s) missed; see the manifest")]
    AcceptanceMiss(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_SOLVER,
            CliError::Io(_) | CliError::AcceptanceMiss(_) => EXIT_MISS,
        }
    }
}

impl From<KeyDistError> for CliError {
    fn from(e: KeyDistError) -> Self {
        match e {
            KeyDistError::Domain(m) => CliError::Usage(m),
            e => CliError::Compute(e.to_string()),
        }
    }
}

impl From<AuthError> for CliError {
    fn from(e: AuthError) -> Self {
        match e {
            AuthError::Domain(_) | AuthError::MalformedKey(_) | AuthError::Unsupported { .. } => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Compute(e.to_string()),
        }
    }
}

impl From<KeyAgreeError> for CliError {
    fn from(e: KeyAgreeError) -> Self {
        match e {
            KeyAgreeError::Domain(m) => CliError::Usage(m),
            e => CliError::Compute(e.to_string()),
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::Domain { .. } => CliError::Usage(e.to_string()),
            e => CliError::Compute(e.to_string()),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Domain(m) => CliError::Usage(m),
            e => CliError::Compute(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::Parser;
    let cli = match commands::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
