use std::fmt;
use std::path::Path;

use pairtrack::evaluation::EvalError;
use pairtrack::io::IoError;
use pairtrack::simulator::SimulatorError;
use pairtrack::sweep::SweepError;
use pairtrack::tracker::TrackerError;

/// Exit code for malformed or missing input.
pub const EXIT_INPUT: u8 = 2;
/// Exit code for frame ordering and clock errors.
pub const EXIT_PROTOCOL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Protocol(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Protocol(_) => EXIT_PROTOCOL,
        }
    }

    pub fn input(context: impl fmt::Display, e: impl fmt::Display) -> Self {
        CliError::Input(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Protocol(m) => f.write_str(m),
        }
    }
}

impl From<TrackerError> for CliError {
    fn from(e: TrackerError) -> Self {
        match e {
            TrackerError::OutOfOrderFrame { .. } => CliError::Protocol(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::ClockMismatch { .. } | EvalError::DuplicateFrame { .. } => CliError::Protocol(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimulatorError> for CliError {
    fn from(e: SimulatorError) -> Self {
        CliError::Input(format!("scenario: {e}"))
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        CliError::Input(format!("pipeline: {e}"))
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(dir.display(), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::input(path.display(), e))
}

/// Attaches the file name to a parse error.
pub fn parsed<T>(path: &Path, r: Result<T, IoError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::input(path.display(), e))
}
