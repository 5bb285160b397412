//! Exit statuses and the `ERR <CODE> <detail>` line.

use std::fmt;
use std::io;

use wise_core::bridge::BridgeError;
use wise_core::exercise::ExerciseError;
use wise_core::game::GameError;
use wise_core::profile::ProfileError;
use wise_core::session::SessionError;
use wise_core::stream::ScriptError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Usage = 1,
    Timeout = 2,
    Io = 3,
    DataFormat = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub code: &'static str,
    pub detail: String,
}

impl CliError {
    pub fn new(status: Status, code: &'static str, detail: impl Into<String>) -> Self {
        CliError { status, code, detail: detail.into() }
    }

    pub fn usage(detail: impl Into<String>) -> Self {
        CliError::new(Status::Usage, "USAGE", detail)
    }

    pub fn timeout(detail: impl Into<String>) -> Self {
        CliError::new(Status::Timeout, "TIMEOUT", detail)
    }

    pub fn data(code: &'static str, detail: impl Into<String>) -> Self {
        CliError::new(Status::DataFormat, code, detail)
    }

    /// I/O failure on a named file or endpoint.
    pub fn io(target: &str, e: io::Error) -> Self {
        CliError::new(Status::Io, "IO", format!("{target}: {e}"))
    }

    pub fn exit_code(&self) -> i32 {
        self.status as i32
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let detail = self.detail.replace('\n', " ");
        write!(f, "ERR {} {}", self.code, detail.trim())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new(Status::Io, "IO", e.to_string())
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Io(_) => CliError::new(Status::Io, "IO", e.to_string()),
            _ => CliError::data(e.code(), e.to_string()),
        }
    }
}

impl From<ScriptError> for CliError {
    fn from(e: ScriptError) -> Self {
        CliError::data("BAD_SCRIPT", e.to_string())
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        CliError::data("BAD_PROFILE", e.to_string())
    }
}

impl From<ExerciseError> for CliError {
    fn from(e: ExerciseError) -> Self {
        CliError::data("BAD_EXERCISE", e.to_string())
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::data("BAD_INPUT", e.to_string())
    }
}

impl From<BridgeError> for CliError {
    fn from(e: BridgeError) -> Self {
        CliError::data(e.code(), e.to_string())
    }
}
