use std::fmt;

/// Failure classes, each mapped to its own exit status.
#[derive(Debug)]
pub enum HarnessError {
    /// Invalid or inconsistent configuration (exit 2).
    Config(String),
    /// Failure while playing, evaluating or writing (exit 3).
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config(m) => write!(f, "config error: {m}"),
            HarnessError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<optimist_core::Error> for HarnessError {
    fn from(e: optimist_core::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

pub fn config<E: fmt::Display>(e: E) -> HarnessError {
    HarnessError::Config(e.to_string())
}

pub fn runtime<E: fmt::Display>(e: E) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

pub type Result<T> = std::result::Result<T, HarnessError>;
