//! Verification suites, profile export and report aggregation on top of
//! `soliton-core`.

pub mod aggregate;
pub mod export;
pub mod pool;
pub mod spec;
pub mod suites;

pub use spec::{RunReport, VerifySpec};

pub const TOOL_VERSION: &str = concat!("soliton-forge ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    /// Bad flags, unknown names or inputs that do not parse (exit 2).
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed (exit 1).
    #[error("{0}")]
    Failure(String),
}

impl ForgeError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ForgeError::Usage(_) => 2,
            ForgeError::Failure(_) => 1,
        }
    }
}

impl From<std::io::Error> for ForgeError {
    fn from(e: std::io::Error) -> Self {
        ForgeError::Failure(format!("io: {e}"))
    }
}
