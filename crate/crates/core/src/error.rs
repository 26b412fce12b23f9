use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (length mismatch, bad index, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("pairwise term ({i}, {j}) = {value} is not submodular")]
    NotSubmodular { i: usize, j: usize, value: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("bad file header: {0}")]
    CorruptHeader(String),

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("file truncated while reading {0}")]
    Truncated(&'static str),

    #[error("learner failed on bit {bit}: {source}")]
    Learner {
        bit: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Short machine-parsable class used by the command line front end.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Contract(_) => "contract",
            Error::Config(_) => "config",
            Error::Data(_) => "data",
            Error::NotSubmodular { .. } => "submodularity",
            Error::Numeric(_) => "numeric",
            Error::CorruptHeader(_) => "corrupt-header",
            Error::VersionMismatch { .. } => "version-mismatch",
            Error::Truncated(_) => "truncated",
            Error::Learner { .. } => "learner",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code: 2 usage, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Numeric(_) | Error::NotSubmodular { .. } | Error::Learner { .. } => 4,
            _ => 3,
        }
    }
}
