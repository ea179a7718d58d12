//! Crate-wide error type and the exit-code contract used by the CLI.

use crate::plan::Violation;
use thiserror::Error;

/// Process exit codes: `0` ok, `2` infeasible, `3` invalid input, `4` corruption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Infeasible,
    InvalidInput,
    Corruption,
}

impl ExitClass {
    pub fn code(self) -> i32 {
        match self {
            ExitClass::Infeasible => 2,
            ExitClass::InvalidInput => 3,
            ExitClass::Corruption => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("version {0} has no materialization cost")]
    MissingDiagonal(usize),

    #[error("unknown version {0}")]
    UnknownVersion(usize),

    #[error("invalid plan: {}", format_violations(.0))]
    InvalidPlan(Vec<Violation>),

    #[error("storage budget {budget} is below the minimum feasible cost {minimum}")]
    InfeasibleBudget { budget: u64, minimum: u64 },

    #[error("recreation bound {bound} is infeasible{}", match .version { Some(v) => format!(": version {v} cannot meet it"), None => String::new() })]
    InfeasibleBound { bound: u64, version: Option<usize> },

    #[error("instance has {n} versions; enumeration supports at most {max}")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("wrong base version: artifact expects a different source digest")]
    WrongBase,

    #[error("corruption detected{}: {detail}", match .version { Some(v) => format!(" for version {v}"), None => String::new() })]
    Corruption {
        version: Option<usize>,
        detail: String,
    },

    #[error("repository is locked by another writer")]
    RepoLocked,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::InfeasibleBudget { .. } | Error::InfeasibleBound { .. } => ExitClass::Infeasible,
            Error::WrongBase | Error::Corruption { .. } => ExitClass::Corruption,
            _ => ExitClass::InvalidInput,
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
