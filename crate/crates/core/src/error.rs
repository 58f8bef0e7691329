use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file. `path` is a JSON path such as `legs[3].schedule`.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("instance violates {} invariant(s): {}", .0.len(), join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("solution violates {} rule(s): {}", .0.len(), join(.0))]
    InvalidSolution(Vec<Violation>),

    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },

    #[error("duals not from a <=-constraint system: {0}")]
    DualSign(String),

    #[error("negative Lagrange multiplier: {0}")]
    NegativeMultiplier(String),

    #[error("request {0} has no column in the restricted master")]
    MissingColumn(usize),

    #[error("request {0} has no feasible path")]
    NoFeasiblePath(usize),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("instance too large for oracle: {0}")]
    OracleLimit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}
