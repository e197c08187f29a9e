use std::path::PathBuf;

use thiserror::Error;

use crate::zero_error::ChannelInput;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid basis set: {0}")]
    InvalidBasisSet(String),

    #[error("input {0} has no orthogonal partner, channel row would be empty")]
    EmptyNeighbourhood(ChannelInput),

    #[error("vertex set is not independent: {0} and {1} are confusable")]
    NotIndependent(ChannelInput, ChannelInput),

    #[error("decoder candidates {0} and {1} are not orthogonal")]
    CandidatesNotOrthogonal(ChannelInput, ChannelInput),

    #[error("residual state is orthogonal to both candidates {0} and {1}")]
    ResidualOrthogonal(ChannelInput, ChannelInput),

    #[error("residual state is not one of the candidates (best fidelity {fidelity})")]
    AmbiguousResidual { fidelity: f64 },

    #[error("quantum branch failed: message {message}, outcome {outcome}, output {output}: {reason}")]
    QuantumBranch {
        message: usize,
        outcome: ChannelInput,
        output: String,
        reason: String,
    },

    #[error("scale t = {t} is below the dimension d = {d}")]
    ScaleTooSmall { t: i64, d: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("strategy is not total on the support: missing c1({0})")]
    MissingControl(i64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
