use thiserror::Error;

use crate::model::{PoiId, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (files, queries, parameters).
    #[error("input error: {0}")]
    Input(String),

    #[error("unknown POI id {0}")]
    UnknownPoi(PoiId),

    #[error("map failed validation: {0}")]
    InvalidMap(ValidationReport),

    #[error("POI {to} is unreachable from POI {from}")]
    Unreachable { from: PoiId, to: PoiId },

    #[error("route is infeasible: {0}")]
    InfeasibleRoute(String),

    /// Not even the direct route from source to destination fits the budget.
    #[error("query is infeasible: direct route costs {direct_cost} > budget {budget}")]
    InfeasibleQuery { direct_cost: f64, budget: f64 },

    /// A solver declined to run (e.g. brute force on a large candidate set).
    #[error("refused: {0}")]
    Refused(String),

    #[error("search aborted: {0} cap exceeded")]
    CapExceeded(&'static str),

    #[error("index format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
