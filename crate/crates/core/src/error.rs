use std::path::PathBuf;

use thiserror::Error;

use crate::grid::GridSpec;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point must be positive and finite, got {0}")]
    InvalidPoint(f64),

    #[error("exponent evaluates to {value} < 1 at t = {t}")]
    ExponentBelowOne { t: f64, value: f64 },

    #[error("invalid exponent family: {0}")]
    InvalidFamily(String),

    #[error("grid range reversed or empty: v_min = {v_min}, v_max = {v_max}")]
    ReversedGrid { v_min: i32, v_max: i32 },

    #[error("grid needs at least one node per octave")]
    ZeroSubdivisions,

    #[error("sampled function lives on {found}, expected {expected}")]
    GridMismatch { expected: GridSpec, found: GridSpec },

    #[error("sample count {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },

    #[error("sample {index} is negative ({value})")]
    NegativeSample { index: usize, value: f64 },

    #[error("{0} is not a node of the grid")]
    NotAGridNode(f64),

    #[error("interval [{a}, {b}] is reversed")]
    ReversedInterval { a: f64, b: f64 },

    #[error("grid {0} does not contain the node t = 1")]
    MissingUnitNode(GridSpec),

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("bisection did not reach |modular - 1| <= tol after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("modular saturated at every probe")]
    Saturated,

    #[error("empty index window")]
    EmptyWindow,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("normalization violated: sup|f| = {sup:e}, weighted modular = {modular:e} (one must be <= 1)")]
    NormalizationViolated { sup: f64, modular: f64 },

    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),

    #[error("source is not monotone at node {index} (t = {t})")]
    NotMonotone { index: usize, t: f64 },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_owned(),
            reason: reason.into(),
        }
    }
}
