use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("{file}:{line}: key `{key}`: {message}")]
    Config {
        file: String,
        line: usize,
        key: String,
        message: String,
    },

    #[error("delay tau = {tau} is not an integer multiple of dt = {dt}")]
    LagGrid { tau: f64, dt: f64 },

    #[error("line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no positive equilibrium in [0, {s_max}]")]
    NoPositiveEquilibrium { s_max: f64 },

    #[error("several positive equilibria found: {roots:?}")]
    MultiplePositiveEquilibria { roots: Vec<f64> },

    #[error("hyp44 violated: g has strict local maxima at {first} and {second}")]
    Hyp44Violated { first: f64, second: f64 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("persistence floor not constructible: {0}")]
    PersistenceFloor(String),

    #[error("blow-up at t = {time}: node {node} has value {value}")]
    BlowUp { time: f64, node: usize, value: f64 },

    #[error("positivity violated at t = {time}: node {node} has value {value}")]
    Positivity { time: f64, node: usize, value: f64 },

    #[error("record spans {span} time units, at least {required} needed")]
    RecordTooShort { span: f64, required: f64 },

    #[error("no decay-rate certificate: alpha = {alpha} does not exceed beta = {beta}")]
    NoCertificate { alpha: f64, beta: f64 },

    #[error("error ||u - u*|| never enters the fit window [{lo}, {hi}]")]
    InsufficientDecay { lo: f64, hi: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),
}

impl Error {
    /// Errors caused by bad user input (bad config, files, parameters).
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Config { .. }
                | Error::LagGrid { .. }
                | Error::Table { .. }
                | Error::Io { .. }
        )
    }

    /// Short identifier used in CSV output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Config { .. } => "config",
            Error::LagGrid { .. } => "lag_grid",
            Error::Table { .. } => "table",
            Error::Io { .. } => "io",
            Error::NoPositiveEquilibrium { .. } => "no_positive_equilibrium",
            Error::MultiplePositiveEquilibria { .. } => "multiple_positive_equilibria",
            Error::Hyp44Violated { .. } => "hyp44_violated",
            Error::Structural(_) => "structural",
            Error::PersistenceFloor(_) => "persistence_floor",
            Error::BlowUp { .. } => "blowup",
            Error::Positivity { .. } => "positivity",
            Error::RecordTooShort { .. } => "record_too_short",
            Error::NoCertificate { .. } => "no_certificate",
            Error::InsufficientDecay { .. } => "insufficient_decay",
            Error::NotApplicable(_) => "not_applicable",
        }
    }

    pub(crate) fn invalid(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }
}
