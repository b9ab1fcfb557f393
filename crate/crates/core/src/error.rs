use thiserror::Error;

use crate::params::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid database: {}", join_violations(.0))]
    InvalidDatabase(Vec<Violation>),

    #[error("unknown compound `{0}`")]
    UnknownCompound(String),

    #[error("invalid composition `{text}`: {reason}")]
    Composition { text: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change in [{t_lo}, {t_hi}]: g - target = {f_lo} and {f_hi}")]
    NoSignChange {
        t_lo: f64,
        t_hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("indirect-gap composition at t = {t} inside the bracket; g is pinned at 2 there")]
    IndirectInBracket { t: f64 },

    #[error("substrate lattice constant {substrate_a} Å is not attainable in the {family} family")]
    Unattainable { family: String, substrate_a: f64 },

    #[error("at t = {t}: {source}")]
    AtPathPoint {
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
