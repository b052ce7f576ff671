use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A longitude difference is odd, so C or D would not be integral.
    #[error("ParityError: {row}[{column}] difference {value} is odd")]
    Parity {
        row: &'static str,
        column: usize,
        value: i64,
    },

    #[error("RangeError: {field}[{row}][{column}] = {value} is outside {{0,1,2}}")]
    Range {
        field: &'static str,
        row: usize,
        column: usize,
        value: i64,
    },

    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("NotExtendable: {0}")]
    NotExtendable(String),

    #[error("InconsistentNu: prefactor exponent {twice_exponent}/2 is not an integer at (m,e) = ({m},{e})")]
    InconsistentNu { m: i64, e: i64, twice_exponent: i64 },

    #[error("NonIntegerPower: (-x^(1/2)) raised to {twice_power}/2")]
    NonIntegerPower { twice_power: i64 },

    #[error("NonTermination: lattice sum for (m,e) = ({m},{e}) still contributing at shell radius {radius}")]
    NonTermination { m: i64, e: i64, radius: u32 },

    #[error("BadRS: q*r - p*s = {value} for (p,q) = ({p},{q}), (r,s) = ({r},{s})")]
    BadRs {
        p: i64,
        q: i64,
        r: i64,
        s: i64,
        value: i64,
    },

    #[error("NotCoprime: slope ({p},{q})")]
    NotCoprime { p: i64, q: i64 },

    #[error("UnknownBuiltin: no catalog entry named {0:?}")]
    UnknownBuiltin(String),

    #[error("IoError: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// The variant name, printed by the CLI on domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parity { .. } => "ParityError",
            Error::Range { .. } => "RangeError",
            Error::Schema { .. } => "SchemaError",
            Error::NotExtendable(_) => "NotExtendable",
            Error::InconsistentNu { .. } => "InconsistentNu",
            Error::NonIntegerPower { .. } => "NonIntegerPower",
            Error::NonTermination { .. } => "NonTermination",
            Error::BadRs { .. } => "BadRS",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::UnknownBuiltin(_) => "UnknownBuiltin",
            Error::Io { .. } => "IoError",
        }
    }
}
