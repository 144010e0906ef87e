use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient array has length {got}, expected 2K+1 = {expected}")]
    Length { got: usize, expected: usize },

    #[error("non-finite coefficient at mode {0}")]
    NonFinite(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mode count K = {given} violates the 1e-16 tail bound; need K >= {required}")]
    TailBound { given: usize, required: usize },

    #[error("field carries negative-mode content {0:.3e} above 1e-12")]
    NotHolomorphic(f64),

    #[error(
        "blow-up guard tripped at t = {t}: norm {norm:.3e} exceeds 1e6 x initial {initial:.3e}"
    )]
    BlowUp { t: f64, norm: f64, initial: f64 },

    #[error("outside the admissible regime: {0}")]
    Regime(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
