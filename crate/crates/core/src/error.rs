use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for `{0}`")]
    NonFinite(&'static str),

    #[error("`{name}` out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("beamformer has {got} positions, configuration expects {expected}")]
    AntennaCount { expected: usize, got: usize },

    #[error("beamformer positions must be strictly increasing")]
    Unordered,

    #[error("no admissible grid point left for antenna {antenna}")]
    Infeasible { antenna: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("anchor count mismatch: expected {expected}, got {got}")]
    AnchorMismatch { expected: usize, got: usize },
}
