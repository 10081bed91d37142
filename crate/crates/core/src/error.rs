use thiserror::Error;

/// Errors raised by the laminate analysis and attack search routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaminateError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid laminate: {0}")]
    InvalidLaminate(String),

    #[error("invalid load case: {0}")]
    InvalidLoad(String),

    #[error("ply mask length {mask} does not match ply count {plies}")]
    MaskLength { mask: usize, plies: usize },

    #[error("ply index {index} out of range for {plies} plies")]
    PlyIndex { index: usize, plies: usize },

    /// The 6x6 laminate system is singular or too poorly conditioned to solve.
    #[error("laminate collapsed: reciprocal condition estimate {rcond:e} below threshold")]
    Collapsed { rcond: f64 },

    /// Every strength ratio is the unloaded sentinel.
    #[error("no ply carries load")]
    NoLoad,

    #[error("strength ratio has no positive real root (linear term {linear:e}, quadratic term {quadratic:e})")]
    NoPositiveRoot { linear: f64, quadratic: f64 },

    #[error("degenerate laminate: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = LaminateError> = std::result::Result<T, E>;
