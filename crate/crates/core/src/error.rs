//! Error types shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(
        "divergent limit: entry ({row},{col}) has coefficient of magnitude {magnitude:.3e} at degree {degree}"
    )]
    DivergentLimit {
        row: usize,
        col: usize,
        degree: i32,
        magnitude: f64,
    },

    #[error("integrality failure: entry ({i},{j},{k}) = {value} is {residual:.3e} from the nearest integer")]
    IntegralityFailure {
        i: usize,
        j: usize,
        k: usize,
        value: f64,
        residual: f64,
    },

    #[error("limit failure at (I,J,K)=({i},{j},{k}): {detail}")]
    LimitFailure {
        i: usize,
        j: usize,
        k: usize,
        detail: String,
    },

    #[error("projection violation: permuted N_{{p,{i}}} has nonzero entry {value} at ({row},{col}) in the upper-right block")]
    ProjectionViolation {
        i: usize,
        row: usize,
        col: usize,
        value: i64,
    },

    #[error("malformed table: odd coefficient {value} at output triple {triple} of product ({i},{j}) cannot be halved")]
    MalformedTable {
        i: usize,
        j: usize,
        triple: usize,
        value: i64,
    },

    #[error("replacement insufficiency: negative coefficient {value} at output {k} of product ({i},{j}) after replacement")]
    ReplacementInsufficiency {
        i: usize,
        j: usize,
        k: usize,
        value: i64,
    },

    #[error("degenerate denominator: |S_(3,{r})| = {magnitude:.3e}")]
    DegenerateDenominator { r: usize, magnitude: f64 },

    #[error("factorization failure in leg {leg}: {detail}")]
    FactorizationFailure { leg: char, detail: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_p(p: u32) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p must be >= 2, got {p}")));
    }
    Ok(())
}
