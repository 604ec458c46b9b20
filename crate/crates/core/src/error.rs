use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate objective: objective vector is zero")]
    DegenerateObjective,

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("zero normal: constraint normal (a1, a2) is (0, 0)")]
    ZeroNormal,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("interior hint required: a two-vertex open region has no preferred side")]
    InteriorHintRequired,

    #[error("region builder is not in the drawing state")]
    NotDrawing,

    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ill-conditioned: KKT system is numerically singular")]
    IllConditioned,

    #[error("barrier unbounded: iterate left the box |x| <= {limit:e}")]
    BarrierUnbounded { limit: f64 },

    #[error("empty interior: no strictly feasible point found")]
    EmptyInterior,

    #[error("redundant constraint row {0} could not be pivoted out of phase one")]
    RedundantRow(usize),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("solve cancelled")]
    Cancelled,

    #[error("invalid problem file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
