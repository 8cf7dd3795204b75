use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state has no terms left after canonicalization")]
    EmptyState,

    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("non-finite amplitude or coefficient")]
    NonFinite,

    #[error("degenerate state: squared norm {norm_sq:e} is not resolvable above {floor:e}; coarsen the merge tolerance")]
    DegenerateState { norm_sq: f64, floor: f64 },

    #[error("degenerate amplitude |alpha| = {0:e} for this construction")]
    DegenerateAlpha(f64),

    #[error("Fock expansion overflows: |alpha|^2 = {abs_sq} with cutoff {cutoff}")]
    FockOverflow { abs_sq: f64, cutoff: usize },

    #[error("truncation inadequate: tail bound {tail_bound:e} exceeds tolerance {tolerance:e}")]
    TruncationInadequate { tail_bound: f64, tolerance: f64 },

    #[error("truncation too small: need cutoff > {needed}, got {got}")]
    TruncationTooSmall { needed: usize, got: usize },

    #[error("shape mismatch between Fock arrays: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),

    #[error("invalid bipartition {subset:?} of {modes} modes")]
    InvalidBipartition { subset: Vec<usize>, modes: usize },

    #[error("matrix is not unitary: defect {defect:e} exceeds tolerance {tolerance:e}")]
    NonUnitary { defect: f64, tolerance: f64 },

    #[error("matrix is not square or is empty: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("splitter size {splitter} does not match state modes {modes}")]
    DimensionMismatch { splitter: usize, modes: usize },

    #[error("difference quotient ill-conditioned: cancellation factor {factor:e} for n = {n}, h = {h}")]
    IllConditioned { n: usize, h: f64, factor: f64 },

    #[error("could not place {r} points with separation {min_sep} in radius {radius} after {attempts} attempts")]
    SamplingFailed { r: usize, min_sep: f64, radius: f64, attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
