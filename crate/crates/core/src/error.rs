use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not skew-Hermitian (max deviation {deviation:e})")]
    NotSkewHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    EigenFailure { dim: usize },

    #[error("control value {value:?} lies outside the control region")]
    OutsideRegion { value: Vec<f64> },

    #[error("level {level} out of range for dimension {dim} (valid: 1..={max})", max = dim - 1)]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("no intersection found: minimized gap {gap:e} above tolerance {tol:e} at {location:?}")]
    NoIntersectionFound {
        gap: f64,
        tol: f64,
        location: Vec<f64>,
    },

    #[error("probe ball of radius {radius} around {center:?} leaves the control region; use a smaller radius")]
    ProbeOutsideRegion { center: Vec<f64>, radius: f64 },

    #[error("degenerate spectrum: level {level} has multiplicity {multiplicity}")]
    DegenerateSpectrum { level: usize, multiplicity: usize },

    #[error("vector is not normalised (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid control schedule: {0}")]
    InvalidControl(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    /// True for failures of the numerical kernels rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::EigenFailure { .. })
    }
}
