use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("|lambda| = {modulus} is not 1 within tolerance")]
    NotUnitModulus { modulus: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{got} samples cannot resolve modes up to {max_mode} (need at least {need})")]
    TooFewSamples { got: usize, need: usize, max_mode: usize },

    #[error("matrix is not normal (commutator residual {residual:e})")]
    NonNormalInput { residual: f64 },

    #[error("eigenvalue {angle} rad lies on the logarithm cut at {cut} rad")]
    EigenvalueOnCut { angle: f64, cut: f64 },

    #[error("skew matrix has an eigenvalue within tolerance of zero")]
    ZeroEigenvalue,

    #[error("orthogonal matrix has +1 as an eigenvalue")]
    EigenvalueOne,

    #[error("dimension {0} is odd")]
    OddDimension(usize),

    #[error("paths lie over different points (projection gap {gap:e})")]
    DifferentFibres { gap: f64 },

    #[error("vector has norm {norm}, expected 1")]
    NonUnitVector { norm: f64 },

    #[error("an eigenvalue has real part within tolerance of the wall r = {r}")]
    EigenvalueOnWall { r: f64 },

    #[error("projection between spectral subspaces is degenerate (smallest singular value {sigma:e})")]
    ProjectionDegenerate { sigma: f64 },

    #[error("twisted element has -1 as an eigenvalue; complex structure field is inconsistent")]
    EigenvalueMinusOne,

    #[error("mode {mode} lies outside the window of half-width {window}")]
    ModeOutsideWindow { mode: i64, window: i64 },

    #[error("truncation dropped mass {mass:e} outside the window")]
    Overflow { mass: f64 },

    #[error("window mismatch: {0} vs {1}")]
    WindowMismatch(usize, usize),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("matrix is not in {group} (residual {residual:e})")]
    NotInGroup { group: &'static str, residual: f64 },

    #[error("matrix is not in {algebra} (residual {residual:e})")]
    NotInAlgebra { algebra: &'static str, residual: f64 },

    #[error("operator is not polarising: {0}")]
    NotPolarising(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
