use thiserror::Error;

/// Errors raised by the solver layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sonic or subsonic state: u = {u}, c = {c}")]
    Sonic { u: f64, c: f64 },
    #[error("value out of range: {0}")]
    Range(String),
    #[error("root solve failed: {0}")]
    NoRoot(String),
    #[error("rarefaction integration failed: {0}")]
    Integration(String),
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("degenerate Jacobian: |det| = {det:e}")]
    DegenerateJacobian { det: f64 },
    #[error("reaction step too large: {0}")]
    StepTooLarge(String),
    #[error("CFL violation at column {k}, diamond {n}: wave reaches the lateral edge ({detail})")]
    CflViolation { k: usize, n: i64, detail: String },
    #[error("state left its background neighbourhood at column {k}, cell {n}: distance {dist:e} > {eps:e}")]
    Confinement { k: usize, n: i64, dist: f64, eps: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("quasi-1D iteration is not contracting (ratio {ratio:.3} at iteration {iteration})")]
    NoContraction { iteration: usize, ratio: f64 },
    #[error("quasi-1D iteration hit the limit of {0} iterations")]
    MaxIterations(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("missing wave data for column {0}")]
    MissingWaveData(usize),
    #[error("column {k}, diamond {n}: {source}")]
    AtDiamond {
        k: usize,
        n: i64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips diamond annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtDiamond { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn at(self, k: usize, n: i64) -> Error {
        match self {
            e @ (Error::AtDiamond { .. } | Error::CflViolation { .. } | Error::Confinement { .. }) => e,
            e => Error::AtDiamond { k, n, source: Box::new(e) },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
