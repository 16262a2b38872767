use thiserror::Error;

/// Errors produced by the solvers, kernels and run harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("singular symplectic weight at the zero wavenumber")]
    SingularSymplecticWeight,

    #[error("DNO order {order} outside supported range 0..={max}")]
    InvalidOrder { order: i64, max: usize },

    #[error("blow-up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("shock formation in the Burgers flow between s = {from} and s = {to}")]
    ShockFormation { from: f64, to: f64 },

    #[error("singular kernel input: {0}")]
    SingularKernel(String),

    #[error("resonant/degenerate quad: {0}")]
    ResonantQuad(String),

    #[error("wavenumber {value} is not on the lattice (spacing {spacing})")]
    NonLattice { value: f64, spacing: f64 },

    #[error("stability query at the origin (lambda, mu) = (0, 0)")]
    OriginQuery,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that stem from the numerical integration itself
    /// rather than from the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::BlowUp { .. } | Error::ShockFormation { .. })
    }
}
