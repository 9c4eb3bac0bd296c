use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian: imaginary residue {residue:.3e} in coherence component")]
    NonHermitianInput { residue: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("detuning must be nonzero")]
    ZeroDetuning,

    #[error("invalid rates: {0}")]
    InvalidRates(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kappa = {0} lies outside [0, 1]")]
    InvalidKappa(f64),

    #[error("positivity lost: minimum eigenvalue {min_eigenvalue:.3e} (step too large?)")]
    PositivityLoss { min_eigenvalue: f64 },

    #[error("trace drifted by {drift:.3e}")]
    TraceDrift { drift: f64 },

    #[error("adaptive step underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("operation unsupported for the {0} channel")]
    UnsupportedChannel(&'static str),

    #[error("stationary generator is singular")]
    SingularGenerator,

    #[error("negative spectrum in concurrence matrix: eigenvalue {0:.3e}")]
    NegativeSpectrum(f64),
}
