use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symplectic: |M^T J M - J|_max = {residual:.3e} > {tol:.1e}")]
    NonSymplectic { residual: f64, tol: f64 },

    #[error("coordinate change is not Darboux-to-Darboux: residual {residual:.3e} > {tol:.1e}")]
    NonSymplecticJacobian { residual: f64, tol: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("phase path is not closed: endpoint gap {0:.3e}")]
    NotClosed(f64),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("Maslov residual {residual:.3} exceeds {limit}")]
    MaslovResidual { residual: f64, limit: f64 },

    #[error("validation failed: {0}")]
    ValidationFailure(String),

    #[error("invalid trapezoid: {0}")]
    InvalidTrapezoid(String),

    #[error("chart {0} has no invariance certificate")]
    MissingInvarianceCertificate(String),

    #[error("boundary Hamiltonian is not constant: relative spread {spread:.3e}")]
    NonConstantBoundaryHamiltonian { spread: f64 },

    #[error("certificate '{certificate}' failed: {detail}")]
    CertificateFailure { certificate: String, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
