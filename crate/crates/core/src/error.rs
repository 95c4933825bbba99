use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Domain errors mean the inputs are outside the region where a quantity is
/// defined (off the sphere, on the separatrix, outside the allowed energy
/// band). Numerical errors mean a well-posed computation failed to converge.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("separatrix: parameter m = {m} is within {tol:e} of 1, the period is infinite")]
    Separatrix { m: f64, tol: f64 },
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    #[error("eigensolver did not converge for eigenvalue index {index}")]
    EigenNoConvergence { index: usize },
    #[error("root for level {level} is not bracketed in [{lo}, {hi}]")]
    RootNotBracketed { level: usize, lo: f64, hi: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for input-domain problems, false for numerical failures.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Separatrix { .. })
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain_error",
            Error::Separatrix { .. } => "separatrix",
            Error::Quadrature { .. } => "quadrature_failure",
            Error::Integration { .. } => "integration_failure",
            Error::EigenNoConvergence { .. } => "eigen_no_convergence",
            Error::RootNotBracketed { .. } => "root_not_bracketed",
            Error::Numerical(_) => "numerical_failure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
