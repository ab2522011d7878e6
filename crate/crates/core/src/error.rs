use thiserror::Error;

use crate::spin_algebra::Basis;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: Basis, right: Basis },

    #[error("site {0} out of range (expected 1..=3)")]
    SiteOutOfRange(usize),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate spectrum: the global approach needs delta > sqrt(2)*g (delta = {delta}, g = {g})")]
    DegenerateSpectrum { delta: f64, g: f64 },

    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("principal-value quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error(
        "operator is not in the range of the generator: |Gamma_+| = {gamma_plus:.3e}, |Gamma_-| = {gamma_minus:.3e}"
    )]
    NotInRange { gamma_plus: f64, gamma_minus: f64 },

    #[error("non-unique kernel: second-smallest singular value {second:.3e} below gap threshold {threshold:.1e}")]
    NonUniqueKernel { second: f64, threshold: f64 },

    #[error("no kernel: smallest singular value {smallest:.3e} above zero threshold {threshold:.1e}")]
    NoKernel { smallest: f64, threshold: f64 },

    #[error("propagation is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("operation requires a {expected} Liouvillian")]
    WrongApproach { expected: &'static str },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
