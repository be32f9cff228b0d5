//! Error type shared by all modules.
//!
//! Variants mirror the failure modes of the numerical contracts: domain
//! violations detected before any arithmetic, resolution/aliasing failures
//! detected by self-checks, and convergence failures of iterative pieces
//! (Newton inversion, extrapolation, power iteration).

/// Toolkit-wide error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input lies outside the region where the requested operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A self-check at doubled resolution (or an aliasing probe) disagreed
    /// with the base computation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An iterative scheme failed to reach its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// A linear system or eigenproblem is too ill-conditioned to trust.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// A structural invariant (symmetry, monotonicity, pairing) failed its
    /// post-check; this signals a bug or an inadmissible input, never noise.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Boundary resampling spilled too much energy outside the resolvable band.
    #[error("undersampling error: {0}")]
    Undersampling(String),

    /// An evaluation point persistently collides with a quadrature node.
    #[error("node collision: {0}")]
    NodeCollision(String),

    /// Newton inversion of a map did not converge.
    #[error("inversion error: {0}")]
    Inversion(String),

    /// Level-curve extrapolation did not settle, indicating data that is not
    /// regular enough up to the boundary.
    #[error("boundary regularity error: {0}")]
    Regularity(String),

    /// Two maps that were claimed to bound the same curve do not.
    #[error("pairing error: {0}")]
    Pairing(String),

    /// A parameter fails validation (sign, range, monotonicity, shape).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Toolkit-wide result.
pub type Result<T> = std::result::Result<T, Error>;
