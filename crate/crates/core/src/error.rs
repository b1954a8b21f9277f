//! Shared error type for the simulator and analytics library.

use thiserror::Error;

/// Errors surfaced by model construction, sampling, graph realization,
/// numerics and experiment drivers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A model parameter violates its constraint (all must be strictly
    /// positive, `d >= 1`).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// An operation that requires `min(alpha, tau*alpha) > d` was called
    /// outside that regime; the defining integral diverges there.
    #[error(
        "divergent-integral regime: min(alpha, tau*alpha) = {min_value} <= d = {d}; \
         the requested quantity does not exist"
    )]
    DivergentRegime { min_value: f64, d: u32 },

    /// An argument lies outside the mathematical domain of the operation
    /// (weights live on `[1, inf)`, uniforms on `(0, 1)`, ...).
    #[error("domain error for `{what}`: {reason}")]
    Domain { what: &'static str, reason: String },

    /// A pair at distance zero was fed to the connection function. This is
    /// almost surely impossible for Poisson clouds and indicates corrupted
    /// input, so it is reported rather than patched over.
    #[error("degenerate pair: distance is zero between particles {a} and {b}")]
    DegeneratePair { a: usize, b: usize },

    /// The requested workload exceeds the configured capacity budget.
    #[error("capacity exceeded: {what} = {requested} over budget {budget}")]
    Capacity {
        what: &'static str,
        requested: u64,
        budget: u64,
    },

    /// Numerical integration failed to reach the requested tolerance
    /// within the subdivision budget.
    #[error("quadrature did not converge: {context} (estimated error {error:e}, tolerance {tolerance:e})")]
    NonConvergence {
        context: &'static str,
        error: f64,
        tolerance: f64,
    },

    /// A particle id that does not exist in the cloud was referenced.
    #[error("unknown particle id {id} (cloud has {len} particles)")]
    UnknownId { id: usize, len: usize },

    /// The degree sample does not contain enough tail mass to fit an
    /// exponent over the pre-registered window.
    #[error("insufficient tail data: {reason}")]
    InsufficientTail { reason: String },

    /// An experiment was asked to run under a parameter regime it refuses
    /// (finite boxes silently mask divergent degrees).
    #[error("regime refusal: {reason}")]
    RegimeRefusal { reason: String },

    /// A driver precondition was violated (wrong boundary mode, empty or
    /// unsorted grids, fewer than two box sides, ...).
    #[error("invalid experiment configuration: {reason}")]
    InvalidConfig { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
