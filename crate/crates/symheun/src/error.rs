//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parameter validation, reductions, series generation,
/// integration, and the spectral solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two points of a configuration coincide (or an evaluation point hit one).
    #[error("degenerate point configuration: {0}")]
    DegeneratePoint(String),

    /// A singular point sits at (or was mapped onto) the origin, which the
    /// series machinery forbids.
    #[error("singular point at the origin: {0}")]
    ZeroSingularPoint(String),

    /// Fractional-linear map with vanishing determinant.
    #[error("singular mobius map (|det| = {det:.3e})")]
    SingularMap { det: f64 },

    /// Cross-ratio in {0, 1, infinity}; no canonical placement exists.
    #[error("degenerate cross-ratio: {0}")]
    DegenerateCrossRatio(String),

    /// Relocation anchors could not be placed away from the singular points.
    #[error("no collision-free relocation anchors after {attempts} attempts")]
    CollidingPlacement { attempts: usize },

    /// Accessory-parameter extraction disagreed between probe points.
    #[error("accessory probe verification failed (spread {spread:.3e})")]
    ProbeFailure { spread: f64 },

    /// A branch-continued evaluation came too close to a singular point.
    #[error("branch-ambiguous evaluation: {0}")]
    BranchAmbiguity(String),

    /// Evaluation point outside the validity region of a series.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// Series tail estimate above the requested tolerance.
    #[error("series not converged (tail {estimate:.3e} > tol {tol:.3e})")]
    NotConverged { estimate: f64, tol: f64 },

    /// Recurrence rows are defined for n >= 2 only.
    #[error("recurrence index {0} < 2")]
    IndexTooSmall(usize),

    /// Adaptive integrator forced below its minimal step size.
    #[error("integrator step underflow near z = {at}")]
    StepUnderflow { at: String },

    /// Path passes closer to a singular point than the requested floor.
    #[error("path clearance {clearance:.3e} below floor {floor:.3e}")]
    ClearanceViolation { clearance: f64, floor: f64 },

    /// Tanh-sinh refinement hit the level cap without converging.
    #[error("quadrature not converged at level cap {0}")]
    QuadratureNotConverged(usize),

    /// Root iteration exhausted its budget.
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    /// A constructor rejected its inputs.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
