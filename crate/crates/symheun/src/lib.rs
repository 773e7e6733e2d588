//! General Heun functions through the symmetric four-point representation.
//!
//! The popular Heun form is reduced to a symmetric Fuchsian equation with
//! four finite singular points whose exponent pairs each sum to 1/2, then
//! placed on the biquadratic configuration z^4 - 2 cos(2 phi) z^2 + 1 = 0 by
//! a fractional-linear map. On that configuration the Taylor coefficients
//! obey a nine-term recurrence; inside the unit circle the series converges
//! absolutely (circular case), and the inversion symmetry provides the
//! Laurent companion outside. An adaptive complex-path integrator serves as
//! the independent numerical oracle throughout, and a spectral module treats
//! the accessory parameter as the eigenvalue of two-point boundary problems.
//!
//! Modules:
//! * [`algebra`] - parameter records, the quartic P, cross-ratio, indices.
//! * [`mobius`] - maps, generator decomposition, the extended action,
//!   canonical placement, the canonical inversion.
//! * [`transform`] - popular form -> four finite points -> symmetric form.
//! * [`series`] - the nine-term recurrence (printed rows and the derived
//!   oracle), Taylor/Laurent solutions, the weighted Wronskian.
//! * [`odeint`] - adaptive Dormand-Prince integration along complex
//!   polylines and the scaled residual.
//! * [`spectral`] - two-point boundary problems: shooting defect,
//!   eigenvalues, orthogonality integrals.
//! * [`batch`] - data-parallel evaluation helpers (rayon behind the
//!   `parallel` feature, sequential fallback otherwise).
//!
//! # Quick start
//!
//! ```
//! use num_complex::Complex64;
//! use symheun::{eval_series, residual_norm, taylor_coefficients, CanonicalParams, Engine};
//!
//! let c = Complex64::new;
//! let params = CanonicalParams::new(
//!     c(0.7, 0.0),
//!     [c(0.3, 0.0), c(0.8, 0.0), c(1.1, 0.0), c(0.5, 0.0)],
//!     c(1.3, 0.4),
//! )?;
//! let sol = taylor_coefficients(&params, (c(1.0, 0.0), c(0.0, 0.0)), 300, Engine::Oracle)?;
//! let at = eval_series(&sol, c(0.4, 0.2))?;
//! let defect = residual_norm(&params, at.f, at.df, at.ddf, c(0.4, 0.2))?;
//! assert!(defect < 1e-10 && at.tail_estimate < 1e-12);
//! # Ok::<(), symheun::Error>(())
//! ```

#![allow(clippy::needless_range_loop)] // looping j in 0..4 indexes singular-point labels

pub mod algebra;
pub mod batch;
pub mod error;
pub mod mobius;
pub mod odeint;
pub mod series;
pub mod spectral;
pub mod transform;

pub use algebra::{
    cross_ratio, elementary_symmetric, is_circular, is_circular_points, phi_from_cross_ratio,
    uniformize_indices, CanonicalParams, FuchsianParams, PointConfig, SymmetricHeunParams,
    FUCHS_TOL, TOL_DEGENERATE,
};
pub use error::{Error, Result};
pub use mobius::{
    act_chain, act_generator, canonicalize, decompose_to_generators, invert_canonical, Generator,
    GeneratorChain, MobiusMap, INFINITY,
};
pub use num_complex::Complex64;
pub use odeint::{integrate_path, integrate_to, residual_norm, HeunOde, OdeState, Path};
pub use series::{
    derive_recurrence_oracle, eval_series, eval_series_checked, laurent_solution,
    paper_recurrence_row, rho_set, taylor_coefficients, taylor_cross_check, taylor_to_tolerance,
    verify_recurrence, wronskian, Center, Engine, EngineDisagreement, Evaluation, RecurrenceOracle,
    RecurrenceRow, RhoSet, SeriesSolution,
};
pub use spectral::{
    bilinear_integrals, find_eigenvalues, grid_scan_minima, orthogonality_integral,
    orthogonality_ratio, shoot_defect, shoot_defect_at, EigenResult, EndpointData, ExponentChoice,
    Region, TwoPointContour,
};
pub use transform::{
    nu_shifts, nu_transform, prefactor_eval, relocate_infinity, NuShift, Prefactor,
    StandardHeunParams,
};
