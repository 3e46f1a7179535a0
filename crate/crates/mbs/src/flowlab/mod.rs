//! Numerical gradient-flow laboratory on built-in example manifolds.
//!
//! This module provides an independent, floating-point check of the
//! critical-orbit data used by the exact chain-level machinery: it knows
//! the example manifolds concretely (sphere products with an isometric
//! torus action and an invariant polynomial function), integrates the
//! gradient flow, classifies critical orbits by Hessian index, and scans
//! which orbits the downward flow connects. Agreement between these
//! measurements and the combinatorial input data is what the integration
//! suite certifies.
//!
//! Everything here is deterministic for a fixed RNG seed.

pub mod detect;
pub mod geometry;
pub mod hessian;
pub mod integrate;
pub mod jet;

use nalgebra::DVector;
use thiserror::Error;

pub use detect::{
    connection_scan, connection_scan_with, find_critical_orbits, find_critical_orbits_with,
    ConnectionScan, CriticalDetection,
};
pub use geometry::{AnalyticOrbit, ExampleManifold, PlaneAction, SphereBlock};
pub use hessian::hessian_index;
pub use integrate::{integrate_flow, Trajectory};

/// Default integrator step. Small enough that the raw per-step drift of the
/// classical fourth-order scheme stays orders of magnitude below the drift
/// limit on every example, large enough that a full descent costs a few
/// thousand steps.
pub const DEFAULT_STEP: f64 = 1e-2;

/// Default integration time budget. Generic flow lines on the examples
/// converge within a few tens of time units; the budget leaves room for
/// lines that linger near a saddle before committing.
pub const DEFAULT_MAX_TIME: f64 = 200.0;

/// A point is accepted as on-manifold when every sphere-factor norm is
/// within this of 1. Renormalized points sit at machine epsilon; the
/// tolerance allows externally supplied coordinates printed with ~10
/// digits.
pub const ON_MANIFOLD_TOL: f64 = 1e-9;

/// Flow integration stops once the gradient norm falls below this. Near a
/// nondegenerate orbit the terminal point then lies within ~1e-8 of it,
/// far tighter than the classification tolerance.
pub const GRAD_STOP: f64 = 1e-8;

/// A raw (unprojected) integration step may drift at most this far from
/// the constraint set; more indicates the step size is too coarse for the
/// field. Correctly sized steps drift below 1e-10.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// An endpoint is classified as landing on an analytic orbit when its
/// group distance to the orbit is below this. Distinct orbits on every
/// example are at least 0.5 apart, so classification is unambiguous by
/// three orders of magnitude.
pub const TERMINAL_TOL: f64 = 1e-4;

/// Per-step tolerance for the monotonicity self-check: a correct descent
/// step may raise the function value only by rounding noise.
pub const MONOTONE_STEP_TOL: f64 = 1e-10;

/// Trajectories record every this-many steps (plus the endpoint), keeping
/// recorded flow lines at a few hundred points.
pub const RECORD_STRIDE: usize = 10;

/// Hessian eigenvalues within this of zero make the index untrustworthy
/// and are reported as degenerate. The example orbits have normal
/// eigenvalues of magnitude ≥ 1, six orders away.
pub const HESSIAN_CUTOFF: f64 = 1e-6;

/// A point passed to index computation must have gradient norm below this
/// to count as critical. Flow terminals (≤ 1e-8) and Newton-refined points
/// (≤ 1e-10) both clear it with two orders of margin.
pub const CRITICAL_GRAD_TOL: f64 = 1e-6;

/// Newton refinement accepts once the gradient norm is below this —
/// quadratic convergence reaches it in a few steps whenever the iteration
/// converges at all.
pub const NEWTON_ACCEPT: f64 = 1e-10;

/// Spread below which sampled function values and gradients mean the
/// function is constant rather than merely flat somewhere: pure rounding
/// noise sits at ~1e-16, genuine variation on the examples at ~1.
pub const CONSTANT_F_TOL: f64 = 1e-13;

/// Default RNG seed for randomized detection (overridable per call and via
/// the CLI environment).
pub const DEFAULT_RNG_SEED: u64 = 0x4d42_535f_5345_4544;

/// Failure modes of the numerical flow machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    /// The point violates the sphere-product constraints.
    #[error("point is off the constraint set: residual {residual:.3e} exceeds the on-manifold tolerance")]
    OffManifold { residual: f64 },
    /// A raw integration step left the constraint set by more than the
    /// drift limit.
    #[error("integration step too coarse: raw step drifted {drift:.3e} from the constraint set")]
    StepTooLarge { drift: f64 },
    /// Index computation was asked at a point that is not critical.
    #[error("point is not critical: Riemannian gradient norm is {gradient_norm:.3e}")]
    NotCritical { gradient_norm: f64 },
    /// A normal Hessian eigenvalue is too close to zero to trust its sign.
    #[error("normal Hessian is numerically degenerate: eigenvalue {eigenvalue:.3e}")]
    DegenerateHessian { eigenvalue: f64 },
    /// The function is constant, so critical-point detection is vacuous.
    #[error("the function is constant: every point is critical, detection is vacuous")]
    ConstantFunction,
    /// A label named no analytic orbit.
    #[error("no analytic orbit is labeled `{label}`")]
    UnknownOrbit { label: String },
    /// A connection scan was requested from an orbit with no unstable
    /// directions.
    #[error("orbit `{label}` has index 0: no unstable directions to scan")]
    IndexZeroOrbit { label: String },
}

/// The Riemannian gradient of the example's invariant function at an
/// on-manifold point. Free-function form of
/// [`ExampleManifold::riemannian_gradient`].
///
/// # Errors
///
/// `OffManifold` when the point violates the sphere constraints.
pub fn riemannian_gradient(
    ex: &ExampleManifold,
    x: &DVector<f64>,
) -> Result<DVector<f64>, FlowError> {
    ex.riemannian_gradient(x)
}
