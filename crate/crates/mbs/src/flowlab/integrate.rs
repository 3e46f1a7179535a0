//! Fixed-step classical Runge-Kutta integration of the gradient flow on the
//! sphere-product examples.
//!
//! The vector field is the projected (tangential) gradient, so the exact
//! flow preserves the constraints; the integrator measures how far a raw
//! step drifts from the constraint set as a step-size diagnostic, then
//! renormalizes each sphere block. Integration stops when the gradient is
//! negligible or the time budget runs out, and the endpoint is classified
//! against the analytic critical orbits.

use nalgebra::DVector;

use super::geometry::ExampleManifold;
use super::{
    FlowError, DRIFT_LIMIT, GRAD_STOP, MONOTONE_STEP_TOL, ON_MANIFOLD_TOL, RECORD_STRIDE,
    TERMINAL_TOL,
};

/// Whether to follow the negative gradient (toward minima) or the positive
/// gradient (toward maxima).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FlowDirection {
    Descend,
    Ascend,
}

/// A recorded flow line: sampled points with their times, and the endpoint
/// classification against the analytic orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sampled points, every few steps plus the endpoint; all renormalized
    /// onto the constraint set.
    pub points: Vec<DVector<f64>>,
    /// Flow times of the sampled points, starting at 0.
    pub times: Vec<f64>,
    /// Label of the analytic orbit the endpoint landed on, if it is within
    /// the terminal tolerance of one.
    pub terminal_orbit: Option<String>,
    /// Distance from the endpoint to the nearest analytic orbit.
    pub terminal_distance: f64,
}

impl Trajectory {
    /// The endpoint of the flow line.
    pub fn final_point(&self) -> &DVector<f64> {
        self.points.last().expect("a trajectory records at least its start point")
    }
}

/// Integrates the downward gradient flow from `x0` with fixed step `step`
/// until the gradient norm falls below the stopping threshold or `max_time`
/// elapses.
///
/// # Errors
///
/// `OffManifold` if `x0` violates the sphere constraints;
/// `StepTooLarge` if a raw step drifts from the constraint set by more than
/// the drift limit, indicating the step size is too coarse for the field.
pub fn integrate_flow(
    ex: &ExampleManifold,
    x0: &DVector<f64>,
    step: f64,
    max_time: f64,
) -> Result<Trajectory, FlowError> {
    integrate_directed(ex, x0, step, max_time, FlowDirection::Descend)
}

pub(crate) fn integrate_directed(
    ex: &ExampleManifold,
    x0: &DVector<f64>,
    step: f64,
    max_time: f64,
    direction: FlowDirection,
) -> Result<Trajectory, FlowError> {
    assert!(step > 0.0 && max_time > 0.0, "step and time budget must be positive");
    let residual = ex.constraint_residual(x0);
    if residual > ON_MANIFOLD_TOL {
        return Err(FlowError::OffManifold { residual });
    }

    let sign = match direction {
        FlowDirection::Descend => -1.0,
        FlowDirection::Ascend => 1.0,
    };
    let field = |x: &DVector<f64>| ex.tangent_gradient(x) * sign;

    let mut x = ex.project(x0);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut points = vec![x.clone()];
    let mut times = vec![0.0];

    while t < max_time {
        if ex.tangent_gradient(&x).norm() < GRAD_STOP {
            break;
        }

        let k1 = field(&x);
        let k2 = field(&(&x + &k1 * (step / 2.0)));
        let k3 = field(&(&x + &k2 * (step / 2.0)));
        let k4 = field(&(&x + &k3 * step));
        let raw = &x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);

        let drift = ex.constraint_residual(&raw);
        if drift > DRIFT_LIMIT {
            return Err(FlowError::StepTooLarge { drift });
        }

        let next = ex.project(&raw);
        if cfg!(debug_assertions) {
            let df = (ex.f_value(&next) - ex.f_value(&x)) * sign;
            debug_assert!(
                df > -MONOTONE_STEP_TOL,
                "flow must move monotonically: f changed by {df:e} against the flow direction"
            );
        }

        x = next;
        t += step;
        steps += 1;
        if steps.is_multiple_of(RECORD_STRIDE) {
            points.push(x.clone());
            times.push(t);
        }
    }

    if times.last() != Some(&t) {
        points.push(x.clone());
        times.push(t);
    }

    let (nearest, distance) = ex.nearest_orbit(&x);
    let terminal_orbit = (distance < TERMINAL_TOL).then(|| nearest.label.clone());
    Ok(Trajectory { points, times, terminal_orbit, terminal_distance: distance })
}
