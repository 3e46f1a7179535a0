//! Randomized detection of critical orbits and downward-connection scans.
//!
//! Detection combines three independent mechanisms per random seed: the
//! downward flow (finds minima), the upward flow (finds maxima), and damped
//! Newton iteration on the gradient restricted to directions normal to the
//! group orbits (finds saddles, which generic flow lines miss). Candidates
//! are clustered up to the group action, each cluster keeps its most
//! converged point as representative, and representatives are classified by
//! Hessian index and matched against the analytic orbits.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::geometry::ExampleManifold;
use super::hessian::{hessian_in_basis, hessian_index, normal_in_tangent_basis};
use super::integrate::{integrate_directed, FlowDirection, Trajectory};
use super::{
    FlowError, CONSTANT_F_TOL, DEFAULT_MAX_TIME, DEFAULT_RNG_SEED, DEFAULT_STEP, GRAD_STOP,
    HESSIAN_CUTOFF, NEWTON_ACCEPT,
};

/// Newton iteration budget per refinement attempt.
const NEWTON_MAX_ITERS: usize = 80;
/// Largest Newton step accepted before rescaling (trust radius).
const NEWTON_TRUST_RADIUS: f64 = 0.25;
/// Points sampled when probing whether the function is constant.
const CONSTANT_PROBE_SAMPLES: usize = 24;
/// Size of the initial displacement along unstable directions in a
/// connection scan: small enough to stay in the linearized regime, large
/// enough that the flow leaves the saddle in reasonable time.
const PERTURB_RADIUS: f64 = 1e-3;

/// One detected critical orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalDetection {
    /// The most converged point found on the orbit.
    pub representative_point: DVector<f64>,
    /// Function value at the representative.
    pub f_value: f64,
    /// Riemannian gradient norm at the representative.
    pub gradient_norm: f64,
    /// Number of negative normal Hessian eigenvalues.
    pub index: usize,
    /// Label of the analytic orbit this detection matched, if any lies
    /// within the matching tolerance.
    pub matched_label: Option<String>,
}

/// Outcome of a downward-connection scan from one critical orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionScan {
    /// How many perturbed flow lines terminated on each labeled orbit.
    pub tallies: BTreeMap<String, usize>,
    /// Flow lines whose endpoint matched no analytic orbit.
    pub unresolved: usize,
}

/// A uniformly random point of the sphere product: each block is an
/// isotropic Gaussian vector rescaled to unit norm.
fn random_point(ex: &ExampleManifold, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let raw = DVector::from_fn(ex.ambient_dim(), |_, _| rng.sample(StandardNormal));
    ex.project(&raw)
}

/// Damped Newton iteration on the gradient, restricted to the subspace of
/// the tangent space normal to the group orbit directions (where the
/// gradient of an invariant function lives). Converges to saddles as
/// readily as to extrema. Returns the refined point once the gradient norm
/// passes the acceptance threshold, or `None` if the iteration stalls.
fn newton_refine(ex: &ExampleManifold, start: &DVector<f64>) -> Option<DVector<f64>> {
    let mut x = ex.project(start);
    for _ in 0..NEWTON_MAX_ITERS {
        let grad = ex.tangent_gradient(&x);
        let gnorm = grad.norm();
        if gnorm < NEWTON_ACCEPT {
            return Some(x);
        }

        let basis = normal_in_tangent_basis(ex, &x);
        if basis.is_empty() {
            return None;
        }
        let h = hessian_in_basis(ex, &x, &basis);
        let g_n = DVector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(&grad)));
        let delta_n = h.lu().solve(&(-&g_n))?;

        let mut delta = DVector::zeros(ex.ambient_dim());
        for (coef, b) in delta_n.iter().zip(&basis) {
            delta += b * *coef;
        }
        let dnorm = delta.norm();
        if dnorm > NEWTON_TRUST_RADIUS {
            delta *= NEWTON_TRUST_RADIUS / dnorm;
        }

        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..12 {
            let candidate = ex.project(&(&x + &delta * scale));
            if ex.tangent_gradient(&candidate).norm() < gnorm {
                x = candidate;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    let grad_norm = ex.tangent_gradient(&x).norm();
    (grad_norm < NEWTON_ACCEPT).then_some(x)
}

/// Errors with `ConstantFunction` when sampling finds no variation in the
/// function and no gradient anywhere: critical-point detection would
/// degenerate to "everything is critical".
fn reject_constant_function(ex: &ExampleManifold, rng_seed: u64) -> Result<(), FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.wrapping_add(1));
    let mut spread: f64 = 0.0;
    let mut max_grad: f64 = 0.0;
    let mut f0 = None;
    for _ in 0..CONSTANT_PROBE_SAMPLES {
        let p = random_point(ex, &mut rng);
        let f = ex.f_value(&p);
        let base = *f0.get_or_insert(f);
        spread = spread.max((f - base).abs());
        max_grad = max_grad.max(ex.tangent_gradient(&p).norm());
    }
    if spread < CONSTANT_F_TOL && max_grad < CONSTANT_F_TOL {
        return Err(FlowError::ConstantFunction);
    }
    Ok(())
}

struct Cluster {
    representative: DVector<f64>,
    gradient_norm: f64,
}

/// Detects the critical orbits of an example with default integrator step
/// and RNG seed. See [`find_critical_orbits_with`].
pub fn find_critical_orbits(
    ex: &ExampleManifold,
    seeds: usize,
    tol: f64,
) -> Result<Vec<CriticalDetection>, FlowError> {
    find_critical_orbits_with(ex, seeds, tol, DEFAULT_STEP, DEFAULT_RNG_SEED)
}

/// Detects the critical orbits of an example from `seeds` random starting
/// points, matching detections against the analytic orbits within `tol`
/// (which also sets the clustering radius).
///
/// # Errors
///
/// `ConstantFunction` when the function has no critical-point structure to
/// detect; flow errors propagate from the integrator.
pub fn find_critical_orbits_with(
    ex: &ExampleManifold,
    seeds: usize,
    tol: f64,
    step: f64,
    rng_seed: u64,
) -> Result<Vec<CriticalDetection>, FlowError> {
    assert!(tol > 0.0, "matching tolerance must be positive");
    reject_constant_function(ex, rng_seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let cluster_radius = 10.0 * tol;
    let mut clusters: Vec<Cluster> = Vec::new();

    let submit = |clusters: &mut Vec<Cluster>, point: DVector<f64>| {
        let gradient_norm = ex.tangent_gradient(&point).norm();
        if gradient_norm >= GRAD_STOP {
            return;
        }
        for cluster in clusters.iter_mut() {
            if ex.group_distance(&cluster.representative, &point) < cluster_radius {
                if gradient_norm < cluster.gradient_norm {
                    cluster.representative = point;
                    cluster.gradient_norm = gradient_norm;
                }
                return;
            }
        }
        clusters.push(Cluster { representative: point, gradient_norm });
    };

    let submit_terminal = |clusters: &mut Vec<Cluster>, traj: &Trajectory| {
        let terminal = traj.final_point();
        match newton_refine(ex, terminal) {
            Some(polished) => submit(clusters, polished),
            None => submit(clusters, terminal.clone()),
        }
    };

    for _ in 0..seeds {
        let seed_point = random_point(ex, &mut rng);
        let down = integrate_directed(ex, &seed_point, step, DEFAULT_MAX_TIME, FlowDirection::Descend)?;
        submit_terminal(&mut clusters, &down);
        let up = integrate_directed(ex, &seed_point, step, DEFAULT_MAX_TIME, FlowDirection::Ascend)?;
        submit_terminal(&mut clusters, &up);
        if let Some(refined) = newton_refine(ex, &seed_point) {
            submit(&mut clusters, refined);
        }
    }

    let mut detections = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let index = hessian_index(ex, &cluster.representative)?;
        let (nearest, distance) = ex.nearest_orbit(&cluster.representative);
        let matched_label = (distance < tol).then(|| nearest.label.clone());
        detections.push(CriticalDetection {
            f_value: ex.f_value(&cluster.representative),
            gradient_norm: cluster.gradient_norm,
            representative_point: cluster.representative,
            index,
            matched_label,
        });
    }
    detections.sort_by(|a, b| {
        a.f_value.total_cmp(&b.f_value).then_with(|| a.matched_label.cmp(&b.matched_label))
    });
    Ok(detections)
}

/// Scans downward connections from `upper` with default integrator step and
/// RNG seed. See [`connection_scan_with`].
pub fn connection_scan(
    ex: &ExampleManifold,
    upper: &str,
    samples: usize,
) -> Result<ConnectionScan, FlowError> {
    connection_scan_with(ex, upper, samples, DEFAULT_STEP, DEFAULT_RNG_SEED)
}

/// Flows `samples` small random perturbations of the orbit `upper` along
/// its unstable Hessian directions downward, tallying which critical orbits
/// the flow lines terminate on.
///
/// # Errors
///
/// `UnknownOrbit` if `upper` names no analytic orbit of the example;
/// `IndexZeroOrbit` if the orbit has no unstable directions to perturb
/// along; flow and Hessian errors propagate.
pub fn connection_scan_with(
    ex: &ExampleManifold,
    upper: &str,
    samples: usize,
    step: f64,
    rng_seed: u64,
) -> Result<ConnectionScan, FlowError> {
    let orbit = ex
        .orbit(upper)
        .ok_or_else(|| FlowError::UnknownOrbit { label: upper.to_owned() })?;
    let base = &orbit.base_point;

    let basis = normal_in_tangent_basis(ex, base);
    let mut unstable: Vec<DVector<f64>> = Vec::new();
    if !basis.is_empty() {
        let h = hessian_in_basis(ex, base, &basis);
        let eigen = h.symmetric_eigen();
        for (k, &lambda) in eigen.eigenvalues.iter().enumerate() {
            if lambda < -HESSIAN_CUTOFF {
                let column = eigen.eigenvectors.column(k);
                let mut dir = DVector::zeros(ex.ambient_dim());
                for (coef, b) in column.iter().zip(&basis) {
                    dir += b * *coef;
                }
                unstable.push(dir);
            }
        }
    }
    if unstable.is_empty() {
        return Err(FlowError::IndexZeroOrbit { label: upper.to_owned() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut tallies = BTreeMap::new();
    let mut unresolved = 0usize;
    for _ in 0..samples {
        let mut dir = DVector::zeros(ex.ambient_dim());
        for u in &unstable {
            let coef: f64 = rng.sample(StandardNormal);
            dir += u * coef;
        }
        let dnorm = dir.norm();
        if dnorm < 1e-12 {
            unresolved += 1;
            continue;
        }
        let start = ex.project(&(base + dir * (PERTURB_RADIUS / dnorm)));
        let traj = integrate_directed(ex, &start, step, DEFAULT_MAX_TIME, FlowDirection::Descend)?;
        match traj.terminal_orbit {
            Some(label) => *tallies.entry(label).or_insert(0) += 1,
            None => unresolved += 1,
        }
    }
    Ok(ConnectionScan { tallies, unresolved })
}
