//! The built-in example manifolds: products of unit spheres with an
//! isometric torus action, an invariant polynomial function, and the
//! critical orbits known in closed form.
//!
//! Each manifold is a product of unit spheres embedded in ambient Euclidean
//! space as contiguous coordinate blocks. The torus action rotates disjoint
//! coordinate 2-planes with integer weights, one weight per generator, so it
//! acts by ambient rotations and the round product metric is invariant.
//! Distances between group orbits are computed by minimizing over the group:
//! the pairing `⟨p, A(θ)q⟩` is a trigonometric polynomial in `θ`, maximized
//! by a coarse grid scan plus damped Newton refinement.

use nalgebra::{DMatrix, DVector};

use super::jet::{Cx, Jet, Jet2, PolyScalar, MAX_AMBIENT};
use super::{FlowError, ON_MANIFOLD_TOL};

/// Grid resolution for the rank-1 group-distance scan.
const GROUP_GRID_1D: usize = 1024;
/// Per-axis grid resolution for the rank-2 group-distance scan.
const GROUP_GRID_2D: usize = 128;
/// Newton refinement stops once the pairing gradient is this small.
const GROUP_REFINE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExampleName {
    Torus2,
    S2xS1,
    S2xT2,
    S3,
}

impl ExampleName {
    fn as_str(self) -> &'static str {
        match self {
            ExampleName::Torus2 => "torus2",
            ExampleName::S2xS1 => "s2xs1",
            ExampleName::S2xT2 => "s2xt2",
            ExampleName::S3 => "s3",
        }
    }
}

/// Contiguous ambient coordinate range `[start, end)` forming one
/// unit-sphere factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereBlock {
    pub start: usize,
    pub end: usize,
}

impl SphereBlock {
    fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }

    fn len(&self) -> usize {
        self.end - self.start
    }
}

/// One coordinate 2-plane `(i, j)` rotated by the torus action, with one
/// integer weight per generator: generator `g` rotates the plane by
/// `weights[g]·θ_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneAction {
    pub i: usize,
    pub j: usize,
    pub weights: Vec<i32>,
}

/// A critical orbit known in closed form. The orbit as a set is exactly the
/// group orbit of `base_point`, so orbit distances reduce to group
/// distances from the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticOrbit {
    pub label: String,
    pub index: usize,
    pub f_value: f64,
    pub base_point: DVector<f64>,
}

/// A built-in example: sphere-product constraints, torus action, invariant
/// function, and analytic critical orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleManifold {
    name: ExampleName,
    blocks: Vec<SphereBlock>,
    planes: Vec<PlaneAction>,
    torus_rank: usize,
    analytic_orbits: Vec<AnalyticOrbit>,
}

fn orbit(label: &str, index: usize, f_value: f64, base: &[f64]) -> AnalyticOrbit {
    AnalyticOrbit {
        label: label.to_owned(),
        index,
        f_value,
        base_point: DVector::from_row_slice(base),
    }
}

/// Flat 2-torus `S¹×S¹ ⊂ ℝ⁴` with the zero function: the whole manifold is
/// one critical orbit.
fn torus2() -> ExampleManifold {
    ExampleManifold {
        name: ExampleName::Torus2,
        blocks: vec![SphereBlock { start: 0, end: 2 }, SphereBlock { start: 2, end: 4 }],
        planes: vec![
            PlaneAction { i: 0, j: 1, weights: vec![1, 0] },
            PlaneAction { i: 2, j: 3, weights: vec![0, 1] },
        ],
        torus_rank: 2,
        analytic_orbits: vec![orbit("T", 0, 0.0, &[1.0, 0.0, 1.0, 0.0])],
    }
}

/// `S²×S¹ ⊂ ℝ⁵`, `f = Re(u²·q̄)` with `u` the sphere's equatorial plane and
/// `q` the circle factor. Critical orbits: aligned and anti-aligned equator
/// circles (indices 0 and 2) and the two pole circles (index 1, whose
/// unstable lines are flipped by the deck generator).
fn s2xs1() -> ExampleManifold {
    ExampleManifold {
        name: ExampleName::S2xS1,
        blocks: vec![SphereBlock { start: 0, end: 3 }, SphereBlock { start: 3, end: 5 }],
        planes: vec![
            PlaneAction { i: 0, j: 1, weights: vec![1] },
            PlaneAction { i: 3, j: 4, weights: vec![2] },
        ],
        torus_rank: 1,
        analytic_orbits: vec![
            orbit("S_0", 0, -1.0, &[1.0, 0.0, 0.0, -1.0, 0.0]),
            orbit("S_1_1", 1, 0.0, &[0.0, 0.0, 1.0, 1.0, 0.0]),
            orbit("S_1_2", 1, 0.0, &[0.0, 0.0, -1.0, 1.0, 0.0]),
            orbit("S_2", 2, 1.0, &[1.0, 0.0, 0.0, 1.0, 0.0]),
        ],
    }
}

/// `S²×T² ⊂ ℝ⁷`, `f = Re(u²·q̄₁·q̄₂⁴)`. Same orbit pattern as the `S²×S¹`
/// example, but every orbit is a 2-torus and the pole orbits have one
/// orientation-reversing and one orientation-preserving deck generator.
fn s2xt2() -> ExampleManifold {
    ExampleManifold {
        name: ExampleName::S2xT2,
        blocks: vec![
            SphereBlock { start: 0, end: 3 },
            SphereBlock { start: 3, end: 5 },
            SphereBlock { start: 5, end: 7 },
        ],
        planes: vec![
            PlaneAction { i: 0, j: 1, weights: vec![1, 2] },
            PlaneAction { i: 3, j: 4, weights: vec![2, 0] },
            PlaneAction { i: 5, j: 6, weights: vec![0, 1] },
        ],
        torus_rank: 2,
        analytic_orbits: vec![
            orbit("S_0", 0, -1.0, &[1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
            orbit("S_1_1", 1, 0.0, &[0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0]),
            orbit("S_1_2", 1, 0.0, &[0.0, 0.0, -1.0, 1.0, 0.0, 1.0, 0.0]),
            orbit("S_2", 2, 1.0, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
        ],
    }
}

/// Round `S³ ⊂ ℝ⁴` with the weighted circle action `(u, v) ↦ (e^{2iθ}u,
/// e^{iθ}v)` and `f = Re(v²·ū)`. Critical orbits: the circle `{v = 0}`
/// (index 1, nonorientable unstable line) and two Hopf-like circles at the
/// extremal values `∓2√3/9`.
fn s3() -> ExampleManifold {
    let r_in = 3.0_f64.sqrt() / 3.0;
    let r_out = 6.0_f64.sqrt() / 3.0;
    let f_top = 2.0 * 3.0_f64.sqrt() / 9.0;
    ExampleManifold {
        name: ExampleName::S3,
        blocks: vec![SphereBlock { start: 0, end: 4 }],
        planes: vec![
            PlaneAction { i: 0, j: 1, weights: vec![2] },
            PlaneAction { i: 2, j: 3, weights: vec![1] },
        ],
        torus_rank: 1,
        analytic_orbits: vec![
            orbit("S_0", 0, -f_top, &[-r_in, 0.0, r_out, 0.0]),
            orbit("S_1", 1, 0.0, &[1.0, 0.0, 0.0, 0.0]),
            orbit("S_2", 2, f_top, &[r_in, 0.0, r_out, 0.0]),
        ],
    }
}

fn f_torus2<T: PolyScalar>(_x: &[T]) -> T {
    T::zero()
}

fn f_s2xs1<T: PolyScalar>(x: &[T]) -> T {
    let u = Cx::new(x[0], x[1]);
    let q = Cx::new(x[3], x[4]);
    (u * u * q.conj()).re
}

fn f_s2xt2<T: PolyScalar>(x: &[T]) -> T {
    let u = Cx::new(x[0], x[1]);
    let q1 = Cx::new(x[3], x[4]);
    let q2 = Cx::new(x[5], x[6]);
    let q2_sq = q2 * q2;
    let q2_4 = q2_sq * q2_sq;
    (u * u * q1.conj() * q2_4.conj()).re
}

fn f_s3<T: PolyScalar>(x: &[T]) -> T {
    let u = Cx::new(x[0], x[1]);
    let v = Cx::new(x[2], x[3]);
    (v * v * u.conj()).re
}

impl ExampleManifold {
    /// Looks up a built-in example by name.
    pub fn by_name(name: &str) -> Option<ExampleManifold> {
        match name {
            "torus2" => Some(torus2()),
            "s2xs1" => Some(s2xs1()),
            "s2xt2" => Some(s2xt2()),
            "s3" => Some(s3()),
            _ => None,
        }
    }

    /// All built-in examples, in registry order.
    pub fn all() -> Vec<ExampleManifold> {
        vec![torus2(), s2xs1(), s2xt2(), s3()]
    }

    pub fn name(&self) -> &'static str {
        self.name.as_str()
    }

    pub fn ambient_dim(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.end)
    }

    /// Intrinsic dimension: each sphere factor drops one ambient dimension.
    pub fn manifold_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len() - 1).sum()
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn blocks(&self) -> &[SphereBlock] {
        &self.blocks
    }

    pub fn planes(&self) -> &[PlaneAction] {
        &self.planes
    }

    pub fn analytic_orbits(&self) -> &[AnalyticOrbit] {
        &self.analytic_orbits
    }

    pub fn orbit(&self, label: &str) -> Option<&AnalyticOrbit> {
        self.analytic_orbits.iter().find(|o| o.label == label)
    }

    /// Evaluates the invariant function over any [`PolyScalar`], so the same
    /// definition yields values, gradients, and Hessians.
    pub fn eval_f<T: PolyScalar>(&self, x: &[T]) -> T {
        match self.name {
            ExampleName::Torus2 => f_torus2(x),
            ExampleName::S2xS1 => f_s2xs1(x),
            ExampleName::S2xT2 => f_s2xt2(x),
            ExampleName::S3 => f_s3(x),
        }
    }

    /// Plain value of the function.
    pub fn f_value(&self, x: &DVector<f64>) -> f64 {
        self.eval_f(x.as_slice())
    }

    /// Ambient Euclidean gradient via first-order jets.
    pub fn ambient_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let dim = self.ambient_dim();
        let mut vars = [Jet::constant(0.0); MAX_AMBIENT];
        for (i, var) in vars.iter_mut().enumerate().take(dim) {
            *var = Jet::variable(i, x[i]);
        }
        let jet = self.eval_f(&vars[..dim]);
        DVector::from_iterator(dim, jet.grad[..dim].iter().copied())
    }

    /// Ambient Euclidean Hessian via second-order jets.
    pub fn ambient_hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.ambient_dim();
        let mut vars = [Jet2::constant(0.0); MAX_AMBIENT];
        for (i, var) in vars.iter_mut().enumerate().take(dim) {
            *var = Jet2::variable(i, x[i]);
        }
        let jet = self.eval_f(&vars[..dim]);
        DMatrix::from_fn(dim, dim, |r, c| jet.hess[r][c])
    }

    /// Largest deviation of any sphere-factor norm from 1.
    pub fn constraint_residual(&self, x: &DVector<f64>) -> f64 {
        self.blocks
            .iter()
            .map(|b| (x.rows(b.start, b.len()).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Closest point on the constraint set: each sphere block is rescaled to
    /// unit norm. Panics if a block is numerically zero (no nearest point).
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = x.clone();
        for b in &self.blocks {
            let norm = x.rows(b.start, b.len()).norm();
            assert!(norm > 1e-8, "cannot project a vanishing sphere block");
            for c in b.range() {
                out[c] /= norm;
            }
        }
        out
    }

    /// Orthogonal projection of `v` onto the tangent space of the product of
    /// spheres at (the projection of) `x`: per block, the radial component
    /// is removed.
    pub fn tangent_project(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v.clone();
        for b in &self.blocks {
            let xb = x.rows(b.start, b.len());
            let norm = xb.norm();
            let radial: f64 = xb.dot(&v.rows(b.start, b.len())) / (norm * norm);
            for c in b.range() {
                out[c] -= radial * x[c];
            }
        }
        out
    }

    /// Tangential gradient without the on-manifold gate, for integrator
    /// internals that evaluate slightly off the constraint set.
    pub(crate) fn tangent_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.tangent_project(x, &self.ambient_gradient(x))
    }

    /// The Riemannian gradient of the invariant function at an on-manifold
    /// point: the ambient gradient projected onto the tangent space.
    ///
    /// # Errors
    ///
    /// `OffManifold` when some sphere-factor norm deviates from 1 by more
    /// than the on-manifold tolerance.
    pub fn riemannian_gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>, FlowError> {
        let residual = self.constraint_residual(x);
        if residual > ON_MANIFOLD_TOL {
            return Err(FlowError::OffManifold { residual });
        }
        Ok(self.tangent_gradient(x))
    }

    /// Velocity field of generator `g` at `x`: the infinitesimal plane
    /// rotations weighted by that generator. Tangent to every sphere factor
    /// by construction.
    pub fn generator_field(&self, g: usize, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        for plane in &self.planes {
            let w = f64::from(plane.weights[g]);
            if w != 0.0 {
                out[plane.i] -= w * x[plane.j];
                out[plane.j] += w * x[plane.i];
            }
        }
        out
    }

    /// The torus element `A(θ)` applied to `x`: each action plane `(i, j)`
    /// is rotated by `Σ_g weights[g]·θ_g`; untouched coordinates are fixed.
    pub fn apply_action(&self, theta: &[f64], x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(theta.len(), self.torus_rank, "one angle per torus generator");
        let mut out = x.clone();
        for plane in &self.planes {
            let angle: f64 =
                plane.weights.iter().zip(theta).map(|(&w, t)| f64::from(w) * t).sum();
            let (sin, cos) = angle.sin_cos();
            let (xi, xj) = (x[plane.i], x[plane.j]);
            out[plane.i] = cos * xi - sin * xj;
            out[plane.j] = sin * xi + cos * xj;
        }
        out
    }

    /// A point of an analytic orbit: the group element `A(θ)` applied to the
    /// orbit's base point. The orbits are single group orbits, so this
    /// parametrization is onto.
    pub fn orbit_point(&self, orbit: &AnalyticOrbit, theta: &[f64]) -> DVector<f64> {
        self.apply_action(theta, &orbit.base_point)
    }

    /// Distance between the group orbits of `p` and `q`:
    /// `min_θ ‖p − A(θ)q‖`. The pairing `⟨p, A(θ)q⟩` is a trigonometric
    /// polynomial; it is maximized by a coarse grid scan refined with damped
    /// Newton, and the distance is then evaluated directly at the optimum.
    pub fn group_distance(&self, p: &DVector<f64>, q: &DVector<f64>) -> f64 {
        let terms = self.pairing_terms(p, q);
        let rank = self.torus_rank;

        let mut best_theta = vec![0.0; rank];
        let mut best_s = f64::NEG_INFINITY;
        match rank {
            1 => {
                for k in 0..GROUP_GRID_1D {
                    let theta = [2.0 * std::f64::consts::PI * k as f64 / GROUP_GRID_1D as f64];
                    let s = pairing_value(&terms, &theta);
                    if s > best_s {
                        best_s = s;
                        best_theta[0] = theta[0];
                    }
                }
            }
            2 => {
                for k0 in 0..GROUP_GRID_2D {
                    let t0 = 2.0 * std::f64::consts::PI * k0 as f64 / GROUP_GRID_2D as f64;
                    for k1 in 0..GROUP_GRID_2D {
                        let t1 = 2.0 * std::f64::consts::PI * k1 as f64 / GROUP_GRID_2D as f64;
                        let s = pairing_value(&terms, &[t0, t1]);
                        if s > best_s {
                            best_s = s;
                            best_theta = vec![t0, t1];
                        }
                    }
                }
            }
            other => unreachable!("no built-in example has torus rank {other}"),
        }

        refine_pairing_max(&terms, &mut best_theta);
        (p - self.apply_action(&best_theta, q)).norm()
    }

    /// Distance from `p` to an analytic orbit (= group distance to its base
    /// point, since each analytic orbit is a single group orbit).
    pub fn orbit_distance(&self, p: &DVector<f64>, orbit: &AnalyticOrbit) -> f64 {
        self.group_distance(p, &orbit.base_point)
    }

    /// The analytic orbit nearest to `p`, with its distance.
    pub fn nearest_orbit(&self, p: &DVector<f64>) -> (&AnalyticOrbit, f64) {
        self.analytic_orbits
            .iter()
            .map(|orbit| (orbit, self.orbit_distance(p, orbit)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("every example has at least one analytic orbit")
    }

    /// Fourier data of `θ ↦ ⟨p, A(θ)q⟩`: one `(α, β, weights)` triple per
    /// action plane plus the constant from coordinates untouched by the
    /// action.
    fn pairing_terms(&self, p: &DVector<f64>, q: &DVector<f64>) -> PairingTerms {
        let mut covered = vec![false; self.ambient_dim()];
        let mut waves = Vec::with_capacity(self.planes.len());
        for plane in &self.planes {
            covered[plane.i] = true;
            covered[plane.j] = true;
            waves.push(Wave {
                alpha: p[plane.i] * q[plane.i] + p[plane.j] * q[plane.j],
                beta: p[plane.j] * q[plane.i] - p[plane.i] * q[plane.j],
                weights: plane.weights.clone(),
            });
        }
        let constant = (0..self.ambient_dim())
            .filter(|&c| !covered[c])
            .map(|c| p[c] * q[c])
            .sum();
        PairingTerms { waves, constant, rank: self.torus_rank }
    }
}

struct Wave {
    alpha: f64,
    beta: f64,
    weights: Vec<i32>,
}

struct PairingTerms {
    waves: Vec<Wave>,
    constant: f64,
    rank: usize,
}

fn pairing_value(terms: &PairingTerms, theta: &[f64]) -> f64 {
    let mut s = terms.constant;
    for wave in &terms.waves {
        let phase: f64 = wave.weights.iter().zip(theta).map(|(&w, t)| f64::from(w) * t).sum();
        s += wave.alpha * phase.cos() + wave.beta * phase.sin();
    }
    s
}

/// Gradient and Hessian of the pairing at `theta` (rank ≤ 2).
fn pairing_derivs(terms: &PairingTerms, theta: &[f64]) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut grad = [0.0; 2];
    let mut hess = [[0.0; 2]; 2];
    for wave in &terms.waves {
        let phase: f64 = wave.weights.iter().zip(theta).map(|(&w, t)| f64::from(w) * t).sum();
        let (sin, cos) = phase.sin_cos();
        let d1 = -wave.alpha * sin + wave.beta * cos;
        let d2 = -wave.alpha * cos - wave.beta * sin;
        let weights = &wave.weights[..terms.rank];
        for ((grad_g, hess_row), &wg) in grad.iter_mut().zip(&mut hess).zip(weights) {
            let wg = f64::from(wg);
            *grad_g += d1 * wg;
            for (hess_gh, &wh) in hess_row.iter_mut().zip(weights) {
                *hess_gh += d2 * wg * f64::from(wh);
            }
        }
    }
    (grad, hess)
}

/// Damped Newton ascent of the pairing from a grid optimum. Falls back to a
/// plain gradient step when the Hessian is singular (a flat direction, which
/// occurs when one point has no component in some action plane).
fn refine_pairing_max(terms: &PairingTerms, theta: &mut [f64]) {
    for _ in 0..64 {
        let (grad, hess) = pairing_derivs(terms, theta);
        let grad_norm = grad[..terms.rank].iter().map(|g| g.abs()).fold(0.0, f64::max);
        if grad_norm < GROUP_REFINE_TOL {
            return;
        }
        let mut step = [0.0; 2];
        let solved = match terms.rank {
            1 => {
                if hess[0][0].abs() > 1e-14 {
                    step[0] = -grad[0] / hess[0][0];
                    true
                } else {
                    false
                }
            }
            _ => {
                let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
                if det.abs() > 1e-14 {
                    step[0] = -(hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det;
                    step[1] = -(hess[0][0] * grad[1] - hess[1][0] * grad[0]) / det;
                    true
                } else {
                    false
                }
            }
        };
        if !solved {
            // Flat or indefinite curvature: a short ascent step still makes
            // progress and the loop bound keeps this terminating.
            for g in 0..terms.rank {
                step[g] = 0.2 * grad[g];
            }
        }

        let before = pairing_value(terms, theta);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let candidate: Vec<f64> =
                theta.iter().enumerate().map(|(g, t)| t + scale * step[g]).collect();
            if pairing_value(terms, &candidate) >= before {
                theta.copy_from_slice(&candidate);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_examples() -> Vec<ExampleManifold> {
        ExampleManifold::all()
    }

    /// Deterministic off-orbit sample points for invariance checks.
    fn sample_points(ex: &ExampleManifold) -> Vec<DVector<f64>> {
        let dim = ex.ambient_dim();
        let mut points = Vec::new();
        for seed in 1..6 {
            let raw = DVector::from_fn(dim, |i, _| ((seed * 13 + i * 7) as f64 * 0.37).sin() + 0.1);
            points.push(ex.project(&raw));
        }
        points
    }

    #[test]
    fn registry_shapes_are_as_built() {
        let dims: Vec<(usize, usize, usize)> = all_examples()
            .iter()
            .map(|ex| (ex.ambient_dim(), ex.manifold_dim(), ex.torus_rank()))
            .collect();
        assert_eq!(dims, vec![(4, 2, 2), (5, 3, 1), (7, 4, 2), (4, 3, 1)]);
    }

    #[test]
    fn by_name_round_trips() {
        for ex in all_examples() {
            assert_eq!(ExampleManifold::by_name(ex.name()).unwrap().name(), ex.name());
        }
        assert!(ExampleManifold::by_name("klein").is_none());
    }

    #[test]
    fn base_points_satisfy_constraints() {
        for ex in all_examples() {
            for orbit in ex.analytic_orbits() {
                assert!(
                    ex.constraint_residual(&orbit.base_point) < 1e-15,
                    "{} {}",
                    ex.name(),
                    orbit.label
                );
            }
        }
    }

    #[test]
    fn orbit_parametrizations_stay_on_manifold() {
        for ex in all_examples() {
            let rank = ex.torus_rank();
            for orbit in ex.analytic_orbits() {
                for k in 0..12 {
                    let theta: Vec<f64> = (0..rank).map(|g| 0.43 * (k + g + 1) as f64).collect();
                    let point = ex.orbit_point(orbit, &theta);
                    assert!(ex.constraint_residual(&point) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn f_is_constant_on_each_analytic_orbit() {
        for ex in all_examples() {
            let rank = ex.torus_rank();
            for orbit in ex.analytic_orbits() {
                assert!((ex.f_value(&orbit.base_point) - orbit.f_value).abs() < 1e-14);
                for k in 0..8 {
                    let theta: Vec<f64> = (0..rank).map(|g| 0.77 * (k * 2 + g + 1) as f64).collect();
                    let point = ex.orbit_point(orbit, &theta);
                    assert!((ex.f_value(&point) - orbit.f_value).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn f_is_invariant_under_the_action() {
        for ex in all_examples() {
            let rank = ex.torus_rank();
            for point in sample_points(&ex) {
                let before = ex.f_value(&point);
                for k in 0..8 {
                    let theta: Vec<f64> = (0..rank).map(|g| 1.1 * (k + 1) as f64 + g as f64).collect();
                    let after = ex.f_value(&ex.apply_action(&theta, &point));
                    assert!((before - after).abs() < 1e-12, "{}", ex.name());
                }
            }
        }
    }

    #[test]
    fn gradient_vanishes_on_critical_orbits() {
        for ex in all_examples() {
            for orbit in ex.analytic_orbits() {
                let theta: Vec<f64> = (0..ex.torus_rank()).map(|g| 0.9 + g as f64).collect();
                let point = ex.orbit_point(orbit, &theta);
                let grad = ex.riemannian_gradient(&point).unwrap();
                assert!(grad.norm() < 1e-12, "{} {}: {}", ex.name(), orbit.label, grad.norm());
            }
        }
    }

    #[test]
    fn gradient_regression_at_generic_point() {
        // Hand-computed value: ambient ∇f = (0, 1/2, 1, 0) at this point,
        // radial component 3/4, projected norm √11/4.
        let ex = ExampleManifold::by_name("s3").unwrap();
        let x = DVector::from_row_slice(&[0.5, 0.5, 0.5, 0.5]);
        let grad = ex.riemannian_gradient(&x).unwrap();
        assert!((grad.norm() - 11.0_f64.sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_is_tangent() {
        for ex in all_examples() {
            for point in sample_points(&ex) {
                let grad = ex.riemannian_gradient(&point).unwrap();
                for b in ex.blocks() {
                    let radial =
                        grad.rows(b.start, b.end - b.start).dot(&point.rows(b.start, b.end - b.start));
                    assert!(radial.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_function_has_zero_gradient_everywhere() {
        let ex = ExampleManifold::by_name("torus2").unwrap();
        for point in sample_points(&ex) {
            assert_eq!(ex.riemannian_gradient(&point).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn off_manifold_points_are_rejected() {
        let ex = ExampleManifold::by_name("s3").unwrap();
        let x = DVector::from_row_slice(&[2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            ex.riemannian_gradient(&x),
            Err(FlowError::OffManifold { residual }) if residual > 0.9
        ));
    }

    #[test]
    fn generator_fields_are_tangent_and_preserve_f() {
        // d/dθ f(A(θ)x) = ⟨∇f, V_g⟩ must vanish by invariance.
        for ex in all_examples() {
            for point in sample_points(&ex) {
                let grad = ex.ambient_gradient(&point);
                for g in 0..ex.torus_rank() {
                    let field = ex.generator_field(g, &point);
                    assert!(grad.dot(&field).abs() < 1e-12);
                    for b in ex.blocks() {
                        let radial = field
                            .rows(b.start, b.end - b.start)
                            .dot(&point.rows(b.start, b.end - b.start));
                        assert!(radial.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn group_distance_vanishes_within_one_orbit() {
        for ex in all_examples() {
            for point in sample_points(&ex) {
                assert!(ex.group_distance(&point, &point) < 1e-9);
                let theta: Vec<f64> = (0..ex.torus_rank()).map(|g| 2.3 + 0.7 * g as f64).collect();
                let moved = ex.apply_action(&theta, &point);
                assert!(ex.group_distance(&point, &moved) < 1e-9, "{}", ex.name());
            }
        }
    }

    #[test]
    fn group_distance_is_symmetric() {
        for ex in all_examples() {
            let points = sample_points(&ex);
            let d_pq = ex.group_distance(&points[0], &points[1]);
            let d_qp = ex.group_distance(&points[1], &points[0]);
            assert!((d_pq - d_qp).abs() < 1e-9);
        }
    }

    #[test]
    fn group_distance_matches_hand_computed_value() {
        // Between the two extremal circle orbits the pairing is
        // −(1/3)cos 2θ + (2/3)cos θ, maximized at cos θ = 1/2 with value
        // 1/2, giving distance √(2 − 1) = 1.
        let ex = ExampleManifold::by_name("s3").unwrap();
        let bottom = &ex.orbit("S_0").unwrap().base_point;
        let top = &ex.orbit("S_2").unwrap().base_point;
        assert!((ex.group_distance(bottom, top) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quarter_turn_lands_on_the_same_orbit() {
        let ex = ExampleManifold::by_name("s3").unwrap();
        let p = DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0]);
        let q = DVector::from_row_slice(&[0.0, 1.0, 0.0, 0.0]);
        assert!(ex.group_distance(&p, &q) < 1e-9);
    }

    #[test]
    fn nearest_orbit_classifies_points_near_each_orbit() {
        for ex in all_examples() {
            for orbit in ex.analytic_orbits() {
                let theta: Vec<f64> = (0..ex.torus_rank()).map(|g| 1.3 + g as f64).collect();
                let point = ex.orbit_point(orbit, &theta);
                let (found, dist) = ex.nearest_orbit(&point);
                assert_eq!(found.label, orbit.label, "{}", ex.name());
                assert!(dist < 1e-9);
            }
        }
    }

    #[test]
    fn distinct_orbits_are_far_apart() {
        for ex in all_examples() {
            let orbits = ex.analytic_orbits();
            for a in 0..orbits.len() {
                for b in (a + 1)..orbits.len() {
                    let d = ex.group_distance(&orbits[a].base_point, &orbits[b].base_point);
                    assert!(d > 0.5, "{}: {} vs {} at {}", ex.name(), orbits[a].label, orbits[b].label, d);
                }
            }
        }
    }
}
