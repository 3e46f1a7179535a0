//! Second-order analysis at critical points: the Riemannian Hessian of the
//! invariant function restricted to directions normal to the critical
//! orbit, and the resulting index (number of negative eigenvalues).
//!
//! On a product of unit spheres the Riemannian Hessian of `f` at an
//! on-manifold point is the ambient Hessian corrected by the second
//! fundamental form of each factor:
//! `Hess(X, Y) = Xᵀ·∇²f·Y − Σ_b (X_b·Y_b)(x_b·∇f_b)`.
//! Orbit directions (the torus generator fields) lie in the Hessian kernel
//! by invariance, so they are removed before eigenanalysis; the index counts
//! the negative eigenvalues on the remaining normal-within-tangent space.

use nalgebra::{DMatrix, DVector};

use super::geometry::ExampleManifold;
use super::{FlowError, CRITICAL_GRAD_TOL, HESSIAN_CUTOFF};

/// Threshold below which a Gram-Schmidt residual is treated as linearly
/// dependent and dropped.
const GS_DROP: f64 = 1e-6;

/// Orthonormal basis of the tangent space at `x`: per sphere block, the
/// orthogonal complement of the radial direction.
pub(crate) fn tangent_basis(ex: &ExampleManifold, x: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = ex.ambient_dim();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(ex.manifold_dim());
    for block in ex.blocks() {
        let len = block.end - block.start;
        let mut radial = DVector::zeros(dim);
        let norm = x.rows(block.start, len).norm();
        for c in block.start..block.end {
            radial[c] = x[c] / norm;
        }
        let mut accepted = 0;
        for c in block.start..block.end {
            if accepted == len - 1 {
                break;
            }
            let mut v = DVector::zeros(dim);
            v[c] = 1.0;
            v -= &radial * radial[c];
            for prev in &basis {
                let coef = prev.dot(&v);
                v -= prev * coef;
            }
            let vnorm = v.norm();
            if vnorm > GS_DROP {
                basis.push(v / vnorm);
                accepted += 1;
            }
        }
        assert_eq!(accepted, len - 1, "a unit sphere block has codimension 1");
    }
    basis
}

/// Orthonormal basis of the subspace of the tangent space orthogonal to the
/// orbit directions (the span of the torus generator fields) at `x`.
pub(crate) fn normal_in_tangent_basis(
    ex: &ExampleManifold,
    x: &DVector<f64>,
) -> Vec<DVector<f64>> {
    let mut orbit_dirs: Vec<DVector<f64>> = Vec::with_capacity(ex.torus_rank());
    for g in 0..ex.torus_rank() {
        let mut v = ex.generator_field(g, x);
        for prev in &orbit_dirs {
            let coef = prev.dot(&v);
            v -= prev * coef;
        }
        let vnorm = v.norm();
        if vnorm > GS_DROP {
            orbit_dirs.push(v / vnorm);
        }
    }

    let mut normal: Vec<DVector<f64>> = Vec::new();
    for candidate in tangent_basis(ex, x) {
        let mut v = candidate;
        for prev in orbit_dirs.iter().chain(normal.iter()) {
            let coef = prev.dot(&v);
            v -= prev * coef;
        }
        let vnorm = v.norm();
        if vnorm > GS_DROP {
            normal.push(v / vnorm);
        }
    }
    normal
}

/// The Riemannian Hessian of the invariant function expressed in the given
/// orthonormal basis of tangent directions at `x`.
pub(crate) fn hessian_in_basis(
    ex: &ExampleManifold,
    x: &DVector<f64>,
    basis: &[DVector<f64>],
) -> DMatrix<f64> {
    let ambient = ex.ambient_hessian(x);
    let grad = ex.ambient_gradient(x);
    let n = basis.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut entry = basis[i].dot(&(&ambient * &basis[j]));
            for block in ex.blocks() {
                let len = block.end - block.start;
                let xb = x.rows(block.start, len);
                let curvature = xb.dot(&grad.rows(block.start, len)) / xb.norm_squared();
                entry -=
                    curvature * basis[i].rows(block.start, len).dot(&basis[j].rows(block.start, len));
            }
            h[(i, j)] = entry;
            h[(j, i)] = entry;
        }
    }
    h
}

/// The index of a critical point: the number of negative eigenvalues of the
/// Riemannian Hessian on the normal-within-tangent space (orbit directions
/// excluded).
///
/// # Errors
///
/// `OffManifold` if `x` violates the sphere constraints; `NotCritical` if
/// the Riemannian gradient is not negligible; `DegenerateHessian` if some
/// normal eigenvalue is too close to zero for a trustworthy sign.
pub fn hessian_index(ex: &ExampleManifold, x: &DVector<f64>) -> Result<usize, FlowError> {
    let grad = ex.riemannian_gradient(x)?;
    let gradient_norm = grad.norm();
    if gradient_norm > CRITICAL_GRAD_TOL {
        return Err(FlowError::NotCritical { gradient_norm });
    }

    let basis = normal_in_tangent_basis(ex, x);
    if basis.is_empty() {
        return Ok(0);
    }

    let h = hessian_in_basis(ex, x, &basis);
    let eigen = h.symmetric_eigen();
    let mut index = 0;
    for &lambda in eigen.eigenvalues.iter() {
        if lambda.abs() <= HESSIAN_CUTOFF {
            return Err(FlowError::DegenerateHessian { eigenvalue: lambda });
        }
        if lambda < 0.0 {
            index += 1;
        }
    }
    Ok(index)
}
