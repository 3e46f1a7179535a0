//! Exact chain-complex engine for torus-invariant Morse-Bott functions.
//!
//! Given an inventory of critical torus orbits (dimension, Morse index,
//! critical value, and the determinant characters of the deck-group action on
//! the unstable/stable splitting), this crate
//!
//! * builds the graded invariant chain groups `C^k = ⊕_{i+j=k} Ω^j_inv(S_i)`
//!   over the orbits with orientable unstable manifold ([`mbscomplex`]),
//! * decorates user-supplied fiber-integration blocks with the `(−1)^j` sign
//!   and assembles the boundary operator, then verifies `∂∘∂ = 0` instead of
//!   assuming it,
//! * computes Betti numbers by exact rational rank/kernel computations
//!   ([`exactlin`]) — no floating point touches any chain-level quantity,
//! * evaluates the invariant Morse-Bott inequalities and the instanton
//!   dimension counts `dim F^k = Σ binom(j, k−i)·μ_{i,j}`,
//! * and cross-validates orbit inventories with a floating-point
//!   negative-gradient-flow oracle on four built-in embedded manifolds
//!   ([`flowlab`]).
//!
//! The `mbs` binary exposes all of this behind a CLI operating on `.spec`
//! JSON documents; see the repository README for the document schema.

pub mod cli;
pub mod document;
pub mod exactlin;
pub mod flowlab;
pub mod mbscomplex;
pub mod orbitdata;
pub mod registry;
pub mod report;

/// Arbitrary-precision rational scalar; always stored in canonical form
/// (reduced, positive denominator) by construction.
pub type Rational = num::BigRational;

/// Dense matrix over [`Rational`] — the arithmetic of every boundary
/// operator and rank computation.
pub type QMatrix = exactlin::Matrix<Rational>;

/// Dense `f64` matrix, used only on the floating-point validation side
/// (user-supplied representation matrices, Hessian restrictions).
pub type FMatrix = exactlin::Matrix<f64>;
