//! Forward-mode dual numbers for exact-to-rounding derivatives of the
//! built-in polynomial functions.
//!
//! Every example function is a polynomial in the ambient coordinates, so it
//! can be written once over an abstract scalar and evaluated three ways:
//! as plain `f64` for values, as [`Jet`] for gradients, and as [`Jet2`] for
//! Hessians. This removes finite-difference noise entirely — the only error
//! in a derivative is floating-point rounding of the polynomial itself.
//!
//! Jets carry fixed-size arrays sized for the largest ambient space among
//! the built-in examples; unused trailing slots stay zero. This keeps the
//! hot integrator path allocation-free.

use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};

/// Largest ambient dimension across the built-in examples.
pub const MAX_AMBIENT: usize = 7;

/// Scalar bound for evaluating the built-in polynomial functions: ring
/// operations only (addition/multiplication arrive via the `Zero`/`One`
/// supertraits). Satisfied by `f64`, [`Jet`], and [`Jet2`].
pub trait PolyScalar: Copy + Zero + One + Neg<Output = Self> + Sub<Output = Self> {}

impl<T> PolyScalar for T where T: Copy + Zero + One + Neg<Output = T> + Sub<Output = T> {}

/// First-order dual number: value plus gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub val: f64,
    pub grad: [f64; MAX_AMBIENT],
}

impl Jet {
    pub fn constant(val: f64) -> Self {
        Self { val, grad: [0.0; MAX_AMBIENT] }
    }

    /// The coordinate variable `x_i` seeded with value `val`.
    pub fn variable(i: usize, val: f64) -> Self {
        let mut grad = [0.0; MAX_AMBIENT];
        grad[i] = 1.0;
        Self { val, grad }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g += r;
        }
        Jet { val: self.val + rhs.val, grad }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.val = -self.val;
        for g in &mut self.grad {
            *g = -*g;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut grad = [0.0; MAX_AMBIENT];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.grad[i] * rhs.val + self.val * rhs.grad[i];
        }
        Jet { val: self.val * rhs.val, grad }
    }
}

impl Zero for Jet {
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.val == 0.0 && self.grad.iter().all(|g| *g == 0.0)
    }
}

impl One for Jet {
    fn one() -> Self {
        Jet::constant(1.0)
    }
}

/// Second-order dual number: value, gradient, and (symmetric) Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub grad: [f64; MAX_AMBIENT],
    pub hess: [[f64; MAX_AMBIENT]; MAX_AMBIENT],
}

impl Jet2 {
    pub fn constant(val: f64) -> Self {
        Self { val, grad: [0.0; MAX_AMBIENT], hess: [[0.0; MAX_AMBIENT]; MAX_AMBIENT] }
    }

    /// The coordinate variable `x_i` seeded with value `val`.
    pub fn variable(i: usize, val: f64) -> Self {
        let mut out = Self::constant(val);
        out.grad[i] = 1.0;
        out
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.val += rhs.val;
        for (g, r) in self.grad.iter_mut().zip(rhs.grad) {
            *g += r;
        }
        for (row, rrow) in self.hess.iter_mut().zip(rhs.hess) {
            for (h, r) in row.iter_mut().zip(rrow) {
                *h += r;
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        self.val = -self.val;
        for g in &mut self.grad {
            *g = -*g;
        }
        for row in &mut self.hess {
            for h in row {
                *h = -*h;
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.val * rhs.val);
        for i in 0..MAX_AMBIENT {
            out.grad[i] = self.grad[i] * rhs.val + self.val * rhs.grad[i];
        }
        // Leibniz at second order:
        // (fg)_ij = f_ij·g + f_i·g_j + f_j·g_i + f·g_ij.
        for i in 0..MAX_AMBIENT {
            for j in 0..MAX_AMBIENT {
                out.hess[i][j] = self.hess[i][j] * rhs.val
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i]
                    + self.val * rhs.hess[i][j];
            }
        }
        out
    }
}

impl Zero for Jet2 {
    fn zero() -> Self {
        Jet2::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.val == 0.0
            && self.grad.iter().all(|g| *g == 0.0)
            && self.hess.iter().all(|row| row.iter().all(|h| *h == 0.0))
    }
}

impl One for Jet2 {
    fn one() -> Self {
        Jet2::constant(1.0)
    }
}

/// Complex value over any [`PolyScalar`], for writing the example functions
/// in their natural `Re(monomial)` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: PolyScalar> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }
}

impl<T: PolyScalar> Mul for Cx<T> {
    type Output = Cx<T>;
    fn mul(self, rhs: Cx<T>) -> Cx<T> {
        Cx {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}
