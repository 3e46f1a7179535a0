//! Exact scalars and dense matrices over an arbitrary field.
//!
//! Betti numbers are integers; they must not depend on a floating-point
//! tolerance. Every chain-level computation therefore runs over
//! arbitrary-precision rationals, with rank and kernel dimensions obtained by
//! exact Gaussian elimination. Matrices are dense: every matrix in scope has
//! at most a few dozen rows (chain groups are `2^n` per orbit with small
//! `n`), so sparse machinery would be unjustified.
//!
//! Matrices with zero rows or zero columns are legal values: they represent
//! maps to or from the zero space, which occur whenever a chain group is
//! zero-dimensional.

use std::fmt;
use std::ops::{Div, Neg, Sub};

use num::traits::{One, Zero};
use num::BigInt;
use thiserror::Error;

use crate::Rational;

/// Scalar bound for field arithmetic: the operations Gaussian elimination
/// needs, satisfied by `Rational`, `f64`, `f32`, and any other field type
/// implementing the num-traits operator set.
pub trait FieldScalar:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Div<Output = Self>
{
}

impl<T> FieldScalar for T where
    T: Clone + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> + Div<Output = T>
{
}

/// Errors from matrix construction and composition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactlinError {
    /// Matrix product `a·b` requires `a.cols == b.rows`.
    #[error("dimension mismatch: cannot compose {left_rows}x{left_cols} with {right_rows}x{right_cols} (need left cols = right rows)")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    /// Entry vector length does not match `rows × cols`.
    #[error("entry count mismatch: {rows}x{cols} matrix needs {} entries, got {got}", rows * cols)]
    EntryCount { rows: usize, cols: usize, got: usize },
}

/// Dense row-major matrix over a field scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: FieldScalar> Matrix<T> {
    /// Builds a matrix from row-major entries; `entries.len()` must equal
    /// `rows × cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, ExactlinError> {
        if entries.len() != rows * cols {
            return Err(ExactlinError::EntryCount { rows, cols, got: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from nested rows (test/fixture convenience). All rows
    /// must have equal length; an empty outer vector is the 0×0 matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ExactlinError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(ExactlinError::EntryCount {
                    rows: nrows,
                    cols: ncols,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { rows: nrows, cols: ncols, entries })
    }

    /// The `rows × cols` zero matrix (legal with zero rows and/or columns).
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![T::zero(); rows * cols] }
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Immutable entry access; panics on out-of-range indices (callers index
    /// with loop bounds taken from `rows()`/`cols()`).
    pub fn get(&self, r: usize, c: usize) -> &T {
        assert!(r < self.rows && c < self.cols, "matrix index ({r},{c}) out of range");
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        assert!(r < self.rows && c < self.cols, "matrix index ({r},{c}) out of range");
        self.entries[r * self.cols + c] = value;
    }

    /// Row-major iteration over `(row, col, entry)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let cols = self.cols;
        self.entries.iter().enumerate().map(move |(i, e)| (i / cols, i % cols, e))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for (r, c, e) in self.iter() {
            out.set(c, r, e.clone());
        }
        out
    }

    /// True iff every entry equals zero (vacuously true for empty shapes).
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Exact matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self, ExactlinError> {
        if self.cols != rhs.rows {
            return Err(ExactlinError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rhs.rows,
                right_cols: rhs.cols,
            });
        }
        let mut out = Self::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let sum = out.get(r, c).clone() + a.clone() * b.clone();
                    out.set(r, c, sum);
                }
            }
        }
        Ok(out)
    }

    /// Rank over the scalar field, by exact Gaussian elimination (row-echelon
    /// forward pass on a working copy). Deterministic: pivots are chosen as
    /// the first nonzero entry at or below the pivot row.
    pub fn rank(&self) -> usize {
        let mut work = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |w: &Vec<T>, r: usize, c: usize| w[r * cols + c].clone();

        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row >= rows {
                break;
            }
            let Some(src) = (pivot_row..rows).find(|&r| !at(&work, r, col).is_zero()) else {
                continue;
            };
            if src != pivot_row {
                for c in 0..cols {
                    work.swap(src * cols + c, pivot_row * cols + c);
                }
            }
            let pivot = at(&work, pivot_row, col);
            for r in (pivot_row + 1)..rows {
                let lead = at(&work, r, col);
                if lead.is_zero() {
                    continue;
                }
                let factor = lead / pivot.clone();
                for c in col..cols {
                    let updated = at(&work, r, c) - factor.clone() * at(&work, pivot_row, c);
                    work[r * cols + c] = updated;
                }
            }
            pivot_row += 1;
            rank += 1;
        }
        rank
    }

    /// Dimension of the kernel, `cols − rank` (rank-nullity; asserted in
    /// debug builds on every call).
    pub fn kernel_dim(&self) -> usize {
        let rank = self.rank();
        debug_assert!(rank <= self.cols, "rank-nullity violated: rank {} > cols {}", rank, self.cols);
        self.cols - rank
    }

    /// Applies `f` to every entry (used e.g. to rescale a block).
    pub fn map<U: FieldScalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }
}

impl<T: FieldScalar + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(out, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(out, " ")?;
                }
                write!(out, "{}", self.get(r, c))?;
            }
        }
        write!(out, "]")
    }
}

/// Errors from parsing rational literals of the form `p` or `p/q`.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational literal `{0}` (expected `p` or `p/q` with integer p, q)")]
    Malformed(String),
}

/// Parses `p` or `p/q` into a canonical-form rational. Signs are accepted on
/// either part and normalized onto the numerator; a zero denominator is a
/// structured error, never a panic.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let parse_int = |part: &str| -> Result<BigInt, RationalParseError> {
        part.trim().parse::<BigInt>().map_err(|_| RationalParseError::Malformed(text.to_owned()))
    };
    let mut parts = trimmed.split('/');
    let numer = parse_int(parts.next().unwrap_or_default())?;
    let denom = match parts.next() {
        None => BigInt::one(),
        Some(d) => parse_int(d)?,
    };
    if parts.next().is_some() {
        return Err(RationalParseError::Malformed(text.to_owned()));
    }
    if denom.is_zero() {
        return Err(RationalParseError::ZeroDenominator(text.to_owned()));
    }
    Ok(Rational::new(numer, denom))
}

/// Formats a rational canonically: `p` when the denominator is 1, else `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
