//! The invariant chain complex: graded bases, sign-decorated boundary
//! assembly, the ∂∘∂ = 0 check, cohomology, Witten dimensions, and the
//! Morse-Bott inequalities.
//!
//! The degree-`k` chain group is spanned, over the orientable orbits, by
//! invariant forms: an orbit of index `i` and torus dimension `n`
//! contributes one generator per multi-index `{j_1 < … < j_δ} ⊆ {1..n}`
//! with `δ = k − i`. Invariant forms on a torus orbit have constant
//! coefficients in the angular chart, hence are closed: the degree-zero part
//! of the boundary is identically zero and is hard-coded as such — no user
//! data for it is accepted.
//!
//! For index drop `α ≥ 1` the caller supplies one raw fiber-integration
//! block per (upper, lower) orbit pair. The assembler enforces the grading
//! mask (a raw entry from source degree `δ` to target degree `δ′` is legal
//! only when `δ′ = δ − α + 1`), multiplies each legal entry by `(−1)^δ`, and
//! scatters it into the graded boundary matrices. ∂∘∂ = 0 is verified, not
//! assumed: the construction guarantees it for genuine geometric data, but
//! blocks arrive from users.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use num::Zero;
use thiserror::Error;

use crate::orbitdata::{classify_orientability, mu_table, ManifoldSpec};
use crate::QMatrix;

/// One generator of a chain group: the invariant form
/// `dθ_{j_1} ∧ … ∧ dθ_{j_δ}` on a named orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormBasisElement {
    pub orbit_label: String,
    /// Strictly increasing entries in `1..=torus_dim` of the orbit.
    pub multi_index: Vec<usize>,
}

impl FormBasisElement {
    pub fn new(orbit_label: impl Into<String>, multi_index: Vec<usize>) -> Self {
        debug_assert!(
            multi_index.windows(2).all(|w| w[0] < w[1]),
            "multi-index must be strictly increasing"
        );
        Self { orbit_label: orbit_label.into(), multi_index }
    }

    /// Form degree `δ`, the size of the multi-index.
    pub fn degree(&self) -> usize {
        self.multi_index.len()
    }
}

impl fmt::Display for FormBasisElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}{{", self.orbit_label)?;
        for (pos, j) in self.multi_index.iter().enumerate() {
            if pos > 0 {
                write!(out, ",")?;
            }
            write!(out, "{j}")?;
        }
        write!(out, "}}")
    }
}

/// Raw (undecorated) fiber-integration data for one (upper, lower) orbit
/// pair: rows run over the full `2^{n_upper}` basis of the upper orbit,
/// columns over the full `2^{n_lower}` basis of the lower orbit, both in
/// canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryBlock {
    pub upper_label: String,
    pub lower_label: String,
    pub raw_matrix: QMatrix,
}

/// The assembled graded complex. Constructed only by [`assemble_boundary`],
/// which guarantees the shape invariants; ∂∘∂ = 0 is *not* guaranteed and
/// must be checked with [`verify_d_squared`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssembledComplex {
    /// `bases[k]` spans the degree-`k` chain group, `k = 0..=m`.
    bases: Vec<Vec<FormBasisElement>>,
    /// `boundaries[k]` is ∂^k, a `|bases[k+1]| × |bases[k]|` matrix,
    /// `k = 0..m`.
    boundaries: Vec<QMatrix>,
}

impl AssembledComplex {
    pub fn manifold_dim(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn bases(&self) -> &[Vec<FormBasisElement>] {
        &self.bases
    }

    pub fn basis(&self, k: usize) -> &[FormBasisElement] {
        &self.bases[k]
    }

    pub fn boundaries(&self) -> &[QMatrix] {
        &self.boundaries
    }

    /// ∂^k for `k = 0..m`; shapes follow the basis dimensions.
    pub fn boundary(&self, k: usize) -> &QMatrix {
        &self.boundaries[k]
    }

    pub fn chain_dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }
}

/// Betti numbers plus the bookkeeping a report consumer wants next to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub betti: Vec<usize>,
    pub chain_dims: Vec<usize>,
    pub euler_characteristic: i64,
    /// Present iff the spec carried a reference Betti vector.
    pub matches_reference: Option<bool>,
}

/// One Morse-Bott inequality `lhs_n ≥ rhs_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityRecord {
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

/// All inequalities `n = 0..=m`, plus the top-degree Euler equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityReport {
    pub per_n: Vec<InequalityRecord>,
    pub equality_at_top: bool,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.per_n.iter().all(|r| r.holds)
    }
}

/// Location of the first nonzero entry of a failing composite ∂^{k+1}∘∂^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DSquaredFailure {
    pub k: usize,
    pub row: usize,
    pub col: usize,
}

/// Outcome of the ∂∘∂ = 0 check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DSquaredReport {
    pub ok: bool,
    pub first_failure: Option<DSquaredFailure>,
}

/// Rejections raised while assembling user-supplied boundary blocks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("boundary block references unknown orbit `{label}`")]
    UnknownOrbit { label: String },
    #[error("boundary block touches nonorientable orbit `{label}`, which contributes no chain groups")]
    NonorientableEndpoint { label: String },
    #[error("more than one boundary block for orbit pair (`{upper}`, `{lower}`)")]
    DuplicateBlock { upper: String, lower: String },
    #[error("boundary block (`{upper}`, `{lower}`): upper index {upper_index} must exceed lower index {lower_index}")]
    IndexOrderViolation { upper: String, lower: String, upper_index: usize, lower_index: usize },
    #[error("boundary block (`{upper}`, `{lower}`): f must strictly decrease from upper to lower orbit")]
    FValueOrder { upper: String, lower: String },
    #[error("boundary block (`{upper}`, `{lower}`): raw matrix is {got_rows}x{got_cols}, expected {expected_rows}x{expected_cols}")]
    BlockShape {
        upper: String,
        lower: String,
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("boundary block (`{upper}`, `{lower}`): nonzero entry at (row {row}, col {col}) maps degree {col_degree} to degree {row_degree}, violating the grading mask target = source − {alpha} + 1")]
    GradingViolation {
        upper: String,
        lower: String,
        row: usize,
        col: usize,
        row_degree: usize,
        col_degree: usize,
        alpha: usize,
    },
}

/// Raised by [`cohomology`] when the assembled boundaries do not square to
/// zero.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ChainError {
    #[error("boundaries do not form a chain complex: (∂∘∂)[{}] has nonzero entry at (row {}, col {})", .0.k, .0.row, .0.col)]
    ComplexNotChain(DSquaredFailure),
}

/// Raised by [`morse_bott_inequalities`] on a Betti vector of wrong length.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum InequalityError {
    #[error("betti vector has length {got}, expected manifold_dim + 1 = {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// All subsets of `{1..=n}` in canonical order: ascending size, then
/// lexicographic within each size. This order fixes matrix layouts and the
/// file format, so it must never change.
pub fn canonical_multi_indices(n: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::with_capacity(1 << n);
    for size in 0..=n {
        // `combinations` of a sorted iterator emits in lexicographic order.
        all.extend((1..=n).combinations(size));
    }
    all
}

/// The ordered basis of the degree-`k` chain group: orbits in declaration
/// order, each orientable orbit of index `i` and torus dimension `n`
/// contributing its size-`(k−i)` multi-indices when `0 ≤ k−i ≤ n`.
/// Nonorientable orbits contribute nothing; `k` outside `0..=m` yields the
/// empty basis.
pub fn chain_basis(spec: &ManifoldSpec, k: isize) -> Vec<FormBasisElement> {
    if k < 0 || k > spec.manifold_dim as isize {
        return Vec::new();
    }
    let k = k as usize;
    let mut basis = Vec::new();
    for orbit in &spec.orbits {
        if !classify_orientability(orbit) {
            continue;
        }
        if k < orbit.index || k - orbit.index > orbit.torus_dim {
            continue;
        }
        let degree = k - orbit.index;
        basis.extend(
            (1..=orbit.torus_dim)
                .combinations(degree)
                .map(|mi| FormBasisElement::new(orbit.label.clone(), mi)),
        );
    }
    basis
}

/// Decorates raw blocks with the `(−1)^degree` sign, enforces the grading
/// mask, and scatters entries into one boundary matrix per degree. Degree-0
/// differentials are identically zero (constant-coefficient forms are
/// closed), so only blocks with index drop `α ≥ 1` exist.
///
/// # Errors
///
/// Rejects blocks naming unknown or nonorientable orbits, duplicate
/// (upper, lower) pairs, non-increasing index or f-value between endpoints,
/// wrong raw-matrix shape, and nonzero entries outside the grading mask.
pub fn assemble_boundary(
    spec: &ManifoldSpec,
    blocks: &[BoundaryBlock],
) -> Result<AssembledComplex, AssemblyError> {
    let m = spec.manifold_dim;
    let bases: Vec<Vec<FormBasisElement>> =
        (0..=m).map(|k| chain_basis(spec, k as isize)).collect();

    // Position of each basis element within its degree, for scatter writes.
    let positions: Vec<HashMap<&FormBasisElement, usize>> = bases
        .iter()
        .map(|basis| basis.iter().enumerate().map(|(pos, el)| (el, pos)).collect())
        .collect();

    let mut boundaries: Vec<QMatrix> =
        (0..m).map(|k| QMatrix::zero(bases[k + 1].len(), bases[k].len())).collect();

    let mut seen_pairs = BTreeSet::new();
    for block in blocks {
        let upper = spec
            .orbit(&block.upper_label)
            .ok_or_else(|| AssemblyError::UnknownOrbit { label: block.upper_label.clone() })?;
        let lower = spec
            .orbit(&block.lower_label)
            .ok_or_else(|| AssemblyError::UnknownOrbit { label: block.lower_label.clone() })?;
        for orbit in [upper, lower] {
            if !classify_orientability(orbit) {
                return Err(AssemblyError::NonorientableEndpoint { label: orbit.label.clone() });
            }
        }
        if !seen_pairs.insert((block.upper_label.clone(), block.lower_label.clone())) {
            return Err(AssemblyError::DuplicateBlock {
                upper: block.upper_label.clone(),
                lower: block.lower_label.clone(),
            });
        }
        if upper.index <= lower.index {
            return Err(AssemblyError::IndexOrderViolation {
                upper: upper.label.clone(),
                lower: lower.label.clone(),
                upper_index: upper.index,
                lower_index: lower.index,
            });
        }
        if upper.f_value <= lower.f_value {
            return Err(AssemblyError::FValueOrder {
                upper: upper.label.clone(),
                lower: lower.label.clone(),
            });
        }
        let alpha = upper.index - lower.index;

        let row_indices = canonical_multi_indices(upper.torus_dim);
        let col_indices = canonical_multi_indices(lower.torus_dim);
        if block.raw_matrix.rows() != row_indices.len()
            || block.raw_matrix.cols() != col_indices.len()
        {
            return Err(AssemblyError::BlockShape {
                upper: upper.label.clone(),
                lower: lower.label.clone(),
                expected_rows: row_indices.len(),
                expected_cols: col_indices.len(),
                got_rows: block.raw_matrix.rows(),
                got_cols: block.raw_matrix.cols(),
            });
        }

        for (row, col, raw) in block.raw_matrix.iter() {
            if raw.is_zero() {
                continue;
            }
            let row_degree = row_indices[row].len();
            let col_degree = col_indices[col].len();
            // Grading mask: target degree = source degree − α + 1.
            if col_degree + 1 != row_degree + alpha {
                return Err(AssemblyError::GradingViolation {
                    upper: upper.label.clone(),
                    lower: lower.label.clone(),
                    row,
                    col,
                    row_degree,
                    col_degree,
                    alpha,
                });
            }
            let k = lower.index + col_degree;
            let source = FormBasisElement::new(lower.label.clone(), col_indices[col].clone());
            let target = FormBasisElement::new(upper.label.clone(), row_indices[row].clone());
            let source_pos = *positions[k]
                .get(&source)
                .expect("source element exists for a validated spec");
            let target_pos = *positions[k + 1]
                .get(&target)
                .expect("target element exists for a validated spec");
            let signed = if col_degree.is_multiple_of(2) { raw.clone() } else { -raw.clone() };
            boundaries[k].set(target_pos, source_pos, signed);
        }
    }

    Ok(AssembledComplex { bases, boundaries })
}

/// Checks ∂^{k+1}∘∂^k = 0 for every `k`, reporting the smallest failing `k`
/// and the first nonzero composite entry in row-major order.
pub fn verify_d_squared(complex: &AssembledComplex) -> DSquaredReport {
    for k in 0..complex.boundaries.len().saturating_sub(1) {
        let composite = complex.boundaries[k + 1]
            .compose(&complex.boundaries[k])
            .expect("assembled boundary shapes are consecutive by construction");
        let failure =
            composite.iter().find(|(_, _, e)| !e.is_zero()).map(|(row, col, _)| (row, col));
        if let Some((row, col)) = failure {
            return DSquaredReport {
                ok: false,
                first_failure: Some(DSquaredFailure { k, row, col }),
            };
        }
    }
    DSquaredReport { ok: true, first_failure: None }
}

/// Computes Betti numbers `β_k = dim ker ∂^k − rank ∂^{k−1}` (with the
/// boundary maps off the ends taken as zero), the chain dimensions, and the
/// Euler characteristic. Verifies ∂∘∂ = 0 first and refuses non-chain data.
pub fn cohomology(
    complex: &AssembledComplex,
    spec: &ManifoldSpec,
) -> Result<CohomologyReport, ChainError> {
    let check = verify_d_squared(complex);
    if let Some(failure) = check.first_failure {
        return Err(ChainError::ComplexNotChain(failure));
    }

    let m = complex.manifold_dim();
    let chain_dims = complex.chain_dims();
    let mut betti = Vec::with_capacity(m + 1);
    for k in 0..=m {
        // ∂^m is the zero map out of the top group; ∂^{−1} the zero map in.
        let kernel = if k < m { complex.boundaries[k].kernel_dim() } else { chain_dims[m] };
        let image = if k > 0 { complex.boundaries[k - 1].rank() } else { 0 };
        debug_assert!(image <= kernel, "image must sit inside the kernel once ∂∘∂ = 0 holds");
        betti.push(kernel - image);
    }

    let euler_characteristic = chain_dims
        .iter()
        .enumerate()
        .map(|(k, &dim)| if k % 2 == 0 { dim as i64 } else { -(dim as i64) })
        .sum();
    let matches_reference = spec.reference_betti.as_ref().map(|reference| reference == &betti);

    Ok(CohomologyReport { betti, chain_dims, euler_characteristic, matches_reference })
}

/// `binom(n, t)` with the zero convention outside `0 ≤ t ≤ n`. The
/// convention is load-bearing: it makes the instanton dimension sum run over
/// all orbit types without explicit range bookkeeping.
fn binom(n: usize, t: isize) -> usize {
    if t < 0 || t as usize > n {
        0
    } else {
        num::integer::binomial(n as u64, t as u64) as usize
    }
}

/// Instanton-space dimensions: entry `k` is `Σ binom(j, k−i)·μ_{i,j}` over
/// the orientable-orbit counts `μ`. Structurally equal to the chain
/// dimensions `|chain_basis(k)|` for every validated spec.
pub fn witten_dims(spec: &ManifoldSpec) -> Vec<usize> {
    let m = spec.manifold_dim;
    let mut dims = vec![0usize; m + 1];
    for (&(i, j), &count) in &mu_table(spec).counts {
        for (k, dim) in dims.iter_mut().enumerate().take(m + 1).skip(i) {
            *dim += binom(j, k as isize - i as isize) * count;
        }
    }
    dims
}

/// Evaluates the alternating-sum inequalities
/// `Σ_{k≤n} (−1)^{n−k}·witten_dims[k] ≥ Σ_{k≤n} (−1)^{n−k}·betti[k]`
/// for every `n`, with equality required at `n = m` (the Euler identity).
pub fn morse_bott_inequalities(
    spec: &ManifoldSpec,
    betti: &[usize],
) -> Result<InequalityReport, InequalityError> {
    let m = spec.manifold_dim;
    if betti.len() != m + 1 {
        return Err(InequalityError::LengthMismatch { expected: m + 1, got: betti.len() });
    }
    let dims = witten_dims(spec);
    let alternating = |values: &[usize], n: usize| -> i64 {
        (0..=n)
            .map(|k| {
                let term = values[k] as i64;
                if (n - k).is_multiple_of(2) {
                    term
                } else {
                    -term
                }
            })
            .sum()
    };
    let per_n: Vec<InequalityRecord> = (0..=m)
        .map(|n| {
            let lhs = alternating(&dims, n);
            let rhs = alternating(betti, n);
            InequalityRecord { lhs, rhs, holds: lhs >= rhs }
        })
        .collect();
    let top = per_n[m];
    Ok(InequalityReport { per_n, equality_at_top: top.lhs == top.rhs })
}
