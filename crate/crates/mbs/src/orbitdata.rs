//! Critical-orbit inventory: data model, orientability classification, and
//! whole-spec validation.
//!
//! A manifold is described by its critical orbits. Each orbit records its
//! torus dimension, Morse index (negative Hessian eigenvalues transverse to
//! the orbit), the constant value of the function on it, and — per deck-group
//! generator — the signs of the determinants of the induced action on the
//! unstable and stable normal subbundles. Orientability of the unstable
//! manifold is decided purely from those signs: the determinant character
//! `ℤ^n → {±1}` is trivial iff it is trivial on generators.
//!
//! Optional full matrices per generator are accepted as a consistency check
//! (orthogonality, declared sign) but never participate in exact arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::Rational;

/// Maximum entrywise deviation of `MᵀM` from the identity for a supplied
/// generator matrix to count as orthogonal. Generator actions live in an
/// orthogonal group exactly; 1e-9 absorbs double-rounding in user-computed
/// matrices while staying far below any determinant sign flip.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// A determinant sign, the value group of the orientation character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Interprets `+1`/`−1`; any other integer is rejected.
    pub fn from_i8(value: i8) -> Option<Self> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn product(self, other: Self) -> Self {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(out, "+1"),
            Sign::Minus => write!(out, "-1"),
        }
    }
}

/// How one deck-group generator acts on the normal bundle of an orbit,
/// reduced to the two determinant signs (unstable block, stable block).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorAction {
    /// Sign of the determinant of the action on the unstable subbundle.
    pub det_unstable_sign: Sign,
    /// Sign of the determinant of the action on the stable subbundle.
    pub det_stable_sign: Sign,
    /// Optional full unstable-block matrix, for validation only.
    pub unstable_matrix: Option<DMatrix<f64>>,
    /// Optional full stable-block matrix, for validation only.
    pub stable_matrix: Option<DMatrix<f64>>,
}

impl GeneratorAction {
    /// A generator acting with the given determinant signs and no matrices.
    pub fn from_signs(det_unstable_sign: Sign, det_stable_sign: Sign) -> Self {
        Self { det_unstable_sign, det_stable_sign, unstable_matrix: None, stable_matrix: None }
    }
}

/// One critical orbit: a torus of dimension `torus_dim`, Morse index
/// `index`, constant function value `f_value`, and one [`GeneratorAction`]
/// per deck-group generator.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalOrbit {
    pub label: String,
    pub torus_dim: usize,
    pub index: usize,
    pub f_value: Rational,
    pub generators: Vec<GeneratorAction>,
}

/// A manifold's full critical inventory, plus an optional expected Betti
/// vector used only for cross-checking reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    /// Ambient manifold dimension `m`.
    pub manifold_dim: usize,
    pub orbits: Vec<CriticalOrbit>,
    /// Expected `(β_0, …, β_m)`, length `m + 1` when present.
    pub reference_betti: Option<Vec<usize>>,
}

impl ManifoldSpec {
    /// Looks up an orbit by label.
    pub fn orbit(&self, label: &str) -> Option<&CriticalOrbit> {
        self.orbits.iter().find(|o| o.label == label)
    }
}

/// Which of a generator's two optional matrices a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Unstable,
    Stable,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixKind::Unstable => write!(out, "unstable"),
            MatrixKind::Stable => write!(out, "stable"),
        }
    }
}

/// A reason a manifold spec is rejected.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Violation {
    #[error("duplicate orbit label `{label}`")]
    DuplicateLabel { label: String },
    #[error("orbit `{label}`: index {index} + torus_dim {torus_dim} exceeds manifold dimension {manifold_dim}")]
    DimensionOverflow { label: String, index: usize, torus_dim: usize, manifold_dim: usize },
    #[error("orbit `{label}` generator {generator}: det signs multiply to -1 (action must land in the special orthogonal group)")]
    SignProductNegative { label: String, generator: usize },
    #[error("orbit `{label}`: torus_dim {torus_dim} requires {torus_dim} generator actions, got {got}")]
    GeneratorCountMismatch { label: String, torus_dim: usize, got: usize },
    #[error("reference_betti has length {got}, expected manifold_dim + 1 = {expected}")]
    BettiLengthMismatch { expected: usize, got: usize },
    #[error("manifold_dim must be positive")]
    NonpositiveDimension,
    #[error("orbit `{label}` generator {generator}: supplied {which} matrix is {rows}x{cols}, not square")]
    MatrixNotSquare { label: String, generator: usize, which: MatrixKind, rows: usize, cols: usize },
    #[error("orbit `{label}` generator {generator}: supplied {which} matrix deviates from orthogonality by {deviation:e} (tolerance {ORTHOGONALITY_TOL:e})")]
    MatrixNotOrthogonal { label: String, generator: usize, which: MatrixKind, deviation: f64 },
    #[error("orbit `{label}` generator {generator}: supplied {which} matrix has determinant {determinant}, declared sign {declared}")]
    MatrixSignMismatch {
        label: String,
        generator: usize,
        which: MatrixKind,
        declared: Sign,
        determinant: f64,
    },
}

/// A suspicious but not disqualifying observation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Warning {
    #[error("reference_betti starts with β_0 = 0; a closed manifold has β_0 ≥ 1")]
    ZeroBettiZero,
}

/// Outcome of [`validate_manifold`]: all problems are reported, none thrown.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    /// A spec is accepted iff no violations were found (warnings are advice).
    pub fn is_accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Counts `μ_{i,j}` of orientable critical orbits with index `i` and torus
/// dimension `j`. Absent keys mean zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MuTable {
    pub counts: BTreeMap<(usize, usize), usize>,
}

impl MuTable {
    pub fn get(&self, index: usize, torus_dim: usize) -> usize {
        self.counts.get(&(index, torus_dim)).copied().unwrap_or(0)
    }

    /// Total number of orientable orbits counted.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

/// True iff the orbit's unstable manifold is orientable: every generator
/// must act with unstable-determinant sign `+1`. An orbit with no generators
/// (a fixed point) is orientable by the empty conjunction.
pub fn classify_orientability(orbit: &CriticalOrbit) -> bool {
    orbit.generators.iter().all(|g| g.det_unstable_sign == Sign::Plus)
}

fn check_matrix(
    label: &str,
    generator: usize,
    which: MatrixKind,
    matrix: &DMatrix<f64>,
    declared: Sign,
    violations: &mut Vec<Violation>,
) {
    if matrix.nrows() != matrix.ncols() {
        violations.push(Violation::MatrixNotSquare {
            label: label.to_owned(),
            generator,
            which,
            rows: matrix.nrows(),
            cols: matrix.ncols(),
        });
        return;
    }
    if matrix.nrows() == 0 {
        // 0×0 block: the action on a zero-dimensional subbundle is the empty
        // map with determinant +1 by convention.
        if declared != Sign::Plus {
            violations.push(Violation::MatrixSignMismatch {
                label: label.to_owned(),
                generator,
                which,
                declared,
                determinant: 1.0,
            });
        }
        return;
    }
    let gram = matrix.transpose() * matrix;
    let identity = DMatrix::<f64>::identity(matrix.nrows(), matrix.nrows());
    let deviation = (gram - identity).abs().max();
    if deviation > ORTHOGONALITY_TOL {
        violations.push(Violation::MatrixNotOrthogonal {
            label: label.to_owned(),
            generator,
            which,
            deviation,
        });
        return;
    }
    let determinant = matrix.determinant();
    let sign_matches = match declared {
        Sign::Plus => determinant > 0.0,
        Sign::Minus => determinant < 0.0,
    };
    if !sign_matches {
        violations.push(Violation::MatrixSignMismatch {
            label: label.to_owned(),
            generator,
            which,
            declared,
            determinant,
        });
    }
}

/// Validates a whole spec: duplicate labels, index/dimension budget,
/// generator counts, the SO sign-product constraint, optional-matrix
/// consistency, and reference-Betti shape. Pure and idempotent; violations
/// are collected, never thrown.
pub fn validate_manifold(spec: &ManifoldSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    if spec.manifold_dim == 0 {
        report.violations.push(Violation::NonpositiveDimension);
    }

    let mut seen = std::collections::BTreeSet::new();
    for orbit in &spec.orbits {
        if !seen.insert(orbit.label.as_str()) {
            report
                .violations
                .push(Violation::DuplicateLabel { label: orbit.label.clone() });
        }
    }

    for orbit in &spec.orbits {
        if orbit.index + orbit.torus_dim > spec.manifold_dim {
            report.violations.push(Violation::DimensionOverflow {
                label: orbit.label.clone(),
                index: orbit.index,
                torus_dim: orbit.torus_dim,
                manifold_dim: spec.manifold_dim,
            });
        }
        if orbit.generators.len() != orbit.torus_dim {
            report.violations.push(Violation::GeneratorCountMismatch {
                label: orbit.label.clone(),
                torus_dim: orbit.torus_dim,
                got: orbit.generators.len(),
            });
        }
        for (g, action) in orbit.generators.iter().enumerate() {
            if action.det_unstable_sign.product(action.det_stable_sign) != Sign::Plus {
                report.violations.push(Violation::SignProductNegative {
                    label: orbit.label.clone(),
                    generator: g,
                });
            }
            if let Some(matrix) = &action.unstable_matrix {
                check_matrix(
                    &orbit.label,
                    g,
                    MatrixKind::Unstable,
                    matrix,
                    action.det_unstable_sign,
                    &mut report.violations,
                );
            }
            if let Some(matrix) = &action.stable_matrix {
                check_matrix(
                    &orbit.label,
                    g,
                    MatrixKind::Stable,
                    matrix,
                    action.det_stable_sign,
                    &mut report.violations,
                );
            }
        }
    }

    if let Some(betti) = &spec.reference_betti {
        let expected = spec.manifold_dim + 1;
        if betti.len() != expected {
            report
                .violations
                .push(Violation::BettiLengthMismatch { expected, got: betti.len() });
        } else if betti[0] == 0 {
            report.warnings.push(Warning::ZeroBettiZero);
        }
    }

    report
}

/// Tabulates `μ_{i,j}`: the number of orbits with index `i`, torus dimension
/// `j`, and orientable unstable manifold. Nonorientable orbits are excluded
/// entirely — they contribute no chain groups.
pub fn mu_table(spec: &ManifoldSpec) -> MuTable {
    let mut table = MuTable::default();
    for orbit in &spec.orbits {
        if classify_orientability(orbit) {
            *table.counts.entry((orbit.index, orbit.torus_dim)).or_insert(0) += 1;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{One, Zero};

    fn signs(pairs: &[(i8, i8)]) -> Vec<GeneratorAction> {
        pairs
            .iter()
            .map(|&(u, s)| {
                GeneratorAction::from_signs(Sign::from_i8(u).unwrap(), Sign::from_i8(s).unwrap())
            })
            .collect()
    }

    fn orbit(label: &str, index: usize, torus_dim: usize, pairs: &[(i8, i8)]) -> CriticalOrbit {
        CriticalOrbit {
            label: label.to_owned(),
            torus_dim,
            index,
            f_value: Rational::zero(),
            generators: signs(pairs),
        }
    }

    /// Three circle orbits at indices 0, 1, 2 in a 3-manifold; the middle
    /// one has a fiber-orientation-reversing deck generator.
    fn three_sphere_spec() -> ManifoldSpec {
        let mut middle = orbit("S_1", 1, 1, &[(-1, -1)]);
        middle.f_value = Rational::zero();
        let mut bottom = orbit("S_0", 0, 1, &[(1, 1)]);
        bottom.f_value = -Rational::one();
        let mut top = orbit("S_2", 2, 1, &[(1, 1)]);
        top.f_value = Rational::one();
        ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![bottom, middle, top],
            reference_betti: Some(vec![1, 0, 0, 1]),
        }
    }

    #[test]
    fn fixed_point_is_orientable_by_empty_conjunction() {
        assert!(classify_orientability(&orbit("P", 2, 0, &[])));
    }

    #[test]
    fn reversing_generator_forces_nonorientable() {
        let mut pole = orbit("S_1_1", 1, 1, &[(-1, -1)]);
        pole.generators[0].unstable_matrix = Some(DMatrix::from_row_slice(1, 1, &[-1.0]));
        pole.generators[0].stable_matrix = Some(DMatrix::from_row_slice(1, 1, &[-1.0]));
        assert!(!classify_orientability(&pole));
        // The supplied matrices are consistent, so validation still accepts.
        let spec = ManifoldSpec { manifold_dim: 3, orbits: vec![pole], reference_betti: None };
        assert!(validate_manifold(&spec).is_accepted());
    }

    #[test]
    fn trivial_character_is_orientable() {
        assert!(classify_orientability(&orbit("S", 0, 2, &[(1, 1), (1, 1)])));
    }

    #[test]
    fn appending_generators_is_monotone() {
        let base = orbit("S", 0, 1, &[(1, 1)]);
        let before = classify_orientability(&base);

        let mut plus = base.clone();
        plus.torus_dim += 1;
        plus.generators.push(GeneratorAction::from_signs(Sign::Plus, Sign::Plus));
        assert_eq!(classify_orientability(&plus), before);

        let mut minus = base;
        minus.torus_dim += 1;
        minus.generators.push(GeneratorAction::from_signs(Sign::Minus, Sign::Minus));
        assert!(!classify_orientability(&minus));
    }

    #[test]
    fn accepts_three_circle_orbit_spec() {
        let report = validate_manifold(&three_sphere_spec());
        assert!(report.is_accepted(), "unexpected violations: {:?}", report.violations);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn rejects_duplicate_labels() {
        let spec = ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![orbit("A", 0, 1, &[(1, 1)]), orbit("A", 2, 1, &[(1, 1)])],
            reference_betti: None,
        };
        let report = validate_manifold(&spec);
        assert_eq!(
            report.violations,
            vec![Violation::DuplicateLabel { label: "A".to_owned() }]
        );
    }

    #[test]
    fn rejects_dimension_overflow() {
        let spec = ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![orbit("A", 3, 1, &[(1, 1)])],
            reference_betti: None,
        };
        let report = validate_manifold(&spec);
        assert_eq!(
            report.violations,
            vec![Violation::DimensionOverflow {
                label: "A".to_owned(),
                index: 3,
                torus_dim: 1,
                manifold_dim: 3,
            }]
        );
    }

    #[test]
    fn rejects_negative_sign_product() {
        let spec = ManifoldSpec {
            manifold_dim: 2,
            orbits: vec![orbit("A", 0, 1, &[(1, -1)])],
            reference_betti: None,
        };
        let report = validate_manifold(&spec);
        assert_eq!(
            report.violations,
            vec![Violation::SignProductNegative { label: "A".to_owned(), generator: 0 }]
        );
    }

    #[test]
    fn rejects_generator_count_mismatch() {
        let spec = ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![orbit("A", 0, 2, &[(1, 1)])],
            reference_betti: None,
        };
        let report = validate_manifold(&spec);
        assert_eq!(
            report.violations,
            vec![Violation::GeneratorCountMismatch {
                label: "A".to_owned(),
                torus_dim: 2,
                got: 1,
            }]
        );
    }

    #[test]
    fn rejects_wrong_betti_length() {
        let spec = ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![],
            reference_betti: Some(vec![1, 0, 1]),
        };
        let report = validate_manifold(&spec);
        assert_eq!(
            report.violations,
            vec![Violation::BettiLengthMismatch { expected: 4, got: 3 }]
        );
    }

    #[test]
    fn warns_on_zero_betti_zero() {
        let spec = ManifoldSpec {
            manifold_dim: 1,
            orbits: vec![],
            reference_betti: Some(vec![0, 0]),
        };
        let report = validate_manifold(&spec);
        assert!(report.is_accepted());
        assert_eq!(report.warnings, vec![Warning::ZeroBettiZero]);
    }

    #[test]
    fn rejects_non_orthogonal_matrix() {
        let mut bad = orbit("A", 0, 1, &[(1, 1)]);
        bad.generators[0].unstable_matrix =
            Some(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
        let spec = ManifoldSpec { manifold_dim: 3, orbits: vec![bad], reference_betti: None };
        let report = validate_manifold(&spec);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::MatrixNotOrthogonal { which: MatrixKind::Unstable, .. }]
        ));
    }

    #[test]
    fn rejects_matrix_sign_mismatch() {
        let mut bad = orbit("A", 0, 1, &[(-1, -1)]);
        // Declared −1 on the unstable block, but supplied the identity.
        bad.generators[0].unstable_matrix = Some(DMatrix::from_row_slice(1, 1, &[1.0]));
        let spec = ManifoldSpec { manifold_dim: 3, orbits: vec![bad], reference_betti: None };
        let report = validate_manifold(&spec);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::MatrixSignMismatch { declared: Sign::Minus, .. }]
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let spec = three_sphere_spec();
        assert_eq!(validate_manifold(&spec), validate_manifold(&spec));
    }

    #[test]
    fn mu_table_excludes_nonorientable_orbits() {
        let table = mu_table(&three_sphere_spec());
        assert_eq!(table.get(0, 1), 1);
        assert_eq!(table.get(2, 1), 1);
        assert_eq!(table.get(1, 1), 0);
        assert_eq!(table.total(), 2);
    }

    #[test]
    fn mu_table_counts_full_torus_orbit() {
        let spec = ManifoldSpec {
            manifold_dim: 2,
            orbits: vec![orbit("T", 0, 2, &[(1, 1), (1, 1)])],
            reference_betti: Some(vec![1, 2, 1]),
        };
        assert_eq!(mu_table(&spec).counts, BTreeMap::from([((0, 2), 1)]));
    }

    #[test]
    fn mu_table_of_empty_spec_is_empty() {
        let spec = ManifoldSpec { manifold_dim: 2, orbits: vec![], reference_betti: None };
        assert!(mu_table(&spec).counts.is_empty());
    }

    #[test]
    fn mu_total_equals_orbit_count_iff_all_orientable() {
        let all_orientable = ManifoldSpec {
            manifold_dim: 3,
            orbits: vec![orbit("A", 0, 1, &[(1, 1)]), orbit("B", 2, 1, &[(1, 1)])],
            reference_betti: None,
        };
        assert_eq!(mu_table(&all_orientable).total(), 2);

        let with_reversal = three_sphere_spec();
        assert!(mu_table(&with_reversal).total() < with_reversal.orbits.len());
    }
}
