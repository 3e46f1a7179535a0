//! JSON document format for critical-orbit data and boundary blocks.
//!
//! A document carries everything needed to rebuild the invariant chain
//! complex: the manifold dimension, the critical orbits (label, orbit
//! dimension, index, a rational value of the function as an ordering
//! witness, and the per-generator determinant signs on the unstable and
//! stable normal bundles), optional boundary blocks with exact rational
//! entries, and optional reference Betti numbers.
//!
//! Raw block entries are addressed by invariant-form multi-indices (sorted
//! subsets of `1..=torus_dim`), not flat positions, so documents stay
//! readable and independent of basis-ordering internals. The canonical
//! serialization sorts entries by basis position and renders rationals in
//! lowest terms, so equal data serializes identically.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

use crate::exactlin::{format_rational, parse_rational, RationalParseError};
use crate::mbscomplex::{canonical_multi_indices, BoundaryBlock};
use crate::orbitdata::{CriticalOrbit, GeneratorAction, ManifoldSpec, Sign};
use crate::QMatrix;

/// The single schema version this build reads and writes.
pub const SCHEMA_VERSION: u64 = 1;

/// Top-level document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub schema_version: u64,
    pub manifold_dim: usize,
    pub orbits: Vec<OrbitRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub boundary: Vec<BlockRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_betti: Option<Vec<usize>>,
}

/// One critical orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitRecord {
    pub label: String,
    pub torus_dim: usize,
    pub index: usize,
    /// Rational string like `"-2/3"`; used only for ordering checks.
    pub f_value: String,
    /// One entry per torus generator: determinant signs (`1` or `-1`) of
    /// the generator's action on the unstable and stable normal bundles.
    pub generators: Vec<GeneratorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub du: i8,
    pub ds: i8,
}

/// One boundary block between a pair of orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub upper: String,
    pub lower: String,
    pub entries: Vec<EntryRecord>,
}

/// One nonzero raw-matrix entry, addressed by multi-indices: sorted subsets
/// of `1..=torus_dim` of the upper (row) and lower (column) orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub row_index: Vec<usize>,
    pub col_index: Vec<usize>,
    pub value: String,
}

/// Ways a document can fail to parse or compile.
#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {got} (this build reads version {SCHEMA_VERSION})")]
    SchemaVersion { got: u64 },
    #[error("invalid rational in {field}: {source}")]
    Rational { field: String, source: RationalParseError },
    #[error("orbit `{label}` generator {generator}: {which} sign must be 1 or -1, got {got}")]
    SignValue { label: String, generator: usize, which: &'static str, got: i8 },
    #[error("boundary block references unknown orbit `{label}`")]
    UnknownOrbit { label: String },
    #[error(
        "block ({upper}, {lower}) {side} multi-index {index:?} is not a \
         strictly increasing subset of 1..={bound}"
    )]
    EntryOutOfRange {
        upper: String,
        lower: String,
        side: &'static str,
        index: Vec<usize>,
        bound: usize,
    },
    #[error("block ({upper}, {lower}) repeats the entry at row {row:?}, col {col:?}")]
    DuplicateEntry { upper: String, lower: String, row: Vec<usize>, col: Vec<usize> },
}

/// Parses a document from JSON text and checks its schema version.
///
/// # Errors
///
/// `Json` on malformed JSON or unknown fields (with line/column context);
/// `SchemaVersion` when the document declares a version this build does not
/// read.
pub fn parse_document(text: &str) -> Result<SpecDocument, DocumentError> {
    let doc: SpecDocument = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(DocumentError::SchemaVersion { got: doc.schema_version });
    }
    Ok(doc)
}

/// Compiles a parsed document into the in-memory orbit data and boundary
/// blocks.
///
/// Structural soundness of the *data* (index ordering, orientability,
/// grading, sign products, Betti length) is the validator's and assembler's
/// job; compilation only rejects what cannot be represented at all.
///
/// # Errors
///
/// Rational or sign fields that do not parse, blocks naming unknown
/// orbits, entry multi-indices that are not sorted subsets of the orbit's
/// generator range, and repeated entries within one block.
pub fn compile(doc: &SpecDocument) -> Result<(ManifoldSpec, Vec<BoundaryBlock>), DocumentError> {
    let mut orbits = Vec::with_capacity(doc.orbits.len());
    for record in &doc.orbits {
        let f_value = parse_rational(&record.f_value).map_err(|source| {
            DocumentError::Rational { field: format!("orbit `{}` f_value", record.label), source }
        })?;
        let mut generators = Vec::with_capacity(record.generators.len());
        for (g, signs) in record.generators.iter().enumerate() {
            let du = Sign::from_i8(signs.du).ok_or(DocumentError::SignValue {
                label: record.label.clone(),
                generator: g,
                which: "unstable",
                got: signs.du,
            })?;
            let ds = Sign::from_i8(signs.ds).ok_or(DocumentError::SignValue {
                label: record.label.clone(),
                generator: g,
                which: "stable",
                got: signs.ds,
            })?;
            generators.push(GeneratorAction::from_signs(du, ds));
        }
        orbits.push(CriticalOrbit {
            label: record.label.clone(),
            torus_dim: record.torus_dim,
            index: record.index,
            f_value,
            generators,
        });
    }
    let spec = ManifoldSpec {
        manifold_dim: doc.manifold_dim,
        orbits,
        reference_betti: doc.reference_betti.clone(),
    };

    let mut blocks = Vec::with_capacity(doc.boundary.len());
    for block in &doc.boundary {
        let upper = spec
            .orbit(&block.upper)
            .ok_or_else(|| DocumentError::UnknownOrbit { label: block.upper.clone() })?;
        let lower = spec
            .orbit(&block.lower)
            .ok_or_else(|| DocumentError::UnknownOrbit { label: block.lower.clone() })?;

        let row_positions = position_map(upper.torus_dim);
        let col_positions = position_map(lower.torus_dim);
        let mut raw = QMatrix::zero(1 << upper.torus_dim, 1 << lower.torus_dim);
        let mut seen = HashMap::new();
        for entry in &block.entries {
            let row = *row_positions.get(&entry.row_index).ok_or_else(|| {
                DocumentError::EntryOutOfRange {
                    upper: block.upper.clone(),
                    lower: block.lower.clone(),
                    side: "row",
                    index: entry.row_index.clone(),
                    bound: upper.torus_dim,
                }
            })?;
            let col = *col_positions.get(&entry.col_index).ok_or_else(|| {
                DocumentError::EntryOutOfRange {
                    upper: block.upper.clone(),
                    lower: block.lower.clone(),
                    side: "col",
                    index: entry.col_index.clone(),
                    bound: lower.torus_dim,
                }
            })?;
            if seen.insert((row, col), ()).is_some() {
                return Err(DocumentError::DuplicateEntry {
                    upper: block.upper.clone(),
                    lower: block.lower.clone(),
                    row: entry.row_index.clone(),
                    col: entry.col_index.clone(),
                });
            }
            let value = parse_rational(&entry.value).map_err(|source| DocumentError::Rational {
                field: format!(
                    "block ({}, {}) entry at row {:?}, col {:?}",
                    block.upper, block.lower, entry.row_index, entry.col_index
                ),
                source,
            })?;
            raw.set(row, col, value);
        }
        blocks.push(BoundaryBlock {
            upper_label: block.upper.clone(),
            lower_label: block.lower.clone(),
            raw_matrix: raw,
        });
    }
    Ok((spec, blocks))
}

/// Parses and compiles in one step.
///
/// # Errors
///
/// See [`parse_document`] and [`compile`].
pub fn parse_and_compile(text: &str) -> Result<(ManifoldSpec, Vec<BoundaryBlock>), DocumentError> {
    compile(&parse_document(text)?)
}

/// Renders compiled data back into a document in canonical form: orbits in
/// their stored order, block entries sorted by basis position with zeros
/// omitted, rationals in lowest terms.
pub fn serialize_canonical(spec: &ManifoldSpec, blocks: &[BoundaryBlock]) -> SpecDocument {
    let orbits = spec
        .orbits
        .iter()
        .map(|orbit| OrbitRecord {
            label: orbit.label.clone(),
            torus_dim: orbit.torus_dim,
            index: orbit.index,
            f_value: format_rational(&orbit.f_value),
            generators: orbit
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    du: g.det_unstable_sign.as_i8(),
                    ds: g.det_stable_sign.as_i8(),
                })
                .collect(),
        })
        .collect();

    let boundary = blocks
        .iter()
        .map(|block| {
            let upper = spec
                .orbit(&block.upper_label)
                .expect("serializing a block whose upper orbit is not in the spec");
            let lower = spec
                .orbit(&block.lower_label)
                .expect("serializing a block whose lower orbit is not in the spec");
            let row_indices = canonical_multi_indices(upper.torus_dim);
            let col_indices = canonical_multi_indices(lower.torus_dim);
            let entries = block
                .raw_matrix
                .iter()
                .filter(|(_, _, value)| !num::Zero::is_zero(*value))
                .map(|(r, c, value)| EntryRecord {
                    row_index: row_indices[r].clone(),
                    col_index: col_indices[c].clone(),
                    value: format_rational(value),
                })
                .collect();
            BlockRecord {
                upper: block.upper_label.clone(),
                lower: block.lower_label.clone(),
                entries,
            }
        })
        .collect();

    SpecDocument {
        schema_version: SCHEMA_VERSION,
        manifold_dim: spec.manifold_dim,
        orbits,
        boundary,
        reference_betti: spec.reference_betti.clone(),
    }
}

/// Pretty-printed canonical JSON for a document.
pub fn to_canonical_json(doc: &SpecDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document types always serialize");
    text.push('\n');
    text
}

/// Map from multi-index to its position in the canonical basis order.
fn position_map(torus_dim: usize) -> HashMap<Vec<usize>, usize> {
    canonical_multi_indices(torus_dim)
        .into_iter()
        .enumerate()
        .map(|(pos, index)| (index, pos))
        .collect()
}
