//! Built-in orbit-data documents for the example manifolds, embedded at
//! compile time so the CLI can run them without external files.
//!
//! Each entry pairs a name (shared with the flow laboratory's example
//! manifolds) with the canonical JSON document describing its critical
//! orbits, boundary blocks, and reference Betti numbers.

/// One embedded document.
#[derive(Debug, Clone, Copy)]
pub struct RegistryEntry {
    /// Short name used on the command line (the fixture basename).
    pub name: &'static str,
    /// Name of the corresponding flow-laboratory example manifold.
    pub flow_name: &'static str,
    /// Canonical JSON document text.
    pub source: &'static str,
    /// One-line description of the geometry.
    pub note: &'static str,
}

/// All embedded documents, in presentation order.
pub const ENTRIES: [RegistryEntry; 4] = [
    RegistryEntry {
        name: "t2",
        flow_name: "torus2",
        source: include_str!("../examples/t2.spec"),
        note: "flat 2-torus with the zero function: one critical orbit, the whole manifold",
    },
    RegistryEntry {
        name: "s2xs1",
        flow_name: "s2xs1",
        source: include_str!("../examples/s2xs1.spec"),
        note: "S2 x S1 with a weighted rotation action: two extremal circles, two nonorientable saddle circles",
    },
    RegistryEntry {
        name: "s2xt2",
        flow_name: "s2xt2",
        source: include_str!("../examples/s2xt2.spec"),
        note: "S2 x T2 with a rank-2 action: four 2-torus orbits, saddles nonorientable in one generator",
    },
    RegistryEntry {
        name: "s3",
        flow_name: "s3",
        source: include_str!("../examples/s3.spec"),
        note: "round S3 with the weight-(2,1) circle action: extremal circles joined through a nonorientable saddle",
    },
];

/// Looks up an embedded document by its registry name, also accepting the
/// flow-laboratory name as an alias.
pub fn by_name(name: &str) -> Option<&'static RegistryEntry> {
    ENTRIES.iter().find(|entry| entry.name == name || entry.flow_name == name)
}

/// Names of all embedded documents, in presentation order.
pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|entry| entry.name).collect()
}
