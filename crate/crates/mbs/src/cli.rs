//! Command-line front end: document validation, cohomology, inequality and
//! dimension tables, the flow laboratory, and the embedded example
//! registry.
//!
//! Exit codes are a stable contract: 0 success, 1 validation or parse
//! failure (including bad usage), 2 boundary maps that do not square to
//! zero, 3 an inequality violation, 4 input/output or internal failure.
//! `--format machine` renders a versioned JSON report; text output targets
//! human readers. The `MBS_SEED` environment variable fixes the RNG seed
//! used by flow commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::document::{parse_and_compile, DocumentError};
use crate::flowlab::{
    connection_scan_with, find_critical_orbits_with, ExampleManifold, DEFAULT_RNG_SEED,
    DEFAULT_STEP, TERMINAL_TOL,
};
use crate::mbscomplex::{
    assemble_boundary, chain_basis, cohomology, morse_bott_inequalities, witten_dims,
    AssembledComplex, BoundaryBlock, ChainError,
};
use crate::orbitdata::{validate_manifold, ManifoldSpec};
use crate::registry;
use crate::report::{Report, Status, EXIT_IO};

/// Output rendering mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable tables.
    Text,
    /// Versioned JSON report envelope.
    Machine,
}

/// Invariant chain complexes from critical-orbit data, with a numerical
/// gradient-flow laboratory.
#[derive(Debug, Parser)]
#[command(name = "mbs", version, max_term_width = 100)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a document's structural soundness (orbit data and boundary
    /// block shape/grading).
    Validate { path: PathBuf },
    /// Assemble the complex, verify the boundary squares to zero, and
    /// compute Betti numbers.
    Cohomology { path: PathBuf },
    /// Evaluate the alternating-sum inequalities against Betti numbers.
    Inequalities {
        path: PathBuf,
        /// Comma-separated Betti numbers to test against, overriding both
        /// the document's reference values and computation.
        #[arg(long, value_delimiter = ',')]
        betti: Option<Vec<usize>>,
    },
    /// Print the instanton-space dimension table and check it against the
    /// chain dimensions.
    WittenDims { path: PathBuf },
    /// Run the numerical gradient-flow laboratory on a built-in example.
    Flow {
        /// Example name: torus2, s2xs1, s2xt2, or s3.
        example: String,
        #[command(subcommand)]
        action: FlowAction,
    },
    /// List the embedded example documents, or print one.
    Example { name: Option<String> },
}

#[derive(Debug, Subcommand)]
pub enum FlowAction {
    /// Detect critical orbits from random seeds and classify them.
    Critical {
        /// Number of random starting points.
        #[arg(long, default_value_t = 200)]
        seeds: usize,
        /// Matching tolerance against analytic orbits (also sets the
        /// clustering radius).
        #[arg(long, default_value_t = TERMINAL_TOL)]
        tol: f64,
        /// Integrator step size.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Flow perturbations down from one orbit's unstable directions and
    /// tally where they land.
    Connections {
        /// Label of the orbit to scan from.
        #[arg(long)]
        upper: String,
        /// Number of random perturbation directions.
        #[arg(long, default_value_t = 60)]
        seeds: usize,
        /// Integrator step size.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
}

/// Parses arguments from the process environment, runs the command, and
/// returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Usage errors are input errors (exit 1); --help and --version
            // are successful outputs.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_IO
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Validate { path } => cmd_validate(path, cli.format),
        Command::Cohomology { path } => cmd_cohomology(path, cli.format),
        Command::Inequalities { path, betti } => {
            cmd_inequalities(path, betti.as_deref(), cli.format)
        }
        Command::WittenDims { path } => cmd_witten_dims(path, cli.format),
        Command::Flow { example, action } => cmd_flow(example, action, cli.format),
        Command::Example { name } => cmd_example(name.as_deref(), cli.format),
    }
}

fn emit(format: Format, report: Report, text: String) -> i32 {
    match format {
        Format::Machine => print!("{}", report.to_json()),
        Format::Text => print!("{text}"),
    }
    report.status.exit_code()
}

/// A document that failed to parse or compile (reported with exit 1).
fn parse_failure(command: &str, format: Format, err: &DocumentError) -> i32 {
    let report = Report::new(
        command,
        Status::ValidationError,
        json!({ "accepted": false, "parse_error": err.to_string() }),
    );
    emit(format, report, format!("document rejected: {err}\n"))
}

fn load_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Loads, parses, validates, and assembles a document, or renders the
/// appropriate failure report. `Ok(Err(code))` means "already reported".
#[allow(clippy::type_complexity)]
fn load_assembled(
    command: &str,
    path: &Path,
    format: Format,
) -> anyhow::Result<Result<(ManifoldSpec, Vec<BoundaryBlock>, AssembledComplex), i32>> {
    let text = load_text(path)?;
    let (spec, blocks) = match parse_and_compile(&text) {
        Ok(compiled) => compiled,
        Err(err) => return Ok(Err(parse_failure(command, format, &err))),
    };

    let validation = validate_manifold(&spec);
    if !validation.is_accepted() {
        let violations: Vec<String> =
            validation.violations.iter().map(ToString::to_string).collect();
        let report = Report::new(
            command,
            Status::ValidationError,
            json!({ "accepted": false, "violations": violations }),
        );
        let mut text = String::from("document rejected:\n");
        for v in &violations {
            let _ = writeln!(text, "  - {v}");
        }
        return Ok(Err(emit(format, report, text)));
    }

    match assemble_boundary(&spec, &blocks) {
        Ok(complex) => Ok(Ok((spec, blocks, complex))),
        Err(err) => {
            let report = Report::new(
                command,
                Status::ValidationError,
                json!({ "accepted": false, "violations": [err.to_string()] }),
            );
            Ok(Err(emit(format, report, format!("document rejected: {err}\n"))))
        }
    }
}

fn cmd_validate(path: &Path, format: Format) -> anyhow::Result<i32> {
    let text = load_text(path)?;
    let (spec, blocks) = match parse_and_compile(&text) {
        Ok(compiled) => compiled,
        Err(err) => return Ok(parse_failure("validate", format, &err)),
    };

    let validation = validate_manifold(&spec);
    let mut violations: Vec<String> =
        validation.violations.iter().map(ToString::to_string).collect();
    let warnings: Vec<String> = validation.warnings.iter().map(ToString::to_string).collect();
    // Block shape and grading are structural soundness too; check them here
    // even though assembly is not otherwise needed.
    if violations.is_empty() {
        if let Err(err) = assemble_boundary(&spec, &blocks) {
            violations.push(err.to_string());
        }
    }

    let accepted = violations.is_empty();
    let status = if accepted { Status::Ok } else { Status::ValidationError };
    let report = Report::new(
        "validate",
        status,
        json!({
            "accepted": accepted,
            "violations": violations,
            "warnings": warnings,
            "orbits": spec.orbits.len(),
            "boundary_blocks": blocks.len(),
        }),
    );

    let mut text = if accepted {
        format!(
            "document accepted: {} orbits, {} boundary blocks\n",
            spec.orbits.len(),
            blocks.len()
        )
    } else {
        let mut t = String::from("document rejected:\n");
        for v in &violations {
            let _ = writeln!(t, "  - {v}");
        }
        t
    };
    for w in &warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    Ok(emit(format, report, text))
}

fn cmd_cohomology(path: &Path, format: Format) -> anyhow::Result<i32> {
    let (spec, _blocks, complex) = match load_assembled("cohomology", path, format)? {
        Ok(loaded) => loaded,
        Err(code) => return Ok(code),
    };

    let result = match cohomology(&complex, &spec) {
        Ok(result) => result,
        Err(ChainError::ComplexNotChain(failure)) => {
            let report = Report::new(
                "cohomology",
                Status::ChainError,
                json!({
                    "failure": {
                        "degree": failure.k,
                        "row": failure.row,
                        "col": failure.col,
                    }
                }),
            );
            let text = format!(
                "boundary does not square to zero: (d.d)[{}] has a nonzero entry at row {}, col {}\n",
                failure.k, failure.row, failure.col
            );
            return Ok(emit(format, report, text));
        }
    };

    let report = Report::new(
        "cohomology",
        Status::Ok,
        json!({
            "betti": result.betti,
            "chain_dims": result.chain_dims,
            "euler_characteristic": result.euler_characteristic,
            "matches_reference": result.matches_reference,
        }),
    );

    let mut text = String::from("degree  chain dim  betti\n");
    for (k, (&dim, &b)) in result.chain_dims.iter().zip(&result.betti).enumerate() {
        let _ = writeln!(text, "{k:<7} {dim:<10} {b}");
    }
    let _ = writeln!(text, "Euler characteristic: {}", result.euler_characteristic);
    match result.matches_reference {
        Some(true) => text.push_str("reference match: yes\n"),
        Some(false) => text.push_str("reference match: NO\n"),
        None => text.push_str("reference match: no reference provided\n"),
    }
    Ok(emit(format, report, text))
}

fn cmd_inequalities(
    path: &Path,
    betti_override: Option<&[usize]>,
    format: Format,
) -> anyhow::Result<i32> {
    let (spec, _blocks, complex) = match load_assembled("inequalities", path, format)? {
        Ok(loaded) => loaded,
        Err(code) => return Ok(code),
    };

    let (betti, source) = if let Some(betti) = betti_override {
        (betti.to_vec(), "override")
    } else if let Some(reference) = &spec.reference_betti {
        (reference.clone(), "reference")
    } else {
        match cohomology(&complex, &spec) {
            Ok(result) => (result.betti, "computed"),
            Err(ChainError::ComplexNotChain(failure)) => {
                let report = Report::new(
                    "inequalities",
                    Status::ChainError,
                    json!({
                        "failure": {
                            "degree": failure.k,
                            "row": failure.row,
                            "col": failure.col,
                        }
                    }),
                );
                let text = format!(
                    "cannot compute Betti numbers: boundary does not square to zero at degree {}\n",
                    failure.k
                );
                return Ok(emit(format, report, text));
            }
        }
    };

    let result = match morse_bott_inequalities(&spec, &betti) {
        Ok(result) => result,
        Err(err) => {
            let report = Report::new(
                "inequalities",
                Status::ValidationError,
                json!({ "accepted": false, "violations": [err.to_string()] }),
            );
            return Ok(emit(format, report, format!("rejected: {err}\n")));
        }
    };

    let passed = result.all_hold() && result.equality_at_top;
    let status = if passed { Status::Ok } else { Status::InequalityViolation };
    let per_n: Vec<serde_json::Value> = result
        .per_n
        .iter()
        .enumerate()
        .map(|(n, record)| {
            json!({ "n": n, "lhs": record.lhs, "rhs": record.rhs, "holds": record.holds })
        })
        .collect();
    let report = Report::new(
        "inequalities",
        status,
        json!({
            "betti": betti,
            "betti_source": source,
            "per_n": per_n,
            "equality_at_top": result.equality_at_top,
        }),
    );

    let mut text = format!("betti source: {source}\nn   lhs   rhs   holds\n");
    for (n, record) in result.per_n.iter().enumerate() {
        let _ = writeln!(
            text,
            "{n:<3} {:<5} {:<5} {}",
            record.lhs,
            record.rhs,
            if record.holds { "yes" } else { "NO" }
        );
    }
    let _ = writeln!(
        text,
        "equality at top degree: {}",
        if result.equality_at_top { "yes" } else { "NO" }
    );
    Ok(emit(format, report, text))
}

fn cmd_witten_dims(path: &Path, format: Format) -> anyhow::Result<i32> {
    let (spec, _blocks, _complex) = match load_assembled("witten-dims", path, format)? {
        Ok(loaded) => loaded,
        Err(code) => return Ok(code),
    };

    let dims = witten_dims(&spec);
    let chain_dims: Vec<usize> =
        (0..=spec.manifold_dim).map(|k| chain_basis(&spec, k as isize).len()).collect();
    anyhow::ensure!(
        dims == chain_dims,
        "instanton dimensions {dims:?} disagree with chain dimensions {chain_dims:?}; \
         this indicates an internal defect"
    );

    let report = Report::new(
        "witten-dims",
        Status::Ok,
        json!({ "witten_dims": dims, "chain_dims": chain_dims, "equal": true }),
    );
    let mut text = String::from("degree  instanton dim  chain dim\n");
    for (k, (&w, &c)) in dims.iter().zip(&chain_dims).enumerate() {
        let _ = writeln!(text, "{k:<7} {w:<14} {c}");
    }
    text.push_str("tables agree\n");
    Ok(emit(format, report, text))
}

/// Resolves the RNG seed for flow commands: `MBS_SEED` when set, else the
/// built-in default.
fn resolve_rng_seed() -> Result<u64, String> {
    match std::env::var("MBS_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("MBS_SEED must be an unsigned 64-bit integer, got `{text}`")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_RNG_SEED),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err("MBS_SEED must be valid unicode".to_owned())
        }
    }
}

/// A flow request that could not run (bad example name, bad parameters, or
/// an input-shaped flow error), reported with exit 1.
fn flow_rejection(command: &str, format: Format, message: String) -> i32 {
    let report = Report::new(
        command,
        Status::ValidationError,
        json!({ "accepted": false, "error": message }),
    );
    emit(format, report, format!("rejected: {message}\n"))
}

fn cmd_flow(example: &str, action: &FlowAction, format: Format) -> anyhow::Result<i32> {
    let command = match action {
        FlowAction::Critical { .. } => "flow-critical",
        FlowAction::Connections { .. } => "flow-connections",
    };
    // Accept registry names ("t2") as aliases for flow-lab names ("torus2").
    let resolved = ExampleManifold::by_name(example).or_else(|| {
        registry::by_name(example).and_then(|entry| ExampleManifold::by_name(entry.flow_name))
    });
    let Some(ex) = resolved else {
        let names: Vec<&str> = ExampleManifold::all().iter().map(|e| e.name()).collect();
        return Ok(flow_rejection(
            command,
            format,
            format!("unknown example `{example}` (available: {})", names.join(", ")),
        ));
    };
    let rng_seed = match resolve_rng_seed() {
        Ok(seed) => seed,
        Err(message) => return Ok(flow_rejection(command, format, message)),
    };

    match action {
        FlowAction::Critical { seeds, tol, step } => {
            let detections = match find_critical_orbits_with(&ex, *seeds, *tol, *step, rng_seed) {
                Ok(detections) => detections,
                // ConstantFunction and parameter-shaped flow errors alike
                // are input rejections, not internal failures.
                Err(err) => return Ok(flow_rejection(command, format, err.to_string())),
            };

            let rows: Vec<serde_json::Value> = detections
                .iter()
                .map(|d| {
                    json!({
                        "matched_label": d.matched_label,
                        "index": d.index,
                        "f_value": d.f_value,
                        "gradient_norm": d.gradient_norm,
                        "representative_point": d.representative_point.as_slice(),
                    })
                })
                .collect();
            let report = Report::new(
                command,
                Status::Ok,
                json!({
                    "example": ex.name(),
                    "seeds": seeds,
                    "tol": tol,
                    "step": step,
                    "rng_seed": rng_seed,
                    "detections": rows,
                }),
            );

            let mut text = format!(
                "{} critical orbit clusters on {} ({} seeds, tol {tol}, step {step}, rng seed {rng_seed})\n",
                detections.len(),
                ex.name(),
                seeds
            );
            text.push_str("label      index  f-value           gradient norm\n");
            for d in &detections {
                let label = d.matched_label.as_deref().unwrap_or("(unmatched)");
                let f_column = format!("{:+.9e}", d.f_value);
                let _ = writeln!(
                    text,
                    "{label:<10} {:<6} {f_column:<17} {:.3e}",
                    d.index, d.gradient_norm
                );
            }
            Ok(emit(format, report, text))
        }
        FlowAction::Connections { upper, seeds, step } => {
            let scan = match connection_scan_with(&ex, upper, *seeds, *step, rng_seed) {
                Ok(scan) => scan,
                Err(err) => return Ok(flow_rejection(command, format, err.to_string())),
            };

            let tallies: serde_json::Map<String, serde_json::Value> = scan
                .tallies
                .iter()
                .map(|(label, count)| (label.clone(), json!(count)))
                .collect();
            let report = Report::new(
                command,
                Status::Ok,
                json!({
                    "example": ex.name(),
                    "upper": upper,
                    "samples": seeds,
                    "step": step,
                    "rng_seed": rng_seed,
                    "tallies": tallies,
                    "unresolved": scan.unresolved,
                }),
            );

            let mut text = format!(
                "downward connections from {upper} on {} ({seeds} samples, step {step}, rng seed {rng_seed})\n",
                ex.name()
            );
            for (label, count) in &scan.tallies {
                let _ = writeln!(text, "  {label}: {count}");
            }
            let _ = writeln!(text, "unresolved: {}", scan.unresolved);
            Ok(emit(format, report, text))
        }
    }
}

fn cmd_example(name: Option<&str>, format: Format) -> anyhow::Result<i32> {
    match name {
        None => {
            let entries: Vec<serde_json::Value> = registry::ENTRIES
                .iter()
                .map(|e| json!({ "name": e.name, "flow_name": e.flow_name, "note": e.note }))
                .collect();
            let report = Report::new("example", Status::Ok, json!({ "entries": entries }));
            let mut text = String::new();
            for e in &registry::ENTRIES {
                let _ = writeln!(text, "{:<8} {}", e.name, e.note);
            }
            Ok(emit(format, report, text))
        }
        Some(name) => {
            let Some(entry) = registry::by_name(name) else {
                let report = Report::new(
                    "example",
                    Status::ValidationError,
                    json!({
                        "accepted": false,
                        "error": format!("unknown example `{name}`"),
                        "available": registry::names(),
                    }),
                );
                let text = format!(
                    "unknown example `{name}` (available: {})\n",
                    registry::names().join(", ")
                );
                return Ok(emit(format, report, text));
            };
            let document: serde_json::Value = serde_json::from_str(entry.source)
                .expect("embedded documents are valid JSON");
            let report = Report::new(
                "example",
                Status::Ok,
                json!({ "name": entry.name, "note": entry.note, "document": document }),
            );
            // Text mode prints the document source byte-for-byte.
            Ok(emit(format, report, entry.source.to_owned()))
        }
    }
}
