//! Acceptance gate: one test per shipped guarantee, each asserting the
//! documented outcome at its documented tolerance. The per-test pass/fail
//! lines of this target are the release checklist.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mbs::document::parse_and_compile;
use mbs::exactlin::parse_rational;
use mbs::flowlab::{integrate_flow, ExampleManifold, DEFAULT_MAX_TIME, DEFAULT_STEP};
use mbs::mbscomplex::{
    assemble_boundary, chain_basis, cohomology, morse_bott_inequalities, verify_d_squared,
    witten_dims, BoundaryBlock, ChainError, DSquaredFailure,
};
use mbs::orbitdata::{
    classify_orientability, validate_manifold, CriticalOrbit, GeneratorAction, ManifoldSpec, Sign,
};
use mbs::registry;

fn compiled(name: &str) -> (ManifoldSpec, Vec<BoundaryBlock>) {
    parse_and_compile(registry::by_name(name).unwrap().source).unwrap()
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mbs_binary() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mbs"));
    cmd.env_remove("MBS_SEED");
    cmd
}

#[test]
fn criterion_1_golden_cohomology_tables() {
    let goldens: [(&str, &[usize]); 4] = [
        ("t2", &[1, 2, 1]),
        ("s2xs1", &[1, 1, 1, 1]),
        ("s2xt2", &[1, 2, 2, 2, 1]),
        ("s3", &[1, 0, 0, 1]),
    ];
    for (name, expected) in goldens {
        let started = Instant::now();
        let (spec, blocks) = compiled(name);
        let complex = assemble_boundary(&spec, &blocks).unwrap();
        let result = cohomology(&complex, &spec).unwrap();
        assert_eq!(result.betti, expected, "{name}");
        assert_eq!(result.matches_reference, Some(true), "{name}");
        assert!(started.elapsed() < Duration::from_secs(1), "{name} exceeded its time budget");
    }
}

/// A randomized structurally valid orbit inventory: manifold dimension ≤ 6,
/// up to 6 orbits of torus dimension ≤ 3, random orientation characters.
fn random_spec(rng: &mut ChaCha8Rng) -> ManifoldSpec {
    let manifold_dim = rng.gen_range(1..=6);
    let orbit_count = rng.gen_range(0..=6);
    let orbits = (0..orbit_count)
        .map(|i| {
            let torus_dim = rng.gen_range(0..=3.min(manifold_dim));
            let index = rng.gen_range(0..=(manifold_dim - torus_dim));
            let generators = (0..torus_dim)
                .map(|_| {
                    // The ambient rotation group is special orthogonal, so
                    // the two determinant signs always agree.
                    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                    GeneratorAction::from_signs(sign, sign)
                })
                .collect();
            CriticalOrbit {
                label: format!("O_{i}"),
                torus_dim,
                index,
                f_value: parse_rational(&format!("{}", i as i64 - 3)).unwrap(),
                generators,
            }
        })
        .collect();
    ManifoldSpec { manifold_dim, orbits, reference_betti: None }
}

#[test]
fn criterion_2_dimension_identity_on_randomized_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for round in 0..150 {
        let spec = random_spec(&mut rng);
        let report = validate_manifold(&spec);
        assert!(report.is_accepted(), "round {round}: generator produced an invalid spec");
        for (k, dim) in witten_dims(&spec).into_iter().enumerate() {
            assert_eq!(
                dim,
                chain_basis(&spec, k as isize).len(),
                "round {round}, degree {k}"
            );
        }
    }
}

#[test]
fn criterion_3_inequalities_hold_with_top_equality_on_all_examples() {
    for entry in &registry::ENTRIES {
        let (spec, blocks) = compiled(entry.name);
        let complex = assemble_boundary(&spec, &blocks).unwrap();
        let betti = cohomology(&complex, &spec).unwrap().betti;
        let result = morse_bott_inequalities(&spec, &betti).unwrap();
        for (n, record) in result.per_n.iter().enumerate() {
            assert!(record.holds, "{}: inequality fails at n = {n}", entry.name);
        }
        assert!(result.equality_at_top, "{}", entry.name);
        let top = result.per_n.last().unwrap();
        assert_eq!(top.lhs, top.rhs, "{}", entry.name);
    }
}

#[test]
fn criterion_4_nonorientable_orbits_contribute_nothing() {
    for name in ["s2xs1", "s2xt2"] {
        let (spec, blocks) = compiled(name);
        assert!(spec.orbits.iter().any(|o| !classify_orientability(o)), "{name}");

        let mut pruned = spec.clone();
        pruned.orbits.retain(classify_orientability);
        assert!(pruned.orbits.len() < spec.orbits.len(), "{name}");

        let full_complex = assemble_boundary(&spec, &blocks).unwrap();
        let pruned_complex = assemble_boundary(&pruned, &blocks).unwrap();

        let full = cohomology(&full_complex, &spec).unwrap();
        let less = cohomology(&pruned_complex, &pruned).unwrap();
        assert_eq!(full, less, "{name}: cohomology report changed");

        assert_eq!(witten_dims(&spec), witten_dims(&pruned), "{name}");

        let full_ineq = morse_bott_inequalities(&spec, &full.betti).unwrap();
        let pruned_ineq = morse_bott_inequalities(&pruned, &less.betti).unwrap();
        assert_eq!(full_ineq, pruned_ineq, "{name}: inequality report changed");
    }
}

#[test]
fn criterion_5_composite_boundary_detector() {
    // The inconsistent three-orbit input is rejected through the CLI with
    // exit code 2 and the located failing entry.
    let path = fixture_path("dsq_violation.spec");
    let output = mbs_binary()
        .args(["--format", "machine", "cohomology"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["status"], "chain_error");
    assert_eq!(report["payload"]["failure"]["degree"], 1);
    assert_eq!(report["payload"]["failure"]["row"], 0);
    assert_eq!(report["payload"]["failure"]["col"], 0);

    // The same location surfaces at the library level.
    let (spec, blocks) = parse_and_compile(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let complex = assemble_boundary(&spec, &blocks).unwrap();
    match cohomology(&complex, &spec) {
        Err(ChainError::ComplexNotChain(DSquaredFailure { k: 1, row: 0, col: 0 })) => {}
        other => panic!("expected the located composite failure, got {other:?}"),
    }

    // All four examples pass the same detector.
    for entry in &registry::ENTRIES {
        let (spec, blocks) = compiled(entry.name);
        let complex = assemble_boundary(&spec, &blocks).unwrap();
        assert!(verify_d_squared(&complex).ok, "{}", entry.name);
    }
}

#[test]
fn criterion_6_boundary_scale_invariance() {
    for value in ["2", "-1", "7/3"] {
        let (spec, mut blocks) = compiled("s3");
        assert_eq!(blocks.len(), 1);
        blocks[0].raw_matrix.set(0, 1, parse_rational(value).unwrap());
        let complex = assemble_boundary(&spec, &blocks).unwrap();
        let result = cohomology(&complex, &spec).unwrap();
        assert_eq!(result.betti, vec![1, 0, 0, 1], "rescaled by {value}");
    }
}

#[test]
fn criterion_7_flow_oracle_detections_and_connections() {
    // Detection through the CLI: 3 clusters, analytic critical values to
    // 1e-6, indices {0, 1, 2}, inside the time budget.
    let started = Instant::now();
    let output = mbs_binary()
        .args(["--format", "machine", "flow", "s3", "critical", "--seeds", "200"])
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(elapsed < Duration::from_secs(30), "detection took {elapsed:?}");

    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let detections = report["payload"]["detections"].as_array().unwrap();
    assert_eq!(detections.len(), 3);
    // The weighted sphere's extremal circles sit at radius pairs
    // (1/√3, √(2/3)), where f = ±(2/3)·(1/√3) = ±2√3/9.
    let f_top = 2.0 * 3.0_f64.sqrt() / 9.0;
    let expected = [(-f_top, 0), (0.0, 1), (f_top, 2)];
    for (detection, (f_expected, index_expected)) in detections.iter().zip(expected) {
        let f = detection["f_value"].as_f64().unwrap();
        assert!((f - f_expected).abs() < 1e-6, "f = {f}, expected {f_expected}");
        assert_eq!(detection["index"].as_u64().unwrap(), index_expected as u64);
        assert!(detection["matched_label"].is_string());
    }

    // Monotone descent at 1e-8 on every recorded trajectory from the same
    // number of random starts.
    let ex = ExampleManifold::by_name("s3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for _ in 0..200 {
        let raw = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0_f64));
        if raw.norm() < 1e-3 {
            continue;
        }
        let start = ex.project(&raw);
        let traj = integrate_flow(&ex, &start, DEFAULT_STEP, DEFAULT_MAX_TIME).unwrap();
        let values: Vec<f64> = traj.points.iter().map(|p| ex.f_value(p)).collect();
        for pair in values.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-8, "recorded values rose: {} -> {}", pair[0], pair[1]);
        }
    }

    // Connection scan from the top orbit reports no terminal of index ≥ 2.
    let output = mbs_binary()
        .args(["--format", "machine", "flow", "s3", "connections", "--upper", "S_2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let tallies = report["payload"]["tallies"].as_object().unwrap();
    assert!(!tallies.is_empty());
    for label in tallies.keys() {
        let index = ex.orbit(label).unwrap().index;
        assert!(index < 2, "terminal {label} has index {index}");
    }
}

#[test]
fn criterion_8_witten_dimension_tables() {
    let expectations: [(&str, &[usize]); 2] =
        [("s3", &[1, 1, 1, 1]), ("s2xt2", &[1, 2, 2, 2, 1])];
    for (name, expected) in expectations {
        let (spec, _) = compiled(name);
        let dims = witten_dims(&spec);
        assert_eq!(dims, expected, "{name}");
        let chain_dims: Vec<usize> =
            (0..=spec.manifold_dim).map(|k| chain_basis(&spec, k as isize).len()).collect();
        assert_eq!(dims, chain_dims, "{name}");
    }
}
