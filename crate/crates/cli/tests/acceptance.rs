//! Acceptance suite, CLI side:
//!
//! 5. Morse estimate: generated detours never violate the bound when the
//!    radius precondition holds; tree fixtures always come back
//!    precondition_unmet; C₄₀ gets its exhaustive δ.
//! 7. Determinism: running the suite twice on the same config and seed
//!    produces byte-identical JSON-lines reports.

use std::path::PathBuf;

use hypro_cli::config::{load_config, SuiteConfig};
use hypro_cli::suite::{generate_morse_cases, run_suite};
use hypro_core::hyperbolicity::morse::{morse_check, MorseVerdict};
use hypro_core::hyperbolicity::{four_point_delta, PointSelection};
use hypro_core::space::{half_plane_grid_graph, Space};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn base_config(seed: u64) -> SuiteConfig {
    SuiteConfig {
        seed,
        output: PathBuf::from("report.jsonl"),
        spaces: vec![],
        products: vec![],
        operations: vec![],
        samples: Default::default(),
        base_dir: PathBuf::from("."),
    }
}

// ── criterion 5 ───────────────────────────────────────────────────────

#[test]
fn criterion_5_morse_estimate() {
    let config = base_config(7);

    // C40: exhaustive δ = 10 certifies the radius precondition can never
    // fire at its own scale; generated detours must then all be
    // precondition_unmet and none violated.
    let c40 = Space::from_file(&fixture("c40.json")).unwrap();
    let delta_c40 = four_point_delta(&c40, PointSelection::All).unwrap();
    assert!(delta_c40.four_point.is_exhaustive);
    assert_eq!(delta_c40.four_point.delta, 10.0);
    let mut c40_holds = 0;
    for case in generate_morse_cases(&config, &c40, delta_c40.four_point.delta).unwrap() {
        let v = morse_check(&c40, &case.detour, &case.x, &case.y, &case.p, &case.params).unwrap();
        match v {
            MorseVerdict::BoundViolated { witness } => {
                panic!("C40 case violated the bound: {witness:?}")
            }
            MorseVerdict::BoundHolds { .. } => c40_holds += 1,
            MorseVerdict::PreconditionUnmet { .. } => {}
        }
    }

    // Trees: every x–y path passes through p, so every case is unmet.
    for name in [
        "tree-star.json",
        "tree-regular.json",
        "tree-caterpillar.json",
    ] {
        let tree = Space::from_file(&fixture(name)).unwrap();
        let cases = generate_morse_cases(&config, &tree, 0.0).unwrap();
        assert!(!cases.is_empty(), "{name}: no cases generated");
        for case in cases {
            let v =
                morse_check(&tree, &case.detour, &case.x, &case.y, &case.p, &case.params).unwrap();
            assert!(
                matches!(v, MorseVerdict::PreconditionUnmet { .. }),
                "{name}: expected precondition_unmet, got {v:?}"
            );
        }
    }

    // Half-plane, exact model and derived grid: every generated detour
    // meeting R > 90δ satisfies the length bound, with at least one
    // non-vacuous bound_holds on each.
    let h2 = Space::from_file(&fixture("h2.json")).unwrap();
    let delta_h2 = four_point_delta(&h2, PointSelection::Sample { n: 200, seed: 1 })
        .unwrap()
        .four_point
        .delta;
    let mut holds_exact = 0;
    for case in generate_morse_cases(&config, &h2, delta_h2).unwrap() {
        assert!(case.params.r > 0.0 && case.params.delta > 0.0);
        let v = morse_check(&h2, &case.detour, &case.x, &case.y, &case.p, &case.params).unwrap();
        match v {
            MorseVerdict::BoundViolated { witness } => {
                panic!("half-plane case violated the bound: {witness:?}")
            }
            MorseVerdict::BoundHolds { margin, .. } => {
                assert!(margin >= 0.0);
                assert!(case.params.radius_precondition_holds());
                holds_exact += 1;
            }
            MorseVerdict::PreconditionUnmet { .. } => {}
        }
    }
    assert!(holds_exact > 0, "no non-vacuous half-plane case");

    let grid = half_plane_grid_graph(&h2, "h2-grid").unwrap();
    let delta_grid = four_point_delta(&grid, PointSelection::Sample { n: 120, seed: 2 })
        .unwrap()
        .four_point
        .delta;
    let mut holds_grid = 0;
    for case in generate_morse_cases(&config, &grid, delta_grid).unwrap() {
        let v = morse_check(&grid, &case.detour, &case.x, &case.y, &case.p, &case.params).unwrap();
        match v {
            MorseVerdict::BoundViolated { witness } => {
                panic!("grid case violated the bound: {witness:?}")
            }
            MorseVerdict::BoundHolds { .. } => holds_grid += 1,
            MorseVerdict::PreconditionUnmet { .. } => {}
        }
    }
    assert!(holds_grid > 0, "no non-vacuous grid case");

    println!(
        "criterion 5: PASS (delta(C40)=10 exhaustive, trees all unmet, \
         half-plane holds: exact {holds_exact}, grid {holds_grid}, C40 holds {c40_holds})"
    );
}

// ── criterion 7 ───────────────────────────────────────────────────────

#[test]
fn criterion_7_deterministic_reports() {
    // A config covering spaces, products, and boundary machinery.
    let dir = std::env::temp_dir().join(format!("hypro-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("suite.json");
    let config_text = format!(
        r#"{{
  "seed": 7,
  "output": "report.jsonl",
  "spaces": ["{line}", "{c4}", "{star}"],
  "products": ["{cross}", "{diag}"]
}}"#,
        line = fixture("line.json").display(),
        c4 = fixture("c4.json").display(),
        star = fixture("tree-star.json").display(),
        cross = fixture("cross.json").display(),
        diag = fixture("diag.json").display(),
    );
    std::fs::write(&config_path, config_text).unwrap();

    // Library level: two runs serialize byte-identically.
    let config = load_config(&config_path).unwrap();
    let first = run_suite(&config).unwrap();
    let second = run_suite(&config).unwrap();
    assert!(
        first.all_passed(),
        "suite failed:\n{}",
        first.human_summary()
    );
    let a = first.to_jsonl();
    let b = second.to_jsonl();
    assert_eq!(a, b, "library runs differ");

    // Binary level: two invocations write byte-identical report files.
    let exe = env!("CARGO_BIN_EXE_hypro");
    let mut reports = Vec::new();
    for run in 0..2 {
        let status = std::process::Command::new(exe)
            .args(["suite", "run"])
            .arg(&config_path)
            .env_remove("HYPRO_OUT")
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "run {run} exited with {status}");
        reports.push(std::fs::read(dir.join("report.jsonl")).unwrap());
    }
    assert_eq!(reports[0], reports[1], "binary runs differ");
    assert_eq!(
        a.as_bytes(),
        reports[0].as_slice(),
        "library and binary reports differ"
    );

    println!(
        "criterion 7: PASS (byte-identical reports, {} records)",
        first.records.len()
    );
    let _ = std::fs::remove_dir_all(&dir);
}
