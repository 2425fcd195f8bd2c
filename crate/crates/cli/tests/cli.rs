use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

use casimir_cli::{run, Outcome, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK};
use casimir_core::io::{parse_result, parse_sweep_csv, PRESSURE_SIGN_CONVENTION};

struct Files {
    dir: tempfile::TempDir,
}

impl Files {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn ideal(&self, name: &str, kinds: &[(&str, f64)]) -> String {
        let plates: Vec<String> = kinds
            .iter()
            .map(|(k, z)| format!(r#"{{"position":{z},"ideal":"{k}"}}"#))
            .collect();
        let path = self.write(name, &format!(r#"{{"plates":[{}]}}"#, plates.join(",")));
        path.to_str().unwrap().to_string()
    }
}

fn casimir(args: &[&str]) -> Outcome {
    run(std::iter::once("casimir").chain(args.iter().copied()))
}

fn value_of(outcome: &Outcome) -> f64 {
    assert_eq!(outcome.code, EXIT_OK, "{}", outcome.stderr);
    parse_result(&outcome.stdout).unwrap().value
}

#[test]
fn energy_of_two_perfect_conductors() {
    let f = Files::new();
    let stack = f.ideal("pe2.json", &[("perfect_e", 0.0), ("perfect_e", 1.0)]);
    let out = casimir(&["energy", "--stack", &stack]);
    let value = value_of(&out);
    assert!((value / (-PI.powi(2) / 720.0) - 1.0).abs() < 1e-9);
    let report = parse_result(&out.stdout).unwrap();
    assert_eq!(report.input.plates.len(), 2);
    assert!(out.stdout.contains("\"error_estimate\""));
    assert!(out.stdout.contains("\"evaluations\""));
    assert!(out.stdout.contains("\"path\": \"KappaOnly1D\""));

    let csv = casimir(&["energy", "--stack", &stack, "--format", "csv"]);
    assert_eq!(csv.stdout.lines().count(), 2);
    assert!(csv.stdout.contains("-1.37077838904"));
}

#[test]
fn diagram_listings() {
    let out = casimir(&["diagram", "--n", "4"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "Δ12·Δ23·Δ34\nΔ12·Δ24\nΔ13·Δ34\nΔ14\n");
    let out = casimir(&["diagram", "--n", "5"]);
    assert_eq!(out.stdout.lines().count(), 8);
    let out = casimir(&["diagram", "--n", "3", "--expand"]);
    assert!(out.stdout.contains("Δ13 = -r1·t2·t2·r3·e^{-2κ(a3-a1)}"));
    assert_eq!(casimir(&["diagram", "--n", "1"]).code, EXIT_INPUT);
}

#[test]
fn pressure_paths() {
    let f = Files::new();
    let symmetric = f.ideal(
        "pe3.json",
        &[("perfect_e", 0.0), ("perfect_e", 1.0), ("perfect_e", 2.0)],
    );
    let out = casimir(&["pressure", "--stack", &symmetric, "--plate", "2"]);
    assert!(value_of(&out).abs() < 1e-12);
    assert!(out.stdout.contains(PRESSURE_SIGN_CONVENTION));

    let csv = casimir(&["pressure", "--stack", &symmetric, "--plate", "2", "--format", "csv"]);
    assert_eq!(csv.stdout.lines().next().unwrap(), format!("# {PRESSURE_SIGN_CONVENTION}"));

    let mixed = f.ideal(
        "mix3.json",
        &[("perfect_m", 0.0), ("perfect_e", 0.6), ("perfect_e", 1.3)],
    );
    let derivative = parse_result(&casimir(&["pressure", "--stack", &mixed, "--plate", "3"]).stdout).unwrap();
    let stress =
        parse_result(&casimir(&["pressure", "--stack", &mixed, "--plate", "3", "--stress"]).stdout).unwrap();
    assert!((derivative.value - stress.value).abs() <= derivative.error_estimate + stress.error_estimate);

    // stress formula only for the last plate of 2- or 3-plate κ-only stacks
    assert_eq!(casimir(&["pressure", "--stack", &mixed, "--plate", "2", "--stress"]).code, EXIT_INPUT);
    let md = f.write(
        "md.json",
        r#"{"plates":[{"position":0,"lambda_e":1,"lambda_g":1},{"position":1,"ideal":"perfect_e"}]}"#,
    );
    let md = md.to_str().unwrap();
    assert_eq!(casimir(&["pressure", "--stack", md, "--plate", "2", "--stress"]).code, EXIT_INPUT);
    assert_eq!(casimir(&["pressure", "--stack", md, "--plate", "3"]).code, EXIT_INPUT);
}

#[test]
fn sweep_table() {
    let f = Files::new();
    let stack = f.ideal("pe2.json", &[("perfect_e", 0.0), ("perfect_e", 1.0)]);
    let out = casimir(&[
        "sweep", "--stack", &stack, "--gap", "1", "--from", "0.5", "--to", "2", "--points", "3", "--log",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 4);
    let rows = parse_sweep_csv(&out.stdout).unwrap();
    for row in rows {
        let d = row.gap;
        assert!((row.energy_per_area * 720.0 * d.powi(3) / -PI.powi(2) - 1.0).abs() < 1e-9);
        assert!((row.pressure * 240.0 * d.powi(4) / -PI.powi(2) - 1.0).abs() < 1e-9);
    }
    let bad = casimir(&["sweep", "--stack", &stack, "--gap", "2", "--from", "0.5", "--to", "2", "--points", "3"]);
    assert_eq!(bad.code, EXIT_INPUT);
    let bad = casimir(&["sweep", "--stack", &stack, "--gap", "1", "--from", "2", "--to", "1", "--points", "3"]);
    assert_eq!(bad.code, EXIT_INPUT);
}

#[test]
fn greens_and_coefficients() {
    let f = Files::new();
    let stack = f.write(
        "md2.json",
        r#"{"plates":[{"position":0,"lambda_e":2,"lambda_g":0.5},{"position":1,"lambda_e":0.5,"lambda_g":1}]}"#,
    );
    let stack = stack.to_str().unwrap();
    let g = |z: &str, zp: &str| {
        casimir(&[
            "greens", "--stack", stack, "--mode", "H", "--zeta", "0.7", "--kperp", "0.4", "--z", z, "--zprime", zp,
        ])
    };
    let out = g("1.6", "-0.3");
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert!(out.stdout.contains("\"region\": [\n    3,\n    3\n  ]"), "{}", out.stdout);
    let back = g("-0.3", "1.6");
    let value = |text: &str| -> String {
        text.lines().find(|l| l.contains("\"value\"")).unwrap().to_string()
    };
    assert_eq!(value(&out.stdout), value(&back.stdout));
    assert_eq!(g("1.0", "0.5").code, EXIT_INPUT);

    let coeffs = casimir(&["coeffs", "--stack", stack, "--zeta", "0.5", "--kperp", "1"]);
    assert_eq!(coeffs.code, EXIT_OK);
    for key in ["r_left", "r_right", "\"t\"", "delta", "\"mode\": \"E\""] {
        assert!(coeffs.stdout.contains(key), "{key}");
    }
    let zero = casimir(&["coeffs", "--stack", stack, "--zeta", "0", "--kperp", "0"]);
    assert_eq!(zero.code, EXIT_INPUT);
}

#[test]
fn check_passes_on_valid_stacks() {
    let f = Files::new();
    let stack = f.write(
        "mix.json",
        r#"{"plates":[{"position":0,"lambda_e":2,"lambda_g":0.5},{"position":0.7,"ideal":"perfect_m"},{"position":1.5,"lambda_e":0.3,"lambda_g":4}]}"#,
    );
    let out = casimir(&["check", "--stack", stack.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
    for name in ["factorization", "force-energy", "mode-swap", "reciprocity"] {
        assert!(out.stdout.contains(&format!("PASS {name}")), "{}", out.stdout);
    }
    let four = f.ideal(
        "pe4.json",
        &[("perfect_e", 0.0), ("perfect_m", 1.0), ("perfect_e", 1.5), ("perfect_e", 3.0)],
    );
    let out = casimir(&["check", "--stack", &four]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("SKIP reciprocity"));
    assert_ne!(out.code, EXIT_CHECK_FAILED);
}

#[test]
fn exit_codes_for_bad_input() {
    let f = Files::new();
    let unsorted = f.ideal("bad.json", &[("perfect_e", 1.0), ("perfect_e", 0.0)]);
    let out = casimir(&["energy", "--stack", &unsorted]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("positions must increase"));

    let broken = f.write("broken.json", "{\"plates\": [\n  {\"position\": 0,,}]}");
    let out = casimir(&["energy", "--stack", broken.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);

    assert_eq!(casimir(&["energy", "--stack", "/nonexistent/stack.json"]).code, EXIT_INPUT);
    assert_eq!(casimir(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(casimir(&[]).code, EXIT_INPUT);
    assert_eq!(casimir(&["--help"]).code, EXIT_OK);

    let stack = f.write(
        "md.json",
        r#"{"plates":[{"position":0,"lambda_e":2,"lambda_g":0.5},{"position":1,"lambda_e":0.5,"lambda_g":1}]}"#,
    );
    let out = casimir(&["energy", "--stack", stack.to_str().unwrap(), "--rel-tol", "1e-15"]);
    assert_eq!(out.code, EXIT_NOT_CONVERGED, "{}", out.stderr);
    let out = casimir(&["energy", "--stack", stack.to_str().unwrap(), "--rel-tol", "-1"]);
    assert_eq!(out.code, EXIT_INPUT);
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let stack = f.write(
        "md.json",
        r#"{"plates":[{"position":0,"lambda_e":2,"lambda_g":0.5},{"position":1,"lambda_e":0.5,"lambda_g":1}]}"#,
    );
    let stack = stack.to_str().unwrap();
    let a = casimir(&["energy", "--stack", stack]);
    let b = casimir(&["energy", "--stack", stack]);
    assert_eq!(a, b);
    // thread count does not change the numbers
    let seq = casimir(&["energy", "--stack", stack, "--sequential"]);
    assert_eq!(value_of(&a), value_of(&seq));
}

#[test]
fn binary_wraps_run() {
    let f = Files::new();
    let stack = f.ideal("pe2.json", &[("perfect_e", 0.0), ("perfect_e", 1.0)]);
    let out = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["energy", "--stack", &stack])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), casimir(&["energy", "--stack", &stack]).stdout);
    let out = Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(["energy", "--stack", "/nonexistent.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
