//! End-to-end checks of the `soliton` binary: exit codes, deterministic
//! output, CSV layout, and the preset files shipped in-repo.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_soliton"))
}

fn presets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("soliton-cli-{}-{name}", std::process::id()))
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let p = scratch(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn soliton")
}

#[test]
fn malformed_json_exits_2_with_diagnostic() {
    let cfg = write_config("bad.json", "{ not json");
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let _ = fs::remove_file(cfg);
}

#[test]
fn unknown_key_exits_2() {
    let cfg = write_config(
        "unknown.json",
        r#"{"bundle": {"kind": "line", "mu": -1, "extra_key": 1}}"#,
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("extra_key"), "{msg}");
    let _ = fs::remove_file(cfg);
}

#[test]
fn invalid_spec_exits_3() {
    let cfg = write_config(
        "badspec.json",
        r#"{"bundle": {"kind": "line", "base_eigenvalues": [-1], "mu": -1}}"#,
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_file(cfg);
}

#[test]
fn missing_config_exits_2() {
    let out = run(&["solve", "--config", "/nonexistent/nowhere.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_cp1_phi_column_matches_closed_form() {
    // Q = 1 + 2 tau, mu = -1: phi = (2 tau - 1 + e^{-tau})/(1 + 2 tau),
    // derived by hand from the quadrature formula
    let out_path = scratch("cp1.csv");
    let out = run(&[
        "solve",
        "--config",
        presets_dir().join("cp1_canonical.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let text = fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "tau,phi,phi_prime,ode_residual");
    let mut checked = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (tau, phi) = (cells[0], cells[1]);
        let want = (2.0 * tau - 1.0 + (-tau).exp()) / (1.0 + 2.0 * tau);
        if tau > 0.5 {
            assert!(
                ((phi - want) / want).abs() < 1e-11,
                "tau = {tau}: {phi} vs {want}"
            );
            checked += 1;
        }
        assert!(cells[3].abs() < 1e-9, "residual column at tau = {tau}");
    }
    assert!(checked > 100);
    let _ = fs::remove_file(out_path);
}

#[test]
fn solve_is_byte_deterministic() {
    let a = scratch("det-a.csv");
    let b = scratch("det-b.csv");
    for p in [&a, &b] {
        let out = run(&[
            "solve",
            "--config",
            presets_dir().join("c2_cao.json").to_str().unwrap(),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let _ = (fs::remove_file(a), fs::remove_file(b));
}

#[test]
fn csv_number_format_is_17_digits_lf_only() {
    let out_path = scratch("fmt.csv");
    let out = run(&[
        "solve",
        "--config",
        presets_dir().join("flat_line.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--samples",
        "16",
    ]);
    assert!(out.status.success());
    let raw = fs::read(&out_path).unwrap();
    assert!(!raw.contains(&b'\r'));
    let text = String::from_utf8(raw).unwrap();
    let row = text.lines().nth(1).unwrap();
    for cell in row.split(',') {
        // mantissa with 16 fractional digits + exponent
        let mantissa = cell.split('e').next().unwrap();
        let frac = mantissa.split('.').nth(1).unwrap();
        assert_eq!(frac.len(), 16, "cell {cell}");
    }
    let _ = fs::remove_file(out_path);
}

#[test]
fn potential_reference_profile_matches_exponential() {
    let cfg = write_config(
        "ref.json",
        r#"{"bundle": {"kind": "reference"},
            "potential": {"gauge_tau0": 1.0, "t_min": -2.0, "t_max": 2.0, "samples": 401}}"#,
    );
    let out_path = scratch("ref.csv");
    let out = run(&[
        "potential",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,tau,f,fpp,fppp");
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (t, f) = (cells[0], cells[2]);
        assert!((f - t.exp()).abs() / t.exp() < 1e-8, "f({t}) = {f}");
    }
    let _ = (fs::remove_file(cfg), fs::remove_file(out_path));
}

#[test]
fn potential_fppp_nonnegative_and_deterministic_for_presets() {
    for preset in ["cp1_canonical", "vb_sum_lines"] {
        let a = scratch(&format!("pot-{preset}-a.csv"));
        let cfgp = presets_dir().join(format!("{preset}.json"));
        let out = run(&[
            "potential",
            "--config",
            cfgp.to_str().unwrap(),
            "--out",
            a.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{preset}");
        let text = fs::read_to_string(&a).unwrap();
        for line in text.lines().skip(1) {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(cells[4] >= -1e-12, "{preset}: f''' = {} at t = {}", cells[4], cells[0]);
        }
        let b = scratch(&format!("pot-{preset}-b.csv"));
        let out = run(&[
            "potential",
            "--config",
            cfgp.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{preset}");
        let _ = (fs::remove_file(a), fs::remove_file(b));
    }
}

#[test]
fn potential_rejects_positive_mu_with_exit_3() {
    let cfg = write_config(
        "pos-mu.json",
        r#"{"bundle": {"kind": "line", "base_eigenvalues": [2], "mu": 1}}"#,
    );
    let out = run(&["potential", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let _ = fs::remove_file(cfg);
}

#[test]
fn report_json_verdicts() {
    let out_path = scratch("report.json");
    let out = run(&[
        "report",
        "--config",
        presets_dir().join("cp1_canonical.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["complete"], true);
    assert_eq!(doc["ricci_nonnegative"], true);
    assert_eq!(doc["ricci_strictly_positive_offsection"], true);
    assert_eq!(doc["volume_growth_predicted"], 2);
    let fitted = doc["volume_growth_exponent"].as_f64().unwrap();
    assert!((fitted - 2.0).abs() < 0.1);
    assert!(doc["metadata"]["version"].is_string());
    // evidence grids ride along with the verdicts
    let n = doc["evidence"]["tau"].as_array().unwrap().len();
    assert_eq!(n, 512);
    assert_eq!(doc["evidence"]["phi"].as_array().unwrap().len(), n);
    assert_eq!(doc["evidence"]["h_scaled"].as_array().unwrap().len(), n);
    assert!(doc["evidence"]["ricci_fiber"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v.as_f64().unwrap() >= 0.0));
    let _ = fs::remove_file(out_path);
}

#[test]
fn report_mu_positive_incomplete() {
    let cfg = write_config(
        "mu-pos-report.json",
        r#"{"bundle": {"kind": "line", "base_eigenvalues": [2], "mu": 1}}"#,
    );
    let out_path = scratch("mu-pos-report-out.json");
    let out = run(&[
        "report",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["complete"], false);
    assert_eq!(doc["extends_across_zero_section"], true);
    assert!(doc["ricci_nonnegative"].is_null());
    let _ = (fs::remove_file(cfg), fs::remove_file(out_path));
}

#[test]
fn report_flat_line_no_strict_positivity() {
    let out_path = scratch("flat-report.json");
    let out = run(&[
        "report",
        "--config",
        presets_dir().join("flat_line.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["complete"], true);
    assert_eq!(doc["ricci_nonnegative"], true);
    assert_eq!(doc["ricci_strictly_positive_offsection"], false);
    let _ = fs::remove_file(out_path);
}

#[test]
fn validate_honors_k_constant() {
    let cfg = write_config(
        "with-k.json",
        r#"{"bundle": {"kind": "line", "base_eigenvalues": [2], "mu": -1, "K": 0.5}}"#,
    );
    let out_path = scratch("with-k.csv");
    let out = run(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = (fs::remove_file(cfg), fs::remove_file(out_path));
}

#[test]
fn validate_unattainable_tolerance_exits_5() {
    let cfg = write_config(
        "tight.json",
        r#"{"bundle": {"kind": "line", "base_eigenvalues": [2], "mu": -1},
            "tolerances": {"quad_tolerance": 1e-16}}"#,
    );
    let out_path = scratch("tight.csv");
    let out = run(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = (fs::remove_file(cfg), fs::remove_file(out_path));
}

#[test]
fn tau_max_and_samples_overrides_apply() {
    let out_path = scratch("override.csv");
    let out = run(&[
        "solve",
        "--config",
        presets_dir().join("flat_line.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--tau-max",
        "10",
        "--samples",
        "7",
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    let last: f64 = rows.last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((last - 10.0).abs() < 1e-9);
    let _ = fs::remove_file(out_path);
}

#[test]
fn json_format_output() {
    let out_path = scratch("solve.json");
    let out = run(&[
        "solve",
        "--config",
        presets_dir().join("c2_cao.json").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--format",
        "json",
        "--samples",
        "8",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["columns"][0], "tau");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 8);
    let _ = fs::remove_file(out_path);
}
