use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn swan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn specs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SINGLE_USER: &str = r#"{
    "num_segments": 10, "segment_length_m": 1.0, "first_feed_m": -5.0,
    "users": [{"x_m": 1.3, "y_m": 2.0, "power_dbm": 10.0}]
}"#;

#[test]
fn single_user_ps_tdma_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", SINGLE_USER);
    let out = swan(&["eval", "--config", &cfg, "--protocol", "SS", "--scheme", "PS-TDMA"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let lambda = 299_792_458.0 / 28e9;
    let eta = lambda * lambda / (16.0 * std::f64::consts::PI.powi(2));
    let d_k = 3.0f64.powi(2) + 2.0f64.powi(2);
    let expect = (1.0 + 0.01 * eta / (1e-12 * d_k)).log2();
    let got = v["report"]["sum_rate"].as_f64().unwrap();
    assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    assert_eq!(v["report"]["protocol"], "SS");
    assert_eq!(v["placements"][0]["segment"], 6);
    assert_eq!(v["placements"][0]["position"], 1.3);
}

#[test]
fn every_protocol_and_scheme_runs() {
    let cfg = specs_dir().join("scenario.json");
    let cfg = cfg.to_str().unwrap();
    for protocol in ["SS", "SA", "PASS"] {
        for scheme in ["PS-TDMA", "PM-TDMA", "NOMA"] {
            let out = swan(&["eval", "--config", cfg, "--protocol", protocol, "--scheme", scheme, "--grid-q", "300"]);
            assert!(out.status.success(), "{protocol} {scheme}");
            let v = json(&out);
            assert!(v["report"]["sum_rate"].as_f64().unwrap() > 0.0);
            assert_eq!(v["report"]["scheme"], scheme);
        }
    }
}

#[test]
fn malformed_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", "{ not json");
    let out = swan(&["eval", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let cfg = write(&dir, "neg.json", &SINGLE_USER.replace("\"segment_length_m\": 1.0", "\"segment_length_m\": -1.0"));
    assert_eq!(swan(&["eval", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(swan(&["eval", "--config", &cfg, "--scheme", "FDMA"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_4() {
    let out = swan(&["eval", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn infeasible_placement_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", SINGLE_USER);
    // −0.001 and 0.001 m sit on neighbouring segments but closer than λ/2.
    let mut positions: Vec<f64> = (0..10).map(|m| -4.5 + m as f64).collect();
    positions[4] = -0.001;
    positions[5] = 0.001;
    let placement = serde_json::json!({"protocol": "sa", "positions": positions}).to_string();
    let p = write(&dir, "p.json", &placement);
    let out = swan(&["eval", "--config", &cfg, "--placement", &p, "--protocol", "SA", "--scheme", "NOMA"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    positions[4] = -0.5;
    let placement = serde_json::json!({"protocol": "sa", "positions": positions}).to_string();
    let p = write(&dir, "ok.json", &placement);
    let out = swan(&["eval", "--config", &cfg, "--placement", &p, "--protocol", "SA", "--scheme", "NOMA"]);
    assert!(out.status.success());

    let outside = write(&dir, "out.json", r#"{"protocol": "ss", "segment": 2, "position": 4.0}"#);
    let out = swan(&["eval", "--config", &cfg, "--placement", &outside]);
    assert_eq!(out.status.code(), Some(3));
}

fn small_spec(dir: &TempDir) -> String {
    write(
        dir,
        "spec.json",
        r#"{"trials": 4, "grid_points": 200, "seed": 5, "kappa_db_per_m": 0.08,
            "sweep": {"type": "dx_sweep", "values": [10, 20], "segment_length_m": 1.0}}"#,
    )
}

#[test]
fn sweep_is_byte_identical_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let spec = small_spec(&dir);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let j = dir.path().join("a.json");
    assert!(swan(&["sweep", "--spec", &spec, "--out", a.to_str().unwrap(), "--json", j.to_str().unwrap()])
        .status
        .success());
    assert!(swan(&["sweep", "--spec", &spec, "--out", b.to_str().unwrap(), "--threads", "1"])
        .status
        .success());
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("sweep_param,value,protocol,scheme,mean_rate_bps_hz,stderr,trials\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 9);
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(j).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 18);

    let other = swan(&["sweep", "--spec", &spec, "--seed", "6"]);
    assert!(other.status.success());
    assert_ne!(other.stdout, a);
}

#[test]
fn sweep_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let spec = small_spec(&dir);
    let out = swan(&["sweep", "--spec", &spec, "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let bad = write(
        &dir,
        "bad.json",
        r#"{"sweep": {"type": "dx_sweep", "values": [10.5], "segment_length_m": 1.0}}"#,
    );
    assert_eq!(swan(&["sweep", "--spec", &bad]).status.code(), Some(2));
    assert_eq!(swan(&["sweep", "--spec", &spec, "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn shipped_lossy_side_length_spec_has_both_architectures() {
    let spec = specs_dir().join("side_length_lossy.json");
    let out = swan(&["sweep", "--spec", spec.to_str().unwrap(), "--trials", "2", "--grid-q", "200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains(",PASS,")));
    assert!(text.lines().any(|l| l.contains(",SS,")));
}

#[test]
fn convergence_csv_is_non_decreasing() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "conv.json",
        r#"{"trials": 4, "grid_points": 300, "seed": 3,
            "arms": [{"protocol": "SA", "scheme": "PM-TDMA"}, {"protocol": "SA", "scheme": "NOMA"}],
            "sweep": {"type": "convergence", "num_segments": 10, "segment_length_m": 1.0}}"#,
    );
    let out = swan(&["sweep", "--spec", &spec]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for scheme in ["PM-TDMA", "NOMA"] {
        let means: Vec<f64> = text
            .lines()
            .skip(1)
            .filter(|l| l.split(',').nth(3) == Some(scheme))
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect();
        assert!(means.len() >= 2);
        assert!(means.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn kappa_eval_re_evaluates_the_lossless_design() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", r#"{"users": [{"x_m": 12.4, "y_m": 2.0, "power_dbm": 10.0}]}"#);
    let base = json(&swan(&["eval", "--config", &cfg]));
    let lossy = json(&swan(&["eval", "--config", &cfg, "--kappa-eval", "0.08"]));
    assert_eq!(base["placements"], lossy["placements"]);
    assert_eq!(base["placements"][0]["segment"], 37);
    let (a, b) = (base["report"]["sum_rate"].as_f64().unwrap(), lossy["report"]["sum_rate"].as_f64().unwrap());
    assert!(b < a, "{b} vs {a}");
    assert_eq!(swan(&["eval", "--config", &cfg, "--kappa-eval", "-1"]).status.code(), Some(2));
}
