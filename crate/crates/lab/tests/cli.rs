use bergman_lab::table::CSV_HEADER;
use std::path::{Path, PathBuf};
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bergman-lab-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn run_writes_csv_metadata_and_svg() {
    let dir = scratch("run");
    let out = lab()
        .args(["run", shipped("ramadanov_ball.json").to_str().unwrap(), "--threads", "1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("ramadanov_ball.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert!(!csv.contains("wall"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("ramadanov_ball.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["threads"], 1);
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(meta["config"]["experiment"], "ramadanov");
    assert!(std::fs::read_to_string(dir.join("ramadanov_ball.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed");
    let run = |seed: &str| {
        let sub = dir.join(seed);
        let out = lab()
            .args(["run", shipped("invariance_ball.json").to_str().unwrap(), "--threads", "1", "--seed", seed, "--out"])
            .arg(&sub)
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read_to_string(sub.join("invariance_ball.csv")).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn every_shipped_config_validates() {
    for entry in std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let out = lab().arg("validate").arg(&path).output().unwrap();
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_config_exits_with_two() {
    let dir = scratch("invalid");
    let bad = write(
        &dir,
        "bad.json",
        r#"{"name": "bad", "experiment": "sandwich", "domain": {"kind": "unit_ball", "n": 2},
            "distances": [0.01, 0.1], "r": 0.25, "samples": 100}"#,
    );
    assert_eq!(lab().arg("validate").arg(&bad).status().unwrap().code(), Some(2));
    assert_eq!(lab().arg("run").arg(&bad).status().unwrap().code(), Some(2));
    let garbled = write(&dir, "garbled.json", "{ not json");
    assert_eq!(lab().arg("validate").arg(&garbled).status().unwrap().code(), Some(2));
    let missing = dir.join("missing.json");
    assert_eq!(lab().arg("validate").arg(&missing).status().unwrap().code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = scratch("numeric");
    // 5 samples cannot determine a 15-function basis
    let cfg = write(
        &dir,
        "under.json",
        r#"{"name": "under", "experiment": "klembeck",
            "domains": [{"kind": "ellipsoid", "n": 2, "coefficients": [1.0, 2.0]}],
            "kernel": {"kind": "model", "degree": 4, "plan": {"method": "quasi_mc", "points": 5}},
            "distances": [0.3], "directions": ["normal"], "epsilon": 0.1}"#,
    );
    let out = lab().arg("run").arg(&cfg).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_subcommand_reports_small_error() {
    for args in [vec!["oracle", "ball", "--n", "3"], vec!["oracle", "polydisc", "--radii", "1,0.5"]] {
        let out = lab().args(&args).output().unwrap();
        assert!(out.status.success());
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(report["max_error"].as_f64().unwrap() < 1e-8, "{report}");
    }
    assert_eq!(lab().args(["oracle", "polydisc", "--radii", "1,-1"]).status().unwrap().code(), Some(2));
}
