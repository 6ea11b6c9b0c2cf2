//! CLI acceptance: reproducing every catalog entry twice with the same seed
//! yields identical reports (timing excluded), and exit codes track verdicts.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nads"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("nads-test-{}-{name}", std::process::id()));
    p
}

fn strip_timing(mut v: Value) -> Value {
    if let Some(t) = v.get_mut("timing") {
        *t = serde_json::json!({ "wall_ms": 0 });
    }
    v
}

#[test]
fn criterion_11_cli_determinism_and_exit_codes() {
    let ids = [
        "full-shift",
        "shift-zigzag",
        "shift-3periodic",
        "alternating-inverse",
        "alternating-rotation",
        "circle-stretch",
        "collapsing-constants",
        "logistic-2periodic",
        "identity-interval",
    ];
    for id in ids {
        let mut reports = Vec::new();
        for run in 0..2 {
            let out = tmp(&format!("repro-{id}-{run}.json"));
            let status = bin()
                .args(["--repro", id, "--seed", "7", "--out"])
                .arg(&out)
                .status()
                .expect("spawn nads");
            assert!(status.success(), "repro {id} run {run} exited {status:?}");
            let text = fs::read_to_string(&out).unwrap();
            let report: Value = serde_json::from_str(&text).unwrap();
            // Exit code field must match the process exit and the verdicts.
            assert_eq!(report["exit_code"], 0, "{id}: expectations must all pass");
            let results = report["outcome"]["results"].as_array().unwrap();
            assert!(
                results.iter().all(|r| r["pass"] == Value::Bool(true)),
                "{id}"
            );
            reports.push(strip_timing(report));
            fs::remove_file(&out).ok();
        }
        assert_eq!(
            serde_json::to_string(&reports[0]).unwrap(),
            serde_json::to_string(&reports[1]).unwrap(),
            "{id}: reports differ between identical runs"
        );
    }
    println!("acceptance criterion 11: PASS — CLI repro deterministic for all catalog entries, exit codes match");
}

#[test]
fn exit_code_two_for_refuted_property() {
    let config = serde_json::json!({
        "schema": 1,
        "system": { "source": "catalog", "id": "identity-interval" },
        "experiment": {
            "kind": "property-check",
            "check": { "check": "transitive", "eps": 0.25, "horizon": 10, "samples_per_ball": 8, "seed": 0 }
        },
        "seed": 1
    });
    let path = tmp("refuted.json");
    fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    let status = bin()
        .args(["--config"])
        .arg(&path)
        .arg("--out")
        .arg(tmp("refuted-out.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    fs::remove_file(&path).ok();
    fs::remove_file(tmp("refuted-out.json")).ok();
}

#[test]
fn exit_code_three_for_not_found() {
    // Identity family cannot trace two far-apart targets.
    let config = serde_json::json!({
        "schema": 1,
        "system": { "source": "catalog", "id": "identity-interval" },
        "experiment": {
            "kind": "qsp",
            "x1": { "kind": "interval", "value": 0.1 },
            "x2": { "kind": "interval", "value": 0.9 },
            "n": 5,
            "eps": 0.2
        },
        "seed": 1,
        "budget": 300
    });
    let path = tmp("notfound.json");
    fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    let status = bin()
        .args(["--config"])
        .arg(&path)
        .arg("--out")
        .arg(tmp("notfound-out.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    fs::remove_file(&path).ok();
    fs::remove_file(tmp("notfound-out.json")).ok();
}

#[test]
fn verify_round_trip_and_csv() {
    let config = serde_json::json!({
        "schema": 1,
        "system": { "source": "catalog", "id": "full-shift" },
        "experiment": {
            "kind": "qsp",
            "x1": { "kind": "symbolic", "seq": { "word": "0", "offset": 0 } },
            "x2": { "kind": "symbolic", "seq": { "word": "1", "offset": 0 } },
            "n": 12,
            "eps": 0.5
        },
        "seed": 4
    });
    let cfg = tmp("qsp.json");
    let out = tmp("qsp-report.json");
    let csv = tmp("qsp.csv");
    fs::write(&cfg, serde_json::to_string(&config).unwrap()).unwrap();
    let status = bin()
        .args(["--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("series,step,value"));
    assert!(csv_text.lines().count() > 2, "expected orbit rows");
    // verify(run(c)) succeeds without searching.
    let status = bin().args(["--verify"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    for p in [cfg, out, csv] {
        fs::remove_file(p).ok();
    }
}

#[test]
fn shipped_configs_run() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).expect("configs directory") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        seen += 1;
        let out = tmp(&format!(
            "cfg-{}",
            path.file_name().unwrap().to_string_lossy()
        ));
        let status = bin()
            .args(["--config"])
            .arg(&path)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(
            matches!(status.code(), Some(0) | Some(2)),
            "{} must find its witness or refute cleanly, got {:?}",
            path.display(),
            status.code()
        );
        // Each shipped config's report must re-verify.
        let verify = bin().args(["--verify"]).arg(&out).status().unwrap();
        assert_eq!(
            verify.code(),
            Some(0),
            "{} failed verification",
            path.display()
        );
        fs::remove_file(&out).ok();
    }
    assert!(
        seen >= 5,
        "expected the shipped example configs, found {seen}"
    );
}

#[test]
fn config_errors_exit_one() {
    let path = tmp("broken.json");
    fs::write(&path, "{ not json").unwrap();
    let status = bin().args(["--config"]).arg(&path).status().unwrap();
    assert_eq!(status.code(), Some(1));
    fs::remove_file(&path).ok();
    let status = bin().args(["--repro", "no-such-system"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn threads_env_fallback_is_recorded() {
    let config = serde_json::json!({
        "schema": 1,
        "system": { "source": "catalog", "id": "identity-interval" },
        "experiment": {
            "kind": "property-check",
            "check": { "check": "transitive", "eps": 0.25, "horizon": 10, "samples_per_ball": 8, "seed": 0 }
        },
        "seed": 1
    });
    let path = tmp("threads.json");
    let out = tmp("threads-out.json");
    fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    let status = bin()
        .env("NADS_THREADS", "4")
        .args(["--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "refuted transitivity");
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["threads"], 4);
    // Bad values are rejected.
    let status = bin()
        .env("NADS_THREADS", "many")
        .args(["--config"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    fs::remove_file(&path).ok();
    fs::remove_file(&out).ok();
}

#[test]
fn system_flag_overrides_config() {
    let config = serde_json::json!({
        "schema": 1,
        "system": { "source": "catalog", "id": "full-shift" },
        "experiment": {
            "kind": "property-check",
            "check": { "check": "transitive", "eps": 0.5, "horizon": 20, "samples_per_ball": 8, "seed": 0 }
        },
        "seed": 1
    });
    let path = tmp("override.json");
    let out = tmp("override-out.json");
    fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();
    // Same config pointed at the alternating-inverse system: refuted, exit 2.
    let status = bin()
        .args(["--config"])
        .arg(&path)
        .args(["--system", "alternating-inverse", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["system"]["id"], "alternating-inverse");
    fs::remove_file(&path).ok();
    fs::remove_file(&out).ok();
}
