use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn conicert(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conicert"))
        .current_dir(dir)
        .env_remove("SOURCE_DATE_EPOCH")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn statuses(cert: &Value) -> Vec<(String, String)> {
    cert["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_owned(), c["status"].as_str().unwrap().to_owned()))
        .collect()
}

#[test]
fn enantio_certify_passes_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let out = conicert(tmp.path(), &["certify", "--model", "enantio", "--out-dir", "out"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let path = tmp.path().join("out/certificate.json");
    let first = fs::read(&path).unwrap();

    let out = conicert(tmp.path(), &["certify", "--model", "enantio", "--out-dir", "out"]);
    assert_eq!(code(&out), 0);
    assert_eq!(first, fs::read(&path).unwrap(), "certificate differs on rerun");

    let cert = read_json(&path);
    assert_eq!(cert["summary"]["status"], "PASS");
    assert_eq!(cert["tool"], "conicert");
    assert_eq!(cert["timestamp"], "unset");
    assert_eq!(cert["seed"], 0);
    assert!(cert["config"]["v_bar"].is_number());
    assert!(cert["config"].get("N_trunc").is_none());
    let names: Vec<String> = statuses(&cert).into_iter().map(|(n, _)| n).collect();
    for want in ["simple_spectrum", "nonresonance", "couplings", "enantio_obstruction", "connectedness"] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
}

#[test]
fn seed_changes_certify_point() {
    let tmp = TempDir::new().unwrap();
    let a = conicert(tmp.path(), &["certify", "--model", "enantio", "--seed", "1", "--out-dir", "a"]);
    let b = conicert(tmp.path(), &["certify", "--model", "enantio", "--seed", "2", "--out-dir", "b"]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let la = read_json(&tmp.path().join("a/certificate.json"))["checks"][0]["location"].clone();
    let lb = read_json(&tmp.path().join("b/certificate.json"))["checks"][0]["location"].clone();
    assert_ne!(la, lb);
}

#[test]
fn timestamp_comes_from_config_or_environment() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("run.toml"), "model = \"enantio\"\ntimestamp = \"2024-01-01\"\n").unwrap();
    let out = conicert(tmp.path(), &["sweep", "--config", "run.toml", "--freeze-axis", "0,1", "--samples", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_json(&tmp.path().join("out/certificate.json"))["timestamp"], "2024-01-01");

    let out = Command::new(env!("CARGO_BIN_EXE_conicert"))
        .current_dir(tmp.path())
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .args(["sweep", "--model", "enantio", "--freeze-axis", "0,1", "--samples", "3", "--out-dir", "env"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&tmp.path().join("env/certificate.json"))["timestamp"], "1700000000");
}

#[test]
fn scan_writes_headed_csvs() {
    let tmp = TempDir::new().unwrap();
    let out = conicert(tmp.path(), &["scan", "--model", "enantio", "--grid-res", "20,10", "--out-dir", "s"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let eigen = fs::read_to_string(tmp.path().join("s/eigen.csv")).unwrap();
    let lines: Vec<&str> = eigen.lines().collect();
    assert!(lines[0].starts_with("# tool: conicert "));
    assert_eq!(lines[1], "# command: scan");
    assert!(lines[2].starts_with("# config: {"));
    let cfg: Value = serde_json::from_str(lines[2].trim_start_matches("# config: ")).unwrap();
    assert_eq!(cfg["grid"]["res"], serde_json::json!([20, 10]));
    assert_eq!(lines[3], "# seed: 0");
    assert!(lines[4].starts_with("# tolerances: {"));
    assert_eq!(lines[5], "u1,u2,lambda_1,lambda_2,lambda_3");
    assert_eq!(lines.len(), 6 + 200);
    for j in 1..=2 {
        let gap = fs::read_to_string(tmp.path().join(format!("s/gap_{j}.csv"))).unwrap();
        let rows: Vec<&str> = gap.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], format!("u1,u2,gap_{j}"));
        assert!(rows[1..].iter().all(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap() >= 0.0));
    }
}

#[test]
fn classify_finds_the_four_enantio_crossings() {
    let tmp = TempDir::new().unwrap();
    let out = conicert(tmp.path(), &["classify", "--model", "enantio", "--out-dir", "c"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&tmp.path().join("c/classify.json"));
    let recs = doc["records"].as_array().unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().all(|r| r["classification"] == "CONICAL"));
    let a = 8f64.sqrt();
    let b = 18f64.sqrt();
    assert!(recs.iter().any(|r| {
        let l = r["location"].as_array().unwrap();
        (l[0].as_f64().unwrap() - a).abs() < 1e-6 && (l[1].as_f64().unwrap() - b).abs() < 1e-6
    }));
}

#[test]
fn counterexample_sweeps_split_by_axis() {
    let tmp = TempDir::new().unwrap();
    let out = conicert(
        tmp.path(),
        &["sweep", "--model", "counterexample", "--freeze-axis", "0", "--freeze-axis", "1", "--samples", "8"],
    );
    assert_eq!(code(&out), 1);
    let cert = read_json(&tmp.path().join("out/certificate.json"));
    assert_eq!(cert["summary"]["status"], "FAIL");
    let checks = cert["checks"].as_array().unwrap();
    assert_eq!(checks[0]["witnesses"]["frozen_axes"], serde_json::json!([0]));
    assert_eq!(checks[0]["status"], "FAIL");
    assert_eq!(checks[0]["witnesses"]["passes"], 0);
    assert_eq!(checks[1]["witnesses"]["frozen_axes"], serde_json::json!([1]));
    assert_eq!(checks[1]["status"], "PASS");
}

const FLAT: &str = r#"
model = "custom"
drift = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 4.0]]
couplings = [
  [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
  [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
]
bounds = [[-1.0, 1.0], [-1.0, 1.0]]

[grid]
res = [10, 10]
"#;

#[test]
fn zero_couplings_have_no_intersections_and_fail() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("flat.toml"), FLAT).unwrap();
    let out = conicert(tmp.path(), &["classify", "--config", "flat.toml"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&tmp.path().join("out/classify.json"));
    assert!(doc["records"].as_array().unwrap().is_empty());

    let out = conicert(tmp.path(), &["certify", "--config", "flat.toml"]);
    assert_eq!(code(&out), 1);
    let st = statuses(&read_json(&tmp.path().join("out/certificate.json")));
    assert!(st.contains(&("simple_spectrum".into(), "PASS".into())));
    assert!(st.contains(&("couplings".into(), "FAIL".into())));
    assert!(st.contains(&("connectedness".into(), "FAIL".into())));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let cases: Vec<(&str, &str)> = vec![
        ("bad_model.toml", "model = \"nope\"\n"),
        ("unknown_key.toml", "model = \"enantio\"\ncolour = 3\n"),
        ("bad_tol.toml", "model = \"enantio\"\n[tolerances]\nrank = 0.5\n"),
        ("bad_tol_key.toml", "model = \"enantio\"\n[tolerances]\nrnak = 1e-8\n"),
        ("syntax.toml", "model = \n"),
    ];
    for (name, body) in cases {
        fs::write(tmp.path().join(name), body).unwrap();
        let out = conicert(tmp.path(), &["scan", "--config", name]);
        assert_eq!(code(&out), 2, "{name}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(code(&conicert(tmp.path(), &["scan"])), 2, "no model");
    assert_eq!(code(&conicert(tmp.path(), &["scan", "--config", "missing.toml"])), 2);
    assert_eq!(code(&conicert(tmp.path(), &["frobnicate"])), 2);
    assert_eq!(code(&conicert(tmp.path(), &["scan", "--model", "jc", "--grid-res", "x"])), 2);
    assert_eq!(code(&conicert(tmp.path(), &["sweep", "--model", "enantio"])), 2, "no axes");
    assert_eq!(code(&conicert(tmp.path(), &["propagate", "--model", "enantio"])), 2, "no schedule");
    // Invalid enantio energies are a model error, not a numerical one.
    fs::write(tmp.path().join("deg.toml"), "model = \"enantio\"\nE1 = 1.0\nE2 = 1.0\nE3 = 1.0\n").unwrap();
    assert_eq!(code(&conicert(tmp.path(), &["certify", "--config", "deg.toml"])), 2);
}

#[test]
fn propagate_pair_stays_unitary() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("sched.csv"),
        "t_start,t_end,u1,u2,u3\n0,0.5,0.5,0.2,0.1\n0.5,1.5,-0.3,0.4,0.9\n1.5,3,1.2,-0.7,0.0\n",
    )
    .unwrap();
    let out = conicert(tmp.path(), &["propagate", "--model", "enantio", "--schedule", "sched.csv"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("out/trajectory.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "t,p_1,p_2,p_3,mirror_p_1,mirror_p_2,mirror_p_3,fidelity,unitarity"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][7], 1.0);
    assert_eq!(rows[3][0], 3.0);
    for r in &rows {
        assert!((r[1..4].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((r[4..7].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r[8] < 1e-9);
    }
    // The mirror differs once the chiral coupling acts.
    assert!(rows[3][7] < 1.0 - 1e-6);
}

#[test]
fn propagate_rejects_gapped_schedule() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("gap.csv"), "t_start,t_end,u1,u2\n0,1,0,0\n1.5,2,0,0\n").unwrap();
    let out = conicert(tmp.path(), &["propagate", "--model", "counterexample", "--schedule", "gap.csv"]);
    assert_eq!(code(&out), 2);
}

// Slow: about 15 s in an optimised build.
#[test]
fn jc_certify_passes_at_n30() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("jc.toml"), "model = \"jc\"\nN_trunc = 30\n").unwrap();
    let out = conicert(tmp.path(), &["certify", "--config", "jc.toml"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert = read_json(&tmp.path().join("out/certificate.json"));
    let st = statuses(&cert);
    assert!(st.iter().all(|(_, s)| s == "PASS"), "{st:?}");
    let conn = cert["checks"].as_array().unwrap().iter().find(|c| c["name"] == "connectedness").unwrap();
    assert_eq!(conn["witnesses"]["levels_connected"], serde_json::json!([1, 2, 3, 4, 5, 6]));
}
