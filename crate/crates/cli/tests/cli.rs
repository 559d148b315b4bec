use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use symproj_core::symstate::{parse_state, PureState};

fn symproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symproj")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn projected(args: &[&str]) -> (PureState, f64) {
    let mut full = vec!["project"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let o = symproj(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let state: PureState = serde_json::from_value(v["state"].clone()).unwrap();
    (state, v["probability"].as_f64().unwrap())
}

#[test]
fn project_d4_gives_w3() {
    let (s, p) = projected(&["--state", "D4_2", "--qubit", "4", "--alpha", "0"]);
    assert!(s.fidelity(&parse_state("W3").unwrap()).unwrap() > 1.0 - 1e-12);
    assert!((p - 0.5).abs() < 1e-6);
}

#[test]
fn project_delta5_gives_ghz4_plus() {
    let (s, _) = projected(&["--state", "delta5:0.7071,1.5708", "--qubit", "5", "--alpha", "0.7071", "--eps", "-1.5708"]);
    assert!(s.fidelity(&parse_state("GHZ4+").unwrap()).unwrap() > 1.0 - 1e-8);
}

#[test]
fn project_product_state() {
    let (s, p) = projected(&["--state", "HH", "--qubit", "2", "--alpha", "1"]);
    assert!(s.fidelity(&parse_state("H").unwrap()).unwrap() > 1.0 - 1e-12);
    assert!((p - 1.0).abs() < 1e-12);
}

#[test]
fn project_text_output() {
    let o = symproj(&["project", "--state", "D4_2", "--qubit", "4", "--alpha", "0"]);
    let out = stdout(&o);
    assert!(out.contains("|HHV>") && out.contains("probability: 0.500000"), "{out}");
}

#[test]
fn annihilation_exits_3() {
    let o = symproj(&["project", "--state", "HH", "--qubit", "2", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec!["project", "--state", "HH", "--qubit", "3", "--alpha", "1"],
        vec!["project", "--state", "HH", "--qubit", "1", "--alpha", "1.5"],
        vec!["project", "--state", "nonsense", "--qubit", "1", "--alpha", "1"],
        vec!["project", "--state", "HH"],
        vec!["witness", "--target", "D4_2", "--offset", "1.2", "--state", "D4_2"],
        vec!["witness", "--target", "D4_2", "--offset", "2/3", "--state", "W3"],
        vec!["fidelity-sweep", "--target", "W5"],
        vec!["fidelity-sweep", "--target", "W4", "--eta-c", "1.5"],
        vec!["fidelity-sweep", "--target", "W4", "--zw-steps", "0"],
        vec!["tangle-sweep", "--samples", "1"],
        vec!["source-sim", "--pattern", "a,b,z"],
        vec!["nope"],
    ] {
        let o = symproj(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn witness_reports_json() {
    // Depolarized D4_2 with fidelity 0.844.
    let v = (0.844 - 1.0 / 16.0) / (1.0 - 1.0 / 16.0);
    let vis = v.to_string();
    let o = symproj(&["witness", "--target", "D4_2", "--offset", "2/3", "--state", "D4_2", "--visibility", &vis]);
    assert_eq!(o.status.code(), Some(0));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["target"], "D4_2");
    assert!((j["offset"].as_f64().unwrap() - 0.666667).abs() < 1e-9);
    assert!((j["value"].as_f64().unwrap() + 0.177333).abs() < 1e-6);
    assert_eq!(j["entangled"], true);
}

#[test]
fn witness_accepts_density_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let rho = symproj_core::symstate::DensityMatrix::maximally_mixed(4);
    fs::write(&path, serde_json::to_string(&rho).unwrap()).unwrap();
    let o = symproj(&["witness", "--target", "D4_2", "--offset", "0.5", "--state", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((j["value"].as_f64().unwrap() - 0.4375).abs() < 1e-9);
    assert_eq!(j["entangled"], false);
}

#[test]
fn tangle_sweep_csv() {
    let out = stdout(&symproj(&["tangle-sweep", "--samples", "5"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "theta,tau3");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[3], "0.785398,0.333333");
    let filtered = stdout(&symproj(&["tangle-sweep", "--samples", "5", "--filtered"]));
    assert_eq!(filtered.lines().nth(3), Some("0.785398,1.00000"));
}

#[test]
fn fidelity_sweep_csv_and_summary() {
    let o = symproj(&["fidelity-sweep", "--target", "W4", "--zw-min", "0.3", "--zw-max", "0.5", "--zw-steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("z_w,phi_w,fidelity,probability"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let f: f64 = fields[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("max fidelity") && err.contains("z_w=0.300000"), "{err}");
}

#[test]
fn fidelity_sweep_is_deterministic_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let args = ["fidelity-sweep", "--target", "GHZ4+", "--zw-steps", "4", "--phi-steps", "3", "--six-photons", "--eta-c", "0.5"];
    let a = symproj(&args);
    let b = symproj(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let c = symproj(&with_file);
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
    assert!(stdout(&c).starts_with("max fidelity"));
}

#[test]
fn invalid_sweep_writes_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = symproj(&["fidelity-sweep", "--target", "W4", "--n-max", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn config_file_replaces_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(&path, r#"{"state":"D4_2","qubit":4,"alpha":0,"format":"json"}"#).unwrap();
    let a = symproj(&["project", "--config", path.to_str().unwrap()]);
    let b = symproj(&["project", "--state", "D4_2", "--qubit", "4", "--alpha", "0", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let over = symproj(&["project", "--config", path.to_str().unwrap(), "--alpha", "1", "--format", "text"]);
    assert!(stdout(&over).contains("|HVV>"));

    let top = dir.path().join("w.json");
    fs::write(&top, r#"{"command":"witness","target":"W3","offset":"2/3","state":"W3"}"#).unwrap();
    let o = symproj(&["--config", top.to_str().unwrap()]);
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((j["value"].as_f64().unwrap() + 0.333333).abs() < 1e-9);

    fs::write(&path, r#"{"state":"D4_2","qubit":"four","alpha":0}"#).unwrap();
    assert_eq!(symproj(&["project", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(symproj(&["project", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn source_sim_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    fs::write(
        &path,
        r#"{"source":{"z_dc":0.17,"z_w":0.39,"phi_w":0,"wcb_polarization":"H"},
            "network":{"outputs":["a","b","c","d","e"],"weights":[]},
            "loss":{"eta_c":1,"eta_d":1},
            "pattern":["a","b","c","d","e"],
            "analysis":{"e":{"alpha":0,"herald":true}},
            "n_max":6,"photon_sector":5,"target":"W4"}"#,
    )
    .unwrap();
    let o = symproj(&["source-sim", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let closed = symproj_core::fock::f_w4_analytic(0.17, 0.39).unwrap();
    assert!((j["fidelity"].as_f64().unwrap() - closed).abs() < 1e-5);
    assert_eq!(j["n_qubits"], 4);
    assert_eq!(j["rho"].as_array().unwrap().len(), 16);

    fs::write(&path, r#"{"source":{"z_dc":0.17,"z_w":0.39},"pattern":["a"],"extra":1}"#).unwrap();
    assert_eq!(symproj(&["source-sim", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn source_sim_empty_postselection_exits_3() {
    let o = symproj(&["source-sim", "--z-w", "0", "--herald", "e:0"]);
    assert_eq!(o.status.code(), Some(3));
}
