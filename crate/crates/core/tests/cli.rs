use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar"))
        .args(args)
        .env_remove("CSTAR_EPS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn generate_is_deterministic() {
    let a = cstar(&["generate", "--shape", "diamond", "--dims", "2,3,3,4", "--seed", "5"]);
    let b = cstar(&["generate", "--shape", "diamond", "--dims", "2,3,3,4", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = cstar(&["generate", "--shape", "diamond", "--dims", "2,3,3,4", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn suite_all_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (p, q) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&p, &q] {
        let out = cstar(&[
            "suite-all",
            "--seed",
            "3",
            "--trials",
            "10",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (fs::read(&p).unwrap(), fs::read(&q).unwrap());
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["stages"].as_array().unwrap().len(), 7);
}

#[test]
fn scaled_witness_fails_contractivity_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut sys = json_of(&cstar(&["generate", "--dims", "2,3,4"]));
    let w = &mut sys["edges"][0]["W"];
    for part in ["re", "im"] {
        for x in w[part].as_array_mut().unwrap() {
            *x = Value::from(x.as_f64().unwrap() * 3.0);
        }
    }
    let path = write(dir.path(), "broken.json", &sys);
    let out = cstar(&["verify", "--in", &path, "--trials", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let report = json_of(&out);
    let failing: Vec<&str> = report["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["anchor"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"contractive-embedding"), "{failing:?}");
}

#[test]
fn verify_passes_on_generated_system() {
    let dir = tempfile::tempdir().unwrap();
    let sys = json_of(&cstar(&["generate", "--shape", "vee", "--dims", "2,3,4"]));
    let path = write(dir.path(), "vee.json", &sys);
    let out = cstar(&["verify", "--in", &path, "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    let ids: Vec<&str> = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    assert!(ids.contains(&"r1") && ids.contains(&"r2"));
}

#[test]
fn usage_and_input_errors_exit_1() {
    assert_eq!(cstar(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        cstar(&["verify", "--in", "/nonexistent/system.json"]).status.code(),
        Some(1)
    );
    assert_eq!(
        cstar(&["generate", "--shape", "vee", "--dims", "2,3"]).status.code(),
        Some(1)
    );
    let bad_eps = Command::new(env!("CARGO_BIN_EXE_cstar"))
        .args(["generate"])
        .env("CSTAR_EPS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_eps.status.code(), Some(1));
}

#[test]
fn rigged_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = json_of(&cstar(&["rigged", "build", "--dim", "3", "--weights", "4"]));
    let path = write(dir.path(), "model.json", &model);
    let eq = cstar(&["rigged", "thm35", "--in", &path, "--trials", "4"]);
    assert_eq!(eq.status.code(), Some(0));
    let exported = json_of(&cstar(&["rigged", "export", "--in", &path]));
    let sys = write(dir.path(), "exported.json", &exported);
    assert_eq!(cstar(&["verify", "--in", &sys, "--trials", "5"]).status.code(), Some(0));
    assert_eq!(
        cstar(&["order", "suite", "--in", &sys, "--trials", "5"]).status.code(),
        Some(0)
    );
}

#[test]
fn representation_files_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sys = json_of(&cstar(&["generate", "--dims", "2,3,4"]));
    let sys_path = write(dir.path(), "sys.json", &sys);
    let rep = json_of(&cstar(&["rep", "identity", "--in", &sys_path]));
    let rep_path = write(dir.path(), "rep.json", &rep);
    let out = cstar(&["rep", "verify", "--in", &rep_path, "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(cstar(&["rep", "bound-suite", "--in", &rep_path]).status.code(), Some(0));
}
