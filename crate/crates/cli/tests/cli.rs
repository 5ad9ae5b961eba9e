use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarlab"))
}

fn write_spec(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polarlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const HHAT2: &str = r#"{"dimension":1,"class":{"s":2},"family":{"kind":"hhat_power","s_exponent":2}}"#;
const BOX1: &str = r#"{"dimension":1,"class":{"s":1},"family":{"kind":"polytope_indicator","vertices":[[-1],[1]]}}"#;

#[test]
fn phi_of_hhat_is_kappa() {
    let spec = write_spec("hhat2.json", HHAT2);
    let out = run(&["phi", "--spec", spec.to_str().unwrap(), "--s", "2", "--z", "0", "--oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 4.0 / 3.0).abs() < 1e-9);
    assert!(v["relative_difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn interval_region_radii() {
    let spec = write_spec("box1.json", BOX1);
    let out = run(&["region", "--spec", spec.to_str().unwrap(), "--s", "1", "--t", "2", "--rays", "64"]);
    assert!(out.status.success());
    let want = (1.0 - 4.0 / std::f64::consts::PI.powi(2)).sqrt();
    for r in json(&out)["radii"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - want).abs() < 1e-4);
    }
    let csv = run(&["--format", "csv", "region", "--spec", spec.to_str().unwrap(), "--s", "1", "--t", "2"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("direction,radius\n") && text.lines().count() == 3);
}

#[test]
fn schema_violation_exits_2_with_paths() {
    let spec = write_spec("bad.json", r#"{"class":"log","family":{"kind":"gaussian","center":[0],"sigma":1}}"#);
    let out = run(&["integrate", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "schema");
    assert_eq!(err["violations"][0]["path"], "/dimension");
}

#[test]
fn input_errors_exit_2() {
    let spec = write_spec("box1b.json", BOX1);
    let p = spec.to_str().unwrap();
    assert_eq!(run(&["phi", "--spec", p, "--s", "1", "--z", "3"]).status.code(), Some(2));
    assert_eq!(run(&["phi", "--spec", p, "--s", "-1", "--z", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--spec", "/nonexistent.json", "--z", "0"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--spec", p, "--z", "0", "--bogus"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_across_threads() {
    let dir = std::env::temp_dir().join(format!("polarlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.jsonl");
    let b = dir.join("b.jsonl");
    let r1 = run(&["--threads", "1", "verify", "--suite", "onedim", "--seed", "7", "--out", a.to_str().unwrap()]);
    assert!(r1.status.success());
    let r2 = bin()
        .env("POLARLAB_SEED", "7")
        .args(["--threads", "4", "verify", "--suite", "onedim", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(r2.status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let last = String::from_utf8(ta).unwrap().lines().last().unwrap().to_string();
    let summary: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(summary["failed"], 0);
}

#[test]
fn santalo_hyperplane_report() {
    let spec = write_spec("box1c.json", BOX1);
    let out = run(&["santalo-point", "--spec", spec.to_str().unwrap(), "--s", "1", "--hyperplane", "1,0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["report"]["product"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-9);
    let out = run(&["santalo-point", "--spec", spec.to_str().unwrap(), "--s", "1"]);
    let z = json(&out)["result"]["z_star"][0].as_f64().unwrap();
    assert!(z.abs() < 1e-6);
}

#[test]
fn lifted_region_membership() {
    let spec = write_spec("hhat2b.json", HHAT2);
    let out = run(&["region", "--spec", spec.to_str().unwrap(), "--s", "2", "--t", "1", "--z", "0,0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["membership"]["member"], true);
}
