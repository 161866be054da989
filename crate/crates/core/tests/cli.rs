use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
        .current_dir(dir)
        .env_remove("BLASCHKE_LAB_OUT")
        .args(args)
        .output()
        .unwrap()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn writes_csv_and_manifest_to_out() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let r = lab(tmp.path(), &["--out", out.to_str().unwrap(), "generate", "--gen", "radial:0.5,5"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = read(out.join("generate.csv"));
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("index,n,k,re,im,gap,theta_rad"));
    let m: Value = serde_json::from_str(&read(out.join("generate.manifest.json"))).unwrap();
    assert_eq!(m["command"], "generate");
    assert_eq!(m["config"]["gen"], "radial:0.5,5");
}

#[test]
fn env_var_sets_default_out_and_flag_overrides_it() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("env");
    let r = Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
        .current_dir(tmp.path())
        .env("BLASCHKE_LAB_OUT", &env_dir)
        .args(["conjugate", "--shape", "power:2"])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert!(env_dir.join("conjugate.csv").exists());
    assert!(!tmp.path().join("conjugate.csv").exists());

    let flag_dir = tmp.path().join("flag");
    let r = Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
        .current_dir(tmp.path())
        .env("BLASCHKE_LAB_OUT", &env_dir)
        .args(["--out", flag_dir.to_str().unwrap(), "orlicz-norm", "--weight", "indicator:0.5"])
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert!(flag_dir.join("orlicz-norm.csv").exists());
    assert!(!env_dir.join("orlicz-norm.csv").exists());
}

#[test]
fn manifest_reruns_to_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let r = lab(tmp.path(), &["--out", a.to_str().unwrap(), "carleson", "--gen", "pairs:20:radial:0.5,4"]);
    assert_eq!(r.status.code(), Some(0));
    let manifest = a.join("carleson.manifest.json");
    let r = lab(tmp.path(), &["--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap(), "carleson"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(read(a.join("carleson.csv")), read(b.join("carleson.csv")));
    assert_eq!(read(a.join("carleson.manifest.json")), read(b.join("carleson.manifest.json")));
}

#[test]
fn bad_input_exits_2_with_json_error() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["generate", "--gen", "spiral:1,2"][..],
        &["generate"][..],
        &["carleson", "--gen", "radial:0.5,4", "--threshold", "3"][..],
        &["no-such-command"][..],
    ] {
        let r = lab(tmp.path(), args);
        assert_eq!(r.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_str(String::from_utf8_lossy(&r.stderr).trim()).unwrap();
        assert!(err["error"].is_string() && err["message"].is_string());
    }
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"schema_version":1,"gen":"radial:0.5,3","bogus":1}"#).unwrap();
    let r = lab(tmp.path(), &["--config", cfg.to_str().unwrap(), "generate"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn strict_turns_undecided_into_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--out", tmp.path().to_str().unwrap(), "carleson", "--gen", "section6:1,6"];
    assert_eq!(lab(tmp.path(), &args).status.code(), Some(0));
    let mut strict = vec!["--strict"];
    strict.extend(args);
    let r = lab(tmp.path(), &strict);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).starts_with("undecided"));
    // a decided verdict is unaffected
    let r = lab(tmp.path(), &["--strict", "--out", tmp.path().to_str().unwrap(), "carleson", "--gen", "radial:0.5,10"]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for t in ["1", "4"] {
        let d = tmp.path().join(t);
        let r = lab(tmp.path(), &["--threads", t, "--out", d.to_str().unwrap(), "phi-lambda", "--gen", "section6:1,7"]);
        assert_eq!(r.status.code(), Some(0));
        csv.push(read(d.join("phi-lambda.csv")));
    }
    assert_eq!(csv[0], csv[1]);
}
