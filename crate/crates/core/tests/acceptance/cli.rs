use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relphase"));
    cmd.env_remove("RELPHASE_OUTPUT_DIR");
    cmd
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn list_scenarios_names_all_seven() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in [
        "two_slit",
        "precession_consistency",
        "reproduction_sweep",
        "negativity_map",
        "conditioning_demo",
        "inference_search",
        "axiom_audit",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn validate_echoes_the_resolved_config() {
    let out = bin().arg("validate").arg(config("two_slit.conf")).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("expected_gap = -0.5"));
    assert!(text.contains("normalization = \"unit_trace\""));
}

#[test]
fn validate_reports_positions_and_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "bad.conf", "scenario = \"two_slit\"\n[system]\nrho = {\"dim\": 2, \"re\": [0.9, 0, 0, 0], \"im\": [0, 0, 0, 0], \"role\": \"density\"}\ngrid = [0, 1\n");
    let out = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("bad.conf:4:"), "{err}");

    let p = write(tmp.path(), "trace.conf", "scenario = \"two_slit\"\n[system]\nrho = {\"dim\": 2, \"re\": [0.9, 0, 0, 0], \"im\": [0, 0, 0, 0], \"role\": \"density\"}\n");
    let out = bin().arg("validate").arg(&p).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("trace.conf:3:") && stderr(&out).contains("density"), "{}", stderr(&out));

    let out = bin().arg("validate").arg(tmp.path().join("missing.conf")).output().unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn run_writes_outputs_and_a_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["run", "--output-dir"]).arg(tmp.path()).arg(config("two_slit.conf")).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tmp.path().join("two_slit");
    let m = manifest(&dir);
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["seed"], 0);
    let outputs = m["outputs"].as_array().unwrap();
    let listed: Vec<&str> = outputs.iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert_eq!(listed, ["two_slit.json", "resolved.conf"]);
    for o in outputs {
        let bytes = fs::read(dir.join(o["file"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
        assert_eq!(o["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    let resolved = fs::read(dir.join("resolved.conf")).unwrap();
    assert_eq!(m["config_sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&resolved)));
    let report: Value = serde_json::from_slice(&fs::read(dir.join("two_slit.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["additivity_gap"], -0.5);
    assert!(m["timings"]["execute_ms"].as_f64().is_some());
}

#[test]
fn failed_assertion_exits_2_and_keeps_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "gap.conf", "scenario = \"two_slit\"\n[assert]\nexpected_gap = -0.4999999999\n");
    let out = bin().args(["run", "--output-dir"]).arg(tmp.path()).arg(&p).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL additivity_gap"));
    assert_eq!(manifest(&tmp.path().join("two_slit"))["passed"], false);

    let out = bin().args(["run", "--tolerance-scale", "1e3", "--output-dir"]).arg(tmp.path()).arg(&p).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let resolved = fs::read_to_string(tmp.path().join("two_slit/resolved.conf")).unwrap();
    assert!(resolved.contains("tolerance = 1e-9"), "{resolved}");
}

#[test]
fn config_errors_exit_1_and_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let p = write(tmp.path(), "bad.conf", "scenario = \"two_slit\"\n[params]\nscreen_time = 0.5\n");
    let out = bin().args(["run", "--output-dir"]).arg(&out_dir).arg(&p).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("bad.conf:3:"), "{}", stderr(&out));
    assert!(!out_dir.exists());

    let good = config("two_slit.conf");
    let out = bin().args(["run", "--tolerance-scale", "0", "--output-dir"]).arg(&out_dir).arg(&good).output().unwrap();
    assert_eq!(code(&out), 1);
    let out = bin().args(["run", "--format", "yaml"]).arg(&good).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(!out_dir.exists());
}

#[test]
fn environment_sets_the_default_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().env("RELPHASE_OUTPUT_DIR", tmp.path()).arg("run").arg(config("conditioning_demo.conf")).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(tmp.path().join("conditioning_demo/manifest.json").exists());
}

#[test]
fn seed_and_format_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--seed", "42", "--format", "csv", "--output-dir"])
        .arg(tmp.path())
        .arg(config("conditioning_demo.conf"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tmp.path().join("conditioning_demo");
    assert_eq!(manifest(&dir)["seed"], 42);
    assert_eq!(manifest(&dir)["format"], "csv");
    assert!(dir.join("conditioning_demo.csv").exists());
    assert!(fs::read_to_string(dir.join("resolved.conf")).unwrap().contains("seed = 42"));

    let out = bin().args(["run", "--seed", "43", "--output-dir"]).arg(tmp.path().join("b")).arg(config("conditioning_demo.conf")).output().unwrap();
    assert_eq!(code(&out), 0);
    let a = fs::read(dir.join("resolved.conf")).unwrap();
    let b = fs::read(tmp.path().join("b/conditioning_demo/resolved.conf")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn expected_failures_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, check) in [("inference_search.conf", "FAIL re_d_alpha_gamma_bound"), ("axiom_audit.conf", "FAIL axiom_7")] {
        let out = bin().args(["run", "--output-dir"]).arg(tmp.path()).arg(config(name)).output().unwrap();
        assert_eq!(code(&out), 2, "{name}");
        assert!(stdout(&out).contains(check), "{}", stdout(&out));
    }
}

#[test]
fn kernel_binary_matches_its_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write(tmp.path(), "r.conf", "scenario = \"reproduction_sweep\"\nseed = 4\n[params]\nhistories = 3\nmax_order = 3\n");
    let out = bin().args(["run", "--output-dir"]).arg(tmp.path()).arg(&p).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let dir = tmp.path().join("reproduction_sweep");
    for space in ["sphere", "torus"] {
        let bytes = fs::read(dir.join(format!("w_{space}.bin"))).unwrap();
        let side: Value = serde_json::from_slice(&fs::read(dir.join(format!("w_{space}.json"))).unwrap()).unwrap();
        let shape: Vec<u64> = side["shape"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        let entries = side["entries"].as_u64().unwrap();
        assert_eq!(shape.iter().product::<u64>(), entries);
        assert_eq!(bytes.len() as u64, 16 * entries);
        let rank = side["times_fwd"].as_array().unwrap().len() + side["times_bwd"].as_array().unwrap().len();
        assert_eq!(shape.len(), rank);
    }
}

#[test]
fn text_and_csv_outputs_are_plain() {
    let tmp = tempfile::tempdir().unwrap();
    let p = config("precession_consistency.conf");
    for (format, file) in [("text", "precession_consistency.txt"), ("csv", "precession_consistency.csv")] {
        let out = bin().args(["run", "--format", format, "--output-dir"]).arg(tmp.path().join(format)).arg(&p).output().unwrap();
        assert_eq!(code(&out), 0);
        let body = fs::read_to_string(tmp.path().join(format).join("precession_consistency").join(file)).unwrap();
        match format {
            "csv" => assert!(body.starts_with("row,col,label_row,label_col,re,im\n")),
            _ => assert!(body.contains("PASS expect_full")),
        }
    }
}
