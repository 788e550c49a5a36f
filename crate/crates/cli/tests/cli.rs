use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn doubleprobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doubleprobe")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn validate_reports_defects_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.csv", "label,a,b,c\na,0,1,4\nb,1,0,1\nc,4,1,0\n");
    let out = doubleprobe(&["validate", "--input", &ok]);
    assert!(out.status.success());
    let v = json(&out);
    let r = &v["results"][0]["result"];
    assert_eq!(r["quasi_constant"], 2.0);
    assert_eq!(r["is_metric"], false);
    assert!(r["bounds"]["quasi_constant"].as_str().unwrap().contains("lower bound"));

    let zero = write(dir.path(), "zero.csv", "label,a,b\na,0,0\nb,0,0\n");
    let out = doubleprobe(&["validate", "--input", &zero]);
    assert!(out.status.success());
    assert_eq!(json(&out)["results"][0]["result"]["positive_off_diagonal"], false);
    // Other analyses refuse the same table.
    let out = doubleprobe(&["metrize", "--input", &zero]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a valid quasimetric"));
}

#[test]
fn metrize_csv_is_the_chain_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "m.csv", "label,a,b,c\na,0,1,4\nb,1,0,1\nc,4,1,0\n");
    let out = doubleprobe(&["metrize", "--input", &path, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# 0 metrize");
    assert_eq!(lines[1], "label,a,b,c");
    // K = 2 gives q = 1/2; the chain a-b-c has length 2 = 4^(1/2).
    assert_eq!(lines[2], "a,0,1,2");
}

#[test]
fn metrize_refuses_large_samples() {
    let out = doubleprobe(&["metrize", "--space", r#"{"kind":"torus_grid","n":1,"j":11,"metric":"sup"}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("subsample"));
}

#[test]
fn packing_on_a_space_spec_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let out = doubleprobe(&[
        "packing",
        "--space",
        r#"{"kind":"torus_grid","n":2,"j":3,"metric":"sup"}"#,
        "--radii",
        "dyadic:1..3",
        "--exact",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json(&out)["results"][0]["result"];
    assert_eq!(r["counts"], serde_json::json!([4, 16, 64]));
    assert_eq!(r["exact"], serde_json::json!([true, true, true]));
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.contains("N̂≈2.0"));
}

#[test]
fn exact_cap_flag_is_honoured() {
    let out = doubleprobe(&[
        "packing",
        "--space",
        r#"{"kind":"cantor","level":5}"#,
        "--radii",
        "0.1",
        "--exact",
        "--cap",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 16"));
}

#[test]
fn doubling_on_measured_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "w.csv", "label,0,1,weight\n0,0,1,0.5\n1,1,0,0.5\n");
    let out = doubleprobe(&["doubling", "--input", &path, "--l", "1..4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1,0.5,1,0"));
    let zero = write(dir.path(), "z.csv", "label,0,1,weight\n0,0,1,0\n1,1,0,0\n");
    let out = doubleprobe(&["doubling", "--input", &zero]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn theorem2_preset_exponent() {
    let out = doubleprobe(&["theorem2", "--n", "3", "--j", "1..4", "--metric", "weighted_sum"]);
    assert!(out.status.success());
    let r = &json(&out)["results"][0]["result"];
    let sizes: Vec<u64> = r["rows"].as_array().unwrap().iter().map(|row| row["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![8, 64, 512, 4096]);
    assert!((r["fit"]["N"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn theorem2_custom_weights() {
    let out = doubleprobe(&["theorem2", "--n", "2", "--j", "1..2", "--metric", "bendikov", "--weights", "1,1"]);
    assert!(out.status.success());
    let rows = &json(&out)["results"][0]["result"]["rows"];
    assert_eq!(rows[0]["r_nj"], 0.5);
    let bad = doubleprobe(&["theorem2", "--n", "3", "--metric", "bendikov", "--weights", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn theorem3_reports_certificate() {
    let out = doubleprobe(&["theorem3", "--n", "1", "--j", "2", "--resolution", "32", "--tol", "1e-4"]);
    assert!(out.status.success());
    let r = &json(&out)["results"][0]["result"];
    assert_eq!(r["witnesses"].as_array().unwrap().len(), 4);
    assert_eq!(r["pass"], true);
    assert_eq!(r["exact_separated_count"], 4);
    assert_eq!(r["tol"], 1e-4);
}

#[test]
fn cantor_preset() {
    let out = doubleprobe(&["cantor", "--level", "10"]);
    assert!(out.status.success());
    let v = json(&out);
    let results = v["results"].as_array().unwrap();
    let masses = &results[0]["result"]["rows"];
    for (k, row) in masses.as_array().unwrap().iter().enumerate() {
        assert_eq!(row["min_mass"].as_f64().unwrap(), 0.5f64.powi(k as i32 + 1));
        assert_eq!(row["uniform"], true);
    }
    let exponent = results[1]["result"]["fit"]["N"].as_f64().unwrap();
    assert!((0.55..=0.72).contains(&exponent), "{exponent}");
    assert_eq!(results[2]["result"]["consistent_with_doubling"], true);
}

#[test]
fn run_with_empty_analyses() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "c.json", r#"{"space": {"kind": "cantor", "level": 3}, "analyses": []}"#);
    let out = doubleprobe(&["run", "--config", &path]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["config"]["space"]["kind"], "cantor");
    assert!(v["results"].as_array().unwrap().is_empty());
}

#[test]
fn run_writes_plot_directory() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let config = format!(
        r#"{{"space": {{"kind": "cantor", "level": 6}},
            "analyses": [{{"analysis": "packing", "radii": "dyadic:1..5"}},
                         {{"analysis": "doubling", "l": "1..5"}}],
            "output": {{"svg_dir": {:?}, "format": "csv"}}}}"#,
        plots.display().to_string()
    );
    let path = write(dir.path(), "c.json", &config);
    let out = doubleprobe(&["run", "--config", &path]);
    assert!(out.status.success());
    assert!(plots.join("0_packing.svg").exists());
    assert!(plots.join("1_doubling.svg").exists());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("# 0 packing"));
}

#[test]
fn invalid_config_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "c.json",
        r#"{"space": {"kind": "cantor", "level": 4},
            "analyses": [{"analysis": "doubling", "l": "1..4"}, {"analysis": "packing", "radii": "0,1"}]}"#,
    );
    let out = doubleprobe(&["run", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("analysis 1"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["cantor", "--level", "9"];
    let one =
        Command::new(env!("CARGO_BIN_EXE_doubleprobe")).args(args).env("DOUBLEPROBE_THREADS", "1").output().unwrap();
    let many =
        Command::new(env!("CARGO_BIN_EXE_doubleprobe")).args(args).env("DOUBLEPROBE_THREADS", "4").output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
    let bad =
        Command::new(env!("CARGO_BIN_EXE_doubleprobe")).args(args).env("DOUBLEPROBE_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
