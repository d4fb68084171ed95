use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_entropy-count"));
    cmd.env_remove("ENTROPY_COUNT_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, String) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    (serde_json::from_str(text.trim_end()).unwrap(), text)
}

#[test]
fn count_regular_graph_with_exact() {
    let (v, _) = json(&["count", "--degrees", "3,3,3,3,3,3,3,3", "--exact", "--json"]);
    assert_eq!(v["exact"]["count"], "19355");
    let ln_exact = v["exact"]["ln"].as_f64().unwrap();
    assert!((ln_exact - 9.87).abs() < 0.01);
    let err = v["edgeworth_error"].as_f64().unwrap();
    assert!((err - 0.06).abs() <= 0.02, "edgeworth error {err}");
    assert_eq!(v["model"], "graph");
}

#[test]
fn count_three_by_three_hundreds_exact() {
    let (v, _) = json(&["count", "--rows", "100,100,100", "--cols", "100,100,100", "--exact", "--json"]);
    assert_eq!(v["exact"]["count"], "13268976");
    assert_eq!(v["model"], "table");
    assert_eq!(v["dim"], 5);
}

#[test]
fn odd_degree_sum_counts_zero() {
    let o = run(&["count", "--degrees", "1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("count") && l.trim_end().ends_with(" 0")));
    let (v, _) = json(&["count", "--degrees", "1,1,1", "--json"]);
    assert_eq!(v["count"], "0");
}

#[test]
fn oracle_small_instances() {
    for (args, expect) in [
        (vec!["oracle", "--rows", "2,2", "--cols", "2,2", "--json"], "3"),
        (vec!["oracle", "--degrees", "2,2,2", "--json"], "1"),
        (vec!["oracle", "--degrees", "1,1,1,1", "--json"], "3"),
    ] {
        let (v, _) = json(&args);
        assert_eq!(v["count"], expect, "{args:?}");
    }
    let o = run(&["oracle", "--rows", "2,2", "--cols", "2,2"]);
    assert!(stdout(&o).contains("count             3"));
}

#[test]
fn json_round_trips_byte_identical() {
    for args in [
        vec!["count", "--degrees", "4,4,4,4,3,3,3,3", "--exact", "--json", "--mc-samples", "2000"],
        vec!["count", "--rows", "3,5,2", "--cols", "4,6", "--json"],
        vec!["oracle", "--rows", "3,5,2", "--cols", "4,6", "--json"],
        vec!["diag", "--degrees", "4,4,4,4,3,3,3,3", "--json"],
        vec!["diag", "--rows", "6,6", "--cols", "4,4,4", "--json"],
    ] {
        let (v, text) = json(&args);
        let again = serde_json::to_string(&v).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
        assert_eq!(text.lines().count(), 1);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["count", "--rows", "7,3,5", "--cols", "5,5,5", "--exact", "--mc-samples", "5000", "--seed", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn six_significant_figures_in_text() {
    let o = run(&["count", "--degrees", "3,3,3,3,3,3,3,3", "--exact"]);
    let text = stdout(&o);
    assert!(text.contains("ln exact          9.87071"), "{text}");
    assert!(text.contains("kappa3            2.30159"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "--rows", "1,2"]).status.code(), Some(1));
    assert_eq!(run(&["count", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["repro", "4"]).status.code(), Some(1));
    assert_eq!(run(&["count"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["count", "--rows", "1,2", "--cols", "2,2"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--degrees", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--rows", "1.5,1.5", "--cols", "3"]).status.code(), Some(2));
    // degrees on the boundary of the degree polytope have no interior fit
    assert_eq!(run(&["count", "--degrees", "2,1,1,3,1"]).status.code(), Some(3));
    assert_eq!(run(&["count", "--rows", "7,3,5", "--cols", "5,5,5", "--max-iter", "0"]).status.code(), Some(3));
    let o = bin()
        .args(["oracle", "--rows", "5,5,5", "--cols", "5,5,5"])
        .env("ENTROPY_COUNT_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5));
    let o = bin()
        .args(["oracle", "--rows", "5,5", "--cols", "5,5"])
        .env("ENTROPY_COUNT_BUDGET", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn instance_file_with_options() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"rows": [2, 2], "cols": [2, 2], "options": {{"oracle": true, "tol": 1e-11}}}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let (v, _) = json(&["count", "--input", path, "--json"]);
    assert_eq!(v["exact"]["count"], "3");
    assert_eq!(v["instance"]["rows"], serde_json::json!([2.0, 2.0]));

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, r#"{{"rows": [2, 2], "degrees": [1, 1, 1, 1]}}"#).unwrap();
    let o = run(&["count", "--input", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn diag_reports_closed_forms() {
    let (v, _) = json(&["diag", "--degrees", "3,3,3,3,3,3,3,3", "--json"]);
    let general = v["summary"]["kappa3"].as_f64().unwrap();
    let closed = v["closed_form"]["kappa3"].as_f64().unwrap();
    assert!((general - closed).abs() < 1e-9 * closed);
    assert!((v["closed_form"]["printed_kappa3"].as_f64().unwrap() - 0.026420).abs() < 2e-6);

    let (v, _) = json(&["diag", "--degrees", "4,4,4,4,3,3,3,3", "--json"]);
    let dense = v["summary"]["log_det_v"].as_f64().unwrap();
    let closed = v["closed_form"]["log_det_v"].as_f64().unwrap();
    assert!((dense - closed).abs() < 1e-9 * dense.abs());

    let (v, _) = json(&["diag", "--rows", "12,12,12", "--cols", "9,9,9,9", "--json"]);
    let dense = v["summary"]["log_det_v"].as_f64().unwrap();
    let closed = v["closed_form"]["log_det_v"].as_f64().unwrap();
    assert!((dense - closed).abs() < 1e-9 * dense.abs());

    let o = run(&["diag", "--rows", "3,300", "--cols", "150,153"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("warning:"));
}

#[test]
fn repro_exit_code_matches_status_lines() {
    for table in ["1", "2", "3"] {
        let o = run(&["repro", table]);
        let text = stdout(&o);
        let any_fail = text.lines().any(|l| l.contains("| FAIL"));
        let expect = if any_fail { 4 } else { 0 };
        assert_eq!(o.status.code(), Some(expect), "table {table}\n{text}");
        assert!(text.contains(&format!("table {table}: ")));
    }
}

#[test]
fn repro_table3_rows() {
    let o = run(&["repro", "3"]);
    let text = stdout(&o);
    for label in ["44443333", "666666555555", "77777774444444"] {
        assert_eq!(text.lines().filter(|l| l.starts_with(label)).count(), 1, "{label}");
    }
    assert!(text.contains("info: 7^6 4^6"));
}

#[test]
fn repro_table1_excludes_long_table() {
    let text = stdout(&run(&["repro", "1"]));
    let row = text.lines().find(|l| l.trim_start().starts_with("3  49")).unwrap();
    assert!(row.ends_with("excluded (aspect_ratio warning)"), "{row}");
}

#[test]
fn repro_table2_marks_estimated_rows() {
    let text = stdout(&run(&["repro", "2"]));
    assert_eq!(text.lines().filter(|l| l.ends_with("reference-only")).count(), 2);
    assert_eq!(text.lines().filter(|l| l.contains("(published exact)")).count(), 20);
}
