use std::path::PathBuf;
use std::process::{Command, Output};

use qentropy::cli::strip_timing;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qentropy"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn entropy_of_maximally_mixed_state() {
    let o = bin().args(["entropy", "--state", "mixed:4"]).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("1.386294361120"), "{}", stdout(&o));
}

#[test]
fn bits_unit() {
    let o = bin().args(["--units", "bits", "entropy", "--state", "mixed:4"]).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("2.000000000000"), "{}", stdout(&o));
}

#[test]
fn orthogonal_pure_states_have_infinite_relative_entropy() {
    let o = bin().args(["relent", "--rho", "pure:2:0", "--sigma", "pure:2:1"]).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("+inf"));
}

#[test]
fn bsc_capacity_through_cqc() {
    let o = bin()
        .args(["cqc", "--coding", "basis:2", "--channel", "bit-flip:0.1", "--decoding", "basis:2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("0.368064207168"), "{}", stdout(&o));
}

#[test]
fn malformed_arguments_exit_with_two() {
    let o = bin().args(["entropy", "--state", "mixed:zero"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["run", "/nonexistent/scenario.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_scenario_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"id\": \"bad\",\n  \"seed\": -1,\n  \"computations\": []\n}").unwrap();
    let o = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("seed") && err.contains("line 3"), "{err}");
}

#[test]
fn report_is_sorted_json_lines_with_timing_last() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let o = bin()
        .arg("--report")
        .arg(&path)
        .arg("run")
        .arg(scenario("bsc_pipeline.json"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() >= 3);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
    let record = lines.iter().find(|l| l.contains("\"cqc_capacity\"")).unwrap();
    assert!(record.trim_end_matches('}').contains("\"wall_time_ms\":"));
    let after = record.split("\"wall_time_ms\":").nth(1).unwrap();
    assert!(!after.contains(','), "timing field is not last: {record}");
}

#[test]
fn repeated_runs_match_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let reports: Vec<String> = (0..2)
        .map(|k| {
            let path = dir.path().join(format!("r{k}.jsonl"));
            let o = bin()
                .args(["--seed", "5", "--report"])
                .arg(&path)
                .arg("run")
                .arg(scenario("dephasing_qubit.json"))
                .output()
                .unwrap();
            assert!(o.status.success());
            strip_timing(&std::fs::read_to_string(&path).unwrap())
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn small_check_suite_passes() {
    let o = bin().args(["check", "--dims", "2", "--seeds", "1-2"]).output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 invariant failure(s)"));
}
