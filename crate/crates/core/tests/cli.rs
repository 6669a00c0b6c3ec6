use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn markovian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markovian"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("markovian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn list_names_every_demo() {
    let out = markovian(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().next()).collect();
    assert!(names.len() >= 6);
    for name in [
        "bell-example",
        "symmetric-walk",
        "unitary-ergodic",
        "gudder-line",
        "coin-process",
        "sampling-dichotomy",
    ] {
        assert!(names.contains(&name), "missing {name}");
    }
}

#[test]
fn bell_demo_reports_violation() {
    let r = json(&markovian(&["demo", "bell-example"]));
    let e: Vec<f64> = r["verdicts"]["expectations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expect = [1.0, -1.0 / 3.0, 1.0];
    for (a, b) in e.iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(r["verdicts"]["violated"], Value::Bool(true));
    assert_eq!(r["verdicts"]["example"]["joint_coupling"]["verdict"], "infeasible");
}

#[test]
fn symmetric_walk_limit_is_uniform() {
    let r = json(&markovian(&["demo", "symmetric-walk"]));
    let probs = r["verdicts"]["limit_distribution"]["probs"].as_array().unwrap();
    for p in probs {
        assert!((p.as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn corpus_demos_echo_their_seed() {
    let r = json(&markovian(&["demo", "unitary-ergodic"]));
    assert_eq!(r["seed"], 4);
    assert_eq!(r["verdicts"]["known_projection"]["matches"], Value::Bool(true));
    let r = json(&markovian(&["demo", "coin-process", "--seed", "11"]));
    assert_eq!(r["seed"], 11);
    assert_eq!(r["verdicts"]["enumeration_agrees"], Value::Bool(true));
}

#[test]
fn walk_and_sampling_demos_hold_their_invariants() {
    let r = json(&markovian(&["demo", "gudder-line"]));
    assert!(r["verdicts"]["max_trace_deviation"].as_f64().unwrap() <= 1e-10);
    assert!(r["verdicts"]["path_totals_max_deviation"].as_f64().unwrap() <= 1e-10);
    let r = json(&markovian(&["demo", "sampling-dichotomy"]));
    let c = &r["verdicts"]["corpus"];
    assert_eq!(c["clean"], c["bounded_iff_converges"]);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["demo", "unitary-ergodic"][..],
        &["demo", "gudder-line", "--format", "csv"][..],
        &["demo", "coin-process", "--seed", "3", "--horizon", "5"][..],
    ] {
        let a = markovian(args);
        let b = markovian(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_has_header_and_one_row_per_quantity() {
    let out = markovian(&["demo", "symmetric-walk", "--format", "csv", "--horizon", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("section,t,quantity,value"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.contains(&"distribution,0,1,1"));
    assert!(rows.contains(&"distribution,3,2,0.5"));
    assert!(rows.iter().all(|r| r.split(',').count() >= 4));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = scratch("out.json", "");
    let out = markovian(&["demo", "symmetric-walk", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["kind"], "markov-chain");
}

#[test]
fn malformed_file_exits_2_with_position() {
    let path = scratch("broken.json", "{\"kind\": \"evolution\",\n  \"payload\": {\"op\": [[1, 0]\n");
    let out = markovian(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn schema_errors_exit_2_with_field_path() {
    let path = scratch(
        "schema.json",
        r#"{"kind": "evolution", "payload": {"op": [[1, 0], [0, 1]], "start": [1, "x"]}}"#,
    );
    let out = markovian(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("payload.start[1]"), "{}", stderr(&out));

    let path = scratch("unknown.json", r#"{"kind": "markov-chain", "payload": {"matrix": []}}"#);
    let out = markovian(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("payload"), "{}", stderr(&out));
}

#[test]
fn invalid_input_to_a_module_exits_2() {
    let path = scratch(
        "walk.json",
        r#"{"kind": "markov-chain", "payload": {"transition": [[0.5, 0.4], [0.5, 0.5]], "start": [1, 0]}}"#,
    );
    let out = markovian(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("payload.transition"), "{}", stderr(&out));
}

#[test]
fn numeric_failures_exit_3() {
    let negative = r#"{"kind": "markov-chain", "payload": {
        "op": [[0, 1], [1, 0]], "start": [1, 0],
        "observable": {"labels": ["a", "b"], "functionals": [[2, -1], [-1, 2]]}}}"#;
    let out = markovian(&["run", scratch("negative.json", negative).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not a distribution"), "{}", stderr(&out));

    let unstable = r#"{"kind": "markov-chain", "payload": {
        "op": [[1, 1], [0, 1]], "start": [0, 1],
        "observable": {"labels": ["a", "b"], "functionals": [[0, 1], [1, 0]]}}}"#;
    let out = markovian(&["run", scratch("unstable.json", unstable).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unknown_demo_and_missing_file_exit_2() {
    assert_eq!(markovian(&["demo", "no-such-demo"]).status.code(), Some(2));
    assert_eq!(markovian(&["run", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn explicit_jointness_scenario_finds_the_bell_violation() {
    let m = |d: [i32; 5]| {
        let rows: Vec<Vec<i32>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { d[i] } else { 0 }).collect())
            .collect();
        serde_json::to_value(rows).unwrap()
    };
    let density: Vec<Vec<f64>> = (0..5)
        .map(|i| (0..5).map(|j| if i != j { 0.0 } else if i == 0 { -1.0 / 3.0 } else { 1.0 / 3.0 }).collect())
        .collect();
    let doc = serde_json::json!({
        "kind": "jointness",
        "payload": {
            "measurements": [
                {"name": "X", "matrix": m([-1, 1, -1, -1, -1])},
                {"name": "Y", "matrix": m([1, 1, -1, 1, -1])},
                {"name": "Z", "matrix": m([1, 1, 1, -1, -1])}
            ],
            "density": density
        }
    });
    let path = scratch("joint.json", &doc.to_string());
    let r = json(&markovian(&["run", path.to_str().unwrap()]));
    assert_eq!(r["verdicts"]["bell"]["violated"], Value::Bool(true));
    assert_eq!(r["verdicts"]["pairwise_coupling"]["verdict"], "infeasible");
    assert_eq!(r["verdicts"]["density_psd"], Value::Bool(false));
}
