use std::process::{Command, Output};

use serde_json::Value;

const GOLDEN: &str = r#"{"type":"sft","m":2,"forbidden":["11"]}"#;
const EVEN: &str = r#"{"type":"sofic","vertices":["v1","v2"],"edges":[["v1","v1","1"],["v1","v2","0"],["v2","v1","0"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coverforge"))
        .args(args)
        .env_remove("COVERFORGE_BUDGET_CELLS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn error(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn dot_counts(dot: &str) -> (usize, usize) {
    let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    (nodes, edges)
}

#[test]
fn krieger_golden_mean_dot() {
    let o = run(&["krieger", "--input", GOLDEN]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dot_counts(&stdout(&o)), (2, 3));
}

#[test]
fn krieger_full_shift_has_two_loops() {
    let o = run(&["krieger", "--input", r#"{"type":"full","m":2}"#]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert_eq!(dot_counts(&dot), (1, 2));
    assert_eq!(dot.lines().filter(|l| l.contains("n0 -> n0")).count(), 2);
}

#[test]
fn square_gap_is_stamped_and_exits_two() {
    let o = run(&[
        "krieger",
        "--input",
        r#"{"type":"oracle","oracle":"square-gap"}"#,
        "--max-k",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["metadata"]["status"], "approximate");
    assert_eq!(v["metadata"]["termination"]["termination_level"], Value::Null);
}

#[test]
fn entropy_of_fischer_output() {
    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("even.json");
    let o = run(&["fischer", "--input", EVEN, "--format", "json", "--out", cover.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let o = run(&["entropy", "--input", cover.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().filter(|l| !l.starts_with('#')).nth(1).unwrap();
    let vals: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    assert!((vals[0] - 1.6180339887).abs() < 1e-9);
    assert!((vals[1] - 0.4812118251).abs() < 1e-9);
}

#[test]
fn tent_two_reports_weight_anomaly() {
    let o = run(&["tent", "--input", r#"{"mu":"2"}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["weights"]["anomalies"][0], serde_json::json!({"point": "1", "weight": 2}));
}

#[test]
fn fibonacci_edge_shift_dot() {
    let o = run(&["subst-cover", "--input", r#"{"type":"substitution","rules":{"a":"ab","b":"a"}}"#]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dot_counts(&stdout(&o)), (2, 3));
}

#[test]
fn artifacts_carry_provenance() {
    let o = run(&["krieger", "--input", GOLDEN, "--format", "json", "--seed", "17"]);
    let v = json(&o);
    assert_eq!(v["schema"], "coverforge/1");
    assert_eq!(v["seed"], 17);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(v["budgets"]["max_k"], 8);
    assert_eq!(v["metadata"]["self_check"]["passed"], true);
    let dot = stdout(&run(&["krieger", "--input", GOLDEN, "--seed", "17"]));
    assert!(dot.contains("// seed: 17"));
    assert!(dot.contains("// input_digest: "));
}

#[test]
fn json_artifacts_reimport_as_covers() {
    for args in [
        vec!["krieger", "--input", EVEN, "--format", "json"],
        vec!["fischer", "--input", GOLDEN, "--format", "json"],
        vec!["interval-cover", "--input", r#"{"type":"tent","mu":"3/2"}"#, "--format", "json"],
        vec!["subst-cover", "--input", r#"{"type":"substitution","rules":{"a":"ab","b":"ba"}}"#, "--format", "json"],
    ] {
        let first = run(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        let text = stdout(&first);
        let g = coverforge::graph::CoverGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        // Feeding the artifact back in gives the same Perron value.
        let a = run(&["entropy", "--input", &text, "--format", "json"]);
        assert_eq!(a.status.code(), Some(0));
        let lambda = json(&a)["lambda"].as_f64().unwrap();
        let expected = coverforge::transfer::perron_value(&g, 1e-12, 100_000).unwrap();
        assert!((lambda - expected).abs() < 1e-12);
    }
}

#[test]
fn input_errors_exit_one_with_json() {
    for (args, code) in [
        (vec!["krieger", "--input", "{\"type\":"], "input"),
        (vec!["krieger", "--input", r#"{"type":"tent","mu":"2"}"#], "input"),
        (vec!["krieger", "--input", "/nonexistent/file.json"], "input"),
        (vec!["fischer", "--input", r#"{"type":"sofic","vertices":["a","b"],"edges":[["a","a","0"],["b","b","1"]]}"#], "not-irreducible"),
        (vec!["entropy", "--input", GOLDEN, "--format", "dot"], "input"),
        (vec!["krieger", "--input", GOLDEN, "--max-k", "0"], "usage"),
        (vec!["nonsense"], "usage"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty());
        let e = error(&o);
        assert_eq!(e["error"], code, "{args:?}");
        assert!(e["detail"].is_string());
    }
}

#[test]
fn horizon_exceeded_is_a_budget_error() {
    let o = run(&["krieger", "--input", r#"{"type":"oracle","oracle":"square-gap","horizon":1}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error(&o)["error"], "horizon-exceeded");
}

#[test]
fn cell_budget_from_environment() {
    let input = r#"{"type":"tent","mu":"3/2"}"#;
    let args = ["interval-cover", "--input", input, "--gamma", "6"];
    let o = Command::new(env!("CARGO_BIN_EXE_coverforge"))
        .args(args)
        .env("COVERFORGE_BUDGET_CELLS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error(&o)["error"], "budget-exceeded");
    assert_eq!(run(&args).status.code(), Some(0));
}

#[test]
fn out_file_is_replaced_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    std::fs::write(&path, "stale").unwrap();
    let o = run(&["krieger", "--input", GOLDEN, "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&run(&["krieger", "--input", GOLDEN])));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn ruelle_bernoulli_weights() {
    let o = run(&[
        "ruelle",
        "--input",
        r#"{"type":"full","m":2}"#,
        "--potential",
        r#"{"label:0":"log(3)"}"#,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["lambda"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    let measures: Vec<f64> = v["edges"].as_array().unwrap().iter().map(|e| e["measure"].as_f64().unwrap()).collect();
    assert!((measures[0] - 0.75).abs() < 1e-10 && (measures[1] - 0.25).abs() < 1e-10);
}

#[test]
fn check_sofic_verdicts() {
    let o = run(&["check-sofic", "--input", EVEN]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["sofic"], true);
    let o = run(&["check-sofic", "--input", r#"{"type":"oracle","oracle":"square-gap"}"#, "--max-k", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["sofic"], "undecided");
    assert_eq!(json(&o)["class_counts"], serde_json::json!([2, 4, 6, 8, 9]));
}

#[test]
fn inline_input_from_stdin() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_coverforge"))
        .args(["subst-cover", "--format", "csv"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"type":"substitution","rules":{"a":"aa"}}"#)
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<&str> = std::str::from_utf8(&o.stdout).unwrap().lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["id,source,range,label,weight", "\"a,1\",a,a,1,1", "\"a,2\",a,a,2,1"]);
}
