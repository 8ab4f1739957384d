use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kvcut"))
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run kvcut")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "bool",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// `key: type` lines in document order, nested objects as dotted keys.
fn schema_lines(v: &Value, prefix: &str, out: &mut Vec<(String, &'static str)>) {
    if let Value::Object(map) = v {
        for (k, child) in map {
            let key = format!("{prefix}{k}");
            out.push((key.clone(), kind(child)));
            schema_lines(child, &format!("{key}."), out);
        }
    }
}

fn write_graph(dir: &tempfile::TempDir, name: &str, n: usize, edges: &[(usize, usize)]) -> PathBuf {
    let mut text = format!("p edge {n} {}\n", edges.len());
    for (u, v) in edges {
        text += &format!("e {} {}\n", u + 1, v + 1);
    }
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_report_matches_golden_schema() {
    let golden = include_str!("golden/solve_schema.txt");
    let dir = tempfile::tempdir().unwrap();
    let k5 = write_graph(&dir, "k5.col", 5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
    let feasible = run(&["solve", instance("karate.col").to_str().unwrap(), "--k", "10"]);
    let infeasible = run(&["solve", k5.to_str().unwrap(), "--k", "2"]);
    let mut expected: Vec<(&str, &str)> = golden.lines().map(|l| l.split_once(": ").unwrap()).collect();
    expected.sort();
    for out in [&feasible, &infeasible] {
        let mut lines = Vec::new();
        schema_lines(&json(out), "", &mut lines);
        lines.sort();
        let keys: Vec<&str> = lines.iter().map(|(k, _)| k.as_str()).collect();
        let golden_keys: Vec<&str> = expected.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, golden_keys);
        for ((key, kind), (_, kinds)) in lines.iter().zip(&expected) {
            assert!(kinds.split('|').any(|g| g == *kind), "{key}: {kind} not in {kinds}");
        }
    }
}

#[test]
fn karate_needs_four_vertices_for_ten_components() {
    let out = run(&["solve", instance("karate.col").to_str().unwrap(), "--k", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "optimal");
    assert_eq!(v["objective"], 4.0);
    assert_eq!(v["cut"].as_array().unwrap().len(), 4);
    assert!(v["num_components"].as_u64().unwrap() >= 10);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = write_graph(&dir, "k5.col", 5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
    let out = run(&["solve", k5.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "infeasible");

    let split = write_graph(&dir, "split.col", 4, &[(0, 1), (2, 3)]);
    let out = run(&["solve", split.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "trivial");

    assert_eq!(run(&["solve", "missing.col", "--k", "2"]).status.code(), Some(1));
    assert_eq!(run(&["solve", k5.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["solve", k5.to_str().unwrap(), "--k", "2", "--clique-family", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["oracle", k5.to_str().unwrap(), "--k", "2"]).status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_reports() {
    let strip = |out: Output| {
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    let path = instance("myciel4.col");
    let args = ["solve", path.to_str().unwrap(), "--k", "5", "--weights", "random", "--seed", "7"];
    let a = strip(run(&args));
    let b = strip(run(&args));
    assert_eq!(a, b);
}

#[test]
fn bench_writes_rows_and_per_k_averages() {
    let out = bin()
        .env("KVCUT_THREADS", "2")
        .args(["bench", instance("karate.col").to_str().unwrap(), instance("myciel4.col").to_str().unwrap(), "--k", "3,5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "instance", "n", "m", "k", "status", "objective", "root_bound", "gap%", "nodes", "depth", "cols_total",
            "cols_root", "time_total", "time_pricing"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(&rows[0][0], "karate");
    assert_eq!(&rows[0][5], "1");
    assert_eq!(&rows[4][0], "average");
    assert_eq!(&rows[4][3], "3");
    assert_eq!(&rows[5][3], "5");
    assert_eq!(&rows[5][4], "2/2 solved");
}

#[test]
fn oracle_and_bounds_subcommands() {
    let karate = instance("karate.col");
    let out = run(&["oracle", karate.to_str().unwrap(), "--k", "3", "--regime", "cost:100000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["objective"], 1.0);
    assert_eq!(v["cut"], serde_json::json!([1]));

    let out = run(&["lp-bounds", karate.to_str().unwrap(), "--k", "5", "--optimum", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let edges = v["extended_edges"]["value"].as_f64().unwrap();
    let natural = v["natural"]["value"].as_f64().unwrap();
    assert!((edges - natural).abs() < 1e-6);
    assert_eq!(v["gaps"].as_array().unwrap().len(), 5);
}

#[test]
fn generated_weights_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("w.txt");
    let karate = instance("karate.col");
    let out = run(&["gen-weights", karate.to_str().unwrap(), "--seed", "3", "--output", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let spec = format!("file:{}", file.display());
    let from_file = json(&run(&["solve", karate.to_str().unwrap(), "--k", "5", "--weights", &spec]));
    let direct = json(&run(&["solve", karate.to_str().unwrap(), "--k", "5", "--weights", "random:3"]));
    assert_eq!(from_file["objective"], direct["objective"]);
}
