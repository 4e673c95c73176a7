use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use signaling_power::routing::pigou_poa;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signaling-power"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = bin(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn class_value(report: &Value, class: &str) -> f64 {
    report["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["class"] == class)
        .unwrap()["value"]
        .as_f64()
        .unwrap()
}

fn pos(report: &Value, label: &str) -> f64 {
    report["pos"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["label"] == label)
        .unwrap()["ratio"]
        .as_f64()
        .unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn run_robber_game() {
    let r = json(&["run", "fig4", "--alpha", "0.5", "--eps", "0.1", "--classes", "pub,pri", "--json"]);
    assert!((class_value(&r, "pub") - 1.045454545).abs() < 2e-3);
    assert!((class_value(&r, "pri") - 1.6).abs() < 1e-9);
    assert!((pos(&r, "PoS(Pri:Pub)") - 0.653409090909).abs() < 2e-3);
}

#[test]
fn run_n_state_game() {
    let r = json(&["run", "appA", "--n", "10", "--classes", "ni,pub", "--json"]);
    assert_eq!(pos(&r, "PoS(Pub:NI)"), 0.1);
}

#[test]
fn single_state_instance_has_unit_pos() {
    let path = temp_file(
        "one_state.json",
        r#"{"sense": "cost", "states": ["only"], "prior": [1], "players": 2,
            "actions": [["a", "b"], ["a", "b"]],
            "payoff": [[[[1, 1], [3, 0]], [[0, 3], [2, 2]]]]}"#,
    );
    let r = json(&["run", "--instance", path.to_str().unwrap(), "--json"]);
    for p in r["pos"].as_array().unwrap() {
        assert_eq!(p["ratio"].as_f64().unwrap(), 1.0, "{p}");
    }
}

#[test]
fn sweep_traces_pigou_curve() {
    let out = bin(&["sweep", "fig1", "--alpha", "0.25:4:0.25"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let alpha_col = header.iter().position(|h| h == "alpha").unwrap();
    let pos_col = header.iter().position(|h| h == "PoS(Pub:FI)").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 16);
    let mut last = 0.0;
    for row in rows {
        let alpha: f64 = row[alpha_col].parse().unwrap();
        assert!(alpha > last);
        last = alpha;
        let ratio: f64 = row[pos_col].parse().unwrap();
        assert!((ratio - pigou_poa(alpha).unwrap()).abs() < 1e-4, "alpha {alpha}: {ratio}");
    }
}

#[test]
fn sweep_variant_closed_form() {
    let out = bin(&["sweep", "fig5", "--alpha", "0.1:0.8:0.1", "--eps", "0.05"]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (a, r) = (col("alpha"), col("PoS(exP:Pri)"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let alpha: f64 = row[a].parse().unwrap();
        let ratio: f64 = row[r].parse().unwrap();
        assert!((ratio - (2.0 * alpha + 0.05) / (1.0 + alpha)).abs() < 1e-9);
    }
}

#[test]
fn single_point_sweep_matches_run() {
    let sweep = bin(&["sweep", "fig4", "--alpha", "0.5", "--eps", "0.1"]);
    let run = bin(&["run", "fig4", "--alpha", "0.5", "--eps", "0.1", "--csv"]);
    assert!(sweep.status.success() && run.status.success());
    assert_eq!(stdout(&sweep), stdout(&run));
}

#[test]
fn verify_is_clean_and_deterministic() {
    let args = ["verify", "--seed", "1", "--count", "200", "--players", "2", "--states", "2", "--actions", "3", "--json"];
    let first = bin(&args);
    assert_eq!(first.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(summary["violations"].as_array().unwrap().len(), 0);
    assert_eq!(summary["errors"].as_array().unwrap().len(), 0);
    let second = bin(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_with_no_games() {
    let out = bin(&["verify", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 violations"));
}

#[test]
fn exported_scenario_runs_as_instance() {
    let out = bin(&["export-scenario", "sec51", "--alpha", "2", "--eps", "0.1"]);
    assert!(out.status.success());
    let path = temp_file("sec51.json", &stdout(&out));
    let from_file = json(&["run", "--instance", path.to_str().unwrap(), "--classes", "fi,pub", "--json"]);
    let built = json(&["run", "sec51", "--alpha", "2", "--eps", "0.1", "--classes", "fi,pub", "--json"]);
    for class in ["fi", "pub"] {
        assert_eq!(class_value(&from_file, class), class_value(&built, class), "{class}");
    }
    assert_eq!(pos(&from_file, "PoS(Pub:FI)"), pos(&built, "PoS(Pub:FI)"));
}

#[test]
fn verify_flag_passes_on_scenarios() {
    for args in [
        vec!["run", "fig4", "--alpha", "0.5", "--eps", "0.1", "--verify"],
        vec!["run", "fig2", "--alpha", "1", "--verify"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("bound holds"));
    }
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(bin(&["run", "fig9"]).status.code(), Some(1));
    assert_eq!(bin(&["run", "sec51", "--alpha", "1", "--eps", "0.4"]).status.code(), Some(1));
    assert_eq!(bin(&["run", "fig1", "--alpha", "1", "--classes", "pri"]).status.code(), Some(1));
    assert_eq!(bin(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(bin(&["sweep", "fig1", "--alpha", "3:1:1"]).status.code(), Some(1));
    let bad = temp_file("bad.json", "{not json");
    let out = bin(&["run", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn machine_output_uses_twelve_significant_digits() {
    let out = bin(&["run", "fig1", "--alpha", "1", "--csv"]);
    let text = stdout(&out);
    assert!(text.contains("1.33333333333"));
    assert!(!text.contains("1.333333333333"));
}
