use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gpcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpcheck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let o = gpcheck(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("json output"))
}

#[test]
fn sat_answers_and_exit_codes() {
    let ws = fixture("conditions.gpw");
    let o = gpcheck(&["sat", &ws, "empty", "emp"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "true"));
    let o = gpcheck(&["sat", &ws, "cycle3", "col"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "false"));
    let o = gpcheck(&["sat", &ws, "path3", "col"]);
    assert_eq!(o.status.code(), Some(0));
    // inline graph and constraint
    let o = gpcheck(&["sat", &ws, "{ nodes: a, b; edges: x: a -> b; }", "not e"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn witness_lists_a_colouring() {
    let (code, v) = structured(&["--witness", "sat", &fixture("conditions.gpw"), "path3", "col"]);
    assert_eq!(code, 0);
    assert_eq!(v["satisfied"], true);
    assert_eq!(v["witness"]["set"], "X");
}

#[test]
fn errors_exit_with_two() {
    let o = gpcheck(&["sat", &fixture("conditions.gpw"), "nope", "col"]);
    assert_eq!(o.status.code(), Some(2));
    let (code, v) = structured(&["sat", &fixture("missing.gpw"), "g", "c"]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

#[test]
fn run_reaches_the_sample_tree() {
    let (code, v) = structured(&["run", &fixture("trees.gpw"), "build", "empty"]);
    assert_eq!(code, 0);
    let results = v["results"].as_array().unwrap();
    assert!(results.iter().all(|g| g["nodes"].as_array().unwrap().len() == 4));
    // the tree a -> b, a -> c, b -> d: one node of out-degree 2 and one of out-degree 1
    let has_tree = results.iter().any(|g| {
        let mut outs: Vec<usize> = g["nodes"].as_array().unwrap().iter().map(|n| g["source"].as_object().unwrap().values().filter(|s| *s == n).count()).collect();
        outs.sort();
        outs == [0, 0, 1, 2]
    });
    assert!(has_tree);
}

#[test]
fn apply_reports_inapplicable_rules() {
    let o = gpcheck(&["apply", &fixture("trees.gpw"), "delete", "empty"]);
    assert_eq!(o.status.code(), Some(1));
    let (code, v) = structured(&["apply", &fixture("trees.gpw"), "grow", "path3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
}

#[test]
fn proofs() {
    assert_eq!(gpcheck(&["prove", &fixture("trees.gpw"), "two_colourable"]).status.code(), Some(0));
    assert_eq!(gpcheck(&["prove", &fixture("acyclicity.gpw"), "acyclic"]).status.code(), Some(0));
    let (code, v) = structured(&["prove", &fixture("acyclicity.gpw"), "cyclic"]);
    assert_eq!(code, 1);
    assert_eq!(v["accepted"], false);
}

#[test]
fn wlp_records_provenance() {
    let (code, v) = structured(&["wlp", &fixture("trees.gpw"), "init", "col"]);
    assert_eq!(code, 0);
    assert!(v["pre"].as_str().unwrap().starts_with("exV X"));
    assert_eq!(v["app"], "true");
    let o = gpcheck(&["--witness", "wlp", &fixture("acyclicity.gpw"), "delete", "not c"]);
    assert!(stdout(&o).contains("provenance:"));
}

#[test]
fn translations_are_checked() {
    let (code, v) = structured(&["--bound", "3", "translate", &fixture("mso.gpw"), "mso-to-cond", "bipartite"]);
    assert_eq!(code, 0);
    assert!(v["disagreement"].is_null());
    let (code, _) = structured(&["--bound", "3", "translate", &fixture("mso.gpw"), "cond-to-mso", "c"]);
    assert_eq!(code, 0);
}

#[test]
fn check_triple_finds_the_two_cycle() {
    let (code, v) = structured(&["--bound", "3", "check-triple", &fixture("acyclicity.gpw"), "c", "strip", "not e"]);
    assert_eq!(code, 1);
    assert_eq!(v["input"]["edges"].as_array().unwrap().len(), 2);
    assert_eq!(v["output"]["edges"].as_array().unwrap().len(), 0);
    let (code, _) = structured(&["--bound", "3", "check-triple", &fixture("acyclicity.gpw"), "not c", "strip", "e"]);
    assert_eq!(code, 0);
}

#[test]
fn normalize_prints_a_constraint() {
    let o = gpcheck(&["normalize", &fixture("conditions.gpw"), "e"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("not exists"));
}
