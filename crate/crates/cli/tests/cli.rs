use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dgh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgh")).args(args).env_remove("DGH_CELL_BUDGET").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn c3_file() -> PathBuf {
    scratch("c3.json", r#"{"vertices":["a","b","c"],"arrows":[["a","b"],["b","c"],["c","a"]]}"#)
}

#[test]
fn missing_file_is_an_input_error() {
    let out = dgh(&["info", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "input");
}

#[test]
fn malformed_arguments_are_input_errors() {
    assert_eq!(dgh(&["verify", "paper", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(dgh(&["info", "@nope"]).status.code(), Some(2));
    let bad = scratch("bad.json", r#"{"vertices":["a"],"arrows":[["a","z"]]}"#);
    assert_eq!(dgh(&["info", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn homology_of_a_triangle_file() {
    let c3 = c3_file();
    let out = dgh(&["homology", "--nerve-m", "1", "--maxdim", "2", c3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let h = &v["report"]["H"];
    assert_eq!(h[0]["rank"], 1);
    assert_eq!(h[1]["rank"], 1);
    assert_eq!(h[0]["torsion"], serde_json::json!([]));
    assert_eq!(v["report"]["not_final"], serde_json::json!([2]));
}

#[test]
fn oracle_flag_compares_homologies() {
    let out = dgh(&["homology", "@C4", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["oracle_agrees"], true);
}

#[test]
fn cell_budget_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dgh"))
        .args(["homology", "@C3"])
        .env("DGH_CELL_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"], "budget");
}

#[test]
fn output_is_deterministic() {
    let a = dgh(&["nerve", "@C4", "--m", "2", "--tables"]);
    let b = dgh(&["nerve", "@C4", "--m", "2", "--tables"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_format_renders_the_report() {
    let out = dgh(&["--format", "text", "pi0", "@C3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("passed: true"), "{text}");
    assert!(text.contains("count: 1"), "{text}");
}

#[test]
fn coverings_pass_and_fail_by_radius() {
    let map = scratch(
        "c6c3.json",
        r#"{"source":"@C6","target":"@C3","assignment":{"0":"0","1":"1","2":"2","3":"0","4":"1","5":"2"}}"#,
    );
    let m = map.to_str().unwrap();
    assert_eq!(dgh(&["check", "covering", m, "--l", "2"]).status.code(), Some(0));
    let out = dgh(&["check", "covering", m, "--l", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["property"].is_string());
    assert_eq!(dgh(&["check", "lifting", m, "--horn", "1,1,0,2"]).status.code(), Some(0));
    assert_eq!(dgh(&["check", "lifting", m, "--horn", "1,2,0,2"]).status.code(), Some(2));
}

#[test]
fn map_sources_resolve_next_to_the_map_file() {
    let c3 = c3_file();
    let name = c3.file_name().unwrap().to_str().unwrap();
    let map = scratch(
        "to_c3.json",
        &format!(r#"{{"source":"{name}","target":"{name}","assignment":{{"a":"a","b":"b","c":"c"}}}}"#),
    );
    let out = dgh(&["compare", map.to_str().unwrap(), "--maxdim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let degrees = &json(&out)["report"]["degrees"];
    assert_eq!(degrees[0]["is_iso"], true);
    assert_eq!(degrees[1]["is_iso"], true);
}

#[test]
fn deformation_retract_verdicts() {
    assert_eq!(dgh(&["check", "ddr", "@I1", "--part", "0", "--eta", "1=0"]).status.code(), Some(0));
    let out = dgh(&["check", "ddr", "@I1", "--part", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["error"], "part is not in-closed");
}

#[test]
fn cover_checks() {
    let cover = scratch("line_cover.json", r#"{"members":{"left":["0","1"],"right":["1","2"]}}"#);
    let out = dgh(&["check", "cover", "@I2", cover.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let broken = scratch("broken_cover.json", r#"{"members":{"left":["0","1"]}}"#);
    let out = dgh(&["check", "cover", "@C4", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["error"], "not a cover");
    let mixed = scratch("mixed_cover.json", r#"{"members":{"a":["0","1","2"],"b":["2","3","0"]}}"#);
    assert_eq!(dgh(&["check", "cover", "@C4", mixed.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn interval_and_tower_commands() {
    assert_eq!(dgh(&["check", "shrinkings", "><>", "><"]).status.code(), Some(0));
    assert_eq!(dgh(&["check", "rho", "--n", "2", "--m", "2"]).status.code(), Some(0));
    assert_eq!(dgh(&["check", "kan", "@C3", "--n", "1", "--m", "1"]).status.code(), Some(0));
    let out = dgh(&["antower", "@C3", "--base", "0", "--tower", "r", "--stages", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let counts: Vec<u64> = json(&out)["report"]["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["classes"].as_u64().unwrap())
        .collect();
    assert_eq!(counts, [1, 1, 1, 1, 2, 3]);
}

#[test]
fn fundamental_group_of_a_cycle() {
    let out = dgh(&["pi1", "@C5", "--base", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["abelianization"]["rank"], 1);
}

#[test]
fn a_single_suite_runs() {
    let out = dgh(&["verify", "paper", "--suite", "rho"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"][0]["suite"], "rho");
    assert!(v["report"][0]["anchor"].as_str().is_some_and(|a| !a.is_empty()));
}
