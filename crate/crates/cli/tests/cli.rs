use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coinvariant"))
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn record(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a json record")
}

fn section<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["sections"].as_array().unwrap().iter().find(|s| s["name"] == name).map(|s| &s["data"]).unwrap_or_else(|| panic!("no section {name}"))
}

fn ranks(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn octahedron_antipodal_splits() {
    let out = run(&["run", "octahedron-antipodal"]);
    assert_eq!(out.status.code(), Some(0));
    let r = record(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["passed"], true);
    let phi = section(&r, "phi");
    assert_eq!(ranks(&phi["invariant_ranks"]), vec![1, 0, 0]);
    assert_eq!(ranks(&phi["coinvariant_ranks"]), vec![0, 0, 1]);
    assert!(r["ledger"].as_array().unwrap().iter().any(|e| e["check"] == "phi-bijective-2" && e["passed"] == true));
}

#[test]
fn plane_coinvariant_ranks_at_radius_three() {
    let out = run(&["run", "z2-on-r2", "--window-radius", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = record(&out);
    assert_eq!(r["parameters"]["window_radius"], 3);
    let seq = section(&r, "sequence");
    assert_eq!(ranks(&seq["stabilization"]["ranks"]), vec![0, 1, 2]);
    assert_eq!(seq["stabilization"]["stable"], true);
}

#[test]
fn output_is_deterministic() {
    for args in [vec!["run", "torus-rot-z4"], vec!["run", "strip", "--format", "table"]] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_dir_holds_both_projections() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "hexagon-z6", "--format", "table", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(dir.path().join("hexagon-z6.json")).unwrap();
    let txt = std::fs::read_to_string(dir.path().join("hexagon-z6.txt")).unwrap();
    assert_eq!(txt.as_bytes(), &out.stdout[..]);
    let r: Value = serde_json::from_str(&json).unwrap();
    // every ledger entry appears in the table
    for e in r["ledger"].as_array().unwrap() {
        let line = format!("{}/{}: ", e["section"].as_str().unwrap(), e["check"].as_str().unwrap());
        assert!(txt.contains(&line), "{line}");
    }
}

#[test]
fn non_commuting_action_is_an_input_error() {
    let out = run(&["run", &scenario("broken-rotation.toml")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("does not commute") && err.contains("degree 0"), "{err}");
}

#[test]
fn file_scenarios_run() {
    for (file, op) in [("triangle-rotation.toml", "phi"), ("square-weighted.toml", "equivariant-hodge"), ("line.toml", "theta")] {
        let out = run(&["run", &scenario(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        let r = record(&out);
        section(&r, op);
    }
    let r = record(&run(&["run", &scenario("line.toml")]));
    assert_eq!(r["parameters"]["cutoff"], "split");
    assert_eq!(ranks(&section(&r, "sequence")["stabilization"]["ranks"]), vec![0, 1]);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "kind = \"cover\"\ncover = 7\n").unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn parameter_bounds() {
    assert_eq!(run(&["run", "z3-on-r3", "--window-radius", "3"]).status.code(), Some(1));
    assert_eq!(run(&["run", "z-on-r", "--window-radius", "0"]).status.code(), Some(1));
    assert_eq!(run(&["run", "hexagon-z6", "--max-degree", "2"]).status.code(), Some(1));
    assert_eq!(run(&["run", "hexagon-z6", "--window-radius", "2"]).status.code(), Some(1));
    assert_eq!(run(&["run", "no-such-scenario"]).status.code(), Some(1));
}

#[test]
fn verification_failure_exits_two() {
    // the cylinder claims to be contractible; H^2 of its coinvariants is 1, not b_1(T^2) = 2
    let out = run(&["run", &scenario("cylinder.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("corollary-2"), "{err}");
    assert!(!err.contains("corollary-1"));
    assert_eq!(record(&out)["passed"], false);
}

#[test]
fn disconnected_swap_keeps_its_h0() {
    let out = run(&["run", "two-circle-swap"]);
    assert_eq!(out.status.code(), Some(0));
    let r = record(&out);
    assert_eq!(section(&r, "h0")["rank"], 1);
    assert!(!r["ledger"].as_array().unwrap().iter().any(|e| e["check"] == "h0-vanishes"));
}

#[test]
fn list_filters() {
    let all = run(&["list"]);
    assert_eq!(all.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&all.stdout).lines().count() >= 8);
    let covers = run(&["list", "--kind", "cover"]);
    let names: Vec<String> =
        String::from_utf8_lossy(&covers.stdout).lines().map(|l| l.split_whitespace().nth(1).unwrap().to_string()).collect();
    assert_eq!(names, ["z-on-r", "z2-on-r2", "z3-on-r3", "strip"]);
    assert_eq!(run(&["list", "--kind", "manifold"]).status.code(), Some(1));
}
