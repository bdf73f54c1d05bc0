use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use symcret::fixtures;

fn symcret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symcret")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const FIG5: &str = "builtin:fig5";

#[test]
fn check_exit_codes_follow_the_verdict() {
    let asr = symcret(&["check", "asr", "--rel", "R", "--bundle", FIG5, "--json"]);
    assert_eq!(asr.status.code(), Some(0));
    assert_eq!(stdout_json(&asr)["holds"], true);

    let mcr = symcret(&["check", "mcr", "--rel", "R", "--bundle", FIG5, "--json"]);
    assert_eq!(mcr.status.code(), Some(1));
    let w = &stdout_json(&mcr)["witness"];
    assert_eq!((&w["x1"], &w["x2"], &w["u2"]), (&json!("1"), &json!("a"), &json!("α")));
    assert_eq!(w["evidence"][0]["x2_next"], "c");
}

#[test]
fn extended_system_passes_mcr() {
    let dir = tempfile::tempdir().unwrap();
    let ext_path = dir.path().join("s2p.json");
    let out = symcret(&["extend", "--rel", "R", "--bundle", FIG5, "--out", ext_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let ext: Value = serde_json::from_str(&fs::read_to_string(&ext_path).unwrap()).unwrap();
    assert_eq!(ext["format"], "symcret/1");
    assert_eq!(ext["trans"]["a|α"], json!(["b", "c"]));

    let mut bundle: Value = serde_json::from_str(fixtures::FIG5_JSON).unwrap();
    let mut sys = ext.clone();
    sys.as_object_mut().unwrap().remove("format");
    bundle["systems"]["S2p"] = sys;
    let pairs = bundle["relations"]["R"]["pairs"].clone();
    bundle["relations"]["Rp"] = json!({"from": "S1", "to": "S2p", "pairs": pairs});
    bundle["controllers"]["C2_alpha_ext"] = json!({"system": "S2p", "choices": {"a": ["α"], "b": ["α"], "c": ["α"]}});
    bundle["specs"]["sigma2p"] = json!({"system": "S2p", "initial": ["a"], "target": ["f"], "obstacle": ["d"]});
    let path = dir.path().join("bundle.json");
    fs::write(&path, serde_json::to_string_pretty(&bundle).unwrap()).unwrap();
    let b = path.to_str().unwrap();

    let out = symcret(&["check", "mcr", "--rel", "Rp", "--bundle", b]);
    assert_eq!(out.status.code(), Some(0));
    let out = symcret(&["check", "mcr", "--rel", "R", "--s1", "S2", "--s2", "S2p", "--bundle", b]);
    // R is not a relation on S2; endpoints are validated
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["code"], "domain_mismatch");

    let out = symcret(&["synthesize", "--spec", "sigma2p", "--bundle", b, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["controller"]["a"], json!(["β"]));

    let out = symcret(&[
        "verify", "--property", "two", "--rel", "Rp", "--controller", "C2_alpha", "--interface", "mcr", "--bundle", b,
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2), "C2_alpha is bound to S2");
    assert_eq!(stderr_json(&out)["code"], "usage");

    let out = symcret(&[
        "verify", "--property", "two", "--rel", "Rp", "--controller", "C2_alpha_ext", "--interface", "mcr", "--bundle", b,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out));
}

#[test]
fn synthesis_reports_losing_states() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = json!({
        "format": "symcret/1",
        "systems": {"T": {"states": ["x", "y", "z"], "inputs": ["u"], "trans": {"x|u": ["y", "z"], "y|u": ["y"], "z|u": ["z"]}}},
        "specs": {"reach_y": {"system": "T", "initial": ["x"], "target": ["y"], "obstacle": []}}
    });
    let path = dir.path().join("b.json");
    fs::write(&path, bundle.to_string()).unwrap();
    let out = symcret(&["synthesize", "--spec", "reach_y", "--bundle", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["solvable"], false);
    assert_eq!(v["losing"], json!(["x"]));
}

#[test]
fn concretize_and_simulate() {
    let out = symcret(&["concretize", "--controller", "C2_alpha", "--rel", "R", "--bundle", FIG5, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"1": ["0"], "2": ["0", "1"]}));

    let out = symcret(&["concretize", "--mode", "dynamic", "--controller", "C2_beta", "--rel", "R", "--bundle", FIG5, "--json"]);
    assert_eq!(stdout_json(&out)["architecture"], "dynamic");

    let out = symcret(&[
        "simulate", "--sys", "S1", "--controller", "C2_alpha", "--from", "1", "--horizon", "4", "--script-quantizer",
        "a,c", "--bundle", FIG5, "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out), json!([["1", "0"], ["2", "1"], ["3", null]]));

    let out = symcret(&[
        "simulate", "--sys", "S1", "--controller", "C2_beta", "--from", "1", "--mode", "dynamic", "--resolver", "all",
        "--bundle", FIG5, "--json",
    ]);
    let runs = stdout_json(&out);
    assert_eq!(runs, json!([[["1", "a", "β", "1"], ["4", "e", "α", "0"], ["5", "f", null, null]]]));

    let out = symcret(&[
        "simulate", "--sys", "S1", "--controller", "C2_alpha", "--from", "1", "--fail-on-undefined", "--bundle", FIG5,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["code"], "controller_undefined");
}

#[test]
fn verify_properties() {
    let base = ["verify", "--rel", "R", "--bundle", FIG5, "--json"];
    let run = |extra: &[&str]| symcret(&[&base[..], extra].concat());

    let out = run(&["--property", "two", "--controller", "C2_alpha", "--horizon", "6"]);
    assert_eq!(out.status.code(), Some(1));
    let w = &stdout_json(&out)["witness"];
    assert_eq!(w["concrete"]["states"], json!(["1", "2", "3"]));
    assert_eq!(w["quantization"], json!(["a", "c", "d"]));

    let out = run(&["--property", "two", "--controller", "C2_beta", "--horizon", "6"]);
    assert_eq!(out.status.code(), Some(0));

    // the empty initial set holds trivially
    let out = run(&["--property", "two", "--controller", "C2_alpha", "--from="]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["--property", "one", "--controller", "C2_alpha", "--from", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--property", "one", "--controller", "C2_alpha", "--concrete-controller", "C1_prime", "--from", "1"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["--property", "two-all"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["witness_controller"]["a"], json!(["α"]));

    let out = run(&["--property", "two"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demos_print_the_table() {
    let out = symcret(&["demo", "fig5"]);
    assert_eq!(out.status.code(), Some(0));
    let t = text(&out);
    assert!(t.contains("(1, a, α)") && t.contains("(1,2,3) ↦ (a,c,d)") && t.contains("C2(a) = {β}"), "{t}");
    assert!(!t.contains("[FAIL]"));

    let out = symcret(&["demo", "fig8", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn crosscheck_demo_is_deterministic() {
    let args = ["demo", "crosscheck", "--trials", "40", "--seed", "9", "--json"];
    let a = symcret(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_symcret")).args(args).env("SYMCRET_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout_json(&a)["report"], stdout_json(&b)["report"]);
    assert_eq!(stdout_json(&a)["report"]["trials"], 40);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = symcret(&["check", "asr", "--rel", "R", "--bundle", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["code"], "io");

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"format": "symcret/0"}"#).unwrap();
    let out = symcret(&["check", "asr", "--rel", "R", "--bundle", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert!(e["message"].as_str().unwrap().contains("symcret/0"), "{e}");

    let out = symcret(&["check", "asr", "--rel", "missing", "--bundle", FIG5]);
    assert_eq!(stderr_json(&out)["code"], "unknown_name");

    let out = symcret(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["code"], "usage");

    assert_eq!(symcret(&["--help"]).status.code(), Some(0));
}

#[test]
fn bundle_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = symcret::format::Bundle::from_json(fixtures::FIG5_JSON).unwrap();
    let first = bundle.to_json();
    let path: &Path = &dir.path().join("b.json");
    fs::write(path, &first).unwrap();
    let again = symcret::format::Bundle::from_json(&fs::read_to_string(path).unwrap()).unwrap().to_json();
    assert_eq!(first, again);
    let out = symcret(&["check", "asr", "--rel", "R", "--bundle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}
