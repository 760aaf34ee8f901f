use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn k3wild(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3wild")).args(args).output().expect("binary runs")
}

fn k3wild_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_k3wild"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON object")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const BUNDLED: &str = include_str!("../data/examples.toml");

// ---------------------------------------------------------------- verify

#[test]
fn verify_examples_all_pass() {
    let o = k3wild(&["verify-examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 20);
    assert!(out.ends_with("20/20 PASS\n"));
}

#[test]
fn verify_examples_is_bit_identical() {
    let a = k3wild(&["verify-examples", "--json"]);
    let b = k3wild(&["verify-examples", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], 20);
    assert_eq!(v["total"], 20);
    assert_eq!(v["pass"], true);
    assert!(v["examples"].as_array().unwrap().iter().all(|e| e["euler_sum"] == 24));
}

#[test]
fn verify_only_runs_one() {
    let o = k3wild(&["verify-examples", "--only", "7-(3)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS  7-(3)   y^2 = x^3 + (t^7 - t)x\n1/1 PASS\n");
}

#[test]
fn verify_unknown_id_is_usage_error() {
    let o = k3wild(&["verify-examples", "--only", "13-(1)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("13-(1)"));
}

#[test]
fn perturbed_label_fails_that_example() {
    let mutated = BUNDLED.replacen(
        r#"{ locus = ["0", "1"], count = 5, ade = "A_1^*" },"#,
        r#"{ locus = ["0", "1"], count = 5, ade = "A_1" },"#,
        1,
    );
    assert_ne!(mutated, BUNDLED);
    let path = temp_file("mutated_label.toml", &mutated);
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let failed: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].contains("5-(1)"));
    assert!(out.ends_with("19/20 PASS\n"));
}

#[test]
fn perturbed_count_fails() {
    let mutated = BUNDLED.replacen(r#"count = 21, ade = "A_0^*""#, r#"count = 14, ade = "A_0^*""#, 1);
    assert_ne!(mutated, BUNDLED);
    let path = temp_file("mutated_count.toml", &mutated);
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap(), "--only", "7-(6)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("21 geometric fibers, expected 14"));
}

#[test]
fn missing_locus_is_reported() {
    // drop the second finite entry of 7-(5): its fibers become unlisted
    let mutated = BUNDLED.replacen(r#"    { locus = ["-1/4", "1"], count = 7, ade = "A_0^*" },"#, "", 1);
    assert_ne!(mutated, BUNDLED);
    let path = temp_file("missing_locus.toml", &mutated);
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap(), "--only", "7-(5)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unlisted singular fiber I_1"));
}

#[test]
fn printed_locus_of_7_4_is_not_singular() {
    // the locus u = −4/27 as printed for 7-(4) carries no singular fiber;
    // the discriminant −16u²(4u + 27) vanishes at u = −27/4 instead
    let printed = BUNDLED.replacen(
        r#"{ locus = ["27/4", "1"], count = 7, ade = "A_0^*" },
]

[[example]]
id = "7-(5)""#,
        r#"{ locus = ["4/27", "1"], count = 7, ade = "A_0^*" },
]

[[example]]
id = "7-(5)""#,
        1,
    );
    assert_ne!(printed, BUNDLED);
    let path = temp_file("printed_7_4.toml", &printed);
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap(), "--only", "7-(4)"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("A_0 (I_0) at t^7 - t + 3, expected A_0^*"), "{out}");
    assert!(out.contains("unlisted singular fiber I_1 (A_0^*) at t^7 - t - 2"), "{out}");
}

#[test]
fn corrupt_fixture_is_usage_error() {
    let path = temp_file("corrupt.toml", "[[example]]\nid = 3\n");
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let bad_coeff = BUNDLED.replacen(r#"["-1/4", "1"]"#, r#"["-1/x", "1"]"#, 1);
    let path = temp_file("bad_coeff.toml", &bad_coeff);
    let o = k3wild(&["verify-examples", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

// ---------------------------------------------------------------- analyze

#[test]
fn analyze_5_1_summary() {
    let o = k3wild(&["analyze", "--example", "5-(1)"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("III* at inf (E_7); III ×5 at t^5 - t (A_1^*); euler_sum 24\n"), "{out}");
    assert!(out.contains("k3 check: euler_sum 24 vs 24 (ok)"));
}

#[test]
fn analyze_file_and_stdin_agree() {
    let rec = "p = 7\nn = 2\na4 = [0, -1, 0, 0, 0, 0, 0, 1]\na6 = [1]\n";
    let path = temp_file("seven_six.toml", rec);
    let from_file = k3wild(&["analyze", path.to_str().unwrap(), "--json"]);
    let from_stdin = k3wild_stdin(&["analyze", "-", "--json"], rec);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
}

#[test]
fn analyze_json_agrees_with_text() {
    let text = stdout(&k3wild(&["analyze", "--example", "5-(12)"]));
    let v = json(&k3wild(&["analyze", "--example", "5-(12)", "--json"]));
    assert_eq!(v["p"], 5);
    assert_eq!(v["n"], 2);
    assert_eq!(v["k3"], true);
    assert_eq!(v["expected_euler"], 24);
    assert!(text.contains(&format!("euler_sum {}", v["euler_sum"])));
    let fibers = v["fibers"].as_array().unwrap();
    assert_eq!(fibers[0]["place"], "inf");
    for f in fibers {
        let mut keys: Vec<&str> = f.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["ade", "degree", "e", "kodaira", "m", "place"]);
        assert!(text.contains(f["kodaira"].as_str().unwrap()));
    }
    // one table row per closed point, plus model, header, summary and check
    assert_eq!(text.lines().count(), fibers.len() + 4);
    let sum: u64 = fibers.iter().map(|f| f["degree"].as_u64().unwrap() * f["e"].as_u64().unwrap()).sum();
    assert_eq!(v["euler_sum"], sum);
}

#[test]
fn analyze_characteristic_three_exits_3() {
    let path = temp_file("p3.toml", "p = 3\na6 = [0, -1, 0, 1]\n");
    let o = k3wild(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("wild"), "{}", stderr(&o));
}

#[test]
fn analyze_constant_discriminant() {
    let path = temp_file("constant.toml", "p = 5\nn = 0\na4 = [1]\n");
    let o = k3wild(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no singular fibers; euler_sum 0"));
    let v = json(&k3wild(&["analyze", path.to_str().unwrap(), "--json"]));
    assert_eq!(v["fibers"].as_array().unwrap().len(), 0);
    assert_eq!(v["euler_sum"], 0);
}

#[test]
fn analyze_degenerate_exits_4() {
    let path = temp_file("degenerate.toml", "p = 5\na2 = [0, 1]\n");
    let o = k3wild(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn analyze_parse_failures_exit_2() {
    for (name, body) in [
        ("garbage.toml", "this is not a record"),
        ("unknown_field.toml", "p = 5\na5 = [1]\n"),
        ("not_prime.toml", "p = 9\na4 = [1]\n"),
        ("too_big.toml", "p = 5\nn = 1\na4 = [0, 0, 0, 0, 0, 1]\n"),
    ] {
        let path = temp_file(name, body);
        let o = k3wild(&["analyze", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
    }
    assert_eq!(k3wild(&["analyze", "/nonexistent/model.toml"]).status.code(), Some(2));
    assert_eq!(k3wild(&["analyze"]).status.code(), Some(2));
    assert_eq!(k3wild(&[]).status.code(), Some(2));
    assert_eq!(k3wild(&["frobnicate"]).status.code(), Some(2));
}

// ---------------------------------------------------------------- enumerate

#[test]
fn enumerate_11() {
    let o = k3wild(&["enumerate", "--p", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("p = 11: 2 configurations (2 paper, 0 extra)\n"));
    let v = json(&k3wild(&["enumerate", "--p", "11", "--json"]));
    let configs = v["configurations"].as_array().unwrap();
    assert_eq!(configs.len(), 2);
    assert!(configs.iter().all(|c| c["flag"] == "paper" && c["euler_sum"] == 24));
    let labels: Vec<&str> = configs.iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["A_0^** + 22A_0^*", "A_0^** + 11A_0^**"]);
}

#[test]
fn enumerate_5_flags_extra() {
    let v = json(&k3wild(&["enumerate", "--p", "5", "--json"]));
    assert_eq!(v["paper"], 12);
    assert_eq!(v["extra"], 1);
    assert_eq!(v["missing"].as_array().unwrap().len(), 0);
    let extra: Vec<&Value> = v["configurations"].as_array().unwrap().iter().filter(|c| c["flag"] == "extra").collect();
    assert_eq!(extra[0]["label"], "A_2^* + 10A_1");
    assert_eq!(extra[0]["fibers"][0]["locus"], "fixed");
    assert_eq!(extra[0]["fibers"][1]["count"], 10);
}

#[test]
fn enumerate_rejects_other_primes() {
    assert_eq!(k3wild(&["enumerate", "--p", "3"]).status.code(), Some(3));
    assert_eq!(k3wild(&["enumerate", "--p", "13"]).status.code(), Some(2));
    assert_eq!(k3wild(&["enumerate", "--p", "x"]).status.code(), Some(2));
}

// ---------------------------------------------------------------- bounds

#[test]
fn bounds_default_table() {
    let o = k3wild(&["bounds", "--max-p", "29"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for p in ["23", "29"] {
        let line =
            out.lines().find(|l| l.trim_start().starts_with(&format!("p = {p} ")) && l.contains("feasib")).unwrap();
        assert!(line.contains("infeasible"), "{line}");
    }
    assert!(out.contains("p = 5     24/5  < 6  differs from stated"));
    assert!(out.contains("overall: ok"));
}

#[test]
fn bounds_json() {
    let v = json(&k3wild(&["bounds", "--max-p", "50", "--json"]));
    assert_eq!(v["ok"], true);
    let p23 = v["torsion"].as_array().unwrap().iter().find(|t| t["p"] == 23).unwrap();
    assert_eq!(p23["feasible"], false);
    assert_eq!(p23["one_additive"], "blocked by component-count");
    let p3 = v["contributions"].as_array().unwrap().iter().find(|c| c["p"] == 3).unwrap();
    assert_eq!(p3["maximum"], "16/3");
    assert_eq!(v["double_plane"][0], serde_json::json!([3, 2]));
    assert_eq!(k3wild(&["bounds", "--max-p", "3"]).status.code(), Some(2));
}

// ---------------------------------------------------------------- height

#[test]
fn height_flags() {
    let o = k3wild(&["height", "--po", "0"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "4\n".to_string()));
    let o = k3wild(&["height", "--po", "1", "--met", "I5:2:4"]);
    assert_eq!(stdout(&o), "6/5\n");
    let v = json(&k3wild(&["height", "--po", "0", "--met", "I_5:2:2", "--met", "I5:1:2", "--json"]));
    assert_eq!(v["height"], "0");
    assert_eq!(v["torsion_candidate"], true);
    assert_eq!(stdout(&k3wild(&["height", "--po", "0", "--met", "IV*:1"])), "8/3\n");
}

#[test]
fn height_input_records() {
    let toml = temp_file("inc.toml", "po = 1\n[[met]]\ntype = \"I\"\nn = 5\nk = 2\nd = 4\n");
    assert_eq!(stdout(&k3wild(&["height", "--input", toml.to_str().unwrap()])), "6/5\n");
    let json_in = temp_file("inc.json", r#"{"po": 0, "met": [{"type": "I*", "n": 2, "k": 3}]}"#);
    assert_eq!(stdout(&k3wild(&["height", "--input", json_in.to_str().unwrap()])), "5/2\n");
}

#[test]
fn height_errors() {
    for args in [
        vec!["height"],
        vec!["height", "--po", "0", "--met", "I5"],
        vec!["height", "--po", "0", "--met", "I5:5"],
        vec!["height", "--po", "0", "--met", "V:1"],
        vec!["height", "--po", "0", "--met", "I5:1:0"],
    ] {
        assert_eq!(k3wild(&args).status.code(), Some(2), "{args:?}");
    }
}
