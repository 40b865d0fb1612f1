// Copyright 2026 The probsess Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use probsess::cli::run;

const QUERY: &str = "sent(as, \"The Art of War\") | sent(as, 0195014766) & chose(ab, quote/3)";

fn protocol(name: &str) -> String {
    format!("{}/protocols/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn pmps(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("pmps").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("pmps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_accepts_the_protocols() {
    for f in ["twobuyers.pmps", "twobuyers_variant.pmps"] {
        let (code, out, _) = pmps(&["check", &protocol(f)]);
        assert_eq!(code, 0, "{}", out);
        assert!(out.contains("system TwoBuyers: well typed"));
    }
}

#[test]
fn check_rejects_a_faulty_sum() {
    let text = std::fs::read_to_string(protocol("twobuyers.pmps"))
        .unwrap()
        .replace("+ 0.2: as!<0195014766>", "+ 0.3: as!<0195014766>");
    let (code, out, _) = pmps(&["check", &scratch("faulty.pmps", &text)]);
    assert_eq!(code, 1);
    assert!(out.contains("probability-sum") || out.contains("ProbabilitySum") || out.contains("sum"), "{}", out);
}

#[test]
fn parse_errors_exit_with_two() {
    let (code, _, err) = pmps(&["check", &scratch("broken.pmps", "proc P = c!<;")]);
    assert_eq!(code, 2);
    assert!(err.contains("broken.pmps"));
    let (code, _, _) = pmps(&["check", "/nonexistent/file.pmps"]);
    assert_eq!(code, 2);
    let (code, _, _) = pmps(&["prob", &protocol("twobuyers.pmps"), "--query", "sent(("]);
    assert_eq!(code, 2);
}

#[test]
fn prob_prints_the_fraction_and_decimal() {
    let (code, out, _) = pmps(&["prob", &protocol("twobuyers.pmps"), "--depth", "20", "--query", QUERY]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "7/50 (0.14)");
}

#[test]
fn prob_reports_the_likeliest_class() {
    let (code, out, _) = pmps(&[
        "prob",
        &protocol("twobuyers.pmps"),
        "--class",
        "cheap=sent(as, \"War and Peace\")",
        "--class",
        "dear=!sent(as, \"War and Peace\")",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("most probable: dear with 7/10 (0.7)"), "{}", out);
}

#[test]
fn classes_that_overlap_are_a_failure() {
    let (code, _, err) = pmps(&["prob", &protocol("twobuyers.pmps"), "--class", "a=true", "--class", "b=true"]);
    assert_eq!(code, 1);
    assert!(err.contains("partition"));
}

#[test]
fn projection_onto_the_first_buyer() {
    let (code, out, _) = pmps(&["project", &protocol("twobuyers.pmps"), "--role", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("[0.7,0.9]: as!<string>. as?(int)."), "{}", out);
    let (_, by_name, _) = pmps(&["project", &protocol("twobuyers.pmps"), "--role", "Alice"]);
    assert_eq!(out, by_name);
}

#[test]
fn undefined_projection_is_a_failure() {
    let text =
        "global G = 1 ->[0.5,0.5] 2 : c<nat>. 3 ->1 4 : d<nat>. end + 1 ->[0.5,0.5] 2 : c<int>. 4 ->1 3 : d<nat>. end;";
    let (code, _, err) = pmps(&["project", &scratch("undef.pmps", text), "--role", "3"]);
    assert_eq!(code, 1, "{}", err);
    assert!(err.contains("undefined"));
}

#[test]
fn simplify_inlines_definitions() {
    let (code, out, _) = pmps(&["simplify", &protocol("twobuyers.pmps")]);
    assert_eq!(code, 0);
    assert!(out.contains("Bob ->[0.45,0.52] Seller : bs { quit : end }"));
}

#[test]
fn step_lists_the_link() {
    let (code, out, _) = pmps(&["step", &protocol("twobuyers.pmps"), "--process", "TwoBuyers"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("[0] Link p=1:"));
    assert_eq!(out.lines().count(), 1);
}

#[test]
fn graph_writes_dot() {
    let dot = scratch("g.dot", "");
    let (code, out, _) = pmps(&["graph", &protocol("twobuyers.pmps"), "--depth", "20", "--dot", &dot]);
    assert_eq!(code, 0);
    assert!(out.contains("acyclic") && out.contains("0 error"), "{}", out);
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn mc_is_deterministic_for_a_seed() {
    let args = ["mc", &protocol("twobuyers.pmps"), "--query", QUERY, "--runs", "2000", "--seed", "5"];
    let a = pmps(&args);
    assert_eq!(a.0, 0);
    assert_eq!(a, pmps(&args));
    assert!(a.1.contains("±"));
}

#[test]
fn meta_reports_every_harness() {
    let (code, out, _) = pmps(&["meta", &protocol("twobuyers.pmps"), "--depth", "20", "--format", "records"]);
    assert_eq!(code, 0, "{}", out);
    let records: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r["kind"] == "meta" && r["passed"] == true));
}

#[test]
fn records_are_json_lines() {
    let (code, out, _) = pmps(&["prob", &protocol("twobuyers.pmps"), "--query", QUERY, "--format", "records"]);
    assert_eq!(code, 0);
    let r: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(r["kind"], "probability");
    assert_eq!(r["probability"]["exact"], "7/50");
    assert_eq!(r["probability"]["decimal"], "0.14");
}

#[test]
fn depth_defaults_from_the_environment() {
    // Only this test sets the variable.
    std::env::set_var("PMPS_DEPTH", "2");
    let (code, out, _) = pmps(&["graph", &protocol("twobuyers.pmps")]);
    std::env::remove_var("PMPS_DEPTH");
    assert_eq!(code, 0);
    assert!(out.contains("truncated") && !out.contains(" 0 truncated"), "{}", out);
}
