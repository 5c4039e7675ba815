mod schema;

use std::path::Path;
use std::process::{Command, Output};

use gfl_core::fin::FinElement;
use serde_json::Value;

fn gfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfl")).args(args).output().expect("binary runs")
}

fn gfl_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfl")).args(args).env(key, val).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn valid(schema_name: &str, value: &Value) {
    let schema = schema::load(schema_name);
    if let Err(msg) = schema::validate(&schema, value) {
        panic!("{schema_name}: {msg}\n{value:#}");
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn elem_examples() {
    let out = gfl(&["--format", "text", "elem", "tetris", "3:2,5:1"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "3:1"));
    let out = gfl(&["--format", "text", "elem", "add", "1:2", "4:1,5:2"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "1:2,4:1,5:2"));
    let out = gfl(&["elem", "add", "4:2", "1:2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("NotBlockOrdered"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn elem_outputs_match_schema() {
    for args in [
        vec!["elem", "tetris", "3:2,5:1", "--times", "2"],
        vec!["elem", "stats", "1:1,3:2,5:1"],
        vec!["elem", "embed", "1:1,2:2", "--from", "2", "--to", "4"],
        vec!["elem", "support", "1:1,3:2"],
        vec!["elem", "block-less", "1:1", "3:2"],
    ] {
        let out = gfl(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        valid("elem-output.schema.json", &json(&out));
    }
    let stats = json(&gfl(&["elem", "stats", "1:1,3:2,5:1"]));
    assert_eq!(stats["mu"], 5);
    assert_eq!(stats["by_value"]["1"]["lambda"], 1);
    assert_eq!(json(&gfl(&["elem", "embed", "1:1,2:2", "--from", "2", "--to", "4"]))["result"], "1:3,2:4");
}

#[test]
fn bad_element_text_is_a_usage_error() {
    let out = gfl(&["elem", "tetris", "3:2,,5:1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Parse"));
}

#[test]
fn span_enum_counts() {
    let out = gfl(&["span", "enum", "--k", "2", "--d", "2", "--blocks", "0:2;3:1,4:2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    valid("span-output.schema.json", &v);
    assert_eq!(v["count"], 5);
    let ext = json(&gfl(&["span", "enum", "--k", "2", "--blocks", "0:2;3:1,4:2", "--extended"]));
    assert_eq!(ext["count"], 8);
}

#[test]
fn span_contains_round_trip() {
    let blocks = "0:2;3:1,4:2;6:2";
    let theta = json(&gfl(&["span", "theta", "--k", "2", "--blocks", blocks, "--f", "0:1,2:2"]));
    valid("span-output.schema.json", &theta);
    let x = theta["x"].as_str().unwrap();
    let out = gfl(&["span", "contains", "--k", "2", "--blocks", blocks, "--x", x]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    valid("span-output.schema.json", &v);
    assert_eq!(v["witness"], "0:1,2:2");

    let out = gfl(&["span", "contains", "--k", "2", "--blocks", blocks, "--x", "1:1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["witness"], Value::Null);
}

#[test]
fn bad_block_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let overlapping = write(dir.path(), "blocks.txt", "0:2,3:1\n2:2\n");
    let out = gfl(&["span", "enum", "--k", "2", "--blocks-file", &overlapping]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("NotIncreasing"));
    let good = write(dir.path(), "good.txt", "# blocks\n0:2\n3:1,4:2\n");
    assert_eq!(json(&gfl(&["span", "enum", "--k", "2", "--blocks-file", &good]))["count"], 5);
    let out = gfl(&["span", "enum", "--k", "2", "--blocks-file", "/nonexistent/blocks.txt"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn parity_witness() {
    let out = gfl(&["search", "hindman", "--n", "4", "--d", "2", "--coloring", "size-parity"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    valid("search-output.schema.json", &v);
    assert_eq!(v["result"], serde_json::json!([[0, 1], [2, 3]]));
    let sub = json(&gfl(&["search", "subspace", "--k", "1", "--n", "4", "--d", "2", "--coloring", "size-parity"]));
    valid("search-output.schema.json", &sub);
    assert_eq!(sub["result"], serde_json::json!(["0:1,1:1", "2:1,3:1"]));
    assert_eq!(sub["color"], 0);
}

#[test]
fn avoidance_table_has_no_witness() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(dir.path(), "avoid.txt", "0:1 0\n1:1 0\n0:1,1:1 1\n");
    let out = gfl(&["search", "hindman", "--n", "2", "--d", "2", "--table", &table]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    valid("search-output.schema.json", &v);
    assert_eq!(v["result"], Value::Null);

    let out = gfl(&["search", "avoid", "--k", "1", "--n", "2", "--d", "2"]);
    assert_eq!(code(&out), 0);
    valid("search-output.schema.json", &json(&out));
    let out = gfl(&["search", "avoid", "--k", "1", "--n", "1", "--d", "1", "--colors", "1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["result"], Value::Null);
}

#[test]
fn avoidance_budget_and_seed_rules() {
    let out = gfl(&["--budget", "100", "search", "avoid", "--k", "2", "--n", "4", "--d", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("BudgetExceeded"));
    let out = gfl(&["search", "avoid", "--k", "1", "--n", "2", "--d", "2", "--mode", "randomized"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
    let args = ["--seed", "5", "search", "avoid", "--k", "1", "--n", "2", "--d", "2", "--mode", "randomized"];
    let a = gfl(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(json(&a)["seed"], 5);
    assert_eq!(stdout(&a), stdout(&gfl(&args)));
}

#[test]
fn prune_off_matches_default() {
    for k in ["1", "2"] {
        for n in ["2", "3", "4"] {
            for d in ["1", "2"] {
                for coloring in ["constant", "size-parity", "min-parity", "hash"] {
                    let base = ["--seed", "11", "search", "subspace", "--k", k, "--n", n, "--d", d, "--coloring", coloring];
                    let on = gfl(&base);
                    let mut off_args = base.to_vec();
                    off_args.extend(["--prune", "off"]);
                    let off = gfl(&off_args);
                    assert_eq!(code(&on), code(&off));
                    assert_eq!(json(&on)["result"], json(&off)["result"], "{base:?}");
                }
            }
        }
    }
}

#[test]
fn hash_coloring_needs_seed() {
    let out = gfl(&["search", "subspace", "--k", "1", "--d", "2", "--coloring", "hash"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn sums_and_unions() {
    let v = json(&gfl(&["search", "sums", "--values", "1,2,4"]));
    valid("search-output.schema.json", &v);
    assert_eq!(v["result"], serde_json::json!([1, 2, 3, 4, 5, 6, 7]));
    let v = json(&gfl(&["search", "sums", "--values", "1,2", "--max-terms", "1"]));
    assert_eq!(v["result"], serde_json::json!([1, 2]));
    let v = json(&gfl(&["search", "unions", "--sets", "0;2"]));
    valid("search-output.schema.json", &v);
    assert_eq!(v["result"], serde_json::json!([[0], [2], [0, 2]]));
    assert_eq!(code(&gfl(&["search", "unions", "--sets", "0,3;2"])), 2);
    assert_eq!(code(&gfl(&["search", "sums", "--values", "1,1"])), 2);
}

#[test]
fn oracle_gen_and_show() {
    assert_eq!(code(&gfl(&["oracle", "gen", "--k", "2"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("family.json");
    let out = gfl(&["--seed", "3", "oracle", "gen", "--k", "2", "--x-max", "16", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let family: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    valid("family.schema.json", &family);
    let show = gfl(&["oracle", "show", "--family", path.to_str().unwrap(), "--bound", "10"]);
    assert_eq!(code(&show), 0);
    let v = json(&show);
    valid("oracle-show.schema.json", &v);
    assert_eq!(v["moduli"].as_array().unwrap().len(), 2);
}

#[test]
fn pipeline_seed_7() {
    let out = gfl(&["--seed", "7", "pipeline", "run", "--k", "2", "--d", "3", "--xbound", "12"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let v = json(&out);
    valid("pipeline-report.schema.json", &v);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["diff"], serde_json::json!([]));
    assert_eq!(v["homogeneity"]["color"], 0);
    assert_eq!(v["seed"], 7);
}

#[test]
fn pipeline_from_family_file_literal_variant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&gfl(&["--seed", "7", "oracle", "gen", "--k", "2", "-o", p])), 0);
    let outer = json(&gfl(&["pipeline", "run", "--family", p, "--k", "2"]));
    let out = gfl(&["pipeline", "run", "--family", p, "--k", "2", "--vsg-variant", "literal"]);
    let literal = json(&out);
    valid("pipeline-report.schema.json", &literal);
    assert_eq!(literal["vsg_variant"], "literal");
    assert_eq!(literal["family_id"], "f");
    assert_eq!(literal["seed"], Value::Null);
    assert_eq!(outer["blocks"], literal["blocks"]);
    assert!(matches!(code(&out), 0 | 1));
}

#[test]
fn pipeline_insufficient_domain() {
    let out = gfl(&["--seed", "7", "pipeline", "run", "--k", "2", "--d", "3", "--xbound", "12", "--x-max", "20"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    valid("pipeline-report.schema.json", &v);
    assert_eq!(v["error_kind"], "InsufficientDomain");
    assert!(v["error"].as_str().unwrap().contains("31 required"));
}

#[test]
fn pipeline_under_spaced_blocks_are_refused() {
    let out = gfl(&[
        "--seed", "77", "pipeline", "run", "--k", "1", "--sigma-max", "40", "--blocks", "0:1,1:2;2:1,3:2;4:1,5:2",
    ]);
    let v = json(&out);
    valid("pipeline-report.schema.json", &v);
    if v["status"] == "not_homogeneous" {
        assert_eq!(code(&out), 1);
        assert_eq!(v["decoded"], serde_json::json!([]));
    } else {
        assert_ne!(v["status"], "ok");
    }
}

#[test]
fn pipeline_needs_seed_or_family() {
    let out = gfl(&["pipeline", "run", "--k", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn text_and_json_carry_the_same_leaves() {
    fn leaves(v: &Value, path: &str, out: &mut Vec<String>) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    leaves(x, &if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, out);
                }
            }
            Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
                for (i, x) in items.iter().enumerate() {
                    leaves(x, &format!("{path}[{i}]"), out);
                }
            }
            Value::String(s) => out.push(format!("{path}: {s}")),
            other => out.push(format!("{path}: {other}")),
        }
    }
    for args in [
        vec!["elem", "stats", "1:1,3:2,5:1"],
        vec!["span", "enum", "--k", "2", "--blocks", "0:2;3:1,4:2"],
        vec!["search", "subspace", "--k", "1", "--n", "4", "--d", "2"],
        vec!["--seed", "7", "pipeline", "run", "--k", "1"],
    ] {
        let j = json(&gfl(&args));
        let mut text_args = vec!["--format", "text"];
        text_args.extend(&args);
        let text = stdout(&gfl(&text_args));
        let mut expected = Vec::new();
        leaves(&j, "", &mut expected);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), expected.len(), "{args:?}");
        for line in &expected {
            assert!(lines.contains(&line.as_str()), "{args:?}: missing `{line}`");
        }
    }
}

#[test]
fn thread_cap_does_not_change_answers() {
    let args = ["--seed", "2", "search", "subspace", "--k", "2", "--n", "4", "--d", "2", "--coloring", "hash"];
    assert_eq!(stdout(&gfl(&args)), stdout(&gfl_env(&args, "GFL_THREADS", "1")));
    assert_eq!(code(&gfl_env(&args, "GFL_THREADS", "many")), 2);
}

#[test]
fn element_serde_matches_schema() {
    let e: FinElement = "0:2,3:1".parse().unwrap();
    valid("element.schema.json", &serde_json::to_value(&e).unwrap());
}
