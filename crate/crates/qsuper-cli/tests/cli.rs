use std::process::{Command, Output};

use serde_json::Value;

fn qsuper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsuper")).args(args).output().expect("spawn qsuper")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn tmp_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("qsuper-cli-{}-{name}", std::process::id()))
}

#[test]
fn supernomial_q_form() {
    let out = qsuper(&["supernomial", "--L", "2", "--a", "0"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["schema"], 1);
    // [2 choose 1]_q = 1 + q
    assert_eq!(v["display"], "1 + q");
}

#[test]
fn supernomial_half_integer_and_negative_index() {
    let out = qsuper(&["supernomial", "--L", "1,1", "--a", "-1/2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = qsuper(&["supernomial", "--L", "1,1", "--a", "1/3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn identity_check_examples() {
    let out = qsuper(&["identity-check", "--p", "7", "--k", "2", "--N", "1", "--a", "1", "--b", "2", "--L", "3"]);
    let v = json_of(&out);
    assert_eq!(code(&out), 0, "{v}");
    assert_eq!(v["equal"], true);
    assert!(v.get("elapsed").is_none());
    assert!(v["delta"]["den"].as_i64().unwrap() > 0);

    let out = qsuper(&["identity-check", "--p", "5", "--k", "1", "--N", "2", "--a", "1", "--b", "3", "--L", "1,1"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn timing_flag_adds_elapsed() {
    let out = qsuper(&["--timing", "identity-check", "--p", "7", "--k", "2", "--N", "1", "--a", "1", "--b", "2", "--L", "3"]);
    assert_eq!(code(&out), 0);
    assert!(json_of(&out)["elapsed"].is_number());
}

#[test]
fn matprod_examples() {
    let out = qsuper(&["matprod", "--p", "6", "--L", "1,0,1", "--a", "2", "--b", "4"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["lhs"], v["rhs"]);
    let out = qsuper(&["matprod", "--p", "6", "--L", "1,0,1", "--a", "2", "--b", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn ts_decomp_and_partitions() {
    let out = qsuper(&["ts-decomp", "--p", "7", "--k", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["schema"], 1);

    let out = qsuper(&["partitions", "--L", "1,1", "--a", "2", "--list"]);
    let v = json_of(&out);
    assert_eq!(v["count"], 2);
    assert_eq!(v["partitions"], serde_json::json!([[2, 1], [2, 2]]));
}

#[test]
fn series_subcommands() {
    // Partition numbers.
    let out = qsuper(&["series", "--what", "string", "--order", "6", "--N", "1", "--L", "", "--a", "0"]);
    assert_eq!(code(&out), 0);
    let coefs: Vec<String> = json_of(&out)["series"].as_array().unwrap().iter().map(|t| t[2].as_str().unwrap().to_string()).collect();
    assert_eq!(coefs, ["1", "1", "2", "3", "5", "7", "11"]);

    let out = qsuper(&["series", "--what", "bfunction", "--order", "4", "--N", "2", "--K", "2", "--L", "1,0", "--sigma", "0,1", "--a", "1"]);
    assert_eq!(code(&out), 0);
    let out = qsuper(&["series", "--what", "virasoro", "--order", "4", "--p", "8", "--k", "3", "--N", "1", "--a", "2", "--b", "3", "--L", "1"]);
    assert_eq!(code(&out), 0);
    let out = qsuper(&["series", "--what", "branching", "--order", "4", "--N", "1", "--P", "3", "--Pprime", "4", "--r", "1", "--s", "1"]);
    assert_eq!(code(&out), 0);
    let out = qsuper(&["series", "--what", "string", "--order", "4", "--L", ""]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&qsuper(&["supernomial", "--a", "0"])), 2);
    assert_eq!(code(&qsuper(&["no-such-command"])), 2);
    assert_eq!(code(&qsuper(&["supernomial", "--L", "x", "--a", "0"])), 2);
}

#[test]
fn output_is_deterministic_with_sorted_keys() {
    let args = ["identity-check", "--p", "7", "--k", "2", "--N", "1", "--a", "1", "--b", "2", "--L", "3"];
    let a = qsuper(&args);
    let b = qsuper(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let text = String::from_utf8(a.stdout).unwrap();
    let first = text.find("\"delta\"").unwrap();
    assert!(first < text.find("\"equal\"").unwrap());
}

#[test]
fn tsv_output() {
    let out = qsuper(&["--format", "tsv", "supernomial", "--L", "2", "--a", "0"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "display\t1 + q"));
    assert!(text.lines().any(|l| l == "schema\t1"));
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let cfg = tmp_path("sweep.json");
    std::fs::write(&cfg, r#"{"pairs": [[7, 2], [8, 3]], "n_max": 2, "l_budget": 2}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let one = qsuper(&["sweep", "--config", cfg, "--workers", "1"]);
    let two = qsuper(&["sweep", "--config", cfg, "--workers", "2"]);
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, two.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_qsuper")).args(["sweep", "--config", cfg]).env("QSUPER_WORKERS", "3").output().unwrap();
    assert_eq!(one.stdout, env.stdout);

    let v = json_of(&one);
    assert_eq!(v["schema"], 1);
    assert!(v["passed"].as_u64().unwrap() > 0);
    assert_eq!(v["failed"], 0);
    assert!(v["points"][0].get("millis").is_none());

    let tsv = qsuper(&["--format", "tsv", "sweep", "--config", cfg]);
    let text = String::from_utf8(tsv.stdout).unwrap();
    assert_eq!(text.lines().count() as u64, 1 + v["points"].as_array().unwrap().len() as u64);
}

#[test]
fn sweep_writes_output_file() {
    let cfg = tmp_path("sweep-out.json");
    let out_path = tmp_path("report.json");
    std::fs::write(&cfg, r#"{"pairs": [[7, 2]], "n_max": 1, "l_budget": 1}"#).unwrap();
    let out = qsuper(&["sweep", "--config", cfg.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written["passed"], json_of(&out)["passed"]);
    let bad = qsuper(&["sweep", "--config", "/nonexistent/qsuper.json"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn quick_selftest_passes() {
    let out = qsuper(&["selftest", "--quick"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["scale"], "quick");
    assert_eq!(v["criteria"].as_array().unwrap().len(), 12);
    assert!(v["criteria"][0].get("seconds").is_none());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}
