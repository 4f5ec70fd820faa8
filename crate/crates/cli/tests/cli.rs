use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const S3: &str = r#"{"labels":["a","b","c"],"dist":[["0","1","2"],["1","0","1"],["2","1","0"]]}"#;
const S2: &str = r#"{"labels":["p","q"],"dist":[["0","1"],["inf","0"]]}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(TempDir::new().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn qmet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmet"))
        .args(args)
        .env_remove("QMET_SEED")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = qmet(args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

/// True when no JSON number in the value is fractional.
fn integers_only(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_u64() || n.is_i64(),
        Value::Array(a) => a.iter().all(integers_only),
        Value::Object(o) => o.values().all(integers_only),
        _ => true,
    }
}

#[test]
fn validate_accepts_s3() {
    let d = Dir::new();
    let (code, json) = run(&["validate", s(&d.file("s3.json", S3))]);
    assert_eq!(code, 0);
    assert_eq!(json["valid"], true);
    assert_eq!(json["points"], 3);
}

#[test]
fn validate_names_t0_pair() {
    let d = Dir::new();
    let bad = r#"{"labels":["u","v"],"dist":[["0","0"],["0","0"]]}"#;
    let (code, json) = run(&["validate", s(&d.file("t0.json", bad))]);
    assert_eq!(code, 2);
    assert_eq!(json["valid"], false);
    let text = json["violations"].to_string();
    assert!(text.contains("\"u\"") && text.contains("\"v\""), "{}", text);
}

#[test]
fn validate_rejects_triangle_violation() {
    let d = Dir::new();
    let bad = r#"{"labels":["a","b","c"],"dist":[["0","1","5"],["1","0","1"],["5","1","0"]]}"#;
    let (code, _) = run(&["validate", s(&d.file("tri.json", bad))]);
    assert_eq!(code, 2);
}

#[test]
fn validate_truncated_file_is_parse_error() {
    let d = Dir::new();
    let (code, _) = run(&["validate", s(&d.file("cut.json", &S3[..30]))]);
    assert_eq!(code, 3);
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(run(&["validate", "/nonexistent/space.json"]).0, 3);
}

#[test]
fn dkrh_on_s3_example() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let mu = d.file("mu.json", r#"{"weights":{"a":"1"}}"#);
    let nu = d.file("nu.json", r#"{"weights":{"b":"1/2","c":"1/2"}}"#);
    let (code, json) = run(&["dist", "--kind", "dkrh", s(&sp), s(&mu), s(&nu)]);
    assert_eq!(code, 0);
    assert_eq!(json["value"], "3/2");
    assert_eq!(json["routes"]["lp"], "3/2");
    assert_eq!(json["routes"]["transport"], "3/2");
    assert_eq!(json["routes_agree"], true);
    let plan = json["witness"]["plan"].to_string();
    assert!(plan.contains("1/2"), "{}", plan);
    assert!(integers_only(&json));
}

#[test]
fn dkrh_a_needs_bound() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let mu = d.file("mu.json", r#"{"weights":{"a":"1"}}"#);
    assert_eq!(run(&["dist", "--kind", "dkrh-a", s(&sp), s(&mu), s(&mu)]).0, 1);
}

#[test]
fn dkrh_a_is_capped() {
    let d = Dir::new();
    let sp = d.file("s2.json", S2);
    let q = d.file("q.json", r#"{"weights":{"q":"1"}}"#);
    let p = d.file("p.json", r#"{"weights":{"p":"1"}}"#);
    let (code, json) = run(&["dist", "--kind", "dkrh", s(&sp), s(&q), s(&p)]);
    assert_eq!((code, json["value"].as_str()), (0, Some("inf")));
    let (code, json) = run(&["dist", "--kind", "dkrh-a", "--bound", "1/2", s(&sp), s(&q), s(&p)]);
    assert_eq!((code, json["value"].as_str()), (0, Some("1/2")));
}

#[test]
fn nonpositive_bound_is_usage_error() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    assert_eq!(run(&["dist", "--kind", "dh", "--bound", "0", s(&sp), s(&sp), s(&sp)]).0, 1);
}

#[test]
fn dh_equal_sets_is_zero() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let c = d.file("c.json", r#"["a","b"]"#);
    let (code, json) = run(&["dist", "--kind", "dh", s(&sp), s(&c), s(&c)]);
    assert_eq!(code, 0);
    assert_eq!(json["value"], "0");
}

#[test]
fn dq_on_non_upper_set_is_domain_error() {
    let d = Dir::new();
    let sp = d.file("p2.json", r#"{"labels":["bot","top"],"dist":[["0","0"],["inf","0"]]}"#);
    let bot = d.file("bot.json", r#"["bot"]"#);
    assert_eq!(run(&["dist", "--kind", "dq", s(&sp), s(&bot), s(&bot)]).0, 2);
}

#[test]
fn unknown_label_is_parse_error() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let c = d.file("c.json", r#"["z"]"#);
    assert_eq!(run(&["dist", "--kind", "dh", s(&sp), s(&c), s(&c)]).0, 3);
}

#[test]
fn dp_and_fork_agree_on_lenses() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let l = d.file("l.json", r#"{"Q":["a"],"C":["a"]}"#);
    let l2 = d.file("l2.json", r#"{"Q":["b","c"],"C":["b","c"]}"#);
    let (code, json) = run(&["dist", "--kind", "dp", s(&sp), s(&l), s(&l2)]);
    assert_eq!((code, json["value"].as_str()), (0, Some("2")));
    let (code, json) = run(&["dist", "--kind", "dp", "--bound", "1", s(&sp), s(&l), s(&l2)]);
    assert_eq!((code, json["value"].as_str()), (0, Some("1")));

    let fork = |pts: &[&str]| {
        let gens: Vec<String> = pts.iter().map(|p| format!(r#"{{"weights":{{"{}":"1"}}}}"#, p)).collect();
        let gens = gens.join(",");
        format!(
            r#"{{"lower":{{"kind":"superlinear","generators":[{g}]}},"upper":{{"kind":"sublinear","generators":[{g}]}}}}"#,
            g = gens
        )
    };
    let f = d.file("f.json", &fork(&["a"]));
    let f2 = d.file("f2.json", &fork(&["b", "c"]));
    let (code, json) = run(&["dist", "--kind", "fork", "--bound", "1", s(&sp), s(&f), s(&f2)]);
    assert_eq!((code, json["value"].as_str()), (0, Some("1")));
    assert_eq!(json["walley"], "exhaustive");
}

#[test]
fn forks_failing_walley_are_rejected() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let fork = |lower: &str, a: &str, upper: &str, b: &str| {
        format!(
            r#"{{"lower":{{"kind":"{}","generators":[{{"weights":{{"{}":"1"}}}}]}},"upper":{{"kind":"{}","generators":[{{"weights":{{"{}":"1"}}}}]}}}}"#,
            lower, a, upper, b
        )
    };
    let apart = d.file("apart.json", &fork("superlinear", "b", "sublinear", "a"));
    let out = qmet(&["dist", "--kind", "fork", "--bound", "1", s(&sp), s(&apart), s(&apart)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lhs"));
    let swapped = d.file("swapped.json", &fork("sublinear", "a", "superlinear", "a"));
    assert_eq!(run(&["dist", "--kind", "fork", s(&sp), s(&swapped), s(&swapped)]).0, 2);
}

#[test]
fn invalid_lens_is_domain_error() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let l = d.file("l.json", r#"{"Q":["a"],"C":["b"]}"#);
    assert_eq!(run(&["dist", "--kind", "dp", s(&sp), s(&l), s(&l)]).0, 2);
}

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(qmet(&["check", "nonsense"]).status.code(), Some(1));
}

#[test]
fn zero_trials_is_usage_error() {
    assert_eq!(qmet(&["check", "axioms", "--trials", "0"]).status.code(), Some(1));
}

#[test]
fn check_duality_passes() {
    let (code, json) = run(&["check", "duality", "--seed", "7", "--trials", "200"]);
    assert_eq!(code, 0);
    assert_eq!(json["passed"], true);
    assert_eq!(json["properties"]["duality.kantorovich"]["checked"], 200);
    assert!(integers_only(&json));
}

#[test]
fn check_is_deterministic_and_seed_env_applies() {
    let a = qmet(&["check", "walley", "--seed", "11", "--trials", "15"]);
    let b = Command::new(env!("CARGO_BIN_EXE_qmet"))
        .args(["check", "walley", "--trials", "15"])
        .env("QMET_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qmet(&["check", "walley", "--seed", "12", "--trials", "15"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn check_writes_report_file() {
    let d = Dir::new();
    let out = d.0.path().join("report.json");
    let o = qmet(&["check", "monad", "--seed", "3", "--trials", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), o.stdout);
}

#[test]
fn check_on_fixed_space() {
    let d = Dir::new();
    let sp = d.file("s3.json", S3);
    let (code, json) = run(&["check", "powerdomains", "--space", s(&sp), "--trials", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json["space"], "file");
}
