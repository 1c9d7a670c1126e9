#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

pub fn ramify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramify")).args(args).env_remove("RAMIFY_PRECISION").output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

pub fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", String::from_utf8_lossy(&out.stdout)))
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("golden").join(name)
}

/// Validates `doc` against `schema/<name>.schema.json`, panicking with every violation.
pub fn assert_schema(name: &str, doc: &Value) {
    let path = manifest_dir().join("schema").join(format!("{name}.schema.json"));
    let text = std::fs::read_to_string(&path).expect("schema file exists");
    let schema: Value = serde_json::from_str(&text).expect("schema is JSON");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{}: {e}", e.instance_path)).collect(),
    };
    panic!("document violates {name} schema:\n{}\n{doc:#}", msgs.join("\n"));
}

/// Parses "a" or "a/b" into a reduced pair with positive denominator.
pub fn ratio(s: &str) -> (i64, i64) {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    };
    let g = gcd(n, d);
    (n / g, d / g)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
