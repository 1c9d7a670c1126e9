//! Byte-for-byte comparisons against committed outputs.
//!
//! Set `RAMIFY_UPDATE_GOLDEN=1` to rewrite the files after an intended change.

mod common;

use common::{assert_schema, golden_path, ramify, stdout};

fn check(file: &str, schema: Option<&str>, args: &[&str]) {
    let out = ramify(args);
    let text = stdout(&out);
    if let Some(name) = schema {
        let doc: serde_json::Value = serde_json::from_str(&text).expect("JSON output");
        assert_schema(name, &doc);
    }
    let path = golden_path(file);
    if std::env::var_os("RAMIFY_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).expect("golden file exists");
    assert_eq!(text, expected, "output of {args:?} differs from {file}");
}

#[test]
fn classify_q8_over_f4() {
    check(
        "classify_q8_f4.json",
        Some("classify"),
        &["classify", "-p", "2", "-f", "2", "--group", "q8", "--beta1", "t^-3", "--beta2", "g*t^-5"],
    );
}

#[test]
fn classify_heisenberg() {
    check(
        "classify_heis_p3.json",
        Some("classify"),
        &["classify", "-p", "3", "--group", "heis", "--beta1", "t^-1", "--beta2", "t^-5"],
    );
}

#[test]
fn classify_table_view() {
    check(
        "classify_mod_p3.txt",
        None,
        &["classify", "-p", "3", "--group", "mod", "--beta1", "t^-1", "--beta2", "t^-4", "--output", "table"],
    );
}

#[test]
fn reduce_over_k() {
    check("reduce_k_p2.json", Some("reduce"), &["reduce", "-p", "2", "--kappa", "t^-4 + t^-3 + t^-2"]);
}

#[test]
fn reduce_over_l() {
    check("reduce_l_p3.json", Some("reduce"), &["reduce", "-p", "3", "--beta", "t^-1", "--ell", "0", "--ell", "t^-4"]);
}

#[test]
fn decompose() {
    check("decompose_p3.json", Some("decompose"), &["decompose", "-p", "3", "--beta1", "t^-1", "--beta2", "2*t^-2"]);
}

#[test]
fn sweep_csv() {
    check("sweep_p2.csv", None, &["sweep", "-p", "2", "--max-break", "5", "--seed", "3", "--output", "csv"]);
}

#[test]
fn sweep_json() {
    check("sweep_p3.json", Some("sweep"), &["sweep", "-p", "3", "--max-break", "4", "--seed", "1"]);
}

#[test]
fn selftest() {
    check("selftest_p5.json", Some("selftest"), &["selftest", "-p", "5", "--trials", "20", "--seed", "11"]);
}

#[test]
fn error_document() {
    check(
        "error_wrong_char.json",
        Some("error"),
        &["classify", "-p", "3", "--group", "q8", "--beta1", "t^-1", "--beta2", "t^-2"],
    );
}
