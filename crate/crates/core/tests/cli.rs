use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qmbmw"));
    c.args(args).env_remove("QMBMW_BACKEND");
    c
}

fn run(args: &[&str]) -> Output {
    bin(args).output().unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmbmw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn lines(path: &PathBuf) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn zero_denominator_is_a_config_error() {
    let o = run(&["verify", "--dim", "3", "--q", "7/0", "--suite", "rmatrix"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn dump_order_beyond_max_order_is_a_config_error() {
    let o = run(&["dump", "--dim", "3", "--which", "aN", "--order", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["dump", "--dim", "3", "--which", "aN"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["dump", "--dim", "3", "--which", "aN", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn rmatrix_suite_passes_with_header_and_summary() {
    let out = tmp("rmatrix.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--family",
        "so",
        "--dim",
        "3",
        "--q",
        "7/5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = lines(&out);
    assert_eq!(rows[0]["config"]["backend"], "rational");
    assert!(rows[0].get("gradedDims").is_some());
    let last = rows.last().unwrap();
    assert_eq!(last["summary"]["fail"], 0);
    assert_eq!(
        last["summary"]["total"].as_u64().unwrap() as usize,
        rows.len() - 2
    );
    for r in &rows[1..rows.len() - 1] {
        assert!(r["suite"] == "rmatrix" || r["suite"] == "k-identities");
        assert_eq!(r["status"], "pass");
    }
}

#[test]
fn graded_dimensions_appear_in_the_header() {
    let out = tmp("qma.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "qma",
        "--dim",
        "3",
        "--max-degree",
        "2",
        "--n-max",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dims = lines(&out)[0]["gradedDims"].clone();
    assert_eq!(dims[2]["degree"], 2);
    assert_eq!(dims[2]["dim"], 35);
}

#[test]
fn perturbed_import_fails_checks() {
    let r = tmp("r-perturbed.json");
    let o = run(&["dump-r", "--dim", "3", "--out", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    v["entries"][0]["value"] = Value::from("8/5");
    std::fs::write(&r, v.to_string()).unwrap();
    let out = tmp("perturbed.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--family",
        "import",
        "--r-matrix",
        r.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(lines(&out).iter().any(|l| l["status"] == "fail"));
}

#[test]
fn malformed_import_is_a_config_error() {
    let r = tmp("broken.json");
    std::fs::write(&r, "{\"dimV\": 3, \"entries\": [").unwrap();
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--family",
        "import",
        "--r-matrix",
        r.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--family",
        "import",
        "--r-matrix",
        tmp("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dumped_r_round_trips_through_import() {
    let r = tmp("r-sp4.json");
    let o = run(&[
        "dump-r",
        "--family",
        "sp",
        "--dim",
        "4",
        "--q",
        "-3/7",
        "--out",
        r.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = tmp("import.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--family",
        "import",
        "--r-matrix",
        r.to_str().unwrap(),
        "--q",
        "-3/7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(lines(&out)[0]["config"]["dimV"], 4);
}

#[test]
fn backend_environment_variable_overrides_the_flag() {
    let out = tmp("env.jsonl");
    let o = bin(&[
        "verify",
        "--suite",
        "rmatrix",
        "--dim",
        "3",
        "--backend",
        "rational",
        "--out",
        out.to_str().unwrap(),
    ])
    .env("QMBMW_BACKEND", "modular")
    .output()
    .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let header = &lines(&out)[0];
    assert_eq!(header["config"]["backend"], "modular");
    assert_eq!(header["modular"]["primes"].as_array().unwrap().len(), 2);

    let o = bin(&["verify", "--suite", "rmatrix", "--dim", "3"])
        .env("QMBMW_BACKEND", "float")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degree_four_defaults_to_modular() {
    let out = tmp("deg4.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--dim",
        "3",
        "--max-degree",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(lines(&out)[0]["config"]["backend"], "modular");
    let o = run(&[
        "verify",
        "--suite",
        "rmatrix",
        "--dim",
        "3",
        "--max-degree",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sp2_third_order_idempotents_are_skipped() {
    let out = tmp("sp2.jsonl");
    let o = run(&[
        "verify",
        "--suite",
        "idempotents",
        "--family",
        "sp",
        "--dim",
        "2",
        "--q",
        "7/5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = lines(&out);
    let a3: Vec<_> = rows
        .iter()
        .filter(|r| r["check"] == "idempotent-a3")
        .collect();
    assert_eq!(a3.len(), 1);
    assert_eq!(a3[0]["status"], "skipped");
    assert!(a3[0]["reason"].as_str().unwrap().starts_with("μ = −q⁻³"));
}

#[test]
fn invalid_family_dimension_is_a_config_error() {
    assert_eq!(
        run(&["verify", "--family", "sp", "--dim", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--family", "so", "--dim", "2"])
            .status
            .code(),
        Some(2)
    );
}
