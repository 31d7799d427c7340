use std::process::Command;

use repseq::BigInt;
use repseq_cli::{cmd_verify_with, exit, run_from_args, Command as Sub};
use serde_json::Value;

fn repseq(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_repseq"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn is_int_string(v: &Value) -> bool {
    v.as_str()
        .is_some_and(|s| s.parse::<BigInt>().is_ok())
}

/// Checks the stable report keys and their types.
fn assert_report_schema(v: &Value) {
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["final", "history", "iterations", "oracle", "polynomial", "status"]);

    let poly = &v["polynomial"];
    let degree = poly["degree"].as_u64().unwrap() as usize;
    let a = poly["a"].as_array().unwrap();
    assert_eq!(a.len(), degree);
    assert!(a.iter().all(is_int_string));

    assert!(["Converged", "MaxIterationsReached", "DegenerateStart", "NoRealLimit"]
        .contains(&v["status"].as_str().unwrap()));
    let iterations = v["iterations"].as_u64().unwrap() as usize;

    match &v["final"] {
        Value::Null => {}
        f => {
            assert!(is_int_string(&f["num"]) && is_int_string(&f["den"]));
            assert!(f["float"].is_number());
        }
    }
    match &v["oracle"] {
        Value::Null => {}
        o => {
            assert!(o["float"].is_number());
            assert!(o["agrees"].is_boolean());
        }
    }
    let history = v["history"].as_array().unwrap();
    assert_eq!(history.len(), iterations + 1);
    for (i, entry) in history.iter().enumerate() {
        assert_eq!(entry["iter"].as_u64().unwrap() as usize, i);
        for r in entry["ratios"].as_array().unwrap() {
            let j = r["j"].as_u64().unwrap() as usize;
            assert!((1..degree).contains(&j));
            assert!(is_int_string(&r["num"]) && is_int_string(&r["den"]));
            assert_ne!(r["den"].as_str().unwrap(), "0");
        }
    }
}

#[test]
fn json_reports_follow_the_schema_on_every_exit_path() {
    for (poly, code) in [
        ("x^2 - x - 1", exit::OK),
        ("x^2 + 2x + 2", exit::NOT_CONVERGED),
        ("x^2 + 3x + 1", exit::ORACLE_DISAGREES),
        ("x - 7", exit::OK),
    ] {
        let (c, out, _) = repseq(&["run", "--poly", poly, "--format", "json"]);
        assert_eq!(c, code, "{poly}");
        assert_report_schema(&serde_json::from_str(&out).unwrap());
    }
    let (c, out, _) = repseq(&["run", "--poly", "x^2 - x - 1", "--format", "json", "--iters", "3"]);
    assert_eq!(c, exit::NOT_CONVERGED);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_report_schema(&v);
    assert_eq!(v["status"], "MaxIterationsReached");
}

#[test]
fn no_oracle_drops_the_cross_check() {
    let (c, out, _) = repseq(&["run", "--poly", "x^2 + 3x + 1", "--format", "json", "--no-oracle"]);
    assert_eq!(c, exit::OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["oracle"].is_null());
}

#[test]
fn input_errors_exit_three() {
    for args in [
        vec!["run", "--poly", "2x - 1"],
        vec!["run", "--poly", "x^2 + 1.5"],
        vec!["run", "--poly", "7"],
        vec!["run", "--poly", "x^2 - 1", "--tol", "0"],
        vec!["run", "--poly", "x^2 - 1", "--iters", "0"],
        vec!["run", "--poly", "x^2 - 1", "--engine", "abacus"],
        vec!["run", "--poly", "x^2 - 1", "--coeffs", "-1,0,1"],
        vec!["run"],
        vec!["verify", "--poly", "x^2 - 1", "--samples", "0"],
        vec!["bogus"],
    ] {
        let (c, _, err) = repseq(&args);
        assert_eq!(c, exit::INPUT_ERROR, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (_, _, err) = repseq(&["run", "--poly", "x^2 + 1.5"]);
    assert!(err.contains("byte 7"), "{err}");
}

#[test]
fn coefficient_lists_match_text() {
    let (c1, a, _) = repseq(&["run", "--coeffs", "-1,-1,0,1", "--format", "tsv"]);
    let (c2, b, _) = repseq(&["run", "--poly", "x^3 - x - 1", "--format", "tsv"]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn tsv_rows_have_five_fields() {
    let (c, out, err) = repseq(&["run", "--poly", "x^3 - 2", "--format", "tsv"]);
    assert_eq!(c, 0);
    assert!(err.starts_with("status Converged"));
    for line in out.lines() {
        let fields: Vec<_> = line.split('\t').collect();
        assert_eq!(fields.len(), 5, "{line}");
        fields[0].parse::<usize>().unwrap();
        fields[1].parse::<usize>().unwrap();
        fields[2].parse::<BigInt>().unwrap();
        fields[3].parse::<BigInt>().unwrap();
        fields[4].parse::<f64>().unwrap();
    }
}

#[test]
fn trace_listing() {
    let (c, out, _) = repseq(&["trace", "--poly", "x^2 - x - 1", "--depth", "2"]);
    assert_eq!(c, 0);
    assert_eq!(
        out,
        "1+\t(1, 0)\n1+ 1+ 2+\t(2, 1)\n1+ 1+ 2+ 1+ 1+ 2+ 1+ 2+\t(5, 3)\n"
    );
    let (c, out, _) = repseq(&["trace", "--poly", "x^2 - x - 1", "--depth", "0"]);
    assert_eq!(c, 0);
    assert_eq!(out, "1+\t(1, 0)\n");

    let (c, out, _) = repseq(&["trace", "--poly", "x^2 - 3x + 1", "--depth", "2", "--engine", "rle"]);
    assert_eq!(c, 0);
    assert_eq!(out.lines().last().unwrap(), "1+^4 2+ 1+^4 2+ 1+^4 2+ 1+^4 2+ 1- 2+\t(15, 5)");

    let (c, out, _) = repseq(&["trace", "--poly", "x^2 - x - 1", "--depth", "1", "--format", "json"]);
    assert_eq!(c, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["steps"][1]["word"], "1+ 1+ 2+");
    assert_eq!(v["steps"][1]["counts"], serde_json::json!(["2", "1"]));
}

#[test]
fn trace_overflow_reports_the_depth() {
    let (c, out, err) = repseq(&["trace", "--poly", "x^2 - x - 1", "--depth", "60"]);
    assert_eq!(c, exit::ENGINE_OVERFLOW);
    assert!(out.is_empty());
    assert!(err.contains("depth 17"), "{err}");
    let (c, _, err) = repseq(&["trace", "--poly", "x^2 - x - 1", "--depth", "10", "--word-cap", "100"]);
    assert_eq!(c, exit::ENGINE_OVERFLOW);
    assert!(err.contains("depth 5"), "{err}");
    let (c, _, _) = repseq(&["run", "--poly", "x^2 - x - 1", "--engine", "word", "--word-cap", "1000"]);
    assert_eq!(c, exit::ENGINE_OVERFLOW);
}

#[test]
fn verify_passes_and_reports() {
    let (c, out, _) = repseq(&["verify", "--poly", "x^3 - x - 1", "--samples", "200", "--format", "json"]);
    assert_eq!(c, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], 200);
    assert_eq!(v["engines_agree"], true);
    assert!(v["counterexample"].is_null());
}

#[test]
fn injected_fault_is_caught() {
    let parsed = run_from_args(["repseq", "verify", "--poly", "x^3 - x - 1", "--samples", "50"]);
    assert_eq!(parsed.code, 0);

    let cli = <repseq_cli::Cli as clap::Parser>::parse_from(["repseq", "verify", "--poly", "x^3 - x - 1", "--samples", "50"]);
    let Sub::Verify(cfg) = cli.command else { unreachable!() };
    let faulty = cmd_verify_with(&cfg, |m| {
        let flipped = m.entry(1, 0) * -1;
        m.with_entry(1, 0, flipped).unwrap()
    });
    assert_eq!(faulty.code, exit::CHECK_FAILED);
    assert!(faulty.stdout.contains("counterexample: "), "{}", faulty.stdout);
    assert!(faulty.stdout.contains("result: FAIL"));
}

#[test]
fn help_exits_zero() {
    let (c, out, _) = repseq(&["--help"]);
    assert_eq!(c, 0);
    assert!(out.contains("trace"));
}
