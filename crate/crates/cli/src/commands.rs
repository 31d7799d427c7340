use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::value::RawValue;

use repseq::estimation::Status;
use repseq::scalar::parse_decimal;
use repseq::{
    build_rule, count_word, estimate_root, iterate_counts, iterate_words, literal_overflow_step, verify_commutation,
    BigInt, Counts, Engine, Error, Letter, Matrix, Options, Polynomial, Rational, Report, RleWord, Sign, Word,
    WordLike,
};

use crate::args::{Format, RunConfig, DEFAULT_TRACE_DEPTH, DEFAULT_VERIFY_DEPTH};
use crate::exit;
use crate::render::{ratio_sig17, sig17};

/// Longest random word generated by `verify`.
pub const VERIFY_MAX_WORD_LEN: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn new(code: i32, stdout: String, stderr: String) -> Self {
        Self { code, stdout, stderr }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Self::new(code, String::new(), stderr)
    }
}

fn error_outcome(e: &Error) -> Outcome {
    match e {
        Error::EngineOverflow { .. } => Outcome::fail(exit::ENGINE_OVERFLOW, format!("error: {e}")),
        _ => Outcome::fail(exit::INPUT_ERROR, format!("error: {e}")),
    }
}

fn load_polynomial(cfg: &RunConfig) -> Result<Polynomial, Outcome> {
    match (&cfg.poly, &cfg.coeffs) {
        (Some(text), None) => text.parse::<Polynomial>().map_err(|e| {
            let offset = match e {
                Error::Syntax { offset, .. } | Error::NonIntegerCoefficient { offset } => Some(offset),
                _ => None,
            };
            let mut msg = format!("error: {e}\n");
            if let Some(offset) = offset {
                let _ = writeln!(msg, "  {text}\n  {}^", " ".repeat(offset));
            }
            Outcome::fail(exit::INPUT_ERROR, msg)
        }),
        (None, Some(list)) => {
            let coeffs = list
                .split(',')
                .map(|c| c.trim().parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Outcome::fail(exit::INPUT_ERROR, format!("error: bad coefficient list {list:?}")))?;
            Polynomial::from_coefficients(&coeffs).map_err(|e| error_outcome(&e))
        }
        _ => Err(Outcome::fail(
            exit::INPUT_ERROR,
            "error: give exactly one of --poly or --coeffs",
        )),
    }
}

fn parse_tol(cfg: &RunConfig) -> Result<Rational, Outcome> {
    match parse_decimal::<BigInt>(&cfg.tol) {
        Some(t) if t > Rational::from_integer(BigInt::from(0)) => Ok(t),
        _ => Err(Outcome::fail(
            exit::INPUT_ERROR,
            format!("error: invalid option: --tol must be a positive decimal, got {:?}", cfg.tol),
        )),
    }
}

/// Exit code for a finished estimation.
pub fn report_exit_code(r: &Report) -> i32 {
    match (r.status, r.oracle_agreement) {
        (Status::Converged, Some(false)) => exit::ORACLE_DISAGREES,
        (Status::Converged, _) => exit::OK,
        (Status::NoRealLimit | Status::MaxIterationsReached | Status::DegenerateStart, _) => exit::NOT_CONVERGED,
    }
}

pub fn cmd_run(cfg: &RunConfig) -> Outcome {
    let p = match load_polynomial(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let tol = match parse_tol(cfg) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let defaults = Options::default();
    let opts = Options {
        initial: None,
        max_iters: cfg.iters,
        tol,
        engine: cfg.engine,
        word_cap: cfg.word_cap,
        oracle_precision: if cfg.no_oracle { None } else { defaults.oracle_precision },
    };
    let report = match estimate_root(&p, &opts) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };
    let code = report_exit_code(&report);
    let (stdout, stderr) = match cfg.format {
        Format::Table => (run_table(&report, cfg.engine), String::new()),
        Format::Json => (run_json(&report), String::new()),
        Format::Tsv => (run_tsv(&report), summary_line(&report)),
    };
    Outcome::new(code, stdout, stderr)
}

fn summary_line(r: &Report) -> String {
    let mut s = format!("status {} after {} iterations", r.status, r.iterations_used);
    if let Some(x) = r.final_f64() {
        let _ = write!(s, ", final {}", sig17(x));
    }
    s.push('\n');
    s
}

fn run_table(r: &Report, engine: Engine) -> String {
    let mut out = String::new();
    let a: Vec<String> = r.polynomial.a().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "polynomial: {}", r.polynomial);
    let _ = writeln!(out, "a: [{}]", a.join(", "));
    let _ = writeln!(out, "engine: {engine}");
    let _ = writeln!(out, "iter\tj\tnumerator\tdenominator\tvalue");
    for (i, row) in r.history.iter().enumerate() {
        for e in row {
            let _ = writeln!(
                out,
                "{i}\t{}\t{}\t{}\t{}",
                e.j,
                e.numerator,
                e.denominator,
                sig17(e.to_f64())
            );
        }
    }
    let _ = writeln!(out, "status: {}", r.status);
    let _ = writeln!(out, "iterations: {}", r.iterations_used);
    match &r.final_estimate {
        Some(x) => {
            let _ = writeln!(out, "final: {}/{} = {}", x.numer(), x.denom(), ratio_sig17(x));
        }
        None => {
            let _ = writeln!(out, "final: none");
        }
    }
    if let Some(res) = &r.residual {
        let _ = writeln!(out, "residual: {}", ratio_sig17(res));
    }
    match (&r.oracle_root, r.oracle_agreement) {
        (Some(root), agreement) => {
            let verdict = match agreement {
                Some(true) => "agrees",
                Some(false) => "DISAGREES: converged to a root other than the largest real root",
                None => "not compared",
            };
            let _ = writeln!(out, "oracle: {} ({verdict})", ratio_sig17(root));
        }
        (None, Some(false)) => {
            let _ = writeln!(out, "oracle: no real root found (DISAGREES)");
        }
        (None, _) => {
            let _ = writeln!(out, "oracle: no real root found");
        }
    }
    if let Some(note) = &r.note {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn run_tsv(r: &Report) -> String {
    let mut out = String::new();
    for (i, row) in r.history.iter().enumerate() {
        for e in row {
            let _ = writeln!(
                out,
                "{i}\t{}\t{}\t{}\t{}",
                e.j,
                e.numerator,
                e.denominator,
                sig17(e.to_f64())
            );
        }
    }
    out
}

#[derive(Serialize)]
struct JsonPolynomial {
    degree: usize,
    a: Vec<String>,
}

#[derive(Serialize)]
struct JsonRational {
    num: String,
    den: String,
    float: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonOracle {
    float: Box<RawValue>,
    agrees: bool,
}

#[derive(Serialize)]
struct JsonRatio {
    j: usize,
    num: String,
    den: String,
}

#[derive(Serialize)]
struct JsonIteration {
    iter: usize,
    ratios: Vec<JsonRatio>,
}

#[derive(Serialize)]
struct JsonReport {
    polynomial: JsonPolynomial,
    status: String,
    iterations: usize,
    #[serde(rename = "final")]
    final_estimate: Option<JsonRational>,
    oracle: Option<JsonOracle>,
    history: Vec<JsonIteration>,
}

fn raw_float(x: f64) -> Box<RawValue> {
    RawValue::from_string(sig17(x)).expect("sig17 renders valid JSON numbers")
}

fn json_polynomial(p: &Polynomial) -> JsonPolynomial {
    JsonPolynomial {
        degree: p.degree(),
        a: p.a().iter().map(ToString::to_string).collect(),
    }
}

fn run_json(r: &Report) -> String {
    let report = JsonReport {
        polynomial: json_polynomial(&r.polynomial),
        status: r.status.to_string(),
        iterations: r.iterations_used,
        final_estimate: r.final_estimate.as_ref().map(|x| JsonRational {
            num: x.numer().to_string(),
            den: x.denom().to_string(),
            float: raw_float(repseq::scalar::ratio_to_f64(x)),
        }),
        oracle: r.oracle_f64().map(|f| JsonOracle {
            float: raw_float(f),
            agrees: r.oracle_agreement.unwrap_or(false),
        }),
        history: r
            .history
            .iter()
            .enumerate()
            .map(|(iter, row)| JsonIteration {
                iter,
                ratios: row
                    .iter()
                    .map(|e| JsonRatio {
                        j: e.j,
                        num: e.numerator.to_string(),
                        den: e.denominator.to_string(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

fn counts_strings(v: &Counts) -> Vec<String> {
    v.entries().iter().map(ToString::to_string).collect()
}

#[derive(Serialize)]
struct JsonTraceStep {
    iter: usize,
    word: String,
    counts: Vec<String>,
}

#[derive(Serialize)]
struct JsonTrace {
    polynomial: JsonPolynomial,
    steps: Vec<JsonTraceStep>,
}

pub fn cmd_trace(cfg: &RunConfig) -> Outcome {
    let p = match load_polynomial(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let depth = cfg.depth.unwrap_or(DEFAULT_TRACE_DEPTH);
    let rule = match build_rule(&p) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };
    let start = Word::new(vec![Letter::plus(1)]);
    let rendered = if cfg.engine == Engine::Rle {
        trace_words(&rule, start.compress(), depth, cfg.word_cap)
    } else {
        match literal_overflow_step(&rule, &start, depth, cfg.word_cap) {
            Ok(Some(step)) => {
                return Outcome::fail(
                    exit::ENGINE_OVERFLOW,
                    format!(
                        "error: engine overflow at depth {step}: W_{step} exceeds the {}-letter cap (requested depth {depth}); use `run` with the counts engine",
                        cfg.word_cap
                    ),
                )
            }
            Ok(None) => {}
            Err(e) => return error_outcome(&e),
        }
        trace_words(&rule, start, depth, cfg.word_cap)
    };
    let steps = match rendered {
        Ok(steps) => steps,
        Err(e) => return error_outcome(&e),
    };
    let stdout = match cfg.format {
        Format::Table => steps
            .iter()
            .map(|(_, w, v)| format!("{w}\t({})\n", v.join(", ")))
            .collect(),
        Format::Tsv => steps
            .iter()
            .map(|(i, w, v)| format!("{i}\t{w}\t{}\n", v.join(",")))
            .collect(),
        Format::Json => {
            let trace = JsonTrace {
                polynomial: json_polynomial(&p),
                steps: steps
                    .into_iter()
                    .map(|(iter, word, counts)| JsonTraceStep { iter, word, counts })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&trace).expect("trace serializes");
            s.push('\n');
            s
        }
    };
    Outcome::new(exit::OK, stdout, String::new())
}

type TraceStep = (usize, String, Vec<String>);

fn trace_words<W: WordLike>(
    rule: &repseq::ReplacementRule,
    start: W,
    depth: usize,
    cap: u64,
) -> Result<Vec<TraceStep>, Error> {
    let words = iterate_words(rule, start, depth, cap)??;
    words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let v: Counts = count_word(w, rule.m())?;
            Ok((i, w.to_string(), counts_strings(&v)))
        })
        .collect()
}

#[derive(Serialize)]
struct JsonVerify {
    polynomial: JsonPolynomial,
    seed: u64,
    samples: usize,
    passed: usize,
    depth: usize,
    engines_agree: bool,
    counterexample: Option<String>,
}

pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    cmd_verify_with(cfg, |m| m)
}

/// `verify` with the iteration matrix passed through `tamper` first; the
/// identity gives the real check, anything else exercises the failure path.
pub fn cmd_verify_with(cfg: &RunConfig, tamper: impl FnOnce(Matrix) -> Matrix) -> Outcome {
    if cfg.samples == 0 {
        return Outcome::fail(exit::INPUT_ERROR, "error: invalid option: --samples must be at least 1");
    }
    let p = match load_polynomial(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let rule = match build_rule(&p) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };
    let matrix = tamper(p.iteration_matrix());
    let m = p.degree();
    let depth = cfg.depth.unwrap_or(DEFAULT_VERIFY_DEPTH);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut passed = 0;
    let mut counterexample = None;
    for _ in 0..cfg.samples {
        let w = random_word(&mut rng, m);
        match verify_commutation(&rule, &matrix, &w, cfg.word_cap) {
            Ok(true) => passed += 1,
            Ok(false) => {
                counterexample.get_or_insert_with(|| w.to_string());
            }
            Err(e) => return error_outcome(&e),
        }
    }

    let engines = compare_engines(&rule, &matrix, m, depth, cfg.word_cap);
    let (engines_agree, engine_failure) = match engines {
        Ok(None) => (true, None),
        Ok(Some(i)) => (false, Some(i)),
        Err(e) => return error_outcome(&e),
    };
    let ok = passed == cfg.samples && engines_agree;
    let code = if ok { exit::OK } else { exit::CHECK_FAILED };

    let stdout = match cfg.format {
        Format::Json => {
            let report = JsonVerify {
                polynomial: json_polynomial(&p),
                seed: cfg.seed,
                samples: cfg.samples,
                passed,
                depth,
                engines_agree,
                counterexample: counterexample.clone(),
            };
            let mut s = serde_json::to_string_pretty(&report).expect("verify report serializes");
            s.push('\n');
            s
        }
        Format::Table | Format::Tsv => {
            let mut out = String::new();
            let _ = writeln!(out, "polynomial: {p}");
            let _ = writeln!(out, "seed: {}", cfg.seed);
            let _ = writeln!(out, "commutation: {passed}/{} passed", cfg.samples);
            match engine_failure {
                None => {
                    let _ = writeln!(out, "engines: word, rle and counts agree through depth {depth}");
                }
                Some(i) => {
                    let _ = writeln!(out, "engines: mismatch at iteration {i}");
                }
            }
            if let Some(w) = &counterexample {
                let _ = writeln!(out, "counterexample: {w}");
            }
            let _ = writeln!(out, "result: {}", if ok { "PASS" } else { "FAIL" });
            out
        }
    };
    Outcome::new(code, stdout, String::new())
}

fn random_word(rng: &mut ChaCha8Rng, m: usize) -> Word {
    let len = rng.gen_range(0..=VERIFY_MAX_WORD_LEN);
    Word::new(
        (0..len)
            .map(|_| {
                let index = rng.gen_range(1..=m);
                let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
                Letter::new(index, sign)
            })
            .collect(),
    )
}

/// First iteration at which the three engines disagree, if any.
fn compare_engines(
    rule: &repseq::ReplacementRule,
    matrix: &Matrix,
    m: usize,
    depth: usize,
    cap: u64,
) -> Result<Option<usize>, Error> {
    let start = Word::new(vec![Letter::plus(1)]);
    let words = iterate_words(rule, start.clone(), depth, cap)??;
    let rles: Vec<RleWord> = iterate_words(rule, start.compress(), depth, cap)??;
    let counts = iterate_counts(matrix, Counts::unit(m, 1), depth)?;
    for i in 0..=depth {
        let a: Counts = count_word(&words[i], m)?;
        let b: Counts = count_word(&rles[i], m)?;
        if a != counts[i] || b != counts[i] {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn config(args: &[&str]) -> RunConfig {
        let mut full = vec!["repseq", "run"];
        full.extend_from_slice(args);
        match crate::Cli::parse_from(full).command {
            crate::Command::Run(cfg) => cfg,
            _ => unreachable!(),
        }
    }

    #[test]
    fn random_words_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = random_word(&mut a, 3);
            assert!(w.len() <= VERIFY_MAX_WORD_LEN);
            assert!(w.letters().iter().all(|l| (1..=3).contains(&l.index)));
            assert_eq!(w, random_word(&mut b, 3));
        }
    }

    #[test]
    fn coefficient_source() {
        let cfg = config(&["--coeffs", "-1,-1,1"]);
        assert_eq!(load_polynomial(&cfg).unwrap().to_string(), "x^2 - x - 1");
        let cfg = config(&["--coeffs", "1,2"]);
        assert_eq!(load_polynomial(&cfg).unwrap_err().code, exit::INPUT_ERROR);
        let cfg = config(&["--coeffs", "1,a,1"]);
        assert_eq!(load_polynomial(&cfg).unwrap_err().code, exit::INPUT_ERROR);
    }

    #[test]
    fn syntax_errors_point_at_the_offset() {
        let cfg = config(&["--poly", "x^2 + y"]);
        let err = load_polynomial(&cfg).unwrap_err();
        assert!(err.stderr.contains("byte 6"), "{}", err.stderr);
        assert!(err.stderr.contains("        ^"), "{}", err.stderr);
    }

    #[test]
    fn tolerance_validation() {
        assert!(parse_tol(&config(&["--poly", "x-1", "--tol", "0"])).is_err());
        assert!(parse_tol(&config(&["--poly", "x-1", "--tol", "-1e-3"])).is_err());
        assert!(parse_tol(&config(&["--poly", "x-1", "--tol", "abc"])).is_err());
        assert!(parse_tol(&config(&["--poly", "x-1", "--tol", "0.5"])).is_ok());
    }
}
