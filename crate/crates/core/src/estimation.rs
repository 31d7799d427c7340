//! Root approximants from count ratios, convergence decisions, and an
//! independent bisection oracle for the largest real root.
//!
//! All decisions are made with exact rational arithmetic; floats only appear
//! when a caller asks for a rendering.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::counting::{count_word, step_counts, CountVector};
use crate::error::{Error, Result};
use crate::polynomial::{IterationMatrix, MonicPolynomial};
use crate::rewriting::{ReplacementRule, RleWord, Word, WordLike, DEFAULT_WORD_CAP};
use crate::scalar::{ratio_to_f64, Scalar};

/// Number of trailing iterations inspected by the no-limit test.
pub const OSCILLATION_WINDOW: usize = 8;

/// Iterations before sign flips or vanishing denominators can end a run early.
pub const OSCILLATION_WARMUP: usize = 64;

/// Minimum number of cells in the oracle's sign scan.
pub const ORACLE_MIN_CELLS: u64 = 4096;

const ORACLE_MAX_CELLS: u64 = 1 << 20;

/// `n_j / n_{j+1}` at one iteration; `j` is one-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioEstimate<T> {
    pub j: usize,
    pub numerator: T,
    pub denominator: T,
    pub iteration: usize,
}

impl<T: Scalar> RatioEstimate<T> {
    pub fn value(&self) -> Ratio<T> {
        Ratio::new(self.numerator.clone(), self.denominator.clone())
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value())
    }
}

/// Consecutive-entry ratios of a count vector, skipping zero denominators.
pub fn ratio_estimates<T: Scalar>(v: &CountVector<T>, iteration: usize) -> Result<Vec<RatioEstimate<T>>> {
    if v.dim() < 2 {
        return Err(Error::DegreeTooSmall);
    }
    Ok(v.entries()
        .windows(2)
        .enumerate()
        .filter(|(_, pair)| !pair[1].is_zero())
        .map(|(j, pair)| RatioEstimate {
            j: j + 1,
            numerator: pair[0].clone(),
            denominator: pair[1].clone(),
            iteration,
        })
        .collect())
}

/// True iff all consecutive ratios of `v` exist and lie within `tol` of each other,
/// i.e. `v` is proportional to `(λ^{m-1}, …, λ, 1)` up to `tol`.
pub fn eigenvector_profile_check<T: Scalar>(
    p: &MonicPolynomial<T>,
    v: &CountVector<T>,
    tol: &Ratio<T>,
) -> Result<bool> {
    let m = p.degree();
    if m < 2 {
        return Err(Error::DegreeTooSmall);
    }
    if v.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: v.dim(),
        });
    }
    let ratios = ratio_estimates(v, 0)?;
    if ratios.len() != m - 1 {
        return Ok(false);
    }
    let values: Vec<_> = ratios.iter().map(RatioEstimate::value).collect();
    Ok(spread(&values) <= *tol)
}

fn spread<T: Scalar>(values: &[Ratio<T>]) -> Ratio<T> {
    let min = values.iter().min();
    let max = values.iter().max();
    match (min, max) {
        (Some(lo), Some(hi)) => hi.clone() - lo.clone(),
        _ => Ratio::zero(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Counts,
    Word,
    Rle,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Counts => "counts",
            Engine::Word => "word",
            Engine::Rle => "rle",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counts" => Ok(Engine::Counts),
            "word" => Ok(Engine::Word),
            "rle" => Ok(Engine::Rle),
            other => Err(Error::InvalidOption(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIterationsReached,
    DegenerateStart,
    NoRealLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "Converged",
            Status::MaxIterationsReached => "MaxIterationsReached",
            Status::DegenerateStart => "DegenerateStart",
            Status::NoRealLimit => "NoRealLimit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EstimateOptions<T> {
    /// Starting counts; `None` means the single letter `A_1^+`.
    pub initial: Option<CountVector<T>>,
    pub max_iters: usize,
    pub tol: Ratio<T>,
    pub engine: Engine,
    /// Size cap for the word engines.
    pub word_cap: u64,
    /// Oracle precision; `None` skips the oracle cross-check.
    pub oracle_precision: Option<Ratio<T>>,
}

impl<T: Scalar> Default for EstimateOptions<T> {
    fn default() -> Self {
        Self {
            initial: None,
            max_iters: 256,
            tol: pow10_inv(12),
            engine: Engine::Counts,
            word_cap: DEFAULT_WORD_CAP,
            oracle_precision: Some(pow10_inv(18)),
        }
    }
}

fn pow10_inv<T: Scalar>(k: usize) -> Ratio<T> {
    let ten = T::from_u8(10).unwrap();
    Ratio::new(T::one(), num_traits::pow(ten, k))
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub polynomial: MonicPolynomial<T>,
    /// Ratio estimates for iterations `0 … iterations_used`.
    pub history: Vec<Vec<RatioEstimate<T>>>,
    pub status: Status,
    pub final_estimate: Option<Ratio<T>>,
    pub oracle_root: Option<Ratio<T>>,
    /// Present when the run converged and the oracle ran.
    pub oracle_agreement: Option<bool>,
    /// `|final − oracle|` when both exist.
    pub discrepancy: Option<Ratio<T>>,
    /// `|p(final)|`, exact.
    pub residual: Option<Ratio<T>>,
    pub iterations_used: usize,
    pub last_counts: CountVector<T>,
    pub note: Option<String>,
}

impl<T: Scalar> ConvergenceReport<T> {
    pub fn final_f64(&self) -> Option<f64> {
        self.final_estimate.as_ref().map(ratio_to_f64)
    }

    pub fn oracle_f64(&self) -> Option<f64> {
        self.oracle_root.as_ref().map(ratio_to_f64)
    }
}

/// Bound on `|p(x)|` expected at a converged estimate `x`:
/// `2 · tol · Σ_k k |c_k| (|x| + 1)^{k-1}`, a derivative bound over the unit
/// neighbourhood of `x` with room for an error up to twice the tolerance.
pub fn residual_bound<T: Scalar>(p: &MonicPolynomial<T>, x: &Ratio<T>, tol: &Ratio<T>) -> Ratio<T> {
    let radius = x.abs() + Ratio::one();
    let mut power = Ratio::one();
    let mut sum = Ratio::zero();
    for (k, c) in p.coefficients().iter().enumerate().skip(1) {
        let weight = T::from_usize(k).unwrap() * c.abs();
        sum = sum + power.clone() * Ratio::from_integer(weight);
        power = power * radius.clone();
    }
    Ratio::from_integer(T::one() + T::one()) * tol.clone() * sum
}

/// Largest real root of `p` to within `precision`, or `None` if no sign change
/// is found.
///
/// Scans `[-B, B]` (`B = 1 + max |a_i|`) from the right on an exact rational
/// grid, then bisects the rightmost sign change. Roots of even multiplicity
/// that do not change sign, or pairs of roots sharing one grid cell, are missed.
pub fn oracle_largest_real_root<T: Scalar>(p: &MonicPolynomial<T>, precision: &Ratio<T>) -> Option<Ratio<T>> {
    if p.degree() == 1 {
        return Some(Ratio::from_integer(p.a()[0].clone()));
    }
    let bound = p.cauchy_bound();
    let cells_wanted = bound.to_u64().map_or(ORACLE_MAX_CELLS, |b| b.saturating_mul(512));
    let cells = cells_wanted.clamp(ORACLE_MIN_CELLS, ORACLE_MAX_CELLS);
    let cells_t = T::from_u64(cells).unwrap();
    let two = T::one() + T::one();
    // Grid point k is (-B·N + 2B·k) / N.
    let point = |k: u64| {
        let k = T::from_u64(k).unwrap();
        Ratio::new(
            two.clone() * bound.clone() * k - bound.clone() * cells_t.clone(),
            cells_t.clone(),
        )
    };
    let mut hi = point(cells);
    debug_assert!(sign_at(p, &hi).is_positive());
    for k in (0..cells).rev() {
        let x = point(k);
        let s = sign_at(p, &x);
        if s.is_zero() {
            return Some(x);
        }
        if s.is_negative() {
            return Some(bisect(p, x, hi, precision));
        }
        hi = x;
    }
    None
}

fn bisect<T: Scalar>(p: &MonicPolynomial<T>, mut lo: Ratio<T>, mut hi: Ratio<T>, precision: &Ratio<T>) -> Ratio<T> {
    let half = Ratio::new(T::one(), T::one() + T::one());
    while hi.clone() - lo.clone() > *precision {
        let mid = (lo.clone() + hi.clone()) * half.clone();
        let s = sign_at(p, &mid);
        if s.is_zero() {
            return mid;
        }
        if s.is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

/// Sign of `p(num/den)` via the homogenised integer form `den^m · p(num/den)`.
fn sign_at<T: Scalar>(p: &MonicPolynomial<T>, x: &Ratio<T>) -> T {
    let (num, den) = (x.numer(), x.denom());
    let mut acc = T::one();
    let mut den_pow = T::one();
    for a in p.a() {
        den_pow = den_pow * den.clone();
        acc = acc * num.clone() - a.clone() * den_pow.clone();
    }
    acc.signum()
}

enum Source<T> {
    Counts(IterationMatrix<T>),
    Word(ReplacementRule, Word),
    Rle(ReplacementRule, RleWord),
}

impl<T: Scalar> Source<T> {
    fn new(p: &MonicPolynomial<T>, engine: Engine, initial: &CountVector<T>, cap: u64) -> Result<Self> {
        Ok(match engine {
            Engine::Counts => Source::Counts(p.iteration_matrix()),
            Engine::Word => Source::Word(ReplacementRule::build(p)?, initial.to_word(cap)?),
            Engine::Rle => Source::Rle(ReplacementRule::build(p)?, initial.to_word(cap)?),
        })
    }

    fn next(&mut self, current: &CountVector<T>, step: usize, cap: u64) -> Result<CountVector<T>> {
        fn advance<T: Scalar, W: WordLike>(rule: &ReplacementRule, w: &mut W, step: usize, cap: u64) -> Result<CountVector<T>> {
            *w = w.rewrite(rule, cap).map_err(|e| match e {
                Error::EngineOverflow { cap, .. } => Error::EngineOverflow { step, cap },
                other => other,
            })?;
            count_word(w, rule.m())
        }
        match self {
            Source::Counts(matrix) => step_counts(matrix, current),
            Source::Word(rule, w) => advance(rule, w, step, cap),
            Source::Rle(rule, w) => advance(rule, w, step, cap),
        }
    }
}

/// Runs the replacement iteration until the ratios settle, the budget runs out,
/// or the counts degenerate.
///
/// An iteration is settled when all `m − 1` ratios exist, lie within `tol` of
/// each other, and each lies within `tol` of its value one iteration earlier.
/// Two settled iterations in a row mean convergence.
pub fn estimate_root<T: Scalar>(p: &MonicPolynomial<T>, opts: &EstimateOptions<T>) -> Result<ConvergenceReport<T>> {
    if !opts.tol.is_positive() {
        return Err(Error::InvalidOption("tolerance must be positive".into()));
    }
    if opts.max_iters == 0 {
        return Err(Error::InvalidOption("max_iters must be positive".into()));
    }
    if let Some(prec) = &opts.oracle_precision {
        if !prec.is_positive() {
            return Err(Error::InvalidOption("oracle precision must be positive".into()));
        }
    }
    let m = p.degree();
    let initial = opts.initial.clone().unwrap_or_else(|| CountVector::unit(m, 1));
    if initial.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: initial.dim(),
        });
    }

    let mut report = ConvergenceReport {
        polynomial: p.clone(),
        history: Vec::new(),
        status: Status::MaxIterationsReached,
        final_estimate: None,
        oracle_root: None,
        oracle_agreement: None,
        discrepancy: None,
        residual: None,
        iterations_used: 0,
        last_counts: initial.clone(),
        note: None,
    };

    if m == 1 {
        // x - a_1 has its root in the coefficient; no ratios exist.
        report.status = Status::Converged;
        report.history.push(Vec::new());
        report.final_estimate = Some(Ratio::from_integer(p.a()[0].clone()));
        report.note = Some("degree 1: the root is a_1 itself".into());
    } else {
        run_iteration(p, opts, initial, &mut report)?;
    }

    if let Some(x) = &report.final_estimate {
        report.residual = Some(p.eval_at(x).abs());
    }
    if let Some(prec) = &opts.oracle_precision {
        report.oracle_root = oracle_largest_real_root(p, prec);
        if report.status == Status::Converged {
            let x = report.final_estimate.as_ref().unwrap();
            let allowed = (opts.tol.clone() + prec.clone()) * Ratio::from_integer(T::one() + T::one());
            match &report.oracle_root {
                Some(root) => {
                    let d = (x.clone() - root.clone()).abs();
                    report.oracle_agreement = Some(d <= allowed);
                    report.discrepancy = Some(d);
                }
                None => report.oracle_agreement = Some(false),
            }
        }
    }
    Ok(report)
}

fn run_iteration<T: Scalar>(
    p: &MonicPolynomial<T>,
    opts: &EstimateOptions<T>,
    initial: CountVector<T>,
    report: &mut ConvergenceReport<T>,
) -> Result<()> {
    let m = p.degree();
    let mut source = Source::new(p, opts.engine, &initial, opts.word_cap)?;
    let mut values: Vec<Vec<Option<Ratio<T>>>> = Vec::new();
    let mut v = initial;
    let mut streak = 0;

    for i in 0..=opts.max_iters {
        if i > 0 {
            v = source.next(&v, i, opts.word_cap)?;
        }
        report.iterations_used = i;
        if v.is_zero() {
            report.history.push(Vec::new());
            report.status = Status::DegenerateStart;
            report.last_counts = v;
            return Ok(());
        }
        let estimates = ratio_estimates(&v, i)?;
        let mut row = vec![None; m - 1];
        for e in &estimates {
            row[e.j - 1] = Some(e.value());
        }
        report.history.push(estimates);

        let settled = match (values.last(), complete(&row)) {
            (Some(prev), Some(now)) => match complete(prev) {
                Some(before) => {
                    spread(&now) <= opts.tol
                        && now
                            .iter()
                            .zip(&before)
                            .all(|(a, b)| (a.clone() - b.clone()).abs() <= opts.tol)
                }
                None => false,
            },
            _ => false,
        };
        values.push(row);
        streak = if settled { streak + 1 } else { 0 };
        if streak >= 2 {
            report.status = Status::Converged;
            report.final_estimate = values.last().unwrap()[0].clone();
            report.last_counts = v;
            return Ok(());
        }
        if i >= OSCILLATION_WARMUP && oscillating(&values) {
            report.status = Status::NoRealLimit;
            report.note = Some("ratios keep changing sign or vanishing".into());
            report.last_counts = v;
            return Ok(());
        }
    }

    report.last_counts = v;
    report.status = if oscillating(&values) || drifting(&values, &opts.tol) {
        Status::NoRealLimit
    } else {
        Status::MaxIterationsReached
    };
    Ok(())
}

fn complete<T: Clone>(row: &[Option<T>]) -> Option<Vec<T>> {
    row.iter().cloned().collect()
}

fn window<T>(values: &[T]) -> &[T] {
    &values[values.len().saturating_sub(OSCILLATION_WINDOW)..]
}

/// A ratio vanished or changed sign inside the trailing window.
fn oscillating<T: Scalar>(values: &[Vec<Option<Ratio<T>>>]) -> bool {
    let w = window(values);
    if w.len() < OSCILLATION_WINDOW {
        return false;
    }
    if w.iter().any(|row| row.iter().any(Option::is_none)) {
        return true;
    }
    w.windows(2).any(|pair| {
        pair[0]
            .iter()
            .zip(&pair[1])
            .any(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => a.signum() * b.signum() < Ratio::zero(),
                _ => false,
            })
    })
}

/// Some relative change in the trailing window exceeds `10 · tol`.
fn drifting<T: Scalar>(values: &[Vec<Option<Ratio<T>>>], tol: &Ratio<T>) -> bool {
    let ten = Ratio::from_integer(T::from_u8(10).unwrap());
    let limit = ten * tol.clone();
    let w = window(values);
    if w.len() < OSCILLATION_WINDOW {
        return false;
    }
    w.windows(2).any(|pair| {
        pair[0].iter().zip(&pair[1]).any(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (b.clone() - a.clone()).abs() > limit.clone() * b.abs(),
            _ => false,
        })
    })
}
