//! Signed symbol counts and their exact power iteration.

use std::fmt;
use std::ops::{Add, Index, Neg};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polynomial::IterationMatrix;
use crate::rewriting::{Letter, ReplacementRule, Sign, Word, WordLike};
use crate::scalar::Scalar;

/// `n_j = #A_j^+ − #A_j^-` for `j = 1 … m`, stored zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountVector<T>(Vec<T>);

impl<T: Scalar> CountVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self(entries))
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![T::zero(); m])
    }

    /// The unit vector `e_j` (one-based), the counts of the single letter `A_j^+`.
    pub fn unit(m: usize, j: usize) -> Self {
        let mut v = Self::zero(m);
        v.0[j - 1] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<T> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &T) -> Self {
        Self(self.0.iter().map(|x| x.clone() * k.clone()).collect())
    }

    /// A literal word with these counts: `|n_j|` copies of `A_j^±` in index order.
    pub fn to_word<W: WordLike>(&self, cap: u64) -> Result<W> {
        let mut letters = Vec::new();
        let mut total = 0u64;
        for (i, n) in self.0.iter().enumerate() {
            let sign = if n.is_negative() { Sign::Minus } else { Sign::Plus };
            let k = n
                .abs()
                .to_u64()
                .ok_or_else(|| Error::CoefficientTooLarge(n.to_string()))?;
            total = total.saturating_add(k);
            if total > cap {
                return Err(Error::EngineOverflow { step: 0, cap });
            }
            letters.extend(std::iter::repeat_n(Letter::new(i + 1, sign), k as usize));
        }
        Ok(W::from_word(Word::new(letters)))
    }
}

impl<T> Index<usize> for CountVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Scalar> Add for &CountVector<T> {
    type Output = CountVector<T>;

    fn add(self, rhs: Self) -> CountVector<T> {
        assert_eq!(self.dim(), rhs.dim(), "count vector dimensions differ");
        CountVector(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }
}

impl<T: Scalar> Neg for &CountVector<T> {
    type Output = CountVector<T>;

    fn neg(self) -> CountVector<T> {
        CountVector(self.0.iter().map(|x| -x.clone()).collect())
    }
}

impl<T: Scalar> fmt::Display for CountVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Tallies a word over an alphabet of size `m`; run multiplicities are added directly.
pub fn count_word<T: Scalar, W: WordLike>(w: &W, m: usize) -> Result<CountVector<T>> {
    let mut n = CountVector::zero(m);
    for (letter, k) in w.runs() {
        if letter.index == 0 || letter.index > m {
            return Err(Error::IndexOutOfRange {
                index: letter.index,
                m,
            });
        }
        let k = T::from_u64(k).expect("scalar type cannot hold a run length");
        let slot: &mut T = &mut n.0[letter.index - 1];
        *slot = match letter.sign {
            Sign::Plus => slot.clone() + k,
            Sign::Minus => slot.clone() - k,
        };
    }
    Ok(n)
}

/// One exact application of the iteration matrix.
///
/// Row 0 is a dense dot product; every later row reads only its diagonal and
/// subdiagonal entries.
pub fn step_counts<T: Scalar>(matrix: &IterationMatrix<T>, v: &CountVector<T>) -> Result<CountVector<T>> {
    let m = matrix.dim();
    if v.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: v.dim(),
        });
    }
    let mut out = Vec::with_capacity(m);
    let first = matrix
        .top_row()
        .iter()
        .zip(&v.0)
        .filter(|(c, n)| !c.is_zero() && !n.is_zero())
        .fold(T::zero(), |acc, (c, n)| acc + c.clone() * n.clone());
    out.push(first);
    for row in 1..m {
        let sub = &matrix.subdiagonal()[row - 1];
        let diag = &matrix.diagonal()[row - 1];
        out.push(mul_small(sub, &v.0[row - 1]) + mul_small(diag, &v.0[row]));
    }
    Ok(CountVector(out))
}

fn mul_small<T: Scalar>(c: &T, n: &T) -> T {
    if c.is_one() {
        n.clone()
    } else {
        c.clone() * n.clone()
    }
}

/// `v_0 … v_steps` with `v_k = M v_{k-1}`.
pub fn iterate_counts<T: Scalar>(
    matrix: &IterationMatrix<T>,
    v0: CountVector<T>,
    steps: usize,
) -> Result<Vec<CountVector<T>>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(v0);
    for k in 1..=steps {
        let next = step_counts(matrix, &out[k - 1])?;
        out.push(next);
    }
    Ok(out)
}

/// Checks `n(R*(w)) = M n(w)` exactly for one word.
pub fn verify_commutation<T: Scalar, W: WordLike>(
    rule: &ReplacementRule,
    matrix: &IterationMatrix<T>,
    w: &W,
    cap: u64,
) -> Result<bool> {
    let m = rule.m();
    let rewritten = w.rewrite(rule, cap)?;
    let lhs: CountVector<T> = count_word(&rewritten, m)?;
    let rhs = step_counts(matrix, &count_word(w, m)?)?;
    Ok(lhs == rhs)
}
