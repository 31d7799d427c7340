//! Integer monic polynomials and the count-iteration matrix they induce.
//!
//! A polynomial `x^m + c_{m-1} x^{m-1} + … + c_0` is stored in the
//! replacement-rule convention `x^m - a_1 x^{m-1} - … - a_m`, i.e.
//! `a_i = -c_{m-i}`. The conversion happens only here, at construction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest exponent accepted by the text parser.
pub const MAX_PARSED_DEGREE: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonicPolynomial<T> {
    a: Vec<T>,
}

impl<T: Scalar> MonicPolynomial<T> {
    /// Builds `x^m - a[0] x^{m-1} - … - a[m-1]`.
    pub fn new(a: Vec<T>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::ZeroDegree);
        }
        Ok(Self { a })
    }

    /// Builds the polynomial from ordinary ascending coefficients `c[0] + c[1] x + … + c[m] x^m`.
    pub fn from_coefficients(c: &[T]) -> Result<Self> {
        let (lead, rest) = c.split_last().ok_or(Error::EmptyInput)?;
        if !lead.is_one() {
            return Err(Error::NotMonic(lead.to_string()));
        }
        if rest.is_empty() {
            return Err(Error::ZeroDegree);
        }
        Ok(Self {
            a: rest.iter().rev().map(|c| -c.clone()).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// The replacement-rule coefficients `a_1 … a_m`.
    pub fn a(&self) -> &[T] {
        &self.a
    }

    /// Ascending ordinary coefficients `c_0 … c_m` with `c_m = 1`.
    pub fn coefficients(&self) -> Vec<T> {
        let mut c: Vec<T> = self.a.iter().rev().map(|a| -a.clone()).collect();
        c.push(T::one());
        c
    }

    /// Exact Horner evaluation.
    pub fn eval_at(&self, x: &Ratio<T>) -> Ratio<T> {
        self.a
            .iter()
            .fold(Ratio::one(), |acc, a| acc * x.clone() - Ratio::from_integer(a.clone()))
    }

    /// `1 + max |a_i|`; every real root lies strictly inside `(-bound, bound)`.
    pub fn cauchy_bound(&self) -> T {
        let max = self
            .a
            .iter()
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(T::zero);
        max + T::one()
    }

    /// Identity plus the companion matrix.
    pub fn iteration_matrix(&self) -> IterationMatrix<T> {
        let m = self.degree();
        let mut top = self.a.clone();
        top[0] = top[0].clone() + T::one();
        IterationMatrix {
            top,
            diag: vec![T::one(); m - 1],
            sub: vec![T::one(); m - 1],
        }
    }
}

impl<T: Scalar> fmt::Display for MonicPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.degree();
        write_monomial(f, m)?;
        for (i, a) in self.a.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let power = m - 1 - i;
            // a_i enters with a minus sign.
            let sign = if a.is_positive() { '-' } else { '+' };
            let mag = a.abs();
            write!(f, " {sign} ")?;
            if power == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                }
                write_monomial(f, power)?;
            }
        }
        Ok(())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, power: usize) -> fmt::Result {
    match power {
        0 => f.write_str("1"),
        1 => f.write_str("x"),
        p => write!(f, "x^{p}"),
    }
}

impl<T: Scalar> FromStr for MonicPolynomial<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_polynomial(s)
    }
}

/// Parses a univariate integer polynomial such as `x^3 - 2x + 1` or `3*x^2 + x^2 - 1`.
pub fn parse_polynomial<T: Scalar>(text: &str) -> Result<MonicPolynomial<T>> {
    let terms = Parser::new(text).terms()?;
    let mut by_power: BTreeMap<usize, T> = BTreeMap::new();
    for (power, coeff) in terms {
        let slot = by_power.entry(power).or_insert_with(T::zero);
        *slot = slot.clone() + coeff;
    }
    let Some((&m, lead)) = by_power.iter().rev().find(|(_, c)| !c.is_zero()) else {
        return Err(Error::ZeroDegree);
    };
    if m == 0 {
        return Err(Error::ZeroDegree);
    }
    if !lead.is_one() {
        return Err(Error::NotMonic(lead.to_string()));
    }
    let c: Vec<T> = (0..=m)
        .map(|k| by_power.get(&k).cloned().unwrap_or_else(T::zero))
        .collect();
    MonicPolynomial::from_coefficients(&c)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn uint(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn terms<T: Scalar>(mut self) -> Result<Vec<(usize, T)>> {
        let mut out = Vec::new();
        let mut negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            Some(_) => false,
            None => return Err(self.syntax("empty polynomial")),
        };
        loop {
            let (power, coeff) = self.term::<T>()?;
            out.push((power, if negative { -coeff } else { coeff }));
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => negative = false,
                Some(b'-') => negative = true,
                Some(_) => return Err(self.syntax("expected '+' or '-'")),
            }
            self.pos += 1;
        }
    }

    fn term<T: Scalar>(&mut self) -> Result<(usize, T)> {
        let coeff = match self.uint() {
            Some(digits) => {
                if matches!(self.src.get(self.pos), Some(b'.' | b'/' | b'e' | b'E')) {
                    return Err(Error::NonIntegerCoefficient { offset: self.pos });
                }
                Some(
                    T::from_str_radix(digits, 10)
                        .map_err(|_| self.syntax("coefficient out of range"))?,
                )
            }
            None => None,
        };
        let mut star = false;
        if self.peek() == Some(b'*') {
            if coeff.is_none() {
                return Err(self.syntax("'*' without a coefficient"));
            }
            self.pos += 1;
            star = true;
        }
        let power = if self.peek() == Some(b'x') {
            self.pos += 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let digits = self.uint().ok_or_else(|| self.syntax("expected exponent"))?;
                match digits.parse::<usize>() {
                    Ok(p) if p <= MAX_PARSED_DEGREE => p,
                    _ => return Err(self.syntax("exponent too large")),
                }
            } else {
                1
            }
        } else if star {
            return Err(self.syntax("expected 'x' after '*'"));
        } else if coeff.is_none() {
            return Err(self.syntax("expected a term"));
        } else {
            0
        };
        Ok((power, coeff.unwrap_or_else(T::one)))
    }
}

/// `I + C` for the companion matrix `C` of a monic polynomial.
///
/// Only the structurally nonzero entries are stored: the dense first row, the
/// diagonal of rows `1..m` and the subdiagonal. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationMatrix<T> {
    top: Vec<T>,
    diag: Vec<T>,
    sub: Vec<T>,
}

impl<T: Scalar> IterationMatrix<T> {
    pub fn dim(&self) -> usize {
        self.top.len()
    }

    pub fn top_row(&self) -> &[T] {
        &self.top
    }

    /// Diagonal entries of rows `1..m`.
    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    /// Subdiagonal entries `(i, i-1)` for rows `1..m`.
    pub fn subdiagonal(&self) -> &[T] {
        &self.sub
    }

    pub fn entry(&self, row: usize, col: usize) -> T {
        let m = self.dim();
        assert!(row < m && col < m, "entry ({row}, {col}) outside {m}x{m}");
        if row == 0 {
            self.top[col].clone()
        } else if col == row {
            self.diag[row - 1].clone()
        } else if col + 1 == row {
            self.sub[row - 1].clone()
        } else {
            T::zero()
        }
    }

    /// Replaces a structurally nonzero entry. Used to build deliberately faulty
    /// matrices when exercising the commutation checker.
    pub fn with_entry(mut self, row: usize, col: usize, value: T) -> Result<Self> {
        let m = self.dim();
        let slot = match (row, col) {
            (0, c) if c < m => &mut self.top[c],
            (r, c) if r < m && c == r => &mut self.diag[r - 1],
            (r, c) if r < m && c + 1 == r => &mut self.sub[r - 1],
            _ => {
                return Err(Error::IndexOutOfRange {
                    index: row.max(col),
                    m,
                })
            }
        };
        *slot = value;
        Ok(self)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let m = self.dim();
        (0..m)
            .map(|r| (0..m).map(|c| self.entry(r, c)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn poly(a: &[i64]) -> MonicPolynomial<BigInt> {
        MonicPolynomial::new(a.iter().map(|&x| BigInt::from(x)).collect()).unwrap()
    }

    fn parse(s: &str) -> Result<MonicPolynomial<BigInt>> {
        parse_polynomial(s)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("x^2 - x - 1").unwrap(), poly(&[1, 1]));
        assert_eq!(parse("x^2 - 3x + 1").unwrap(), poly(&[3, -1]));
        assert_eq!(parse("x^3 - 2").unwrap(), poly(&[0, 0, 2]));
        assert_eq!(parse("2x^2 - 1"), Err(Error::NotMonic("2".into())));
    }

    #[test]
    fn parse_variants() {
        assert_eq!(parse("x").unwrap(), poly(&[0]));
        assert_eq!(parse("x - 2").unwrap(), poly(&[2]));
        assert_eq!(parse("-1 + x^2").unwrap(), poly(&[0, 1]));
        assert_eq!(parse("3*x^2 - 2x^2 + 0x - 5").unwrap(), poly(&[0, 5]));
        assert_eq!(parse("  x ^ 3+x^0 ").unwrap(), poly(&[0, 0, -1]));
        assert_eq!(parse("x^2 - x^2 + x + 1").unwrap(), poly(&[-1]));
        assert_eq!(
            parse("x^2 - 123456789012345678901234567890").unwrap(),
            MonicPolynomial::new(vec![
                BigInt::zero(),
                "123456789012345678901234567890".parse().unwrap()
            ])
            .unwrap()
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("7"), Err(Error::ZeroDegree));
        assert_eq!(parse("x^2 - x^2 + 4"), Err(Error::ZeroDegree));
        assert_eq!(parse("-x^2 + 1"), Err(Error::NotMonic("-1".into())));
        assert_eq!(parse("x^2 - 1.5"), Err(Error::NonIntegerCoefficient { offset: 7 }));
        assert_eq!(parse("x^2 + 1/2"), Err(Error::NonIntegerCoefficient { offset: 7 }));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x^2 +"), Err(Error::Syntax { offset: 5, .. })));
        assert!(matches!(parse("x^2 y"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse("x^"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("3* + x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x^999999999"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn from_coefficients_examples() {
        let c = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(MonicPolynomial::from_coefficients(&c(&[-1, -1, 1])).unwrap(), poly(&[1, 1]));
        assert_eq!(MonicPolynomial::from_coefficients(&c(&[-2, 0, 0, 1])).unwrap(), poly(&[0, 0, 2]));
        assert_eq!(MonicPolynomial::from_coefficients(&c(&[1, 3, 1])).unwrap(), poly(&[-3, -1]));
        assert_eq!(MonicPolynomial::<BigInt>::from_coefficients(&[]), Err(Error::EmptyInput));
        assert_eq!(
            MonicPolynomial::from_coefficients(&c(&[1, 2])),
            Err(Error::NotMonic("2".into()))
        );
        assert_eq!(MonicPolynomial::from_coefficients(&c(&[1])), Err(Error::ZeroDegree));
    }

    #[test]
    fn matrix_examples() {
        let d = |p: MonicPolynomial<BigInt>| {
            p.iteration_matrix()
                .to_dense()
                .into_iter()
                .map(|r| r.into_iter().map(|x| i64::try_from(x).unwrap()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        assert_eq!(d(poly(&[1, 1])), vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(d(poly(&[2])), vec![vec![3]]);
        assert_eq!(
            d(poly(&[0, 1, 1])),
            vec![vec![1, 1, 1], vec![1, 1, 0], vec![0, 1, 1]]
        );
    }

    #[test]
    fn with_entry_rejects_structural_zeros() {
        let m = poly(&[0, 1, 1]).iteration_matrix();
        assert!(m.clone().with_entry(2, 0, BigInt::from(5)).is_err());
        assert!(m.clone().with_entry(3, 3, BigInt::from(5)).is_err());
        let m = m.with_entry(1, 0, BigInt::from(7)).unwrap();
        assert_eq!(m.entry(1, 0), BigInt::from(7));
    }

    #[test]
    fn eval_examples() {
        let q = |n: i64, d: i64| Ratio::new(BigInt::from(n), BigInt::from(d));
        let golden = poly(&[1, 1]);
        assert_eq!(golden.eval_at(&q(2, 1)), q(1, 1));
        assert_eq!(golden.eval_at(&q(0, 1)), q(-1, 1));
        assert_eq!(poly(&[0, 0, 2]).eval_at(&q(3, 2)), q(11, 8));
    }

    #[test]
    fn works_over_machine_integers() {
        let p: MonicPolynomial<i64> = parse_polynomial("x^2 - x - 1").unwrap();
        assert_eq!(p.iteration_matrix().to_dense(), vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(p.eval_at(&Ratio::from_integer(3)), Ratio::from_integer(5));
        assert_eq!(p.cauchy_bound(), 2);
    }

    fn arb_poly() -> impl Strategy<Value = MonicPolynomial<BigInt>> {
        prop::collection::vec(-10i64..=10, 1..=8).prop_map(|a| poly(&a))
    }

    proptest! {
        #[test]
        fn coefficient_round_trip(c in prop::collection::vec(-50i64..=50, 1..=9)) {
            let mut c: Vec<BigInt> = c.into_iter().map(BigInt::from).collect();
            c.push(BigInt::one());
            let p = MonicPolynomial::from_coefficients(&c).unwrap();
            prop_assert_eq!(p.coefficients(), c);
        }

        #[test]
        fn text_round_trip(p in arb_poly()) {
            prop_assert_eq!(parse(&p.to_string()).unwrap(), p);
        }

        #[test]
        fn matrix_is_identity_plus_companion(p in arb_poly()) {
            let m = p.degree();
            let dense = p.iteration_matrix().to_dense();
            for r in 0..m {
                for c in 0..m {
                    let companion = if r == 0 {
                        p.a()[c].clone()
                    } else if c + 1 == r {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    };
                    let identity = if r == c { BigInt::one() } else { BigInt::zero() };
                    prop_assert_eq!(&dense[r][c] - identity, companion);
                }
            }
        }
    }
}
