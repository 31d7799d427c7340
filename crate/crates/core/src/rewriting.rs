//! Signed alphabet, words, and the polynomial-generated replacement rule.
//!
//! The alphabet has `2m` letters `A_i^+` / `A_i^-` (`i` is one-based). Two
//! word representations share the [`WordLike`] interface: a literal [`Word`]
//! and a run-length [`RleWord`]. Letters never cancel inside a word; signs
//! only interact when counting.

use std::fmt;
use std::str::FromStr;


use crate::error::{Error, Result};
use crate::polynomial::MonicPolynomial;
use crate::scalar::Scalar;

/// Default cap on the size of a rewritten word.
pub const DEFAULT_WORD_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(index: usize, sign: Sign) -> Self {
        Self { index, sign }
    }

    pub fn plus(index: usize) -> Self {
        Self::new(index, Sign::Plus)
    }

    pub fn minus(index: usize) -> Self {
        Self::new(index, Sign::Minus)
    }

    pub fn flip(self) -> Self {
        Self::new(self.index, self.sign.flip())
    }

    fn check(self, m: usize) -> Result<()> {
        if self.index == 0 || self.index > m {
            Err(Error::IndexOutOfRange { index: self.index, m })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{}{s}", self.index)
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Syntax {
            offset: 0,
            message: format!("bad letter {s:?}"),
        };
        let (digits, sign) = match s.as_bytes().last() {
            Some(b'+') => (&s[..s.len() - 1], Sign::Plus),
            Some(b'-') => (&s[..s.len() - 1], Sign::Minus),
            _ => return Err(bad()),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index = digits.parse().map_err(|_| bad())?;
        Ok(Letter::new(index, sign))
    }
}

/// A maximal block of one repeated letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub letter: Letter,
    pub count: u64,
}

/// Common interface of the literal and run-length word engines.
pub trait WordLike: Sized + Clone + fmt::Display {
    /// The word as `(letter, multiplicity)` pairs, in order.
    fn runs(&self) -> impl Iterator<Item = (Letter, u64)> + '_;

    /// Applies the rule to every letter and concatenates the images.
    ///
    /// `cap` bounds the stored size of the result: letters for [`Word`], runs
    /// for [`RleWord`].
    fn rewrite(&self, rule: &ReplacementRule, cap: u64) -> Result<Self>;

    fn from_word(word: Word) -> Self;

    fn from_letter(letter: Letter) -> Self {
        Self::from_word(Word(vec![letter]))
    }

    /// Number of letters in the (expanded) word, saturating at `u64::MAX`.
    fn letter_count(&self) -> u64 {
        self.runs().fold(0u64, |acc, (_, n)| acc.saturating_add(n))
    }

    fn validate(&self, m: usize) -> Result<()> {
        self.runs().try_for_each(|(l, _)| l.check(m))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn flip(&self) -> Word {
        Word(self.0.iter().map(|l| l.flip()).collect())
    }

    pub fn compress(&self) -> RleWord {
        RleWord::from_runs(self.0.iter().map(|&letter| Run { letter, count: 1 }))
    }
}

impl WordLike for Word {
    fn runs(&self) -> impl Iterator<Item = (Letter, u64)> + '_ {
        self.0.iter().map(|&l| (l, 1))
    }

    fn rewrite(&self, rule: &ReplacementRule, cap: u64) -> Result<Self> {
        self.validate(rule.m)?;
        let total = self
            .0
            .iter()
            .try_fold(0u64, |acc, &l| acc.checked_add(rule.image(l).letter_count()));
        match total {
            Some(n) if n <= cap => {}
            _ => return Err(Error::EngineOverflow { step: 1, cap }),
        }
        let mut out = Vec::with_capacity(total.unwrap_or(0) as usize);
        for &l in &self.0 {
            for run in rule.image(l).runs.iter() {
                out.extend(std::iter::repeat_n(run.letter, run.count as usize));
            }
        }
        Ok(Word(out))
    }

    fn from_word(word: Word) -> Self {
        word
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Run-length word in normal form: positive multiplicities, no two adjacent
/// runs with the same letter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RleWord {
    runs: Vec<Run>,
}

impl RleWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Normalizes arbitrary runs: zero-count runs are dropped and adjacent equal letters merged.
    ///
    /// Panics if a merged multiplicity overflows `u64`.
    pub fn from_runs(runs: impl IntoIterator<Item = Run>) -> Self {
        let mut w = Self::default();
        for run in runs {
            w.push(run.letter, run.count).expect("run multiplicity overflow");
        }
        w
    }

    pub fn run_slice(&self) -> &[Run] {
        &self.runs
    }

    pub fn run_len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn expand(&self) -> Word {
        Word(
            self.runs
                .iter()
                .flat_map(|r| std::iter::repeat_n(r.letter, r.count as usize))
                .collect(),
        )
    }

    pub fn flip(&self) -> RleWord {
        RleWord {
            runs: self
                .runs
                .iter()
                .map(|r| Run {
                    letter: r.letter.flip(),
                    count: r.count,
                })
                .collect(),
        }
    }

    fn push(&mut self, letter: Letter, count: u64) -> Option<()> {
        if count == 0 {
            return Some(());
        }
        match self.runs.last_mut() {
            Some(last) if last.letter == letter => {
                last.count = last.count.checked_add(count)?;
            }
            _ => self.runs.push(Run { letter, count }),
        }
        Some(())
    }
}

impl WordLike for RleWord {
    fn runs(&self) -> impl Iterator<Item = (Letter, u64)> + '_ {
        self.runs.iter().map(|r| (r.letter, r.count))
    }

    fn rewrite(&self, rule: &ReplacementRule, cap: u64) -> Result<Self> {
        self.validate(rule.m)?;
        let overflow = Error::EngineOverflow { step: 1, cap };
        let mut out = RleWord::default();
        for run in &self.runs {
            let image = rule.image(run.letter);
            if let [single] = image.runs.as_slice() {
                let count = single.count.checked_mul(run.count).ok_or(overflow.clone())?;
                out.push(single.letter, count).ok_or(overflow.clone())?;
            } else {
                // Each repetition adds at most `image.len()` runs.
                let added = (image.runs.len() as u64).checked_mul(run.count);
                match added.and_then(|a| a.checked_add(out.runs.len() as u64)) {
                    Some(n) if n <= cap => {}
                    _ => return Err(overflow),
                }
                for _ in 0..run.count {
                    for r in &image.runs {
                        out.push(r.letter, r.count).ok_or(overflow.clone())?;
                    }
                }
            }
            if out.runs.len() as u64 > cap {
                return Err(overflow);
            }
        }
        Ok(out)
    }

    fn from_word(word: Word) -> Self {
        word.compress()
    }
}

impl fmt::Display for RleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", r.letter)?;
            if r.count != 1 {
                write!(f, "^{}", r.count)?;
            }
        }
        Ok(())
    }
}

impl FromStr for RleWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = RleWord::default();
        for token in s.split_whitespace() {
            let (letter, count) = match token.split_once('^') {
                Some((l, c)) => (
                    l.parse::<Letter>()?,
                    c.parse::<u64>().map_err(|_| Error::Syntax {
                        offset: 0,
                        message: format!("bad multiplicity in {token:?}"),
                    })?,
                ),
                None => (token.parse::<Letter>()?, 1),
            };
            w.push(letter, count).ok_or(Error::Syntax {
                offset: 0,
                message: "multiplicity overflow".into(),
            })?;
        }
        Ok(w)
    }
}

/// `(α_i^sign)^k`: `|k|` copies of `A_i` with `sign` for `k ≥ 0`, or with the
/// opposite sign for `k < 0`.
pub fn signed_power<T: Scalar>(index: usize, sign: Sign, k: &T) -> Result<RleWord> {
    let count = k
        .abs()
        .to_u64()
        .ok_or_else(|| Error::CoefficientTooLarge(k.to_string()))?;
    let sign = if k.is_negative() { sign.flip() } else { sign };
    let mut w = RleWord::default();
    w.push(Letter::new(index, sign), count);
    Ok(w)
}

/// The replacement rule generated by a monic polynomial:
///
/// ```text
/// A_i^± -> (α_1^±)^{a_i} A_i^± A_{i+1}^±   (i < m)
/// A_m^± -> (α_1^±)^{a_m} A_m^±
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementRule {
    m: usize,
    plus: Vec<RleWord>,
    minus: Vec<RleWord>,
}

impl ReplacementRule {
    pub fn build<T: Scalar>(p: &MonicPolynomial<T>) -> Result<Self> {
        let m = p.degree();
        let mut plus = Vec::with_capacity(m);
        for (i, a) in p.a().iter().enumerate() {
            let index = i + 1;
            let mut image = signed_power(1, Sign::Plus, a)?;
            image.push(Letter::plus(index), 1);
            if index < m {
                image.push(Letter::plus(index + 1), 1);
            }
            plus.push(image);
        }
        let minus = plus.iter().map(RleWord::flip).collect();
        Ok(Self { m, plus, minus })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn apply_letter(&self, letter: Letter) -> Result<&RleWord> {
        letter.check(self.m)?;
        Ok(self.image(letter))
    }

    fn image(&self, letter: Letter) -> &RleWord {
        match letter.sign {
            Sign::Plus => &self.plus[letter.index - 1],
            Sign::Minus => &self.minus[letter.index - 1],
        }
    }

    pub fn initial_word<W: WordLike>(&self) -> W {
        W::from_letter(Letter::plus(1))
    }
}

/// Shorthand for [`ReplacementRule::build`].
pub fn build_rule<T: Scalar>(p: &MonicPolynomial<T>) -> Result<ReplacementRule> {
    ReplacementRule::build(p)
}

/// One application of the rule with the default size cap.
pub fn rewrite<W: WordLike>(rule: &ReplacementRule, w: &W) -> Result<W> {
    w.rewrite(rule, DEFAULT_WORD_CAP)
}

/// Iteration that ran into the size cap; `partial` holds `W_0 … W_{step-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordOverflow<W> {
    pub step: usize,
    pub cap: u64,
    pub partial: Vec<W>,
}

impl<W> From<WordOverflow<W>> for Error {
    fn from(e: WordOverflow<W>) -> Self {
        Error::EngineOverflow {
            step: e.step,
            cap: e.cap,
        }
    }
}

/// `W_0 … W_steps` with `W_k = rewrite(W_{k-1})`.
///
/// Invalid letters in `w0` surface as `IndexOutOfRange`; the cap as a [`WordOverflow`].
pub fn iterate_words<W: WordLike>(
    rule: &ReplacementRule,
    w0: W,
    steps: usize,
    cap: u64,
) -> Result<std::result::Result<Vec<W>, WordOverflow<W>>> {
    w0.validate(rule.m)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(w0);
    for step in 1..=steps {
        match out[step - 1].rewrite(rule, cap) {
            Ok(next) => out.push(next),
            Err(Error::EngineOverflow { cap, .. }) => {
                return Ok(Err(WordOverflow {
                    step,
                    cap,
                    partial: out,
                }))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(out))
}

/// First step at which the literal word started from `w0` would exceed `cap`
/// letters, found from per-letter tallies without building any word.
pub fn literal_overflow_step<W: WordLike>(
    rule: &ReplacementRule,
    w0: &W,
    steps: usize,
    cap: u64,
) -> Result<Option<usize>> {
    w0.validate(rule.m)?;
    let slot = |l: Letter| (l.index - 1) * 2 + usize::from(l.sign == Sign::Minus);
    let mut tally = vec![0u128; 2 * rule.m];
    for (l, n) in w0.runs() {
        tally[slot(l)] = tally[slot(l)].saturating_add(n as u128);
    }
    for step in 1..=steps {
        let mut next = vec![0u128; 2 * rule.m];
        for index in 1..=rule.m {
            for sign in [Sign::Plus, Sign::Minus] {
                let l = Letter::new(index, sign);
                let c = tally[slot(l)];
                if c == 0 {
                    continue;
                }
                for r in &rule.image(l).runs {
                    let s = slot(r.letter);
                    next[s] = next[s].saturating_add(c.saturating_mul(r.count as u128));
                }
            }
        }
        let len = next.iter().fold(0u128, |a, &b| a.saturating_add(b));
        if len > cap as u128 {
            return Ok(Some(step));
        }
        tally = next;
    }
    Ok(None)
}
