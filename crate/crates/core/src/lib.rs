//! Largest-real-root approximation for integer monic polynomials by symbol
//! replacement and counting.
//!
//! A polynomial `p(x) = x^m − a_1 x^{m−1} − … − a_m` generates a replacement
//! rule over the signed alphabet `{A_i^+, A_i^-}`. Iterating the rule from
//! almost any starting word and tallying `n_j = #A_j^+ − #A_j^-` reproduces
//! power iteration with `I + C` (`C` the companion matrix of `p`), so the
//! ratios `n_j / n_{j+1}` converge to a root of `p`.
//!
//! The modules are generic over the integer [`Scalar`]; the aliases below fix
//! it to [`BigInt`], which is what long iterations need.

pub mod counting;
pub mod error;
pub mod estimation;
pub mod polynomial;
pub mod rewriting;
pub mod scalar;

pub use num_bigint::BigInt;
pub use num_rational::Ratio;

pub use counting::{count_word, iterate_counts, step_counts, verify_commutation, CountVector};
pub use error::{Error, Result};
pub use estimation::{
    eigenvector_profile_check, estimate_root, oracle_largest_real_root, ratio_estimates, ConvergenceReport,
    Engine, EstimateOptions, RatioEstimate, Status,
};
pub use polynomial::{parse_polynomial, IterationMatrix, MonicPolynomial};
pub use rewriting::{
    build_rule, iterate_words, literal_overflow_step, rewrite, signed_power, Letter, ReplacementRule, RleWord, Run, Sign, Word, WordLike,
    WordOverflow, DEFAULT_WORD_CAP,
};
pub use scalar::Scalar;

pub type Rational = Ratio<BigInt>;
pub type Polynomial = MonicPolynomial<BigInt>;
pub type Matrix = IterationMatrix<BigInt>;
pub type Counts = CountVector<BigInt>;
pub type Estimate = RatioEstimate<BigInt>;
pub type Report = ConvergenceReport<BigInt>;
pub type Options = EstimateOptions<BigInt>;
