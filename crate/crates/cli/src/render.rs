//! Number formatting shared by the output formats.

use repseq::scalar::ratio_to_f64;
use repseq::{BigInt, Ratio};

/// Renders `x` with exactly 17 significant digits, positional for moderate
/// exponents and scientific otherwise. Non-finite values render as `null`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    if !(-5..17).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}.0")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

pub fn ratio_sig17(r: &Ratio<BigInt>) -> String {
    sig17(ratio_to_f64(r))
}
