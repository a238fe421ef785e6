//! Arbitrary-precision rational numbers and small integer combinatorics.
//!
//! `Rational` is `num_rational::BigRational`: always reduced to lowest terms
//! with a positive denominator, which is exactly the representation the rest
//! of the crate relies on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use super::AlgebraError;

pub type Rational = BigRational;

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// The fraction `num/den`. Panics on `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"3/2"`, `"-7"`, ... into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    BigRational::from_str(s.trim()).map_err(|_| AlgebraError::BadRational(s.to_string()))
}

/// Nearest `f64` to the exact value.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Double factorial `n!! = n (n-2) (n-4) ...`, with `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// |a - b| / max(|a|, |b|); zero when both vanish.
pub fn rel_diff(a: &Rational, b: &Rational) -> Rational {
    let d = (a - b).abs();
    let m = a.abs().max(b.abs());
    if m.is_zero() {
        Rational::zero()
    } else {
        d / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational(" 10/4 ").unwrap(), rat(5, 2));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(0), BigInt::from(1));
        assert_eq!(double_factorial(1), BigInt::from(1));
        assert_eq!(double_factorial(5), BigInt::from(15));
        assert_eq!(double_factorial(7), BigInt::from(105));
        assert_eq!(double_factorial(8), BigInt::from(384));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(6, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
