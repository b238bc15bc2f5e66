//! Exact rational scalars plus the handful of combinatorial helpers the rest
//! of the crate leans on.

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num::rational::BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `1 / 2^k`.
pub fn inv_pow2(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2).pow(k as u32))
}

/// `(-1)^k` as a rational.
pub fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// Parses `"p/q"` or `"p"` with decimal-integer parts, reducing to lowest terms.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let raw = s.trim();
    let bad = || Error::Parse(format!("bad rational `{raw}`"));
    let (num, den) = match raw.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (raw, None),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = match den {
        Some(b) => b.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{raw}`")));
    }
    Ok(Rational::new(n, d))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binomial_rat(n: usize, k: usize) -> Rational {
    Rational::from_integer(binomial(n, k))
}

/// Renders `r` with `digits` digits after the decimal point, rounding half
/// away from zero.
pub fn to_decimal_string(r: &Rational, digits: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = abs.numer() * &scale;
    let rounded: BigInt =
        (BigInt::from(2) * scaled + abs.denom()) / (BigInt::from(2) * abs.denom());
    let sign = if negative && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{rounded}");
    }
    let ip = &rounded / &scale;
    let fp = &rounded % &scale;
    format!("{sign}{ip}.{fp:0width$}", width = digits)
}
