//! Exact rational arithmetic helpers.

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-1/2"` or a finite decimal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Input(alloc::format!("not a rational number: `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits: String = whole.chars().chain(frac.chars()).filter(|c| *c != '-' && *c != '+').collect();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut n = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `a/b` or `a` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

/// Smallest `k/2^bits`-grid rational that is `>= sqrt(q)`.
///
/// Exact when `q` is the square of a rational.
pub fn sqrt_upper(q: &Rational, bits: u32) -> Rational {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    if q.is_zero() {
        return Rational::zero();
    }
    if let Some(r) = exact_sqrt(q) {
        return r;
    }
    let scale = num_traits::pow(BigInt::from(2), bits as usize);
    // ceil(sqrt(q) * 2^bits) = ceil(sqrt(q * 4^bits))
    let scaled = q * Rational::from_integer(&scale * &scale);
    let floor = scaled.floor().to_integer();
    let mut k = floor.sqrt();
    while Rational::from_integer(&k * &k) < scaled {
        k += 1;
    }
    Rational::new(k, scale)
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Lossy conversion for presentation formats only.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn sqrt_upper_is_exact_on_squares_and_an_upper_bound_otherwise() {
        assert_eq!(sqrt_upper(&rat(1, 4), 20), rat(1, 2));
        let r = sqrt_upper(&rat(1, 2), 20);
        assert!(&r * &r >= rat(1, 2));
        assert!(&r - rat(1, 1 << 19) < rat(71, 100));
    }

    #[test]
    fn format_round_trips() {
        for q in [rat(3, 7), int(5), rat(-1, 2)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
    }
}
