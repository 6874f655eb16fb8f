//! Small helpers around `BigRational`: construction, canonical strings,
//! factorials and conversion to `f64`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical reduced string: `"3"`, `"-1/2"`.
pub fn format_rat(q: &Rat) -> String {
    q.to_string()
}

/// Parses `"n"` or `"n/d"` (whitespace tolerated, `d != 0`).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Nearest `f64`, robust to numerators and denominators beyond `f64` range.
pub fn to_f64(q: &Rat) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both to ~60 significant bits before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (q.numer().abs() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    let v = n / d * 2f64.powi((shift_n - shift_d) as i32);
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// Exact value of a finite `f64`; non-finite inputs map to 0.
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

/// Decimal rendering with 15 significant digits, round-to-nearest.
pub fn decimal15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.14e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_are_canonical() {
        assert_eq!(format_rat(&parse_rat("6/-4").unwrap()), "-3/2");
        assert_eq!(format_rat(&parse_rat(" 10/5 ").unwrap()), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = BigInt::from(10).pow(400);
        let q = Rat::new(big.clone() * 3, big);
        assert!((to_f64(&q) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal15(2.0 * 2f64.sqrt()), "2.82842712474619");
        assert_eq!(decimal15(4.0), "4");
        assert_eq!(decimal15(-0.5), "-0.5");
    }
}
