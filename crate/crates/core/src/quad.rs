//! Exact elements `a + b*sqrt(r)` of a real quadratic field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, parse_rat, to_f64, Rat};

/// `a + b*sqrt(r)` with `r` square-free. Rational values are stored with
/// `b = 0` and `r = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    a: Rat,
    b: Rat,
    r: u64,
}

fn square_free_split(mut r: u64) -> (u64, u64) {
    // r = s^2 * core
    let mut s = 1u64;
    let mut f = 2u64;
    while f.saturating_mul(f) <= r {
        while r.is_multiple_of(f * f) {
            r /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s, r)
}

impl QuadScalar {
    pub fn new(a: Rat, b: Rat, r: u64) -> Self {
        if b.is_zero() || r == 0 {
            return Self::rational(a);
        }
        let (s, core) = square_free_split(r);
        let b = b * Rat::from_integer(BigInt::from(s));
        if core == 1 {
            return Self::rational(a + b);
        }
        Self { a, b, r: core }
    }

    pub fn rational(a: Rat) -> Self {
        Self { a, b: Rat::zero(), r: 0 }
    }

    /// `sqrt(n)`
    pub fn sqrt(n: u64) -> Self {
        Self::new(Rat::zero(), Rat::one(), n)
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.r
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * (self.r as f64).sqrt()
    }

    /// Exact sign: compares `a^2` against `b^2 r` when the parts disagree.
    pub fn signum(&self) -> i8 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * Rat::from_integer(BigInt::from(self.r));
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    fn common_radicand(&self, o: &Self) -> Result<u64> {
        match (self.r, o.r) {
            (0, r) | (r, 0) => Ok(r),
            (r, s) if r == s => Ok(r),
            (r, s) => Err(Error::Parameter(format!(
                "cannot combine sqrt({r}) and sqrt({s}) exactly"
            ))),
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let r = self.common_radicand(o)?;
        Ok(Self::new(&self.a + &o.a, &self.b + &o.b, r))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let r = self.common_radicand(o)?;
        let rr = Rat::from_integer(BigInt::from(r));
        Ok(Self::new(
            &self.a * &o.a + &self.b * &o.b * rr,
            &self.a * &o.b + &self.b * &o.a,
            r,
        ))
    }

    pub fn checked_cmp(&self, o: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(o)?.signum().cmp(&0))
    }

    /// `(u + v sqrt r) / w` with integers and `w > 0`.
    pub(crate) fn integer_form(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let w = lcm_of_denominators([&self.a, &self.b]);
        let wq = Rat::from_integer(w.clone());
        let u = (&self.a * &wq).to_integer();
        let v = (&self.b * &wq).to_integer();
        (u, v, w, BigInt::from(self.r))
    }

    /// Parses the canonical rendering produced by `Display`, e.g. `"2*sqrt(2)"`,
    /// `"1/2-3*sqrt(5)"`, `"-sqrt(3)"` or a plain rational.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a quadratic scalar: {s:?}"));
        let Some(idx) = s.find("sqrt(") else {
            return Ok(Self::rational(parse_rat(&s)?));
        };
        let tail = &s[idx + 5..];
        let r_str = tail.strip_suffix(')').ok_or_else(bad)?;
        let r: u64 = r_str.parse().map_err(|_| bad())?;
        let head = &s[..idx];
        let head = head.strip_suffix('*').unwrap_or(head);
        // Split "a±b" at the last sign that is not leading.
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (a_str, b_str) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let a = if a_str.is_empty() { Rat::zero() } else { parse_rat(a_str)? };
        let b = match b_str {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => parse_rat(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Self::new(a, b, r))
    }
}

fn sign(q: &Rat) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl From<Rat> for QuadScalar {
    fn from(a: Rat) -> Self {
        Self::rational(a)
    }
}

impl Neg for &QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar { a: -&self.a, b: -&self.b, r: self.r }
    }
}

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        -&self
    }
}

// Operators panic on incompatible radicands; use the `checked_*` forms when
// mixing fields is possible.
impl Add for &QuadScalar {
    type Output = QuadScalar;
    fn add(self, o: &QuadScalar) -> QuadScalar {
        self.checked_add(o).expect("incompatible radicands")
    }
}

impl Sub for &QuadScalar {
    type Output = QuadScalar;
    fn sub(self, o: &QuadScalar) -> QuadScalar {
        self.checked_sub(o).expect("incompatible radicands")
    }
}

impl Mul for &QuadScalar {
    type Output = QuadScalar;
    fn mul(self, o: &QuadScalar) -> QuadScalar {
        self.checked_mul(o).expect("incompatible radicands")
    }
}

impl fmt::Display for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        if (-&self.b).is_one() {
            write!(f, "-")?;
        } else if !self.b.is_one() {
            write!(f, "{}*", self.b)?;
        }
        write!(f, "sqrt({})", self.r)
    }
}
