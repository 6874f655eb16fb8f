//! Integer-coefficient polynomial kernels used by gcd and Sturm sequences.
//! Every operation here preserves signs up to a positive factor.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Divides out the (positive) content.
pub(crate) fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let p = trim(p);
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() || content.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &content).collect()
}

/// `k * rem(a, b)` for some positive integer `k`.
pub(crate) fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let lb_abs = lb.abs();
    let lb_neg = lb.is_negative();
    let mut r = trim(a.to_vec());
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let mut lr = r[dr].clone();
        if lb_neg {
            lr = -lr;
        }
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        r = primitive(r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive(a.to_vec());
    let mut b = primitive(b.to_vec());
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = primitive(r);
    }
    if a.last().is_some_and(Signed::is_negative) {
        a = a.into_iter().map(|c| -c).collect();
    }
    a
}

pub(crate) fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Sign of `p(n/d)` for `d > 0`, via the homogenized value `d^deg p(n/d)`.
pub(crate) fn sign_at_rational(p: &[BigInt], n: &BigInt, d: &BigInt) -> i8 {
    if p.is_empty() {
        return 0;
    }
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    // acc = sum c_i n^i d^(deg-i), built from the top coefficient down.
    let deg = p.len() - 1;
    let mut terms = Vec::with_capacity(p.len());
    for _ in 0..=deg {
        terms.push(dpow.clone());
        dpow *= d;
    }
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * n + c * &terms[deg - i];
    }
    sign_of(&acc)
}

/// `u + v sqrt(r)` with integer parts.
#[derive(Clone, Debug)]
pub(crate) struct ZSqrt {
    pub u: BigInt,
    pub v: BigInt,
}

impl ZSqrt {
    fn mul(&self, o: &ZSqrt, r: &BigInt) -> ZSqrt {
        ZSqrt {
            u: &self.u * &o.u + &self.v * &o.v * r,
            v: &self.u * &o.v + &self.v * &o.u,
        }
    }

    pub fn sign(&self, r: &BigInt) -> i8 {
        let su = sign_of(&self.u);
        let sv = sign_of(&self.v);
        if sv == 0 || r.is_zero() {
            return su;
        }
        if su == 0 {
            return sv;
        }
        if su == sv {
            return su;
        }
        // Opposite signs: compare u^2 against v^2 r.
        let lhs = &self.u * &self.u;
        let rhs = &self.v * &self.v * r;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => su,
            std::cmp::Ordering::Less => sv,
            std::cmp::Ordering::Equal => 0,
        }
    }
}

/// Sign of `p((u + v sqrt r) / w)` for `w > 0`.
pub(crate) fn sign_at_quadratic(p: &[BigInt], u: &BigInt, v: &BigInt, w: &BigInt, r: &BigInt) -> i8 {
    if p.is_empty() {
        return 0;
    }
    let deg = p.len() - 1;
    let x = ZSqrt { u: u.clone(), v: v.clone() };
    let mut wpow = vec![BigInt::one()];
    for i in 1..=deg {
        let next = &wpow[i - 1] * w;
        wpow.push(next);
    }
    let mut acc = ZSqrt { u: BigInt::zero(), v: BigInt::zero() };
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc.mul(&x, r);
        acc.u += c * &wpow[deg - i];
    }
    acc.sign(r)
}
