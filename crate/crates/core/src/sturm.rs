//! Sturm sequences and exact real-root counting.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{param, Result};
use crate::intpoly::{self, sign_at_quadratic, sign_at_rational, sign_of};
use crate::poly::RatPoly;
use crate::quad::QuadScalar;
use crate::rational::{rat, Rat};

/// Sign-variation chain `p, p', -rem, ...` of a square-free polynomial. Each
/// element is stored as a primitive integer polynomial, a positive multiple of
/// the exact rational remainder, so sign counts are unaffected.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

/// Sign of `p` at an exact point.
#[derive(Clone, Debug)]
enum Point<'a> {
    NegInf,
    PosInf,
    At(&'a QuadScalar),
}

fn remainder_chain(f: Vec<BigInt>, g: Vec<BigInt>) -> Vec<Vec<BigInt>> {
    let mut chain = vec![f, g];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            return chain;
        }
        if chain[n - 1].len() == 1 {
            return chain;
        }
        let r = intpoly::pseudo_rem(&chain[n - 2], &chain[n - 1]);
        let r: Vec<BigInt> = intpoly::primitive(r).into_iter().map(|c| -c).collect();
        chain.push(r);
    }
}

fn sign_at(p: &[BigInt], at: &Point<'_>) -> i8 {
    match at {
        Point::PosInf => sign_of(p.last().expect("nonzero")),
        Point::NegInf => {
            let s = sign_of(p.last().expect("nonzero"));
            if (p.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        }
        Point::At(q) => sign_at_point(p, q),
    }
}

pub(crate) fn sign_at_point(p: &[BigInt], q: &QuadScalar) -> i8 {
    let (u, v, w, r) = q.integer_form();
    if v.is_zero() {
        sign_at_rational(p, &u, &w)
    } else {
        sign_at_quadratic(p, &u, &v, &w, &r)
    }
}

fn variations(chain: &[Vec<BigInt>], at: &Point<'_>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = sign_at(p, at);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

fn ensure_nonzero(p: &RatPoly) -> Result<()> {
    if p.is_zero() {
        return param("the zero polynomial has no Sturm chain");
    }
    Ok(())
}

impl SturmChain {
    /// Chain of the square-free part of `p`.
    pub fn new(p: &RatPoly) -> Result<Self> {
        ensure_nonzero(p)?;
        let f = p.square_free_part().to_primitive_int();
        if f.len() <= 1 {
            return Ok(Self { chain: vec![f] });
        }
        let g = RatPoly::from_int(&f).derivative().to_primitive_int();
        Ok(Self { chain: remainder_chain(f, g) })
    }

    pub fn polys(&self) -> Vec<RatPoly> {
        self.chain.iter().map(|c| RatPoly::from_int(c)).collect()
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn variations_at(&self, x: &QuadScalar) -> usize {
        variations(&self.chain, &Point::At(x))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        variations(&self.chain, &Point::NegInf)
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        variations(&self.chain, &Point::PosInf)
    }

    /// Whether the (square-free) head vanishes at `x`.
    pub fn vanishes_at(&self, x: &QuadScalar) -> bool {
        sign_at_point(&self.chain[0], x) == 0
    }

    /// Distinct real roots in `(lo, hi]`.
    fn count_half_open(&self, lo: &Point<'_>, hi: &Point<'_>) -> usize {
        variations(&self.chain, lo).saturating_sub(variations(&self.chain, hi))
    }

    pub fn count_real_roots(&self) -> usize {
        self.count_half_open(&Point::NegInf, &Point::PosInf)
    }
}

/// Distinct real roots of `p`.
pub fn count_distinct_real_roots(p: &RatPoly) -> Result<usize> {
    Ok(SturmChain::new(p)?.count_real_roots())
}

/// Whether every root of `p` is real. Constants are vacuously real-rooted.
pub fn is_real_rooted(p: &RatPoly) -> Result<bool> {
    ensure_nonzero(p)?;
    let sf = p.square_free_part();
    let deg = sf.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(true);
    }
    Ok(SturmChain::new(&sf)?.count_real_roots() == deg)
}

/// Distinct real roots in the interval from `lo` to `hi`, both endpoints
/// excluded when `open`, both included otherwise.
pub fn count_roots_in(p: &RatPoly, lo: &QuadScalar, hi: &QuadScalar, open: bool) -> Result<usize> {
    ensure_nonzero(p)?;
    if lo.checked_cmp(hi)? != std::cmp::Ordering::Less {
        return param(format!("empty interval: {lo} is not below {hi}"));
    }
    let chain = SturmChain::new(p)?;
    Ok(chain_count(&chain, lo, hi, open))
}

fn chain_count(chain: &SturmChain, lo: &QuadScalar, hi: &QuadScalar, open: bool) -> usize {
    let base = chain.count_half_open(&Point::At(lo), &Point::At(hi));
    if open {
        base - usize::from(chain.vanishes_at(hi))
    } else {
        base + usize::from(chain.vanishes_at(lo))
    }
}

/// Distinct real roots `>= x`.
pub fn count_roots_at_or_above(p: &RatPoly, x: &QuadScalar) -> Result<usize> {
    let chain = SturmChain::new(p)?;
    Ok(chain.count_half_open(&Point::At(x), &Point::PosInf) + usize::from(chain.vanishes_at(x)))
}

/// Distinct real roots `<= x`.
pub fn count_roots_at_or_below(p: &RatPoly, x: &QuadScalar) -> Result<usize> {
    let chain = SturmChain::new(p)?;
    Ok(chain.count_half_open(&Point::NegInf, &Point::At(x)))
}

/// Real roots counted with multiplicity, summed over the Yun factors.
pub fn count_real_roots_with_multiplicity(p: &RatPoly) -> Result<usize> {
    ensure_nonzero(p)?;
    let mut total = 0;
    for (i, f) in p.square_free_decomposition().iter().enumerate() {
        if f.degree().unwrap_or(0) > 0 {
            total += (i + 1) * SturmChain::new(f)?.count_real_roots();
        }
    }
    Ok(total)
}

/// Roots with multiplicity in the interval, endpoint convention as in
/// [`count_roots_in`].
pub fn count_roots_in_with_multiplicity(
    p: &RatPoly,
    lo: &QuadScalar,
    hi: &QuadScalar,
    open: bool,
) -> Result<usize> {
    ensure_nonzero(p)?;
    if lo.checked_cmp(hi)? != std::cmp::Ordering::Less {
        return param(format!("empty interval: {lo} is not below {hi}"));
    }
    let mut total = 0;
    for (i, f) in p.square_free_decomposition().iter().enumerate() {
        if f.degree().unwrap_or(0) > 0 {
            total += (i + 1) * chain_count(&SturmChain::new(f)?, lo, hi, open);
        }
    }
    Ok(total)
}

/// Multiplicity of `x` as a root of `p` (0 if not a root).
pub fn multiplicity_at(p: &RatPoly, x: &QuadScalar) -> Result<usize> {
    ensure_nonzero(p)?;
    let mut total = 0;
    for (i, f) in p.square_free_decomposition().iter().enumerate() {
        if f.degree().unwrap_or(0) > 0 && sign_at_point(&f.to_primitive_int(), x) == 0 {
            total += i + 1;
        }
    }
    Ok(total)
}

/// A rational interval `[lo, hi]` of width at most `width` holding the largest
/// real root.
pub fn max_root_bracket(p: &RatPoly, width: &Rat) -> Result<(Rat, Rat)> {
    ensure_nonzero(p)?;
    if width <= &Rat::zero() {
        return param("bracket width must be positive");
    }
    let chain = SturmChain::new(p)?;
    if chain.count_real_roots() == 0 {
        return param(format!("{p} has no real roots"));
    }
    let bound = p.cauchy_root_bound();
    let mut lo = -bound.clone();
    let mut hi = bound;
    // Invariant: the largest root lies in (lo, hi].
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / rat(2, 1);
        let mq = QuadScalar::rational(mid.clone());
        if chain.count_half_open(&Point::At(&mq), &Point::PosInf) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Smallest real root bracket, by reflection.
pub fn min_root_bracket(p: &RatPoly, width: &Rat) -> Result<(Rat, Rat)> {
    let (lo, hi) = max_root_bracket(&p.reflect(), width)?;
    Ok((-hi, -lo))
}

/// `g ⟶ f`: the roots of `g` interlace those of `f` and the largest root of `f`
/// is at least the largest root of `g`. A common factor is divided out first,
/// then the relation holds exactly when the Cauchy index of `g/f` over the
/// whole line equals `deg f`.
pub fn interlaces(g: &RatPoly, f: &RatPoly) -> Result<bool> {
    ensure_nonzero(g)?;
    ensure_nonzero(f)?;
    let (Some(dg), Some(df)) = (g.degree(), f.degree()) else {
        unreachable!()
    };
    if dg + 1 != df {
        return param(format!("interlacing needs deg g = deg f - 1, got {dg} and {df}"));
    }
    if !is_real_rooted(f)? || !is_real_rooted(g)? {
        return Ok(false);
    }
    let h = f.gcd(g);
    let f1 = f.exact_div(&h).expect("gcd divides").to_primitive_int();
    let g1 = g.exact_div(&h).expect("gcd divides").to_primitive_int();
    let positive = |p: Vec<BigInt>| -> Vec<BigInt> {
        if p.last().is_some_and(Signed::is_negative) {
            p.into_iter().map(|c| -c).collect()
        } else {
            p
        }
    };
    let n = f1.len() - 1;
    let chain = remainder_chain(positive(f1), positive(g1));
    let index = variations(&chain, &Point::NegInf) as i64 - variations(&chain, &Point::PosInf) as i64;
    Ok(index == n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use num_traits::One;
    use proptest::prelude::*;

    fn q(n: i64) -> QuadScalar {
        QuadScalar::rational(int(n))
    }

    #[test]
    fn real_rootedness_examples() {
        assert!(is_real_rooted(&RatPoly::from_i64(&[-1, 0, 1])).unwrap());
        assert!(!is_real_rooted(&RatPoly::from_i64(&[1, 0, 1])).unwrap());
        let cube = RatPoly::from_i64(&[-1, 1]).pow(3);
        assert!(is_real_rooted(&cube).unwrap());
        assert!(is_real_rooted(&RatPoly::constant(int(5))).unwrap());
        assert!(is_real_rooted(&RatPoly::zero()).is_err());
    }

    #[test]
    fn interval_counts_with_quadratic_endpoints() {
        let p = RatPoly::from_i64(&[-2, 0, 1]);
        let s2 = QuadScalar::sqrt(2);
        assert_eq!(count_roots_in(&p, &q(-2), &q(2), true).unwrap(), 2);
        assert_eq!(count_roots_in(&p, &-&s2, &s2, true).unwrap(), 0);
        assert_eq!(count_roots_in(&p, &-&s2, &s2, false).unwrap(), 2);
        assert!(count_roots_in(&p, &q(1), &q(1), true).is_err());
        assert_eq!(count_roots_at_or_above(&p, &s2).unwrap(), 1);
        assert_eq!(count_roots_at_or_below(&p, &-&s2).unwrap(), 1);
    }

    #[test]
    fn multiplicity_counts() {
        // (x-1)^2 (x+1)^3 (x^2+1)
        let p = &(&RatPoly::from_i64(&[-1, 1]).pow(2) * &RatPoly::from_i64(&[1, 1]).pow(3))
            * &RatPoly::from_i64(&[1, 0, 1]);
        assert_eq!(count_distinct_real_roots(&p).unwrap(), 2);
        assert_eq!(count_real_roots_with_multiplicity(&p).unwrap(), 5);
        assert_eq!(count_roots_in_with_multiplicity(&p, &q(0), &q(2), true).unwrap(), 2);
        assert_eq!(multiplicity_at(&p, &q(-1)).unwrap(), 3);
        assert_eq!(multiplicity_at(&p, &q(0)).unwrap(), 0);
    }

    #[test]
    fn brackets() {
        let w = rat(1, 100);
        for (p, root) in [
            (RatPoly::from_i64(&[-1, 0, 1]), int(1)),
            (RatPoly::from_i64(&[-15, 2, 1]), int(3)),
            (&RatPoly::from_i64(&[-1, 1]).pow(2) * &RatPoly::from_i64(&[1, 1]).pow(3), int(1)),
        ] {
            let (lo, hi) = max_root_bracket(&p, &w).unwrap();
            assert!(&hi - &lo <= w && lo <= root && root <= hi, "{p}: [{lo}, {hi}]");
        }
        let (lo, hi) = min_root_bracket(&RatPoly::from_i64(&[-15, 2, 1]), &w).unwrap();
        assert!(lo <= int(-5) && int(-5) <= hi);
        assert!(max_root_bracket(&RatPoly::from_i64(&[1, 0, 1]), &w).is_err());
    }

    #[test]
    fn interlacing_examples() {
        let f = RatPoly::from_i64(&[-1, 0, 1]);
        assert!(interlaces(&RatPoly::x(), &f).unwrap());
        assert!(!interlaces(&RatPoly::from_i64(&[-5, 1]), &f).unwrap());
        assert!(interlaces(&RatPoly::from_i64(&[-1, 1]), &f).unwrap());
        assert!(interlaces(&f.derivative(), &f).unwrap());
        // Negative leading coefficient is irrelevant to the relation.
        assert!(interlaces(&RatPoly::from_i64(&[0, -3]), &f).unwrap());
        // Shared double root.
        let f2 = &RatPoly::from_i64(&[-1, 1]).pow(2) * &RatPoly::x();
        assert!(interlaces(&RatPoly::from_i64(&[-1, 1]).pow(2), &f2).unwrap());
        assert!(!interlaces(&RatPoly::from_i64(&[-2, 1]), &RatPoly::from_i64(&[-1, 1]).pow(2)).unwrap());
        assert!(interlaces(&f, &f).is_err());
    }

    #[test]
    fn chain_follows_remainder_recurrence() {
        let p = RatPoly::from_roots(&[int(-2), int(0), int(1), int(3)]);
        let polys = SturmChain::new(&p).unwrap().polys();
        for w in polys.windows(3) {
            let (_, r) = w[0].div_rem(&w[1]).unwrap();
            assert_eq!(r.monic(), (-&w[2]).monic());
            let ratio = &r.coeffs()[r.coeffs().len() - 1] / &w[2].coeffs()[w[2].coeffs().len() - 1];
            assert!(ratio < Rat::zero());
        }
    }

    fn roots_strategy() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-6i64..6, 1..7)
    }

    proptest! {
        #[test]
        fn derivative_interlaces(roots in roots_strategy()) {
            let p = RatPoly::from_roots(&roots.iter().map(|&r| int(r)).collect::<Vec<_>>());
            let dp = p.derivative();
            if dp.degree().is_some() && !dp.is_zero() && p.degree() > Some(0) {
                if p.degree() == Some(1) {
                    prop_assert!(interlaces(&dp, &p).unwrap());
                } else {
                    let lead = dp.leading().unwrap().clone();
                    prop_assert!(interlaces(&dp.scale(&(Rat::one() / lead)), &p).unwrap());
                }
            }
        }

        #[test]
        fn counts_are_additive(roots in roots_strategy(), a in -8i64..8, gap1 in 1i64..5, gap2 in 1i64..5) {
            let p = RatPoly::from_roots(&roots.iter().map(|&r| int(r)).collect::<Vec<_>>());
            let (x, y, z) = (q(a), q(a + gap1), q(a + gap1 + gap2));
            let chain = SturmChain::new(&p).unwrap();
            let left = chain.count_half_open(&Point::At(&x), &Point::At(&y));
            let right = chain.count_half_open(&Point::At(&y), &Point::At(&z));
            let whole = chain.count_half_open(&Point::At(&x), &Point::At(&z));
            prop_assert_eq!(left + right, whole);
            let mut distinct = roots.clone();
            distinct.sort();
            distinct.dedup();
            let oracle = distinct.iter().filter(|&&r| a < r && r <= a + gap1 + gap2).count();
            prop_assert_eq!(whole, oracle);
            prop_assert_eq!(count_real_roots_with_multiplicity(&p).unwrap(), roots.len());
        }

        #[test]
        fn sqrt_endpoints_match_float(roots in roots_strategy(), r in 2u64..20, a in -4i64..4, b in 1i64..3) {
            let p = RatPoly::from_roots(&roots.iter().map(|&r| int(r)).collect::<Vec<_>>());
            prop_assume!(![4u64, 9, 16].contains(&r));
            let lo = QuadScalar::new(int(a), int(-b), r);
            let hi = QuadScalar::new(int(a), int(b), r);
            let (lf, hf) = (lo.to_f64(), hi.to_f64());
            let mut distinct = roots.clone();
            distinct.sort();
            distinct.dedup();
            // irrational endpoints are never integer roots
            let oracle = distinct.iter().filter(|&&x| lf < x as f64 && (x as f64) < hf).count();
            prop_assert_eq!(count_roots_in(&p, &lo, &hi, true).unwrap(), oracle);
            prop_assert_eq!(count_roots_in(&p, &lo, &hi, false).unwrap(), oracle);
        }
    }
}
