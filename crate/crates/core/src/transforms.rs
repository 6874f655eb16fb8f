//! Cauchy transforms, the convolution root-bound inequalities and the matching
//! polynomial bound `2 sqrt(m-1)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{m_fold_asym, m_fold_sym, sym_convolve, asym_convolve};
use crate::error::{param, Error, Result};
use crate::intpoly;
use crate::poly::RatPoly;
use crate::quad::QuadScalar;
use crate::rational::{int, rat, to_f64, Rat};
use crate::sturm;

/// `10^-12`, the default tolerance for inverse transforms.
pub fn default_tol() -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u64.pow(12)))
}

/// `G_p(x) = p'(x) / (d p(x))`.
pub fn cauchy(p: &RatPoly, x: &Rat) -> Result<Rat> {
    let d = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return param("the Cauchy transform needs a nonconstant polynomial"),
    };
    let px = p.eval(x);
    if px.is_zero() {
        return Err(Error::Pole(format!("{x} is a root of {p}")));
    }
    Ok(p.derivative().eval(x) / (px * int(d as i64)))
}

fn cauchy_f64(p: &RatPoly, dp: &RatPoly, d: usize, x: f64) -> f64 {
    dp.eval_f64(x) / (d as f64 * p.eval_f64(x))
}

/// Rational bracket `[lo, hi]` of width at most `tol` holding `K_p(w)`, the
/// unique `x` above the largest root with `G_p(x) = w`.
pub fn inverse_cauchy_bracket(p: &RatPoly, w: &Rat, tol: &Rat) -> Result<(Rat, Rat)> {
    if !w.is_positive() {
        return param(format!("inverse Cauchy transform needs w > 0, got {w}"));
    }
    if !tol.is_positive() {
        return param("tolerance must be positive");
    }
    let d = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return param("the Cauchy transform needs a nonconstant polynomial"),
    };
    if !sturm::is_real_rooted(p)? {
        return param(format!("{p} is not real-rooted"));
    }
    let dw = int(d as i64) * w;
    let (rlo, rhi) = sturm::max_root_bracket(p, &(Rat::one() / (&dw * int(4))))?;
    // 1/(d(x-r)) <= G(x) <= 1/(x-r) puts K(w) in [r + 1/(dw), r + 1/w].
    let mut lo = rlo + Rat::one() / &dw;
    let mut hi = rhi + Rat::one() / w;
    // Above the largest root of a monic p, G(x) > w iff p'(x) - d w p(x) > 0.
    let monic = p.monic();
    let h = (&monic.derivative() - &monic.scale(&dw)).to_primitive_int();
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if intpoly::sign_at_rational(&h, mid.numer(), mid.denom()) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// `K_p(w)` to within `tol`: exact bisection followed by a Newton polish kept
/// inside the certified bracket.
pub fn inverse_cauchy(p: &RatPoly, w: &Rat, tol: &Rat) -> Result<f64> {
    let (lo, hi) = inverse_cauchy_bracket(p, w, tol)?;
    let (lo, hi) = (to_f64(&lo), to_f64(&hi));
    let d = p.degree().expect("nonconstant");
    let dp = p.derivative();
    let ddp = dp.derivative();
    let wf = to_f64(w);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let px = p.eval_f64(x);
        let dpx = dp.eval_f64(x);
        let g = cauchy_f64(p, &dp, d, x);
        let dg = (ddp.eval_f64(x) * px - dpx * dpx) / (d as f64 * px * px);
        if !dg.is_finite() || dg == 0.0 {
            break;
        }
        let next = x - (g - wf) / dg;
        if !(lo..=hi).contains(&next) {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Both sides of `K_lhs(w) <= K_1(w) + K_2(w) - 1/w`; `margin = rhs - lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

fn bound_report(conv: &RatPoly, p: &RatPoly, q: &RatPoly, w: &Rat) -> Result<BoundReport> {
    let tol = default_tol();
    let lhs = inverse_cauchy(conv, w, &tol)?;
    let rhs = inverse_cauchy(p, w, &tol)? + inverse_cauchy(q, w, &tol)? - 1.0 / to_f64(w);
    Ok(BoundReport { lhs, rhs, margin: rhs - lhs })
}

/// `K_{p ⊞_d q}(w)` against `K_p(w) + K_q(w) - 1/w`.
pub fn check_sym_bound(p: &RatPoly, q: &RatPoly, d: usize, w: &Rat) -> Result<BoundReport> {
    bound_report(&sym_convolve(p, q, d)?, p, q, w)
}

/// `K_{S(p ⊞⊞_d q)}(w)` against `K_{Sp}(w) + K_{Sq}(w) - 1/w`.
pub fn check_asym_bound(p: &RatPoly, q: &RatPoly, d: usize, w: &Rat) -> Result<BoundReport> {
    let conv = asym_convolve(p, q, d)?.s_transform();
    bound_report(&conv, &p.s_transform(), &q.s_transform(), w)
}

/// `(x-1)^{d/2-1} (x+1)^{d/2}`: a perfect matching on `d` vertices with the
/// trivial root 1 removed.
pub fn matching_nontrivial_poly(d: usize) -> Result<RatPoly> {
    if d < 2 || d % 2 == 1 {
        return param(format!("a perfect matching needs an even number of vertices, got {d}"));
    }
    Ok(&RatPoly::from_i64(&[-1, 1]).pow(d / 2 - 1) * &RatPoly::from_i64(&[1, 1]).pow(d / 2))
}

/// `(x-1)^{d-1}`: the Gram polynomial of a permutation with the trivial root
/// removed.
pub fn bip_matching_nontrivial_poly(d: usize) -> Result<RatPoly> {
    if d < 2 {
        return param(format!("need at least two vertices per side, got {d}"));
    }
    Ok(RatPoly::from_i64(&[-1, 1]).pow(d - 1))
}

/// Golden-section minimum of `(x^2 + m - 1) / x` over `x > 0`.
pub fn minimize_bound_ratio(m: usize) -> f64 {
    let c = (m - 1) as f64;
    let f = |x: f64| (x * x + c) / x;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-9, 1.0 + c);
    for _ in 0..200 {
        let x1 = b - inv_phi * (b - a);
        let x2 = a + inv_phi * (b - a);
        if f(x1) < f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    f(0.5 * (a + b))
}

/// `2 sqrt(m-1)`, exact, checked against a numeric minimization.
pub fn ramanujan_bound(m: usize) -> Result<QuadScalar> {
    if m < 2 {
        return param(format!("the bound needs m >= 2, got {m}"));
    }
    let exact = QuadScalar::new(Rat::zero(), int(2), (m - 1) as u64);
    let numeric = minimize_bound_ratio(m);
    if (exact.to_f64() - numeric).abs() > 1e-12 * numeric.max(1.0) {
        return Err(Error::Internal(format!(
            "bound {exact} disagrees with minimization {numeric}"
        )));
    }
    Ok(exact)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionKind {
    Sym,
    Asym,
}

impl std::str::FromStr for ConvolutionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sym" => Ok(Self::Sym),
            "asym" => Ok(Self::Asym),
            _ => Err(Error::Parameter(format!("unknown kind {s:?}, expected sym or asym"))),
        }
    }
}

/// One cell of the bound table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub m: usize,
    pub d: usize,
    pub kind: ConvolutionKind,
    pub poly: RatPoly,
    pub bracket: (Rat, Rat),
    pub bound: QuadScalar,
    pub below_bound: bool,
}

/// The expected nontrivial polynomial of `m` matchings: the `m`-fold
/// convolution of the matching polynomial (sym) or the dilated `m`-fold
/// asymmetric convolution (asym).
pub fn mfold_matching_poly(m: usize, d: usize, kind: ConvolutionKind) -> Result<RatPoly> {
    match kind {
        ConvolutionKind::Sym => m_fold_sym(&matching_nontrivial_poly(d)?, m, d - 1),
        ConvolutionKind::Asym => {
            Ok(m_fold_asym(&bip_matching_nontrivial_poly(d)?, m, d - 1)?.s_transform())
        }
    }
}

pub fn bound_row(m: usize, d: usize, kind: ConvolutionKind) -> Result<BoundRow> {
    let poly = mfold_matching_poly(m, d, kind)?;
    let bound = ramanujan_bound(m)?;
    let bracket = sturm::max_root_bracket(&poly, &rat(1, 1 << 40))?;
    let top = QuadScalar::rational(poly.cauchy_root_bound() + int(1));
    let below_bound = sturm::count_roots_in(&poly, &bound, &top, false)? == 0;
    Ok(BoundRow { m, d, kind, poly, bracket, bound, below_bound })
}

/// All `(m, d)` cells, computed in parallel and returned in input order
/// (`m` outer, `d` inner).
pub fn mfold_root_bound_table(ms: &[usize], ds: &[usize], kind: ConvolutionKind) -> Result<Vec<BoundRow>> {
    let cells: Vec<(usize, usize)> =
        ms.iter().flat_map(|&m| ds.iter().map(move |&d| (m, d))).collect();
    cells.par_iter().map(|&(m, d)| bound_row(m, d, kind)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> RatPoly {
        RatPoly::from_i64(c)
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy(&RatPoly::monomial(int(1), 3), &int(2)).unwrap(), rat(1, 2));
        assert_eq!(cauchy(&poly(&[-1, 0, 1]), &int(2)).unwrap(), rat(2, 3));
        let p = &poly(&[-1, 1]).pow(2) * &poly(&[1, 1]).pow(3);
        assert_eq!(cauchy(&p, &int(3)).unwrap(), rat(7, 20));
        assert!(matches!(cauchy(&p, &int(1)), Err(Error::Pole(_))));
    }

    #[test]
    fn inverse_cauchy_examples() {
        let tol = default_tol();
        let x = inverse_cauchy(&RatPoly::monomial(int(1), 4), &rat(1, 2), &tol).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        let x = inverse_cauchy(&poly(&[-1, 0, 1]), &rat(2, 3), &tol).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
        let p = poly(&[-15, 2, 1]);
        let x = inverse_cauchy(&p, &int(1_000_000), &tol).unwrap();
        let (lo, hi) = sturm::max_root_bracket(&p, &rat(1, 1_000_000)).unwrap();
        assert!(x > to_f64(&lo) && x - to_f64(&hi) < 1e-5);
        assert!(inverse_cauchy(&p, &int(0), &tol).is_err());
    }

    #[test]
    fn bound_examples() {
        let xd = RatPoly::monomial(int(1), 3);
        for w in [rat(1, 4), int(1), int(4)] {
            assert!(check_sym_bound(&xd, &xd, 3, &w).unwrap().margin.abs() < 1e-9);
            assert!(check_asym_bound(&xd, &xd, 3, &w).unwrap().margin.abs() < 1e-9);
        }
        let sq = poly(&[-1, 1]).pow(2);
        let r = check_sym_bound(&sq, &sq, 2, &int(1)).unwrap();
        assert!((r.lhs - 3.0).abs() < 1e-12 && (r.rhs - 3.0).abs() < 1e-12);
        let q4 = poly(&[-1, 1]).pow(4);
        assert!(check_asym_bound(&q4, &q4, 4, &int(1)).unwrap().margin >= -1e-12);
    }

    #[test]
    fn matching_polys() {
        assert_eq!(matching_nontrivial_poly(2).unwrap(), poly(&[1, 1]));
        assert_eq!(
            matching_nontrivial_poly(4).unwrap(),
            &poly(&[-1, 1]) * &poly(&[1, 1]).pow(2)
        );
        assert!(matching_nontrivial_poly(5).is_err());
        assert_eq!(bip_matching_nontrivial_poly(2).unwrap(), poly(&[-1, 1]));
        let b = bip_matching_nontrivial_poly(5).unwrap();
        assert_eq!(b, poly(&[-1, 1]).pow(4));
        assert_eq!(b.s_transform(), poly(&[-1, 0, 1]).pow(4));
        // Cauchy transform of (x^2-1)^{d-1} is x/(x^2-1).
        let x = rat(5, 2);
        assert_eq!(cauchy(&b.s_transform(), &x).unwrap(), &x / (&x * &x - int(1)));
    }

    #[test]
    fn bounds() {
        assert_eq!(ramanujan_bound(2).unwrap(), QuadScalar::rational(int(2)));
        assert_eq!(ramanujan_bound(3).unwrap().to_string(), "2*sqrt(2)");
        assert_eq!(ramanujan_bound(5).unwrap(), QuadScalar::rational(int(4)));
        assert!(ramanujan_bound(1).is_err());
    }

    #[test]
    fn table_cells() {
        let rows = mfold_root_bound_table(&[2, 3], &[4, 6], ConvolutionKind::Sym).unwrap();
        assert_eq!(rows.iter().map(|r| (r.m, r.d)).collect::<Vec<_>>(), vec![(2, 4), (2, 6), (3, 4), (3, 6)]);
        assert!(rows.iter().all(|r| r.below_bound || r.m == 2));
        // m = 2: the largest root is at most 2.
        for r in rows.iter().filter(|r| r.m == 2) {
            assert!(r.bracket.0 <= int(2));
        }
        let asym = mfold_root_bound_table(&[3], &[4], ConvolutionKind::Asym).unwrap();
        assert!(asym[0].below_bound);
    }

    proptest! {
        #[test]
        fn matching_transform_sits_below_full_matching(d2 in 1usize..8, num in 1i64..200, den in 1i64..50) {
            let d = 2 * d2;
            let x = int(1) + rat(num, den);
            let g = cauchy(&matching_nontrivial_poly(d).unwrap(), &x).unwrap();
            prop_assert!(g < &x / (&x * &x - int(1)));
        }

        #[test]
        fn cauchy_decreasing(roots in prop::collection::vec(-5i64..5, 1..6), a in 1i64..20, b in 1i64..20) {
            let p = RatPoly::from_roots(&roots.iter().map(|&r| int(r)).collect::<Vec<_>>());
            let top = int(*roots.iter().max().unwrap());
            let x1 = &top + rat(a, 7);
            let x2 = &x1 + rat(b, 7);
            prop_assert!(cauchy(&p, &x1).unwrap() > cauchy(&p, &x2).unwrap());
            let w = cauchy(&p, &x1).unwrap();
            let k = inverse_cauchy(&p, &w, &default_tol()).unwrap();
            prop_assert!((k - to_f64(&x1)).abs() < 1e-9);
        }
    }
}
