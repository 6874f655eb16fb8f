//! Symmetric and asymmetric finite free additive convolutions.

use num_traits::{One, Zero};

use crate::error::{param, Result};
use crate::poly::RatPoly;
use crate::quad::QuadScalar;
use crate::rational::{factorial, Rat};
use crate::sturm;

/// Coefficients in the form `p(x) = Σ_{i=0}^d x^{d-i} (-1)^i a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedCoeffs {
    pub d: usize,
    pub a: Vec<Rat>,
}

impl SignedCoeffs {
    pub fn from_poly(p: &RatPoly, d: usize) -> Result<Self> {
        if let Some(deg) = p.degree() {
            if deg > d {
                return param(format!("degree {deg} exceeds convolution dimension {d}"));
            }
        }
        let a = (0..=d)
            .map(|i| {
                let c = p.coeff(d - i);
                if i % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Ok(Self { d, a })
    }

    pub fn to_poly(&self) -> RatPoly {
        let mut coeffs = vec![Rat::zero(); self.d + 1];
        for (i, ai) in self.a.iter().enumerate() {
            coeffs[self.d - i] = if i % 2 == 1 { -ai.clone() } else { ai.clone() };
        }
        RatPoly::from_coeffs(coeffs)
    }
}

/// `W(d, i, j) = (d-i)! (d-j)! / (d! (d-i-j)!)` for `i + j <= d`.
fn weights(d: usize) -> Vec<Vec<Rat>> {
    let f: Vec<_> = (0..=d).map(factorial).collect();
    (0..=d)
        .map(|i| {
            (0..=d - i)
                .map(|j| Rat::new(&f[d - i] * &f[d - j], &f[d] * &f[d - i - j]))
                .collect()
        })
        .collect()
}

fn convolve_with(p: &RatPoly, q: &RatPoly, d: usize, squared: bool) -> Result<RatPoly> {
    let a = SignedCoeffs::from_poly(p, d)?;
    let b = SignedCoeffs::from_poly(q, d)?;
    let w = weights(d);
    let mut c = vec![Rat::zero(); d + 1];
    for (i, ai) in a.a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.a.iter().enumerate().take(d + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            let wij = &w[i][j];
            let weight = if squared { wij * wij } else { wij.clone() };
            c[i + j] += weight * ai * bj;
        }
    }
    Ok(SignedCoeffs { d, a: c }.to_poly())
}

/// `p ⊞_d q`.
pub fn sym_convolve(p: &RatPoly, q: &RatPoly, d: usize) -> Result<RatPoly> {
    convolve_with(p, q, d, false)
}

/// `p ⊞⊞_d q`. Inputs with negative or non-real roots are accepted; see
/// [`asym_convolve_checked`] for the flagged form.
pub fn asym_convolve(p: &RatPoly, q: &RatPoly, d: usize) -> Result<RatPoly> {
    convolve_with(p, q, d, true)
}

/// Result of an asymmetric convolution together with whether both inputs met
/// the nonnegative-real-roots contract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymConvolution {
    pub poly: RatPoly,
    pub inputs_nonnegative_rooted: bool,
}

/// Whether every root of `p` is real and `>= 0`. The zero polynomial is not.
pub fn is_nonnegative_rooted(p: &RatPoly) -> Result<bool> {
    if p.is_zero() {
        return Ok(false);
    }
    if !sturm::is_real_rooted(p)? {
        return Ok(false);
    }
    if p.degree() == Some(0) {
        return Ok(true);
    }
    let zero = QuadScalar::rational(Rat::zero());
    let at_or_below = sturm::count_roots_at_or_below(p, &zero)?;
    let at_zero = usize::from(p.coeff(0).is_zero());
    Ok(at_or_below == at_zero)
}

pub fn asym_convolve_checked(p: &RatPoly, q: &RatPoly, d: usize) -> Result<AsymConvolution> {
    let poly = asym_convolve(p, q, d)?;
    let ok = is_nonnegative_rooted(p)? && is_nonnegative_rooted(q)?;
    Ok(AsymConvolution { poly, inputs_nonnegative_rooted: ok })
}

fn m_fold(
    p: &RatPoly,
    m: usize,
    d: usize,
    op: fn(&RatPoly, &RatPoly, usize) -> Result<RatPoly>,
) -> Result<RatPoly> {
    if m < 1 {
        return param("m-fold convolution needs m >= 1");
    }
    // Validates the degree even when m = 1.
    SignedCoeffs::from_poly(p, d)?;
    let mut acc = p.clone();
    for _ in 1..m {
        acc = op(&acc, p, d)?;
    }
    Ok(acc)
}

/// `p ⊞_d ⋯ ⊞_d p` with `m` copies, folded from the left.
pub fn m_fold_sym(p: &RatPoly, m: usize, d: usize) -> Result<RatPoly> {
    m_fold(p, m, d, sym_convolve)
}

/// `p ⊞⊞_d ⋯ ⊞⊞_d p` with `m` copies, folded from the left.
pub fn m_fold_asym(p: &RatPoly, m: usize, d: usize) -> Result<RatPoly> {
    m_fold(p, m, d, asym_convolve)
}

/// Balanced-tree fold of a list; equal to the left fold by associativity.
pub fn fold_balanced(
    polys: &[RatPoly],
    d: usize,
    op: fn(&RatPoly, &RatPoly, usize) -> Result<RatPoly>,
) -> Result<RatPoly> {
    match polys {
        [] => Ok(RatPoly::monomial(Rat::one(), d)),
        [p] => Ok(p.clone()),
        _ => {
            let (l, r) = polys.split_at(polys.len() / 2);
            op(&fold_balanced(l, d, op)?, &fold_balanced(r, d, op)?, d)
        }
    }
}
