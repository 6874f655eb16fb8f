//! Exact expected characteristic polynomials by enumeration, the quadrature
//! identities, and the Fourier-degree check.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{asym_convolve, sym_convolve};
use crate::error::{param, Error, Result};
use crate::matrix::RatMatrix;
use crate::numeric;
use crate::perm::{Permutation, SwapProgram, DEFAULT_SWAP_BUDGET};
use crate::poly::RatPoly;
use crate::rational::{int, to_f64, Rat};
use crate::rng::StreamRng;

/// Default cap on determinant evaluations in one enumeration.
pub const DEFAULT_DET_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PermEnum,
    SwapEnum,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedPoly {
    pub poly: RatPoly,
    pub method: Method,
    pub terms: u64,
    /// Per-coefficient standard errors, Monte Carlo only.
    pub std_errors: Option<Vec<f64>>,
}

fn check_square(mats: &[RatMatrix]) -> Result<usize> {
    let Some(first) = mats.first() else {
        return param("need at least one matrix");
    };
    let d = first.dim();
    if mats.iter().any(|m| m.dim() != d) {
        return param("matrices must share one dimension");
    }
    Ok(d)
}

fn sum_polys(polys: impl ParallelIterator<Item = (Rat, RatPoly)>) -> RatPoly {
    polys
        .map(|(w, p)| p.scale(&w))
        .reduce(RatPoly::zero, |a, b| &a + &b)
}

fn factorial_u64(d: usize) -> Option<u64> {
    (1..=d as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

fn tuple_count(d: usize, free: usize, budget: u64) -> Result<u64> {
    let per = factorial_u64(d);
    let total = per.and_then(|f| (0..free).try_fold(1u64, |acc, _| acc.checked_mul(f)));
    match total {
        Some(t) if t <= budget => Ok(t),
        _ => Err(Error::Budget(format!(
            "({d}!)^{free} permutation tuples exceed the budget of {budget} determinants"
        ))),
    }
}

fn enumerate_tuples(mats: &[RatMatrix], fix_first: bool, budget: u64) -> Result<ExpectedPoly> {
    let d = check_square(mats)?;
    let free = if fix_first { mats.len() - 1 } else { mats.len() };
    let total = tuple_count(d, free, budget)?;
    let perms = Permutation::all(d);
    let np = perms.len() as u64;
    let sum = sum_polys((0..total).into_par_iter().map(|mut idx| {
        let mut acc = if fix_first { mats[0].clone() } else { RatMatrix::zeros(d) };
        for a in &mats[usize::from(fix_first)..] {
            let p = &perms[(idx % np) as usize];
            idx /= np;
            acc = acc.add(&a.conjugate(p));
        }
        (Rat::one(), acc.char_poly())
    }));
    Ok(ExpectedPoly {
        poly: sum.scale(&(Rat::one() / int(total as i64))),
        method: Method::PermEnum,
        terms: total,
        std_errors: None,
    })
}

/// Exact average of `χ(Σ P_i A_i P_i^T)` over independent uniform permutations.
/// `P_1` is fixed to the identity, which conjugation invariance makes exact.
pub fn expected_charpoly_perm(mats: &[RatMatrix]) -> Result<ExpectedPoly> {
    expected_charpoly_perm_with_budget(mats, DEFAULT_DET_BUDGET)
}

pub fn expected_charpoly_perm_with_budget(mats: &[RatMatrix], budget: u64) -> Result<ExpectedPoly> {
    enumerate_tuples(mats, true, budget)
}

/// Same average without fixing the first permutation.
pub fn expected_charpoly_perm_full(mats: &[RatMatrix]) -> Result<ExpectedPoly> {
    enumerate_tuples(mats, false, DEFAULT_DET_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadratureReport {
    pub lhs: RatPoly,
    pub rhs: RatPoly,
    pub equal: bool,
    pub a: Rat,
    pub b: Rat,
    pub terms: u64,
}

fn row_sum(m: &RatMatrix, name: &str) -> Result<Rat> {
    m.row_sum_annotation()
        .cloned()
        .or_else(|| m.constant_row_sum())
        .ok_or_else(|| Error::Contract(format!("{name} has no constant row sum")))
}

fn deflate_root(p: &RatPoly, root: &Rat) -> Result<RatPoly> {
    p.exact_div(&RatPoly::linear_root(root)).ok_or_else(|| {
        Error::Internal(format!("{root} is not a root of {p}"))
    })
}

/// Compares the enumeration average over `P` of `χ(A + P B P^T)` with
/// `(x - (a+b)) (p ⊞_{d-1} q)`, where `χ_A = (x-a) p` and `χ_B = (x-b) q`.
pub fn verify_sym_quadrature(a: &RatMatrix, b: &RatMatrix) -> Result<QuadratureReport> {
    if !a.is_symmetric() || !b.is_symmetric() {
        return Err(Error::Contract("quadrature needs symmetric matrices".into()));
    }
    let d = check_square(&[a.clone(), b.clone()])?;
    if d < 1 {
        return param("empty matrices");
    }
    let sa = row_sum(a, "A")?;
    let sb = row_sum(b, "B")?;
    let lhs_e = expected_charpoly_perm(&[a.clone(), b.clone()])?;
    let p = deflate_root(&a.char_poly(), &sa)?;
    let q = deflate_root(&b.char_poly(), &sb)?;
    let rhs = &RatPoly::linear_root(&(&sa + &sb)) * &sym_convolve(&p, &q, d - 1)?;
    Ok(QuadratureReport {
        equal: lhs_e.poly == rhs,
        lhs: lhs_e.poly,
        rhs,
        a: sa,
        b: sb,
        terms: lhs_e.terms,
    })
}

fn doubly_regular_sum(m: &RatMatrix, name: &str) -> Result<Rat> {
    let r = row_sum(m, name)?;
    if m.constant_col_sum().as_ref() != Some(&r) {
        return Err(Error::Contract(format!(
            "{name} needs equal constant row and column sums"
        )));
    }
    Ok(r)
}

/// Exact average over independent uniform `(P, S)` of
/// `χ(dil(A) + (P⊕S) dil(B) (P⊕S)^T)`.
pub fn expected_bipartite_charpoly(a: &RatMatrix, b: &RatMatrix) -> Result<ExpectedPoly> {
    let d = check_square(&[a.clone(), b.clone()])?;
    let total = tuple_count(d, 2, DEFAULT_DET_BUDGET)?;
    let perms = Permutation::all(d);
    let np = perms.len() as u64;
    let dil_a = a.dilation();
    let dil_b = b.dilation();
    let sum = sum_polys((0..total).into_par_iter().map(|idx| {
        let p = &perms[(idx % np) as usize];
        let s = &perms[(idx / np) as usize];
        let mut image = p.image().to_vec();
        image.extend(s.image().iter().map(|&v| v + d));
        let ps = Permutation::new(image).expect("block permutation");
        (Rat::one(), dil_a.add(&dil_b.conjugate(&ps)).char_poly())
    }));
    Ok(ExpectedPoly {
        poly: sum.scale(&(Rat::one() / int(total as i64))),
        method: Method::PermEnum,
        terms: total,
        std_errors: None,
    })
}

/// Compares the bipartite enumeration with
/// `(x^2 - (a+b)^2) S(p ⊞⊞_{d-1} q)`, where `χ_{AA^T} = (x - a^2) p`.
pub fn verify_bip_quadrature(a: &RatMatrix, b: &RatMatrix) -> Result<QuadratureReport> {
    let d = check_square(&[a.clone(), b.clone()])?;
    if d < 1 {
        return param("empty matrices");
    }
    let sa = doubly_regular_sum(a, "A")?;
    let sb = doubly_regular_sum(b, "B")?;
    let lhs_e = expected_bipartite_charpoly(a, b)?;
    let p = deflate_root(&a.mul(&a.transpose()).char_poly(), &(&sa * &sa))?;
    let q = deflate_root(&b.mul(&b.transpose()).char_poly(), &(&sb * &sb))?;
    let ab = &sa + &sb;
    let trivial = RatPoly::from_coeffs(vec![-(&ab * &ab), Rat::zero(), Rat::one()]);
    let rhs = &trivial * &asym_convolve(&p, &q, d - 1)?.s_transform();
    Ok(QuadratureReport {
        equal: lhs_e.poly == rhs,
        lhs: lhs_e.poly,
        rhs,
        a: sa,
        b: sb,
        terms: lhs_e.terms,
    })
}

/// Exact average over all swap outcomes of `χ(Σ Q_i A_i Q_i^T)`, `Q_i` the
/// product of program `i`.
pub fn expected_charpoly_swaps(mats: &[RatMatrix], programs: &[SwapProgram]) -> Result<ExpectedPoly> {
    expected_charpoly_swaps_with_budget(mats, programs, DEFAULT_SWAP_BUDGET)
}

pub fn expected_charpoly_swaps_with_budget(
    mats: &[RatMatrix],
    programs: &[SwapProgram],
    budget: usize,
) -> Result<ExpectedPoly> {
    let d = check_square(mats)?;
    if mats.len() != programs.len() {
        return param("need one swap program per matrix");
    }
    if programs.iter().any(|p| p.dim() != d) {
        return param("program dimension differs from matrix dimension");
    }
    let total_swaps: usize = programs.iter().map(SwapProgram::len).sum();
    if total_swaps > budget {
        return Err(Error::Budget(format!(
            "{total_swaps} swaps exceed the leaf-enumeration budget of {budget}"
        )));
    }
    let dists: Vec<Vec<(Permutation, Rat)>> = programs
        .iter()
        .map(|p| Ok(p.leaf_distribution_with_budget(budget)?.into_iter().collect()))
        .collect::<Result<_>>()?;
    let total: u64 = dists.iter().map(|d| d.len() as u64).product();
    let (poly, terms) = weighted_leaf_sum(mats, &dists, total);
    Ok(ExpectedPoly { poly, method: Method::SwapEnum, terms, std_errors: None })
}

/// `Σ_leaves weight · χ(Σ Q_i A_i Q_i^T)` over the product of distributions.
pub(crate) fn weighted_leaf_sum(
    mats: &[RatMatrix],
    dists: &[Vec<(Permutation, Rat)>],
    total: u64,
) -> (RatPoly, u64) {
    let d = mats[0].dim();
    let poly = sum_polys((0..total).into_par_iter().map(|mut idx| {
        let mut acc = RatMatrix::zeros(d);
        let mut w = Rat::one();
        for (a, dist) in mats.iter().zip(dists) {
            let n = dist.len() as u64;
            let (p, pw) = &dist[(idx % n) as usize];
            idx /= n;
            w *= pw;
            acc = acc.add(&a.conjugate(p));
        }
        (w, acc.char_poly())
    }));
    (poly, total)
}

/// Monte Carlo average over independent uniform permutations. Trial `i` draws
/// from stream `(seed, i)`, so results do not depend on scheduling.
pub fn expected_charpoly_mc(mats: &[RatMatrix], trials: u64, seed: u64) -> Result<ExpectedPoly> {
    let d = check_square(mats)?;
    if trials < 1 {
        return param("need at least one trial");
    }
    let samples: Vec<RatPoly> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = StreamRng::derive(seed, i);
            let mut acc = RatMatrix::zeros(d);
            for a in mats {
                acc = acc.add(&a.conjugate(&Permutation::uniform(d, &mut rng)));
            }
            acc.char_poly()
        })
        .collect();
    let sum = samples.iter().fold(RatPoly::zero(), |a, b| &a + b);
    let mean = sum.scale(&(Rat::one() / int(trials as i64)));
    let n = trials as f64;
    let std_errors = (0..=d)
        .map(|k| {
            if trials < 2 {
                return 0.0;
            }
            let mu = to_f64(&mean.coeff(k));
            let ss: f64 = samples.iter().map(|s| (to_f64(&s.coeff(k)) - mu).powi(2)).sum();
            (ss / (n - 1.0) / n).sqrt()
        })
        .collect();
    Ok(ExpectedPoly {
        poly: mean,
        method: Method::MonteCarlo,
        terms: trials,
        std_errors: Some(std_errors),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierReport {
    /// `|ĉ_k|` for `k = 0..=samples/2`.
    pub magnitudes: Vec<f64>,
    pub max_high: f64,
    pub max_all: f64,
    pub relative_high: f64,
}

/// Discrete Fourier coefficients of `θ ↦ det(A + R B R^T)`, `R` the rotation by
/// `θ` on the first two coordinates.
pub fn fourier_degree_test(a: &RatMatrix, b: &RatMatrix, samples: usize) -> Result<FourierReport> {
    let d = check_square(&[a.clone(), b.clone()])?;
    if d < 2 {
        return param("the rotation needs dimension at least 2");
    }
    if samples < 8 {
        return param("need at least 8 sample angles");
    }
    let af = a.to_f64();
    let bf = b.to_f64();
    let values: Vec<f64> = (0..samples)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let mut r = vec![0.0; d * d];
            for i in 2..d {
                r[i * d + i] = 1.0;
            }
            r[0] = c;
            r[1] = -s;
            r[d] = s;
            r[d + 1] = c;
            // R B R^T
            let mut rb = vec![0.0; d * d];
            for i in 0..d {
                for k in 0..d {
                    let rik = r[i * d + k];
                    if rik != 0.0 {
                        for j in 0..d {
                            rb[i * d + j] += rik * bf[k * d + j];
                        }
                    }
                }
            }
            let mut m = af.clone();
            for i in 0..d {
                for j in 0..d {
                    m[i * d + j] += (0..d).map(|k| rb[i * d + k] * r[j * d + k]).sum::<f64>();
                }
            }
            numeric::determinant(&m, d)
        })
        .collect();
    let n = samples as f64;
    let magnitudes: Vec<f64> = (0..=samples / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * j) as f64 / n;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            (re * re + im * im).sqrt() / n
        })
        .collect();
    let max_all = magnitudes.iter().fold(0.0f64, |m, v| m.max(*v));
    let max_high = magnitudes.iter().skip(3).fold(0.0f64, |m, v| m.max(*v));
    let relative_high = if max_all == 0.0 { 0.0 } else { max_high / max_all };
    Ok(FourierReport { magnitudes, max_high, max_all, relative_high })
}

/// Rank and trace of `A - σ A σ^T` for a transposition `σ`.
pub fn rank2_check(sigma: &Permutation, a: &RatMatrix) -> Result<(usize, Rat)> {
    if sigma.as_transposition().is_none() {
        return param(format!("{sigma} is not a transposition"));
    }
    if sigma.len() != a.dim() {
        return param("permutation size differs from matrix dimension");
    }
    let diff = a.sub(&a.conjugate(sigma));
    Ok((diff.rank(), diff.trace()))
}

/// Exact distribution of the block permutation `P ⊕ S` for uniform `P, S`.
pub fn uniform_block_distribution(d: usize) -> Vec<(Permutation, Rat)> {
    let perms = Permutation::all(d);
    let w = Rat::one() / int((perms.len() * perms.len()) as i64);
    let mut out = BTreeMap::new();
    for p in &perms {
        for s in &perms {
            let mut image = p.image().to_vec();
            image.extend(s.image().iter().map(|&v| v + d));
            out.insert(Permutation::new(image).expect("block"), w.clone());
        }
    }
    out.into_iter().collect()
}
