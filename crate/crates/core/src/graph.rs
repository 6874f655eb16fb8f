//! Unions of random perfect matchings and exact Ramanujan certificates.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::matrix::RatMatrix;
use crate::numeric;
use crate::perm::Permutation;
use crate::poly::RatPoly;
use crate::quad::QuadScalar;
use crate::rational::{int, Rat};
use crate::rng::StreamRng;
use crate::sturm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bipartite,
    #[serde(alias = "plain")]
    Nonbipartite,
}

impl Mode {
    pub fn is_bipartite(self) -> bool {
        self == Mode::Bipartite
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bipartite => "bipartite",
            Mode::Nonbipartite => "nonbipartite",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bipartite" => Ok(Mode::Bipartite),
            "nonbipartite" | "plain" => Ok(Mode::Nonbipartite),
            _ => param(format!("unknown mode {s:?}, expected bipartite or plain")),
        }
    }
}

/// `m` permutations generating a multigraph: bipartite mode uses `Σ dil(P_i)`
/// on `2d` vertices, nonbipartite mode `Σ P_i M P_i^T` on `d` vertices with
/// `M` pairing `2k` and `2k+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingUnion {
    pub mode: Mode,
    pub d: usize,
    pub m: usize,
    pub perms: Vec<Permutation>,
    pub seed: Option<u64>,
}

pub fn validate_params(mode: Mode, d: usize, m: usize) -> Result<()> {
    if m < 1 {
        return param("degree m must be at least 1");
    }
    if d < 1 {
        return param("dimension d must be at least 1");
    }
    if mode == Mode::Nonbipartite && d % 2 == 1 {
        return param(format!("a perfect matching needs an even vertex count, got {d}"));
    }
    Ok(())
}

/// The fixed perfect matching pairing `2k` with `2k+1`.
pub fn fixed_matching(d: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(d);
    for k in 0..d / 2 {
        m.set(2 * k, 2 * k + 1, Rat::one());
        m.set(2 * k + 1, 2 * k, Rat::one());
    }
    m
}

impl MatchingUnion {
    pub fn new(mode: Mode, d: usize, m: usize, perms: Vec<Permutation>, seed: Option<u64>) -> Result<Self> {
        validate_params(mode, d, m)?;
        if perms.len() != m {
            return param(format!("expected {m} permutations, got {}", perms.len()));
        }
        if let Some(p) = perms.iter().find(|p| p.len() != d) {
            return param(format!("permutation {p} does not act on {d} points"));
        }
        Ok(Self { mode, d, m, perms, seed })
    }

    pub fn vertices(&self) -> usize {
        if self.mode.is_bipartite() {
            2 * self.d
        } else {
            self.d
        }
    }

    /// Symmetric integer adjacency matrix; entries count parallel edges.
    pub fn adjacency(&self) -> RatMatrix {
        let n = self.vertices();
        let mut a = RatMatrix::zeros(n);
        match self.mode {
            Mode::Bipartite => {
                for p in &self.perms {
                    for i in 0..self.d {
                        let (r, c) = (p.apply(i), self.d + i);
                        let v = a.get(r, c) + Rat::one();
                        a.set(r, c, v.clone());
                        a.set(c, r, v);
                    }
                }
            }
            Mode::Nonbipartite => {
                let mm = fixed_matching(self.d);
                for p in &self.perms {
                    a = a.add(&mm.conjugate(p));
                }
            }
        }
        a
    }
}

pub fn sample_nonbipartite(d: usize, m: usize, rng: &mut StreamRng) -> Result<MatchingUnion> {
    validate_params(Mode::Nonbipartite, d, m)?;
    let perms = (0..m).map(|_| Permutation::uniform(d, rng)).collect();
    MatchingUnion::new(Mode::Nonbipartite, d, m, perms, None)
}

pub fn sample_bipartite(d: usize, m: usize, rng: &mut StreamRng) -> Result<MatchingUnion> {
    validate_params(Mode::Bipartite, d, m)?;
    let perms = (0..m).map(|_| Permutation::uniform(d, rng)).collect();
    MatchingUnion::new(Mode::Bipartite, d, m, perms, None)
}

pub fn sample(mode: Mode, d: usize, m: usize, rng: &mut StreamRng) -> Result<MatchingUnion> {
    match mode {
        Mode::Bipartite => sample_bipartite(d, m, rng),
        Mode::Nonbipartite => sample_nonbipartite(d, m, rng),
    }
}

/// Divides out `x - m` once, and `x + m` once more in bipartite mode.
pub fn deflate_trivial(p: &RatPoly, m: usize, bipartite: bool) -> Result<RatPoly> {
    let mi = int(m as i64);
    let mut q = p
        .exact_div(&RatPoly::linear_root(&mi))
        .ok_or_else(|| Error::Contract(format!("x - {m} does not divide {p}; input is not {m}-regular")))?;
    if bipartite {
        q = q
            .exact_div(&RatPoly::linear_root(&-mi))
            .ok_or_else(|| Error::Contract(format!("x + {m} does not divide {p}; input is not bipartite")))?;
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    StrictlyRamanujan,
    RamanujanWithBoundary,
    NotRamanujan,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StrictlyRamanujan => "strictly-ramanujan",
            Verdict::RamanujanWithBoundary => "ramanujan-with-boundary",
            Verdict::NotRamanujan => "not-ramanujan",
        })
    }
}

/// Exact root counts of the deflated characteristic polynomial against
/// `±2 sqrt(m-1)`, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamanujanCertificate {
    pub graph: MatchingUnion,
    pub char_poly: RatPoly,
    pub deflated: RatPoly,
    pub bound: QuadScalar,
    pub interior_count: usize,
    pub boundary_count: usize,
    pub exterior_count: usize,
    pub verdict: Verdict,
}

impl RamanujanCertificate {
    pub fn mode(&self) -> Mode {
        self.graph.mode
    }

    pub fn m(&self) -> usize {
        self.graph.m
    }

    pub fn d(&self) -> usize {
        self.graph.d
    }

    /// Recomputes the certificate from the embedded graph and compares.
    pub fn reverify(&self) -> Result<bool> {
        Ok(certify(&self.graph)? == *self)
    }
}

/// `2 sqrt(m-1)` for any `m >= 1` (0 when `m = 1`).
pub fn degree_bound(m: usize) -> QuadScalar {
    QuadScalar::new(Rat::zero(), int(2), (m - 1) as u64)
}

pub(crate) struct RootCounts {
    pub interior: usize,
    pub boundary: usize,
    pub exterior: usize,
}

pub(crate) fn count_against_bound(p: &RatPoly, bound: &QuadScalar) -> Result<RootCounts> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(RootCounts { interior: 0, boundary: 0, exterior: 0 });
    }
    let neg = -bound;
    let interior = if bound.signum() > 0 {
        sturm::count_roots_in_with_multiplicity(p, &neg, bound, true)?
    } else {
        0
    };
    let mut boundary = sturm::multiplicity_at(p, bound)?;
    if bound.signum() > 0 {
        boundary += sturm::multiplicity_at(p, &neg)?;
    }
    let real = sturm::count_real_roots_with_multiplicity(p)?;
    if real != deg {
        return Err(Error::Internal(format!("{p} is not real-rooted")));
    }
    Ok(RootCounts { interior, boundary, exterior: real - interior - boundary })
}

pub fn certify(g: &MatchingUnion) -> Result<RamanujanCertificate> {
    let char_poly = g.adjacency().char_poly();
    let deflated = deflate_trivial(&char_poly, g.m, g.mode.is_bipartite())?;
    let bound = degree_bound(g.m);
    let counts = count_against_bound(&deflated, &bound)?;
    let deg = deflated.degree().unwrap_or(0);
    // A surviving eigenvalue m means a disconnected graph; with m = 2 it sits
    // on the boundary, but it is never accepted.
    let disconnected = deg > 0 && sturm::multiplicity_at(&deflated, &QuadScalar::rational(int(g.m as i64)))? > 0;
    let verdict = if counts.interior == deg {
        Verdict::StrictlyRamanujan
    } else if counts.exterior == 0 && !disconnected {
        Verdict::RamanujanWithBoundary
    } else {
        Verdict::NotRamanujan
    };
    Ok(RamanujanCertificate {
        graph: g.clone(),
        char_poly,
        deflated,
        bound,
        interior_count: counts.interior,
        boundary_count: counts.boundary,
        exterior_count: counts.exterior,
        verdict,
    })
}

/// Largest nontrivial absolute eigenvalue by a floating eigensolver. For
/// screening only.
pub fn float_filter(g: &MatchingUnion) -> f64 {
    let n = g.vertices();
    let eig = numeric::symmetric_eigenvalues(&g.adjacency().to_f64(), n);
    let rest = if g.mode.is_bipartite() { &eig[1..n - 1] } else { &eig[1..] };
    rest.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn bip(perms: &[&[usize]]) -> MatchingUnion {
        let d = perms[0].len();
        MatchingUnion::new(Mode::Bipartite, d, perms.len(), perms.iter().map(|p| perm(p)).collect(), None).unwrap()
    }

    #[test]
    fn adjacency_invariants() {
        let mut rng = StreamRng::new(1);
        for _ in 0..20 {
            for g in [sample_bipartite(3, 3, &mut rng).unwrap(), sample_nonbipartite(4, 3, &mut rng).unwrap()] {
                let a = g.adjacency();
                assert!(a.is_symmetric());
                assert_eq!(a.constant_row_sum(), Some(int(3)));
                let p = a.char_poly();
                assert!(deflate_trivial(&p, 3, g.mode.is_bipartite()).is_ok());
                if g.mode.is_bipartite() {
                    for i in 0..3 {
                        for j in 0..3 {
                            assert!(a.get(i, j).is_zero() && a.get(3 + i, 3 + j).is_zero());
                        }
                    }
                    assert!(p.coeffs().iter().skip(1).step_by(2).all(Zero::is_zero));
                }
            }
        }
        assert!(sample_nonbipartite(3, 2, &mut rng).is_err());
    }

    #[test]
    fn small_spectra() {
        let mut rng = StreamRng::new(2);
        let g = sample_nonbipartite(6, 1, &mut rng).unwrap();
        assert_eq!(g.adjacency().char_poly(), RatPoly::from_i64(&[-1, 0, 1]).pow(3));
        let id = MatchingUnion::new(Mode::Nonbipartite, 4, 3, vec![Permutation::identity(4); 3], None).unwrap();
        assert_eq!(id.adjacency().char_poly(), RatPoly::from_i64(&[-9, 0, 1]).pow(2));
    }

    #[test]
    fn deflation_examples() {
        let p = &RatPoly::from_roots(&[int(3), int(-3)]) * &RatPoly::from_i64(&[-1, 0, 1]);
        assert_eq!(deflate_trivial(&p, 3, true).unwrap(), RatPoly::from_i64(&[-1, 0, 1]));
        assert!(matches!(deflate_trivial(&RatPoly::from_i64(&[-1, 0, 1]), 3, false), Err(Error::Contract(_))));
        // Disconnected: only one copy of x - m is removed.
        let two = RatPoly::from_roots(&[int(2), int(2), int(0)]);
        assert_eq!(deflate_trivial(&two, 2, false).unwrap(), RatPoly::from_roots(&[int(2), int(0)]));
    }

    #[test]
    fn certificate_examples() {
        let good = certify(&bip(&[&[0, 1], &[0, 1], &[1, 0]])).unwrap();
        assert_eq!(good.deflated, RatPoly::from_i64(&[-1, 0, 1]));
        assert_eq!(good.verdict, Verdict::StrictlyRamanujan);
        assert_eq!((good.interior_count, good.boundary_count, good.exterior_count), (2, 0, 0));
        assert!(good.reverify().unwrap());
        let bad = certify(&bip(&[&[1, 0], &[1, 0], &[1, 0]])).unwrap();
        assert_eq!(bad.deflated, RatPoly::from_i64(&[-9, 0, 1]));
        assert_eq!(bad.verdict, Verdict::NotRamanujan);
        // Two aligned matchings on 4 vertices: a doubled edge pair, eigenvalue 2 survives.
        let id = Permutation::identity(4);
        let aligned = MatchingUnion::new(Mode::Nonbipartite, 4, 2, vec![id.clone(), id], None).unwrap();
        assert_eq!(certify(&aligned).unwrap().verdict, Verdict::NotRamanujan);
        // A 4-cycle: spectrum 2, 0, 0, -2; -2 sits on the boundary.
        let cyc = MatchingUnion::new(Mode::Nonbipartite, 4, 2, vec![Permutation::identity(4), perm(&[1, 2, 3, 0])], None).unwrap();
        let c = certify(&cyc).unwrap();
        assert_eq!(c.verdict, Verdict::RamanujanWithBoundary);
        assert_eq!((c.interior_count, c.boundary_count), (2, 1));
    }

    #[test]
    fn degenerate_sizes() {
        let one = bip(&[&[0]]);
        assert_eq!(certify(&one).unwrap().verdict, Verdict::StrictlyRamanujan);
        let m1 = bip(&[&[1, 0]]);
        assert_eq!(certify(&m1).unwrap().verdict, Verdict::NotRamanujan);
        // m = 5: the bound 4 is rational.
        let mut rng = StreamRng::new(3);
        let g = sample_bipartite(3, 5, &mut rng).unwrap();
        assert!(certify(&g).unwrap().bound.is_rational());
    }

    #[test]
    fn float_filter_agrees_with_certificates() {
        let g = bip(&[&[0, 1], &[0, 1], &[1, 0]]);
        assert!((float_filter(&g) - 1.0).abs() < 1e-9);
        let id = MatchingUnion::new(Mode::Nonbipartite, 4, 3, vec![Permutation::identity(4); 3], None).unwrap();
        assert!((float_filter(&id) - 3.0).abs() < 1e-9);
        let mut rng = StreamRng::new(4);
        for i in 0..200 {
            let g = if i % 2 == 0 { sample_bipartite(5, 3, &mut rng) } else { sample_nonbipartite(8, 3, &mut rng) }.unwrap();
            let cert = certify(&g).unwrap();
            let lam = float_filter(&g);
            let b = cert.bound.to_f64();
            if lam < b - 1e-6 {
                assert_eq!(cert.verdict, Verdict::StrictlyRamanujan);
            } else if lam > b + 1e-6 {
                assert_eq!(cert.verdict, Verdict::NotRamanujan);
            }
            // Splitting the interval at 0 gives the same interior count.
            if cert.deflated.degree().unwrap_or(0) > 0 {
                let zero = QuadScalar::rational(rat(0, 1));
                let left = sturm::count_roots_in_with_multiplicity(&cert.deflated, &-&cert.bound, &zero, true).unwrap();
                let right = sturm::count_roots_in_with_multiplicity(&cert.deflated, &zero, &cert.bound, true).unwrap();
                let mid = sturm::multiplicity_at(&cert.deflated, &zero).unwrap();
                assert_eq!(left + mid + right, cert.interior_count);
            }
        }
    }
}
