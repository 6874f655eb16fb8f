//! Random test instances: real-rooted polynomials and structured matrices.

use num_traits::Zero;

use crate::matrix::RatMatrix;
use crate::perm::{Permutation, RandomSwap, SwapProgram};
use crate::poly::RatPoly;
use crate::rational::{int, rat, Rat};
use crate::rng::StreamRng;

/// Monic degree-`d` polynomial with rational roots `n/den`, `n` in
/// `[-span, span]` and `den` in `1..=max_den`.
pub fn real_rooted(rng: &mut StreamRng, d: usize, span: i64, max_den: i64) -> RatPoly {
    let roots: Vec<Rat> = (0..d)
        .map(|_| rat(rng.range_i64(-span, span), rng.range_i64(1, max_den)))
        .collect();
    RatPoly::from_roots(&roots)
}

/// As [`real_rooted`] with every root in `[0, span]`.
pub fn nonnegative_rooted(rng: &mut StreamRng, d: usize, span: i64, max_den: i64) -> RatPoly {
    let roots: Vec<Rat> = (0..d)
        .map(|_| rat(rng.range_i64(0, span), rng.range_i64(1, max_den)))
        .collect();
    RatPoly::from_roots(&roots)
}

/// Symmetric integer matrix with entries in `[-k, k]`.
pub fn symmetric(rng: &mut StreamRng, d: usize, k: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            let v = int(rng.range_i64(-k, k));
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

/// Symmetric integer matrix whose rows (and so columns) all sum to a random
/// constant: random off-diagonal entries, diagonal fixing the sums.
pub fn symmetric_constant_row_sum(rng: &mut StreamRng, d: usize, k: i64) -> RatMatrix {
    let mut m = symmetric(rng, d, k);
    let c = int(rng.range_i64(-k, k));
    for i in 0..d {
        let off: Rat = (0..d).filter(|&j| j != i).map(|j| m.get(i, j).clone()).sum();
        m.set(i, i, &c - off);
    }
    m
}

/// `Σ c_k P_k` for a few random permutations: rows and columns all sum to
/// `Σ c_k`.
pub fn doubly_regular(rng: &mut StreamRng, d: usize, terms: usize, k: i64) -> RatMatrix {
    let mut m = RatMatrix::zeros(d);
    for _ in 0..terms {
        let p = Permutation::uniform(d, rng);
        let c = int(rng.range_i64(-k, k));
        if !c.is_zero() {
            m = m.add(&p.matrix().scale(&c));
        }
    }
    m
}

/// `swaps` random swaps on `d` indices with probabilities `j/den`.
pub fn swap_program(rng: &mut StreamRng, d: usize, swaps: usize, den: i64) -> SwapProgram {
    let list = (0..swaps)
        .map(|_| {
            let s = rng.below(d as u64) as usize;
            let t = (s + 1 + rng.below(d as u64 - 1) as usize) % d;
            RandomSwap::new(s, t, rat(rng.range_i64(0, den), den)).expect("valid swap")
        })
        .collect();
    SwapProgram::new(d, list).expect("indices in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturm::is_real_rooted;

    #[test]
    fn generators_meet_their_contracts() {
        let mut rng = StreamRng::new(11);
        for d in 2..6 {
            assert!(is_real_rooted(&real_rooted(&mut rng, d, 5, 3)).unwrap());
            let a = symmetric_constant_row_sum(&mut rng, d, 3);
            assert!(a.is_symmetric() && a.constant_row_sum().is_some());
            let b = doubly_regular(&mut rng, d, 3, 2);
            assert!(b.constant_row_sum().is_some() && b.constant_col_sum() == b.constant_row_sum());
            let prog = swap_program(&mut rng, d, 5, 4);
            assert!(prog.swaps().iter().all(|s| s.s != s.t && s.s < d && s.t < d));
        }
    }
}
