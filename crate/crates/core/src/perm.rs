//! Permutations, random swaps and swap programs.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{param, Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::Rat;
use crate::rng::StreamRng;

/// Default cap on the number of swaps whose outcomes are enumerated exactly.
pub const DEFAULT_SWAP_BUDGET: usize = 22;

/// A bijection of `{0, .., d-1}`; `image[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self { image: (0..d).collect() }
    }

    pub fn new(image: Vec<usize>) -> Result<Self> {
        let d = image.len();
        let mut seen = vec![false; d];
        for &v in &image {
            if v >= d || std::mem::replace(&mut seen[v], true) {
                return param(format!("{image:?} is not a permutation of 0..{d}"));
            }
        }
        Ok(Self { image })
    }

    pub fn transposition(d: usize, s: usize, t: usize) -> Self {
        let mut image: Vec<usize> = (0..d).collect();
        image.swap(s, t);
        Self { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self { image: other.image.iter().map(|&i| self.image[i]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Self { image: inv }
    }

    /// The swapped pair if this is a transposition.
    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.len()).filter(|&i| self.image[i] != i).collect();
        match moved[..] {
            [s, t] if self.image[s] == t => Some((s, t)),
            _ => None,
        }
    }

    /// Swaps the images of positions `s` and `t` after applying `self`, i.e.
    /// returns `(s t) ∘ self`.
    pub fn then_swap(&mut self, s: usize, t: usize) {
        for v in self.image.iter_mut() {
            if *v == s {
                *v = t;
            } else if *v == t {
                *v = s;
            }
        }
    }

    /// Permutation matrix with `P e_i = e_{π(i)}`.
    pub fn matrix(&self) -> RatMatrix {
        let d = self.len();
        let mut m = RatMatrix::zeros(d);
        for i in 0..d {
            m.set(self.image[i], i, Rat::one());
        }
        m
    }

    /// Lexicographic rank in `0..d!` (Lehmer code).
    pub fn rank(&self) -> u64 {
        let d = self.len();
        let mut rank = 0u64;
        for i in 0..d {
            let smaller = self.image[i + 1..].iter().filter(|&&v| v < self.image[i]).count() as u64;
            rank = rank * (d - i) as u64 + smaller;
        }
        rank
    }

    /// All `d!` permutations in lexicographic order.
    pub fn all(d: usize) -> Vec<Self> {
        use itertools::Itertools;
        (0..d).permutations(d).map(|image| Self { image }).collect()
    }

    /// Uniform permutation by sequential random insertion (Fisher–Yates).
    pub fn uniform(d: usize, rng: &mut StreamRng) -> Self {
        let mut image: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            image.swap(i, j);
        }
        Self { image }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.image)
    }
}

/// Transposition of `s` and `t` with probability `alpha`, identity otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSwap {
    pub s: usize,
    pub t: usize,
    pub alpha: Rat,
}

impl RandomSwap {
    pub fn new(s: usize, t: usize, alpha: Rat) -> Result<Self> {
        if s == t {
            return param("a swap needs two distinct indices");
        }
        if alpha < Rat::zero() || alpha > Rat::one() {
            return param(format!("swap probability {alpha} outside [0, 1]"));
        }
        Ok(Self { s, t, alpha })
    }
}

/// Swaps `S_1, .., S_N` in application order; the realized permutation is the
/// product `S_N ⋯ S_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapProgram {
    d: usize,
    swaps: Vec<RandomSwap>,
}

impl SwapProgram {
    pub fn new(d: usize, swaps: Vec<RandomSwap>) -> Result<Self> {
        if let Some(sw) = swaps.iter().find(|sw| sw.s >= d || sw.t >= d) {
            return param(format!("swap ({}, {}) out of range for dimension {d}", sw.s, sw.t));
        }
        Ok(Self { d, swaps })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, swaps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn swaps(&self) -> &[RandomSwap] {
        &self.swaps
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Relabels every index by `+offset` inside a larger dimension.
    pub fn shifted(&self, offset: usize, d: usize) -> Self {
        Self {
            d,
            swaps: self
                .swaps
                .iter()
                .map(|sw| RandomSwap { s: sw.s + offset, t: sw.t + offset, alpha: sw.alpha.clone() })
                .collect(),
        }
    }

    /// Runs `self` then `next`.
    pub fn then(&self, next: &Self) -> Self {
        assert_eq!(self.d, next.d);
        Self { d: self.d, swaps: self.swaps.iter().chain(&next.swaps).cloned().collect() }
    }

    pub fn sample(&self, rng: &mut StreamRng) -> Permutation {
        let mut p = Permutation::identity(self.d);
        for sw in &self.swaps {
            if rng.bernoulli(&sw.alpha) {
                p.then_swap(sw.s, sw.t);
            }
        }
        p
    }

    /// Product permutation for a fixed outcome vector (`true` = swap applied).
    pub fn outcome(&self, applied: &[bool]) -> Permutation {
        let mut p = Permutation::identity(self.d);
        for (sw, &on) in self.swaps.iter().zip(applied) {
            if on {
                p.then_swap(sw.s, sw.t);
            }
        }
        p
    }

    /// Exact distribution of the product; fails beyond `budget` swaps.
    pub fn leaf_distribution_with_budget(&self, budget: usize) -> Result<BTreeMap<Permutation, Rat>> {
        if self.len() > budget {
            return Err(Error::Budget(format!(
                "{} swaps exceed the leaf-enumeration budget of {budget}",
                self.len()
            )));
        }
        let mut dist = BTreeMap::new();
        dist.insert(Permutation::identity(self.d), Rat::one());
        for sw in &self.swaps {
            let stay = Rat::one() - &sw.alpha;
            let mut next: BTreeMap<Permutation, Rat> = BTreeMap::new();
            for (p, w) in dist {
                if !stay.is_zero() {
                    *next.entry(p.clone()).or_insert_with(Rat::zero) += &w * &stay;
                }
                if !sw.alpha.is_zero() {
                    let mut q = p;
                    q.then_swap(sw.s, sw.t);
                    *next.entry(q).or_insert_with(Rat::zero) += &w * &sw.alpha;
                }
            }
            dist = next;
        }
        Ok(dist)
    }

    pub fn leaf_distribution(&self) -> Result<BTreeMap<Permutation, Rat>> {
        self.leaf_distribution_with_budget(DEFAULT_SWAP_BUDGET)
    }

    /// `(s, t, alpha)` triples, one per line.
    pub fn dump(&self) -> String {
        self.swaps.iter().map(|sw| format!("{} {} {}\n", sw.s, sw.t, sw.alpha)).collect()
    }
}

/// Swap program whose product is uniform on all `d!` permutations:
/// `M_2 = S_{01}(1/2)`, `M_k = M_{k-1} S_{0,k-1} M_{k-1}` with independent
/// copies of `M_{k-1}`. The middle swap fires with probability `(k-1)/k`, so
/// index `k-1` stays put with probability `1/k`. Length `2^{d-1} - 1`.
pub fn uniform_program(d: usize) -> Result<SwapProgram> {
    if d == 0 {
        return param("dimension must be at least 1");
    }
    let mut swaps: Vec<RandomSwap> = Vec::new();
    for k in 2..=d {
        let mut next = swaps.clone();
        next.push(RandomSwap { s: 0, t: k - 1, alpha: Rat::new((k as i64 - 1).into(), (k as i64).into()) });
        next.extend(swaps.iter().cloned());
        swaps = next;
    }
    Ok(SwapProgram { d, swaps })
}

/// Program on `2d` indices realizing `P ⊕ S` with `P`, `S` independent and
/// uniform: a uniform program on each block, left block first.
pub fn bipartite_uniform_program(d: usize) -> Result<SwapProgram> {
    let block = uniform_program(d)?;
    Ok(block.shifted(0, 2 * d).then(&block.shifted(d, 2 * d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn uniform_probability(d: usize) -> Rat {
        Rat::new(1.into(), crate::rational::factorial(d))
    }

    #[test]
    fn uniform_program_shapes() {
        let p2 = uniform_program(2).unwrap();
        assert_eq!(p2.swaps(), &[RandomSwap { s: 0, t: 1, alpha: rat(1, 2) }]);
        assert_eq!(uniform_program(3).unwrap().len(), 3);
        assert_eq!(uniform_program(4).unwrap().len(), 7);
        assert_eq!(uniform_program(1).unwrap().len(), 0);
        assert!(uniform_program(0).is_err());
    }

    /// Independent oracle: walk all 2^N outcome vectors and add up products of
    /// probabilities.
    fn brute_force_leaves(prog: &SwapProgram) -> BTreeMap<Permutation, Rat> {
        let n = prog.len();
        let mut out = BTreeMap::new();
        for mask in 0u64..(1 << n) {
            let applied: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let w: Rat = prog
                .swaps()
                .iter()
                .zip(&applied)
                .map(|(sw, &on)| if on { sw.alpha.clone() } else { Rat::one() - &sw.alpha })
                .product();
            *out.entry(prog.outcome(&applied)).or_insert_with(Rat::zero) += w;
        }
        out.retain(|_, w| !w.is_zero());
        out
    }

    #[test]
    fn leaf_distribution_is_uniform_for_small_d() {
        for d in 1..=5 {
            let prog = uniform_program(d).unwrap();
            let dist = prog.leaf_distribution().unwrap();
            assert_eq!(dist.len(), (1..=d).product::<usize>());
            assert!(dist.values().all(|w| *w == uniform_probability(d)));
            if d <= 4 {
                assert_eq!(dist, brute_force_leaves(&prog));
            }
        }
    }

    #[test]
    fn bipartite_program_is_uniform_on_blocks() {
        let prog = bipartite_uniform_program(2).unwrap();
        assert_eq!(prog.len(), 2);
        let dist = prog.leaf_distribution().unwrap();
        assert_eq!(dist.len(), 4);
        assert!(dist.values().all(|w| *w == rat(1, 4)));
        let prog3 = bipartite_uniform_program(3).unwrap();
        assert_eq!(prog3.len(), 6);
        let dist3 = prog3.leaf_distribution().unwrap();
        assert_eq!(dist3.len(), 36);
        assert!(dist3.values().all(|w| *w == rat(1, 36)));
        for p in dist3.keys() {
            assert!((0..3).all(|i| p.apply(i) < 3) && (3..6).all(|i| p.apply(i) >= 3));
        }
    }

    #[test]
    fn leaf_distribution_edge_cases() {
        let empty = SwapProgram::empty(3).leaf_distribution().unwrap();
        assert_eq!(empty.into_iter().collect::<Vec<_>>(), vec![(Permutation::identity(3), Rat::one())]);
        let one = SwapProgram::new(2, vec![RandomSwap::new(0, 1, rat(1, 3)).unwrap()]).unwrap();
        let dist = one.leaf_distribution().unwrap();
        assert_eq!(dist[&Permutation::identity(2)], rat(2, 3));
        assert_eq!(dist[&Permutation::transposition(2, 0, 1)], rat(1, 3));
        let long = uniform_program(6).unwrap();
        assert!(matches!(long.leaf_distribution(), Err(Error::Budget(_))));
    }

    #[test]
    fn deterministic_sampling_edges() {
        let mut rng = StreamRng::new(9);
        let never = SwapProgram::new(3, vec![
            RandomSwap::new(0, 1, rat(0, 1)).unwrap(),
            RandomSwap::new(1, 2, rat(0, 1)).unwrap(),
        ]).unwrap();
        assert!((0..50).all(|_| never.sample(&mut rng).is_identity()));
        let always = SwapProgram::new(3, vec![
            RandomSwap::new(0, 1, rat(1, 1)).unwrap(),
            RandomSwap::new(1, 2, rat(1, 1)).unwrap(),
        ]).unwrap();
        // (1 2) ∘ (0 1): 0 -> 1 -> 2, 1 -> 0, 2 -> 1
        let expected = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!((0..50).all(|_| always.sample(&mut rng) == expected));
    }

    #[test]
    fn permutation_basics() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(Permutation::transposition(4, 1, 3).as_transposition(), Some((1, 3)));
        assert_eq!(p.as_transposition(), None);
        let ranks: Vec<u64> = Permutation::all(3).iter().map(Permutation::rank).collect();
        assert_eq!(ranks, (0..6).collect::<Vec<_>>());
        // P e_i = e_{π(i)}
        let pm = p.matrix();
        assert_eq!(pm.get(2, 0), &Rat::one());
    }
}
