//! Exact square rational matrices.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{param, Error, Result};
use crate::perm::Permutation;
use crate::poly::RatPoly;
use crate::rational::{int, lcm_of_denominators, to_f64, Rat};

/// Row-major `n x n` matrix. `row_sum` is an optional annotation recording
/// that every row sums to the given value; it is only set after checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rat>,
    row_sum: Option<Rat>,
}

impl RatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Rat::zero(); n * n], row_sum: None }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_entries(n: usize, entries: Vec<Rat>) -> Result<Self> {
        if entries.len() != n * n {
            return param(format!("expected {} entries for a {n}x{n} matrix, got {}", n * n, entries.len()));
        }
        Ok(Self { n, entries, row_sum: None })
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return param("matrix rows must all have length equal to the row count");
        }
        Self::from_entries(n, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.n + j] = v;
        self.row_sum = None;
    }

    pub fn row_sum_annotation(&self) -> Option<&Rat> {
        self.row_sum.as_ref()
    }

    /// Common row sum, if every row has the same sum.
    pub fn constant_row_sum(&self) -> Option<Rat> {
        let sums: Vec<Rat> = (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].iter().sum())
            .collect();
        constant(sums)
    }

    pub fn constant_col_sum(&self) -> Option<Rat> {
        let sums: Vec<Rat> = (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect();
        constant(sums)
    }

    /// Checks the rows and records their common sum.
    pub fn annotate_row_sum(mut self) -> Result<Self> {
        match self.constant_row_sum() {
            Some(a) => {
                self.row_sum = Some(a);
                Ok(self)
            }
            None => Err(Error::Contract("rows do not share a common sum".into())),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        t
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
            row_sum: None,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect(),
            row_sum: None,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|a| a * c).collect(), row_sum: None }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * &o.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `P A P^T` where `P e_i = e_{perm(i)}`.
    pub fn conjugate(&self, perm: &Permutation) -> Self {
        let n = self.n;
        assert_eq!(perm.len(), n, "permutation size mismatch");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[perm.apply(i) * n + perm.apply(j)] = self.entries[i * n + j].clone();
            }
        }
        out.row_sum = self.row_sum.clone();
        out
    }

    /// `[[0, M], [M^T, 0]]`
    pub fn dilation(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                out.entries[i * 2 * n + n + j] = self.entries[i * n + j].clone();
                out.entries[(n + j) * 2 * n + i] = self.entries[i * n + j].clone();
            }
        }
        out
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.n, other.n);
        let n = a + b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                out.entries[i * n + j] = self.get(i, j).clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                out.entries[(a + i) * n + a + j] = other.get(i, j).clone();
            }
        }
        out
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !m[r * n + col].is_zero()) else {
                continue;
            };
            for j in 0..n {
                m.swap(rank * n + j, p * n + j);
            }
            let pivot = m[rank * n + col].clone();
            for r in 0..n {
                if r == rank || m[r * n + col].is_zero() {
                    continue;
                }
                let f = &m[r * n + col] / &pivot;
                for j in col..n {
                    let v = &f * &m[rank * n + j];
                    m[r * n + j] -= v;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(to_f64).collect()
    }

    /// Monic `det(xI - M)` by the Faddeev–LeVerrier recurrence.
    ///
    /// Denominators are cleared first (`B = L M`), so the recurrence runs over
    /// the integers where its divisions by `k` are exact; coefficients are then
    /// rescaled by powers of `L`.
    pub fn char_poly(&self) -> RatPoly {
        let n = self.n;
        let l = lcm_of_denominators(&self.entries);
        let lq = Rat::from_integer(l.clone());
        let b: Vec<BigInt> = self.entries.iter().map(|e| (e * &lq).to_integer()).collect();
        let c = faddeev_i128(n, &b).unwrap_or_else(|| faddeev_big(n, &b));
        // det(xI - M) = L^{-n} det(LxI - B): coefficient of x^i is c_i / L^(n-i).
        let mut scale = Rat::one();
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in (0..=n).rev() {
            coeffs[i] = Rat::from_integer(c[i].clone()) / &scale;
            scale *= &lq;
        }
        RatPoly::from_coeffs(coeffs)
    }
}

fn constant(sums: Vec<Rat>) -> Option<Rat> {
    let first = sums.first()?.clone();
    sums.iter().all(|s| *s == first).then_some(first)
}

/// Coefficients `c_0..c_n` (ascending) of `det(xI - B)` for integer `B`.
fn faddeev_big(n: usize, b: &[BigInt]) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = vec![BigInt::zero(); n * n];
    for k in 1..=n {
        // M_k = B M_{k-1} + c_{n-k+1} I
        let mut next = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for t in 0..n {
                let a = &b[i * n + t];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += a * &m[t * n + j];
                }
            }
            next[i * n + i] += &c[n - k + 1];
        }
        m = next;
        // c_{n-k} = -tr(B M_k) / k
        let mut tr = BigInt::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &b[i * n + t] * &m[t * n + i];
            }
        }
        c[n - k] = -tr / BigInt::from(k);
    }
    c
}

fn faddeev_i128(n: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let b: Vec<i128> = b.iter().map(|v| v.to_i128()).collect::<Option<_>>()?;
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![0i128; n * n];
    let mut next = vec![0i128; n * n];
    for k in 1..=n {
        next.iter_mut().for_each(|v| *v = 0);
        for i in 0..n {
            for t in 0..n {
                let a = b[i * n + t];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = a.checked_mul(m[t * n + j])?;
                    next[i * n + j] = next[i * n + j].checked_add(prod)?;
                }
            }
            next[i * n + i] = next[i * n + i].checked_add(c[n - k + 1])?;
        }
        std::mem::swap(&mut m, &mut next);
        let mut tr = 0i128;
        for i in 0..n {
            for t in 0..n {
                tr = tr.checked_add(b[i * n + t].checked_mul(m[t * n + i])?)?;
            }
        }
        c[n - k] = -(tr / k as i128);
    }
    Some(c.into_iter().map(BigInt::from).collect())
}
