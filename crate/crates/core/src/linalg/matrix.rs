//! Dense n x n matrices over F2 (n <= 16), one machine word per row.
//!
//! Coordinate 1 of a vector is its most significant bit, so row `i`, column
//! `j` lives at bit `n - 1 - j` of `rows[i]`, and `(Mx)_i` is bit `n - 1 - i`
//! of the product.

use std::fmt;

use rand::Rng;

use super::poly::GF2Poly;
use super::subspace::{dot, rank, Subspace};
use crate::error::Error;

pub const MAX_DIM: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: [u32; MAX_DIM],
}

impl BitMatrix {
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "matrix dimension {n} out of range");
        BitMatrix { n, rows: [0; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << (n - 1 - i);
        }
        m
    }

    pub fn from_rows(n: usize, rows: &[u32]) -> Result<Self, Error> {
        if !(1..=MAX_DIM).contains(&n) || rows.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} rows for a {n}x{n} matrix (n <= {MAX_DIM}), got {}",
                rows.len()
            )));
        }
        if rows.iter().any(|&r| r >> n != 0) {
            return Err(Error::InvalidArgument("row value exceeds dimension".into()));
        }
        let mut m = Self::zero(n);
        m.rows[..n].copy_from_slice(rows);
        Ok(m)
    }

    /// Matrix whose column `j` is `cols[j]`.
    pub fn from_columns(n: usize, cols: &[u32]) -> Result<Self, Error> {
        Ok(Self::from_rows(n, cols)?.transpose())
    }

    /// The matrix of a linear map given by its values on the standard basis.
    pub fn from_linear_fn(n: usize, f: impl Fn(u32) -> u32) -> Self {
        let cols: Vec<u32> = (0..n).map(|j| f(1 << (n - 1 - j))).collect();
        Self::from_columns(n, &cols).expect("linear map out of range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows[..self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> (self.n - 1 - j)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let bit = 1 << (self.n - 1 - j);
        if v {
            self.rows[i] |= bit;
        } else {
            self.rows[i] &= !bit;
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        let n = self.n;
        let mut y = 0;
        for i in 0..n {
            y |= dot(self.rows[i], x) << (n - 1 - i);
        }
        y
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            let mut acc = 0;
            for j in 0..n {
                if self.get(i, j) {
                    acc ^= other.rows[j];
                }
            }
            out.rows[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n, other.n);
        let mut out = *self;
        for i in 0..self.n {
            out.rows[i] ^= other.rows[i];
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> BitMatrix {
        let mut base = *self;
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rank(self.rows())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan inverse; `None` for singular matrices.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.n;
        let mut a = *self;
        let mut inv = Self::identity(n);
        for col in 0..n {
            let bit = 1 << (n - 1 - col);
            let p = (col..n).find(|&r| a.rows[r] & bit != 0)?;
            a.rows.swap(col, p);
            inv.rows.swap(col, p);
            for r in 0..n {
                if r != col && a.rows[r] & bit != 0 {
                    a.rows[r] ^= a.rows[col];
                    inv.rows[r] ^= inv.rows[col];
                }
            }
        }
        Some(inv)
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and the
    /// coefficients `q_0, ..., q_{d-1}` down the last column.
    pub fn companion(q: GF2Poly) -> Result<BitMatrix, Error> {
        let d = q.degree() as usize;
        if q.is_zero() || d == 0 {
            return Err(Error::InvalidArgument("companion matrix needs degree >= 1".into()));
        }
        if d > MAX_DIM {
            return Err(Error::InvalidArgument(format!("degree {d} exceeds {MAX_DIM}")));
        }
        let mut m = Self::zero(d);
        for i in 0..d {
            if i >= 1 {
                m.set(i, i - 1, true);
            }
            m.set(i, d - 1, q.coeff(i as u32));
        }
        Ok(m)
    }

    /// `diag(M_1, ..., M_k)` with `M_1` in the upper-left corner.
    pub fn block_diag(blocks: &[BitMatrix]) -> Result<BitMatrix, Error> {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidArgument(format!("block sizes sum to {n}")));
        }
        let mut m = Self::zero(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    if b.get(i, j) {
                        m.set(off + i, off + j, true);
                    }
                }
            }
            off += b.n;
        }
        Ok(m)
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: GF2Poly) -> BitMatrix {
        let mut acc = Self::zero(self.n);
        let id = Self::identity(self.n);
        for i in (0..=p.degree()).rev() {
            acc = acc.mul(self);
            if p.coeff(i) {
                acc = acc.add(&id);
            }
        }
        acc
    }

    /// Least-degree monic `p` with `p(M) = 0`, found as the first linear
    /// dependence among `I, M, M^2, ...`.
    pub fn minimal_polynomial(&self) -> GF2Poly {
        let n = self.n;
        // each power flattened into n*n <= 256 bits
        let mut basis: Vec<([u64; 4], u64, usize)> = Vec::new();
        let mut power = Self::identity(n);
        for k in 0..=n {
            let mut v = flatten(&power, n);
            let mut comb = 1u64 << k;
            for (b, bc, piv) in &basis {
                if bit_of(&v, *piv) {
                    for w in 0..4 {
                        v[w] ^= b[w];
                    }
                    comb ^= bc;
                }
            }
            match highest_bit(&v) {
                None => return GF2Poly::from_bits(comb),
                Some(piv) => {
                    basis.push((v, comb, piv));
                    basis.sort_by(|a, b| b.2.cmp(&a.2));
                }
            }
            power = power.mul(self);
        }
        unreachable!("Cayley-Hamilton bounds the minimal polynomial degree by n")
    }

    /// Multiplicative order, computed as the order of `X` modulo the minimal
    /// polynomial and capped at `n * 2^n` steps.
    pub fn order(&self) -> Result<u64, Error> {
        if !self.is_invertible() {
            return Err(Error::InvalidArgument("order of a singular matrix".into()));
        }
        let mp = self.minimal_polynomial();
        let cap = (self.n as u64) << self.n;
        let one = GF2Poly::ONE.rem(mp);
        let mut t = GF2Poly::X.rem(mp);
        for i in 1..=cap {
            if t == one {
                return Ok(i);
            }
            t = t.mul_mod(GF2Poly::X, mp);
        }
        Err(Error::InvalidArgument(format!("order exceeds cap {cap}")))
    }

    /// `{x : Mx = 0}`.
    pub fn kernel(&self) -> Subspace {
        Subspace::orthogonal_complement(self.n, self.rows())
    }

    /// `Fix_M = ker(M + I)`.
    pub fn fixed_space(&self) -> Subspace {
        self.add(&Self::identity(self.n)).kernel()
    }

    /// Orbits of `x -> Mx` on all of F2^n, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let size = 1usize << self.n;
        let mut seen = vec![false; size];
        let mut cycles = 0;
        for start in 0..size {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                x = self.apply(x);
            }
        }
        cycles
    }

    /// Smallest `i >= 1` with `M^i x = x`.
    pub fn orbit_length(&self, x: u32) -> usize {
        let mut y = self.apply(x);
        let mut len = 1;
        while y != x {
            y = self.apply(y);
            len += 1;
        }
        len
    }

    /// Invariant factors `q_r | ... | q_1`, smallest first.
    ///
    /// Derived from the elementary divisors: for each irreducible `f` dividing
    /// the minimal polynomial, `dim ker f(M)^k` counts the divisors `f^j` with
    /// `j >= k`.
    pub fn invariant_factors(&self) -> Vec<GF2Poly> {
        let n = self.n;
        let mp = self.minimal_polynomial();
        let mut exponent_lists: Vec<(GF2Poly, Vec<u32>)> = Vec::new();
        for (f, e) in mp.factor() {
            let d = f.degree() as usize;
            let nf = self.eval_poly(f);
            let mut dims = vec![0usize];
            let mut acc = Self::identity(n);
            for _ in 0..e {
                acc = acc.mul(&nf);
                dims.push(n - acc.rank());
            }
            // at_least[k] = number of elementary divisors f^j with j >= k
            let at_least: Vec<usize> = (1..=e as usize).map(|k| (dims[k] - dims[k - 1]) / d).collect();
            let mut exps = Vec::new();
            for k in (1..=e as usize).rev() {
                let next = if k < e as usize { at_least[k] } else { 0 };
                for _ in 0..(at_least[k - 1] - next) {
                    exps.push(k as u32);
                }
            }
            exponent_lists.push((f, exps));
        }
        let factors = invariant_factors_from_elementary(&exponent_lists);
        debug_assert_eq!(factors.iter().map(|q| q.degree() as usize).sum::<usize>(), n);
        factors
    }

    /// Rational canonical form `diag(Comp(q_r), ..., Comp(q_1))`.
    pub fn rcf(&self) -> BitMatrix {
        rcf_from_factors(&self.invariant_factors())
    }

    /// Uniform random invertible matrix by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitMatrix {
        loop {
            let rows: Vec<u32> = (0..n).map(|_| rng.gen_range(0..1u32 << n)).collect();
            let m = Self::from_rows(n, &rows).expect("row range");
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// One line per row, `0`/`1` characters, coordinate 1 first.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix, Error> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let n = lines.len();
        let mut rows = Vec::with_capacity(n);
        for l in &lines {
            if l.len() != n || !l.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse(format!("bad matrix row '{l}'")));
            }
            rows.push(u32::from_str_radix(l, 2).expect("checked digits"));
        }
        Self::from_rows(n, &rows)
    }
}

/// Combines elementary divisors, given per irreducible `f` as exponent lists
/// sorted largest first, into invariant factors listed smallest first.
pub fn invariant_factors_from_elementary(lists: &[(GF2Poly, Vec<u32>)]) -> Vec<GF2Poly> {
    let r = lists.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut factors: Vec<GF2Poly> = (0..r)
        .map(|i| {
            lists
                .iter()
                .filter_map(|(f, v)| v.get(i).map(|&e| f.pow(e)))
                .fold(GF2Poly::ONE, |a, b| a.mul(b))
        })
        .collect();
    factors.reverse();
    factors
}

/// Builds the block-diagonal canonical matrix from invariant factors listed
/// smallest first.
pub fn rcf_from_factors(factors: &[GF2Poly]) -> BitMatrix {
    let blocks: Vec<BitMatrix> = factors
        .iter()
        .map(|&q| BitMatrix::companion(q).expect("invariant factor degree >= 1"))
        .collect();
    BitMatrix::block_diag(&blocks).expect("factor degrees sum to n")
}

fn flatten(m: &BitMatrix, n: usize) -> [u64; 4] {
    let mut v = [0u64; 4];
    for i in 0..n {
        let pos = i * n;
        let row = m.rows[i] as u64;
        let (w, off) = (pos / 64, pos % 64);
        v[w] |= row << off;
        if off + n > 64 {
            v[w + 1] |= row >> (64 - off);
        }
    }
    v
}

fn bit_of(v: &[u64; 4], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

fn highest_bit(v: &[u64; 4]) -> Option<usize> {
    (0..4).rev().find(|&w| v[w] != 0).map(|w| w * 64 + 63 - v[w].leading_zeros() as usize)
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{}:", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, " {:0width$b}", self.rows[i], width = self.n)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
