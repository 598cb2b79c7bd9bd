//! Linear subspaces of F2^n given by a basis, plus the elimination helpers the
//! rest of the crate builds on.
//!
//! Vectors are `u32` words with coordinate 1 at bit `n - 1`.

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<u32>,
}

impl Subspace {
    /// Wraps an explicit basis. Fails if the vectors are dependent or out of range.
    pub fn from_basis(n: usize, basis: Vec<u32>) -> Result<Self, Error> {
        if basis.iter().any(|&v| n < 32 && v >> n != 0) {
            return Err(Error::InvalidArgument("basis vector exceeds dimension".into()));
        }
        if rank(&basis) != basis.len() {
            return Err(Error::InvalidArgument("basis vectors are linearly dependent".into()));
        }
        Ok(Subspace { n, basis })
    }

    /// Span of arbitrary vectors, stored as a reduced echelon basis.
    pub fn span(n: usize, vectors: &[u32]) -> Self {
        let mut rows = vectors.to_vec();
        let pivots = rref(&mut rows, n);
        rows.truncate(pivots.len());
        Subspace { n, basis: rows }
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace { n, basis: (0..n).map(|i| 1u32 << (n - 1 - i)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of vectors, `2^dim`.
    pub fn size(&self) -> usize {
        1usize << self.basis.len()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    /// The isomorphism F2^dim -> subspace sending coordinate `i + 1` of the
    /// `dim`-bit word `coords` (bit `dim - 1 - i`) to `basis[i]`.
    pub fn combine(&self, coords: u32) -> u32 {
        let k = self.basis.len();
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| (coords >> (k - 1 - i)) & 1 == 1)
            .fold(0, |acc, (_, &b)| acc ^ b)
    }

    /// Inverse of [`Subspace::combine`]; `None` if `v` is outside the subspace.
    pub fn coordinates(&self, v: u32) -> Option<u32> {
        // small dimensions only, so a direct scan is fine
        (0..self.size() as u32).find(|&c| self.combine(c) == v)
    }

    pub fn contains(&self, v: u32) -> bool {
        let mut basis = self.basis.clone();
        let r = rank(&basis);
        basis.push(v);
        rank(&basis) == r
    }

    /// All `2^dim` elements in the order of their coordinates.
    pub fn elements(&self) -> Vec<u32> {
        (0..self.size() as u32).map(|c| self.combine(c)).collect()
    }

    /// `{x : <v, x> = 0 for every v in vectors}`.
    pub fn orthogonal_complement(n: usize, vectors: &[u32]) -> Self {
        let mut rows = vectors.to_vec();
        let pivots = rref(&mut rows, n);
        let mut basis = Vec::new();
        for col in 0..n {
            if pivots.contains(&col) {
                continue;
            }
            let free_bit = 1u32 << (n - 1 - col);
            let mut x = free_bit;
            for (r, &pc) in pivots.iter().enumerate() {
                if rows[r] & free_bit != 0 {
                    x |= 1u32 << (n - 1 - pc);
                }
            }
            basis.push(x);
        }
        Subspace { n, basis }
    }
}

/// Reduced row echelon form in place, columns scanned from coordinate 1
/// (most significant bit). Returns the pivot column of each leading row; rows
/// past the pivot count are zero.
pub fn rref(rows: &mut [u32], n: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let bit = 1u32 << (n - 1 - col);
        let Some(p) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of a list of vectors over F2.
pub fn rank(vectors: &[u32]) -> usize {
    let mut basis: Vec<u32> = Vec::with_capacity(32);
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[inline]
pub fn dot(a: u32, b: u32) -> u32 {
    (a & b).count_ones() & 1
}
