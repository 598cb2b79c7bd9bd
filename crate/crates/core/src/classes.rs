//! Canonical classes of linear self-equivalences `F o A = B o F`.
//!
//! Every function with a non-trivial linear self-equivalence also has one in
//! which `A` and `B` have the same prime order `p`, or one of them is the
//! identity and the other has prime order. Up to linear equivalence both
//! matrices may be taken in rational canonical form, and pairs of the same
//! prime order may further be identified when `(A, B)` and `(C^i, D^i)` are
//! similar. The survivors are the canonical classes.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::Error;
use crate::linalg::{
    invariant_factors_from_elementary, prime_factors, rcf_from_factors, BitMatrix, GF2Poly,
};

/// Invariant factors of a canonical matrix, smallest first. Compared
/// lexicographically using the canonical polynomial order.
pub type FactorKey = Vec<GF2Poly>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    /// `ord(A) = ord(B) = p`.
    BothPrime,
    /// `B = I` and `ord(A) = p`.
    BIdentity,
    /// `A = I` and `ord(B) = p`.
    AIdentity,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassKind::BothPrime => "both-prime",
            ClassKind::BIdentity => "B-identity",
            ClassKind::AIdentity => "A-identity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalClass {
    /// 1-based position in the sorted class list of its dimension.
    pub index: usize,
    pub kind: ClassKind,
    pub p: u64,
    pub a: BitMatrix,
    pub b: BitMatrix,
    pub a_factors: FactorKey,
    pub b_factors: FactorKey,
}

impl CanonicalClass {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn fix_a(&self) -> usize {
        self.a.fixed_space().size()
    }

    pub fn fix_b(&self) -> usize {
        self.b.fixed_space().size()
    }

    fn sort_key(&self) -> (ClassKind, u64, &FactorKey, &FactorKey) {
        (self.kind, self.p, &self.a_factors, &self.b_factors)
    }
}

/// Why a class was kept or dropped by [`admissibility`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Admissible,
    /// `B` has fewer fixed points than `A` outside the two exempt size pairs.
    FixedPoints { fix_a: usize, fix_b: usize },
    /// `B = I` and `A` has too few cycles for an APN `F` with `F o A = F`.
    Cycles { cycles: usize, bound: usize },
    /// Dropped by the optional `|Fix_A|` ceiling.
    FixCeiling { fix_a: usize, ceiling: usize },
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Admissible => write!(f, "admissible"),
            Verdict::FixedPoints { fix_a, fix_b } => {
                write!(f, "excluded: fixed points |Fix_B|={fix_b} < |Fix_A|={fix_a}")
            }
            Verdict::Cycles { cycles, bound } => {
                write!(f, "excluded: cycle count {cycles} < {bound}")
            }
            Verdict::FixCeiling { fix_a, ceiling } => {
                write!(f, "skipped: |Fix_A|={fix_a} >= {ceiling}")
            }
        }
    }
}

/// Primes `p` for which GL(n, F2) has elements of order `p`.
pub fn relevant_primes(n: usize) -> Vec<u64> {
    let mut ps = vec![2u64];
    for d in 1..=n {
        ps.extend(prime_factors((1u64 << d) - 1));
    }
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Multiplicative order of 2 modulo an odd prime.
fn ord2_mod(p: u64) -> u32 {
    let mut x = 2 % p;
    let mut k = 1;
    while x != 1 {
        x = x * 2 % p;
        k += 1;
    }
    k
}

/// Invariant-factor keys of every rational canonical form of order exactly
/// `p` in dimension `n`, sorted canonically.
pub fn prime_order_keys(n: usize, p: u64) -> Vec<FactorKey> {
    let mut keys = Vec::new();
    if p == 2 {
        // (A + I)^2 = 0: blocks (X+1)^2 and X+1, at least one of the former
        for twos in 1..=n / 2 {
            let ones = n - 2 * twos;
            let mut exps = vec![2u32; twos];
            exps.extend(std::iter::repeat(1).take(ones));
            keys.push(invariant_factors_from_elementary(&[(GF2Poly::X_PLUS_ONE, exps)]));
        }
    } else {
        let d = ord2_mod(p) as usize;
        if d > n {
            return keys;
        }
        let roots: Vec<GF2Poly> = GF2Poly::irreducibles(d as u32)
            .into_iter()
            .filter(|&f| f != GF2Poly::X_PLUS_ONE && GF2Poly::x_pow_mod(p, f) == GF2Poly::ONE)
            .collect();
        let mut mults = vec![0usize; roots.len()];
        enumerate_multiplicities(&mut mults, 0, n / d, &mut |m| {
            let used: usize = m.iter().sum();
            if used == 0 {
                return;
            }
            let mut lists: Vec<(GF2Poly, Vec<u32>)> = Vec::new();
            let ones = n - d * used;
            if ones > 0 {
                lists.push((GF2Poly::X_PLUS_ONE, vec![1; ones]));
            }
            for (f, &k) in roots.iter().zip(m) {
                if k > 0 {
                    lists.push((*f, vec![1; k]));
                }
            }
            keys.push(invariant_factors_from_elementary(&lists));
        });
    }
    keys.sort();
    keys.dedup();
    keys
}

fn enumerate_multiplicities(m: &mut Vec<usize>, i: usize, budget: usize, f: &mut impl FnMut(&[usize])) {
    if i == m.len() {
        f(m);
        return;
    }
    for k in 0..=budget {
        m[i] = k;
        enumerate_multiplicities(m, i + 1, budget - k, f);
    }
    m[i] = 0;
}

/// All rational canonical forms of order `p`, as matrices.
pub fn prime_order_rcfs(n: usize, p: u64) -> Vec<BitMatrix> {
    prime_order_keys(n, p).iter().map(|k| rcf_from_factors(k)).collect()
}

/// For each `i` in `1..p`, the index of `rcf(M_j^i)` for every class `j`.
fn power_tables(keys: &[FactorKey], p: u64) -> Vec<Vec<usize>> {
    let lookup: HashMap<&FactorKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mats: Vec<BitMatrix> = keys.iter().map(|k| rcf_from_factors(k)).collect();
    (1..p)
        .map(|i| {
            mats.iter()
                .map(|m| lookup[&m.pow(i).invariant_factors()])
                .collect()
        })
        .collect()
}

/// Every canonical class of dimension `n`, sorted by
/// `(kind, p, factors of A, factors of B)` and numbered from 1.
pub fn canonical_classes(n: usize) -> Result<Vec<CanonicalClass>, Error> {
    if !(2..=10).contains(&n) {
        return Err(Error::InvalidArgument(format!("canonical classes need 2 <= n <= 10, got {n}")));
    }
    let id = BitMatrix::identity(n);
    let id_key: FactorKey = vec![GF2Poly::X_PLUS_ONE; n];
    let mut out = Vec::new();
    for p in relevant_primes(n) {
        let keys = prime_order_keys(n, p);
        if keys.is_empty() {
            continue;
        }
        let mats: Vec<BitMatrix> = keys.iter().map(|k| rcf_from_factors(k)).collect();
        let powers = power_tables(&keys, p);
        for a in 0..keys.len() {
            for b in 0..keys.len() {
                let canonical = powers.iter().map(|t| (t[a], t[b])).min().expect("p >= 2");
                if canonical != (a, b) {
                    continue;
                }
                out.push(CanonicalClass {
                    index: 0,
                    kind: ClassKind::BothPrime,
                    p,
                    a: mats[a],
                    b: mats[b],
                    a_factors: keys[a].clone(),
                    b_factors: keys[b].clone(),
                });
            }
        }
        for (m, k) in mats.iter().zip(&keys) {
            out.push(CanonicalClass {
                index: 0,
                kind: ClassKind::BIdentity,
                p,
                a: *m,
                b: id,
                a_factors: k.clone(),
                b_factors: id_key.clone(),
            });
            out.push(CanonicalClass {
                index: 0,
                kind: ClassKind::AIdentity,
                p,
                a: id,
                b: *m,
                a_factors: id_key.clone(),
                b_factors: k.clone(),
            });
        }
    }
    out.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    for (i, c) in out.iter_mut().enumerate() {
        c.index = i + 1;
    }
    Ok(out)
}

/// Smallest `c` allowed for the cycle count of `A` when `F o A = F` and `F`
/// is APN: `ceil(2^{2n} / (3 * 2^n - 2))`.
pub fn cycle_bound(n: usize) -> usize {
    let num = 1usize << (2 * n);
    let den = 3 * (1usize << n) - 2;
    num.div_ceil(den)
}

/// Admissibility of a class for APN functions, optionally skipping classes
/// whose `|Fix_A|` reaches `fix_ceiling`.
pub fn admissibility(class: &CanonicalClass, fix_ceiling: Option<usize>) -> Verdict {
    let fix_a = class.fix_a();
    let fix_b = class.fix_b();
    if fix_b < fix_a && !matches!((fix_b, fix_a), (1, 2) | (2, 4)) {
        return Verdict::FixedPoints { fix_a, fix_b };
    }
    if class.b.is_identity() {
        let cycles = class.a.cycle_count();
        let bound = cycle_bound(class.n());
        if cycles < bound {
            return Verdict::Cycles { cycles, bound };
        }
    }
    if let Some(ceiling) = fix_ceiling {
        if fix_a >= ceiling {
            return Verdict::FixCeiling { fix_a, ceiling };
        }
    }
    Verdict::Admissible
}

/// Classes that survive both exclusion rules (and the optional ceiling).
pub fn filter_admissible(classes: &[CanonicalClass], fix_ceiling: Option<usize>) -> Vec<CanonicalClass> {
    classes
        .iter()
        .filter(|c| admissibility(c, fix_ceiling).is_admissible())
        .cloned()
        .collect()
}

/// Locates the canonical class of an arbitrary pair `(A, B)` with
/// `F o A = B o F`, by reducing both matrices to canonical form and, for
/// equal prime orders, taking the smallest power-similar pair.
pub fn find_class<'a>(
    classes: &'a [CanonicalClass],
    a: &BitMatrix,
    b: &BitMatrix,
) -> Option<&'a CanonicalClass> {
    let (ka, kb) = canonical_pair(a, b)?;
    classes.iter().find(|c| c.a_factors == ka && c.b_factors == kb)
}

fn canonical_pair(a: &BitMatrix, b: &BitMatrix) -> Option<(FactorKey, FactorKey)> {
    let ka = a.invariant_factors();
    let kb = b.invariant_factors();
    if a.is_identity() || b.is_identity() {
        return Some((ka, kb));
    }
    let p = a.order().ok()?;
    if b.order().ok()? != p {
        return None;
    }
    (1..p)
        .map(|i| (a.pow(i).invariant_factors(), b.pow(i).invariant_factors()))
        .min_by(|x, y| cmp_pair(x, y))
}

fn cmp_pair(x: &(FactorKey, FactorKey), y: &(FactorKey, FactorKey)) -> Ordering {
    x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1))
}

/// Class counts per kind: `(both-prime, B-identity, A-identity)`.
pub fn kind_counts(classes: &[CanonicalClass]) -> (usize, usize, usize) {
    let count = |k| classes.iter().filter(|c| c.kind == k).count();
    (count(ClassKind::BothPrime), count(ClassKind::BIdentity), count(ClassKind::AIdentity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(exps: &[u32]) -> BitMatrix {
        BitMatrix::companion(GF2Poly::from_exponents(exps)).unwrap()
    }

    #[test]
    fn n2_prime_order_forms() {
        assert_eq!(prime_order_rcfs(2, 3), vec![comp(&[2, 1, 0])]);
        assert_eq!(prime_order_rcfs(2, 2), vec![comp(&[2, 0])]);
    }

    #[test]
    fn prime_order_forms_are_canonical_with_exact_order() {
        for n in 2..=8 {
            for p in relevant_primes(n) {
                for m in prime_order_rcfs(n, p) {
                    assert_eq!(m.order().unwrap(), p, "n={n} p={p}");
                    assert_eq!(m.rcf(), m);
                }
            }
        }
    }

    #[test]
    fn prime_order_forms_match_exhaustive_gl3() {
        // enumerate GL(3,2) and collect canonical forms of prime order
        let mut seen = std::collections::BTreeSet::new();
        for bits in 0u32..512 {
            let rows = [bits >> 6, (bits >> 3) & 7, bits & 7];
            let m = BitMatrix::from_rows(3, &rows).unwrap();
            if !m.is_invertible() {
                continue;
            }
            let o = m.order().unwrap();
            if o > 1 && relevant_primes(3).contains(&o) {
                seen.insert((o, m.invariant_factors()));
            }
        }
        let mut ours = std::collections::BTreeSet::new();
        for p in relevant_primes(3) {
            for k in prime_order_keys(3, p) {
                ours.insert((p, k));
            }
        }
        assert_eq!(seen, ours);
    }

    #[test]
    fn cycle_bound_closed_forms() {
        for n in 2..=12 {
            let closed = if n % 2 == 0 { ((1 << n) + 2) / 3 } else { ((1 << n) + 1) / 3 };
            assert_eq!(cycle_bound(n), closed, "n={n}");
        }
    }

    #[test]
    fn order_three_without_fixed_points_meets_cycle_bound() {
        // A of order 3 acting freely on nonzero vectors of F2^8
        let q = comp(&[2, 1, 0]);
        let a = BitMatrix::block_diag(&[q, q, q, q]).unwrap();
        assert_eq!(a.fixed_space().size(), 1);
        assert_eq!(a.cycle_count(), 86);
        assert_eq!(cycle_bound(8), 86);
        let class = CanonicalClass {
            index: 0,
            kind: ClassKind::BIdentity,
            p: 3,
            a,
            b: BitMatrix::identity(8),
            a_factors: a.invariant_factors(),
            b_factors: vec![GF2Poly::X_PLUS_ONE; 8],
        };
        assert_eq!(admissibility(&class, None), Verdict::Admissible);
    }

    #[test]
    fn small_dimension_counts() {
        let c = canonical_classes(2).unwrap();
        // primes 2 and 3 with one form each
        assert_eq!(kind_counts(&c), (2, 2, 2));
        for (i, cl) in c.iter().enumerate() {
            assert_eq!(cl.index, i + 1);
        }
    }

    #[test]
    fn find_class_recovers_power_similar_pairs() {
        let classes = canonical_classes(5).unwrap();
        for c in classes.iter().filter(|c| c.kind == ClassKind::BothPrime) {
            for i in 2..c.p {
                let (a, b) = (c.a.pow(i), c.b.pow(i));
                if a.order().unwrap() != c.p {
                    continue;
                }
                assert_eq!(find_class(&classes, &a, &b).map(|x| x.index), Some(c.index));
            }
        }
    }
}
