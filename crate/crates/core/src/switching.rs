//! Switching neighbours `G = F + v*f` of an APN function, with `f` Boolean.
//!
//! For APN `F`, the sum of `G` over an affine 2-flat `{p, p+a, p+b, p+a+b}`
//! vanishes exactly when the sum of `F` is `v` and the sum of `f` is 1. So
//! `G` is APN iff `f` sums to 0 on every flat where `F` sums to `v`, a
//! homogeneous linear system in the `2^n` values of `f`.

use std::collections::{BTreeMap, BTreeSet};

use crate::boolfun::Vbf;
use crate::equiv::Fingerprint;
use crate::error::Error;

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A Boolean function on F2^n as a packed truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolFn {
    n: usize,
    words: Vec<u64>,
}

impl BoolFn {
    pub fn zero(n: usize) -> Self {
        BoolFn { n, words: vec![0; ((1usize << n) + 63) / 64] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u32) -> bool) -> Self {
        let mut out = BoolFn::zero(n);
        for x in 0..1u32 << n {
            if f(x) {
                out.flip(x);
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: u32) -> bool {
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn flip(&mut self, x: u32) {
        self.words[(x >> 6) as usize] ^= 1 << (x & 63);
    }

    pub fn xor_assign(&mut self, other: &BoolFn) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn lowest_set(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| (i as u32) * 64 + w.trailing_zeros())
    }

    /// `G(x) = F(x) + v*f(x)`.
    pub fn switch(&self, f: &Vbf, v: u32) -> Vbf {
        Vbf::from_fn(f.n(), |x| f.eval(x) ^ if self.get(x) { v } else { 0 }).expect("same dimension")
    }
}

/// All affine 2-flats of F2^n, each as its sorted 4 elements.
pub fn two_flats(n: usize) -> Vec<[u32; 4]> {
    let size = 1u32 << n;
    let mut out = Vec::new();
    for s0 in 0..size {
        for s1 in s0 + 1..size {
            for s2 in s1 + 1..size {
                let s3 = s0 ^ s1 ^ s2;
                if s3 > s2 {
                    out.push([s0, s1, s2, s3]);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingSystem {
    n: usize,
    v: u32,
    equations: Vec<[u32; 4]>,
}

impl SwitchingSystem {
    /// One equation `f_p + f_{p+a} + f_{p+b} + f_{p+a+b} = 0` per flat on
    /// which `F` sums to `v`.
    pub fn build(f: &Vbf, v: u32) -> Result<Self, Error> {
        check_inputs(f, v)?;
        let lut = f.lut();
        let equations = two_flats(f.n())
            .into_iter()
            .filter(|q| q.iter().fold(0, |s, &x| s ^ lut[x as usize]) == v)
            .collect();
        Ok(SwitchingSystem { n: f.n(), v, equations })
    }

    fn from_parts(n: usize, v: u32, equations: Vec<[u32; 4]>) -> Self {
        SwitchingSystem { n, v, equations }
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn equations(&self) -> &[[u32; 4]] {
        &self.equations
    }

    pub fn is_satisfied_by(&self, f: &BoolFn) -> bool {
        self.equations.iter().all(|q| !(f.get(q[0]) ^ f.get(q[1]) ^ f.get(q[2]) ^ f.get(q[3])))
    }

    /// Nullspace basis by Gaussian elimination.
    pub fn solution_space(&self) -> SolutionSpace {
        let size = 1usize << self.n;
        let mut pivots: Vec<Option<BoolFn>> = vec![None; size];
        for q in &self.equations {
            let mut row = BoolFn::zero(self.n);
            for &x in q {
                row.flip(x);
            }
            while let Some(c) = row.lowest_set() {
                match &pivots[c as usize] {
                    Some(p) => row.xor_assign(p),
                    None => {
                        pivots[c as usize] = Some(row);
                        break;
                    }
                }
            }
        }
        // back substitution: rows only hold columns >= their pivot
        let mut basis = Vec::new();
        for free in (0..size).filter(|&c| pivots[c].is_none()) {
            let mut sol = BoolFn::zero(self.n);
            sol.flip(free as u32);
            for p in (0..size).rev() {
                if let Some(row) = &pivots[p] {
                    let parity = row.words.iter().zip(&sol.words).fold(0, |s, (a, b)| s ^ (a & b).count_ones());
                    if parity & 1 == 1 {
                        sol.flip(p as u32);
                    }
                }
            }
            basis.push(sol);
        }
        SolutionSpace { n: self.n, basis }
    }
}

fn check_inputs(f: &Vbf, v: u32) -> Result<(), Error> {
    if v == 0 || v >= f.size() as u32 {
        return Err(Error::InvalidArgument(format!("direction {v:#x} must be nonzero and below 2^n")));
    }
    if !f.is_apn() {
        return Err(Error::Precondition("switching needs an APN function".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSpace {
    n: usize,
    basis: Vec<BoolFn>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BoolFn] {
        &self.basis
    }

    /// All `2^dim` solutions in Gray-code order, or `None` above `cap`.
    pub fn enumerate(&self, cap: usize) -> Option<Vec<BoolFn>> {
        if self.dim() > cap {
            return None;
        }
        Some(gray_walk(BoolFn::zero(self.n), &self.basis))
    }
}

fn gray_walk(start: BoolFn, gens: &[BoolFn]) -> Vec<BoolFn> {
    let mut cur = start;
    let mut out = Vec::with_capacity(1 << gens.len());
    out.push(cur.clone());
    for i in 1u64..1 << gens.len() {
        cur.xor_assign(&gens[i.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    out
}

#[derive(Clone, Debug)]
pub struct Switchings {
    pub v: u32,
    pub dim: usize,
    pub basis: Vec<BoolFn>,
    /// `None` when the nullspace exceeded the enumeration cap.
    pub functions: Option<Vec<Vbf>>,
}

/// Solves the system for `v` and, below `cap`, emits every `F + v*f`, each
/// rechecked with the direct APN test.
pub fn solve_switchings(f: &Vbf, v: u32, cap: usize) -> Result<Switchings, Error> {
    let space = SwitchingSystem::build(f, v)?.solution_space();
    finish(f, v, space, cap)
}

fn finish(f: &Vbf, v: u32, space: SolutionSpace, cap: usize) -> Result<Switchings, Error> {
    let functions = match space.enumerate(cap) {
        None => None,
        Some(sols) => {
            let mut out = Vec::with_capacity(sols.len());
            for s in sols {
                let g = s.switch(f, v);
                if !g.is_apn() {
                    return Err(Error::Precondition(format!("switching solution for v={v:#x} is not APN")));
                }
                out.push(g);
            }
            Some(out)
        }
    };
    Ok(Switchings { v, dim: space.dim(), basis: space.basis, functions })
}

/// Per-direction line of a sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionReport {
    pub v: u32,
    pub dim: usize,
    pub enumerated: bool,
    pub quadratic_outputs: usize,
    pub new_fingerprints: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub directions: Vec<DirectionReport>,
    /// Distinct fingerprints among quadratic outputs, with one witness each.
    pub classes: BTreeMap<Fingerprint, (u32, Vbf)>,
}

impl SweepReport {
    pub fn fingerprints(&self) -> BTreeSet<&Fingerprint> {
        self.classes.keys().collect()
    }
}

/// Runs every direction. Solutions differing by an affine `f` give
/// EA-equivalent outputs, so only one per coset of the affine functions is
/// fingerprinted; the quadratic test also uses those coset representatives.
pub fn switch_sweep(f: &Vbf, cap: usize) -> Result<SweepReport, Error> {
    if !f.is_apn() {
        return Err(Error::Precondition("switching needs an APN function".into()));
    }
    let n = f.n();
    let lut = f.lut();
    let mut buckets: Vec<Vec<[u32; 4]>> = vec![Vec::new(); f.size()];
    for q in two_flats(n) {
        let s = q.iter().fold(0, |s, &x| s ^ lut[x as usize]);
        buckets[s as usize].push(q);
    }
    let mut classes = BTreeMap::new();
    classes.insert(Fingerprint::of(f)?, (0, f.clone()));
    let affine = affine_functions(n);
    let mut directions = Vec::new();
    for v in 1..f.size() as u32 {
        let system = SwitchingSystem::from_parts(n, v, std::mem::take(&mut buckets[v as usize]));
        let space = system.solution_space();
        let reps = coset_generators(&space, &affine);
        let mut report = DirectionReport {
            v,
            dim: space.dim(),
            enumerated: reps.len() <= cap,
            quadratic_outputs: 0,
            new_fingerprints: 0,
        };
        if report.enumerated {
            for s in gray_walk(BoolFn::zero(n), &reps) {
                let g = s.switch(f, v);
                if g.algebraic_degree() > 2 {
                    continue;
                }
                report.quadratic_outputs += 1;
                let fp = Fingerprint::of(&g)?;
                if !classes.contains_key(&fp) {
                    classes.insert(fp, (v, g));
                    report.new_fingerprints += 1;
                }
            }
        }
        directions.push(report);
    }
    Ok(SweepReport { directions, classes })
}

fn affine_functions(n: usize) -> Vec<BoolFn> {
    let mut gens = vec![BoolFn::from_fn(n, |_| true)];
    for i in 0..n {
        gens.push(BoolFn::from_fn(n, |x| x >> i & 1 == 1));
    }
    gens
}

// Basis vectors of `space` completing the affine functions it contains.
fn coset_generators(space: &SolutionSpace, affine: &[BoolFn]) -> Vec<BoolFn> {
    let mut echelon: Vec<(u32, BoolFn)> = Vec::new();
    let reduce = |mut row: BoolFn, echelon: &mut Vec<(u32, BoolFn)>| -> bool {
        for (p, r) in echelon.iter() {
            if row.get(*p) {
                row.xor_assign(r);
            }
        }
        match row.lowest_set() {
            None => false,
            Some(p) => {
                for (_, r) in echelon.iter_mut() {
                    if r.get(p) {
                        r.xor_assign(&row);
                    }
                }
                echelon.push((p, row));
                true
            }
        }
    };
    for a in affine {
        reduce(a.clone(), &mut echelon);
    }
    space.basis.iter().filter(|b| reduce((*b).clone(), &mut echelon)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::known::power_map;

    #[test]
    fn flat_count() {
        for n in 2..=6usize {
            let q = 1u64 << n;
            assert_eq!(two_flats(n).len() as u64, q * (q - 1) * (q - 2) / 24);
        }
    }

    #[test]
    fn equation_count_matches_triple_loop() {
        let f = power_map(4, 3);
        for v in 1..16u32 {
            let sys = SwitchingSystem::build(&f, v).unwrap();
            let mut ordered = 0usize;
            for x in 0..16u32 {
                for a in 1..16u32 {
                    for y in 0..16u32 {
                        if y == x || y == x ^ a {
                            continue;
                        }
                        if f.eval(x) ^ f.eval(x ^ a) ^ f.eval(y) ^ f.eval(y ^ a) == v {
                            ordered += 1;
                        }
                    }
                }
            }
            assert_eq!(sys.equations().len() * 24, ordered, "v={v}");
        }
    }

    #[test]
    fn constants_and_affine_always_solve() {
        let f = power_map(5, 3);
        for v in [1, 7, 30] {
            let sys = SwitchingSystem::build(&f, v).unwrap();
            let space = sys.solution_space();
            assert!(space.dim() >= 6);
            assert!(sys.is_satisfied_by(&BoolFn::zero(5)));
            assert!(sys.is_satisfied_by(&BoolFn::from_fn(5, |_| true)));
            for b in space.basis() {
                assert!(sys.is_satisfied_by(b));
            }
        }
    }

    #[test]
    fn gold_n3_switchings() {
        let f = power_map(3, 3);
        for v in 1..8 {
            let s = solve_switchings(&f, v, DEFAULT_ENUMERATION_CAP).unwrap();
            let fs = s.functions.unwrap();
            assert!(fs.contains(&f));
            assert!(fs.iter().all(Vbf::is_apn));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = power_map(4, 3);
        assert!(SwitchingSystem::build(&f, 0).is_err());
        assert!(SwitchingSystem::build(&f, 16).is_err());
        assert!(SwitchingSystem::build(&Vbf::identity(4), 1).is_err());
    }

    #[test]
    fn cap_skips_enumeration() {
        let f = power_map(4, 3);
        let s = solve_switchings(&f, 1, 2).unwrap();
        assert!(s.functions.is_none());
        assert!(s.dim > 2);
    }

    #[test]
    fn sweep_contains_source() {
        let f = power_map(5, 3);
        let r = switch_sweep(&f, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.directions.len(), 31);
        assert!(r.classes.contains_key(&Fingerprint::of(&f).unwrap()));
    }
}
