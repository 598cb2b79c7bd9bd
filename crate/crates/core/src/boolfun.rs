//! Vectorial Boolean functions F2^n -> F2^n stored as lookup tables, and the
//! standard analyses on them: ANF, algebraic degree, Walsh spectra, DDT.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::linalg::dot;

pub const MAX_N: usize = 16;

/// A function F2^n -> F2^n as its full lookup table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vbf {
    n: usize,
    lut: Vec<u32>,
}

impl Vbf {
    pub fn new(n: usize, lut: Vec<u32>) -> Result<Self, Error> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::InvalidArgument(format!("dimension {n} out of range 1..={MAX_N}")));
        }
        if lut.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "lookup table has {} entries, expected {}",
                lut.len(),
                1usize << n
            )));
        }
        if let Some(v) = lut.iter().find(|&&v| v >> n != 0) {
            return Err(Error::InvalidArgument(format!("entry {v:#x} exceeds {n} bits")));
        }
        Ok(Vbf { n, lut })
    }

    pub fn from_fn(n: usize, f: impl FnMut(u32) -> u32) -> Result<Self, Error> {
        Self::new(n, (0..1u32 << n).map(f).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |x| x).expect("valid dimension")
    }

    pub fn constant(n: usize, c: u32) -> Result<Self, Error> {
        Self::from_fn(n, |_| c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.lut.len()
    }

    pub fn lut(&self) -> &[u32] {
        &self.lut
    }

    pub fn into_lut(self) -> Vec<u32> {
        self.lut
    }

    #[inline]
    pub fn eval(&self, x: u32) -> u32 {
        self.lut[x as usize]
    }

    /// `x -> output(F(input(x)))`; both maps must be bijections or arbitrary
    /// maps into F2^n respectively.
    pub fn compose(&self, input: impl Fn(u32) -> u32, output: impl Fn(u32) -> u32) -> Vbf {
        let lut = (0..self.size() as u32).map(|x| output(self.eval(input(x)))).collect();
        Vbf { n: self.n, lut }
    }

    /// Pointwise sum `F + G`.
    pub fn add(&self, other: &Vbf) -> Vbf {
        assert_eq!(self.n, other.n);
        let lut = self.lut.iter().zip(&other.lut).map(|(a, b)| a ^ b).collect();
        Vbf { n: self.n, lut }
    }

    pub fn anf(&self) -> Anf {
        let mut coeffs = self.lut.clone();
        moebius_in_place(&mut coeffs);
        Anf { n: self.n, coeffs }
    }

    /// `max wt(u)` over nonzero ANF coefficients; 0 for constants.
    pub fn algebraic_degree(&self) -> u32 {
        self.anf().degree()
    }

    /// Direct evaluation of the Walsh sum at one point.
    pub fn walsh_value(&self, alpha: u32, beta: u32) -> i64 {
        self.lut
            .iter()
            .enumerate()
            .map(|(x, &y)| if dot(alpha, x as u32) ^ dot(beta, y) == 0 { 1 } else { -1 })
            .sum()
    }

    /// Walsh values of the component `<beta, F>` for every `alpha`, via the
    /// fast Walsh-Hadamard transform.
    pub fn walsh_component(&self, beta: u32) -> Vec<i32> {
        let mut v: Vec<i32> = self.lut.iter().map(|&y| 1 - 2 * dot(beta, y) as i32).collect();
        fwht(&mut v);
        v
    }

    /// Absolute Walsh values over all `alpha` and all nonzero `beta`:
    /// `2^n (2^n - 1)` entries in total.
    pub fn extended_walsh_spectrum(&self) -> Spectrum {
        let mut s = Spectrum::default();
        for beta in 1..self.size() as u32 {
            for w in self.walsh_component(beta) {
                s.add(w.unsigned_abs() as i64, 1);
            }
        }
        s
    }

    /// [`Vbf::extended_walsh_spectrum`] plus the `beta = 0` row, for a total
    /// of `2^{2n}` entries.
    pub fn extended_walsh_spectrum_with_trivial_row(&self) -> Spectrum {
        let mut s = self.extended_walsh_spectrum();
        s.add(self.size() as i64, 1);
        s.add(0, self.size() as u64 - 1);
        s
    }

    /// `max |W(alpha, beta)|` over all `alpha` and `beta != 0`.
    pub fn linearity(&self) -> u32 {
        (1..self.size() as u32)
            .flat_map(|b| self.walsh_component(b))
            .map(|w| w.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn ddt(&self) -> Ddt {
        let size = self.size();
        let mut table = vec![0u32; size * size];
        for alpha in 0..size {
            let row = &mut table[alpha * size..(alpha + 1) * size];
            for x in 0..size {
                row[(self.lut[x] ^ self.lut[x ^ alpha]) as usize] += 1;
            }
        }
        Ddt { n: self.n, table }
    }

    /// Multiset of all DDT entries, the trivial row included.
    pub fn differential_spectrum(&self) -> Spectrum {
        let mut s = Spectrum::default();
        for &e in &self.ddt().table {
            s.add(e as i64, 1);
        }
        s
    }

    /// Maximum DDT entry over nonzero input differences.
    pub fn differential_uniformity(&self) -> u32 {
        let ddt = self.ddt();
        (1..self.size()).flat_map(|a| ddt.row(a as u32).iter().copied()).max().unwrap_or(0)
    }

    /// Whether every equation `F(x) + F(x + a) = b` with `a != 0` has at most
    /// two solutions. Exits at the first violation.
    pub fn is_apn(&self) -> bool {
        let size = self.size();
        let mut stamp = vec![0u32; size];
        for alpha in 1..size {
            for x in 0..size {
                let x2 = x ^ alpha;
                if x2 < x {
                    continue;
                }
                let b = (self.lut[x] ^ self.lut[x2]) as usize;
                if stamp[b] == alpha as u32 {
                    return false;
                }
                stamp[b] = alpha as u32;
            }
        }
        true
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.size()];
        for &y in &self.lut {
            if std::mem::replace(&mut seen[y as usize], true) {
                return false;
            }
        }
        true
    }

    /// Lookup-table file text: `n=<dim>` then the entries in hexadecimal.
    pub fn to_lut_text(&self) -> String {
        let body: Vec<String> = self.lut.iter().map(|v| format!("{v:x}")).collect();
        format!("n={}\n{}\n", self.n, body.join(" "))
    }

    pub fn from_lut_text(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty lookup-table file".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected 'n=<dim>' header, got '{header}'")))?;
        let mut lut = Vec::new();
        for line in lines {
            for tok in line.split_whitespace() {
                let t = tok.trim_start_matches("0x");
                let v = u32::from_str_radix(t, 16)
                    .map_err(|_| Error::Parse(format!("bad hex entry '{tok}'")))?;
                lut.push(v);
            }
        }
        Self::new(n, lut).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Debug for Vbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vbf(n={}, {:?})", self.n, self.lut)
    }
}

/// Algebraic normal form: `coeffs[u]` is the coefficient of `x^u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anf {
    n: usize,
    coeffs: Vec<u32>,
}

impl Anf {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, u: u32) -> u32 {
        self.coeffs[u as usize]
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(u, _)| u.count_ones())
            .max()
            .unwrap_or(0)
    }

    pub fn to_vbf(&self) -> Vbf {
        let mut lut = self.coeffs.clone();
        moebius_in_place(&mut lut);
        Vbf { n: self.n, lut }
    }
}

/// Binary Moebius transform; applying it twice is the identity.
pub fn moebius_in_place(v: &mut [u32]) {
    let size = v.len();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                v[i + h] ^= v[i];
            }
        }
        h *= 2;
    }
}

/// Unnormalized Walsh-Hadamard transform.
pub fn fwht(v: &mut [i32]) {
    let size = v.len();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Difference distribution table, row-major in the input difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ddt {
    n: usize,
    table: Vec<u32>,
}

impl Ddt {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, alpha: u32, beta: u32) -> u32 {
        self.table[((alpha as usize) << self.n) + beta as usize]
    }

    pub fn row(&self, alpha: u32) -> &[u32] {
        let size = 1usize << self.n;
        &self.table[alpha as usize * size..(alpha as usize + 1) * size]
    }

    pub fn entries(&self) -> &[u32] {
        &self.table
    }
}

/// A multiset of integers, displayed as sorted `value:multiplicity` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spectrum(BTreeMap<i64, u64>);

impl Spectrum {
    pub fn from_pairs(pairs: &[(i64, u64)]) -> Self {
        let mut s = Spectrum::default();
        for &(v, m) in pairs {
            s.add(v, m);
        }
        s
    }

    pub fn add(&mut self, value: i64, mult: u64) {
        if mult > 0 {
            *self.0.entry(value).or_insert(0) += mult;
        }
    }

    pub fn get(&self, value: i64) -> u64 {
        self.0.get(&value).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn max_value(&self) -> Option<i64> {
        self.0.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.0.iter().map(|(&v, &m)| (v, m))
    }

    /// `v1:m1,v2:m2,...` in increasing value order.
    pub fn canonical(&self) -> String {
        let parts: Vec<String> = self.iter().map(|(v, m)| format!("{v}:{m}")).collect();
        parts.join(",")
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut s = Spectrum::default();
        let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (v, m) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad spectrum entry '{part}'")))?;
            let v = v.trim().parse().map_err(|_| Error::Parse(format!("bad value '{v}'")))?;
            let m = m.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity '{m}'")))?;
            s.add(v, m);
        }
        Ok(s)
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(v, m)| format!("{v}: {m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vbf(n: usize, rng: &mut ChaCha8Rng) -> Vbf {
        Vbf::from_fn(n, |_| rng.gen_range(0..1u32 << n)).unwrap()
    }

    fn naive_is_apn(f: &Vbf) -> bool {
        let size = f.size() as u32;
        for a in 1..size {
            for b in 0..size {
                let sols = (0..size).filter(|&x| f.eval(x) ^ f.eval(x ^ a) == b).count();
                if sols > 2 {
                    return false;
                }
            }
        }
        true
    }

    /// x^3 over GF(8) with modulus X^3+X+1, evaluated by hand-written
    /// carry-less arithmetic.
    fn cube_gf8() -> Vbf {
        Vbf::new(3, vec![0, 1, 3, 4, 5, 6, 7, 2]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Vbf::new(2, vec![0, 1, 2]).is_err());
        assert!(Vbf::new(2, vec![0, 1, 2, 4]).is_err());
        assert!(Vbf::new(0, vec![0]).is_err());
    }

    #[test]
    fn anf_examples() {
        let zero = Vbf::constant(4, 0).unwrap();
        assert!(zero.anf().coeffs().iter().all(|&a| a == 0));
        let id = Vbf::identity(4);
        let anf = id.anf();
        for u in 0..16u32 {
            let expected = if u.count_ones() == 1 { u } else { 0 };
            assert_eq!(anf.coeff(u), expected);
        }
        assert_eq!(id.algebraic_degree(), 1);
        assert_eq!(Vbf::constant(5, 3).unwrap().algebraic_degree(), 0);
        assert_eq!(cube_gf8().algebraic_degree(), 2);
        // x^7 on GF(8): 0 at 0, 1 elsewhere
        let x7 = Vbf::from_fn(3, |x| u32::from(x != 0)).unwrap();
        assert_eq!(x7.algebraic_degree(), 3);
    }

    #[test]
    fn moebius_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            let f = random_vbf(n, &mut rng);
            assert_eq!(f.anf().to_vbf(), f);
        }
    }

    #[test]
    fn walsh_trivial_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_vbf(5, &mut rng);
        assert_eq!(f.walsh_value(0, 0), 32);
        for a in 1..32 {
            assert_eq!(f.walsh_value(a, 0), 0);
        }
        let id = Vbf::identity(5);
        for a in 1..32 {
            assert_eq!(id.walsh_value(a, a), 32);
        }
    }

    #[test]
    fn fwht_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_vbf(5, &mut rng);
        for beta in 0..32 {
            let w = f.walsh_component(beta);
            for alpha in 0..32 {
                assert_eq!(w[alpha as usize] as i64, f.walsh_value(alpha, beta));
            }
        }
    }

    #[test]
    fn parseval_per_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=8 {
            let f = random_vbf(n, &mut rng);
            for beta in 0..1u32 << n {
                let s: i64 = f.walsh_component(beta).iter().map(|&w| (w as i64) * (w as i64)).sum();
                assert_eq!(s, 1i64 << (2 * n));
            }
        }
    }

    #[test]
    fn spectrum_totals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_vbf(4, &mut rng);
        assert_eq!(f.extended_walsh_spectrum().total(), 16 * 15);
        assert_eq!(f.extended_walsh_spectrum_with_trivial_row().total(), 256);
        let sq: i64 = f.extended_walsh_spectrum().iter().map(|(v, m)| v * v * m as i64).sum();
        assert_eq!(sq, 256 * 15);
    }

    #[test]
    fn linearity_examples() {
        let affine = Vbf::from_fn(4, |x| x ^ 5).unwrap();
        assert_eq!(affine.linearity(), 16);
        // x^3 on GF(8) is almost bent
        assert_eq!(cube_gf8().linearity(), 4);
    }

    #[test]
    fn ddt_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=6 {
            let f = random_vbf(n, &mut rng);
            let ddt = f.ddt();
            let size = 1u32 << n;
            for a in 0..size {
                assert_eq!(ddt.row(a).iter().sum::<u32>(), size);
                assert!(ddt.row(a).iter().all(|e| e % 2 == 0));
            }
            assert_eq!(ddt.get(0, 0), size);
            assert!((1..size).all(|b| ddt.get(0, b) == 0));
        }
    }

    #[test]
    fn apn_examples() {
        let id = Vbf::identity(3);
        assert!(!id.is_apn());
        assert_eq!(id.ddt().get(3, 3), 8);
        assert!(cube_gf8().is_apn());
        assert!(naive_is_apn(&cube_gf8()));
    }

    #[test]
    fn is_apn_agrees_with_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut positives = 0;
        for n in 1..=4 {
            for _ in 0..300 {
                let f = random_vbf(n, &mut rng);
                let naive = naive_is_apn(&f);
                positives += naive as usize;
                assert_eq!(f.is_apn(), naive, "{f:?}");
                assert_eq!(f.differential_uniformity() <= 2, naive);
            }
        }
        assert!(positives > 0);
    }

    #[test]
    fn permutation_examples() {
        assert!(Vbf::identity(6).is_permutation());
        assert!(!Vbf::constant(6, 1).unwrap().is_permutation());
        assert!(cube_gf8().is_permutation());
    }

    #[test]
    fn lut_text_roundtrip() {
        let f = cube_gf8();
        let text = f.to_lut_text();
        assert_eq!(text, "n=3\n0 1 3 4 5 6 7 2\n");
        assert_eq!(Vbf::from_lut_text(&text).unwrap(), f);
        assert!(Vbf::from_lut_text("n=3\n0 1 2").is_err());
        assert!(Vbf::from_lut_text("m=3\n0").is_err());
        assert!(Vbf::from_lut_text("n=2\n0 1 2 zz").is_err());
    }

    #[test]
    fn spectrum_canonical_and_parse() {
        let s = Spectrum::from_pairs(&[(16, 43520), (0, 16320), (32, 5440)]);
        assert_eq!(s.canonical(), "0:16320,16:43520,32:5440");
        assert_eq!(s.to_string(), "{0: 16320, 16: 43520, 32: 5440}");
        assert_eq!(Spectrum::parse(&s.to_string()).unwrap(), s);
        assert_eq!(Spectrum::parse(&s.canonical()).unwrap(), s);
    }
}
