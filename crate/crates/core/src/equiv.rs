//! EA-inequivalence testing for quadratic APN functions through the
//! ortho-derivative.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::boolfun::{Spectrum, Vbf};
use crate::error::Error;
use crate::linalg::{BitMatrix, Subspace};

/// Returns `Pi_F`: `Pi_F(0) = 0` and, for `a != 0`, the nonzero vector
/// orthogonal to every `F(x) + F(x + a) + F(a) + F(0)`.
pub fn ortho_derivative(f: &Vbf) -> Result<Vbf, Error> {
    if f.algebraic_degree() > 2 {
        return Err(Error::Precondition("ortho-derivative needs degree <= 2".into()));
    }
    if !f.is_apn() {
        return Err(Error::Precondition("ortho-derivative needs an APN function".into()));
    }
    let n = f.n();
    let lut = f.lut();
    let mut out = vec![0u32; f.size()];
    let mut space = Vec::with_capacity(n);
    for a in 1..f.size() {
        space.clear();
        let shift = lut[a] ^ lut[0];
        for x in 0..f.size() {
            insert_reduced(&mut space, lut[x] ^ lut[x ^ a] ^ shift);
        }
        if space.len() != n - 1 {
            return Err(Error::Precondition(format!(
                "derivative space at {a:#x} has dimension {}",
                space.len()
            )));
        }
        let comp = Subspace::orthogonal_complement(n, &space);
        debug_assert_eq!(comp.dim(), 1);
        out[a] = comp.basis()[0];
    }
    Vbf::new(n, out)
}

// Keeps `basis` reduced by leading bit; inserts `v` if independent.
fn insert_reduced(basis: &mut Vec<u32>, mut v: u32) {
    for &b in basis.iter() {
        v = v.min(v ^ b);
    }
    if v != 0 {
        basis.push(v);
        basis.sort_unstable_by(|a, b| b.cmp(a));
    }
}

/// Extended Walsh spectrum (nonzero output masks) and differential spectrum
/// of the ortho-derivative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    pub odw: Spectrum,
    pub odd: Spectrum,
}

impl Fingerprint {
    pub fn of(f: &Vbf) -> Result<Self, Error> {
        let pi = ortho_derivative(f)?;
        Ok(Fingerprint { odw: pi.extended_walsh_spectrum(), odd: pi.differential_spectrum() })
    }

    /// Canonical one-line form, `odw=<spectrum>;odd=<spectrum>`.
    pub fn canonical(&self) -> String {
        format!("odw={};odd={}", self.odw.canonical(), self.odd.canonical())
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for Fingerprint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("malformed fingerprint {s:?}"));
        let (w, d) = s.trim().split_once(';').ok_or_else(bad)?;
        let w = w.strip_prefix("odw=").ok_or_else(bad)?;
        let d = d.strip_prefix("odd=").ok_or_else(bad)?;
        Ok(Fingerprint { odw: Spectrum::parse(w)?, odd: Spectrum::parse(d)? })
    }
}

pub fn fingerprint(f: &Vbf) -> Result<Fingerprint, Error> {
    Fingerprint::of(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Inequivalent,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Inequivalent => "INEQUIVALENT",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

pub fn inequivalent(f: &Vbf, g: &Vbf) -> Result<Verdict, Error> {
    Ok(if Fingerprint::of(f)? != Fingerprint::of(g)? { Verdict::Inequivalent } else { Verdict::Undecided })
}

/// A random EA transform `x -> B(F(A x + a)) + b + C x` with `A`, `B`
/// invertible and `C` arbitrary.
pub fn random_ea_transform<R: Rng + ?Sized>(f: &Vbf, rng: &mut R) -> Vbf {
    let n = f.n();
    let mask = (1u32 << n) - 1;
    let a = BitMatrix::random_invertible(n, rng);
    let b = BitMatrix::random_invertible(n, rng);
    let rows: Vec<u32> = (0..n).map(|_| rng.gen::<u32>() & mask).collect();
    let c = BitMatrix::from_rows(n, &rows).expect("n rows");
    let (ta, tb) = (rng.gen::<u32>() & mask, rng.gen::<u32>() & mask);
    Vbf::from_fn(n, |x| b.apply(f.eval(a.apply(x) ^ ta)) ^ tb ^ c.apply(x)).expect("same dimension")
}
