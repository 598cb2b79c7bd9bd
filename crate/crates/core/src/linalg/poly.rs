//! Polynomials over F2 of degree at most 63, packed into a machine word.
//!
//! Bit `i` holds the coefficient of `X^i`. The zero polynomial is the word 0
//! and reports degree 0.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GF2Poly(u64);

impl GF2Poly {
    pub const ZERO: GF2Poly = GF2Poly(0);
    pub const ONE: GF2Poly = GF2Poly(1);
    /// The polynomial `X`.
    pub const X: GF2Poly = GF2Poly(2);
    /// The polynomial `X + 1`.
    pub const X_PLUS_ONE: GF2Poly = GF2Poly(3);

    pub const fn from_bits(bits: u64) -> Self {
        GF2Poly(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_exponents(exps: &[u32]) -> Self {
        GF2Poly(exps.iter().fold(0u64, |acc, &e| acc ^ (1u64 << e)))
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            63 - self.0.leading_zeros()
        }
    }

    pub fn coeff(self, i: u32) -> bool {
        i < 64 && (self.0 >> i) & 1 == 1
    }

    pub fn constant_term(self) -> bool {
        self.0 & 1 == 1
    }

    /// Carry-less product. Panics if the result would not fit in 64 coefficients.
    pub fn mul(self, other: GF2Poly) -> GF2Poly {
        if self.is_zero() || other.is_zero() {
            return GF2Poly::ZERO;
        }
        assert!(
            self.degree() + other.degree() < 64,
            "polynomial product exceeds degree 63"
        );
        let mut acc = 0u64;
        let mut a = self.0;
        let mut shift = 0;
        while a != 0 {
            if a & 1 == 1 {
                acc ^= other.0 << shift;
            }
            a >>= 1;
            shift += 1;
        }
        GF2Poly(acc)
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    pub fn div_rem(self, divisor: GF2Poly) -> (GF2Poly, GF2Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        let mut rem = self.0;
        let mut quot = 0u64;
        while rem != 0 {
            let rd = 63 - rem.leading_zeros();
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot |= 1u64 << shift;
            rem ^= divisor.0 << shift;
        }
        (GF2Poly(quot), GF2Poly(rem))
    }

    pub fn rem(self, divisor: GF2Poly) -> GF2Poly {
        self.div_rem(divisor).1
    }

    pub fn divides(self, other: GF2Poly) -> bool {
        other.rem(self).is_zero()
    }

    pub fn gcd(self, other: GF2Poly) -> GF2Poly {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a.rem(b);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow(self, mut e: u32) -> GF2Poly {
        let mut base = self;
        let mut acc = GF2Poly::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    pub fn mul_mod(self, other: GF2Poly, modulus: GF2Poly) -> GF2Poly {
        self.rem(modulus).mul(other.rem(modulus)).rem(modulus)
    }

    /// `X^e mod modulus`, with `e` allowed to be huge.
    pub fn x_pow_mod(e: u64, modulus: GF2Poly) -> GF2Poly {
        let mut acc = GF2Poly::ONE.rem(modulus);
        let mut base = GF2Poly::X.rem(modulus);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(base, modulus);
            }
            e >>= 1;
            base = base.mul_mod(base, modulus);
        }
        acc
    }

    /// Rabin's irreducibility test. Requires degree <= 31 so products stay in range.
    pub fn is_irreducible(self) -> bool {
        let d = self.degree();
        if d == 0 {
            return false;
        }
        assert!(d <= 31, "irreducibility test limited to degree 31");
        if d == 1 {
            return true;
        }
        // X^(2^d) == X mod f
        let mut t = GF2Poly::X;
        for _ in 0..d {
            t = t.mul_mod(t, self);
        }
        if t != GF2Poly::X.rem(self) {
            return false;
        }
        // gcd(X^(2^(d/r)) - X, f) = 1 for each prime r | d
        for r in prime_factors(d as u64) {
            let k = d / r as u32;
            let mut t = GF2Poly::X;
            for _ in 0..k {
                t = t.mul_mod(t, self);
            }
            let diff = GF2Poly(t.0 ^ GF2Poly::X.0);
            if self.gcd(diff).degree() != 0 {
                return false;
            }
        }
        true
    }

    /// Factorization into irreducibles by trial division, smallest factors first.
    /// Returns `(factor, multiplicity)` pairs sorted by [`GF2Poly::canonical_cmp`].
    pub fn factor(self) -> Vec<(GF2Poly, u32)> {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let mut rest = self;
        let mut out: Vec<(GF2Poly, u32)> = Vec::new();
        let mut cand = 2u64;
        while rest.degree() > 0 {
            let c = GF2Poly(cand);
            if 2 * c.degree() > rest.degree() {
                // whatever is left has no factor of degree <= half its degree
                push_factor(&mut out, rest);
                break;
            }
            let (q, r) = rest.div_rem(c);
            if r.is_zero() {
                push_factor(&mut out, c);
                rest = q;
            } else {
                cand += 1;
            }
        }
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }

    /// Ordering used for every canonical listing: by degree, then by the
    /// coefficient bits read as an integer.
    pub fn canonical_cmp(&self, other: &GF2Poly) -> Ordering {
        (self.degree(), self.0).cmp(&(other.degree(), other.0))
    }

    pub fn to_hex(self) -> String {
        format!("{:x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_start_matches("0x");
        u64::from_str_radix(t, 16)
            .map(GF2Poly)
            .map_err(|_| Error::Parse(format!("invalid polynomial hex '{s}'")))
    }

    /// All irreducible polynomials of the given degree, in canonical order.
    pub fn irreducibles(degree: u32) -> Vec<GF2Poly> {
        assert!((1..=31).contains(&degree));
        let lo = 1u64 << degree;
        (lo..lo << 1)
            .map(GF2Poly)
            .filter(|p| p.is_irreducible())
            .collect()
    }
}

fn push_factor(out: &mut Vec<(GF2Poly, u32)>, f: GF2Poly) {
    match out.iter_mut().find(|(g, _)| *g == f) {
        Some(entry) => entry.1 += 1,
        None => out.push((f, 1)),
    }
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

impl PartialOrd for GF2Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GF2Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Debug for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Poly({self})")
    }
}

impl fmt::Display for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..=self.degree()).rev() {
            if !self.coeff(i) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}
