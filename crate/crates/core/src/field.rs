//! Arithmetic in GF(2^n) and conversion between univariate polynomials and
//! lookup tables.
//!
//! Elements are integers whose bit `i` is the coefficient of `X^i` in the
//! polynomial basis defined by the modulus.

use std::collections::BTreeMap;
use std::fmt;

use crate::boolfun::Vbf;
use crate::error::Error;
use crate::linalg::{BitMatrix, GF2Poly};

#[derive(Clone)]
pub struct Field {
    n: usize,
    modulus: GF2Poly,
    /// A primitive element used for the log tables.
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    /// GF(2^n) as F2[X]/(modulus). The modulus must be irreducible of degree n.
    pub fn new(n: usize, modulus: GF2Poly) -> Result<Self, Error> {
        if !(1..=16).contains(&n) {
            return Err(Error::InvalidArgument(format!("field degree {n} out of range 1..=16")));
        }
        if modulus.degree() as usize != n || !modulus.is_irreducible() {
            return Err(Error::InvalidArgument(format!("{modulus} is not irreducible of degree {n}")));
        }
        let order = (1u32 << n) - 1;
        let primitive = (1..=order.max(1))
            .find(|&e| order == 1 || slow_order(e, modulus, n) == order)
            .expect("a finite field has a primitive element");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; 1 << n];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, primitive, modulus, n);
        }
        Ok(Field { n, modulus, primitive, exp, log })
    }

    /// The smallest irreducible polynomial of degree n, read as an integer.
    pub fn default_modulus(n: usize) -> GF2Poly {
        GF2Poly::irreducibles(n as u32)[0]
    }

    pub fn with_default_modulus(n: usize) -> Result<Self, Error> {
        Self::new(n, Self::default_modulus(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn modulus(&self) -> GF2Poly {
        self.modulus
    }

    pub fn primitive(&self) -> u32 {
        self.primitive
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.exp.len() as u32;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= order { s - order } else { s }) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.exp.len() as u64;
        self.exp[((self.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let order = self.exp.len() as u32;
        Some(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Value of a binary polynomial at a field element.
    pub fn eval_binary_poly(&self, p: GF2Poly, e: u32) -> u32 {
        let mut acc = 0;
        for i in (0..=p.degree()).rev() {
            acc = self.mul(acc, e);
            if p.coeff(i) {
                acc ^= 1;
            }
        }
        acc
    }

    /// Some root of `p` in the field, the smallest by integer encoding.
    pub fn element_with_min_poly(&self, p: GF2Poly) -> Result<u32, Error> {
        (0..self.size() as u32)
            .find(|&e| self.eval_binary_poly(p, e) == 0)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "{p} has no root in GF(2^{}); it is reducible or its degree does not divide {}",
                    self.n, self.n
                ))
            })
    }

    /// Matrix of `x -> c * x` acting on the integer encoding.
    pub fn mul_matrix(&self, c: u32) -> BitMatrix {
        BitMatrix::from_linear_fn(self.n, |x| self.mul(c, x))
    }

    pub fn univariate_to_lut(&self, f: &UnivariatePoly) -> Vbf {
        Vbf::from_fn(self.n, |x| {
            f.terms().fold(0, |acc, (e, c)| acc ^ self.mul(c, self.pow(x, e as u64)))
        })
        .expect("field elements fit the dimension")
    }

    /// Lagrange interpolation: the unique reduced polynomial of degree below
    /// `2^n` whose evaluation is the table.
    pub fn lut_to_univariate(&self, table: &Vbf) -> Result<UnivariatePoly, Error> {
        if table.n() != self.n {
            return Err(Error::InvalidArgument("table and field dimensions differ".into()));
        }
        let q1 = self.exp.len();
        let mut out = UnivariatePoly::default();
        out.add_term(table.eval(0), 0);
        // c_j = sum_{x != 0} F(x) x^{-j} for 1 <= j <= q - 1, and c_{q-1} also absorbs F(0)
        for j in 1..=q1 {
            let mut c = 0;
            for i in 0..q1 {
                let fx = table.eval(self.exp[i]);
                if fx == 0 {
                    continue;
                }
                let e = (q1 - (i * j) % q1) % q1;
                c ^= self.mul(fx, self.exp[e]);
            }
            if j == q1 {
                c ^= table.eval(0);
            }
            out.add_term(c, j as u32);
        }
        Ok(out)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(GF(2^{}) mod {})", self.n, self.modulus)
    }
}

fn slow_mul(a: u32, b: u32, modulus: GF2Poly, n: usize) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    let m = modulus.bits() as u32;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> n) & 1 == 1 {
            a ^= m;
        }
    }
    acc
}

fn slow_order(a: u32, modulus: GF2Poly, n: usize) -> u32 {
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = slow_mul(x, a, modulus, n);
        k += 1;
        if k > 1 << n {
            return 0;
        }
    }
    k
}

/// Carry-less product reduced by the modulus, independent of the log tables.
pub fn gf_mul(modulus: GF2Poly, a: u32, b: u32) -> u32 {
    slow_mul(a, b, modulus, modulus.degree() as usize)
}

/// `sum c_e X^e` with distinct exponents and nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnivariatePoly(BTreeMap<u32, u32>);

impl UnivariatePoly {
    pub fn from_terms(terms: &[(u32, u32)]) -> Self {
        let mut p = UnivariatePoly::default();
        for &(c, e) in terms {
            p.add_term(c, e);
        }
        p
    }

    /// Adds `c * X^e`, merging with an existing term of the same exponent.
    pub fn add_term(&mut self, c: u32, e: u32) {
        let slot = self.0.entry(e).or_insert(0);
        *slot ^= c;
        if *slot == 0 {
            self.0.remove(&e);
        }
    }

    /// `(exponent, coefficient)` pairs by increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.0.keys().copied().collect()
    }

    pub fn coeff(&self, e: u32) -> u32 {
        self.0.get(&e).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses terms such as `x^3 + g^60*x^5 + x^160` or `u^2*x^10`. Any
    /// identifier other than `x` names `generator`; bare integers are field
    /// constants in hexadecimal when prefixed by `0x`, decimal otherwise.
    pub fn parse(text: &str, field: &Field, generator: u32) -> Result<Self, Error> {
        let mut p = UnivariatePoly::default();
        for raw in text.split('+') {
            let term: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in '{text}'")));
            }
            let mut coeff = 1u32;
            let mut exp = 0u32;
            for factor in term.split('*') {
                let (base, power) = match factor.split_once('^') {
                    Some((b, e)) => (
                        b,
                        e.parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?,
                    ),
                    None => (factor, 1),
                };
                match base {
                    "x" | "X" => exp += power as u32,
                    b if b.chars().all(|c| c.is_ascii_alphabetic()) && !b.is_empty() => {
                        coeff = field.mul(coeff, field.pow(generator, power));
                    }
                    b => {
                        let c = match b.strip_prefix("0x") {
                            Some(h) => u32::from_str_radix(h, 16),
                            None => b.parse(),
                        }
                        .map_err(|_| Error::Parse(format!("bad factor '{factor}'")))?;
                        if c as usize >= field.size() {
                            return Err(Error::Parse(format!("constant {c} outside the field")));
                        }
                        coeff = field.mul(coeff, field.pow(c, power));
                    }
                }
            }
            if exp as usize >= field.size() {
                return Err(Error::Parse(format!("exponent {exp} not reduced modulo X^(2^n) - X")));
            }
            p.add_term(coeff, exp);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf8() -> Field {
        Field::new(3, GF2Poly::from_exponents(&[3, 1, 0])).unwrap()
    }

    #[test]
    fn mul_examples() {
        let f = gf8();
        for a in 0..8 {
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.mul(a, 0), 0);
        }
        // X * X^2 = X^3 = X + 1
        assert_eq!(f.mul(2, 4), 3);
        assert_eq!(gf_mul(f.modulus(), 2, 4), 3);
    }

    #[test]
    fn log_tables_agree_with_carryless_product() {
        let f = Field::new(8, GF2Poly::from_exponents(&[8, 4, 3, 2, 0])).unwrap();
        for a in 0..256 {
            for b in 0..256 {
                assert_eq!(f.mul(a, b), gf_mul(f.modulus(), a, b));
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(Field::new(3, GF2Poly::from_exponents(&[3, 0])).is_err());
        assert!(Field::new(4, GF2Poly::from_exponents(&[3, 1, 0])).is_err());
    }

    #[test]
    fn default_moduli() {
        assert_eq!(Field::default_modulus(8), GF2Poly::from_exponents(&[8, 4, 3, 1, 0]));
        for n in 2..=10 {
            let m = Field::default_modulus(n);
            assert!(m.is_irreducible());
            assert_eq!(m.degree() as usize, n);
        }
    }

    #[test]
    fn roots_of_minimal_polynomials() {
        let f = gf8();
        assert_eq!(f.element_with_min_poly(GF2Poly::X_PLUS_ONE).unwrap(), 1);
        assert_eq!(f.element_with_min_poly(f.modulus()).unwrap(), 2);
        let f9 = Field::with_default_modulus(9).unwrap();
        let u = f9.element_with_min_poly(GF2Poly::from_exponents(&[3, 1, 0])).unwrap();
        assert_eq!(f9.eval_binary_poly(GF2Poly::from_exponents(&[3, 1, 0]), u), 0);
        assert_eq!(f9.order(u), Some(7));
        // degree 4 does not divide 9
        assert!(f9.element_with_min_poly(GF2Poly::from_exponents(&[4, 1, 0])).is_err());
    }

    #[test]
    fn cube_table() {
        let f = gf8();
        let cube = f.univariate_to_lut(&UnivariatePoly::from_terms(&[(1, 3)]));
        assert_eq!(cube.lut(), &[0, 1, 3, 4, 5, 6, 7, 2]);
        assert!(cube.is_apn());
        let id = f.univariate_to_lut(&UnivariatePoly::from_terms(&[(1, 1)]));
        assert_eq!(id, Vbf::identity(3));
    }

    #[test]
    fn interpolation_examples() {
        let f = Field::with_default_modulus(5).unwrap();
        let cube = f.univariate_to_lut(&UnivariatePoly::from_terms(&[(1, 3)]));
        assert_eq!(f.lut_to_univariate(&cube).unwrap(), UnivariatePoly::from_terms(&[(1, 3)]));
        let c = Vbf::constant(5, 7).unwrap();
        assert_eq!(f.lut_to_univariate(&c).unwrap(), UnivariatePoly::from_terms(&[(7, 0)]));
    }

    #[test]
    fn parse_terms() {
        let f = Field::new(8, GF2Poly::from_exponents(&[8, 4, 3, 2, 0])).unwrap();
        let p = UnivariatePoly::parse("x^3 + g^60*x^5 + x", &f, 2).unwrap();
        assert_eq!(p.coeff(3), 1);
        assert_eq!(p.coeff(5), f.pow(2, 60));
        assert_eq!(p.coeff(1), 1);
        assert!(UnivariatePoly::parse("x^3 + ", &f, 2).is_err());
        assert!(UnivariatePoly::parse("x^256", &f, 2).is_err());
        // repeated exponents merge
        assert!(UnivariatePoly::parse("x^3 + x^3", &f, 2).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u32..256, b in 0u32..256, c in 0u32..256) {
            let f = Field::new(8, GF2Poly::from_exponents(&[8, 4, 3, 2, 0])).unwrap();
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }

        #[test]
        fn interpolation_roundtrip(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = Field::with_default_modulus(5).unwrap();
            let t = Vbf::from_fn(5, |_| rng.gen_range(0..32)).unwrap();
            let p = f.lut_to_univariate(&t).unwrap();
            prop_assert_eq!(f.univariate_to_lut(&p), t);
        }
    }
}
