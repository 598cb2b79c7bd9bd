//! Explicit APN functions given by univariate polynomials, used as reference
//! points for the analyses and searches.

use crate::boolfun::Vbf;
use crate::error::Error;
use crate::field::{Field, UnivariatePoly};
use crate::linalg::GF2Poly;

/// `X^8 + X^4 + X^3 + X^2 + 1`, the minimal polynomial of `g` in GF(2^8).
pub const MODULUS_8: u64 = 0x11d;
/// `X^6 + X^4 + X^3 + X + 1`, the minimal polynomial of `g` in GF(2^6).
pub const MODULUS_6: u64 = 0x5b;
/// `X^3 + X + 1`, the minimal polynomial of `u` in GF(2^9).
pub const U_MIN_POLY_9: u64 = 0xb;

pub const PERMUTATION_9A: &str = "x^3 + u*x^10 + u^2*x^17 + u^4*x^80 + u^5*x^192";
pub const PERMUTATION_9B: &str = "x^3 + u^2*x^10 + u*x^24 + u^4*x^80 + u^6*x^136";
pub const KIM_MAPPING: &str = "x^3 + x^10 + g*x^24";
pub const LINEARITY_128: &str = "x^3 + g^60*x^5 + g^191*x^6 + g^198*x^9 + g^232*x^10 + g^120*x^12 \
    + g^54*x^17 + g^64*x^18 + g^159*x^20 + g^144*x^24 + g^248*x^33 + g^203*x^34 + g^32*x^36 \
    + g^18*x^40 + g^216*x^48 + g^78*x^65 + g^46*x^66 + g^91*x^68 + g^27*x^72 + g^70*x^80 \
    + g^52*x^96 + g^224*x^129 + g^18*x^130 + g^197*x^136 + g^253*x^144 + x^160";

/// GF(2^8) with `g` as the class of `X`.
pub fn field_8() -> Field {
    Field::new(8, GF2Poly::from_bits(MODULUS_8)).expect("irreducible")
}

/// GF(2^6) with `g` as the class of `X`.
pub fn field_6() -> Field {
    Field::new(6, GF2Poly::from_bits(MODULUS_6)).expect("irreducible")
}

/// GF(2^9) under the default modulus, with `u` a root of `X^3 + X + 1`.
pub fn field_9() -> (Field, u32) {
    let f = Field::with_default_modulus(9).expect("irreducible");
    let u = f.element_with_min_poly(GF2Poly::from_bits(U_MIN_POLY_9)).expect("3 divides 9");
    (f, u)
}

fn eval(field: &Field, generator: u32, text: &str) -> Result<Vbf, Error> {
    let p = UnivariatePoly::parse(text, field, generator)?;
    Ok(field.univariate_to_lut(&p))
}

pub fn permutation_9a() -> Vbf {
    let (f, u) = field_9();
    eval(&f, u, PERMUTATION_9A).expect("well-formed polynomial")
}

pub fn permutation_9b() -> Vbf {
    let (f, u) = field_9();
    eval(&f, u, PERMUTATION_9B).expect("well-formed polynomial")
}

pub fn linearity_128() -> Vbf {
    eval(&field_8(), 2, LINEARITY_128).expect("well-formed polynomial")
}

pub fn kim_mapping() -> Vbf {
    eval(&field_6(), 2, KIM_MAPPING).expect("well-formed polynomial")
}

/// The power map `x -> x^e` over GF(2^n) with the default modulus (or the
/// moduli above for n = 6, 8).
pub fn power_map(n: usize, e: u64) -> Vbf {
    let f = match n {
        6 => field_6(),
        8 => field_8(),
        _ => Field::with_default_modulus(n).expect("supported dimension"),
    };
    Vbf::from_fn(n, |x| f.pow(x, e)).expect("valid dimension")
}
