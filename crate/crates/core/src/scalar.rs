//! Exact scalar arithmetic over the three coefficient fields: the rationals,
//! prime fields `F_p` for odd `p`, and rational function fields `F_p(t)`.
//!
//! Every [`Scalar`] is kept in canonical form at all times (reduced fractions,
//! residues in `[0, p)`, rational functions with monic denominator coprime to
//! the numerator), so equality is plain structural comparison.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::Poly;

/// Errors arising from scalar construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("operands belong to different fields: {0} vs {1}")]
    DescriptorMismatch(FieldDescriptor, FieldDescriptor),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {text:?} as an element of {field}: {reason}")]
    Parse { field: FieldDescriptor, text: String, reason: String },
}

/// One of the three supported coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Rationals,
    Prime(u64),
    RationalFunctions(u64),
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor::Rationals
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        check_odd_prime(p)?;
        Ok(FieldDescriptor::Prime(p))
    }

    pub fn rational_functions(p: u64) -> Result<Self, FieldError> {
        check_odd_prime(p)?;
        Ok(FieldDescriptor::RationalFunctions(p))
    }

    /// Characteristic of the field; 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals => 0,
            FieldDescriptor::Prime(p) | FieldDescriptor::RationalFunctions(p) => *p,
        }
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::Prime(p) => write!(f, "F_{p}"),
            FieldDescriptor::RationalFunctions(p) => write!(f, "F_{p}(t)"),
        }
    }
}

fn check_odd_prime(p: u64) -> Result<(), FieldError> {
    if p < 3 || p % 2 == 0 || !is_prime(p) {
        return Err(FieldError::NotAnOddPrime(p));
    }
    Ok(())
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Residue arithmetic helpers; all inputs are assumed reduced mod `p`.
pub(crate) mod modp {
    pub fn add(a: u64, b: u64, p: u64) -> u64 {
        let s = a + b;
        if s >= p { s - p } else { s }
    }

    pub fn sub(a: u64, b: u64, p: u64) -> u64 {
        if a >= b { a - b } else { a + p - b }
    }

    pub fn neg(a: u64, p: u64) -> u64 {
        if a == 0 { 0 } else { p - a }
    }

    pub fn mul(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    /// Inverse of `a` mod prime `p` by the extended Euclidean algorithm.
    /// Panics if `a == 0`.
    pub fn inv(a: u64, p: u64) -> u64 {
        assert!(a != 0, "inverse of zero residue");
        let (mut r0, mut r1) = (p as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1, "modulus not coprime to argument");
        s0.rem_euclid(p as i128) as u64
    }
}

/// An exact field element, always in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { p: u64, value: u64 },
    RatFn { p: u64, num: Poly, den: Poly },
}

impl Scalar {
    pub fn descriptor(&self) -> FieldDescriptor {
        match self {
            Scalar::Rational(_) => FieldDescriptor::Rationals,
            Scalar::Residue { p, .. } => FieldDescriptor::Prime(*p),
            Scalar::RatFn { p, .. } => FieldDescriptor::RationalFunctions(*p),
        }
    }

    pub fn zero(desc: &FieldDescriptor) -> Scalar {
        Scalar::from_i64(desc, 0)
    }

    pub fn one(desc: &FieldDescriptor) -> Scalar {
        Scalar::from_i64(desc, 1)
    }

    /// Image of the integer `n` in the field.
    pub fn from_i64(desc: &FieldDescriptor, n: i64) -> Scalar {
        match desc {
            FieldDescriptor::Rationals => Scalar::Rational(BigRational::from_integer(n.into())),
            FieldDescriptor::Prime(p) => Scalar::Residue { p: *p, value: (n.rem_euclid(*p as i64)) as u64 },
            FieldDescriptor::RationalFunctions(p) => {
                let value = (n.rem_euclid(*p as i64)) as u64;
                Scalar::RatFn { p: *p, num: Poly::constant(*p, value), den: Poly::one(*p) }
            }
        }
    }

    /// Residue constructor; `value` is reduced mod `p`.
    pub fn residue(p: u64, value: u64) -> Scalar {
        Scalar::Residue { p, value: value % p }
    }

    pub fn rational(numer: i64, denom: i64) -> Scalar {
        assert!(denom != 0, "zero denominator");
        Scalar::Rational(BigRational::new(numer.into(), denom.into()))
    }

    /// Rational function `num/den`, reduced to canonical form.
    /// Panics if `den` is zero.
    pub fn ratfn(num: Poly, den: Poly) -> Scalar {
        assert!(!den.is_zero(), "zero denominator polynomial");
        let p = num.modulus();
        assert_eq!(p, den.modulus());
        let (num, den) = Poly::reduce_fraction(num, den);
        Scalar::RatFn { p, num, den }
    }

    /// The indeterminate `t` of `F_p(t)`.
    pub fn t(p: u64) -> Scalar {
        Scalar::RatFn { p, num: Poly::monomial(p, 1, 1), den: Poly::one(p) }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
            Scalar::RatFn { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
            Scalar::RatFn { num, den, .. } => num.is_one() && den.is_one(),
        }
    }

    fn mismatch(&self, other: &Scalar) -> FieldError {
        FieldError::DescriptorMismatch(self.descriptor(), other.descriptor())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            (Scalar::Residue { p, value: a }, Scalar::Residue { p: q, value: b }) if p == q => {
                Ok(Scalar::Residue { p: *p, value: modp::add(*a, *b, *p) })
            }
            (Scalar::RatFn { p, num: an, den: ad }, Scalar::RatFn { p: q, num: bn, den: bd }) if p == q => {
                let num = an.mul(bd).add(&bn.mul(ad));
                let den = ad.mul(bd);
                Ok(Scalar::ratfn(num, den))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { p, value } => Scalar::Residue { p: *p, value: modp::neg(*value, *p) },
            Scalar::RatFn { p, num, den } => {
                Scalar::RatFn { p: *p, num: num.neg(), den: den.clone() }
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            (Scalar::Residue { p, value: a }, Scalar::Residue { p: q, value: b }) if p == q => {
                Ok(Scalar::Residue { p: *p, value: modp::mul(*a, *b, *p) })
            }
            (Scalar::RatFn { p, num: an, den: ad }, Scalar::RatFn { p: q, num: bn, den: bd }) if p == q => {
                Ok(Scalar::ratfn(an.mul(bn), ad.mul(bd)))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn invert(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            Scalar::Rational(a) => Ok(Scalar::Rational(a.recip())),
            Scalar::Residue { p, value } => Ok(Scalar::Residue { p: *p, value: modp::inv(*value, *p) }),
            Scalar::RatFn { num, den, .. } => Ok(Scalar::ratfn(den.clone(), num.clone())),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.mul(&other.invert()?)
    }

    /// For prime-field and constant rational-function scalars, the residue value.
    pub fn as_residue(&self) -> Option<u64> {
        match self {
            Scalar::Residue { value, .. } => Some(*value),
            Scalar::RatFn { num, den, .. } if den.is_one() && num.degree() <= 0 => {
                Some(num.constant_term())
            }
            _ => None,
        }
    }

    /// Parse the canonical text form of a scalar in the given field.
    pub fn parse(desc: &FieldDescriptor, text: &str) -> Result<Scalar, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            field: *desc,
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s = text.trim();
        if s.is_empty() {
            return Err(err("empty string"));
        }
        match desc {
            FieldDescriptor::Rationals => {
                let (numer, denom) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s, "1"),
                };
                let n: BigInt = numer.parse().map_err(|_| err("bad numerator"))?;
                let d: BigInt = denom.parse().map_err(|_| err("bad denominator"))?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                Ok(Scalar::Rational(BigRational::new(n, d)))
            }
            FieldDescriptor::Prime(p) => {
                let v: u64 = s.parse().map_err(|_| err("bad residue"))?;
                Ok(Scalar::Residue { p: *p, value: v % p })
            }
            FieldDescriptor::RationalFunctions(p) => {
                let parse_poly = |part: &str| -> Result<Poly, FieldError> {
                    let inner = part.trim();
                    let inner = inner
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .unwrap_or(inner);
                    Poly::parse(*p, inner).map_err(|reason| err(&reason))
                };
                match split_fraction(s) {
                    Some((num, den)) => {
                        let num = parse_poly(num)?;
                        let den = parse_poly(den)?;
                        if den.is_zero() {
                            return Err(err("zero denominator"));
                        }
                        Ok(Scalar::ratfn(num, den))
                    }
                    None => Ok(Scalar::ratfn(parse_poly(s)?, Poly::one(*p))),
                }
            }
        }
    }
}

/// Split `"(..)/(..)"` at the top-level slash, if there is one.
fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (idx, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Some((&s[..idx], &s[idx + 1..])),
            _ => {}
        }
    }
    None
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.numer().is_negative() {
                    write!(f, "-{}/{}", r.numer().magnitude(), r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
            Scalar::RatFn { num, den, .. } => {
                if den.is_one() {
                    write!(f, "({num})")
                } else {
                    write!(f, "({num})/({den})")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_two_mod_five() {
        let x = Scalar::residue(5, 2);
        assert_eq!(x.invert().unwrap(), Scalar::residue(5, 3));
    }

    #[test]
    fn minus_one_half_mod_five() {
        // negate(invert(2)) in F_5
        let half = Scalar::from_i64(&FieldDescriptor::prime(5).unwrap(), 2)
            .invert()
            .unwrap();
        assert_eq!(half.neg(), Scalar::residue(5, 2));
    }

    #[test]
    fn ratfn_reduction_cancels_common_factor() {
        // (t^2 - t)/t over F_3 reduces to t - 1 = t + 2
        let p = 3;
        let num = Poly::parse(p, "1*t^2 + 2*t").unwrap();
        let den = Poly::parse(p, "1*t").unwrap();
        let x = Scalar::ratfn(num, den);
        let expected = Scalar::ratfn(Poly::parse(p, "1*t + 2").unwrap(), Poly::one(p));
        assert_eq!(x, expected);
    }

    #[test]
    fn descriptor_mismatch_is_an_error() {
        let a = Scalar::residue(5, 1);
        let b = Scalar::residue(7, 1);
        assert!(matches!(a.add(&b), Err(FieldError::DescriptorMismatch(_, _))));
        let c = Scalar::rational(1, 2);
        assert!(matches!(c.mul(&a), Err(FieldError::DescriptorMismatch(_, _))));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        for desc in [
            FieldDescriptor::rationals(),
            FieldDescriptor::prime(5).unwrap(),
            FieldDescriptor::rational_functions(3).unwrap(),
        ] {
            assert_eq!(Scalar::zero(&desc).invert(), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn odd_prime_validation() {
        assert!(FieldDescriptor::prime(2).is_err());
        assert!(FieldDescriptor::prime(9).is_err());
        assert!(FieldDescriptor::prime(1).is_err());
        assert!(FieldDescriptor::prime(13).is_ok());
        assert!(FieldDescriptor::rational_functions(15).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::rational(3, 1).to_string(), "3");
        assert_eq!(Scalar::rational(-1, 2).to_string(), "-1/2");
        assert_eq!(Scalar::residue(7, 11).to_string(), "4");
        let t = Scalar::t(3);
        assert_eq!(t.to_string(), "(1*t)");
        let x = t.add(&Scalar::from_i64(&FieldDescriptor::rational_functions(3).unwrap(), 2)).unwrap();
        let y = x.invert().unwrap();
        assert_eq!(y.to_string(), "(1)/(1*t + 2)");
    }

    #[test]
    fn parse_round_trips_canonical_forms() {
        let cases = [
            Scalar::rational(-22, 7),
            Scalar::rational(4, 1),
            Scalar::residue(13, 9),
            Scalar::t(5).invert().unwrap(),
            Scalar::t(5)
                .mul(&Scalar::t(5))
                .unwrap()
                .add(&Scalar::from_i64(&FieldDescriptor::rational_functions(5).unwrap(), 3))
                .unwrap(),
        ];
        for x in cases {
            let desc = x.descriptor();
            let text = x.to_string();
            assert_eq!(Scalar::parse(&desc, &text).unwrap(), x, "round trip of {text}");
        }
    }
}
