//! Dense polynomials over a prime field, the building block of `F_p(t)`.
//!
//! Coefficients are residues in `[0, p)` stored little-endian with no trailing
//! zeros; the zero polynomial has an empty coefficient vector. Fractions are
//! normalized by dividing out the gcd and making the denominator monic.

use std::fmt;

use crate::scalar::modp;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn zero(p: u64) -> Poly {
        Poly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Poly {
        Poly::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Poly {
        let c = c % p;
        Poly { p, coeffs: if c == 0 { Vec::new() } else { vec![c] } }
    }

    /// `c * t^k`.
    pub fn monomial(p: u64, c: u64, k: usize) -> Poly {
        let c = c % p;
        if c == 0 {
            return Poly::zero(p);
        }
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Poly { p, coeffs }
    }

    pub fn from_coeffs(p: u64, coeffs: Vec<u64>) -> Poly {
        let mut poly = Poly { p, coeffs: coeffs.into_iter().map(|c| c % p).collect() };
        poly.trim();
        poly
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn constant_term(&self) -> u64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.p, other.p);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            coeffs.push(modp::add(a, b, self.p));
        }
        let mut out = Poly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&c| modp::neg(c, self.p)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = modp::add(coeffs[i + j], modp::mul(a, b, self.p), self.p);
            }
        }
        let mut out = Poly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = c % self.p;
        if c == 0 {
            return Poly::zero(self.p);
        }
        let mut out = Poly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&a| modp::mul(a, c, self.p)).collect(),
        };
        out.trim();
        out
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        debug_assert_eq!(self.p, divisor.p);
        let p = self.p;
        if self.degree() < divisor.degree() {
            return (Poly::zero(p), self.clone());
        }
        let lead_inv = modp::inv(divisor.leading_coeff(), p);
        let mut rem = self.coeffs.clone();
        let dd = divisor.coeffs.len();
        let mut quot = vec![0u64; rem.len() - dd + 1];
        for k in (0..quot.len()).rev() {
            let top = rem[k + dd - 1];
            if top == 0 {
                continue;
            }
            let q = modp::mul(top, lead_inv, p);
            quot[k] = q;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = modp::sub(rem[k + i], modp::mul(q, d, p), p);
            }
        }
        let mut quotient = Poly { p, coeffs: quot };
        let mut remainder = Poly { p, coeffs: rem };
        quotient.trim();
        remainder.trim();
        (quotient, remainder)
    }

    /// Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(modp::inv(self.leading_coeff(), self.p))
    }

    /// Canonical form of the fraction `num/den`: divide by the gcd and make
    /// the denominator monic. Zero is represented as `0/1`.
    pub fn reduce_fraction(num: Poly, den: Poly) -> (Poly, Poly) {
        let p = num.p;
        if num.is_zero() {
            return (Poly::zero(p), Poly::one(p));
        }
        let g = num.gcd(&den);
        let (mut num, _) = num.div_rem(&g);
        let (mut den, _) = den.div_rem(&g);
        if !den.is_monic() {
            let inv = modp::inv(den.leading_coeff(), p);
            num = num.scale(inv);
            den = den.scale(inv);
        }
        (num, den)
    }

    /// Parse the sparse `c*t^k` sum form emitted by `Display`.
    pub fn parse(p: u64, text: &str) -> Result<Poly, String> {
        let s = text.trim();
        if s.is_empty() {
            return Err("empty polynomial".to_string());
        }
        let mut out = Poly::zero(p);
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err("empty term".to_string());
            }
            let (coeff_text, power) = match term.split_once('*') {
                None => {
                    if term == "t" {
                        ("1", 1usize)
                    } else {
                        (term, 0usize)
                    }
                }
                Some((c, rest)) => {
                    let rest = rest.trim();
                    if rest == "t" {
                        (c.trim(), 1)
                    } else if let Some(k) = rest.strip_prefix("t^") {
                        (c.trim(), k.trim().parse::<usize>().map_err(|_| format!("bad exponent in {term:?}"))?)
                    } else {
                        return Err(format!("bad term {term:?}"));
                    }
                }
            };
            let c: u64 = coeff_text.parse().map_err(|_| format!("bad coefficient in {term:?}"))?;
            out = out.add(&Poly::monomial(p, c, power));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_rem_recombines() {
        let p = 7;
        let a = Poly::from_coeffs(p, vec![3, 0, 5, 1, 2]);
        let b = Poly::from_coeffs(p, vec![4, 1, 3]);
        let (q, r) = a.div_rem(&b);
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn gcd_of_multiples() {
        let p = 5;
        let g = Poly::from_coeffs(p, vec![1, 1]); // t + 1
        let a = g.mul(&Poly::from_coeffs(p, vec![2, 0, 1]));
        let b = g.mul(&Poly::from_coeffs(p, vec![3, 1]));
        let d = a.gcd(&b);
        let (_, r) = d.div_rem(&g);
        assert!(r.is_zero());
        assert!(d.is_monic());
        assert_eq!(d.degree(), 1);
    }

    #[test]
    fn fraction_normalizes_to_monic_denominator() {
        let p = 5;
        // (2t + 2) / (3t) -> numerator and denominator scaled so den is monic
        let (num, den) = Poly::reduce_fraction(
            Poly::from_coeffs(p, vec![2, 2]),
            Poly::from_coeffs(p, vec![0, 3]),
        );
        assert!(den.is_monic());
        // 3^{-1} = 2 mod 5, so the pair is (4t + 4)/t
        assert_eq!(num, Poly::from_coeffs(p, vec![4, 4]));
        assert_eq!(den, Poly::from_coeffs(p, vec![0, 1]));
    }

    #[test]
    fn display_and_parse() {
        let p = 5;
        let poly = Poly::from_coeffs(p, vec![4, 0, 1, 3]);
        assert_eq!(poly.to_string(), "3*t^3 + 1*t^2 + 4");
        assert_eq!(Poly::parse(p, &poly.to_string()).unwrap(), poly);
        assert_eq!(Poly::parse(p, "0").unwrap(), Poly::zero(p));
        assert_eq!(Poly::zero(p).to_string(), "0");
    }
}
