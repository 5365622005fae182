//! Binomial coefficients: exact big-integer values for characteristic zero and
//! Lucas' theorem for reduction modulo an odd prime.

use num_bigint::BigInt;
use num_traits::One;

use crate::scalar::{modp, FieldDescriptor, FieldError, Scalar};

/// `C(a, b) mod p` computed digit-wise in base `p`, per Lucas' theorem.
/// Returns 0 whenever some base-`p` digit of `b` exceeds the matching digit
/// of `a` (in particular for `a < b`). `p` must be an odd prime.
pub fn lucas_binomial(a: u64, b: u64, p: u64) -> Result<Scalar, FieldError> {
    let desc = FieldDescriptor::prime(p)?;
    let _ = desc;
    Ok(Scalar::residue(p, lucas_mod(a, b, p)))
}

/// Raw residue version of [`lucas_binomial`]; assumes `p` prime.
pub(crate) fn lucas_mod(a: u64, b: u64, p: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut acc = 1u64;
    while b > 0 || a > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        acc = modp::mul(acc, small_binomial_mod(ad, bd, p), p);
        if acc == 0 {
            return 0;
        }
        a /= p;
        b /= p;
    }
    acc
}

/// `C(a, b) mod p` for digits `0 <= b <= a < p`.
fn small_binomial_mod(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let mut acc = 1u64;
    for i in 1..=b {
        // (a - b + i) / i, both factors below p
        acc = modp::mul(acc, a - b + i, p);
        acc = modp::mul(acc, modp::inv(i, p), p);
    }
    acc
}

/// Exact integer binomial coefficient, 0 for `k > n`.
pub fn integer_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    acc
}

/// `C(n, k)` as an element of the given coefficient field.
pub fn binomial_in(desc: &FieldDescriptor, n: u64, k: u64) -> Scalar {
    match desc {
        FieldDescriptor::Rationals => {
            Scalar::Rational(num_rational::BigRational::from_integer(integer_binomial(n, k)))
        }
        FieldDescriptor::Prime(p) => Scalar::residue(*p, lucas_mod(n, k, *p)),
        FieldDescriptor::RationalFunctions(p) => {
            Scalar::from_i64(desc, lucas_mod(n, k, *p) as i64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pascal-triangle rows mod p, the independent oracle for Lucas.
    fn pascal_rows_mod(max_n: usize, p: u64) -> Vec<Vec<u64>> {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![1]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = vec![0u64; n + 1];
            row[0] = 1;
            row[n] = 1;
            for k in 1..n {
                row[k] = modp::add(prev[k - 1], prev[k], p);
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn paper_values() {
        // C((3q-1)/2, (q-3)/2) = (q-1)/2 mod p, with q = p = 5
        assert_eq!(lucas_binomial(7, 1, 5).unwrap(), Scalar::residue(5, 2));
        // C((3q-1)/2, (q-1)/2) = 1 mod p
        assert_eq!(lucas_binomial(7, 2, 5).unwrap(), Scalar::residue(5, 1));
        // C(2q-1, 1+l) = -1 mod p for q = 5, l = 5
        assert_eq!(lucas_binomial(9, 6, 5).unwrap(), Scalar::residue(5, 4));
    }

    #[test]
    fn edge_cases() {
        for p in [3u64, 5, 7] {
            for n in [0u64, 1, 2, 17, 1000] {
                assert_eq!(lucas_binomial(n, 0, p).unwrap(), Scalar::residue(p, 1));
            }
            assert_eq!(lucas_binomial(3, 10, p).unwrap(), Scalar::residue(p, 0));
        }
    }

    #[test]
    fn matches_pascal_oracle_small() {
        for p in [3u64, 5, 7] {
            let rows = pascal_rows_mod(120, p);
            for n in 0..=120u64 {
                for k in 0..=n {
                    assert_eq!(
                        lucas_mod(n, k, p),
                        rows[n as usize][k as usize],
                        "C({n},{k}) mod {p}"
                    );
                }
                // above the diagonal
                assert_eq!(lucas_mod(n, n + 1, p), 0);
            }
        }
    }

    #[test]
    fn integer_binomial_values() {
        assert_eq!(integer_binomial(10, 5), BigInt::from(252));
        assert_eq!(integer_binomial(0, 0), BigInt::one());
        assert_eq!(integer_binomial(4, 9), BigInt::ZERO);
        // exceeds u64
        let big = integer_binomial(100, 50);
        assert_eq!(big.to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn rejects_non_prime_modulus() {
        assert!(lucas_binomial(5, 2, 4).is_err());
        assert!(lucas_binomial(5, 2, 2).is_err());
    }
}
