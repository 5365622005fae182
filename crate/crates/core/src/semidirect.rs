//! The semidirect product `V + End(V)` over `F_p(t)` and the matrix
//! realizations built inside it.
//!
//! `V` is the space of row vectors of length `q`; an element is a pair
//! `(u, f)` of a vector and an endomorphism, with bracket
//! `[(u, f), (w, g)] = (u g - w f, f g - g f)`, so the vectors form an
//! abelian ideal. The generators are the weighted shift `E` (weight 1) and
//! the two-entry endomorphism `D` (weight 2); the chain `e_{i+1} = [e_i e_1]`
//! stays graded and the mu-sequence is read off by solving the
//! one-dimensional proportionality `[e_i e_2] = mu_i e_{i+2}`.

use crate::constructions::ConstructionError;
use crate::scalar::{FieldDescriptor, Scalar};
use crate::table::Type2Table;

/// Dense square matrix over `F_p(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    fn zero(field: &FieldDescriptor, n: usize) -> Matrix {
        Matrix { n, entries: vec![Scalar::zero(field); n * n] }
    }

    /// `c * identity`.
    pub fn scalar(field: &FieldDescriptor, n: usize, c: &Scalar) -> Matrix {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.n + j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let field = self.entries[0].descriptor();
        let mut out = Matrix::zero(&field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b).expect("uniform field");
                    let sum = out.get(i, j).add(&prod).expect("uniform field");
                    out.set(i, j, sum);
                }
            }
        }
        out
    }

    fn sub(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let diff = out.get(i, j).sub(other.get(i, j)).expect("uniform field");
                out.set(i, j, diff);
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }
}

fn row_times_matrix(field: &FieldDescriptor, row: &[Scalar], m: &Matrix) -> Vec<Scalar> {
    let n = m.n;
    let mut out = vec![Scalar::zero(field); n];
    for (k, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for j in 0..n {
            let b = m.get(k, j);
            if b.is_zero() {
                continue;
            }
            let prod = c.mul(b).expect("uniform field");
            out[j] = out[j].add(&prod).expect("uniform field");
        }
    }
    out
}

/// Element `(u, f)` of `V + End(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdElement {
    vec: Vec<Scalar>,
    endo: Matrix,
}

impl SdElement {
    fn bracket(&self, other: &SdElement, field: &FieldDescriptor) -> SdElement {
        let ug = row_times_matrix(field, &self.vec, &other.endo);
        let wf = row_times_matrix(field, &other.vec, &self.endo);
        let vec = ug
            .into_iter()
            .zip(wf)
            .map(|(a, b)| a.sub(&b).expect("uniform field"))
            .collect();
        SdElement { vec, endo: self.endo.commutator(&other.endo) }
    }

    fn is_zero(&self) -> bool {
        self.vec.iter().all(Scalar::is_zero) && self.endo.is_zero()
    }

    fn coords(&self) -> impl Iterator<Item = &Scalar> {
        self.vec.iter().chain(self.endo.entries.iter())
    }
}

fn require_prime(field: &FieldDescriptor) -> Result<u64, ConstructionError> {
    match field {
        FieldDescriptor::Prime(p) => Ok(*p),
        other => Err(ConstructionError::MatrixFieldKind(*other)),
    }
}

/// The weighted cyclic shift: `v_i E = v_{i+1}` for `i < q - 1`,
/// `v_{q-1} E = t v_0`.
fn shift_matrix(rf: &FieldDescriptor, q: usize) -> Matrix {
    let mut e = Matrix::zero(rf, q);
    for i in 0..q - 1 {
        e.set(i, i + 1, Scalar::one(rf));
    }
    e.set(q - 1, 0, Scalar::t(rf.characteristic()));
    e
}

/// `D` of the `q`-algebra construction: `v_0 D = v_2`, `v_{q-1} D = -t v_1`.
fn q_algebra_d(rf: &FieldDescriptor, q: usize) -> Matrix {
    let mut d = Matrix::zero(rf, q);
    d.set(0, 2, Scalar::one(rf));
    d.set(q - 1, 1, Scalar::t(rf.characteristic()).neg());
    d
}

/// Solve `lhs = mu * rhs` against the first nonzero coordinate of `rhs` and
/// verify every remaining coordinate.
fn proportionality(
    lhs: &SdElement,
    rhs: &SdElement,
    weight: usize,
) -> Result<Scalar, ConstructionError> {
    let pivot = rhs
        .coords()
        .find(|c| !c.is_zero())
        .ok_or(ConstructionError::Proportionality { weight })?;
    let lhs_at_pivot = lhs
        .coords()
        .zip(rhs.coords())
        .find(|(_, r)| !r.is_zero())
        .map(|(l, _)| l)
        .expect("pivot exists");
    let mu = lhs_at_pivot.div(pivot).expect("nonzero pivot");
    for (l, r) in lhs.coords().zip(rhs.coords()) {
        let expected = mu.mul(r).expect("uniform field");
        if *l != expected {
            return Err(ConstructionError::Proportionality { weight });
        }
    }
    Ok(mu)
}

/// Run the chain `e_{i+1} = [e_i e_1]` and extract the mu-sequence of the
/// algebra generated by `e_1`, `e_2`, as a table over `F_p`.
fn extract_table(
    p: u64,
    bound: usize,
    e1: SdElement,
    e2: SdElement,
) -> Result<Type2Table, ConstructionError> {
    let rf = FieldDescriptor::rational_functions(p)?;
    let prime = FieldDescriptor::prime(p)?;
    // chain[i] is e_{i+2}
    let mut chain = Vec::with_capacity(bound.saturating_sub(1));
    chain.push(e2.clone());
    for i in 2..bound {
        let next = chain[i - 2].bracket(&e1, &rf);
        if next.is_zero() {
            return Err(ConstructionError::Proportionality { weight: i + 1 });
        }
        chain.push(next);
    }
    let mut mu = Vec::new();
    for i in 3..=bound.saturating_sub(2) {
        let lhs = chain[i - 2].bracket(&e2, &rf);
        let value = proportionality(&lhs, &chain[i], i)?;
        let residue = value
            .as_residue()
            .ok_or(ConstructionError::Proportionality { weight: i })?;
        mu.push(Scalar::residue(p, residue));
    }
    Ok(Type2Table::derive(prime, bound, mu)?)
}

/// The algebra with first constituent of length `q + 1`, realized in
/// `V + End(V)` with `e_1 = E` and `e_2 = -1/(2t) v_1 - 1/2 D`.
pub fn q_algebra_matrix(
    field: &FieldDescriptor,
    q: u64,
    bound: usize,
) -> Result<Type2Table, ConstructionError> {
    let p = require_prime(field)?;
    crate::constructions::check_q_power(p, q)?;
    let rf = FieldDescriptor::rational_functions(p)?;
    let q = q as usize;
    let e1 = SdElement { vec: vec![Scalar::zero(&rf); q], endo: shift_matrix(&rf, q) };
    // -1/(2t) v_1 - 1/2 D
    let two = Scalar::from_i64(&rf, 2);
    let t = Scalar::t(p);
    let mut vec = vec![Scalar::zero(&rf); q];
    vec[1] = two.mul(&t).unwrap().invert().unwrap().neg();
    let half = two.invert().unwrap();
    let mut endo = q_algebra_d(&rf, q);
    for entry in &mut endo.entries {
        *entry = entry.mul(&half).unwrap().neg();
    }
    let e2 = SdElement { vec, endo };
    extract_table(p, bound, e1, e2)
}

/// The characteristic-3 family member `L(lambda)`, realized by the 3x3
/// construction with `e_1 = (E, 0)` and `e_2 = (D, (1/t) v_2)`.
pub fn l_lambda_matrix(
    field: &FieldDescriptor,
    lambda: &Scalar,
    bound: usize,
) -> Result<Type2Table, ConstructionError> {
    let p = require_prime(field)?;
    if p != 3 {
        return Err(ConstructionError::LambdaOutsideCharThree(*field));
    }
    let lam = lambda
        .as_residue()
        .filter(|_| lambda.descriptor() == *field)
        .ok_or_else(|| ConstructionError::LambdaField(lambda.clone(), *field))?;
    let rf = FieldDescriptor::rational_functions(3)?;
    let t = Scalar::t(3);
    let lam_t = Scalar::residue(3, lam); // lift the residue into F_3(t)
    let lam_t = Scalar::from_i64(&rf, lam_t.as_residue().unwrap() as i64);
    let e1 = SdElement { vec: vec![Scalar::zero(&rf); 3], endo: shift_matrix(&rf, 3) };
    let mut d = Matrix::zero(&rf, 3);
    d.set(0, 2, Scalar::one(&rf));
    d.set(1, 0, lam_t.mul(&t).unwrap());
    d.set(2, 1, Scalar::one(&rf).add(&lam_t).unwrap().mul(&t).unwrap().neg());
    let mut vec = vec![Scalar::zero(&rf); 3];
    vec[1] = t.invert().unwrap();
    let e2 = SdElement { vec, endo: d };
    extract_table(3, bound, e1, e2)
}

/// The commutator chain `[D E^i]` for `0 <= i <= q - 2`.
fn de_chain(p: u64, q: usize) -> Result<Vec<Matrix>, ConstructionError> {
    let rf = FieldDescriptor::rational_functions(p)?;
    let e = shift_matrix(&rf, q);
    let d = q_algebra_d(&rf, q);
    let mut chain = vec![d];
    for _ in 1..=q - 2 {
        let next = chain.last().unwrap().commutator(&e);
        chain.push(next);
    }
    Ok(chain)
}

/// Whether `[D E^{q-2}]` is exactly scalar multiplication by `t`.
pub fn de_power_is_t_identity(field: &FieldDescriptor, q: u64) -> Result<bool, ConstructionError> {
    let p = require_prime(field)?;
    crate::constructions::check_q_power(p, q)?;
    let rf = FieldDescriptor::rational_functions(p)?;
    let chain = de_chain(p, q as usize)?;
    let t_identity = Matrix::scalar(&rf, q as usize, &Scalar::t(p));
    Ok(*chain.last().unwrap() == t_identity)
}

/// Whether `[D E^i D] = 0` for all `0 <= i < q - 2`.
pub fn de_sandwiches_vanish(field: &FieldDescriptor, q: u64) -> Result<bool, ConstructionError> {
    let p = require_prime(field)?;
    crate::constructions::check_q_power(p, q)?;
    let rf = FieldDescriptor::rational_functions(p)?;
    let d = q_algebra_d(&rf, q as usize);
    let chain = de_chain(p, q as usize)?;
    Ok(chain[..q as usize - 2].iter().all(|m| m.commutator(&d).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::q_algebra;

    fn f(p: u64) -> FieldDescriptor {
        FieldDescriptor::prime(p).unwrap()
    }

    #[test]
    fn de_power_is_scalar_t() {
        assert!(de_power_is_t_identity(&f(5), 5).unwrap());
        assert!(de_power_is_t_identity(&f(3), 9).unwrap());
        assert!(de_power_is_t_identity(&f(3), 3).unwrap());
    }

    #[test]
    fn de_sandwiches_are_zero() {
        assert!(de_sandwiches_vanish(&f(5), 5).unwrap());
        assert!(de_sandwiches_vanish(&f(3), 9).unwrap());
        assert!(de_sandwiches_vanish(&f(7), 7).unwrap());
    }

    #[test]
    fn chain_elements_have_the_stated_shape() {
        // e_q = -1/(2t) v_{q-1} - (t/2) 1 and e_{q+1} = -1/2 v_0
        let p = 5;
        let q = 5usize;
        let rf = FieldDescriptor::rational_functions(p).unwrap();
        let e1 = SdElement { vec: vec![Scalar::zero(&rf); q], endo: shift_matrix(&rf, q) };
        let two = Scalar::from_i64(&rf, 2);
        let t = Scalar::t(p);
        let mut vec = vec![Scalar::zero(&rf); q];
        vec[1] = two.mul(&t).unwrap().invert().unwrap().neg();
        let half = two.invert().unwrap();
        let mut endo = q_algebra_d(&rf, q);
        for entry in &mut endo.entries {
            *entry = entry.mul(&half).unwrap().neg();
        }
        let e2 = SdElement { vec, endo };

        let mut chain = vec![e2.clone()];
        for _ in 3..=q + 1 {
            let next = chain.last().unwrap().bracket(&e1, &rf);
            chain.push(next);
        }
        let e_q = &chain[q - 2];
        let minus_t_half = t.mul(&half).unwrap().neg();
        assert_eq!(e_q.endo, Matrix::scalar(&rf, q, &minus_t_half));
        let expected_vec = two.mul(&t).unwrap().invert().unwrap().neg();
        assert_eq!(e_q.vec[q - 1], expected_vec);
        assert!(e_q.vec[..q - 1].iter().all(Scalar::is_zero));

        let e_q1 = &chain[q - 1];
        assert!(e_q1.endo.is_zero());
        assert_eq!(e_q1.vec[0], half.neg());
        assert!(e_q1.vec[1..].iter().all(Scalar::is_zero));
    }

    #[test]
    fn matrix_table_matches_mu_builder() {
        for (p, q, bound) in [(5u64, 5u64, 60usize), (3, 9, 60), (7, 7, 40)] {
            let got = q_algebra_matrix(&f(p), q, bound).unwrap();
            let expected = q_algebra(f(p), bound, q).unwrap();
            assert_eq!(got, expected, "p={p} q={q}");
        }
    }

    #[test]
    fn l_lambda_matrix_low_brackets() {
        // [e_3 e_2] = e_5 and [e_5 e_2] = lambda e_7
        for lam in 0..3u64 {
            let t = l_lambda_matrix(&f(3), &Scalar::residue(3, lam), 30).unwrap();
            assert!(t.mu(3).is_one(), "lambda={lam}");
            assert_eq!(*t.mu(5), Scalar::residue(3, lam));
        }
    }

    #[test]
    fn l_lambda_matrix_matches_mu_builder() {
        for lam in 0..3u64 {
            let lambda = Scalar::residue(3, lam);
            let got = l_lambda_matrix(&f(3), &lambda, 60).unwrap();
            let expected = crate::constructions::l_lambda(f(3), 60, &lambda).unwrap();
            assert_eq!(got, expected, "lambda={lam}");
        }
    }

    #[test]
    fn q_three_matrix_is_the_lambda_zero_member() {
        let got = q_algebra_matrix(&f(3), 3, 60).unwrap();
        let l0 = crate::constructions::l_lambda(f(3), 60, &Scalar::residue(3, 0)).unwrap();
        assert_eq!(got, l0);
    }

    #[test]
    fn matrix_construction_rejects_wrong_fields() {
        assert!(q_algebra_matrix(&FieldDescriptor::rationals(), 5, 20).is_err());
        assert!(l_lambda_matrix(&f(5), &Scalar::residue(5, 1), 20).is_err());
    }
}
