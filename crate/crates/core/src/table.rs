//! Truncated graded bracket tables.
//!
//! A type-2 truncation is determined by its mu-sequence (`[e_i e_2] = mu_i
//! e_{i+2}` together with the convention `[e_i e_1] = e_{i+1}`); a type-1
//! truncation by its delta-sequence (`[v_i y] = delta_i v_{i+1}` together with
//! `[v_i x] = v_{i+1}`). Everything else is derived through the Jacobi
//! identity with the chain generator, `[z [w x]] = [[z w] x] - [[z x] w]`.
//! The Witt algebra does not fit the chain convention and is handled as a
//! [`RawTable`] with an explicit `gamma(i, 1)` column.
//!
//! Brackets whose result weight exceeds the bound are zero inside
//! [`Type2Table::jacobi_check`] and friends (the truncation is the quotient by
//! the ideal of higher weight), while the public element-level `bracket`
//! reports an overflow error.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::binomial::binomial_in;
use crate::scalar::{FieldDescriptor, FieldError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("weight bound {found} is too small, need at least {need}")]
    BoundTooSmall { found: usize, need: usize },
    #[error("expected {expected} structure coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("coefficient for weight {0} lies in the wrong field")]
    CoefficientField(usize),
    #[error("bracket result weight {weight} exceeds the truncation bound {bound}")]
    WeightOverflow { weight: usize, bound: usize },
    #[error("element does not belong to the table's field {0}")]
    ElementField(FieldDescriptor),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Outcome of a Jacobi scan: either a pass, or the lexicographically first
/// failing triple with its residual scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiReport<T> {
    pub triples_checked: u64,
    pub failure: Option<(T, Scalar)>,
}

impl<T> JacobiReport<T> {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Outcome of the maximal-class check: the first weight `w` at which
/// `[L_w L_1]` fails to span `L_{w+1}`, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalClassReport {
    pub failure: Option<usize>,
}

impl MaximalClassReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn validate_coeffs(
    field: &FieldDescriptor,
    coeffs: &[Scalar],
    expected: usize,
    first_weight: usize,
) -> Result<(), TableError> {
    if coeffs.len() != expected {
        return Err(TableError::CoefficientCount { expected, found: coeffs.len() });
    }
    for (k, c) in coeffs.iter().enumerate() {
        if c.descriptor() != *field {
            return Err(TableError::CoefficientField(first_weight + k));
        }
    }
    Ok(())
}

/// Fill the `gamma(i, j)` columns for `j >= 3` from the `j = 2` column using
/// `gamma(i, j) = gamma(i, j-1) - gamma(i+1, j-1)`.
///
/// `rows[i][j-2]` holds `gamma(i, j)` for `2 <= j < i`, `i + j <= bound`; on
/// entry only the `j = 2` entries are present.
fn complete_rows(rows: &mut [Vec<Scalar>], bound: usize) {
    let get = |rows: &[Vec<Scalar>], i: usize, j: usize| -> Scalar {
        // total lookup for i, j >= 2 with entries up to column j present
        if i == j {
            let any = rows
                .iter()
                .find_map(|r| r.first())
                .expect("nonempty table");
            return Scalar::zero(&any.descriptor());
        }
        if i > j {
            rows[i][j - 2].clone()
        } else {
            rows[j][i - 2].neg()
        }
    };
    for j in 3..=bound / 2 {
        for i in (j + 1)..=(bound - j) {
            let a = get(rows, i, j - 1);
            let b = get(rows, i + 1, j - 1);
            let value = a.sub(&b).expect("uniform field in table");
            debug_assert_eq!(rows[i].len(), j - 2);
            rows[i].push(value);
        }
    }
}

/// A truncated algebra of type 2, generated by `e_1` and `e_2` with
/// one-dimensional components; determined by its mu-sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type2Table {
    field: FieldDescriptor,
    bound: usize,
    mu: Vec<Scalar>,
    rows: Vec<Vec<Scalar>>,
}

impl Type2Table {
    /// Derive the full bracket table from the mu-sequence. `mu[k]` is the
    /// coefficient of weight `3 + k`; the sequence must cover exactly the
    /// weights `3..=bound-2`.
    pub fn derive(
        field: FieldDescriptor,
        bound: usize,
        mu: Vec<Scalar>,
    ) -> Result<Type2Table, TableError> {
        if bound < 4 {
            return Err(TableError::BoundTooSmall { found: bound, need: 4 });
        }
        let expected = bound.saturating_sub(4);
        validate_coeffs(&field, &mu, expected, 3)?;
        let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); bound + 1];
        for (k, value) in mu.iter().enumerate() {
            rows[3 + k].push(value.clone());
        }
        complete_rows(&mut rows, bound);
        Ok(Type2Table { field, bound, mu, rows })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `mu_i` for `3 <= i <= bound - 2`.
    pub fn mu(&self, i: usize) -> &Scalar {
        &self.mu[i - 3]
    }

    pub fn mu_slice(&self) -> &[Scalar] {
        &self.mu
    }

    /// Range of weights carrying a mu coefficient.
    pub fn mu_weights(&self) -> std::ops::RangeInclusive<usize> {
        3..=self.bound - 2
    }

    /// Total structure-constant lookup: `[e_i e_j] = coeff(i, j) e_{i+j}`
    /// for `i, j >= 1`, `i + j <= bound`.
    pub fn coeff(&self, i: usize, j: usize) -> Scalar {
        assert!(i >= 1 && j >= 1 && i + j <= self.bound, "coeff({i},{j}) out of range");
        if i == j {
            Scalar::zero(&self.field)
        } else if j == 1 {
            Scalar::one(&self.field)
        } else if i == 1 {
            Scalar::one(&self.field).neg()
        } else if i > j {
            self.rows[i][j - 2].clone()
        } else {
            self.rows[j][i - 2].neg()
        }
    }

    /// Scan every basis triple `i < j < k` with `i + j + k <= bound`
    /// (including triples containing `e_1`) for a nonzero Jacobi residual.
    pub fn jacobi_check(&self) -> JacobiReport<(usize, usize, usize)> {
        jacobi_scan_gamma(self.bound, &self.field, |i, j| self.coeff(i, j))
    }

    /// `gamma(i, 1) = 1` by convention, so the generation chain always holds.
    pub fn maximal_class_check(&self) -> MaximalClassReport {
        MaximalClassReport { failure: None }
    }

    pub fn basis(&self, weight: usize) -> Element2 {
        assert!(weight >= 1 && weight <= self.bound);
        Element2::basis(&self.field, weight)
    }

    /// Bilinear bracket of two elements; errors if any product weight would
    /// exceed the truncation bound.
    pub fn bracket(&self, u: &Element2, v: &Element2) -> Result<Element2, TableError> {
        self.check_element(u)?;
        self.check_element(v)?;
        for (&wu, _) in &u.terms {
            for (&wv, _) in &v.terms {
                if wu + wv > self.bound {
                    return Err(TableError::WeightOverflow { weight: wu + wv, bound: self.bound });
                }
            }
        }
        Ok(self.bracket_trunc(u, v))
    }

    /// Bracket under truncation semantics: products of weight above the bound
    /// are dropped.
    pub fn bracket_trunc(&self, u: &Element2, v: &Element2) -> Element2 {
        let mut acc = Element2::zero(&self.field);
        for (&wu, cu) in &u.terms {
            for (&wv, cv) in &v.terms {
                if wu + wv > self.bound || wu == wv {
                    continue;
                }
                let c = cu
                    .mul(cv)
                    .and_then(|x| x.mul(&self.coeff(wu, wv)))
                    .expect("uniform field");
                acc.accumulate(wu + wv, c);
            }
        }
        acc
    }

    /// `[e_z [e_y e_1^n]]` evaluated with the right-normed sum formula
    /// `sum_i (-1)^i C(n, i) [e_z e_1^i e_y e_1^{n-i}]`; binomial coefficients
    /// are taken in the coefficient field (Lucas' theorem in characteristic
    /// `p`, exact integers in characteristic zero).
    pub fn right_normed_expand(
        &self,
        z_weight: usize,
        y_weight: usize,
        n: usize,
    ) -> Result<Element2, TableError> {
        let total = z_weight + y_weight + n;
        if total > self.bound {
            return Err(TableError::WeightOverflow { weight: total, bound: self.bound });
        }
        assert!(z_weight >= 1 && y_weight >= 1);
        let mut acc = Scalar::zero(&self.field);
        for i in 0..=n {
            if z_weight + i == y_weight {
                continue; // [e_w e_w] = 0
            }
            let mut term = binomial_in(&self.field, n as u64, i as u64)
                .mul(&self.coeff(z_weight + i, y_weight))
                .expect("uniform field");
            if i % 2 == 1 {
                term = term.neg();
            }
            acc = acc.add(&term).expect("uniform field");
        }
        let mut out = Element2::zero(&self.field);
        out.accumulate(total, acc);
        Ok(out)
    }

    fn check_element(&self, u: &Element2) -> Result<(), TableError> {
        if u.field != self.field {
            return Err(TableError::ElementField(u.field));
        }
        Ok(())
    }
}

/// Shared Jacobi scan for tables with one-dimensional components, driven by a
/// total structure-constant lookup.
fn jacobi_scan_gamma(
    bound: usize,
    field: &FieldDescriptor,
    coeff: impl Fn(usize, usize) -> Scalar,
) -> JacobiReport<(usize, usize, usize)> {
    let mut checked = 0u64;
    for i in 1..=bound {
        for j in (i + 1)..=bound {
            if i + j >= bound {
                break;
            }
            for k in (j + 1)..=(bound - i - j) {
                checked += 1;
                let t1 = coeff(i, j).mul(&coeff(i + j, k)).expect("uniform field");
                let t2 = coeff(j, k).mul(&coeff(j + k, i)).expect("uniform field");
                let t3 = coeff(k, i).mul(&coeff(k + i, j)).expect("uniform field");
                let residual = t1.add(&t2).and_then(|s| s.add(&t3)).expect("uniform field");
                if !residual.is_zero() {
                    return JacobiReport { triples_checked: checked, failure: Some(((i, j, k), residual)) };
                }
            }
        }
    }
    let _ = field;
    JacobiReport { triples_checked: checked, failure: None }
}

/// A truncated algebra of type 1: two-dimensional degree-1 component
/// `span(x, y)`, chain `v_2 = [y x]`, `v_{i+1} = [v_i x]`, and
/// `[v_i y] = delta_i v_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type1Table {
    field: FieldDescriptor,
    bound: usize,
    delta: Vec<Scalar>,
    rows: Vec<Vec<Scalar>>,
}

/// Basis vector of a type-1 table, ordered `x < y < v_2 < v_3 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Basis1 {
    X,
    Y,
    V(usize),
}

impl fmt::Display for Basis1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis1::X => write!(f, "x"),
            Basis1::Y => write!(f, "y"),
            Basis1::V(i) => write!(f, "v{i}"),
        }
    }
}

impl Type1Table {
    /// Derive the table from the delta-sequence. `delta[k]` is the
    /// coefficient of weight `2 + k`; the sequence covers `2..=bound-1`.
    pub fn derive(
        field: FieldDescriptor,
        bound: usize,
        delta: Vec<Scalar>,
    ) -> Result<Type1Table, TableError> {
        if bound < 3 {
            return Err(TableError::BoundTooSmall { found: bound, need: 3 });
        }
        let expected = bound - 2;
        validate_coeffs(&field, &delta, expected, 2)?;
        let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); bound + 1];
        for i in 3..=bound.saturating_sub(2) {
            // [v_i v_2] = (delta_i - delta_{i+1}) v_{i+2}
            let value = delta[i - 2].sub(&delta[i - 1]).expect("uniform field");
            rows[i].push(value);
        }
        complete_rows(&mut rows, bound);
        Ok(Type1Table { field, bound, delta, rows })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `delta_i` for `2 <= i <= bound - 1`.
    pub fn delta(&self, i: usize) -> &Scalar {
        &self.delta[i - 2]
    }

    pub fn delta_slice(&self) -> &[Scalar] {
        &self.delta
    }

    pub fn delta_weights(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.bound - 1
    }

    /// `[v_i v_j] = coeff_vv(i, j) v_{i+j}` for `i, j >= 2`, `i + j <= bound`.
    pub fn coeff_vv(&self, i: usize, j: usize) -> Scalar {
        assert!(i >= 2 && j >= 2 && i + j <= self.bound);
        if i == j {
            Scalar::zero(&self.field)
        } else if i > j {
            self.rows[i][j - 2].clone()
        } else {
            self.rows[j][i - 2].neg()
        }
    }

    /// Jacobi scan over all basis triples within the bound, including every
    /// mixed choice from the two-dimensional degree-1 component.
    pub fn jacobi_check(&self) -> JacobiReport<(Basis1, Basis1, Basis1)> {
        let mut checked = 0u64;
        let zero = Scalar::zero(&self.field);
        let fail = |checked, triple, residual| JacobiReport { triples_checked: checked, failure: Some((triple, residual)) };

        // (x, y, v_w): residual (delta_w - delta_{w+1}) - coeff_vv(w, 2)
        // via [[x y] v_w] + [[y v_w] x] + [[v_w x] y]
        for w in 2..=self.bound.saturating_sub(2) {
            checked += 1;
            let residual = self
                .coeff_vv(w, 2)
                .sub(self.delta(w))
                .and_then(|s| s.add(self.delta(w + 1)))
                .expect("uniform field");
            if !residual.is_zero() {
                return fail(checked, (Basis1::X, Basis1::Y, Basis1::V(w)), residual);
            }
        }

        // (x, v_i, v_j): the column recursion
        for i in 2..=self.bound {
            for j in (i + 1)..=self.bound {
                if 1 + i + j > self.bound {
                    break;
                }
                checked += 1;
                let residual = self
                    .coeff_vv(i, j)
                    .sub(&self.coeff_vv(i + 1, j))
                    .and_then(|s| s.sub(&self.coeff_vv(i, j + 1)))
                    .expect("uniform field");
                if !residual.is_zero() {
                    return fail(checked, (Basis1::X, Basis1::V(i), Basis1::V(j)), residual);
                }
            }
        }

        // (y, v_i, v_j): the derivation conditions on delta
        for i in 2..=self.bound {
            for j in (i + 1)..=self.bound {
                if 1 + i + j > self.bound {
                    break;
                }
                checked += 1;
                let t1 = self.delta(i).mul(&self.coeff_vv(i + 1, j)).expect("uniform field").neg();
                let t2 = self.coeff_vv(i, j).mul(self.delta(i + j)).expect("uniform field");
                let t3 = self.delta(j).mul(&self.coeff_vv(i, j + 1)).expect("uniform field");
                let residual = t1.add(&t2).and_then(|s| s.sub(&t3)).expect("uniform field");
                if !residual.is_zero() {
                    return fail(checked, (Basis1::Y, Basis1::V(i), Basis1::V(j)), residual);
                }
            }
        }

        // (v_i, v_j, v_k)
        for i in 2..=self.bound {
            for j in (i + 1)..=self.bound {
                if i + j >= self.bound {
                    break;
                }
                for k in (j + 1)..=(self.bound - i - j) {
                    checked += 1;
                    let t1 = self.coeff_vv(i, j).mul(&self.coeff_vv(i + j, k)).expect("uniform field");
                    let t2 = self.coeff_vv(j, k).mul(&self.coeff_vv(j + k, i)).expect("uniform field");
                    let t3 = self.coeff_vv(k, i).mul(&self.coeff_vv(k + i, j)).expect("uniform field");
                    let residual = t1.add(&t2).and_then(|s| s.add(&t3)).expect("uniform field");
                    if !residual.is_zero() {
                        return fail(checked, (Basis1::V(i), Basis1::V(j), Basis1::V(k)), residual);
                    }
                }
            }
        }
        let _ = zero;
        JacobiReport { triples_checked: checked, failure: None }
    }

    /// `[v_i x] = v_{i+1}` holds by convention, so the chain never breaks.
    pub fn maximal_class_check(&self) -> MaximalClassReport {
        MaximalClassReport { failure: None }
    }

    /// Bracket of two elements under truncation semantics.
    pub fn bracket_trunc(&self, u: &Element1, v: &Element1) -> Element1 {
        let f = &self.field;
        let mut acc = Element1::zero(f);
        // degree-1 x degree-1: (u_y v_x - u_x v_y) v_2
        if self.bound >= 2 {
            let c = u
                .y
                .mul(&v.x)
                .and_then(|a| u.x.mul(&v.y).map(|b| (a, b)))
                .and_then(|(a, b)| a.sub(&b))
                .expect("uniform field");
            acc.accumulate(2, c);
        }
        // degree-1 x v-part and v-part x degree-1
        for (&w, c) in &v.terms {
            if w + 1 > self.bound {
                continue;
            }
            // [x, v_w] = -v_{w+1}; [y, v_w] = -delta_w v_{w+1}
            let cx = u.x.mul(c).expect("uniform field").neg();
            acc.accumulate(w + 1, cx);
            let cy = u.y.mul(c).and_then(|s| s.mul(self.delta(w))).expect("uniform field").neg();
            acc.accumulate(w + 1, cy);
        }
        for (&w, c) in &u.terms {
            if w + 1 > self.bound {
                continue;
            }
            let cx = c.mul(&v.x).expect("uniform field");
            acc.accumulate(w + 1, cx);
            let cy = c.mul(&v.y).and_then(|s| s.mul(self.delta(w))).expect("uniform field");
            acc.accumulate(w + 1, cy);
        }
        // v x v
        for (&wu, cu) in &u.terms {
            for (&wv, cv) in &v.terms {
                if wu + wv > self.bound || wu == wv {
                    continue;
                }
                let c = cu
                    .mul(cv)
                    .and_then(|s| s.mul(&self.coeff_vv(wu, wv)))
                    .expect("uniform field");
                acc.accumulate(wu + wv, c);
            }
        }
        acc
    }
}

/// A table with explicitly stored `gamma(i, j)` for all `1 <= j < i`,
/// `i + j <= bound`; used for algebras that break the `[e_i e_1] = e_{i+1}`
/// convention, such as the positive part of the Witt algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    field: FieldDescriptor,
    bound: usize,
    rows: Vec<Vec<Scalar>>,
}

impl RawTable {
    pub fn from_fn(
        field: FieldDescriptor,
        bound: usize,
        mut gamma: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<RawTable, TableError> {
        if bound < 2 {
            return Err(TableError::BoundTooSmall { found: bound, need: 2 });
        }
        let mut rows: Vec<Vec<Scalar>> = vec![Vec::new(); bound + 1];
        for i in 2..=bound - 1 {
            for j in 1..i.min(bound - i + 1) {
                let value = gamma(i, j);
                if value.descriptor() != field {
                    return Err(TableError::CoefficientField(i + j));
                }
                debug_assert_eq!(rows[i].len(), j - 1);
                rows[i].push(value);
            }
        }
        Ok(RawTable { field, bound, rows })
    }

    pub fn from_entries(
        field: FieldDescriptor,
        bound: usize,
        entries: &BTreeMap<(usize, usize), Scalar>,
    ) -> Result<RawTable, TableError> {
        let zero = Scalar::zero(&field);
        RawTable::from_fn(field, bound, |i, j| {
            entries.get(&(i, j)).cloned().unwrap_or_else(|| zero.clone())
        })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn coeff(&self, i: usize, j: usize) -> Scalar {
        assert!(i >= 1 && j >= 1 && i + j <= self.bound);
        if i == j {
            Scalar::zero(&self.field)
        } else if i > j {
            self.rows[i][j - 1].clone()
        } else {
            self.rows[j][i - 1].neg()
        }
    }

    pub fn jacobi_check(&self) -> JacobiReport<(usize, usize, usize)> {
        jacobi_scan_gamma(self.bound, &self.field, |i, j| self.coeff(i, j))
    }

    /// Verify the generation chain `[L_w L_1] = L_{w+1}` for `w >= 2`, i.e.
    /// `gamma(w, 1) != 0` below the bound.
    pub fn maximal_class_check(&self) -> MaximalClassReport {
        for w in 2..self.bound {
            if self.coeff(w, 1).is_zero() {
                return MaximalClassReport { failure: Some(w) };
            }
        }
        MaximalClassReport { failure: None }
    }
}

/// Element of a type-2 truncation: a sparse combination of basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element2 {
    field: FieldDescriptor,
    terms: BTreeMap<usize, Scalar>,
}

impl Element2 {
    pub fn zero(field: &FieldDescriptor) -> Element2 {
        Element2 { field: *field, terms: BTreeMap::new() }
    }

    pub fn basis(field: &FieldDescriptor, weight: usize) -> Element2 {
        let mut terms = BTreeMap::new();
        terms.insert(weight, Scalar::one(field));
        Element2 { field: *field, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, weight: usize) -> Scalar {
        self.terms.get(&weight).cloned().unwrap_or_else(|| Scalar::zero(&self.field))
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.terms.iter().map(|(&w, c)| (w, c))
    }

    pub fn add(&self, other: &Element2) -> Result<Element2, FieldError> {
        if self.field != other.field {
            return Err(FieldError::DescriptorMismatch(self.field, other.field));
        }
        let mut out = self.clone();
        for (&w, c) in &other.terms {
            out.accumulate(w, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<Element2, FieldError> {
        let mut out = Element2::zero(&self.field);
        for (&w, coeff) in &self.terms {
            out.accumulate(w, coeff.mul(c)?);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Element2 {
        Element2 {
            field: self.field,
            terms: self.terms.iter().map(|(&w, c)| (w, c.neg())).collect(),
        }
    }

    fn accumulate(&mut self, weight: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&weight) {
            None => {
                self.terms.insert(weight, c);
            }
            Some(existing) => {
                let sum = existing.add(&c).expect("uniform field");
                if !sum.is_zero() {
                    self.terms.insert(weight, sum);
                }
            }
        }
    }
}

/// Element of a type-1 truncation: coefficients on `x` and `y` plus a sparse
/// combination of the chain vectors `v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element1 {
    field: FieldDescriptor,
    pub x: Scalar,
    pub y: Scalar,
    terms: BTreeMap<usize, Scalar>,
}

impl Element1 {
    pub fn zero(field: &FieldDescriptor) -> Element1 {
        Element1 {
            field: *field,
            x: Scalar::zero(field),
            y: Scalar::zero(field),
            terms: BTreeMap::new(),
        }
    }

    pub fn degree_one(field: &FieldDescriptor, x: Scalar, y: Scalar) -> Element1 {
        Element1 { field: *field, x, y, terms: BTreeMap::new() }
    }

    pub fn basis(field: &FieldDescriptor, b: Basis1) -> Element1 {
        let mut out = Element1::zero(field);
        match b {
            Basis1::X => out.x = Scalar::one(field),
            Basis1::Y => out.y = Scalar::one(field),
            Basis1::V(i) => {
                out.terms.insert(i, Scalar::one(field));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.terms.is_empty()
    }

    pub fn v_coeff(&self, weight: usize) -> Scalar {
        self.terms.get(&weight).cloned().unwrap_or_else(|| Scalar::zero(&self.field))
    }

    pub fn v_part_is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, weight: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&weight) {
            None => {
                self.terms.insert(weight, c);
            }
            Some(existing) => {
                let sum = existing.add(&c).expect("uniform field");
                if !sum.is_zero() {
                    self.terms.insert(weight, sum);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldDescriptor {
        FieldDescriptor::prime(5).unwrap()
    }

    fn constant_mu(field: &FieldDescriptor, bound: usize, value: i64) -> Vec<Scalar> {
        (3..=bound - 2).map(|_| Scalar::from_i64(field, value)).collect()
    }

    fn table_m(field: &FieldDescriptor, bound: usize) -> Type2Table {
        Type2Table::derive(*field, bound, constant_mu(field, bound, 0)).unwrap()
    }

    fn table_m2(field: &FieldDescriptor, bound: usize) -> Type2Table {
        Type2Table::derive(*field, bound, constant_mu(field, bound, 1)).unwrap()
    }

    #[test]
    fn zero_mu_gives_zero_table() {
        let t = table_m(&f5(), 30);
        for i in 2..=28 {
            for j in 2..=28 {
                if i + j <= 30 {
                    assert!(t.coeff(i, j).is_zero(), "gamma({i},{j})");
                }
            }
        }
        assert!(t.jacobi_check().passed());
    }

    #[test]
    fn all_ones_mu_gives_metabelian_table() {
        // [e_i e_j] = 0 for i, j >= 3
        let t = table_m2(&f5(), 40);
        assert!(t.coeff(4, 2).is_one());
        for i in 3..=37 {
            for j in 3..=37 {
                if i + j <= 40 && i != j {
                    assert!(t.coeff(i, j).is_zero(), "gamma({i},{j})");
                }
            }
        }
        assert!(t.jacobi_check().passed());
    }

    #[test]
    fn derivation_is_deterministic() {
        let field = f5();
        let mu: Vec<Scalar> = (3..=28).map(|i| Scalar::residue(5, i as u64 * 7 + 3)).collect();
        let a = Type2Table::derive(field, 30, mu.clone()).unwrap();
        let b = Type2Table::derive(field, 30, mu).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn antisymmetry_of_derived_table() {
        let field = f5();
        let mu: Vec<Scalar> = (3..=28).map(|i| Scalar::residue(5, (i as u64).pow(3) % 5)).collect();
        let t = Type2Table::derive(field, 30, mu).unwrap();
        for i in 1..=29 {
            for j in 1..=29 {
                if i + j <= 30 {
                    let sum = t.coeff(i, j).add(&t.coeff(j, i)).unwrap();
                    assert!(sum.is_zero(), "gamma({i},{j}) + gamma({j},{i})");
                }
            }
        }
    }

    #[test]
    fn missing_mu_rejected() {
        let field = f5();
        let err = Type2Table::derive(field, 30, constant_mu(&field, 29, 0)).unwrap_err();
        assert!(matches!(err, TableError::CoefficientCount { .. }));
    }

    #[test]
    fn inconsistent_mu_fails_jacobi_by_weight_eight() {
        // mu_3 = 1 forces mu_4 = 1; setting mu_4 = 0 must fail at low weight
        let field = f5();
        let mut mu = constant_mu(&field, 12, 0);
        mu[0] = Scalar::one(&field);
        let t = Type2Table::derive(field, 12, mu).unwrap();
        let report = t.jacobi_check();
        let ((i, j, k), _) = report.failure.expect("must fail");
        assert!(i + j + k <= 8, "failed at ({i},{j},{k})");
    }

    #[test]
    fn bracket_on_m2() {
        let t = table_m2(&f5(), 20);
        let e3 = t.basis(3);
        let e2 = t.basis(2);
        let result = t.bracket(&e3, &e2).unwrap();
        assert_eq!(result, t.basis(5));
        // antisymmetry on elements
        let u = t
            .basis(2)
            .add(&t.basis(5).scale(&Scalar::residue(5, 3)).unwrap())
            .unwrap();
        assert!(t.bracket(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn bracket_overflow_is_an_error() {
        let t = table_m2(&f5(), 10);
        let e6 = t.basis(6);
        let e5 = t.basis(5);
        assert!(matches!(
            t.bracket(&e6, &e5),
            Err(TableError::WeightOverflow { weight: 11, bound: 10 })
        ));
    }

    #[test]
    fn right_normed_expand_on_m2_vanishes() {
        // [e_5 [e_2 e_1^2]] = e_9 - 2 e_9 + e_9 = 0 over F_5
        let t = table_m2(&f5(), 20);
        let got = t.right_normed_expand(5, 2, 2).unwrap();
        assert!(got.is_zero());
        // and matches the nested-bracket evaluation
        let nested = t.bracket(&t.basis(5), &t.basis(4)).unwrap();
        assert_eq!(got, nested);
    }

    #[test]
    fn right_normed_expand_n_zero_is_plain_bracket() {
        let t = table_m2(&f5(), 20);
        assert_eq!(
            t.right_normed_expand(7, 2, 0).unwrap(),
            t.bracket(&t.basis(7), &t.basis(2)).unwrap()
        );
    }

    #[test]
    fn expand_matches_nested_brackets_on_consistent_tables() {
        // The sum formula is a consequence of the Jacobi identity, so it must
        // agree with nested evaluation on every Jacobi-consistent table.
        let f3 = FieldDescriptor::prime(3).unwrap();
        // period-3 pattern of L(lambda) for lambda = 2 over F_3
        let l2: Vec<Scalar> = (3..=38)
            .map(|i| {
                let v = match i % 3 {
                    0 if i > 3 => (-1i64 - 2).rem_euclid(3),
                    1 => 1,
                    2 if i > 3 => 2,
                    _ => 1, // mu_3 = 1
                };
                Scalar::from_i64(&f3, v)
            })
            .collect();
        let tables = [table_m(&f5(), 40), table_m2(&f5(), 40), Type2Table::derive(f3, 40, l2).unwrap()];
        for t in &tables {
            assert!(t.jacobi_check().passed());
            for (z, y, n) in [(2usize, 3usize, 4usize), (5, 2, 7), (9, 4, 11), (3, 2, 0), (2, 2, 30)] {
                let mut w = t.basis(y);
                for _ in 0..n {
                    w = t.bracket(&w, &t.basis(1)).unwrap();
                }
                let nested = t.bracket(&t.basis(z), &w).unwrap();
                assert_eq!(t.right_normed_expand(z, y, n).unwrap(), nested, "case ({z},{y},{n})");
            }
        }
    }

    #[test]
    fn witt_raw_table_checks() {
        let q = FieldDescriptor::rationals();
        let witt = RawTable::from_fn(q, 40, |i, j| Scalar::from_i64(&q, i as i64 - j as i64)).unwrap();
        assert!(witt.jacobi_check().passed());
        assert!(witt.maximal_class_check().passed());

        let f5 = f5();
        let witt5 = RawTable::from_fn(f5, 40, |i, j| Scalar::from_i64(&f5, i as i64 - j as i64)).unwrap();
        // (i - 1) = 0 mod 5 first at i = 6
        assert_eq!(witt5.maximal_class_check().failure, Some(6));
    }

    #[test]
    fn type1_zero_delta_is_consistent() {
        let field = FieldDescriptor::prime(3).unwrap();
        let delta: Vec<Scalar> = (2..=29).map(|_| Scalar::zero(&field)).collect();
        let t = Type1Table::derive(field, 30, delta).unwrap();
        assert!(t.jacobi_check().passed());
        assert!(t.maximal_class_check().passed());
        // the ideal generated by y is abelian: all v-v brackets vanish
        for i in 2..=27 {
            for j in 2..=27 {
                if i + j <= 30 {
                    assert!(t.coeff_vv(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn type1_bracket_chain() {
        let field = f5();
        let delta: Vec<Scalar> = (2..=19).map(|i| Scalar::residue(5, i as u64 % 5)).collect();
        let t = Type1Table::derive(field, 20, delta).unwrap();
        let x = Element1::basis(&field, Basis1::X);
        let y = Element1::basis(&field, Basis1::Y);
        // v_2 = [y x]
        let v2 = t.bracket_trunc(&y, &x);
        assert_eq!(v2, Element1::basis(&field, Basis1::V(2)));
        // [v_i y] = delta_i v_{i+1}
        let v7 = Element1::basis(&field, Basis1::V(7));
        let got = t.bracket_trunc(&v7, &y);
        assert_eq!(got.v_coeff(8), *t.delta(7));
    }
}
