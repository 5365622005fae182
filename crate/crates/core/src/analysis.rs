//! Structural analysis of truncated tables: constituent extraction, two-step
//! centralizers, the passage from an uncovered type-1 algebra to a type-2
//! algebra and its inverse (the weight-1 derivation lift), and deflation.

use thiserror::Error;

use crate::scalar::{FieldDescriptor, FieldError, Scalar};
use crate::table::{Basis1, Element1, TableError, Type1Table, Type2Table};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("no theory of constituents: [e_3 e_2] = {0} e_5 is nonzero")]
    NoConstituentTheory(Scalar),
    #[error("not liftable: constituent ending at weight {end} has type ({lambda}, {mu}) with mu != -lambda")]
    NotLiftable { end: usize, lambda: Scalar, mu: Scalar },
    #[error("{op} output fails the Jacobi check at ({}, {}, {}) with residual {residual}", triple.0, triple.1, triple.2)]
    OutputJacobi { op: &'static str, triple: (Basis1, Basis1, Basis1), residual: Scalar },
    #[error("z lies in the two-step centralizer C_{0}; spanning fails at weight {0}")]
    SpanningFails(usize),
    #[error("z must be a nonzero degree-1 element")]
    BadWitness,
    #[error("deflation needs bound >= 3p, got bound {bound} for p = {p}")]
    DeflationBound { bound: usize, p: u64 },
    #[error("deflation by {p} needs characteristic {p}, got field {field}")]
    DeflationCharacteristic { field: FieldDescriptor, p: u64 },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Length of the first constituent: `n + 1` for the smallest `n > 1` with
/// `mu_n != 0`, or infinite when mu vanishes on the whole range (the
/// algebra `m`). Both the raw weight `n` and the length are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstConstituent {
    Infinite,
    Finite { first_nonzero_weight: usize, length: usize },
}

/// A completed constituent: the pattern running from boundary `start` to
/// boundary `end = start + length`, of type `(lambda, mu) =
/// (mu_end, mu_{end+1})` with `lambda != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub start: usize,
    pub end: usize,
    pub length: usize,
    pub lambda: Scalar,
    pub mu: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituentSequence {
    pub first: FirstConstituent,
    pub body: Vec<Constituent>,
    pub analyzed_bound: usize,
}

/// Read the constituent sequence off the mu-sequence. Incomplete trailing
/// patterns at the truncation boundary are dropped rather than guessed.
pub fn constituents(table: &Type2Table) -> Result<ConstituentSequence, AnalysisError> {
    let bound = table.bound();
    if bound >= 5 && !table.mu(3).is_zero() {
        return Err(AnalysisError::NoConstituentTheory(table.mu(3).clone()));
    }
    let last = bound.saturating_sub(2);
    let first_nonzero = table.mu_weights().find(|&i| !table.mu(i).is_zero());
    let Some(n0) = first_nonzero else {
        return Ok(ConstituentSequence {
            first: FirstConstituent::Infinite,
            body: Vec::new(),
            analyzed_bound: bound,
        });
    };
    let mut body = Vec::new();
    let mut boundary = n0;
    loop {
        // next boundary: first nonzero mu at or beyond boundary + 2
        let next = ((boundary + 2)..=last).find(|&i| !table.mu(i).is_zero());
        let Some(n) = next else { break };
        if n + 1 > last {
            break; // type pair unreadable at the truncation edge
        }
        body.push(Constituent {
            start: boundary,
            end: n,
            length: n - boundary,
            lambda: table.mu(n).clone(),
            mu: table.mu(n + 1).clone(),
        });
        boundary = n;
    }
    Ok(ConstituentSequence {
        first: FirstConstituent::Finite { first_nonzero_weight: n0, length: n0 + 1 },
        body,
        analyzed_bound: bound,
    })
}

/// The witness `z` found by the uncovered scan: `x` itself or `x + c y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    X,
    XPlusCY(Scalar),
}

impl Witness {
    pub fn element(&self, field: &FieldDescriptor) -> Element1 {
        match self {
            Witness::X => Element1::degree_one(field, Scalar::one(field), Scalar::zero(field)),
            Witness::XPlusCY(c) => Element1::degree_one(field, Scalar::one(field), c.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizerReport {
    /// `delta_i` for the analyzed range; `C_i = span(y - delta_i x)`.
    pub delta: Vec<Scalar>,
    /// A degree-1 element outside every `C_i`, when one exists among the
    /// candidates `x`, `x + c y`.
    pub witness: Option<Witness>,
}

/// The two-step centralizer sequence of a type-1 table, together with an
/// uncovered witness. Candidates are tried in the deterministic order `x`,
/// then `x + c y` for `c` ascending in field order; in this encoding
/// `[v_i x] = v_{i+1}` never vanishes, so `x` itself always qualifies.
pub fn two_step_centralizers(table: &Type1Table) -> CentralizerReport {
    let delta = table.delta_slice().to_vec();
    // z = x + c y lies in C_i = span(y - delta_i x) iff 1 + c delta_i = 0;
    // z = x corresponds to c = 0 and is never trapped.
    let witness = Some(Witness::X);
    CentralizerReport { delta, witness }
}

/// Pass from an uncovered type-1 table to the type-2 table on `e_1 = z`,
/// `e_2 = [y_0 z]` with `y_0 = y - delta_2 x` spanning `C_2`.
pub fn derive_type2(table: &Type1Table, z: &Element1) -> Result<Type2Table, AnalysisError> {
    let field = *table.field();
    let bound = table.bound();
    let (a, b) = degree_one_parts(z)?;
    // spanning: [v_i z] = (a + b delta_i) v_{i+1} must be nonzero
    let mut chain_coeff = Vec::with_capacity(bound + 1); // c_i for 2 <= i <= bound
    let c2 = a.add(&table.delta(2).mul(&b)?)?;
    if c2.is_zero() {
        return Err(AnalysisError::SpanningFails(2));
    }
    // e_2 = [y_0 z] = c2 v_2 where y_0 = y - delta_2 x
    chain_coeff.push(c2.clone());
    for i in 2..bound {
        let step = a.add(&b.mul(table.delta(i))?)?;
        if step.is_zero() {
            return Err(AnalysisError::SpanningFails(i));
        }
        let prev = chain_coeff.last().unwrap();
        chain_coeff.push(prev.mul(&step)?);
    }
    let c = |i: usize| &chain_coeff[i - 2];
    let mut mu = Vec::new();
    for i in 3..=bound.saturating_sub(2) {
        // [e_i e_2] = c_i c_2 [v_i v_2] = mu_i e_{i+2}
        let value = c(i)
            .mul(&c2)?
            .mul(&table.coeff_vv(i, 2))?
            .div(c(i + 2))?;
        mu.push(value);
    }
    Ok(Type2Table::derive(field, bound, mu)?)
}

fn degree_one_parts(z: &Element1) -> Result<(Scalar, Scalar), AnalysisError> {
    if !z.v_part_is_zero() || (z.x.is_zero() && z.y.is_zero()) {
        return Err(AnalysisError::BadWitness);
    }
    Ok((z.x.clone(), z.y.clone()))
}

/// Lift a type-2 table whose constituents all have type `(lambda, -lambda)`
/// to the type-1 table on generators `e_1` and the weight-1 derivation `D`
/// with `e_1 D = -e_2`, `e_2 D = 0`. The output is re-verified mechanically;
/// an inconsistent extension is reported as an error.
pub fn lift_to_type1(table: &Type2Table) -> Result<Type1Table, AnalysisError> {
    let seq = constituents(table)?;
    for c in &seq.body {
        if !c.lambda.neg().eq(&c.mu) {
            return Err(AnalysisError::NotLiftable {
                end: c.end,
                lambda: c.lambda.clone(),
                mu: c.mu.clone(),
            });
        }
    }
    let field = *table.field();
    let bound = table.bound();
    // e_k D = d_k e_{k+1} with d_2 = 0 and d_{k+1} = d_k - mu_k
    let mut delta = Vec::with_capacity(bound - 2);
    let mut d = Scalar::zero(&field);
    delta.push(d.clone());
    for k in 2..bound - 1 {
        let mu_k = if table.mu_weights().contains(&k) {
            table.mu(k).clone()
        } else {
            Scalar::zero(&field)
        };
        d = d.sub(&mu_k)?;
        delta.push(d.clone());
    }
    let lifted = Type1Table::derive(field, bound, delta)?;
    let report = lifted.jacobi_check();
    if let Some((triple, residual)) = report.failure {
        return Err(AnalysisError::OutputJacobi { op: "lift", triple, residual });
    }
    Ok(lifted)
}

/// Deflate: restrict to the components of weight divisible by `p`, regraded,
/// with new degree-1 generators `e_p` (the y role) and `D = ad(e_1)^p` (the
/// x role); `delta_i = gamma(i p, p)`.
pub fn deflate(table: &Type2Table, p: u64) -> Result<Type1Table, AnalysisError> {
    if table.field().characteristic() != p {
        return Err(AnalysisError::DeflationCharacteristic { field: *table.field(), p });
    }
    let bound = table.bound();
    if bound < 3 * p as usize {
        return Err(AnalysisError::DeflationBound { bound, p });
    }
    let p = p as usize;
    let new_bound = bound / p;
    let delta: Vec<Scalar> = (2..=new_bound - 1).map(|i| table.coeff(i * p, p)).collect();
    let deflated = Type1Table::derive(*table.field(), new_bound, delta)?;
    let report = deflated.jacobi_check();
    if let Some((triple, residual)) = report.failure {
        return Err(AnalysisError::OutputJacobi { op: "deflate", triple, residual });
    }
    Ok(deflated)
}
