//! Builders for the named algebras: `a`, `m`, `m2`, the positive part of the
//! Witt algebra, the soluble algebra with first constituent of length `q+1`,
//! and the characteristic-3 family `L(lambda)`; plus the semidirect-product
//! matrix realizations of the latter two.

use thiserror::Error;

use crate::scalar::{FieldDescriptor, FieldError, Scalar};
use crate::semidirect;
use crate::table::{RawTable, TableError, Type1Table, Type2Table};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("this construction needs a field of positive characteristic, got {0}")]
    NeedsPositiveCharacteristic(FieldDescriptor),
    #[error("{q} is not a power of the field characteristic {p} (or is below 3)")]
    QNotAPrimePower { q: u64, p: u64 },
    #[error("L(lambda) requires characteristic 3, got {0}")]
    LambdaOutsideCharThree(FieldDescriptor),
    #[error("lambda {0} does not lie in the coefficient field {1}")]
    LambdaField(Scalar, FieldDescriptor),
    #[error("the matrix construction works over F_p, got {0}")]
    MatrixFieldKind(FieldDescriptor),
    #[error("[e_{weight} e_2] is not proportional to e_{0} in the semidirect product", weight + 2)]
    Proportionality { weight: usize },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A named construction plus its coefficient field and truncation bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub field: FieldDescriptor,
    pub bound: usize,
    pub name: ConstructionName,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstructionName {
    /// Type-1 algebra with abelian maximal ideal: delta identically zero.
    A,
    /// Type-2 algebra with abelian maximal ideal: mu identically zero.
    M,
    /// The metabelian algebra with `[e_i e_2] = e_{i+2}`: mu identically one.
    M2,
    /// Positive part of the Witt algebra, `[e_i e_j] = (i - j) e_{i+j}`.
    Witt,
    /// Soluble type-2 algebra with first constituent of length `q + 1`.
    QAlgebra { q: u64 },
    /// The characteristic-3 family with `[e_3 e_2] = e_5` and period-3 pattern.
    LLambda { lambda: Scalar },
    /// `QAlgebra` realized inside `V + End(V)` over `F_p(t)`.
    QAlgebraMatrix { q: u64 },
    /// `LLambda` realized by the 3x3 block-matrix construction.
    LLambdaMatrix { lambda: Scalar },
}

impl ConstructionName {
    pub fn label(&self) -> String {
        match self {
            ConstructionName::A => "a".into(),
            ConstructionName::M => "m".into(),
            ConstructionName::M2 => "m2".into(),
            ConstructionName::Witt => "witt".into(),
            ConstructionName::QAlgebra { q } => format!("q_algebra {q}"),
            ConstructionName::LLambda { lambda } => format!("l_lambda {lambda}"),
            ConstructionName::QAlgebraMatrix { q } => format!("q_algebra_matrix {q}"),
            ConstructionName::LLambdaMatrix { lambda } => format!("l_lambda_matrix {lambda}"),
        }
    }
}

/// Result of a construction: most algebras are type-2 tables, `a` is type 1,
/// and the Witt algebra keeps its raw `gamma(i, 1) = i - 1` column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltTable {
    Type2(Type2Table),
    Type1(Type1Table),
    Raw(RawTable),
}

impl BuiltTable {
    pub fn field(&self) -> &FieldDescriptor {
        match self {
            BuiltTable::Type2(t) => t.field(),
            BuiltTable::Type1(t) => t.field(),
            BuiltTable::Raw(t) => t.field(),
        }
    }

    pub fn bound(&self) -> usize {
        match self {
            BuiltTable::Type2(t) => t.bound(),
            BuiltTable::Type1(t) => t.bound(),
            BuiltTable::Raw(t) => t.bound(),
        }
    }

    pub fn as_type2(&self) -> Option<&Type2Table> {
        match self {
            BuiltTable::Type2(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_type1(&self) -> Option<&Type1Table> {
        match self {
            BuiltTable::Type1(t) => Some(t),
            _ => None,
        }
    }
}

pub fn build(spec: &ConstructionSpec) -> Result<BuiltTable, ConstructionError> {
    let field = spec.field;
    let bound = spec.bound;
    match &spec.name {
        ConstructionName::A => {
            let delta = vec![Scalar::zero(&field); bound.saturating_sub(2)];
            Ok(BuiltTable::Type1(Type1Table::derive(field, bound, delta)?))
        }
        ConstructionName::M => Ok(BuiltTable::Type2(from_mu_fn(field, bound, |_|
            Scalar::zero(&field))?)),
        ConstructionName::M2 => Ok(BuiltTable::Type2(from_mu_fn(field, bound, |_|
            Scalar::one(&field))?)),
        ConstructionName::Witt => {
            let table = RawTable::from_fn(field, bound, |i, j|
                Scalar::from_i64(&field, i as i64 - j as i64))?;
            Ok(BuiltTable::Raw(table))
        }
        ConstructionName::QAlgebra { q } => Ok(BuiltTable::Type2(q_algebra(field, bound, *q)?)),
        ConstructionName::LLambda { lambda } => {
            Ok(BuiltTable::Type2(l_lambda(field, bound, lambda)?))
        }
        ConstructionName::QAlgebraMatrix { q } => {
            Ok(BuiltTable::Type2(semidirect::q_algebra_matrix(&field, *q, bound)?))
        }
        ConstructionName::LLambdaMatrix { lambda } => {
            Ok(BuiltTable::Type2(semidirect::l_lambda_matrix(&field, lambda, bound)?))
        }
    }
}

fn from_mu_fn(
    field: FieldDescriptor,
    bound: usize,
    f: impl Fn(usize) -> Scalar,
) -> Result<Type2Table, ConstructionError> {
    let mu = if bound >= 4 { (3..=bound - 2).map(f).collect() } else { Vec::new() };
    Ok(Type2Table::derive(field, bound, mu)?)
}

/// Check that `q` is a power of the characteristic `p` with `q >= 3`.
fn check_q(field: &FieldDescriptor, q: u64) -> Result<u64, ConstructionError> {
    let p = field.characteristic();
    if p == 0 {
        return Err(ConstructionError::NeedsPositiveCharacteristic(*field));
    }
    check_q_power(p, q)?;
    Ok(p)
}

pub(crate) fn check_q_power(p: u64, q: u64) -> Result<(), ConstructionError> {
    let mut v = q;
    while v > 1 && v % p == 0 {
        v /= p;
    }
    if v != 1 || q < 3 {
        return Err(ConstructionError::QNotAPrimePower { q, p });
    }
    Ok(())
}

/// The mu-sequence of the soluble algebra with first constituent `q + 1`:
/// `mu_q = 1`, `mu_{q+1} = -1/2`, and `mu_{kq} = 1/2`, `mu_{kq+1} = -1/2` for
/// `k >= 2`, zero elsewhere. For `q = 3` this lands on the member of the
/// characteristic-3 family with `[e_5 e_2] = 0`.
pub fn q_algebra(
    field: FieldDescriptor,
    bound: usize,
    q: u64,
) -> Result<Type2Table, ConstructionError> {
    check_q(&field, q)?;
    let q = q as usize;
    let half = Scalar::from_i64(&field, 2).invert()?;
    let minus_half = half.neg();
    from_mu_fn(field, bound, |i| {
        if i == q {
            Scalar::one(&field)
        } else if i == q + 1 {
            minus_half.clone()
        } else if i > q + 1 && i % q == 0 {
            half.clone()
        } else if i > q + 1 && i % q == 1 {
            minus_half.clone()
        } else {
            Scalar::zero(&field)
        }
    })
}

/// The characteristic-3 family: `mu_3 = 1` and, from weight 4 on, the
/// period-3 pattern `1, lambda, -1 - lambda`.
pub fn l_lambda(
    field: FieldDescriptor,
    bound: usize,
    lambda: &Scalar,
) -> Result<Type2Table, ConstructionError> {
    if field.characteristic() != 3 {
        return Err(ConstructionError::LambdaOutsideCharThree(field));
    }
    if lambda.descriptor() != field {
        return Err(ConstructionError::LambdaField(lambda.clone(), field));
    }
    let minus_one_minus_lambda = Scalar::one(&field).add(lambda)?.neg();
    from_mu_fn(field, bound, |i| {
        if i == 3 {
            Scalar::one(&field)
        } else {
            match i % 3 {
                1 => Scalar::one(&field),
                2 => lambda.clone(),
                _ => minus_one_minus_lambda.clone(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldDescriptor {
        FieldDescriptor::prime(p).unwrap()
    }

    fn spec(field: FieldDescriptor, bound: usize, name: ConstructionName) -> ConstructionSpec {
        ConstructionSpec { field, bound, name }
    }

    #[test]
    fn q_algebra_residues_for_p5_q5() {
        let t = q_algebra(f(5), 40, 5).unwrap();
        assert_eq!(*t.mu(5), Scalar::residue(5, 1));
        assert_eq!(*t.mu(6), Scalar::residue(5, 2));
        assert_eq!(*t.mu(10), Scalar::residue(5, 3));
        assert_eq!(*t.mu(11), Scalar::residue(5, 2));
        for i in [3usize, 4, 7, 8, 9, 12, 13, 14, 17, 23] {
            assert!(t.mu(i).is_zero(), "mu_{i}");
        }
    }

    #[test]
    fn l_lambda_zero_pattern() {
        let field = f(3);
        let t = l_lambda(field, 30, &Scalar::zero(&field)).unwrap();
        assert_eq!(*t.mu(4), Scalar::residue(3, 1));
        assert_eq!(*t.mu(5), Scalar::residue(3, 0));
        assert_eq!(*t.mu(6), Scalar::residue(3, 2));
        assert_eq!(*t.mu(7), Scalar::residue(3, 1));
    }

    #[test]
    fn m_is_all_zero() {
        let built = build(&spec(f(3), 25, ConstructionName::M)).unwrap();
        let t = built.as_type2().unwrap();
        assert!(t.mu_slice().iter().all(Scalar::is_zero));
    }

    #[test]
    fn built_tables_pass_jacobi() {
        let cases: Vec<ConstructionSpec> = vec![
            spec(f(3), 60, ConstructionName::M),
            spec(f(5), 60, ConstructionName::M2),
            spec(FieldDescriptor::rationals(), 40, ConstructionName::M2),
            spec(f(5), 60, ConstructionName::QAlgebra { q: 5 }),
            spec(f(5), 60, ConstructionName::QAlgebra { q: 25 }),
            spec(f(3), 60, ConstructionName::QAlgebra { q: 9 }),
            spec(f(3), 60, ConstructionName::LLambda { lambda: Scalar::residue(3, 0) }),
            spec(f(3), 60, ConstructionName::LLambda { lambda: Scalar::residue(3, 1) }),
            spec(f(3), 60, ConstructionName::LLambda { lambda: Scalar::residue(3, 2) }),
            spec(FieldDescriptor::rationals(), 40, ConstructionName::Witt),
            spec(f(7), 30, ConstructionName::A),
        ];
        for c in cases {
            let built = build(&c).unwrap();
            let passed = match &built {
                BuiltTable::Type2(t) => t.jacobi_check().passed(),
                BuiltTable::Type1(t) => t.jacobi_check().passed(),
                BuiltTable::Raw(t) => t.jacobi_check().passed(),
            };
            assert!(passed, "jacobi failed for {}", c.name.label());
        }
    }

    #[test]
    fn l_lambda_over_rational_functions_is_consistent() {
        // lambda may be any element of the coefficient field, t included
        let field = FieldDescriptor::rational_functions(3).unwrap();
        let t = l_lambda(field, 40, &Scalar::t(3)).unwrap();
        assert!(t.jacobi_check().passed());
    }

    #[test]
    fn q_algebra_is_soluble_above_q() {
        // [e_m e_n] = 0 for m, n > q
        let t = q_algebra(f(5), 60, 5).unwrap();
        for m in 6..=57 {
            for n in 6..=57 {
                if m + n <= 60 && m != n {
                    assert!(t.coeff(m, n).is_zero(), "gamma({m},{n})");
                }
            }
        }
    }

    #[test]
    fn q_algebra_zero_windows() {
        // mu_{2tq + k} = 0 for 1 < k < q
        for (p, q, bound) in [(5u64, 5usize, 80usize), (3, 9, 80)] {
            let t = q_algebra(f(p), bound, q as u64).unwrap();
            for tt in 1.. {
                if 2 * tt * q + 2 >= bound {
                    break;
                }
                for k in 2..q {
                    let i = 2 * tt * q + k;
                    if i + 2 <= bound {
                        assert!(t.mu(i).is_zero(), "mu_{i} (t={tt}, k={k})");
                    }
                }
            }
        }
    }

    #[test]
    fn l_lambda_bracket_relations() {
        // [e_k e_3] = (1 - lambda) e_{k+3} for k >= 4; [e_k e_m] = 0 for k, m >= 4
        let field = f(3);
        for lam in 0..3u64 {
            let lambda = Scalar::residue(3, lam);
            let t = l_lambda(field, 40, &lambda).unwrap();
            let expected = Scalar::one(&field).sub(&lambda).unwrap();
            for k in 4..=36 {
                if k + 3 <= 40 {
                    assert_eq!(t.coeff(k, 3), expected, "gamma({k},3), lambda={lam}");
                }
            }
            for k in 4..=35 {
                for m in 4..=35 {
                    if k + m <= 40 && k != m {
                        assert!(t.coeff(k, m).is_zero(), "gamma({k},{m}), lambda={lam}");
                    }
                }
            }
        }
    }

    #[test]
    fn l_one_equals_m2() {
        let field = f(3);
        let l1 = l_lambda(field, 50, &Scalar::residue(3, 1)).unwrap();
        let m2 = build(&spec(field, 50, ConstructionName::M2)).unwrap();
        assert_eq!(&l1, m2.as_type2().unwrap());
    }

    #[test]
    fn q_three_lands_in_the_char_three_family() {
        // The q = 3 instance of the q-algebra pattern coincides with the
        // family member whose [e_5 e_2] vanishes.
        let field = f(3);
        let q3 = q_algebra(field, 60, 3).unwrap();
        let l0 = l_lambda(field, 60, &Scalar::residue(3, 0)).unwrap();
        assert_eq!(q3, l0);
    }

    #[test]
    fn witt_maximal_class_depends_on_characteristic() {
        let char0 = build(&spec(FieldDescriptor::rationals(), 100, ConstructionName::Witt)).unwrap();
        if let BuiltTable::Raw(t) = &char0 {
            assert!(t.maximal_class_check().passed());
        } else {
            panic!("witt must be raw");
        }
        let char5 = build(&spec(f(5), 40, ConstructionName::Witt)).unwrap();
        if let BuiltTable::Raw(t) = &char5 {
            assert_eq!(t.maximal_class_check().failure, Some(6));
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(matches!(
            build(&spec(f(5), 30, ConstructionName::LLambda { lambda: Scalar::residue(5, 1) })),
            Err(ConstructionError::LambdaOutsideCharThree(_))
        ));
        assert!(matches!(
            build(&spec(f(5), 30, ConstructionName::QAlgebra { q: 10 })),
            Err(ConstructionError::QNotAPrimePower { .. })
        ));
        assert!(matches!(
            build(&spec(FieldDescriptor::rationals(), 30, ConstructionName::QAlgebra { q: 5 })),
            Err(ConstructionError::NeedsPositiveCharacteristic(_))
        ));
        assert!(matches!(
            build(&spec(f(3), 30, ConstructionName::LLambda { lambda: Scalar::residue(5, 1) })),
            Err(ConstructionError::LambdaField(_, _))
        ));
    }
}
