//! Exact-arithmetic toolkit for truncated graded Lie algebras of maximal
//! class over the rationals and over fields of odd characteristic.
//!
//! The crate provides:
//!
//! - [`scalar`]: canonical exact arithmetic in `Q`, `F_p`, and `F_p(t)`,
//! - [`binomial`]: binomial coefficients, exact and via Lucas' theorem,
//! - [`table`]: truncated bracket tables for algebras of type 1 and type 2,
//!   with Jacobi and maximal-class verification,
//! - [`constructions`]: builders for the named algebras and the semidirect
//!   matrix constructions,
//! - [`analysis`]: constituents, two-step centralizers, derivation lifts and
//!   deflation,
//! - [`classifier`]: exhaustive Jacobi-closure search over mu-sequences,
//! - [`io`]: the text formats used by the command line tool.

pub mod analysis;
pub mod binomial;
pub mod classifier;
pub mod constructions;
pub mod io;
pub mod poly;
pub mod scalar;
pub mod semidirect;
pub mod table;


pub use binomial::{integer_binomial, lucas_binomial};


pub use poly::Poly;
pub use scalar::{FieldDescriptor, FieldError, Scalar};
pub use table::{Element1, Element2, RawTable, Type1Table, Type2Table};
