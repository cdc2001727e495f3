//! Exact arithmetic for covers of tori over local fields.
//!
//! Everything here is integer arithmetic: lattices with a finite group
//! action, quadratic and bilinear forms, Hermite and Smith normal forms,
//! finite abelian groups presented as intermediate lattices, tame symbol
//! exponent tables, finite Heisenberg groups with exact cyclotomic
//! character theory, and the resulting commutator pairings on the
//! component groups of covers, both nonarchimedean and real.

pub mod abelian;
pub mod cyclotomic;
pub mod error;
pub mod heisenberg;
pub mod lattice;
pub mod matrix;
pub mod real;
pub mod symbols;
pub mod unramified;

pub use error::{Error, Result};
