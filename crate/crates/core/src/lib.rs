//! Exact machinery for deciding when factorial-like integers are represented
//! by binary forms.
//!
//! The library is organized around exponent vectors: every criterion reads
//! prime exponents of the right-hand side, never the materialized integer.
//!
//! * [`arith`] — integer primitives: factorization, sieves, valuations,
//!   integer roots, Kronecker symbols.
//! * [`formclass`] — binary forms, discriminants, Frobenius cycle types at
//!   good primes, root densities.
//! * [`quadrep`] — quadratic-form representability: exponent criteria, the
//!   full criterion for class-number-one fundamental discriminants, the
//!   three-squares test, principal norm forms.
//! * [`genfact`] — exponent profiles of `l!`, lcm/primorial/multinomial
//!   sequences, and ideal-norm products over quadratic or user-profiled
//!   fields.
//! * [`bhargava`] — generalized factorials over subsets of the integers via
//!   greedy p-orderings.
//! * [`hunt`] — searches and certificates: Brocard-style enumeration, per-l
//!   blocking certificates, empirical prime-gap checks.
//! * [`parse`] — the text grammar for forms, polynomials, and set
//!   descriptors shared with the CLI.

pub mod arith;
pub mod bhargava;
pub mod formclass;
pub mod genfact;
pub mod hunt;
pub mod limits;
pub mod parse;
pub mod quadrep;

mod error;
mod polyfp;

pub use error::{Error, Result};
pub use limits::Limits;
