//! Exact computations on the Berkovich affine and projective line.
//!
//! Every magnitude handled by this crate is an exact power `β^q` of a base
//! `β > 1` with rational exponent `q`, or the distinguished zero. Nothing is
//! ever rounded: seminorms, diameters, Fubini–Study derivatives and
//! tropical envelopes are computed with arbitrary precision rationals.
//!
//! Two computable valued fields are available:
//!
//! * `puiseux`: finite Puiseux polynomials `Σ c_q t^q` over `Q` with
//!   `|t| = β^{-1}` (residue characteristic zero);
//! * `padic`: the rationals with the `p`-adic absolute value, `β = p`
//!   (residue characteristic `p`).
//!
//! The theory these routines mirror is stated over a complete algebraically
//! closed field; both backends are subfields of such a field, so every
//! identity checked here holds verbatim after base change.

pub mod curves;
pub mod error;
pub mod field;
pub mod fsderiv;
pub mod metrics;
pub mod points;
pub mod rational;
pub mod tropic;
pub mod zalcman;

pub use error::{Error, Result};
pub use field::{AbsValue, Backend, FieldSpec, ValueGroup, ValuedScalar};
pub use points::{DiskPoint, Poly, ProjPoint};
pub use rational::Rational;
