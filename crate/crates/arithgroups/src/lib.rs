//! Exact computational group theory over the rationals.
//!
//! The crate provides the calculus used when working with arithmetic
//! subgroups of Chevalley groups by hand, mechanized: exact rational
//! matrices, elementary-matrix commutator identities, Bruhat
//! decomposition over `Q`, crystallographic root systems, adjoint
//! Chevalley representations with their commutator relations, decidable
//! subgroup membership oracles (congruence and Stallings-automaton
//! based), recurrence-direction probing, a derivation engine that
//! replays the elementary-matrix production pipeline for congruence
//! subgroups of `SL_n(Z)`, and floating-point projective dynamics
//! (proximality, fixed-point obstructions).
//!
//! Core linear algebra is generic over the scalar type via
//! [`scalar::Scalar`] / [`scalar::Field`]; the exact modules
//! instantiate it with [`Rational`], the numeric module with `f64`.
//!
//! All types are immutable values and all operations are pure, so
//! everything here is safe for unrestricted concurrent use.

pub mod chevalley;
pub mod commutant;
pub mod derive;
pub mod matrix;
pub mod oracles;
pub mod probe;
pub mod projective;
pub mod roots;
pub mod scalar;
pub mod sln;
pub mod textio;
pub mod word;

pub use matrix::Matrix;

/// Arbitrary-precision rational scalar: always stored reduced, with a
/// positive denominator, so structural equality is canonical equality.
pub type Rational = num_rational::BigRational;

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

/// Exact matrix over the rationals: the universal carrier for group
/// elements in the exact modules.
pub type RationalMatrix = Matrix<Rational>;

/// Binary64 matrix, used by the numeric projective-dynamics module.
pub type FloatMatrix = Matrix<f64>;

/// Version tag embedded in every JSON document the crate emits.
pub const SCHEMA_VERSION: u32 = 1;
