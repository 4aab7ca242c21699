//! Canonical quantum mechanics of the standard semicircle random variable.
//!
//! The one-mode interacting Fock space with constant Jacobi sequence
//! `ω_n = 1` is identified with `L²([-2,2], μ)`, `μ` the semicircle law.
//! Position is `X = a + a⁺`, momentum is `P = i(a⁺ - a)`, and `P` acts on
//! functions as `i` times the μ-Hilbert transform.
//!
//! Module map:
//!
//! * [`combinatorics`] – Catalan numbers, the inverse normal-order counts and
//!   sign-word enumeration.
//! * [`specfun`] – Bessel `J_n` and the confluent hypergeometric `₁F₁`.
//! * [`orthopoly`] – the monic Chebyshev bases `Φ_n`, `T_n` and Gauss rules.
//! * [`fock`] – truncated CAP operators and their algebra.
//! * [`hilbert`] – the μ-Hilbert transform and Kapteyn-type sums.
//! * [`evolution`] – coefficient tables and closed-form evolutions.
//! * [`oracle`] – matrix exponentials used as ground truth.
//! * [`verify`] – invariant suites shared by the CLI.

pub mod combinatorics;
mod dd;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hilbert;
pub mod oracle;
pub mod orthopoly;
pub mod quad;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
