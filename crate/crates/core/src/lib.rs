//! Computational workbench for primes in arithmetic progressions with few
//! exceptional moduli.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. With `std` enabled, the per-segment, per-modulus and per-character
//! loops run on the rayon pool; results are always reduced in a deterministic
//! order so outputs do not depend on the worker count.
//!
//! Module map:
//!
//! * [`arith`] - segmented sieve tables (Λ support, μ, φ, smallest prime
//!   factor), factorization, `τ_b`, moduli sets.
//! * [`characters`] - Dirichlet character groups with exact root-of-unity
//!   values, conductors and inducing primitive characters.
//! * [`progressions`] - Chebyshev sums in progressions, `E*`, `E†`, the
//!   character-expansion residual and the exceptional-moduli scan.
//! * [`heath_brown`] - the K = 4 Heath-Brown identity, dyadic 8-factor grid and
//!   the log-factor removal integral.
//! * [`dirichlet_poly`] - Dirichlet polynomials and empirical checkers for the
//!   mean-value, fourth-moment, large-value and divisor-moment inequalities.
//! * [`exponents`] - constructive partition lemma, exact-rational case bounds,
//!   polytope certificate and log-power ledger.
//! * [`perron`] - truncated Perron integrals and the horizontal-segment bound.

#![cfg_attr(not(feature = "std"), no_std)]
// Index loops mirror the sieve recurrences; `!(a < b)` tests also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod arith;
pub mod characters;
pub mod dirichlet_poly;
mod error;
pub mod exponents;
pub mod heath_brown;
pub mod math;
pub mod par;
pub mod perron;
pub mod progressions;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
pub use report::BoundReport;
