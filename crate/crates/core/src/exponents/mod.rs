//! Exact-rational exponent bookkeeping.
//!
//! Sizes are written as powers of `x`: `N_j = x^{u_j}`, `Q = x^θ`, `T = x^τ`.
//! Everything here is `Ratio<i128>`; no floating point is used.

use alloc::format;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::{Error, Result};

pub mod cases;
pub mod ledger;
pub mod lemma4;
pub mod scan;

pub use cases::{case_bounds, CaseBound, CaseId, FactorSource};
pub use ledger::{logpower_ledger, LedgerEntry, LogPowerLedger};
pub use lemma4::{lemma4_oracle, lemma4_partition, OracleResult, PartitionOutcome, ProofCase, Variant};
pub use scan::{grid_tuples, polytope_scan, GridStep, ScanResult};

pub type Rational = Ratio<i128>;

pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

/// `9/40`, the largest admissible `θ`.
pub fn theta_max() -> Rational {
    rat(9, 40)
}

/// Lower end of the difficult interval `(9/40, 1/4)`.
pub fn difficult_lo() -> Rational {
    rat(9, 40)
}

/// Upper end of the difficult interval `(9/40, 1/4)`.
pub fn difficult_hi() -> Rational {
    rat(1, 4)
}

/// `u ∈ (9/40, 1/4)`, open at both ends.
pub fn in_difficult_interval(u: Rational) -> bool {
    u > difficult_lo() && u < difficult_hi()
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i128>().map_err(|_| bad())?, d.trim().parse::<i128>().map_err(|_| bad())?),
        None => (s.parse::<i128>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(rat(n, d))
}

/// `(u_1, …, u_8, θ, τ)` with `u_1 >= … >= u_8 >= 0`, `Σ u <= 1`,
/// `0 <= θ <= 9/40`, `0 <= τ <= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentTuple {
    pub u: [Rational; 8],
    pub theta: Rational,
    pub tau: Rational,
}

impl ExponentTuple {
    pub fn new(u: [Rational; 8], theta: Rational, tau: Rational) -> Result<Self> {
        check_u(&u)?;
        if theta < Rational::zero() || theta > theta_max() {
            return Err(Error::InvalidTuple(format!("θ = {theta} outside [0, 9/40]")));
        }
        if tau < Rational::zero() || tau > Rational::one() {
            return Err(Error::InvalidTuple(format!("τ = {tau} outside [0, 1]")));
        }
        Ok(Self { u, theta, tau })
    }
}

/// Ordering, nonnegativity and `Σ u <= 1`.
pub fn check_u(u: &[Rational; 8]) -> Result<()> {
    if u[7] < Rational::zero() {
        return Err(Error::InvalidTuple(format!("u_8 = {} is negative", u[7])));
    }
    if let Some(j) = (0..7).find(|&j| u[j] < u[j + 1]) {
        return Err(Error::InvalidTuple(format!(
            "not nonincreasing: u_{} = {} < u_{} = {}",
            j + 1,
            u[j],
            j + 2,
            u[j + 1]
        )));
    }
    let total: Rational = u.iter().copied().sum();
    if total > Rational::one() {
        return Err(Error::InvalidTuple(format!("Σ u = {total} exceeds 1")));
    }
    Ok(())
}
