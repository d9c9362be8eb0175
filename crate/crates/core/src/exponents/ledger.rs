//! Log-power bookkeeping: `K_2`, `K_3`, the Case 1 and variant B powers,
//! and the chain `22 - δ → 25 - δ → 26 - δ → 34 - δ`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use super::cases::{CaseEngine, FactorSource};
use super::{rat, Rational};
use crate::report::BoundReport;

/// `δ = 1/20`.
pub fn delta() -> Rational {
    rat(1, 20)
}

fn sq_sum7(b: i128) -> Rational {
    Rational::from((7 - b) * (7 - b) + b * b)
}

/// `K_2(b) = ((7-b)² + b²)(5/16 + 3/16) + 50/16 + 30/16 + 10/4`.
pub fn k2(b: i128) -> Rational {
    sq_sum7(b) * (rat(5, 16) + rat(3, 16)) + rat(50, 16) + rat(30, 16) + rat(10, 4)
}

/// `K_3(b) = ((7-b)² + b²)(7/16 + 3/48) + 70/16 + 30/48 + 27/12`.
///
/// The `3/48` comes from `(3(7-b)² + 15)/48`, the `1/48` power of the
/// third factor.
pub fn k3(b: i128) -> Rational {
    sq_sum7(b) * (rat(7, 16) + rat(3, 48)) + rat(70, 16) + rat(30, 48) + rat(27, 12)
}

/// `K_3` with `1/48` in place of `3/48`, for comparison only.
pub fn k3_alternative(b: i128) -> Rational {
    sq_sum7(b) * (rat(7, 16) + rat(1, 48)) + rat(70, 16) + rat(30, 48) + rat(27, 12)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub name: String,
    pub value: Rational,
    pub bound: Rational,
    /// `value <= bound`, or `value == bound` when `equality` is set.
    pub equality: bool,
}

impl LedgerEntry {
    fn at_most(name: String, value: Rational, bound: Rational) -> Self {
        Self { name, value, bound, equality: false }
    }

    fn equal(name: String, value: Rational, bound: Rational) -> Self {
        Self { name, value, bound, equality: true }
    }

    pub fn holds(&self) -> bool {
        if self.equality {
            self.value == self.bound
        } else {
            self.value <= self.bound
        }
    }

    pub fn tight(&self) -> bool {
        self.value == self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogPowerLedger {
    pub entries: Vec<LedgerEntry>,
}

impl LogPowerLedger {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(LedgerEntry::holds)
    }

    /// `lhs` is the largest `value - bound` (zero means some entry is tight).
    pub fn report(&self) -> BoundReport {
        let worst = self.entries.iter().map(|e| e.value - e.bound).max().unwrap_or_else(Rational::zero);
        let to_f = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
        let failing = self.entries.iter().filter(|e| !e.holds()).count();
        BoundReport::new("log-power ledger", to_f(worst).max(0.0), 1.0)
            .with("entries", self.entries.len() as f64)
            .with("failing", failing as f64)
            .with("max_value_minus_bound", to_f(worst))
    }
}

pub fn logpower_ledger() -> LogPowerLedger {
    let d = delta();
    let eng = CaseEngine::new(FactorSource::Printed);
    let mut entries = Vec::new();
    for b in 2..=5i128 {
        let (p1, p2) = eng.b1_products(b as usize);
        entries.push(LedgerEntry::at_most(format!("K2({b}) <= 22"), k2(b), rat(22, 1)));
        entries.push(LedgerEntry::equal(format!("K2({b}) from chain weights"), p1.log, k2(b)));
        entries.push(LedgerEntry::at_most(format!("K3({b}) <= 22 - 1/4"), k3(b), rat(22, 1) - rat(1, 4)));
        entries.push(LedgerEntry::equal(format!("K3({b}) from chain weights"), p2.log, k3(b)));
        entries.push(LedgerEntry::at_most(
            format!("B1 interpolated power 7/10 K2({b}) + 3/10 K3({b}) <= 22 - 3/40"),
            rat(7, 10) * k2(b) + rat(3, 10) * k3(b),
            rat(22, 1) - rat(3, 40),
        ));
        entries.push(LedgerEntry::at_most(
            format!("Case 1 power ((7-{b})^2 + {b}^2 + 10)/2 <= 20"),
            (sq_sum7(b) + 10) / 2,
            rat(20, 1),
        ));
    }
    for b in 2..=6i128 {
        let v = Rational::from((8 - b) * (8 - b) + b * b) / 2;
        entries.push(LedgerEntry::at_most(format!("variant B power ((8-{b})^2 + {b}^2)/2 <= 20"), v, rat(20, 1)));
    }
    entries.push(LedgerEntry::at_most("22 - 3/40 <= 22 - δ".into(), rat(22, 1) - rat(3, 40), rat(22, 1) - d));
    entries.push(LedgerEntry::at_most("Case 1 power 20 <= 22 - δ".into(), rat(20, 1), rat(22, 1) - d));
    entries.push(LedgerEntry::at_most("variant B power 20 <= 25 - δ".into(), rat(20, 1), rat(25, 1) - d));
    entries.push(LedgerEntry::equal("(22 - δ) + 3 = 25 - δ".into(), rat(22, 1) - d + 3, rat(25, 1) - d));
    entries.push(LedgerEntry::equal("(25 - δ) + 1 = 26 - δ".into(), rat(25, 1) - d + 1, rat(26, 1) - d));
    entries.push(LedgerEntry::equal("8 + (26 - δ) = 34 - δ".into(), rat(8, 1) + rat(26, 1) - d, rat(34, 1) - d));
    LogPowerLedger { entries }
}
