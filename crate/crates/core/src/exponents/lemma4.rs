//! The eight-way partition lemma: a constructive proof trace and a
//! brute-force verifier that knows nothing about the proof.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{check_u, difficult_hi, difficult_lo, in_difficult_interval, rat, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Singleton `{i}` plus two blocks of size at most 5, block sums at most 9/20.
    A,
    /// Two blocks of size at most 6, block sums at most 11/20.
    B,
}

/// Which branch of the proof produced the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofCase {
    /// `u_1 + … + u_5 <= 11/20`.
    Initial,
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    AtMost(Rational),
    OutsideOpen(Rational, Rational),
    SizeAtMost(usize),
    Partition,
}

/// One checked inequality: `value` against `kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub value: Rational,
    pub kind: CheckKind,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOutcome {
    pub variant: Variant,
    pub case: ProofCase,
    /// Least `k` with `u_1 + … + u_k >= 9/20`; absent in the initial branch.
    pub k: Option<usize>,
    /// 1-based singleton index (variant A only).
    pub singleton: Option<usize>,
    /// 1-based indices, increasing.
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub certificate: Vec<Check>,
}

impl PartitionOutcome {
    /// `Σ_{A1} u`.
    pub fn m_exponent(&self, u: &[Rational; 8]) -> Rational {
        block_sum(u, &self.a1)
    }

    /// `Σ_{A2} u`.
    pub fn n_exponent(&self, u: &[Rational; 8]) -> Rational {
        block_sum(u, &self.a2)
    }

    /// `u_i` for variant A, zero otherwise.
    pub fn l_exponent(&self, u: &[Rational; 8]) -> Rational {
        self.singleton.map_or_else(Rational::zero, |i| u[i - 1])
    }

    /// `b = |A2|`.
    pub fn b(&self) -> usize {
        self.a2.len()
    }

    pub fn all_checks_hold(&self) -> bool {
        self.certificate.iter().all(|c| c.holds)
    }

    /// Re-derives every invariant against `u`; used to reject outcomes
    /// paired with the wrong tuple.
    pub fn verify(&self, u: &[Rational; 8]) -> Result<()> {
        let fresh = certify(u, self.variant, self.singleton, &self.a1, &self.a2);
        if let Some(bad) = fresh.iter().find(|c| !c.holds) {
            return Err(Error::InconsistentOutcome(format!("{} fails: value {}", bad.label, bad.value)));
        }
        Ok(())
    }
}

fn block_sum(u: &[Rational; 8], idx: &[usize]) -> Rational {
    idx.iter().map(|&j| u[j - 1]).sum()
}

fn certify(u: &[Rational; 8], variant: Variant, singleton: Option<usize>, a1: &[usize], a2: &[usize]) -> Vec<Check> {
    let (size_cap, sum_cap) = match variant {
        Variant::A => (5, rat(9, 20)),
        Variant::B => (6, rat(11, 20)),
    };
    let mut seen = [0u8; 8];
    for &j in a1.iter().chain(a2).chain(singleton.iter()) {
        if (1..=8).contains(&j) {
            seen[j - 1] += 1;
        }
    }
    let partition_ok = seen.iter().all(|&c| c == 1)
        && a1.len() + a2.len() + singleton.map_or(0, |_| 1) == 8
        && (variant == Variant::A) == singleton.is_some();
    let mut checks = Vec::with_capacity(6);
    checks.push(Check {
        label: "partition of {1..8}".into(),
        value: Rational::zero(),
        kind: CheckKind::Partition,
        holds: partition_ok,
    });
    if !partition_ok {
        return checks;
    }
    for (name, block) in [("A1", a1), ("A2", a2)] {
        checks.push(Check {
            label: format!("|{name}|"),
            value: Rational::from(block.len() as i128),
            kind: CheckKind::SizeAtMost(size_cap),
            holds: block.len() <= size_cap,
        });
        let s = block_sum(u, block);
        checks.push(Check {
            label: format!("sum over {name}"),
            value: s,
            kind: CheckKind::AtMost(sum_cap),
            holds: s <= sum_cap,
        });
    }
    if let Some(i) = singleton {
        let ui = u[i - 1];
        checks.push(Check {
            label: format!("u_{i} outside (9/40, 1/4)"),
            value: ui,
            kind: CheckKind::OutsideOpen(difficult_lo(), difficult_hi()),
            holds: !in_difficult_interval(ui),
        });
    }
    checks
}

/// Follows the constructive proof branch by branch.
pub fn lemma4_partition(u: &[Rational; 8]) -> Result<PartitionOutcome> {
    check_u(u)?;
    let prefix = |k: usize| -> Rational { u[..k].iter().copied().sum() };
    let build = |variant, case, k, singleton: Option<usize>, a1: Vec<usize>| {
        let a2: Vec<usize> = (1..=8).filter(|j| !a1.contains(j) && Some(*j) != singleton).collect();
        let certificate = certify(u, variant, singleton, &a1, &a2);
        PartitionOutcome { variant, case, k, singleton, a1, a2, certificate }
    };

    let outcome = if prefix(5) <= rat(11, 20) {
        build(Variant::B, ProofCase::Initial, None, None, (1..=5).collect())
    } else {
        let k = (1..=8).find(|&k| prefix(k) >= rat(9, 20)).expect("u_1 + … + u_5 > 11/20 forces k <= 5");
        if !in_difficult_interval(u[0]) {
            if u[1] + u[3] + u[5] + u[7] > rat(9, 20) {
                build(Variant::B, ProofCase::I, Some(k), None, alloc::vec![2, 4, 6, 8])
            } else {
                build(Variant::A, ProofCase::II, Some(k), Some(1), alloc::vec![3, 5, 7])
            }
        } else if prefix(k) <= rat(11, 20) {
            build(Variant::B, ProofCase::III, Some(k), None, (1..=k).collect())
        } else {
            let mut a1 = alloc::vec![1];
            a1.extend(3..=k);
            build(Variant::A, ProofCase::IV, Some(k), Some(2), a1)
        }
    };
    if !outcome.all_checks_hold() {
        // Would mean the proof has a gap on this input.
        let bad = outcome.certificate.iter().find(|c| !c.holds).unwrap();
        return Err(Error::InconsistentOutcome(format!(
            "{:?} produced {:?} but {} fails (value {})",
            outcome.case, outcome.variant, bad.label, bad.value
        )));
    }
    Ok(outcome)
}

/// A partition found by exhaustive search. Indices are bitmasks over
/// positions `0..8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub variant: Variant,
    pub singleton: Option<usize>,
    pub a1_mask: u8,
    pub a2_mask: u8,
}

impl Witness {
    /// Same partition irrespective of which block is called `A1`.
    pub fn matches(&self, o: &PartitionOutcome) -> bool {
        let mask = |v: &[usize]| v.iter().fold(0u8, |m, &j| m | (1 << (j - 1)));
        let (m1, m2) = (mask(&o.a1), mask(&o.a2));
        self.variant == o.variant
            && self.singleton == o.singleton
            && ((self.a1_mask, self.a2_mask) == (m1, m2) || (self.a1_mask, self.a2_mask) == (m2, m1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub exists: bool,
    pub witness: Option<Witness>,
    pub witness_count: usize,
}

/// Scales the tuple to integers over a common denominator that also
/// carries 9/40, 1/4 and 11/20.
fn scaled(u: &[Rational; 8]) -> Option<([i128; 8], i128)> {
    let mut den: i128 = 40;
    for x in u {
        let d = *x.denom();
        den = num_integer::lcm(den, d);
        if den > 1 << 80 {
            return None;
        }
    }
    let mut out = [0i128; 8];
    for (o, x) in out.iter_mut().zip(u) {
        *o = x.numer() * (den / x.denom());
    }
    Some((out, den))
}

/// Every partition satisfying (a) or (b), found by checking all `2^8`
/// two-block splits and all `8 · 2^7` singleton-plus-two-block splits.
pub fn lemma4_witnesses(u: &[Rational; 8]) -> Result<Vec<Witness>> {
    check_u(u)?;
    let (v, den) = scaled(u).ok_or_else(|| Error::InvalidTuple("denominators too large for the oracle".into()))?;
    let sum = |mask: u8| -> i128 { (0..8).filter(|j| mask & (1 << j) != 0).map(|j| v[j]).sum() };
    let (cap_a, cap_b) = (9 * den / 20, 11 * den / 20);
    let (lo, hi) = (9 * den / 40, den / 4);
    let mut out = Vec::new();
    for m1 in 0u16..256 {
        let m1 = m1 as u8;
        let m2 = !m1;
        if m1.count_ones() <= 6 && m2.count_ones() <= 6 && sum(m1) <= cap_b && sum(m2) <= cap_b {
            out.push(Witness { variant: Variant::B, singleton: None, a1_mask: m1, a2_mask: m2 });
        }
    }
    for i in 0..8 {
        if v[i] > lo && v[i] < hi {
            continue;
        }
        let rest = !(1u8 << i);
        for m1 in 0u16..256 {
            let m1 = m1 as u8;
            if m1 & !rest != 0 {
                continue;
            }
            let m2 = rest & !m1;
            if m1.count_ones() <= 5 && m2.count_ones() <= 5 && sum(m1) <= cap_a && sum(m2) <= cap_a {
                out.push(Witness { variant: Variant::A, singleton: Some(i + 1), a1_mask: m1, a2_mask: m2 });
            }
        }
    }
    Ok(out)
}

pub fn lemma4_oracle(u: &[Rational; 8]) -> Result<OracleResult> {
    let all = lemma4_witnesses(u)?;
    Ok(OracleResult { exists: !all.is_empty(), witness: all.first().copied(), witness_count: all.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hundredths(v: [i128; 8]) -> [Rational; 8] {
        v.map(|x| rat(x, 100))
    }

    #[test]
    fn zero_tuple_takes_initial_branch() {
        let o = lemma4_partition(&[Rational::zero(); 8]).unwrap();
        assert_eq!((o.variant, o.case), (Variant::B, ProofCase::Initial));
        assert_eq!(o.a1, [1, 2, 3, 4, 5]);
        assert_eq!(o.a2, [6, 7, 8]);
    }

    #[test]
    fn flat_eighths_is_case_i() {
        let u = [rat(1, 8); 8];
        let o = lemma4_partition(&u).unwrap();
        assert_eq!((o.variant, o.case), (Variant::B, ProofCase::I));
        assert_eq!(o.a1, [2, 4, 6, 8]);
        assert_eq!(o.m_exponent(&u), rat(1, 2));
        assert_eq!(o.n_exponent(&u), rat(1, 2));
        let oracle = lemma4_witnesses(&u).unwrap();
        assert!(oracle.iter().any(|w| w.matches(&o)));
    }

    #[test]
    fn case_iii_example() {
        let u = hundredths([24, 24, 24, 24, 4, 0, 0, 0]);
        let o = lemma4_partition(&u).unwrap();
        assert_eq!((o.variant, o.case, o.k), (Variant::B, ProofCase::III, Some(2)));
        assert_eq!(o.a1, [1, 2]);
        assert_eq!(o.m_exponent(&u), rat(48, 100));
        assert_eq!(o.n_exponent(&u), rat(52, 100));
    }

    #[test]
    fn case_iv_example() {
        let u = hundredths([24, 20, 20, 12, 8, 6, 5, 5]);
        let o = lemma4_partition(&u).unwrap();
        assert_eq!((o.variant, o.case, o.k), (Variant::A, ProofCase::IV, Some(3)));
        assert_eq!(o.singleton, Some(2));
        assert_eq!(o.a1, [1, 3]);
        assert_eq!(o.a2, [4, 5, 6, 7, 8]);
        assert_eq!(o.m_exponent(&u), rat(44, 100));
        assert_eq!(o.n_exponent(&u), rat(36, 100));
        assert!(o.all_checks_hold());
    }

    #[test]
    fn case_ii_example() {
        // u_1 = 1/4 sits on the closed end, so it is admissible as a singleton.
        let u = [rat(1, 4), rat(1, 5), rat(1, 10), rat(1, 10), rat(1, 10), rat(1, 10), rat(1, 20), rat(1, 20)];
        let o = lemma4_partition(&u).unwrap();
        assert_eq!((o.variant, o.case), (Variant::A, ProofCase::II));
        assert_eq!((o.singleton, o.a1.as_slice()), (Some(1), &[3, 5, 7][..]));
    }

    #[test]
    fn rejects_bad_input() {
        let mut u = [rat(1, 8); 8];
        u[0] = rat(1, 4);
        assert!(lemma4_partition(&u).is_err());
        assert!(lemma4_oracle(&u).is_err());
    }

    #[test]
    fn verify_rejects_foreign_tuple() {
        let u = hundredths([24, 20, 20, 12, 8, 6, 5, 5]);
        let o = lemma4_partition(&u).unwrap();
        let other = hundredths([24, 24, 24, 24, 4, 0, 0, 0]);
        assert!(o.verify(&u).is_ok());
        assert!(matches!(o.verify(&other), Err(Error::InconsistentOutcome(_))));
    }
}
