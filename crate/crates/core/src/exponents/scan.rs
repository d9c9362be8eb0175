//! Exhaustive scan over grid tuples, certifying every case bound against
//! `T^{39/40} x^{1/2}` at `τ ∈ {0, 1}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use super::cases::{CaseEngine, CaseId, FactorSource, Point};
use super::lemma4::lemma4_partition;
use super::{rat, Rational};
use crate::{par, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridStep {
    Eighth,
    Sixteenth,
    Fortieth,
    Eightieth,
}

impl GridStep {
    pub fn denominator(self) -> u32 {
        match self {
            GridStep::Eighth => 8,
            GridStep::Sixteenth => 16,
            GridStep::Fortieth => 40,
            GridStep::Eightieth => 80,
        }
    }

    pub fn as_rational(self) -> Rational {
        rat(1, self.denominator() as i128)
    }

    pub fn from_rational(step: Rational) -> Result<Self> {
        [GridStep::Eighth, GridStep::Sixteenth, GridStep::Fortieth, GridStep::Eightieth]
            .into_iter()
            .find(|g| g.as_rational() == step)
            .ok_or_else(|| Error::InvalidArgument(format!("grid step {step} is not one of 1/8, 1/16, 1/40, 1/80")))
    }
}

/// All nonincreasing `(k_1, …, k_8)` with `Σ k <= den`, in lexicographic order.
pub fn grid_tuples(den: u32) -> Vec<[u32; 8]> {
    fn rec(pos: usize, cap: u32, left: u32, cur: &mut [u32; 8], out: &mut Vec<[u32; 8]>) {
        if pos == 8 {
            out.push(*cur);
            return;
        }
        for k in 0..=cap.min(left) {
            cur[pos] = k;
            rec(pos + 1, k, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(0, den, den, &mut [0; 8], &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCase {
    pub case_id: CaseId,
    pub tuple: [Rational; 8],
    pub tau: Rational,
    pub slack: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub grid_step: Rational,
    pub theta: Rational,
    pub source: FactorSource,
    pub tuples: usize,
    pub bounds_checked: usize,
    pub partition_failures: usize,
    /// Tuples with at least one bound above target.
    pub violating_tuples: usize,
    pub worst: WorstCase,
    /// Largest slack seen per case.
    pub per_case: BTreeMap<CaseId, Rational>,
}

impl ScanResult {
    pub fn certified(&self) -> bool {
        self.partition_failures == 0 && self.violating_tuples == 0 && self.worst.slack <= Rational::zero()
    }
}

/// Larger slack wins; ties go to the lexicographically smaller tuple, then
/// the smaller case id, then `τ = 0`.
fn better(a: &WorstCase, b: &WorstCase) -> bool {
    match a.slack.cmp(&b.slack) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (a.tuple, a.case_id, a.tau) < (b.tuple, b.case_id, b.tau),
    }
}

struct Partial {
    tuples: usize,
    bounds: usize,
    failures: usize,
    violating: usize,
    worst: Option<WorstCase>,
    per_case: BTreeMap<CaseId, Rational>,
}

fn scan_group(eng: &CaseEngine, group: &[[u32; 8]], den: i128, theta: Rational) -> Partial {
    let mut acc = Partial { tuples: 0, bounds: 0, failures: 0, violating: 0, worst: None, per_case: BTreeMap::new() };
    let target = [rat(1, 2), rat(59, 40)];
    let taus = [Rational::zero(), Rational::one()];
    for k in group {
        acc.tuples += 1;
        let u = k.map(|v| rat(v as i128, den));
        let Ok(outcome) = lemma4_partition(&u) else {
            acc.failures += 1;
            continue;
        };
        let p = Point { m: outcome.m_exponent(&u), n: outcome.n_exponent(&u), l: outcome.l_exponent(&u), theta };
        let mut violated = false;
        for (case_id, form, _) in eng.forms(outcome.variant, outcome.b()) {
            let x = form.x.eval(&p);
            for (tau, tgt) in taus.iter().zip(target) {
                acc.bounds += 1;
                let slack = form.t * tau + x - tgt;
                violated |= slack > Rational::zero();
                let e = acc.per_case.entry(case_id).or_insert(slack);
                if slack > *e {
                    *e = slack;
                }
                let cand = WorstCase { case_id, tuple: u, tau: *tau, slack };
                if acc.worst.as_ref().is_none_or(|w| better(&cand, w)) {
                    acc.worst = Some(cand);
                }
            }
        }
        acc.violating += violated as usize;
    }
    acc
}

/// Scans every grid tuple with the given `θ`. `θ` is not clamped to
/// `[0, 9/40]`, so values above the range can be probed.
pub fn polytope_scan(step: GridStep, theta: Rational, source: FactorSource) -> Result<ScanResult> {
    if theta < Rational::zero() {
        return Err(Error::InvalidArgument(format!("θ = {theta} is negative")));
    }
    let den = step.denominator();
    let tuples = grid_tuples(den);
    // Parallel over the first two coordinates; groups are contiguous in
    // lexicographic order.
    let mut groups: Vec<&[[u32; 8]]> = Vec::new();
    let mut start = 0;
    for i in 1..=tuples.len() {
        if i == tuples.len() || tuples[i][..2] != tuples[start][..2] {
            groups.push(&tuples[start..i]);
            start = i;
        }
    }
    let eng = CaseEngine::new(source);
    let parts = par::map(&groups, |g| scan_group(&eng, g, den as i128, theta));

    let mut out = ScanResult {
        grid_step: step.as_rational(),
        theta,
        source,
        tuples: 0,
        bounds_checked: 0,
        partition_failures: 0,
        violating_tuples: 0,
        worst: WorstCase {
            case_id: CaseId::ASmallValues,
            tuple: [Rational::zero(); 8],
            tau: Rational::zero(),
            slack: Rational::zero(),
        },
        per_case: BTreeMap::new(),
    };
    let mut worst: Option<WorstCase> = None;
    for p in parts {
        out.tuples += p.tuples;
        out.bounds_checked += p.bounds;
        out.partition_failures += p.failures;
        out.violating_tuples += p.violating;
        for (id, s) in p.per_case {
            let e = out.per_case.entry(id).or_insert(s);
            if s > *e {
                *e = s;
            }
        }
        if let Some(w) = p.worst {
            if worst.as_ref().is_none_or(|cur| better(&w, cur)) {
                worst = Some(w);
            }
        }
    }
    out.worst = worst.expect("grid contains the zero tuple");
    Ok(out)
}
