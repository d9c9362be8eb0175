//! The Heath-Brown identity with `K = 4`:
//!
//! `Λ(n) = Σ_{j=1}^{4} (-1)^{j-1} C(4, j) Σ μ(m_1)…μ(m_j) log n_1`,
//!
//! the inner sum over `m_1…m_j n_1…n_j = n` with every `m_i <= x^{1/4}`,
//! valid for `n <= x`. Also the dyadic 8-factor grid and the integral that
//! removes `log n_1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::MultiplicativeTables;
use crate::math::{binomial, ln, CompensatedSum};
use crate::quad::Adaptive;
use crate::report::BoundReport;
use crate::{Error, Result};

pub const K: u32 = 4;

/// One term of the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HbTerm {
    /// Number of `μ` factors (and of unweighted-or-log factors).
    pub j: u32,
    /// `(-1)^{j-1} C(4, j)`.
    pub sign_coefficient: i64,
    /// Positions `1..=8` carrying `μ`.
    pub mu_positions: Vec<usize>,
    /// Position carrying `log`.
    pub log_position: usize,
    /// Largest admissible `m_i`, i.e. `floor(x^{1/4})`.
    pub mu_cutoff: u64,
}

/// Largest `m` with `m^4 <= x`.
pub fn fourth_root_floor(x: u64) -> u64 {
    let mut m = libm::pow(x as f64, 0.25) as u64;
    while (m + 1).checked_pow(4).is_some_and(|v| v <= x) {
        m += 1;
    }
    while m > 0 && m.checked_pow(4).is_none_or(|v| v > x) {
        m -= 1;
    }
    m
}

pub fn hb_identity_terms(x: u64) -> Result<Vec<HbTerm>> {
    if x < 16 {
        return Err(Error::InvalidArgument(format!("Heath-Brown identity needs x >= 16, got {x}")));
    }
    let z = fourth_root_floor(x);
    Ok((1..=K)
        .map(|j| {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            HbTerm {
                j,
                sign_coefficient: sign * binomial(u64::from(K), u64::from(j)) as i64,
                mu_positions: (5..5 + j as usize).collect(),
                log_position: 1,
                mu_cutoff: z,
            }
        })
        .collect())
}

/// `a * b` (Dirichlet convolution) truncated to `1..=n`; index 0 unused.
fn convolve(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n + 1];
    for d in 1..=n {
        if a[d] == 0 {
            continue;
        }
        for k in 1..=n / d {
            out[d * k] += a[d] * b[k];
        }
    }
    out
}

/// Integer weights `W` with `R(n) = Σ_{d | n} log(d) W(n/d)`:
/// `W = Σ_j c_j · μ_z^{*j} * 1^{*(j-1)}`.
fn hb_weights(terms: &[HbTerm], n_max: usize, tables: &MultiplicativeTables) -> Vec<i64> {
    let z = terms[0].mu_cutoff as usize;
    let mut mu_z = vec![0i64; n_max + 1];
    for m in 1..=z.min(n_max) {
        mu_z[m] = i64::from(tables.mobius(m as u64));
    }
    let mut ones = vec![1i64; n_max + 1];
    ones[0] = 0;
    let mut delta = vec![0i64; n_max + 1];
    delta[1] = 1;

    let mut w = vec![0i64; n_max + 1];
    let mut mu_pow = delta.clone();
    let mut one_pow = delta;
    for t in terms {
        mu_pow = convolve(&mu_pow, &mu_z, n_max);
        if t.j > 1 {
            one_pow = convolve(&one_pow, &ones, n_max);
        }
        let wj = convolve(&mu_pow, &one_pow, n_max);
        for (acc, v) in w.iter_mut().zip(&wj) {
            *acc += t.sign_coefficient * v;
        }
    }
    w
}

/// `R(n)` for `n` in `1..=n_max`; index 0 is unused and zero.
pub fn reconstruct(x: u64, n_max: u64, tables: &MultiplicativeTables) -> Result<Vec<f64>> {
    if n_max > x || n_max > tables.limit() {
        return Err(Error::InvalidArgument(format!(
            "need n_max <= x and n_max <= table limit, got n_max = {n_max}, x = {x}"
        )));
    }
    let terms = hb_identity_terms(x)?;
    let n = n_max as usize;
    let w = hb_weights(&terms, n, tables);
    let mut acc = vec![CompensatedSum::new(); n + 1];
    for d in 2..=n {
        let ld = ln(d as f64);
        for k in 1..=n / d {
            if w[k] != 0 {
                acc[d * k].add(ld * w[k] as f64);
            }
        }
    }
    Ok(acc.iter().map(CompensatedSum::value).collect())
}

/// `|R(n) - Λ(n)|` for `n` in `1..=n_max` (index 0 unused).
pub fn hb_residuals(x: u64, n_max: u64, tables: &MultiplicativeTables) -> Result<Vec<f64>> {
    let r = reconstruct(x, n_max, tables)?;
    Ok(r.iter()
        .enumerate()
        .map(|(n, &v)| if n == 0 { 0.0 } else { (v - tables.von_mangoldt(n as u64)).abs() })
        .collect())
}

/// `lhs` = worst `|R(n) - Λ(n)| / (1 + log n)`, `rhs` = `1e-9`.
pub fn verify_hb_identity(x: u64, n_max: u64, tables: &MultiplicativeTables) -> Result<BoundReport> {
    let res = hb_residuals(x, n_max, tables)?;
    let (mut worst, mut worst_n, mut max_abs) = (0.0f64, 1u64, 0.0f64);
    for (n, &r) in res.iter().enumerate().skip(1) {
        let scaled = r / (1.0 + ln(n as f64));
        max_abs = max_abs.max(r);
        if scaled > worst {
            worst = scaled;
            worst_n = n as u64;
        }
    }
    Ok(BoundReport::new("Heath-Brown identity residual", worst, 1e-9)
        .with("x", x as f64)
        .with("n_max", n_max as f64)
        .with("worst_n", worst_n as f64)
        .with("max_abs_residual", max_abs))
}

/// One position of a dyadic box: `{1}` or `(2^e, 2^{e+1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DyadicSize {
    /// The interval containing only `1`, written `[1, 2)`; counts as `N = 1`.
    Degenerate,
    Dyadic(u8),
}

impl DyadicSize {
    /// `log2 N` for the product constraint.
    pub fn log2_n(self) -> u32 {
        match self {
            Self::Degenerate => 0,
            Self::Dyadic(e) => u32::from(e),
        }
    }

    /// Integers in the interval, as `lo..=hi`.
    pub fn range(self) -> (u64, u64) {
        match self {
            Self::Degenerate => (1, 1),
            Self::Dyadic(e) => ((1u64 << e) + 1, 1u64 << (e + 1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicTuple {
    pub sizes: [DyadicSize; 8],
}

impl DyadicTuple {
    /// Largest `j` with position `j` or `4 + j` non-degenerate (0 if none).
    pub fn active_terms(&self) -> u32 {
        (1..=4)
            .rev()
            .find(|&j| self.sizes[j - 1] != DyadicSize::Degenerate || self.sizes[j + 3] != DyadicSize::Degenerate)
            .map_or(0, |j| j as u32)
    }

    /// Sum of the identity coefficients of the terms this box occurs in.
    pub fn coefficient(&self) -> i64 {
        let k = self.active_terms().max(1);
        (k..=K)
            .map(|j| {
                let s = if j % 2 == 1 { 1 } else { -1 };
                s * binomial(u64::from(K), u64::from(j)) as i64
            })
            .sum()
    }

    /// `∏ N_i <= x` and `2 N_i <= x^{1/4}` for `i > 4`, given `s = floor(log2 x)`.
    pub fn satisfies(&self, s: u32) -> bool {
        let total: u32 = self.sizes.iter().map(|d| d.log2_n()).sum();
        total <= s
            && self.sizes[4..].iter().all(|d| match d {
                DyadicSize::Degenerate => true,
                DyadicSize::Dyadic(e) => 4 * (u32::from(*e) + 1) <= s,
            })
    }
}

/// `floor(log2 x)`.
pub fn floor_log2(x: f64) -> u32 {
    assert!(x >= 1.0);
    let mut s = 0u32;
    while libm::ldexp(1.0, s as i32 + 1) <= x {
        s += 1;
    }
    s
}

#[derive(Debug, Clone)]
pub struct DyadicGrid {
    pub x: f64,
    pub tuples: Vec<DyadicTuple>,
    /// `count / (log x)^8`.
    pub empirical_c: f64,
}

fn check_grid_x(x: f64) -> Result<u32> {
    if !(x >= 256.0) {
        return Err(Error::InvalidArgument(format!("dyadic grid needs x >= 2^8, got {x}")));
    }
    Ok(floor_log2(x))
}

/// Number of admissible boxes, without materializing them.
pub fn dyadic_count(x: f64) -> Result<u64> {
    let s = check_grid_x(x)? as usize;
    let mu_max = (s / 4).saturating_sub(1);
    // ways[t] = number of ways to pick one position with log2 N = t
    let mut free = vec![0u64; s + 1];
    let mut small = vec![0u64; s + 1];
    free[0] = 2; // degenerate or (1, 2]
    small[0] = 2;
    for t in 1..=s {
        free[t] = 1;
        if t <= mu_max {
            small[t] = 1;
        }
    }
    let mut dist = vec![0u64; s + 1];
    dist[0] = 1;
    for i in 0..8 {
        let ways = if i < 4 { &free } else { &small };
        let mut next = vec![0u64; s + 1];
        for (a, &da) in dist.iter().enumerate() {
            if da == 0 {
                continue;
            }
            for (t, &w) in ways.iter().enumerate().take(s + 1 - a) {
                next[a + t] += da * w;
            }
        }
        dist = next;
    }
    Ok(dist.iter().sum())
}

/// All admissible boxes in lexicographic order.
pub fn dyadic_grid(x: f64) -> Result<DyadicGrid> {
    let s = check_grid_x(x)?;
    let mut options: Vec<DyadicSize> = vec![DyadicSize::Degenerate];
    options.extend((0..=s).map(|e| DyadicSize::Dyadic(e as u8)));
    let mut tuples = Vec::new();
    let mut cur = [DyadicSize::Degenerate; 8];
    fill(0, 0, s, &options, &mut cur, &mut tuples);
    let l = ln(x);
    let empirical_c = tuples.len() as f64 / libm::pow(l, 8.0);
    Ok(DyadicGrid { x, tuples, empirical_c })
}

fn fill(pos: usize, used: u32, s: u32, options: &[DyadicSize], cur: &mut [DyadicSize; 8], out: &mut Vec<DyadicTuple>) {
    if pos == 8 {
        out.push(DyadicTuple { sizes: *cur });
        return;
    }
    for &opt in options {
        let t = opt.log2_n();
        if used + t > s {
            break;
        }
        if pos >= 4 {
            if let DyadicSize::Dyadic(e) = opt {
                if 4 * (u32::from(e) + 1) > s {
                    break;
                }
            }
        }
        cur[pos] = opt;
        fill(pos + 1, used + t, s, options, cur, out);
    }
}

/// Upper limit of the `v`-integral in the log-removal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogRemovalLimit {
    /// `2 N_1`: reconstructs `log n_1` exactly.
    Exact,
    /// `N_1`, as printed.
    Printed,
}

/// Compares `Σ f(n) log n` with `∫_1^U v^{-1} Σ_{n ∈ (max(v, N_1), 2N_1]} f(n) dv`.
///
/// `weights` lists `(n, f(n))` with `N_1 < n <= 2 N_1`. The right side is
/// integrated numerically piece by piece; the closed form
/// `Σ f(n) log min(U, n)` is reported as the parameter `closed_form`.
pub fn log_removal_check(n1: u64, weights: &[(u64, f64)], limit: LogRemovalLimit) -> Result<BoundReport> {
    if n1 < 1 {
        return Err(Error::InvalidArgument("N_1 must be at least 1".into()));
    }
    if let Some(&(n, _)) = weights.iter().find(|&&(n, _)| n <= n1 || n > 2 * n1) {
        return Err(Error::InvalidArgument(format!("weight at {n} lies outside (N_1, 2N_1]")));
    }
    let lhs: f64 = weights.iter().map(|&(n, f)| f * ln(n as f64)).collect::<CompensatedSum>().value();
    let upper = match limit {
        LogRemovalLimit::Exact => 2 * n1,
        LogRemovalLimit::Printed => n1,
    };
    let closed: f64 = weights.iter().map(|&(n, f)| f * ln(n.min(upper) as f64)).collect::<CompensatedSum>().value();

    // the integrand is constant / v between consecutive breakpoints
    let mut breaks: Vec<u64> = vec![1, n1.max(1), upper];
    breaks.extend(weights.iter().map(|&(n, _)| n).filter(|&n| n < upper));
    breaks.sort_unstable();
    breaks.dedup();
    let quad = Adaptive::new(16, 1e-13, 40);
    let mut rhs = CompensatedSum::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0] as f64, w[1] as f64);
        if b <= a || b > upper as f64 {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mass: f64 = weights.iter().filter(|&&(n, _)| n as f64 > mid.max(n1 as f64)).map(|&(_, f)| f).sum();
        if mass != 0.0 {
            rhs.add(mass * quad.integrate(|v| 1.0 / v, a, b)?);
        }
    }
    let rhs = rhs.value();
    let label = match limit {
        LogRemovalLimit::Exact => "log removal, upper limit 2N_1",
        LogRemovalLimit::Printed => "log removal, upper limit N_1",
    };
    Ok(BoundReport::new(label, lhs, rhs)
        .with("N_1", n1 as f64)
        .with("closed_form", closed)
        .with("difference", lhs - rhs))
}
