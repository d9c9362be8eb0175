//! Dirichlet polynomials `S(s, χ) = Σ_{N < n <= N'} a_n χ(n) n^{-s}` and
//! empirical checks of the mean-value, fourth-moment, large-value and
//! divisor-moment inequalities.
//!
//! Every report sums over primitive characters of moduli `q < 2Q`
//! (including the trivial character mod 1) and over a well-spaced set
//! `J_χ ⊂ [-T, T]` picked greedily from a grid of step `1/4`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::arith::{mobius, tau_b};
use crate::characters::{primitive_characters, DirichletCharacter};
use crate::math::{cis, ln, powf, CompensatedSum, ComplexSum};
use crate::report::BoundReport;
use crate::{Error, Result};

/// `N' <= c N`.
pub const STRETCH: u64 = 2;
/// Default `x` in `L = log x` and in the `x^{9/20}` terms.
pub const DEFAULT_X_SCALE: f64 = 1_099_511_627_776.0; // 2^40
/// Sampling step for well-spaced selection.
pub const GRID_STEP: f64 = 0.25;
const RESYNC: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind {
    Unit,
    Mobius,
    /// `a_n` for `n = N+1, …, N'`.
    Explicit(Vec<f64>),
}

/// Coefficients on `(N, N']`, not yet twisted by a character.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpec {
    pub lo: u64,
    pub hi: u64,
    pub kind: CoefficientKind,
}

impl CoefficientSpec {
    pub fn new(lo: u64, hi: u64, kind: CoefficientKind) -> Result<Self> {
        if lo < 1 || hi < lo || hi > STRETCH * lo {
            return Err(Error::InvalidArgument(format!("interval ({lo}, {hi}] needs 1 <= N <= N' <= {STRETCH}N")));
        }
        if let CoefficientKind::Explicit(a) = &kind {
            if a.len() as u64 != hi - lo {
                return Err(Error::InvalidArgument(format!(
                    "{} explicit coefficients for an interval of length {}",
                    a.len(),
                    hi - lo
                )));
            }
        }
        Ok(Self { lo, hi, kind })
    }

    pub fn unit(lo: u64, hi: u64) -> Result<Self> {
        Self::new(lo, hi, CoefficientKind::Unit)
    }

    pub fn mobius(lo: u64, hi: u64) -> Result<Self> {
        Self::new(lo, hi, CoefficientKind::Mobius)
    }

    pub fn coefficient(&self, n: u64) -> f64 {
        if n <= self.lo || n > self.hi {
            return 0.0;
        }
        match &self.kind {
            CoefficientKind::Unit => 1.0,
            CoefficientKind::Mobius => f64::from(mobius(n)),
            CoefficientKind::Explicit(a) => a[(n - self.lo - 1) as usize],
        }
    }

    /// `G = Σ |a_n|^2`.
    pub fn g(&self) -> f64 {
        (self.lo + 1..=self.hi)
            .map(|n| {
                let a = self.coefficient(n);
                a * a
            })
            .collect::<CompensatedSum>()
            .value()
    }

    /// Coefficients `a_n log n`, the polynomial of `-S'`.
    pub fn log_weighted(&self) -> Self {
        let a = (self.lo + 1..=self.hi).map(|n| self.coefficient(n) * ln(n as f64)).collect();
        Self { lo: self.lo, hi: self.hi, kind: CoefficientKind::Explicit(a) }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    n: u64,
    coeff: Complex64,
    log_n: f64,
}

/// A coefficient family twisted by a character, ready to evaluate.
#[derive(Debug, Clone)]
pub struct DirichletPolynomial {
    spec: CoefficientSpec,
    chi: DirichletCharacter,
    terms: Vec<Term>,
    g: f64,
}

impl DirichletPolynomial {
    pub fn new(spec: CoefficientSpec, chi: DirichletCharacter) -> Self {
        let table = chi.value_table();
        let q = chi.modulus();
        let terms = (spec.lo + 1..=spec.hi)
            .filter_map(|n| {
                let a = spec.coefficient(n);
                let c = table[(n % q) as usize] * a;
                (c.re != 0.0 || c.im != 0.0).then(|| Term { n, coeff: c, log_n: ln(n as f64) })
            })
            .collect();
        let g = spec.g();
        Self { spec, chi, terms, g }
    }

    pub fn spec(&self) -> &CoefficientSpec {
        &self.spec
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Twisted coefficient `a_n χ(n)`.
    pub fn coefficient(&self, n: u64) -> Complex64 {
        let a = self.spec.coefficient(n);
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.chi.eval_u(n).to_complex() * a
    }

    /// `(n, a_n χ(n), log n)` over the nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (u64, Complex64, f64)> + '_ {
        self.terms.iter().map(|t| (t.n, t.coeff, t.log_n))
    }

    /// `Σ |a_n| n^{-σ}`, the trivial bound on `|S(σ + it)|`.
    pub fn abs_sum(&self, sigma: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm() * libm::exp(-sigma * t.log_n)).collect::<CompensatedSum>().value()
    }

    /// `S(σ + it, χ)`.
    pub fn eval(&self, sigma: f64, t: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for term in &self.terms {
            acc.add(term.coeff * libm::exp(-sigma * term.log_n) * cis(-t * term.log_n));
        }
        acc.value()
    }

    /// `S(σ + i(t0 + k h))` for `k = 0..count`, by rotating each term and
    /// resynchronizing every few steps.
    pub fn eval_grid(&self, sigma: f64, t0: f64, h: f64, count: usize) -> Vec<Complex64> {
        let mut acc = vec![ComplexSum::new(); count];
        for term in &self.terms {
            let base = term.coeff * libm::exp(-sigma * term.log_n);
            let step = cis(-h * term.log_n);
            let mut k = 0;
            while k < count {
                let mut z = base * cis(-(t0 + k as f64 * h) * term.log_n);
                let end = (k + RESYNC).min(count);
                for slot in &mut acc[k..end] {
                    slot.add(z);
                    z *= step;
                }
                k = end;
            }
        }
        acc.iter().map(ComplexSum::value).collect()
    }
}

/// `S(σ + it, χ)` for a coefficient family and character.
pub fn dp_eval(spec: &CoefficientSpec, chi: &DirichletCharacter, sigma: f64, t: f64) -> Complex64 {
    DirichletPolynomial::new(spec.clone(), chi.clone()).eval(sigma, t)
}

/// Points of `[-T, T]` pairwise at distance `>= 1`, with `|S|` at each.
#[derive(Debug, Clone, PartialEq)]
pub struct WellSpacedSet {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

/// Greedy 1-spaced selection: visit samples by decreasing magnitude (ties by
/// increasing `t`) and keep those at distance `>= 1` from all kept points.
pub fn greedy_spaced(ts: &[f64], mags: &[f64]) -> WellSpacedSet {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(ts[a].total_cmp(&ts[b])));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for i in order {
        let t = ts[i];
        let pos = kept.partition_point(|&(s, _)| s < t);
        let clear_left = pos == 0 || t - kept[pos - 1].0 >= 1.0;
        let clear_right = pos == kept.len() || kept[pos].0 - t >= 1.0;
        if clear_left && clear_right {
            kept.insert(pos, (t, mags[i]));
        }
    }
    WellSpacedSet { points: kept.iter().map(|&(t, _)| t).collect(), values: kept.iter().map(|&(_, v)| v).collect() }
}

/// Sample grid `-T, -T + 1/4, …, T`.
pub fn sample_grid(t_max: f64) -> (f64, usize) {
    let count = libm::floor(2.0 * t_max / GRID_STEP + 1e-9) as usize + 1;
    (-t_max, count)
}

/// Well-spaced set for one polynomial, maximizing `|S(σ + it)|`.
pub fn select_well_spaced(poly: &DirichletPolynomial, t_max: f64, sigma: f64) -> Result<WellSpacedSet> {
    if !(t_max >= 1.0) {
        return Err(Error::InvalidArgument(format!("T must be >= 1, got {t_max}")));
    }
    let (t0, count) = sample_grid(t_max);
    let ts: Vec<f64> = (0..count).map(|k| t0 + k as f64 * GRID_STEP).collect();
    let mags: Vec<f64> = poly.eval_grid(sigma, t0, GRID_STEP, count).iter().map(|z| z.norm()).collect();
    Ok(greedy_spaced(&ts, &mags))
}

/// Primitive characters of every modulus `q < 2Q`, by increasing `q`.
pub fn primitive_family(q_base: u64) -> Result<Vec<DirichletCharacter>> {
    let mut out = Vec::new();
    for q in 1..2 * q_base.max(1) {
        out.extend(primitive_characters(q)?);
    }
    Ok(out)
}

/// Every `(q, χ, t)` with `t ∈ J_χ`, and `|S(σ + it, χ)|` there.
#[derive(Debug, Clone)]
pub struct SampledTriples {
    pub sigma: f64,
    pub t_max: f64,
    /// `(q, index of χ in the family, t, |S|)`.
    pub triples: Vec<(u64, usize, f64, f64)>,
    sorted: Vec<f64>,
}

impl SampledTriples {
    pub fn collect(family: &[DirichletCharacter], spec: &CoefficientSpec, t_max: f64, sigma: f64) -> Result<Self> {
        let sets = crate::par::map(family, |chi| {
            let poly = DirichletPolynomial::new(spec.clone(), chi.clone());
            select_well_spaced(&poly, t_max, sigma)
        });
        let mut triples = Vec::new();
        for (idx, (chi, set)) in family.iter().zip(sets).enumerate() {
            let set = set?;
            for (&t, &v) in set.points.iter().zip(&set.values) {
                triples.push((chi.modulus(), idx, t, v));
            }
        }
        let mut sorted: Vec<f64> = triples.iter().map(|x| x.3).collect();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sigma, t_max, triples, sorted })
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// `Σ |S|^p` over the triples.
    pub fn power_sum(&self, p: i32) -> f64 {
        self.triples.iter().map(|x| libm::pow(x.3, f64::from(p))).collect::<CompensatedSum>().value()
    }

    /// `#{triples : |S| >= V}`.
    pub fn count_at_least(&self, v: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&m| m < v)
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.sorted
    }
}

fn log_scale(x_scale: f64) -> f64 {
    ln(x_scale)
}

fn base_report(label: &str, lhs: f64, rhs: f64, q: u64, t: f64, spec: &CoefficientSpec, x_scale: f64) -> BoundReport {
    BoundReport::new(label, lhs, rhs)
        .with("Q", q as f64)
        .with("T", t)
        .with("N", spec.lo as f64)
        .with("N_prime", spec.hi as f64)
        .with("x_scale", x_scale)
}

/// `Σ_{q<2Q} Σ*_χ Σ_{t∈J_χ} |S(it, χ)|^2` against `L (Q^2 T + N) G`.
pub fn mean_value_report(q_base: u64, t_max: f64, spec: &CoefficientSpec, x_scale: f64) -> Result<BoundReport> {
    let family = primitive_family(q_base)?;
    let samples = SampledTriples::collect(&family, spec, t_max, 0.0)?;
    Ok(mean_value_from(&samples, q_base, spec, x_scale))
}

pub fn mean_value_from(samples: &SampledTriples, q_base: u64, spec: &CoefficientSpec, x_scale: f64) -> BoundReport {
    let l = log_scale(x_scale);
    let g = spec.g();
    let qf = q_base as f64;
    let rhs = l * (qf * qf * samples.t_max + spec.lo as f64) * g;
    base_report("mean value (sigma = 0)", samples.power_sum(2), rhs, q_base, samples.t_max, spec, x_scale)
        .with("G", g)
        .with("triples", samples.len() as f64)
}

/// `Σ_{q<2Q} Σ*_χ Σ_{t∈J_χ} |S(1/2 + it, χ)|^4` against `Q^2 T L^{10}`.
pub fn fourth_moment_report(q_base: u64, t_max: f64, spec: &CoefficientSpec, x_scale: f64) -> Result<BoundReport> {
    if spec.kind != CoefficientKind::Unit {
        return Err(Error::InvalidArgument("the fourth-moment bound is stated for a_n = 1 only".into()));
    }
    let family = primitive_family(q_base)?;
    let samples = SampledTriples::collect(&family, spec, t_max, 0.5)?;
    Ok(fourth_moment_from(&samples, q_base, spec, x_scale))
}

/// As [`fourth_moment_report`], from triples sampled at `σ = 1/2`.
pub fn fourth_moment_from(samples: &SampledTriples, q_base: u64, spec: &CoefficientSpec, x_scale: f64) -> BoundReport {
    let l = log_scale(x_scale);
    let qf = q_base as f64;
    let rhs = qf * qf * samples.t_max * powf(l, 10.0);
    base_report("fourth moment (sigma = 1/2)", samples.power_sum(4), rhs, q_base, samples.t_max, spec, x_scale)
        .with("triples", samples.len() as f64)
}

/// `|B| = #{(q, χ, t) : |S(it, χ)| >= V}` against
/// `G N V^{-2} L^6 + G^3 N Q^2 T V^{-6} L^{18}`.
pub fn large_value_report(
    samples: &SampledTriples,
    q_base: u64,
    spec: &CoefficientSpec,
    v: f64,
    x_scale: f64,
) -> Result<BoundReport> {
    if !(v > 0.0) {
        return Err(Error::InvalidArgument(format!("V must be positive, got {v}")));
    }
    let l = log_scale(x_scale);
    let g = spec.g();
    let n = spec.lo as f64;
    let qf = q_base as f64;
    let rhs =
        g * n * powf(v, -2.0) * powf(l, 6.0) + g * g * g * n * qf * qf * samples.t_max * powf(v, -6.0) * powf(l, 18.0);
    Ok(base_report(
        "large values (sigma = 0)",
        samples.count_at_least(v) as f64,
        rhs,
        q_base,
        samples.t_max,
        spec,
        x_scale,
    )
    .with("V", v)
    .with("G", g)
    .with("triples", samples.len() as f64))
}

/// `N^{-1} Σ_{n <= 2N} τ_b(n)^2` against `L^{b^2 - 1}`.
pub fn divisor_moment_report(n: u64, b: u32, x_scale: f64) -> Result<BoundReport> {
    if !(1..=8).contains(&b) || n < 1 {
        return Err(Error::InvalidArgument(format!("need N >= 1 and 1 <= b <= 8, got N = {n}, b = {b}")));
    }
    let mut acc = CompensatedSum::new();
    for m in 1..=STRETCH * n {
        let t = tau_b(m, b)? as f64;
        acc.add(t * t);
    }
    let lhs = acc.value() / n as f64;
    let exp = f64::from(b * b - 1);
    let rhs = powf(log_scale(x_scale), exp);
    Ok(BoundReport::new("divisor moment", lhs, rhs)
        .with("N", n as f64)
        .with("b", f64::from(b))
        .with("x_scale", x_scale)
        .with("local_ratio", lhs / powf(ln((STRETCH * n) as f64), exp)))
}

/// Which bound handles `F_j` in the mixed second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedRoute {
    /// `N_j <= x^{9/40}`: mean-value bound with `G` from the divisor moment.
    MeanValue,
    /// `N_j > x^{1/4}`: fourth-moment bound through Cauchy-Schwarz.
    FourthMoment,
}

/// Routes `N_j` relative to the difficult interval `(x^{9/40}, x^{1/4}]`.
pub fn mixed_route(n_j: u64, x_scale: f64) -> Result<MixedRoute> {
    let ln_n = libm::log2(n_j as f64);
    let ln_x = libm::log2(x_scale);
    if 40.0 * ln_n <= 9.0 * ln_x {
        Ok(MixedRoute::MeanValue)
    } else if 4.0 * ln_n > ln_x {
        Ok(MixedRoute::FourthMoment)
    } else {
        Err(Error::DifficultInterval { n_j, x_scale })
    }
}

/// `Σ_{q<2Q} Σ*_χ Σ_{t∈J_χ} |F_j(1/2 + it, χ)|^2` against `x^{9/20} T L^{10}`.
///
/// Also reports the bound the chosen route gives (`route_bound`): the
/// mean-value form `L (Q^2 T + N) G`, or
/// `(#triples)^{1/2} (Q^2 T L^{10})^{1/2}`.
pub fn mixed_second_moment_report(
    q_base: u64,
    t_max: f64,
    spec: &CoefficientSpec,
    x_scale: f64,
) -> Result<(MixedRoute, BoundReport)> {
    let route = mixed_route(spec.lo, x_scale)?;
    let family = primitive_family(q_base)?;
    let samples = SampledTriples::collect(&family, spec, t_max, 0.5)?;
    let l = log_scale(x_scale);
    let qf = q_base as f64;
    let rhs = powf(x_scale, 9.0 / 20.0) * t_max * powf(l, 10.0);
    let route_bound = match route {
        MixedRoute::MeanValue => l * (qf * qf * t_max + spec.lo as f64) * spec.g(),
        MixedRoute::FourthMoment => libm::sqrt(samples.len() as f64 * qf * qf * t_max * powf(l, 10.0)),
    };
    let label = match route {
        MixedRoute::MeanValue => "mixed second moment via mean value",
        MixedRoute::FourthMoment => "mixed second moment via fourth moment",
    };
    let report = base_report(label, samples.power_sum(2), rhs, q_base, t_max, spec, x_scale)
        .with("route_bound", route_bound)
        .with("fourth_power_sum", samples.power_sum(4))
        .with("triples", samples.len() as f64);
    Ok((route, report))
}

/// `Σ_{q<2Q} Σ*_χ ∫_{-T}^{T} |S'(1/2 + it, χ)|^2 dt` against `Q^2 T L^{13}`,
/// integrated with 16-point Gauss-Legendre panels of width 1/2.
pub fn derivative_moment_report(q_base: u64, t_max: f64, spec: &CoefficientSpec, x_scale: f64) -> Result<BoundReport> {
    if spec.kind != CoefficientKind::Unit {
        return Err(Error::InvalidArgument("the derivative bound is stated for a_n = 1 only".into()));
    }
    let family = primitive_family(q_base)?;
    let deriv = spec.log_weighted();
    let gl = crate::quad::GaussLegendre::new(16);
    let panels = libm::ceil(4.0 * t_max) as usize;
    let width = 2.0 * t_max / panels as f64;
    let per_char = crate::par::map(&family, |chi| {
        let poly = DirichletPolynomial::new(deriv.clone(), chi.clone());
        let mut acc = CompensatedSum::new();
        for k in 0..panels {
            let a = -t_max + k as f64 * width;
            acc.add(gl.integrate(|t| poly.eval(0.5, t).norm_sqr(), a, a + width));
        }
        acc.value()
    });
    let lhs: f64 = per_char.iter().copied().collect::<CompensatedSum>().value();
    let qf = q_base as f64;
    let rhs = qf * qf * t_max * powf(log_scale(x_scale), 13.0);
    Ok(base_report("derivative second moment", lhs, rhs, q_base, t_max, spec, x_scale))
}
