//! Truncated Perron integrals for products of Dirichlet polynomials.
//!
//! `(1/2πi) ∫_{σ0-iH}^{σ0+iH} Π F_j(s) y^s / s ds` approximates
//! `Σ_{n_1⋯n_k <= y} Π a_{n_j} χ(n_j)`, with an error that decays like
//! `1/H` and oscillates with `H`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dirichlet_poly::DirichletPolynomial;
use crate::math::{cis, ln, ComplexSum, PI};
use crate::par;
use crate::quad::Adaptive;
use crate::report::BoundReport;
use crate::{Error, Result};

/// At most this many polynomials in a product.
pub const MAX_FACTORS: usize = 8;
/// Slack on the triangle-inequality bound, for round-off only.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub sigma0: f64,
    pub height: f64,
    pub target_sigma: f64,
    /// `L = log x`.
    pub log_x: f64,
}

impl ContourSpec {
    /// `σ0 = 1 + 1/L`, shift target `1/2`.
    pub fn new(log_x: f64, height: f64) -> Result<Self> {
        Self::with_sigma0(log_x, height, 1.0 + 1.0 / log_x)
    }

    pub fn with_sigma0(log_x: f64, height: f64, sigma0: f64) -> Result<Self> {
        let spec = Self { sigma0, height, target_sigma: 0.5, log_x };
        if !(log_x > 0.0 && log_x.is_finite()) {
            return Err(Error::InvalidArgument(format!("log x = {log_x} must be positive")));
        }
        if !(sigma0 > 1.0 && sigma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("σ0 = {sigma0} must exceed 1")));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::InvalidArgument(format!("height {height} must be positive")));
        }
        Ok(spec)
    }

    pub fn at_height(self, height: f64) -> Result<Self> {
        Self::with_sigma0(self.log_x, height, self.sigma0)
    }
}

/// Quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronOptions {
    /// Target error relative to `Σ Π |a_{n_j}|`, the trivial bound on the sum.
    pub tolerance: f64,
    pub order: usize,
    pub max_depth: u32,
    /// Periods of the fastest oscillation per panel.
    pub periods_per_panel: f64,
    /// Constant `C` in the reported `C L²` budget.
    pub budget_constant: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, order: 32, max_depth: 24, periods_per_panel: 4.0, budget_constant: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronResult {
    pub y: f64,
    pub height: f64,
    pub approx: Complex64,
    /// By enumerating tuples.
    pub exact: Complex64,
    /// By convolving coefficient arrays.
    pub exact_convolution: Complex64,
    pub error: f64,
    /// `C L²`, reported only.
    pub budget: f64,
    pub panels: usize,
}

impl PerronResult {
    pub fn within_budget(&self) -> bool {
        self.error <= self.budget
    }
}

fn check_family(family: &[DirichletPolynomial]) -> Result<()> {
    if family.len() > MAX_FACTORS {
        return Err(Error::InvalidArgument(format!("{} factors, at most {MAX_FACTORS} allowed", family.len())));
    }
    Ok(())
}

/// `Σ_{n_1⋯n_k <= y} Π c_j(n_j)` by walking all tuples with the running
/// product kept below `y`.
pub fn exact_by_tuples(family: &[DirichletPolynomial], y: f64) -> Complex64 {
    fn walk(terms: &[Vec<(u64, Complex64)>], j: usize, prod: u64, coeff: Complex64, y: f64, acc: &mut ComplexSum) {
        if j == terms.len() {
            acc.add(coeff);
            return;
        }
        for &(n, c) in &terms[j] {
            let p = prod.saturating_mul(n);
            if p as f64 > y {
                // Terms are in increasing n.
                break;
            }
            walk(terms, j + 1, p, coeff * c, y, acc);
        }
    }
    let terms: Vec<Vec<(u64, Complex64)>> =
        family.iter().map(|f| f.terms().map(|(n, c, _)| (n, c)).collect()).collect();
    let mut acc = ComplexSum::new();
    walk(&terms, 0, 1, Complex64::new(1.0, 0.0), y, &mut acc);
    acc.value()
}

/// Same sum via repeated Dirichlet convolution of coefficient arrays on
/// `1..=⌊y⌋`.
pub fn exact_by_convolution(family: &[DirichletPolynomial], y: f64) -> Complex64 {
    if y < 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = libm::floor(y) as usize;
    let mut cur = alloc::vec![Complex64::new(0.0, 0.0); m + 1];
    cur[1] = Complex64::new(1.0, 0.0);
    for f in family {
        let mut next = alloc::vec![Complex64::new(0.0, 0.0); m + 1];
        for (d, &a) in cur.iter().enumerate().skip(1) {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (n, c, _) in f.terms() {
                let k = d.saturating_mul(n as usize);
                if k > m {
                    break;
                }
                next[k] += a * c;
            }
        }
        cur = next;
    }
    let mut acc = ComplexSum::new();
    for v in cur {
        acc.add(v);
    }
    acc.value()
}

/// Coefficients pre-scaled by `n^{-σ0}` along the line of integration.
struct Line {
    factors: Vec<Vec<(Complex64, f64)>>,
    sigma0: f64,
    y_pow: f64,
    log_y: f64,
}

impl Line {
    fn new(family: &[DirichletPolynomial], sigma0: f64, y: f64) -> Self {
        let factors =
            family.iter().map(|f| f.terms().map(|(_, c, l)| (c * libm::exp(-sigma0 * l), l)).collect()).collect();
        Self { factors, sigma0, y_pow: libm::pow(y, sigma0), log_y: ln(y) }
    }

    /// `(1/2π) Π F_j(σ0 + it) y^{σ0+it} / (σ0 + it)`.
    fn integrand(&self, t: f64) -> Complex64 {
        let mut prod = cis(t * self.log_y) * self.y_pow;
        for f in &self.factors {
            let mut acc = ComplexSum::new();
            for &(c, l) in f {
                acc.add(c * cis(-t * l));
            }
            prod *= acc.value();
        }
        prod / Complex64::new(self.sigma0, t) / (2.0 * PI)
    }
}

/// Largest `|log(y / n_1⋯n_k)|` over the supports, the top frequency of the integrand.
fn max_frequency(family: &[DirichletPolynomial], y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 0.0);
    for f in family {
        let logs: Vec<f64> = f.terms().map(|(_, _, l)| l).collect();
        if let (Some(a), Some(b)) = (logs.first(), logs.last()) {
            lo += a;
            hi += b;
        }
    }
    let ly = ln(y);
    (ly - lo).abs().max((ly - hi).abs())
}

pub fn truncated_perron(family: &[DirichletPolynomial], y: f64, spec: &ContourSpec) -> Result<PerronResult> {
    truncated_perron_with(family, y, spec, &PerronOptions::default())
}

pub fn truncated_perron_with(
    family: &[DirichletPolynomial],
    y: f64,
    spec: &ContourSpec,
    opts: &PerronOptions,
) -> Result<PerronResult> {
    check_family(family)?;
    if !(y > 0.0 && y.is_finite()) || y == libm::floor(y) {
        return Err(Error::InvalidArgument(format!("y = {y} must be positive and not an integer")));
    }
    let h = spec.height;
    let omega = max_frequency(family, y).max(0.25);
    let width = (opts.periods_per_panel * 2.0 * PI / omega).min(2.0 * h);
    let panels = libm::ceil(2.0 * h / width) as usize;
    let width = 2.0 * h / panels as f64;
    let scale: f64 = family.iter().map(|f| f.abs_sum(0.0)).product::<f64>().max(1.0);
    let total_tol = opts.tolerance * scale;
    let line = Line::new(family, spec.sigma0, y);
    let adaptive = Adaptive::new(opts.order, total_tol * width / (2.0 * h), opts.max_depth);

    let pieces = par::map_range(panels, |k| {
        let a = -h + k as f64 * width;
        let b = if k + 1 == panels { h } else { a + width };
        adaptive.integrate_complex(|t| line.integrand(t), a, b)
    });
    let mut acc = ComplexSum::new();
    for p in pieces {
        acc.add(p?);
    }
    let approx = acc.value();
    let exact = exact_by_tuples(family, y);
    let exact_convolution = exact_by_convolution(family, y);
    Ok(PerronResult {
        y,
        height: h,
        approx,
        exact,
        exact_convolution,
        error: (approx - exact).norm(),
        budget: opts.budget_constant * spec.log_x * spec.log_x,
        panels,
    })
}

/// Truncation error at each height, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightStudy {
    pub results: Vec<PerronResult>,
}

impl HeightStudy {
    /// Errors strictly decrease along the list.
    pub fn monotone(&self) -> bool {
        self.results.windows(2).all(|w| w[1].error < w[0].error)
    }
}

pub fn height_study(
    family: &[DirichletPolynomial],
    y: f64,
    spec: &ContourSpec,
    heights: &[f64],
) -> Result<HeightStudy> {
    let results =
        heights.iter().map(|&h| truncated_perron(family, y, &spec.at_height(h)?)).collect::<Result<Vec<_>>>()?;
    Ok(HeightStudy { results })
}

/// Nominal length `N` of a factor supported on `(N, N']`.
fn nominal_length(f: &DirichletPolynomial) -> f64 {
    f.spec().lo.max(1) as f64
}

/// Checks `|Π F_j(σ ± iH)| <= Π N_j^{1-σ}` at each `σ`. The inequality is
/// the triangle inequality when `|a_n| <= 1` and `N' <= 2N`, so a failure
/// is a bug; `lhs` is the largest ratio seen.
pub fn horizontal_bound_check(family: &[DirichletPolynomial], sigmas: &[f64], height: f64) -> Result<BoundReport> {
    check_family(family)?;
    for f in family {
        let s = f.spec();
        if (s.lo + 1..=s.hi).any(|n| s.coefficient(n).abs() > 1.0) {
            return Err(Error::InvalidArgument("coefficients must satisfy |a_n| <= 1".into()));
        }
    }
    let mut worst: f64 = if family.is_empty() { 1.0 } else { 0.0 };
    let mut worst_sigma = f64::NAN;
    let mut points = 0usize;
    for &sigma in sigmas {
        let bound: f64 = family.iter().map(|f| libm::pow(nominal_length(f), 1.0 - sigma)).product();
        for t in [height, -height] {
            let v: Complex64 = family.iter().map(|f| f.eval(sigma, t)).product();
            let ratio = v.norm() / bound;
            points += 1;
            if ratio > worst || worst_sigma.is_nan() {
                worst = ratio;
                worst_sigma = sigma;
            }
        }
    }
    Ok(BoundReport::new("horizontal triangle bound", worst, 1.0 + HORIZONTAL_TOLERANCE)
        .with("height", height)
        .with("points", points as f64)
        .with("worst_sigma", worst_sigma))
}

/// `count` equally spaced `σ` in `[1/2, σ0]`, endpoints included.
pub fn sigma_grid(sigma0: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return alloc::vec![0.5];
    }
    (0..count).map(|k| 0.5 + (sigma0 - 0.5) * k as f64 / (count - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;
    use crate::dirichlet_poly::CoefficientSpec;

    fn unit(lo: u64, hi: u64) -> DirichletPolynomial {
        DirichletPolynomial::new(CoefficientSpec::unit(lo, hi).unwrap(), DirichletCharacter::trivial())
    }

    fn mobius(lo: u64, hi: u64) -> DirichletPolynomial {
        DirichletPolynomial::new(CoefficientSpec::mobius(lo, hi).unwrap(), DirichletCharacter::trivial())
    }

    #[test]
    fn exact_sides_agree() {
        let fam = [unit(2, 4), mobius(2, 4)];
        assert_eq!(exact_by_tuples(&fam, 10.5), Complex64::new(-1.0, 0.0));
        assert_eq!(exact_by_convolution(&fam, 10.5), Complex64::new(-1.0, 0.0));
        let fam = [unit(4, 8), mobius(3, 6), unit(2, 3)];
        for y in [0.5, 20.5, 100.5, 400.5] {
            assert_eq!(exact_by_tuples(&fam, y), exact_by_convolution(&fam, y), "y = {y}");
        }
        assert_eq!(exact_by_tuples(&[], 3.5), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn single_polynomial_moderate_height() {
        let spec = ContourSpec::new(40.0 * core::f64::consts::LN_2, 4096.0).unwrap();
        let r = truncated_perron(&[unit(4, 8)], 10.5, &spec).unwrap();
        assert_eq!(r.exact, Complex64::new(4.0, 0.0));
        // 1/H decay with constant below 2 here.
        assert!(r.error < 2.0 / 4096.0, "error {}", r.error);
    }

    #[test]
    fn below_support_is_near_zero() {
        let spec = ContourSpec::new(10.0, 4096.0).unwrap();
        let r = truncated_perron(&[unit(4, 8)], 4.5, &spec).unwrap();
        assert_eq!(r.exact, Complex64::new(0.0, 0.0));
        assert!(r.error < 1e-2);
    }

    #[test]
    fn integer_y_rejected() {
        let spec = ContourSpec::new(10.0, 100.0).unwrap();
        assert!(truncated_perron(&[unit(4, 8)], 10.0, &spec).is_err());
        assert!(ContourSpec::with_sigma0(10.0, 100.0, 1.0).is_err());
    }

    #[test]
    fn horizontal_bound() {
        let sig = sigma_grid(1.0 + 1.0 / 27.7, 9);
        let r = horizontal_bound_check(&[unit(4, 8), mobius(16, 32)], &sig, 1000.0).unwrap();
        assert!(r.holds(), "{r:?}");
        let empty = horizontal_bound_check(&[], &sig, 1000.0).unwrap();
        assert_eq!(empty.lhs, 1.0);
        // σ = 1/2, N = 16: compare with a direct sum.
        let m = mobius(16, 32);
        let direct: Complex64 =
            (17..=32u64).map(|n| m.coefficient(n) * libm::pow(n as f64, -0.5) * cis(-1000.0 * ln(n as f64))).sum();
        assert!((m.eval(0.5, 1000.0) - direct).norm() < 1e-12);
    }
}
