//! Chebyshev sums in progressions and the error terms built from them.
//!
//! `E*(x, q)` and `E†(x, q)` are sup norms over real `y <= x`. Both are
//! computed exactly from the sorted prime-power list: `ψ(y; q, a) - y/φ(q)`
//! is linear between the jumps of residue class `a`, so its extremes sit at
//! one-sided limits at jumps or at `y = x`; `ψ(y; q, a) - ψ(y)/φ(q)` is a step
//! function, so it suffices to look right after every jump.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::arith::{factorize, ModuliSet, MultiplicativeTables};
use crate::characters::{character_group, DirichletCharacter};
use crate::math::{floor, gcd, ln, powf, CompensatedSum, ComplexSum};
use crate::{Error, Result};

fn check_range(y: f64, tables: &MultiplicativeTables) -> Result<u64> {
    if !(y >= 0.0) || y > tables.limit() as f64 {
        return Err(Error::BeyondTable { value: y, limit: tables.limit() });
    }
    Ok(floor(y) as u64)
}

fn phi_of(q: u64) -> u64 {
    factorize(q).phi()
}

/// `ψ(y; q, a)`: `Σ Λ(n)` over `n <= y`, `n ≡ a (mod q)`.
pub fn psi_ap(y: f64, q: u64, a: u64, tables: &MultiplicativeTables) -> Result<f64> {
    let y = check_range(y, tables)?;
    assert!(q >= 1);
    let a = a % q;
    Ok(tables
        .prime_powers_upto(y)
        .iter()
        .filter(|pp| u64::from(pp.n) % q == a)
        .map(|pp| pp.log_p())
        .collect::<CompensatedSum>()
        .value())
}

/// `ψ_q(y)`: `Σ Λ(n)` over `n <= y` coprime to `q`, as `ψ(y)` minus the
/// prime powers of the primes dividing `q`.
pub fn psi_q(y: f64, q: u64, tables: &MultiplicativeTables) -> Result<f64> {
    let y = check_range(y, tables)?;
    let mut acc = CompensatedSum::new();
    acc.add(tables.psi(y));
    for &(p, _) in &factorize(q).factors {
        let lp = ln(p as f64);
        let mut pk = p;
        while pk <= y {
            acc.add(-lp);
            pk = pk.saturating_mul(p);
        }
    }
    Ok(acc.value())
}

/// `ψ(y, χ) = Σ_{n <= y} Λ(n) χ(n)`.
pub fn psi_chi(y: f64, chi: &DirichletCharacter, tables: &MultiplicativeTables) -> Result<Complex64> {
    let y = check_range(y, tables)?;
    let q = chi.modulus();
    let values = chi.value_table();
    let mut acc = ComplexSum::new();
    for pp in tables.prime_powers_upto(y) {
        let v = values[(u64::from(pp.n) % q) as usize];
        if v.re != 0.0 || v.im != 0.0 {
            acc.add(v * pp.log_p());
        }
    }
    Ok(acc.value())
}

/// `ψ(y; q, r)` for every `r` in `0..q`.
pub fn residue_sums(y: f64, q: u64, tables: &MultiplicativeTables) -> Result<Vec<f64>> {
    let y = check_range(y, tables)?;
    let mut sums = vec![CompensatedSum::new(); q as usize];
    for pp in tables.prime_powers_upto(y) {
        sums[(u64::from(pp.n) % q) as usize].add(pp.log_p());
    }
    Ok(sums.iter().map(CompensatedSum::value).collect())
}

/// `|LHS - RHS|` of the character expansion
/// `ψ(y; q, a) - ψ_q(y)/φ(q) = φ(q)^{-1} Σ'_χ conj(χ(a)) ψ(y, χ)`.
pub fn identity_2_1_residual(y: f64, q: u64, a: u64, tables: &MultiplicativeTables) -> Result<f64> {
    if gcd(a % q, q) != 1 {
        return Err(Error::ResidueNotCoprime { a, q });
    }
    let phi = phi_of(q) as f64;
    let lhs = psi_ap(y, q, a, tables)? - psi_q(y, q, tables)? / phi;
    let chars = character_group(q)?;
    let terms =
        crate::par::map(&chars[1..], |chi| psi_chi(y, chi, tables).map(|s| chi.eval_u(a).conj().to_complex() * s));
    let mut rhs = ComplexSum::new();
    for t in terms {
        rhs.add(t?);
    }
    let rhs = rhs.value() / phi;
    Ok(Complex64::new(lhs - rhs.re, -rhs.im).norm())
}

/// Which one-sided value attained an extremum at a jump point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `y -> n-`.
    Left,
    /// `y = n`.
    Right,
}

/// Where a sup over `y <= x` and residues `a` was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub y: f64,
    pub side: Side,
    pub a: u64,
}

impl Extremum {
    fn update(&mut self, value: f64, y: f64, side: Side, a: u64) {
        if value > self.value {
            *self = Self { value, y, side, a };
        }
    }
}

/// `E*(x, q) = max_{y <= x} max_{(a,q)=1} |ψ(y; q, a) - y/φ(q)|`.
pub fn e_star(x: f64, q: u64, tables: &MultiplicativeTables) -> Result<Extremum> {
    let top = check_range(x, tables)?;
    assert!(q >= 1);
    let inv_phi = 1.0 / phi_of(q) as f64;
    let coprime: Vec<bool> = (0..q).map(|r| gcd(r, q) == 1).collect();
    let mut sums = vec![CompensatedSum::new(); q as usize];
    let mut best = Extremum { value: 0.0, y: 0.0, side: Side::Right, a: 1 % q };
    for pp in tables.prime_powers_upto(top) {
        let r = (u64::from(pp.n) % q) as usize;
        if !coprime[r] {
            continue;
        }
        let n = f64::from(pp.n);
        best.update((sums[r].value() - n * inv_phi).abs(), n, Side::Left, r as u64);
        sums[r].add(pp.log_p());
        best.update((sums[r].value() - n * inv_phi).abs(), n, Side::Right, r as u64);
    }
    for (r, s) in sums.iter().enumerate() {
        if coprime[r] {
            best.update((s.value() - x * inv_phi).abs(), x, Side::Right, r as u64);
        }
    }
    Ok(best)
}

/// Min-tree over residue-class sums.
struct MinTree {
    size: usize,
    data: Vec<f64>,
}

impl MinTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        let mut data = vec![f64::INFINITY; 2 * size];
        for i in 0..n {
            data[size + i] = 0.0;
        }
        for i in (1..size).rev() {
            data[i] = data[2 * i].min(data[2 * i + 1]);
        }
        Self { size, data }
    }

    fn set(&mut self, i: usize, v: f64) {
        let mut k = self.size + i;
        self.data[k] = v;
        while k > 1 {
            k /= 2;
            self.data[k] = self.data[2 * k].min(self.data[2 * k + 1]);
        }
    }

    fn min(&self) -> f64 {
        self.data[1]
    }
}

/// `E†(x, q) = max_{y <= x} max_{(a,q)=1} |ψ(y; q, a) - ψ(y)/φ(q)|`.
///
/// The reported `a` is the residue whose sum is furthest from `ψ(y)/φ(q)`;
/// `side` is always [`Side::Right`].
pub fn e_dagger(x: f64, q: u64, tables: &MultiplicativeTables) -> Result<Extremum> {
    let top = check_range(x, tables)?;
    assert!(q >= 1);
    let inv_phi = 1.0 / phi_of(q) as f64;
    let mut slot = vec![usize::MAX; q as usize];
    let mut residues = Vec::new();
    for r in 0..q {
        if gcd(r, q) == 1 {
            slot[r as usize] = residues.len();
            residues.push(r);
        }
    }
    let mut sums = vec![CompensatedSum::new(); residues.len()];
    let mut tree = MinTree::new(residues.len());
    let mut psi = CompensatedSum::new();
    let (mut max_val, mut max_slot) = (0.0f64, 0usize);
    let mut best = Extremum { value: 0.0, y: 0.0, side: Side::Right, a: 1 % q };
    for pp in tables.prime_powers_upto(top) {
        let lp = pp.log_p();
        psi.add(lp);
        let s = slot[(u64::from(pp.n) % q) as usize];
        if s != usize::MAX {
            sums[s].add(lp);
            let v = sums[s].value();
            tree.set(s, v);
            if v > max_val {
                max_val = v;
                max_slot = s;
            }
        }
        let centre = psi.value() * inv_phi;
        let above = max_val - centre;
        let below = centre - tree.min();
        let n = f64::from(pp.n);
        if above >= below {
            best.update(above, n, Side::Right, residues[max_slot]);
        } else {
            let min = tree.min();
            let arg = sums.iter().position(|s| s.value() == min).unwrap_or(0);
            best.update(below, n, Side::Right, residues[arg]);
        }
    }
    Ok(best)
}

/// Per-modulus output of [`exception_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTermRecord {
    pub q: u64,
    pub phi_q: u64,
    /// Residue attaining the maximum.
    pub a: u64,
    pub y_star: f64,
    pub side: Side,
    pub e_value: f64,
    /// `x / (φ(q) (log x)^A)`.
    pub threshold: f64,
    pub exceptional: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionScan {
    pub x: f64,
    pub q_base: u64,
    pub a_exponent: f64,
    pub records: Vec<ErrorTermRecord>,
    pub count_exceptional: usize,
    /// `max E*/threshold` over the set; `0` for an empty set.
    pub max_ratio: f64,
    pub warnings: Vec<String>,
}

/// Flags the moduli of `set` with `E*(x, q) > x / (φ(q) (log x)^A)`.
pub fn exception_scan(
    x: f64,
    a_exponent: f64,
    set: &ModuliSet,
    tables: &MultiplicativeTables,
) -> Result<ExceptionScan> {
    check_range(x, tables)?;
    let q_base = set.q_base;
    let mut warnings = Vec::new();
    // Q <= x^{9/40}, compared as 40 log Q <= 9 log x
    if 40.0 * ln(q_base as f64) > 9.0 * ln(x) {
        warnings.push(format!("Q = {q_base} exceeds x^(9/40) = {:.3}; scanning anyway", powf(x, 9.0 / 40.0)));
    }
    let log_factor = powf(ln(x), a_exponent);
    let results = crate::par::map(&set.members, |&q| e_star(x, q, tables));
    let mut records = Vec::with_capacity(results.len());
    for (&q, r) in set.members.iter().zip(results) {
        let ext = r?;
        let phi_q = phi_of(q);
        let threshold = x / (phi_q as f64 * log_factor);
        records.push(ErrorTermRecord {
            q,
            phi_q,
            a: ext.a,
            y_star: ext.y,
            side: ext.side,
            e_value: ext.value,
            threshold,
            exceptional: ext.value > threshold,
        });
    }
    let count_exceptional = records.iter().filter(|r| r.exceptional).count();
    let max_ratio = records.iter().map(|r| r.e_value / r.threshold).fold(0.0, f64::max);
    Ok(ExceptionScan { x, q_base, a_exponent, records, count_exceptional, max_ratio, warnings })
}

/// `y(χ)` maximizing `|ψ(y, χ)|` over `y <= x` and the unimodular `a(χ)` with
/// `a(χ) ψ(y(χ), χ) = |ψ(y(χ), χ)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterExtremum {
    pub y_chi: f64,
    pub a_chi: Complex64,
    pub value: f64,
}

pub fn character_extremum(
    x: f64,
    chi: &DirichletCharacter,
    tables: &MultiplicativeTables,
) -> Result<CharacterExtremum> {
    let top = check_range(x, tables)?;
    let q = chi.modulus();
    let values = chi.value_table();
    let mut acc = ComplexSum::new();
    let mut best = (0.0, 1.0, Complex64::new(0.0, 0.0));
    for pp in tables.prime_powers_upto(top) {
        let v = values[(u64::from(pp.n) % q) as usize];
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        acc.add(v * pp.log_p());
        let s = acc.value();
        if s.norm() > best.0 {
            best = (s.norm(), f64::from(pp.n), s);
        }
    }
    let a_chi = if best.0 > 0.0 { best.2.conj() / best.0 } else { Complex64::new(1.0, 0.0) };
    Ok(CharacterExtremum { y_chi: best.1, a_chi, value: best.0 })
}

/// The two gaps controlled when passing from `ψ_q`, `χ` to `ψ`, `χ_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionGap {
    /// `φ(q)^{-1} |ψ(y) - ψ_q(y)|`.
    pub prime_power_gap: f64,
    /// `φ(q)^{-1} |ψ(y, χ_1) - ψ(y, χ)|` with `χ_1` primitive inducing `χ`.
    pub character_gap: f64,
    /// `max(gaps) · q / (L² log L)` with `L = log x`.
    pub empirical_c: f64,
}

pub fn reduction_gap(y: f64, x: f64, chi: &DirichletCharacter, tables: &MultiplicativeTables) -> Result<ReductionGap> {
    if x < 16.0 || y > x {
        return Err(Error::InvalidArgument(format!("reduction_gap needs 16 <= x and y <= x, got x = {x}, y = {y}")));
    }
    let q = chi.modulus();
    let phi = phi_of(q) as f64;
    let yf = check_range(y, tables)?;
    let prime_power_gap = (tables.psi(yf) - psi_q(y, q, tables)?).abs() / phi;
    let (_, _, chi1) = chi.conductor_and_primitivity();
    let character_gap = (psi_chi(y, &chi1, tables)? - psi_chi(y, chi, tables)?).norm() / phi;
    let l = ln(x);
    let empirical_c = prime_power_gap.max(character_gap) * q as f64 / (l * l * ln(l));
    Ok(ReductionGap { prime_power_gap, character_gap, empirical_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Oracle: integer scan of `max(|ψ(m-1;a) - (m-1)/φ|, |ψ(m-1;a) - m/φ|)`.
    fn e_star_brute(x: u64, q: u64, t: &MultiplicativeTables) -> f64 {
        let phi = phi_of(q) as f64;
        let mut s = vec![0.0f64; q as usize];
        let mut best = 0.0f64;
        for m in 1..=x {
            let r = (m % q) as usize;
            for a in 0..q as usize {
                if gcd(a as u64, q) == 1 {
                    best = best.max((s[a] - (m - 1) as f64 / phi).abs());
                    best = best.max((s[a] - m as f64 / phi).abs());
                }
            }
            s[r] += t.von_mangoldt(m);
        }
        for a in 0..q as usize {
            if gcd(a as u64, q) == 1 {
                best = best.max((s[a] - x as f64 / phi).abs());
            }
        }
        best
    }

    fn e_dagger_brute(x: u64, q: u64, t: &MultiplicativeTables) -> f64 {
        let phi = phi_of(q) as f64;
        let mut s = vec![0.0f64; q as usize];
        let mut psi = 0.0;
        let mut best = 0.0f64;
        for m in 1..=x {
            let l = t.von_mangoldt(m);
            s[(m % q) as usize] += l;
            psi += l;
            for a in 0..q as usize {
                if gcd(a as u64, q) == 1 {
                    best = best.max((s[a] - psi / phi).abs());
                }
            }
        }
        best
    }

    #[test]
    fn psi_ap_examples() {
        let t = build_tables(1000).unwrap();
        // n in {5, 9, 13, 17}; Λ(9) = log 3
        let expect = ln(5.0) + ln(3.0) + ln(13.0) + ln(17.0);
        assert!(close(psi_ap(20.0, 4, 1, &t).unwrap(), expect, 1e-13));
        assert_eq!(psi_ap(1.5, 7, 3, &t).unwrap(), 0.0);
        let psi10 = 3.0 * ln(2.0) + 2.0 * ln(3.0) + ln(5.0) + ln(7.0);
        assert!(close(psi_ap(10.0, 1, 0, &t).unwrap(), psi10, 1e-13));
        assert!(matches!(psi_ap(1001.0, 1, 0, &t), Err(Error::BeyondTable { .. })));
    }

    #[test]
    fn psi_chi_examples() {
        let t = build_tables(1000).unwrap();
        let trivial = DirichletCharacter::trivial();
        assert!(close(psi_chi(10.0, &trivial, &t).unwrap().re, t.psi(10), 1e-13));
        let chi3 = &character_group(3).unwrap()[1];
        let brute: f64 = (1..=10i64).map(|n| t.von_mangoldt(n as u64) * chi3.evaluate(n).to_complex().re).sum();
        let got = psi_chi(10.0, chi3, &t).unwrap();
        assert!(close(got.re, brute, 1e-13) && got.im.abs() < 1e-15);
        for chi in character_group(12).unwrap() {
            assert_eq!(psi_chi(1.0, &chi, &t).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn identity_examples() {
        let t = build_tables(10_000).unwrap();
        let tol = 1e-8 * (1.0 + t.psi(10_000));
        assert!(identity_2_1_residual(1e4, 7, 3, &t).unwrap() <= tol);
        assert!(identity_2_1_residual(1e3, 12, 5, &t).unwrap() <= tol);
        assert_eq!(identity_2_1_residual(500.0, 1, 0, &t).unwrap(), 0.0);
        assert!(matches!(identity_2_1_residual(100.0, 12, 4, &t), Err(Error::ResidueNotCoprime { .. })));
    }

    #[test]
    fn residue_decomposition() {
        let t = build_tables(20_000).unwrap();
        for q in [1u64, 4, 9, 30, 97] {
            let sums = residue_sums(2e4, q, &t).unwrap();
            let coprime: f64 = (0..q).filter(|&r| gcd(r, q) == 1).map(|r| sums[r as usize]).sum();
            let pq = psi_q(2e4, q, &t).unwrap();
            assert!((coprime - pq).abs() <= 1e-10 * pq);
        }
    }

    #[test]
    fn e_star_matches_brute_force() {
        let t = build_tables(10_000).unwrap();
        for (x, q) in [(10_000u64, 3u64), (100, 97), (10_000, 1), (2_000, 8), (5_000, 30)] {
            let fast = e_star(x as f64, q, &t).unwrap().value;
            assert!(close(fast, e_star_brute(x, q, &t), 1e-8), "x = {x}, q = {q}");
        }
    }

    #[test]
    fn e_star_q1_is_pnt_error() {
        let t = build_tables(1000).unwrap();
        let e = e_star(1000.0, 1, &t).unwrap();
        // brute sup of |ψ(y) - y| over real y
        let mut best = 0.0f64;
        let mut s = 0.0;
        for m in 1..=1000u64 {
            best = best.max((s - (m - 1) as f64).abs()).max((s - m as f64).abs());
            s += t.von_mangoldt(m);
        }
        best = best.max((s - 1000.0f64).abs());
        assert!(close(e.value, best, 1e-9));
    }

    #[test]
    fn e_dagger_matches_brute_force() {
        let t = build_tables(10_000).unwrap();
        assert_eq!(e_dagger(1e4, 1, &t).unwrap().value, 0.0);
        for (x, q) in [(10_000u64, 5u64), (1000, 8), (3000, 21)] {
            let fast = e_dagger(x as f64, q, &t).unwrap().value;
            assert!(close(fast, e_dagger_brute(x, q, &t), 1e-8), "x = {x}, q = {q}");
        }
    }

    #[test]
    fn e_star_monotone_in_x() {
        let t = build_tables(20_000).unwrap();
        for q in [3u64, 10, 17] {
            let mut prev = 0.0;
            for k in 1..=40 {
                let v = e_star(500.0 * k as f64, q, &t).unwrap().value;
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn scan_threshold_extremes() {
        let t = build_tables(100_000).unwrap();
        let set = crate::arith::enumerate_moduli_set(13, crate::arith::ModuliSpec::PrimePowers).unwrap();
        let none = exception_scan(1e5, -10.0, &set, &t).unwrap();
        assert_eq!(none.count_exceptional, 0);
        let all = exception_scan(1e5, 10.0, &set, &t).unwrap();
        assert_eq!(all.count_exceptional, set.len());
        let zero = exception_scan(1e5, 0.0, &set, &t).unwrap();
        assert_eq!(zero.count_exceptional, 0);
        let empty = ModuliSet { q_base: 13, members: Vec::new(), kind: crate::arith::ModuliKind::Custom };
        assert_eq!(exception_scan(1e5, 1.0, &empty, &t).unwrap().count_exceptional, 0);
        let big = crate::arith::enumerate_moduli_set(20, crate::arith::ModuliSpec::Primes).unwrap();
        assert!(!exception_scan(1e4, 1.0, &big, &t).unwrap().warnings.is_empty());
    }

    #[test]
    fn reduction_gap_examples() {
        let t = build_tables(10_000).unwrap();
        let chi = &character_group(97).unwrap()[5];
        let g = reduction_gap(90.0, 1e4, chi, &t).unwrap();
        assert_eq!(g.character_gap, 0.0);
        assert_eq!(g.prime_power_gap, 0.0);
        let triv = DirichletCharacter::trivial();
        let g = reduction_gap(5000.0, 1e4, &triv, &t).unwrap();
        assert_eq!((g.prime_power_gap, g.character_gap), (0.0, 0.0));
        // character mod 12 induced from the one mod 3
        let chars = character_group(12).unwrap();
        let chi = chars.iter().find(|c| c.conductor() == 3).unwrap();
        let g = reduction_gap(1e4, 1e4, chi, &t).unwrap();
        let chi3 = &character_group(3).unwrap()[1];
        let mut direct = 0.0;
        for n in 1..=10_000u64 {
            if gcd(n, 12) != 1 {
                direct += t.von_mangoldt(n) * chi3.eval_u(n).to_complex().re;
            }
        }
        assert!(close(g.character_gap, direct.abs() / 4.0, 1e-10));
        let psi2 = ln(2.0) * 13.0 + ln(3.0) * 8.0;
        assert!(close(g.prime_power_gap, psi2 / 4.0, 1e-9));
    }

    #[test]
    fn extremum_is_unimodular() {
        let t = build_tables(5000).unwrap();
        for chi in character_group(11).unwrap() {
            let e = character_extremum(5000.0, &chi, &t).unwrap();
            assert!((e.a_chi.norm() - 1.0).abs() < 1e-12);
            let s = psi_chi(e.y_chi, &chi, &t).unwrap();
            assert!(((e.a_chi * s).re - s.norm()).abs() < 1e-9);
        }
    }
}
