//! Exact sieves and multiplicative functions.
//!
//! [`MultiplicativeTables`] is built by a segmented sieve (segments of
//! [`SEGMENT_SIZE`] entries, processed independently) and is immutable after
//! construction. The von Mangoldt function is stored through its base prime,
//! never as a floating logarithm.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{gcd, ln, CompensatedSum};
use crate::{Error, Result};

/// Default upper bound accepted by [`build_tables`].
pub const DEFAULT_CEILING: u64 = 100_000_000;

/// Entries per sieve segment.
pub const SEGMENT_SIZE: usize = 1 << 20;

/// A prime power `n = p^e` (e >= 1) together with its base prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub n: u32,
    pub p: u32,
}

impl PrimePower {
    /// `Λ(n) = log p`.
    #[inline]
    pub fn log_p(&self) -> f64 {
        ln(f64::from(self.p))
    }
}

/// Sieved arithmetic data on `1..=limit`.
#[derive(Debug, Clone)]
pub struct MultiplicativeTables {
    limit: u64,
    spf: Vec<u32>,
    mobius: Vec<i8>,
    phi: Vec<u32>,
    prime_powers: Vec<PrimePower>,
}

/// Builds tables with the default ceiling.
pub fn build_tables(limit: u64) -> Result<MultiplicativeTables> {
    MultiplicativeTables::build(limit, DEFAULT_CEILING)
}

impl MultiplicativeTables {
    pub fn build(limit: u64, ceiling: u64) -> Result<Self> {
        let ceiling = ceiling.min(u64::from(u32::MAX) - 1);
        if !(2..=ceiling).contains(&limit) {
            return Err(Error::LimitOutOfRange { limit, ceiling });
        }
        let base = small_primes(isqrt(limit));
        let total = limit as usize + 1;
        let n_segments = total.div_ceil(SEGMENT_SIZE);
        let segments = crate::par::map_range(n_segments, |k| {
            let lo = k * SEGMENT_SIZE;
            let hi = (lo + SEGMENT_SIZE).min(total);
            sieve_segment(lo as u64, hi as u64, &base)
        });

        let mut spf = Vec::with_capacity(total);
        let mut mobius = Vec::with_capacity(total);
        let mut phi = Vec::with_capacity(total);
        let mut prime_powers = Vec::new();
        for seg in segments {
            spf.extend_from_slice(&seg.spf);
            mobius.extend_from_slice(&seg.mobius);
            phi.extend_from_slice(&seg.phi);
            prime_powers.extend_from_slice(&seg.prime_powers);
        }
        Ok(Self { limit, spf, mobius, phi, prime_powers })
    }

    /// Reassembles tables from stored columns, checking them against an
    /// independent rebuild of the cheap invariants.
    pub fn from_parts(limit: u64, spf: Vec<u32>, mobius: Vec<i8>, phi: Vec<u32>) -> Result<Self> {
        let total = limit as usize + 1;
        if spf.len() != total || mobius.len() != total || phi.len() != total || limit < 2 {
            return Err(Error::InvalidArgument("table columns do not match the limit".into()));
        }
        let mut prime_powers = Vec::new();
        for n in 2..total {
            let p = spf[n];
            if p < 2 || !(n as u64).is_multiple_of(u64::from(p)) {
                return Err(Error::InvalidArgument("corrupt smallest-prime-factor column".into()));
            }
            if let Some(p) = prime_power_base(n as u64, u64::from(p)) {
                prime_powers.push(PrimePower { n: n as u32, p: p as u32 });
            }
        }
        Ok(Self { limit, spf, mobius, phi, prime_powers })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        u64::from(self.spf[n as usize])
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[n as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        u64::from(self.phi[n as usize])
    }

    pub fn spf_column(&self) -> &[u32] {
        &self.spf
    }

    pub fn mobius_column(&self) -> &[i8] {
        &self.mobius
    }

    pub fn phi_column(&self) -> &[u32] {
        &self.phi
    }

    /// The base prime `p` when `n = p^e` with `e >= 1`.
    pub fn lambda_support(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        prime_power_base(n, self.smallest_prime_factor(n))
    }

    /// `Λ(n)` as a float.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        self.lambda_support(n).map_or(0.0, |p| ln(p as f64))
    }

    /// All prime powers up to the limit, in increasing order.
    pub fn prime_powers(&self) -> &[PrimePower] {
        &self.prime_powers
    }

    /// Prime powers `<= y`.
    pub fn prime_powers_upto(&self, y: u64) -> &[PrimePower] {
        let end = self.prime_powers.partition_point(|pp| u64::from(pp.n) <= y);
        &self.prime_powers[..end]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.smallest_prime_factor(n) == n
    }

    pub fn factor(&self, n: u64) -> FactoredInteger {
        assert!(n >= 1 && n <= self.limit, "factor: {n} outside table");
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.smallest_prime_factor(m);
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        FactoredInteger { n, factors }
    }

    /// Chebyshev `ψ(y) = Σ_{n<=y} Λ(n)`.
    pub fn psi(&self, y: u64) -> f64 {
        self.prime_powers_upto(y).iter().map(PrimePower::log_p).collect::<CompensatedSum>().value()
    }
}

struct Segment {
    spf: Vec<u32>,
    mobius: Vec<i8>,
    phi: Vec<u32>,
    prime_powers: Vec<PrimePower>,
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Segment {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut spf = vec![0u32; len];
    let mut mobius = vec![1i8; len];
    let mut phi: Vec<u64> = (lo..hi).collect();

    for &p in base {
        if p * p > hi {
            break;
        }
        let start = lo.div_ceil(p).max(1) * p;
        let mut n = start;
        while n < hi {
            let i = (n - lo) as usize;
            if spf[i] == 0 {
                spf[i] = p as u32;
            }
            let mut e = 0;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
                e += 1;
            }
            mobius[i] = if e >= 2 { 0 } else { -mobius[i] };
            phi[i] = phi[i] / p * (p - 1);
            n += p;
        }
    }

    let mut prime_powers = Vec::new();
    for i in 0..len {
        let n = lo + i as u64;
        if n < 2 {
            spf[i] = n as u32;
            mobius[i] = n as i8;
            phi[i] = n;
            continue;
        }
        let r = rem[i];
        if r > 1 {
            // remaining cofactor is a prime above sqrt(hi)
            if spf[i] == 0 {
                spf[i] = r as u32;
            }
            mobius[i] = -mobius[i];
            phi[i] = phi[i] / r * (r - 1);
        }
        if let Some(p) = prime_power_base(n, u64::from(spf[i])) {
            prime_powers.push(PrimePower { n: n as u32, p: p as u32 });
        }
    }

    Segment { spf, mobius, phi: phi.into_iter().map(|v| v as u32).collect(), prime_powers }
}

fn prime_power_base(n: u64, p: u64) -> Option<u64> {
    if n < 2 || p < 2 {
        return None;
    }
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = libm::sqrt(n as f64) as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes `<= n` by a plain sieve of Eratosthenes.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// An integer with its prime factorization, primes increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Number of ordered `b`-tuples with product `n`: `∏ C(e + b - 1, b - 1)`.
    pub fn tau(&self, b: u32) -> u64 {
        let b = u64::from(b);
        self.factors.iter().map(|&(_, e)| crate::math::binomial(u64::from(e) + b - 1, b - 1)).product()
    }

    pub fn mobius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn phi(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let current = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> FactoredInteger {
    assert!(n >= 1, "factorize(0)");
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    FactoredInteger { n, factors }
}

/// `τ_b(n)`, the number of ordered factorizations of `n` into `b` factors.
pub fn tau_b(n: u64, b: u32) -> Result<u64> {
    if n == 0 || !(1..=8).contains(&b) {
        return Err(Error::InvalidArgument(alloc::format!(
            "tau_b needs n >= 1 and 1 <= b <= 8 (got n = {n}, b = {b})"
        )));
    }
    Ok(factorize(n).tau(b))
}

/// `μ(n)` by trial division.
pub fn mobius(n: u64) -> i8 {
    factorize(n).mobius()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuliKind {
    PrimePowers,
    Primes,
    Custom,
}

/// Requested moduli set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuliSpec {
    PrimePowers,
    Primes,
    Custom(Vec<u64>),
}

/// Pairwise coprime moduli in `[Q, 2Q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliSet {
    pub q_base: u64,
    pub members: Vec<u64>,
    pub kind: ModuliKind,
}

impl ModuliSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn enumerate_moduli_set(q_base: u64, spec: ModuliSpec) -> Result<ModuliSet> {
    if q_base < 3 {
        return Err(Error::InvalidArgument(alloc::format!("moduli sets need Q >= 3 (got {q_base})")));
    }
    let range = q_base..2 * q_base;
    let (mut members, kind) = match spec {
        ModuliSpec::PrimePowers => {
            (range.filter(|&q| factorize(q).is_prime_power()).collect::<Vec<_>>(), ModuliKind::PrimePowers)
        }
        ModuliSpec::Primes => (
            range
                .filter(|&q| {
                    let f = factorize(q);
                    f.factors.len() == 1 && f.factors[0].1 == 1
                })
                .collect(),
            ModuliKind::Primes,
        ),
        ModuliSpec::Custom(list) => {
            if let Some(&bad) = list.iter().find(|q| !range.contains(q)) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "modulus {bad} lies outside [{}, {})",
                    q_base,
                    2 * q_base
                )));
            }
            (list, ModuliKind::Custom)
        }
    };
    members.sort_unstable();
    members.dedup();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let g = gcd(a, b);
            if g > 1 {
                return Err(Error::NotCoprime { a, b, gcd: g });
            }
        }
    }
    Ok(ModuliSet { q_base, members, kind })
}
