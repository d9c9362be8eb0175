//! Dirichlet characters with exact values.
//!
//! A character mod `q` is stored as a vector of exponents, one per cyclic
//! factor of `(Z/qZ)^*` in the CRT decomposition. Odd prime powers use their
//! smallest primitive root; `2^e` with `e >= 3` uses the pair `(-1, 5)`.
//! Values are [`RootOfUnity`] fractions and only become floating point when a
//! caller asks for [`RootOfUnity::to_complex`].

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Mul;

use num_complex::Complex64;

use crate::arith::factorize;
use crate::math::{gcd, lcm, pow_mod, PI};
use crate::{Error, Result};

/// Largest modulus accepted by [`character_group`].
pub const DEFAULT_MODULUS_CEILING: u64 = 1_000_000;

/// `exp(2πi·a/m)` held exactly, or the value zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
    zero: bool,
}

impl RootOfUnity {
    pub const ONE: Self = Self { num: 0, den: 1, zero: false };
    pub const ZERO: Self = Self { num: 0, den: 1, zero: true };

    /// `exp(2πi·num/den)`, reduced.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let num = num % den;
        if num == 0 {
            return Self::ONE;
        }
        let g = gcd(num, den);
        Self { num: num / g, den: den / g, zero: false }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_one(&self) -> bool {
        !self.zero && self.num == 0
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn conj(self) -> Self {
        if self.zero {
            self
        } else {
            Self::new(self.den - self.num, self.den)
        }
    }

    pub fn pow(self, k: u64) -> Self {
        if self.zero {
            return if k == 0 { Self::ONE } else { self };
        }
        let num = (u128::from(self.num) * u128::from(k) % u128::from(self.den)) as u64;
        Self::new(num, self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        if self.zero {
            return Complex64::new(0.0, 0.0);
        }
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (a, m) => crate::math::cis(2.0 * PI * a as f64 / m as f64),
        }
    }
}

impl Mul for RootOfUnity {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.zero || rhs.zero {
            return Self::ZERO;
        }
        let l = lcm(self.den, rhs.den);
        let a = u128::from(self.num) * u128::from(l / self.den);
        let b = u128::from(rhs.num) * u128::from(l / rhs.den);
        Self::new(((a + b) % u128::from(l)) as u64, l)
    }
}

/// One prime-power factor `p^e` of the modulus.
#[derive(Debug, Clone)]
struct Component {
    p: u64,
    e: u32,
    pe: u64,
    /// Orders of the cyclic factors contributed by this component.
    orders: Vec<u64>,
    /// Generators as residues mod `p^e`.
    generators: Vec<u64>,
    /// Discrete logs with respect to `generators`, indexed by residue mod `p^e`.
    logs: Vec<Vec<u32>>,
    /// CRT idempotent: `≡ 1 (mod p^e)`, `≡ 0` mod the other components.
    idempotent: u64,
}

impl Component {
    fn new(p: u64, e: u32, q: u64) -> Self {
        let pe = p.pow(e);
        let (orders, generators) = if p == 2 {
            match e {
                1 => (vec![1], vec![1]),
                2 => (vec![2], vec![3]),
                _ => (vec![2, 1 << (e - 2)], vec![pe - 1, 5]),
            }
        } else {
            let phi = (p - 1) * p.pow(e - 1);
            (vec![phi], vec![smallest_primitive_root(p, e)])
        };

        let mut logs = vec![vec![0u32; pe as usize]; orders.len()];
        if p == 2 && e >= 3 {
            let mut x = 1u64;
            for b in 0..orders[1] {
                logs[1][x as usize] = b as u32;
                logs[1][(pe - x) as usize] = b as u32;
                logs[0][(pe - x) as usize] = 1;
                x = x * 5 % pe;
            }
        } else {
            let g = generators[0];
            let mut x = 1u64;
            for j in 0..orders[0] {
                logs[0][x as usize] = j as u32;
                x = x * g % pe;
            }
        }

        let rest = q / pe;
        let idempotent = if rest == 1 {
            1 % q
        } else {
            let inv = mod_inverse(rest % pe, pe);
            ((u128::from(rest) * u128::from(inv)) % u128::from(q)) as u64
        };

        Self { p, e, pe, orders, generators, logs, idempotent }
    }

    /// Lifts a residue mod `p^e` to the residue mod `q` that is `1` on every
    /// other component.
    fn lift(&self, r: u64, q: u64) -> u64 {
        let r = r % self.pe;
        let t = (u128::from(r + q - 1) * u128::from(self.idempotent)) % u128::from(q);
        ((1 + t) % u128::from(q)) as u64
    }

    /// Generators of `{n ≡ 1 (mod p^c)}` inside `(Z/p^e)^*`.
    fn kernel_generators(&self, c: u32) -> Vec<u64> {
        if c >= self.e {
            return Vec::new();
        }
        if self.p == 2 {
            match (self.e, c) {
                (1, _) => Vec::new(),
                (2, _) => vec![3],
                (_, 0 | 1) => vec![self.pe - 1, 5],
                (_, 2) => vec![5],
                (_, c) => vec![1 + (1 << c)],
            }
        } else if c == 0 {
            self.generators.clone()
        } else {
            vec![1 + self.p.pow(c)]
        }
    }
}

fn smallest_primitive_root(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = (p - 1) * p.pow(e - 1);
    let prime_divisors: Vec<u64> = factorize(phi).factors.iter().map(|&(r, _)| r).collect();
    (2..pe).find(|&g| g % p != 0 && prime_divisors.iter().all(|&r| pow_mod(g, phi / r, pe) != 1)).unwrap_or(1)
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// The group of characters mod `q` with its discrete-log tables.
#[derive(Debug)]
pub struct CharacterGroup {
    q: u64,
    phi: u64,
    components: Vec<Component>,
    /// Least common multiple of all cyclic-factor orders.
    exponent: u64,
    /// `(f, generators of the kernel of reduction mod f)` for every `f | q`,
    /// ascending in `f`.
    kernels: Vec<(u64, Vec<u64>)>,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Arc<Self>> {
        Self::with_ceiling(q, DEFAULT_MODULUS_CEILING)
    }

    pub fn with_ceiling(q: u64, ceiling: u64) -> Result<Arc<Self>> {
        if q == 0 || q > ceiling {
            return Err(Error::ModulusOutOfRange { q, ceiling });
        }
        let fact = factorize(q);
        let components: Vec<Component> = fact.factors.iter().map(|&(p, e)| Component::new(p, e, q)).collect();
        let exponent = components.iter().flat_map(|c| c.orders.iter().copied()).fold(1, lcm);

        let kernels = fact
            .divisors()
            .into_iter()
            .map(|f| {
                let gens = components
                    .iter()
                    .flat_map(|c| {
                        let mut v = f;
                        let mut val = 0;
                        while v % c.p == 0 {
                            v /= c.p;
                            val += 1;
                        }
                        c.kernel_generators(val).into_iter().map(|g| c.lift(g, q)).collect::<Vec<_>>()
                    })
                    .collect();
                (f, gens)
            })
            .collect();

        Ok(Arc::new(Self { q, phi: fact.phi(), components, exponent, kernels }))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> u64 {
        self.phi
    }

    fn slot_orders(&self) -> impl Iterator<Item = u64> + '_ {
        self.components.iter().flat_map(|c| c.orders.iter().copied())
    }

    /// Generators of `(Z/qZ)^*`, one per exponent slot, as residues mod `q`.
    pub fn generators(&self) -> Vec<u64> {
        self.components.iter().flat_map(|c| c.generators.iter().map(move |&g| c.lift(g, self.q))).collect()
    }

    /// Discrete-log coordinates of a unit `n`, or `None` when `gcd(n, q) > 1`.
    pub fn coordinates(&self, n: u64) -> Option<Vec<u32>> {
        if gcd(n % self.q, self.q) != 1 {
            return None;
        }
        Some(
            self.components
                .iter()
                .flat_map(|c| {
                    let r = (n % c.pe) as usize;
                    c.logs.iter().map(move |table| table[r])
                })
                .collect(),
        )
    }

    fn value(&self, exps: &[u32], n: u64) -> RootOfUnity {
        if self.q == 1 {
            return RootOfUnity::ONE;
        }
        if gcd(n % self.q, self.q) != 1 {
            return RootOfUnity::ZERO;
        }
        let mut acc: u64 = 0;
        let mut slot = 0;
        for c in &self.components {
            let r = (n % c.pe) as usize;
            for (table, &ord) in c.logs.iter().zip(&c.orders) {
                let k = u64::from(exps[slot]);
                let j = u64::from(table[r]);
                let term = (k * j % ord) * (self.exponent / ord);
                acc = (acc + term) % self.exponent;
                slot += 1;
            }
        }
        RootOfUnity::new(acc, self.exponent)
    }

    fn conductor_of(&self, exps: &[u32]) -> u64 {
        self.kernels
            .iter()
            .find(|(_, gens)| gens.iter().all(|&g| self.value(exps, g).is_one()))
            .map_or(self.q, |(f, _)| *f)
    }

    /// The character with the given exponent vector.
    pub fn character(self: &Arc<Self>, exps: Vec<u32>) -> Result<DirichletCharacter> {
        let orders: Vec<u64> = self.slot_orders().collect();
        if exps.len() != orders.len() || exps.iter().zip(&orders).any(|(&k, &o)| u64::from(k) >= o) {
            return Err(Error::InvalidArgument("exponent vector does not fit the group".into()));
        }
        let order = exps.iter().zip(&orders).map(|(&k, &o)| o / gcd(u64::from(k), o)).fold(1, lcm);
        let conductor = self.conductor_of(&exps);
        Ok(DirichletCharacter { group: Arc::clone(self), exps, order, conductor })
    }

    /// All `φ(q)` characters, lexicographic in the exponent vector.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let orders: Vec<u64> = self.slot_orders().collect();
        let mut out = Vec::with_capacity(self.phi as usize);
        let mut exps = vec![0u32; orders.len()];
        loop {
            out.push(self.character(exps.clone()).expect("in-range exponents"));
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if u64::from(exps[i]) < orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }
}

/// A Dirichlet character mod `q`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exps: Vec<u32>,
    order: u64,
    conductor: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    /// The unique character mod 1.
    pub fn trivial() -> Self {
        let g = CharacterGroup::new(1).expect("q = 1 is in range");
        g.character(Vec::new()).expect("empty exponent vector")
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.q
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }

    /// Real (quadratic or principal) characters.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// `χ(n)` exactly; `n` may be any integer.
    pub fn evaluate(&self, n: i64) -> RootOfUnity {
        let q = self.group.q as i64;
        self.group.value(&self.exps, n.rem_euclid(q) as u64)
    }

    pub fn eval_u(&self, n: u64) -> RootOfUnity {
        self.group.value(&self.exps, n)
    }

    pub fn conj(&self) -> Self {
        let exps =
            self.exps.iter().zip(self.group.slot_orders()).map(|(&k, o)| ((o - u64::from(k)) % o) as u32).collect();
        self.group.character(exps).expect("conjugate exponents are in range")
    }

    /// `χ(r)` as complex numbers for `r = 0..q`.
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.group.q).map(|r| self.eval_u(r).to_complex()).collect()
    }

    /// Conductor, primitivity and the primitive character inducing `self`.
    pub fn conductor_and_primitivity(&self) -> (u64, bool, DirichletCharacter) {
        let f = self.conductor;
        if f == self.group.q {
            return (f, true, self.clone());
        }
        let q = self.group.q;
        let target = CharacterGroup::with_ceiling(f, u64::MAX).expect("f divides q");
        let exps = target
            .components
            .iter()
            .flat_map(|c| {
                c.generators
                    .iter()
                    .zip(&c.orders)
                    .map(|(&g, &ord)| {
                        let r = c.lift(g, f);
                        // smallest n ≡ r (mod f) that is a unit mod q
                        let mut n = r;
                        while gcd(n, q) != 1 {
                            n += f;
                        }
                        let v = self.eval_u(n);
                        (v.numerator() * ord / v.denominator()) as u32
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let inducing = target.character(exps).expect("values have orders dividing the factor orders");
        debug_assert!(inducing.is_primitive());
        (f, false, inducing)
    }
}

/// All characters mod `q`, principal first.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(CharacterGroup::new(q)?.characters())
}

/// Primitive characters mod `q`.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(character_group(q)?.into_iter().filter(DirichletCharacter::is_primitive).collect())
}

/// `Σ_{d | q} μ(d) φ(q/d)`.
pub fn primitive_count(q: u64) -> u64 {
    let f = factorize(q);
    let total: i64 = f
        .divisors()
        .into_iter()
        .map(|d| {
            let mu = i64::from(factorize(d).mobius());
            mu * factorize(q / d).phi() as i64
        })
        .sum();
    total as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn modulus_one() {
        let chars = character_group(1).unwrap();
        assert_eq!(chars.len(), 1);
        for n in 1..50 {
            assert!(chars[0].evaluate(n).is_one());
        }
        assert!(chars[0].is_primitive());
    }

    #[test]
    fn modulus_five_generator_character() {
        let chars = character_group(5).unwrap();
        assert_eq!(chars.len(), 4);
        assert!(chars[0].is_principal());
        assert_eq!(chars[1].evaluate(2), RootOfUnity::new(1, 4));
        let z = chars[1].evaluate(2).to_complex();
        assert!(complex_close(z, Complex64::new(0.0, 1.0), 0.0));
    }

    #[test]
    fn evaluate_examples() {
        let chars = character_group(3).unwrap();
        assert_eq!(chars[1].evaluate(2), RootOfUnity::new(1, 2));
        assert_eq!(chars[1].evaluate(-1), RootOfUnity::new(1, 2));
        for chi in character_group(10).unwrap() {
            assert!(chi.evaluate(5).is_zero());
        }
        let principal = &character_group(7).unwrap()[0];
        assert!(principal.evaluate(100).is_one());
        assert_eq!(character_group(8).unwrap().len(), 4);
    }

    #[test]
    fn conductor_examples() {
        let chars = character_group(6).unwrap();
        let chi = &chars[1];
        let (f, primitive, inducing) = chi.conductor_and_primitivity();
        assert_eq!((f, primitive), (3, false));
        assert_eq!(inducing.modulus(), 3);
        assert!(!inducing.is_principal());
        for n in [1i64, 5, 7, 11, 13] {
            assert_eq!(inducing.evaluate(n), chi.evaluate(n));
        }
        for q in [1, 7, 12, 30] {
            assert_eq!(character_group(q).unwrap()[0].conductor(), 1);
        }
        let primitive_mod_8 = character_group(8).unwrap().iter().filter(|c| c.is_primitive()).count();
        assert_eq!(primitive_mod_8, 2);
    }

    #[test]
    fn primitive_count_examples() {
        assert_eq!(primitive_count(5), 3);
        assert_eq!(primitive_count(6), 0);
        assert_eq!(primitive_count(1), 1);
        assert_eq!(primitive_count(8), 2);
    }

    /// Oracle: χ is induced mod f iff χ(n) = 1 for every unit n ≡ 1 (mod f).
    fn conductor_brute(chi: &DirichletCharacter) -> u64 {
        let q = chi.modulus();
        (1..=q)
            .filter(|f| q.is_multiple_of(*f))
            .find(|&f| (0..q / f).map(|k| 1 + k * f).filter(|&n| gcd(n, q) == 1).all(|n| chi.eval_u(n).is_one()))
            .unwrap()
    }

    #[test]
    fn conductor_matches_brute_force() {
        for q in 1..=150 {
            for chi in character_group(q).unwrap() {
                assert_eq!(chi.conductor(), conductor_brute(&chi), "q = {q}, exps {:?}", chi.exponents());
                let (f, _, inducing) = chi.conductor_and_primitivity();
                assert!(inducing.is_primitive());
                assert_eq!(inducing.modulus(), f);
                for n in 1..=q {
                    if gcd(n, q) == 1 {
                        assert_eq!(inducing.eval_u(n), chi.eval_u(n));
                    }
                }
            }
        }
    }

    #[test]
    fn characters_are_distinct_homomorphisms() {
        for q in [16u64, 24, 45, 63, 64, 100] {
            let chars = character_group(q).unwrap();
            let tables: Vec<Vec<RootOfUnity>> = chars.iter().map(|c| (0..q).map(|n| c.eval_u(n)).collect()).collect();
            for i in 0..tables.len() {
                for j in 0..i {
                    assert_ne!(tables[i], tables[j]);
                }
            }
            for chi in &chars {
                assert!(chi.evaluate(1).is_one());
                for m in 1..q {
                    for n in 1..q {
                        assert_eq!(chi.eval_u(m * n), chi.eval_u(m) * chi.eval_u(n));
                    }
                }
            }
        }
    }

    #[test]
    fn order_and_conj() {
        for chi in character_group(21).unwrap() {
            assert_eq!(chi.group().order() % chi.order(), 0);
            let c = chi.conj();
            for n in 0..21 {
                assert_eq!(c.eval_u(n), chi.eval_u(n).conj());
                assert!(chi.eval_u(n).pow(chi.order()).is_one() || chi.eval_u(n).is_zero());
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(5, 1), 2);
        assert_eq!(smallest_primitive_root(7, 1), 3);
        assert_eq!(smallest_primitive_root(3, 2), 2);
        assert_eq!(smallest_primitive_root(29, 2), 2);
        // 10 is a primitive root mod 487 but not mod 487^2
        assert_eq!(pow_mod(10, 486, 487 * 487), 1);
        assert_eq!(smallest_primitive_root(487, 1), 3);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(character_group(0), Err(Error::ModulusOutOfRange { .. })));
        assert!(matches!(character_group(DEFAULT_MODULUS_CEILING + 1), Err(Error::ModulusOutOfRange { .. })));
    }
}
