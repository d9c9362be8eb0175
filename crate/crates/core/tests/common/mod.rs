//! Oracles and generators shared by the integration tests.

#![allow(dead_code)]

use bv_core::exponents::{rat, Rational};
use rand::Rng;

/// A nonincreasing rational 8-tuple with sum at most 1. A third of the
/// draws put `u_1` near the difficult interval `(9/40, 1/4)`.
pub fn random_tuple<R: Rng>(rng: &mut R) -> [Rational; 8] {
    const DENS: [i128; 8] = [40, 80, 97, 240, 640, 1000, 1024, 7919];
    let den = DENS[rng.random_range(0..DENS.len())];
    loop {
        let cap = den / rng.random_range(1..=8i128);
        let mut k: [i128; 8] = core::array::from_fn(|_| rng.random_range(0..=cap));
        if rng.random_range(0..3) == 0 {
            k[0] = rng.random_range(9 * den / 40 - 1..=den / 4 + 1);
        }
        k.sort_unstable_by(|a, b| b.cmp(a));
        if k.iter().sum::<i128>() <= den {
            return k.map(|v| rat(v, den));
        }
    }
}

/// `Λ(n)` for `n <= limit` by trial division, independent of the sieve.
pub fn lambda_by_trial_division(limit: u64) -> Vec<f64> {
    let mut out = vec![0.0; limit as usize + 1];
    for n in 2..=limit {
        let mut p = 2;
        while p * p <= n && n % p != 0 {
            p += 1;
        }
        let p = if p * p > n { n } else { p };
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            out[n as usize] = (p as f64).ln();
        }
    }
    out
}

/// `max_{y <= x} max_{(a,q)=1} |ψ(y; q, a) - y/φ(q)|` by walking every
/// integer `n <= x`. On `[n, n+1)` the
/// supremum of `ψ - y/φ` sits at `y = n` and that of `y/φ - ψ` at
/// `y -> (n+1)-`, or at `y = x` on the last piece.
pub fn brute_force_e_star(x: u64, q: u64, lambda: &[f64]) -> f64 {
    let coprime: Vec<usize> = (0..q).filter(|&a| gcd(a, q) == 1).map(|a| a as usize).collect();
    let phi = coprime.len() as f64;
    let mut psi = vec![0.0f64; q as usize];
    let mut best = 0.0f64;
    for n in 0..=x {
        if n >= 2 {
            psi[(n % q) as usize] += lambda[n as usize];
        }
        let here = n as f64 / phi;
        let next = ((n + 1).min(x) as f64) / phi;
        for &a in &coprime {
            best = best.max(psi[a] - here).max(next - psi[a]);
        }
    }
    best
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
