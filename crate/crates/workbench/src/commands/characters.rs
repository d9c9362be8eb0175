use bv_core::arith::factorize;
use bv_core::characters::{character_group, primitive_count};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Summary;
use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Serialize)]
struct CharactersJson {
    q_max: u64,
    primitive_q_max: u64,
    worst_orthogonality_defect: f64,
    primitive_mismatches: Vec<u64>,
    multiplicativity_samples: usize,
    multiplicativity_failures: usize,
    seed: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Worst deviation of both orthogonality relations for modulus `q`.
fn orthogonality_defect(q: u64) -> CliResult<f64> {
    let tables: Vec<Vec<Complex64>> = character_group(q)?.iter().map(|c| c.value_table()).collect();
    let phi = factorize(q).phi() as f64;
    let mut worst = 0.0f64;
    for a in 0..q as usize {
        for b in 0..q as usize {
            let s: Complex64 = tables.iter().map(|t| t[a] * t[b].conj()).sum();
            let want = if a == b && gcd(a as u64, q) == 1 { phi } else { 0.0 };
            worst = worst.max((s - want).norm());
        }
    }
    for (i, t1) in tables.iter().enumerate() {
        for (j, t2) in tables.iter().enumerate() {
            let s: Complex64 = t1.iter().zip(t2).map(|(x, y)| x * y.conj()).sum();
            worst = worst.max((s - if i == j { phi } else { 0.0 }).norm());
        }
    }
    Ok(worst)
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("characters");
    let top = cfg.characters_q_max.max(cfg.characters_primitive_q_max);
    let rows = bv_core::par::map_range(top as usize, |i| -> CliResult<Vec<String>> {
        let q = i as u64 + 1;
        let group = character_group(q)?;
        let enumerated = group.iter().filter(|c| c.is_primitive()).count() as u64;
        let defect = if q <= cfg.characters_q_max { orthogonality_defect(q)?.to_string() } else { String::new() };
        Ok(vec![
            q.to_string(),
            factorize(q).phi().to_string(),
            group.len().to_string(),
            enumerated.to_string(),
            primitive_count(q).to_string(),
            defect,
        ])
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;

    let worst = rows.iter().filter_map(|r| r[5].parse::<f64>().ok()).fold(0.0, f64::max);
    let mismatches: Vec<u64> = rows
        .iter()
        .filter(|r| r[0].parse::<u64>().unwrap() <= cfg.characters_primitive_q_max && r[3] != r[4])
        .map(|r| r[0].parse().unwrap())
        .collect();
    let counts_ok = rows.iter().all(|r| r[1] == r[2]);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let samples = 10_000;
    let mut bad = 0;
    let moduli: Vec<u64> = (1..=cfg.characters_q_max.min(300)).collect();
    let groups: Vec<_> = moduli.iter().map(|&q| character_group(q)).collect::<Result<_, _>>()?;
    for _ in 0..samples {
        let chars = &groups[rng.random_range(0..groups.len())];
        let chi = &chars[rng.random_range(0..chars.len())];
        let m = rng.random_range(-10_000i64..10_000);
        let n = rng.random_range(-10_000i64..10_000);
        bad += (chi.evaluate(m * n) != chi.evaluate(m) * chi.evaluate(n) || !chi.evaluate(1).is_one()) as usize;
    }

    s.check(counts_ok, format!("number of characters equals φ(q) for q <= {top}"));
    s.check(worst <= 1e-12, format!("orthogonality defect {worst:.3e} <= 1e-12 for q <= {}", cfg.characters_q_max));
    s.check(
        mismatches.is_empty(),
        format!("primitive_count matches enumeration for q <= {}", cfg.characters_primitive_q_max),
    );
    s.check(bad == 0, format!("χ(mn) = χ(m)χ(n) and χ(1) = 1 on {samples} seeded samples"));

    out.csv(
        "characters.csv",
        &["q", "phi_q", "characters", "primitive_enumerated", "primitive_formula", "orthogonality_defect"],
        &rows,
    )?;
    out.json(
        "characters.json",
        &CharactersJson {
            q_max: cfg.characters_q_max,
            primitive_q_max: cfg.characters_primitive_q_max,
            worst_orthogonality_defect: worst,
            primitive_mismatches: mismatches,
            multiplicativity_samples: samples,
            multiplicativity_failures: bad,
            seed: cfg.run.seed,
        },
    )?;
    Ok(s)
}
