use bv_core::exponents::lemma4::lemma4_witnesses;
use bv_core::exponents::{grid_tuples, lemma4_partition, rat, PartitionOutcome, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Summary;
use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

/// A nonincreasing rational 8-tuple with sum at most 1; a third of the
/// draws put `u_1` near the difficult interval.
pub fn random_tuple<R: Rng>(rng: &mut R) -> [Rational; 8] {
    const DENS: [i128; 6] = [40, 80, 97, 240, 1024, 7919];
    let den = DENS[rng.random_range(0..DENS.len())];
    loop {
        let cap = den / rng.random_range(1..=8i128);
        let mut k: [i128; 8] = std::array::from_fn(|_| rng.random_range(0..=cap));
        if rng.random_range(0..3) == 0 {
            k[0] = rng.random_range(9 * den / 40 - 1..=den / 4 + 1);
        }
        k.sort_unstable_by(|a, b| b.cmp(a));
        if k.iter().sum::<i128>() <= den {
            return k.map(|v| rat(v, den));
        }
    }
}

#[derive(Serialize)]
struct CertificateJson {
    grid_step: String,
    grid_tuples: usize,
    random_tuples: usize,
    seed: u64,
    partition_failures: usize,
    certificate_failures: usize,
    oracle_disagreements: usize,
    certified: bool,
}

enum Verdict {
    Ok(PartitionOutcome),
    NoPartition,
    BadCertificate,
    OracleDisagrees,
}

fn judge(u: &[Rational; 8]) -> Verdict {
    let Ok(o) = lemma4_partition(u) else {
        return Verdict::NoPartition;
    };
    if !o.all_checks_hold() || o.verify(u).is_err() {
        return Verdict::BadCertificate;
    }
    match lemma4_witnesses(u) {
        Ok(w) if w.iter().any(|w| w.matches(&o)) => Verdict::Ok(o),
        _ => Verdict::OracleDisagrees,
    }
}

fn indices(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("lemma4");
    let den = cfg.lemma4_grid_step.denominator();
    let grid: Vec<[Rational; 8]> = grid_tuples(den).into_iter().map(|k| k.map(|v| rat(v.into(), den.into()))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let random: Vec<[Rational; 8]> = (0..cfg.lemma4_random_tuples).map(|_| random_tuple(&mut rng)).collect();

    let g = bv_core::par::map(&grid, judge);
    let r = bv_core::par::map(&random, judge);
    let (mut none, mut cert, mut oracle) = (0, 0, 0);
    for v in g.iter().chain(&r) {
        match v {
            Verdict::Ok(_) => {}
            Verdict::NoPartition => none += 1,
            Verdict::BadCertificate => cert += 1,
            Verdict::OracleDisagrees => oracle += 1,
        }
    }
    let total = grid.len() + random.len();
    s.check(none == 0, format!("a partition is returned for all {total} tuples"));
    s.check(cert == 0, "every partition passes its exact certificate");
    s.check(oracle == 0, "the brute-force oracle finds every constructive partition");
    s.note(format!(
        "grid {}: {} tuples; {} seeded random tuples",
        cfg.lemma4_grid_step.as_rational(),
        grid.len(),
        random.len()
    ));

    let rows: Vec<Vec<String>> = grid
        .iter()
        .zip(&g)
        .map(|(u, v)| {
            let mut row: Vec<String> = u.iter().map(|x| x.to_string()).collect();
            match v {
                Verdict::Ok(o) => row.extend([
                    format!("{:?}", o.variant),
                    format!("{:?}", o.case),
                    o.k.map_or(String::new(), |k| k.to_string()),
                    o.singleton.map_or(String::new(), |i| i.to_string()),
                    indices(&o.a1),
                    indices(&o.a2),
                ]),
                _ => row.extend([
                    "failed".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]),
            }
            row
        })
        .collect();
    out.csv(
        "lemma4.csv",
        &["u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "variant", "case", "k", "singleton", "a1", "a2"],
        &rows,
    )?;
    out.json(
        "lemma4_certificate.json",
        &CertificateJson {
            grid_step: cfg.lemma4_grid_step.as_rational().to_string(),
            grid_tuples: grid.len(),
            random_tuples: random.len(),
            seed: cfg.run.seed,
            partition_failures: none,
            certificate_failures: cert,
            oracle_disagreements: oracle,
            certified: none + cert + oracle == 0,
        },
    )?;
    Ok(s)
}
