use bv_core::arith::{enumerate_moduli_set, ModuliSpec};
use bv_core::progressions::{e_dagger, exception_scan};
use serde::Serialize;

use super::Summary;
use crate::cache::load_covering;
use crate::config::{Config, ModuliChoice};
use crate::error::CliResult;
use crate::output::Output;

#[derive(Serialize)]
struct ExceptionsJson {
    x: u64,
    #[serde(rename = "Q")]
    q: u64,
    #[serde(rename = "A")]
    a: f64,
    moduli: Vec<u64>,
    count_exceptional: usize,
    max_ratio: f64,
    /// Same test with `E†`, measured against `ψ(y)/φ(q)`.
    count_exceptional_dagger: usize,
    max_ratio_dagger: f64,
    warnings: Vec<String>,
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("exceptions");
    let x = cfg.exceptions_x;
    let tables = load_covering(&cfg.run.table_cache, x)?;
    let q_base = cfg.exceptions_q.unwrap_or_else(|| (x as f64).powf(9.0 / 40.0).floor() as u64);
    let spec = match cfg.exceptions_moduli {
        ModuliChoice::PrimePowers => ModuliSpec::PrimePowers,
        ModuliChoice::Primes => ModuliSpec::Primes,
    };
    let set = enumerate_moduli_set(q_base, spec)?;
    let scan = exception_scan(x as f64, cfg.exceptions_a, &set, &tables)?;
    let daggers = bv_core::par::map(&set.members, |&q| e_dagger(x as f64, q, &tables));
    let daggers = daggers.into_iter().collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<Vec<String>> = scan
        .records
        .iter()
        .map(|r| {
            vec![
                r.q.to_string(),
                r.phi_q.to_string(),
                r.e_value.to_string(),
                r.y_star.to_string(),
                r.threshold.to_string(),
                r.exceptional.to_string(),
            ]
        })
        .collect();
    let dagger_rows: Vec<Vec<String>> = scan
        .records
        .iter()
        .zip(&daggers)
        .map(|(r, d)| {
            vec![
                r.q.to_string(),
                r.phi_q.to_string(),
                d.value.to_string(),
                d.y.to_string(),
                r.threshold.to_string(),
                (d.value > r.threshold).to_string(),
            ]
        })
        .collect();
    let count_dagger = scan.records.iter().zip(&daggers).filter(|(r, d)| d.value > r.threshold).count();
    let max_ratio_dagger = scan.records.iter().zip(&daggers).map(|(r, d)| d.value / r.threshold).fold(0.0, f64::max);

    s.check(scan.records.len() == set.len(), format!("E*(x, q) reported for all {} moduli", set.len()));
    s.check(
        scan.records.iter().all(|r| r.exceptional == (r.e_value > r.threshold) && r.e_value >= 0.0),
        "exceptional flags agree with E* > threshold",
    );
    s.note(format!("x = {x}, A = {}, Q = {q_base}, S = {:?}", cfg.exceptions_a, set.members));
    s.note(format!("exceptional moduli: {} (max E*/threshold = {:.4})", scan.count_exceptional, scan.max_ratio));
    s.note(format!("with E† in place of E*: {count_dagger} (max ratio {max_ratio_dagger:.4})"));
    for w in &scan.warnings {
        s.note(format!("warning: {w}"));
    }

    out.csv("exceptions.csv", &["q", "phi_q", "E_star", "y_star", "threshold", "exceptional"], &rows)?;
    out.csv("exceptions_dagger.csv", &["q", "phi_q", "E_dagger", "y_star", "threshold", "exceptional"], &dagger_rows)?;
    out.json(
        "exceptions.json",
        &ExceptionsJson {
            x,
            q: q_base,
            a: cfg.exceptions_a,
            moduli: set.members.clone(),
            count_exceptional: scan.count_exceptional,
            max_ratio: scan.max_ratio,
            count_exceptional_dagger: count_dagger,
            max_ratio_dagger,
            warnings: scan.warnings.clone(),
        },
    )?;
    Ok(s)
}
