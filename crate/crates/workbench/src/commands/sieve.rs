use bv_core::arith::build_tables;
use serde::Serialize;

use super::Summary;
use crate::cache::{read_cache, write_cache};
use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Serialize)]
struct SieveJson {
    limit: u64,
    primes: usize,
    prime_powers: usize,
    psi_limit: f64,
    cache: String,
}

pub fn run(cfg: &Config, out: &Output, limit: u64) -> CliResult<Summary> {
    let mut s = Summary::new("sieve");
    let tables = build_tables(limit)?;
    write_cache(&cfg.run.table_cache, &tables)?;
    let back = read_cache(&cfg.run.table_cache)?;
    s.check(back.phi_column() == tables.phi_column(), "cache reads back identically");

    let pp = tables.prime_powers();
    let primes = pp.iter().filter(|p| p.n == p.p).count();
    let json = SieveJson {
        limit,
        primes,
        prime_powers: pp.len(),
        psi_limit: tables.psi(limit),
        cache: cfg.run.table_cache.display().to_string(),
    };
    s.note(format!("limit {limit}: {primes} primes, {} prime powers, psi = {}", pp.len(), json.psi_limit));
    s.note(format!("cache written to {}", json.cache));
    out.json("sieve.json", &json)?;
    Ok(s)
}
