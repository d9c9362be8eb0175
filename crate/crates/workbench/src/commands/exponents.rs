use bv_core::exponents::cases::{printed_discrepancies, published_fractions};
use bv_core::exponents::{logpower_ledger, polytope_scan, theta_max, FactorSource};
use serde::Serialize;

use super::Summary;
use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Serialize)]
struct CertificateJson {
    grid_step: String,
    theta: String,
    source: String,
    tuples: usize,
    bounds_checked: usize,
    partition_failures: usize,
    violating_tuples: usize,
    certified: bool,
    worst_case_id: String,
    worst_tuple: Vec<String>,
    worst_tau: String,
    /// Largest `combined - (39/40 τ + 1/2)`, exact.
    slack: String,
    per_case: Vec<(String, String)>,
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("exponents");
    let scan = polytope_scan(cfg.exponents_grid_step, cfg.exponents_theta, cfg.exponents_source)?;
    let source = match scan.source {
        FactorSource::Printed => "printed",
        FactorSource::Definition => "definition",
    };
    s.check(
        scan.certified(),
        format!(
            "grid {} at θ = {} ({source} chains): all {} tuples satisfy T^(39/40 τ) x^(1/2)",
            scan.grid_step, scan.theta, scan.tuples
        ),
    );
    s.note(format!(
        "worst slack {} from {} at τ = {}, tuple [{}]",
        scan.worst.slack,
        scan.worst.case_id,
        scan.worst.tau,
        scan.worst.tuple.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
    ));
    if scan.theta > theta_max() {
        s.note("θ exceeds 9/40; a failure here is the expected outcome of the probe");
    }

    let fractions = published_fractions();
    for f in &fractions {
        s.check(f.holds(), format!("{}: computed {} against printed {}", f.name, f.computed, f.published));
    }
    let ledger = logpower_ledger();
    s.check(ledger.all_hold(), format!("log-power ledger: {} entries", ledger.entries.len()));
    for d in printed_discrepancies() {
        s.note(format!(
            "{} {} factor: printed T^{} (slack {}), from the definition T^{} (slack {})",
            d.chain, d.factor, d.printed_t, d.printed_slack, d.definition_t, d.definition_slack
        ));
    }

    out.json(
        "certificate.json",
        &CertificateJson {
            grid_step: scan.grid_step.to_string(),
            theta: scan.theta.to_string(),
            source: source.into(),
            tuples: scan.tuples,
            bounds_checked: scan.bounds_checked,
            partition_failures: scan.partition_failures,
            violating_tuples: scan.violating_tuples,
            certified: scan.certified(),
            worst_case_id: scan.worst.case_id.to_string(),
            worst_tuple: scan.worst.tuple.iter().map(|r| r.to_string()).collect(),
            worst_tau: scan.worst.tau.to_string(),
            slack: scan.worst.slack.to_string(),
            per_case: scan.per_case.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        },
    )?;
    let ledger_rows: Vec<Vec<String>> = ledger
        .entries
        .iter()
        .map(|e| {
            vec![
                e.name.clone(),
                e.value.to_string(),
                if e.equality { "=" } else { "<=" }.to_string(),
                e.bound.to_string(),
                e.holds().to_string(),
            ]
        })
        .collect();
    out.csv("ledger.csv", &["entry", "value", "relation", "bound", "holds"], &ledger_rows)?;
    let fraction_rows: Vec<Vec<String>> = fractions
        .iter()
        .map(|f| {
            vec![
                f.name.to_string(),
                f.computed.to_string(),
                f.published.to_string(),
                f.exact.to_string(),
                f.holds().to_string(),
            ]
        })
        .collect();
    out.csv("fractions.csv", &["name", "computed", "printed", "exact", "holds"], &fraction_rows)?;
    Ok(s)
}
