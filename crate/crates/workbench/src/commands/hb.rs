use bv_core::heath_brown::{
    dyadic_grid, floor_log2, log_removal_check, verify_hb_identity, DyadicSize, LogRemovalLimit,
};
use serde::Serialize;

use super::Summary;
use crate::cache::load_covering;
use crate::config::Config;
use crate::error::CliResult;
use crate::output::{Output, ReportJson};

#[derive(Serialize)]
struct HbJson {
    identity: ReportJson,
    grid_x: u64,
    grid_boxes: usize,
    grid_constant: f64,
    log_removal_exact: ReportJson,
    log_removal_printed: ReportJson,
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("hb-verify");
    let tables = load_covering(&cfg.run.table_cache, cfg.hb_x)?;
    let identity = verify_hb_identity(cfg.hb_x, cfg.hb_n_max, &tables)?;
    s.check(
        identity.holds(),
        format!(
            "identity residual / (1 + log n) = {:.3e} <= 1e-9 for n <= {} at x = {}",
            identity.lhs, cfg.hb_n_max, cfg.hb_x
        ),
    );

    let grid = dyadic_grid(cfg.hb_grid_x as f64)?;
    let sbits = floor_log2(cfg.hb_grid_x as f64);
    s.check(grid.tuples.iter().all(|t| t.satisfies(sbits)), "every dyadic box satisfies both size constraints");
    s.check(grid.tuples.iter().all(|t| t.coefficient().abs() <= 6), "every box coefficient is at most 6 in size");
    s.note(format!(
        "{} boxes at x = {}, count / (log x)^8 = {:.4e}",
        grid.tuples.len(),
        cfg.hb_grid_x,
        grid.empirical_c
    ));
    let rows: Vec<Vec<String>> = grid
        .tuples
        .iter()
        .map(|t| {
            let mut r: Vec<String> = t
                .sizes
                .iter()
                .map(|d| match d {
                    DyadicSize::Degenerate => "deg".to_string(),
                    DyadicSize::Dyadic(e) => e.to_string(),
                })
                .collect();
            r.push(t.coefficient().to_string());
            r
        })
        .collect();

    // Möbius weights on (N_1, 2N_1] as the test function
    let n1 = 64u64;
    let weights: Vec<(u64, f64)> = (n1 + 1..=2 * n1).map(|n| (n, f64::from(tables.mobius(n)))).collect();
    let exact = log_removal_check(n1, &weights, LogRemovalLimit::Exact)?;
    let printed = log_removal_check(n1, &weights, LogRemovalLimit::Printed)?;
    s.check(
        (exact.lhs - exact.rhs_formula_value).abs() <= 1e-9 * (1.0 + exact.lhs.abs()),
        "log removal with upper limit 2N_1 reconstructs Σ f(n) log n",
    );
    s.note(format!(
        "log removal with upper limit N_1 differs by {:.6} (reported, see the README)",
        printed.lhs - printed.rhs_formula_value
    ));

    out.csv("dyadic_grid.csv", &["n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "coefficient"], &rows)?;
    out.json(
        "hb_verify.json",
        &HbJson {
            identity: (&identity).into(),
            grid_x: cfg.hb_grid_x,
            grid_boxes: grid.tuples.len(),
            grid_constant: grid.empirical_c,
            log_removal_exact: (&exact).into(),
            log_removal_printed: (&printed).into(),
        },
    )?;
    Ok(s)
}
