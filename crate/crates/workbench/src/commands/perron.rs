use bv_core::characters::DirichletCharacter;
use bv_core::dirichlet_poly::{CoefficientSpec, DirichletPolynomial};
use bv_core::perron::{height_study, horizontal_bound_check, sigma_grid, ContourSpec};
use serde::Serialize;

use super::Summary;
use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Serialize)]
struct PerronJson {
    y: f64,
    support: (u64, u64),
    sigma0: f64,
    log_x: f64,
    monotone: bool,
    horizontal_worst_ratio: f64,
    exact: f64,
    errors: Vec<(f64, f64)>,
}

pub fn run(cfg: &Config, out: &Output) -> CliResult<Summary> {
    let mut s = Summary::new("perron");
    let (lo, hi) = cfg.perron_support;
    let family = [DirichletPolynomial::new(CoefficientSpec::unit(lo, hi)?, DirichletCharacter::trivial())];
    let log_x = cfg.perron_log_x.unwrap_or_else(|| cfg.run.x_scale.ln());
    let spec = ContourSpec::new(log_x, cfg.perron_heights[0])?;
    let study = height_study(&family, cfg.perron_y, &spec, &cfg.perron_heights)?;

    let mut worst = 0.0f64;
    let mut horizontal_ok = true;
    for &h in &cfg.perron_heights {
        let r = horizontal_bound_check(&family, &sigma_grid(spec.sigma0, cfg.perron_sigma_points), h)?;
        horizontal_ok &= r.holds();
        worst = worst.max(r.lhs);
    }
    s.check(horizontal_ok, format!("horizontal triangle bound at every grid point (worst ratio {worst:.6})"));
    s.check(
        study.results.iter().all(|r| r.exact == r.exact_convolution),
        "tuple enumeration and Dirichlet convolution give the same exact sum",
    );
    let rows: Vec<Vec<String>> = study
        .results
        .iter()
        .map(|r| {
            vec![
                r.y.to_string(),
                r.height.to_string(),
                r.approx.re.to_string(),
                r.approx.im.to_string(),
                r.exact.re.to_string(),
                r.exact.im.to_string(),
                r.error.to_string(),
            ]
        })
        .collect();
    for r in &study.results {
        s.note(format!("H = {}: approx {:.12}, exact {}, error {:.3e}", r.height, r.approx.re, r.exact.re, r.error));
    }
    s.note(format!("error decreases along the heights: {}", study.monotone()));

    out.csv("perron.csv", &["y", "height", "approx_re", "approx_im", "exact_re", "exact_im", "abs_error"], &rows)?;
    out.json(
        "perron.json",
        &PerronJson {
            y: cfg.perron_y,
            support: cfg.perron_support,
            sigma0: spec.sigma0,
            log_x,
            monotone: study.monotone(),
            horizontal_worst_ratio: worst,
            exact: study.results.first().map_or(0.0, |r| r.exact.re),
            errors: study.results.iter().map(|r| (r.height, r.error)).collect(),
        },
    )?;
    Ok(s)
}
