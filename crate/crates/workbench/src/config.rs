//! `key = value` configuration with one `[section]` per subcommand.
//!
//! Every key has a default, so an empty file is valid. Unknown sections
//! and keys are rejected rather than ignored.

use std::path::{Path, PathBuf};

use bv_core::arith::DEFAULT_CEILING;
use bv_core::dirichlet_poly::DEFAULT_X_SCALE;
use bv_core::exponents::{parse_rational, theta_max, FactorSource, GridStep, Rational};
use ini::Ini;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuliChoice {
    PrimePowers,
    Primes,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    /// 0 lets the thread pool pick.
    pub workers: usize,
    pub output_dir: PathBuf,
    pub table_cache: PathBuf,
    pub x_scale: f64,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub run: RunConfig,
    pub sieve_limit: u64,
    pub characters_q_max: u64,
    pub characters_primitive_q_max: u64,
    pub exceptions_x: u64,
    pub exceptions_a: f64,
    pub exceptions_moduli: ModuliChoice,
    /// Defaults to `floor(x^{9/40})`.
    pub exceptions_q: Option<u64>,
    pub hb_x: u64,
    pub hb_n_max: u64,
    pub hb_grid_x: u64,
    pub meanvalue_q: Vec<u64>,
    pub meanvalue_t: Vec<f64>,
    pub meanvalue_n_log2: (u32, u32),
    pub meanvalue_b: u32,
    pub meanvalue_v_samples: usize,
    pub lemma4_grid_step: GridStep,
    pub lemma4_random_tuples: usize,
    pub exponents_grid_step: GridStep,
    pub exponents_theta: Rational,
    pub exponents_source: FactorSource,
    pub perron_y: f64,
    pub perron_support: (u64, u64),
    pub perron_heights: Vec<f64>,
    /// Defaults to `log x_scale`.
    pub perron_log_x: Option<f64>,
    pub perron_sigma_points: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            run: RunConfig {
                seed: 0,
                workers: 0,
                output_dir: PathBuf::from("out"),
                table_cache: PathBuf::from("out/tables.bvml"),
                x_scale: DEFAULT_X_SCALE,
            },
            sieve_limit: 1_000_000,
            characters_q_max: 200,
            characters_primitive_q_max: 2000,
            exceptions_x: 1_000_000,
            exceptions_a: 1.0,
            exceptions_moduli: ModuliChoice::PrimePowers,
            exceptions_q: None,
            hb_x: 10_000,
            hb_n_max: 10_000,
            hb_grid_x: 4096,
            meanvalue_q: vec![4, 8, 16],
            meanvalue_t: vec![16.0, 64.0],
            meanvalue_n_log2: (6, 12),
            meanvalue_b: 2,
            meanvalue_v_samples: 100,
            lemma4_grid_step: GridStep::Eighth,
            lemma4_random_tuples: 100_000,
            exponents_grid_step: GridStep::Fortieth,
            exponents_theta: theta_max(),
            exponents_source: FactorSource::Printed,
            perron_y: 10.5,
            perron_support: (4, 8),
            perron_heights: vec![1_048_576.0, 2_097_152.0, 4_194_304.0],
            perron_log_x: None,
            perron_sigma_points: 65,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim().parse().map_err(|_| CliError::invalid(key, format!("cannot read {v:?} as a number")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<Vec<T>> {
    let out = v.split(',').map(|s| num(key, s)).collect::<CliResult<Vec<T>>>()?;
    if out.is_empty() {
        return Err(CliError::invalid(key, "empty list"));
    }
    Ok(out)
}

fn pair(key: &str, v: &str) -> CliResult<(u64, u64)> {
    match list::<u64>(key, v)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::invalid(key, "expected two comma-separated integers")),
    }
}

fn rational(key: &str, v: &str) -> CliResult<Rational> {
    parse_rational(v.trim()).map_err(|e| CliError::invalid(key, e.to_string()))
}

fn grid_step(key: &str, v: &str) -> CliResult<GridStep> {
    GridStep::from_rational(rational(key, v)?).map_err(|e| CliError::invalid(key, e.to_string()))
}

impl Config {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> CliResult<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let mut c = Config::default();
        for (section, props) in ini.iter() {
            for (key, v) in props.iter() {
                let Some(section) = section else {
                    return Err(CliError::UnknownKey(key.to_string()));
                };
                let full = format!("{section}.{key}");
                let k = full.as_str();
                match (section, key) {
                    ("run", "seed") => c.run.seed = num(k, v)?,
                    ("run", "workers") => c.run.workers = num(k, v)?,
                    ("run", "output_dir") => c.run.output_dir = PathBuf::from(v.trim()),
                    ("run", "table_cache") => c.run.table_cache = PathBuf::from(v.trim()),
                    ("run", "x_scale") => c.run.x_scale = num(k, v)?,
                    ("sieve", "limit") => c.sieve_limit = num(k, v)?,
                    ("characters", "q_max") => c.characters_q_max = num(k, v)?,
                    ("characters", "primitive_q_max") => c.characters_primitive_q_max = num(k, v)?,
                    ("exceptions", "x") => c.exceptions_x = num(k, v)?,
                    ("exceptions", "A") => c.exceptions_a = num(k, v)?,
                    ("exceptions", "Q") => c.exceptions_q = Some(num(k, v)?),
                    ("exceptions", "moduli") => {
                        c.exceptions_moduli = match v.trim() {
                            "prime-powers" => ModuliChoice::PrimePowers,
                            "primes" => ModuliChoice::Primes,
                            other => {
                                return Err(CliError::invalid(k, format!("{other:?} is not prime-powers or primes")))
                            }
                        }
                    }
                    ("hb-verify", "x") => c.hb_x = num(k, v)?,
                    ("hb-verify", "n_max") => c.hb_n_max = num(k, v)?,
                    ("hb-verify", "grid_x") => c.hb_grid_x = num(k, v)?,
                    ("meanvalue", "Q") => c.meanvalue_q = list(k, v)?,
                    ("meanvalue", "T") => c.meanvalue_t = list(k, v)?,
                    ("meanvalue", "n_log2") => {
                        let (a, b) = pair(k, v)?;
                        c.meanvalue_n_log2 = (a as u32, b as u32);
                    }
                    ("meanvalue", "b") => c.meanvalue_b = num(k, v)?,
                    ("meanvalue", "v_samples") => c.meanvalue_v_samples = num(k, v)?,
                    ("lemma4", "grid_step") => c.lemma4_grid_step = grid_step(k, v)?,
                    ("lemma4", "random_tuples") => c.lemma4_random_tuples = num(k, v)?,
                    ("exponents", "grid_step") => c.exponents_grid_step = grid_step(k, v)?,
                    ("exponents", "theta") => c.exponents_theta = rational(k, v)?,
                    ("exponents", "source") => {
                        c.exponents_source = match v.trim() {
                            "printed" => FactorSource::Printed,
                            "definition" => FactorSource::Definition,
                            other => {
                                return Err(CliError::invalid(k, format!("{other:?} is not printed or definition")))
                            }
                        }
                    }
                    ("perron", "y") => c.perron_y = num(k, v)?,
                    ("perron", "support") => c.perron_support = pair(k, v)?,
                    ("perron", "heights") => c.perron_heights = list(k, v)?,
                    ("perron", "log_x") => c.perron_log_x = Some(num(k, v)?),
                    ("perron", "sigma_points") => c.perron_sigma_points = num(k, v)?,
                    _ => return Err(CliError::UnknownKey(full)),
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |key: &str, why: &str| Err(CliError::invalid(key, why));
        if !(self.run.x_scale > 1.0 && self.run.x_scale.is_finite()) {
            return bad("run.x_scale", "must exceed 1");
        }
        if !(2..=DEFAULT_CEILING).contains(&self.sieve_limit) {
            return bad("sieve.limit", "must lie in [2, 10^8]");
        }
        if self.characters_q_max == 0 || self.characters_primitive_q_max == 0 {
            return bad("characters.q_max", "moduli ranges must be non-empty");
        }
        if !(2..=DEFAULT_CEILING).contains(&self.exceptions_x) {
            return bad("exceptions.x", "must lie in [2, 10^8]");
        }
        if !self.exceptions_a.is_finite() {
            return bad("exceptions.A", "must be finite");
        }
        if self.exceptions_q.is_some_and(|q| q < 3) {
            return bad("exceptions.Q", "must be at least 3");
        }
        if self.hb_n_max > self.hb_x || self.hb_x < 16 || self.hb_x > DEFAULT_CEILING {
            return bad("hb-verify.n_max", "need 16 <= x <= 10^8 and n_max <= x");
        }
        if self.hb_grid_x < 256 {
            return bad("hb-verify.grid_x", "must be at least 2^8");
        }
        if self.meanvalue_q.contains(&0) || self.meanvalue_t.iter().any(|&t| !(t >= 1.0 && t.is_finite())) {
            return bad("meanvalue.Q", "need Q >= 1 and T >= 1");
        }
        let (lo, hi) = self.meanvalue_n_log2;
        if lo > hi || hi > 24 {
            return bad("meanvalue.n_log2", "need lo <= hi <= 24");
        }
        if !(1..=8).contains(&self.meanvalue_b) {
            return bad("meanvalue.b", "must lie in 1..=8");
        }
        if self.exponents_theta < Rational::from(0) {
            return bad("exponents.theta", "must be nonnegative");
        }
        let y = self.perron_y;
        if !(y > 0.0 && y.is_finite()) || y == y.floor() {
            return bad("perron.y", "must be positive and not an integer");
        }
        let (a, b) = self.perron_support;
        if a == 0 || b <= a {
            return bad("perron.support", "need 1 <= N < N'");
        }
        if self.perron_heights.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return bad("perron.heights", "heights must be positive");
        }
        if self.perron_log_x.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
            return bad("perron.log_x", "must be positive");
        }
        if self.perron_sigma_points == 0 {
            return bad("perron.sigma_points", "must be positive");
        }
        Ok(())
    }
}
