mod characters;
mod exceptions;
mod exponents;
mod hb;
mod lemma4;
mod meanvalue;
mod perron;
mod sieve;

use crate::config::Config;
use crate::error::CliResult;
use crate::output::Output;

pub use lemma4::random_tuple;

/// Human-readable outcome of one subcommand.
#[derive(Debug, Default)]
pub struct Summary {
    pub name: String,
    pub lines: Vec<String>,
    /// Hard assertions that failed.
    pub failures: Vec<String>,
}

impl Summary {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Self::default() }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        if !ok {
            self.failures.push(what);
        }
    }

    /// Writes `<name>_summary.txt`.
    fn finish(self, out: &Output) -> CliResult<Self> {
        let mut lines = vec![format!("# {}", self.name)];
        lines.extend(self.lines.iter().cloned());
        lines.push(format!("hard assertions failed: {}", self.failures.len()));
        out.text(&format!("{}_summary.txt", self.name), &lines)?;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Build the multiplicative tables and write the cache
    Sieve,
    /// Character group and primitivity audits
    Characters,
    /// Exceptional moduli at x
    Exceptions,
    /// Heath-Brown identity and the dyadic grid
    HbVerify,
    /// Mean-value, fourth-moment, large-value and divisor sweeps
    Meanvalue,
    /// Partition lemma on a grid and on random tuples
    Lemma4,
    /// Polytope scan, published fractions and the log-power ledger
    Exponents,
    /// Truncated Perron integral study
    Perron,
    /// Everything above, in order
    All,
}

pub fn run(cmd: Command, cfg: &Config, out: &Output) -> CliResult<Vec<Summary>> {
    let one = |s: CliResult<Summary>| -> CliResult<Vec<Summary>> { Ok(vec![s?.finish(out)?]) };
    match cmd {
        Command::Sieve => one(sieve::run(cfg, out, cfg.sieve_limit)),
        Command::Characters => one(characters::run(cfg, out)),
        Command::Exceptions => one(exceptions::run(cfg, out)),
        Command::HbVerify => one(hb::run(cfg, out)),
        Command::Meanvalue => one(meanvalue::run(cfg, out)),
        Command::Lemma4 => one(lemma4::run(cfg, out)),
        Command::Exponents => one(exponents::run(cfg, out)),
        Command::Perron => one(perron::run(cfg, out)),
        Command::All => {
            let limit = cfg.sieve_limit.max(cfg.exceptions_x).max(cfg.hb_x);
            let mut all = vec![sieve::run(cfg, out, limit)?.finish(out)?];
            for cmd in [
                Command::Characters,
                Command::Exceptions,
                Command::HbVerify,
                Command::Meanvalue,
                Command::Lemma4,
                Command::Exponents,
                Command::Perron,
            ] {
                all.extend(run(cmd, cfg, out)?);
            }
            Ok(all)
        }
    }
}
