//! Report files. Nothing written here depends on timing or worker count,
//! so equal configs give byte-identical files.

use std::path::{Path, PathBuf};

use bv_core::BoundReport;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<R: AsRef<[String]>>(&self, name: &str, header: &[&str], rows: &[R]) -> CliResult<()> {
        let path = self.path(name);
        let err = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(&path, io),
            other => CliError::io(&path, std::io::Error::other(format!("{other:?}"))),
        };
        let mut w = csv::Writer::from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r.as_ref()).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::io(&path, std::io::Error::other(e.to_string())))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }

    pub fn text(&self, name: &str, lines: &[String]) -> CliResult<()> {
        let path = self.path(name);
        let mut text = lines.join("\n");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

pub const REPORT_HEADER: [&str; 5] = ["inequality", "lhs", "rhs", "ratio", "parameters"];

/// One CSV row per report; parameters are `name=value` joined by `;`.
pub fn report_row(r: &BoundReport) -> Vec<String> {
    let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
    vec![r.label.clone(), r.lhs.to_string(), r.rhs_formula_value.to_string(), r.ratio.to_string(), params.join(";")]
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub parameters: Vec<(String, f64)>,
}

impl From<&BoundReport> for ReportJson {
    fn from(r: &BoundReport) -> Self {
        Self {
            inequality: r.label.clone(),
            lhs: r.lhs,
            rhs: r.rhs_formula_value,
            ratio: r.ratio,
            holds: r.holds(),
            parameters: r.parameters.clone(),
        }
    }
}
