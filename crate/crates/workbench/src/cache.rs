//! Binary table cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic  b"BVML1"          5 bytes
//! limit  u64               8 bytes
//! limit + 1 records, n = 0..=limit:
//!   spf  u32               smallest prime factor (0 for n < 2)
//!   mu   i8                Möbius value
//!   phi  u32               Euler totient
//! ```
//!
//! The version lives in the magic; a reader rejects anything else.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use bv_core::arith::MultiplicativeTables;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 5] = b"BVML1";
const RECORD: usize = 9;

pub fn write_cache(path: &Path, tables: &MultiplicativeTables) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let io = |e| CliError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&tables.limit().to_le_bytes()).map_err(io)?;
    let (spf, mu, phi) = (tables.spf_column(), tables.mobius_column(), tables.phi_column());
    for n in 0..spf.len() {
        let mut rec = [0u8; RECORD];
        rec[..4].copy_from_slice(&spf[n].to_le_bytes());
        rec[4] = mu[n] as u8;
        rec[5..].copy_from_slice(&phi[n].to_le_bytes());
        w.write_all(&rec).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_cache(path: &Path) -> CliResult<MultiplicativeTables> {
    let missing = |reason: String| CliError::MissingCache { path: path.to_path_buf(), reason };
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(missing("not found; run `bvw sieve` first".into()))
        }
        Err(e) => return Err(CliError::io(path, e)),
    };
    let mut r = BufReader::new(file);
    let mut head = [0u8; 13];
    r.read_exact(&mut head).map_err(|_| missing("truncated header".into()))?;
    if &head[..5] != MAGIC {
        return Err(missing("bad magic; not a BVML1 cache".into()));
    }
    let limit = u64::from_le_bytes(head[5..].try_into().expect("8 bytes"));
    let total = usize::try_from(limit)
        .ok()
        .and_then(|l| l.checked_add(1))
        .filter(|t| t.checked_mul(RECORD).is_some())
        .ok_or_else(|| missing(format!("limit {limit} is too large")))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(|e| CliError::io(path, e))?;
    if body.len() != total * RECORD {
        return Err(missing(format!("expected {} record bytes, found {}", total * RECORD, body.len())));
    }
    let (mut spf, mut mu, mut phi) = (Vec::with_capacity(total), Vec::with_capacity(total), Vec::with_capacity(total));
    for rec in body.chunks_exact(RECORD) {
        spf.push(u32::from_le_bytes(rec[..4].try_into().expect("4 bytes")));
        mu.push(rec[4] as i8);
        phi.push(u32::from_le_bytes(rec[5..].try_into().expect("4 bytes")));
    }
    MultiplicativeTables::from_parts(limit, spf, mu, phi).map_err(|e| missing(e.to_string()))
}

/// Loads the cache and checks that it reaches `needed`.
pub fn load_covering(path: &Path, needed: u64) -> CliResult<MultiplicativeTables> {
    let t = read_cache(path)?;
    if t.limit() < needed {
        return Err(CliError::MissingCache {
            path: path.to_path_buf(),
            reason: format!("covers n <= {} but {needed} is needed; rerun `bvw sieve` with a larger limit", t.limit()),
        });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bv_core::arith::build_tables;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bvml");
        let t = build_tables(5000).unwrap();
        write_cache(&path, &t).unwrap();
        let back = read_cache(&path).unwrap();
        assert_eq!(back.limit(), 5000);
        assert_eq!(back.spf_column(), t.spf_column());
        assert_eq!(back.mobius_column(), t.mobius_column());
        assert_eq!(back.phi_column(), t.phi_column());
        assert_eq!(back.psi(5000), t.psi(5000));
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..5], b"BVML1");
        assert_eq!(bytes.len(), 13 + 5001 * 9);
    }

    #[test]
    fn rejects_damaged_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bvml");
        assert_eq!(read_cache(&path).unwrap_err().exit_code(), 4);
        std::fs::write(&path, b"BVML2\0\0\0\0\0\0\0\0").unwrap();
        assert_eq!(read_cache(&path).unwrap_err().exit_code(), 4);
        write_cache(&path, &build_tables(100).unwrap()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.pop();
        std::fs::write(&path, &bytes).unwrap();
        assert_eq!(read_cache(&path).unwrap_err().exit_code(), 4);
        write_cache(&path, &build_tables(100).unwrap()).unwrap();
        assert_eq!(load_covering(&path, 1000).unwrap_err().exit_code(), 4);
    }
}
