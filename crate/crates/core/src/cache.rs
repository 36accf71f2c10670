//! On-disk FSGIM cache.
//!
//! Layout: the magic line `FSGIM1`, one ASCII line
//! `alpha lambda n lambda_q n_q M hash` (`M + 1` evaluation points, `hash`
//! the FNV-1a 64 digest of their little-endian bytes), then the generator as
//! `(M + 1) (n + 1)` little-endian f64 values and the `M + 1` evaluation
//! points. Floats are written in shortest round-trip form, so a read
//! reproduces the stored operator bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::{debug, warn};

use crate::basis::BasisParams;
use crate::error::{FracError, Result};
use crate::fsgim::{build_fsgim, CaputoOrder, Fsgim};
use crate::grid::Grid;
use crate::linalg::Matrix;
use crate::quadrature::QuadratureRule;

pub const MAGIC: &[u8] = b"FSGIM1\n";
/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "FRACSPEC_CACHE_DIR";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn le_bytes(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn points_hash(points: &[f64]) -> u64 {
    fnv1a64(&le_bytes(points))
}

/// Everything that determines an FSGIM.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheKey {
    pub alpha: f64,
    pub lambda: f64,
    pub n: usize,
    pub lambda_q: f64,
    pub n_q: usize,
    pub eval_points: Vec<f64>,
}

impl CacheKey {
    pub fn of(op: &Fsgim) -> Self {
        Self {
            alpha: op.order().alpha(),
            lambda: op.grid().lambda(),
            n: op.grid().degree(),
            lambda_q: op.rule().grid().lambda(),
            n_q: op.rule().grid().degree(),
            eval_points: op.eval_points().to_vec(),
        }
    }

    fn metadata_line(&self) -> String {
        format!(
            "{} {} {} {} {} {} {}\n",
            self.alpha,
            self.lambda,
            self.n,
            self.lambda_q,
            self.n_q,
            self.eval_points.len().saturating_sub(1),
            points_hash(&self.eval_points)
        )
    }

    /// File name derived from the metadata line.
    pub fn file_name(&self) -> String {
        format!("fsgim-{:016x}.bin", fnv1a64(self.metadata_line().as_bytes()))
    }

    /// Builds the operator this key describes.
    pub fn build(&self) -> Result<Fsgim> {
        let grid = Grid::new(BasisParams::new(self.lambda, self.n)?)?;
        let rule = QuadratureRule::with_params(self.lambda_q, self.n_q)?;
        build_fsgim(CaputoOrder::new(self.alpha)?, &grid, &rule, &self.eval_points)
    }
}

/// Serializes `op` into the cache format.
pub fn encode(op: &Fsgim) -> Vec<u8> {
    let key = CacheKey::of(op);
    let mut out = MAGIC.to_vec();
    out.extend_from_slice(key.metadata_line().as_bytes());
    out.extend(le_bytes(op.generator().as_slice()));
    out.extend(le_bytes(op.eval_points()));
    out
}

fn corrupt(msg: impl Into<String>) -> FracError {
    FracError::CorruptCache(msg.into())
}

fn read_f64s(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect()
}

/// Parses the cache format, rebuilding the grid and rule from the metadata.
pub fn decode(bytes: &[u8]) -> Result<Fsgim> {
    let rest = bytes.strip_prefix(MAGIC).ok_or_else(|| corrupt("bad magic"))?;
    let eol = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| corrupt("missing metadata line"))?;
    let line = std::str::from_utf8(&rest[..eol]).map_err(|_| corrupt("metadata is not ASCII"))?;
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != 7 {
        return Err(corrupt(format!("expected 7 metadata fields, found {}", fields.len())));
    }
    let float = |s: &str| s.parse::<f64>().map_err(|_| corrupt(format!("bad number `{s}`")));
    let int = |s: &str| s.parse::<usize>().map_err(|_| corrupt(format!("bad integer `{s}`")));
    let alpha = float(fields[0])?;
    let lambda = float(fields[1])?;
    let n = int(fields[2])?;
    let lambda_q = float(fields[3])?;
    let n_q = int(fields[4])?;
    let rows = int(fields[5])? + 1;
    let hash = fields[6].parse::<u64>().map_err(|_| corrupt("bad hash"))?;

    let body = &rest[eol + 1..];
    let gen_len = rows.checked_mul(n + 1).ok_or_else(|| corrupt("dimensions overflow"))?;
    let expected = (gen_len + rows) * 8;
    if body.len() != expected {
        return Err(corrupt(format!("payload is {} bytes, expected {expected}", body.len())));
    }
    let (gen_bytes, point_bytes) = body.split_at(gen_len * 8);
    if fnv1a64(point_bytes) != hash {
        return Err(corrupt("evaluation-point hash mismatch"));
    }
    let generator = Matrix::from_vec(rows, n + 1, read_f64s(gen_bytes));
    let grid = Grid::new(BasisParams::new(lambda, n)?)?;
    let rule = QuadratureRule::with_params(lambda_q, n_q)?;
    Fsgim::from_generator(CaputoOrder::new(alpha)?, grid, rule, read_f64s(point_bytes), generator)
}

pub fn write_fsgim(path: &Path, op: &Fsgim) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(op))?;
    f.sync_all()?;
    Ok(())
}

pub fn read_fsgim(path: &Path) -> Result<Fsgim> {
    decode(&fs::read(path)?)
}

/// How [`load_or_build`] obtained its operator.
#[derive(Clone, Debug, PartialEq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// The cached file was unusable; the message says why.
    Rebuilt(String),
}

/// `FRACSPEC_CACHE_DIR` if set.
pub fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Reads the operator for `key` from `path`, or builds it and writes it
/// there. Corrupt or mismatched files are replaced.
pub fn load_or_build_at(path: &Path, key: &CacheKey) -> Result<(Fsgim, CacheStatus)> {
    let mut status = CacheStatus::Built;
    if path.exists() {
        match read_fsgim(path) {
            Ok(op) if CacheKey::of(&op) == *key => {
                debug!("FSGIM cache hit at {}", path.display());
                return Ok((op, CacheStatus::Hit));
            }
            Ok(_) => {
                warn!("{} holds a different FSGIM; rebuilding", path.display());
                status = CacheStatus::Rebuilt("parameters differ".into());
            }
            Err(FracError::Io(e)) => return Err(FracError::Io(e)),
            Err(e) => {
                warn!("{}: {e}; rebuilding", path.display());
                status = CacheStatus::Rebuilt(e.to_string());
            }
        }
    }
    let op = key.build()?;
    write_fsgim(path, &op)?;
    Ok((op, status))
}

/// [`load_or_build_at`] inside `dir`, under [`CacheKey::file_name`].
pub fn load_or_build(dir: &Path, key: &CacheKey) -> Result<(Fsgim, CacheStatus)> {
    fs::create_dir_all(dir)?;
    load_or_build_at(&dir.join(key.file_name()), key)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> CacheKey {
        CacheKey {
            alpha: 1.3,
            lambda: 0.7,
            n: 6,
            lambda_q: 0.5,
            n_q: 9,
            eval_points: vec![0.0, 0.1, 1.0 / 3.0, 0.9, 1.0],
        }
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x8594_4171_f739_67e8);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let op = key().build().unwrap();
        let back = decode(&encode(&op)).unwrap();
        assert_eq!(back.generator(), op.generator());
        assert_eq!(back.matrix(), op.matrix());
        assert_eq!(back.eval_points(), op.eval_points());
        assert_eq!(CacheKey::of(&back), key());
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&key().build().unwrap());
        assert!(bytes.starts_with(b"FSGIM1\n1.3 0.7 6 0.5 9 4 "));
        assert_eq!(bytes.len(), 7 + key().metadata_line().len() + (5 * 7 + 5) * 8);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = encode(&key().build().unwrap());
        assert!(matches!(
            decode(&bytes[..bytes.len() - 3]),
            Err(FracError::CorruptCache(_))
        ));
        let mut flipped = bytes.clone();
        let last = flipped.len() - 1;
        flipped[last] ^= 0x40;
        assert!(matches!(decode(&flipped), Err(FracError::CorruptCache(_))));
        assert!(matches!(decode(b"FSGIM2\n"), Err(FracError::CorruptCache(_))));
        assert!(matches!(decode(b"FSGIM1\n1 2 3\n"), Err(FracError::CorruptCache(_))));
    }

    #[test]
    fn load_or_build_reuses_and_repairs() {
        let dir = tempfile::tempdir().unwrap();
        let k = key();
        let (a, s) = load_or_build(dir.path(), &k).unwrap();
        assert_eq!(s, CacheStatus::Built);
        let (b, s) = load_or_build(dir.path(), &k).unwrap();
        assert_eq!(s, CacheStatus::Hit);
        assert_eq!(a.matrix(), b.matrix());

        let path = dir.path().join(k.file_name());
        let len = fs::metadata(&path).unwrap().len();
        let f = fs::OpenOptions::new().write(true).open(&path).unwrap();
        f.set_len(len / 2).unwrap();
        let (c, s) = load_or_build(dir.path(), &k).unwrap();
        assert!(matches!(s, CacheStatus::Rebuilt(_)));
        assert_eq!(c.matrix(), a.matrix());
        assert_eq!(load_or_build(dir.path(), &k).unwrap().1, CacheStatus::Hit);
    }

    #[test]
    fn distinct_keys_get_distinct_files() {
        let mut other = key();
        other.eval_points[1] = 0.2;
        assert_ne!(key().file_name(), other.file_name());
    }
}
