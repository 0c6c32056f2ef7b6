//! On-disk cache of modular-symbol spaces.
//!
//! One canonical JSON file per level, `level-<N>.v<FORMAT>.json`, holding the level, the
//! dimension, the basis of H₁ inside M, the star matrix and every Hecke matrix computed so far.
//! Integers are written as decimal strings. The structural part is recomputed on load and
//! compared with the stored copy; only the Hecke matrices are taken from disk.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use modvis_linalg::IntegerMatrix;

use crate::error::{Error, Result};
use crate::modsym::{build_space, HeckeMatrix, ModSymSpace};

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StoredMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl StoredMatrix {
    fn from_matrix(m: &IntegerMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|x| x.to_string()).collect() }
    }

    fn to_matrix(&self) -> std::result::Result<IntegerMatrix, String> {
        let entries = self
            .entries
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| format!("bad entry {s:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntegerMatrix::new(self.rows, self.cols, entries).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StoredHecke {
    index: u64,
    matrix: StoredMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct StoredSpace {
    format_version: u32,
    level: u64,
    dimension: usize,
    h1_basis: StoredMatrix,
    star: StoredMatrix,
    hecke: Vec<StoredHecke>,
}

/// How a space was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// A file with another format version was found and ignored.
    Stale,
    /// The file could not be used; the space was recomputed.
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct SpaceCache {
    dir: PathBuf,
}

impl SpaceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, level: u64) -> PathBuf {
        self.dir.join(format!("level-{level}.v{CACHE_FORMAT_VERSION}.json"))
    }

    /// Loads the space for `level`, recomputing it when the file is missing, stale or corrupt.
    pub fn load_or_build(&self, level: u64) -> Result<(ModSymSpace, CacheStatus)> {
        let path = self.path_for(level);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((build_space(level)?, CacheStatus::Miss)),
            Err(e) => return Err(e.into()),
        };
        let space = build_space(level)?;
        match restore(&space, &bytes, &path) {
            Ok(true) => Ok((space, CacheStatus::Hit)),
            Ok(false) => Ok((space, CacheStatus::Stale)),
            Err(e) => {
                // the space may hold partially inserted matrices
                let space = build_space(level)?;
                Ok((space, CacheStatus::Corrupt(e.to_string())))
            }
        }
    }

    /// Writes the space and all its computed Hecke matrices.
    pub fn store(&self, space: &ModSymSpace) -> Result<()> {
        let bytes = serialize_space(space)?;
        let path = self.path_for(space.level());
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

fn serialize_space(space: &ModSymSpace) -> Result<Vec<u8>> {
    let hecke = space
        .cached_hecke_indices()
        .into_iter()
        .map(|n| {
            let h = space.hecke_matrix(n);
            StoredHecke { index: n, matrix: StoredMatrix::from_matrix(&h.matrix) }
        })
        .collect();
    let stored = StoredSpace {
        format_version: CACHE_FORMAT_VERSION,
        level: space.level(),
        dimension: space.dimension(),
        h1_basis: StoredMatrix::from_matrix(&space.h1_basis_in_m()),
        star: StoredMatrix::from_matrix(space.star_matrix()),
        hecke,
    };
    let mut bytes = serde_json::to_vec(&stored)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Checks stored data against a freshly built space and inserts the stored Hecke matrices.
/// Returns false for a file of another format version.
fn restore(space: &ModSymSpace, bytes: &[u8], path: &Path) -> Result<bool> {
    let corrupt = |message: String| Error::CacheCorrupt { path: path.display().to_string(), message };
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| corrupt(e.to_string()))?;
    if value.get("format_version").and_then(|v| v.as_u64()) != Some(CACHE_FORMAT_VERSION as u64) {
        return Ok(false);
    }
    let stored: StoredSpace = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    if stored.level != space.level() || stored.dimension != space.dimension() {
        return Err(corrupt(format!("file describes level {} of dimension {}", stored.level, stored.dimension)));
    }
    if stored.h1_basis.to_matrix().map_err(&corrupt)? != space.h1_basis_in_m() {
        return Err(corrupt("H1 basis differs from the recomputed one".into()));
    }
    if &stored.star.to_matrix().map_err(&corrupt)? != space.star_matrix() {
        return Err(corrupt("star matrix differs from the recomputed one".into()));
    }
    let k = space.dimension();
    let mut mats = Vec::with_capacity(stored.hecke.len());
    for h in &stored.hecke {
        let m = h.matrix.to_matrix().map_err(&corrupt)?;
        if m.rows() != k || m.cols() != k || h.index == 0 {
            return Err(corrupt(format!("Hecke matrix T_{} has the wrong shape", h.index)));
        }
        mats.push(HeckeMatrix { index: h.index, matrix: m });
    }
    for h in mats {
        space.insert_hecke(h);
    }
    Ok(true)
}

/// Serializes and restores a space through the cache format, without touching the disk.
pub fn cache_roundtrip(space: &ModSymSpace) -> Result<ModSymSpace> {
    let bytes = serialize_space(space)?;
    let fresh = build_space(space.level())?;
    if !restore(&fresh, &bytes, Path::new("<memory>"))? {
        return Err(Error::Internal("format version changed during roundtrip".into()));
    }
    Ok(fresh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same(a: &ModSymSpace, b: &ModSymSpace) -> bool {
        a.h1_basis_in_m() == b.h1_basis_in_m()
            && a.star_matrix() == b.star_matrix()
            && a.cached_hecke_indices() == b.cached_hecke_indices()
            && a.cached_hecke_indices().iter().all(|&n| a.hecke_matrix(n) == b.hecke_matrix(n))
    }

    #[test]
    fn roundtrip_in_memory() {
        let s = build_space(37).unwrap();
        for n in [2, 3, 5, 37] {
            s.hecke_matrix(n);
        }
        let t = cache_roundtrip(&s).unwrap();
        assert!(same(&s, &t));
        assert_eq!(serialize_space(&s).unwrap(), serialize_space(&t).unwrap());
    }

    #[test]
    fn disk_hit_stale_and_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpaceCache::new(dir.path()).unwrap();
        let (s, st) = cache.load_or_build(11).unwrap();
        assert_eq!(st, CacheStatus::Miss);
        s.hecke_matrix(2);
        s.hecke_matrix(3);
        cache.store(&s).unwrap();
        let (t, st) = cache.load_or_build(11).unwrap();
        assert_eq!(st, CacheStatus::Hit);
        assert_eq!(t.cached_hecke_indices(), vec![2, 3]);
        assert!(same(&s, &t));

        let path = cache.path_for(11);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("\"format_version\":1", "\"format_version\":0")).unwrap();
        let (_, st) = cache.load_or_build(11).unwrap();
        assert_eq!(st, CacheStatus::Stale);

        fs::write(&path, &text.as_bytes()[..text.len() / 2]).unwrap();
        let (u, st) = cache.load_or_build(11).unwrap();
        assert!(matches!(st, CacheStatus::Corrupt(_)));
        assert!(u.cached_hecke_indices().is_empty());
        assert_eq!(u.hecke_matrix(2), s.hecke_matrix(2));
    }

    #[test]
    fn tampered_matrix_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SpaceCache::new(dir.path()).unwrap();
        let s = build_space(11).unwrap();
        cache.store(&s).unwrap();
        let path = cache.path_for(11);
        let text = fs::read_to_string(&path).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["star"]["entries"][0] = serde_json::Value::String("7".into());
        fs::write(&path, v.to_string()).unwrap();
        let (_, st) = cache.load_or_build(11).unwrap();
        assert!(matches!(st, CacheStatus::Corrupt(m) if m.contains("star")));
    }
}
