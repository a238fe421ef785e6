//! On-disk cache of Q-function coefficients.
//!
//! Entries are keyed by `(partition, cutoff, convention version)` and stored
//! as the canonical versioned JSON of [`OddPolynomial`]. Writers stage into a
//! temporary file and rename, so concurrent readers never observe a partial
//! entry (exclusive-writer / shared-reader contract).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::algebra::partitions::{strict_partitions, StrictPartition};
use crate::algebra::poly::OddPolynomial;

use super::{q_schur, QError, QFunction};

/// Bumped whenever the Q-function convention changes; cached coefficients
/// from different conventions never mix.
pub const CONVENTION_VERSION: u32 = 1;

pub struct QCache {
    dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheStat {
    pub entries: usize,
    pub bytes: u64,
    pub convention_version: u32,
}

impl QCache {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(QCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_name(lam: &StrictPartition, cutoff: u32) -> String {
        let parts = if lam.is_empty() {
            "empty".to_string()
        } else {
            lam.parts()
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("-")
        };
        format!("q-{parts}-c{cutoff}-v{CONVENTION_VERSION}.json")
    }

    fn is_cache_file(name: &str) -> bool {
        name.starts_with("q-") && name.ends_with(".json") && name.contains("-v")
    }

    /// Cached polynomial for `(λ, cutoff)` under the current convention, if
    /// present and readable.
    pub fn get(&self, lam: &StrictPartition, cutoff: u32) -> Option<OddPolynomial> {
        let path = self.dir.join(Self::file_name(lam, cutoff));
        let data = fs::read_to_string(path).ok()?;
        OddPolynomial::from_canonical_json(&data).ok()
    }

    pub fn put(&self, lam: &StrictPartition, cutoff: u32, poly: &OddPolynomial) -> io::Result<()> {
        let path = self.dir.join(Self::file_name(lam, cutoff));
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.subsec_nanos())
            .unwrap_or(0);
        let tmp = self
            .dir
            .join(format!(".tmp-{}-{}-{}", std::process::id(), nanos, path.file_name().unwrap().to_string_lossy()));
        fs::write(&tmp, poly.to_canonical_json())?;
        fs::rename(&tmp, &path)
    }

    /// Precompute `Q_λ` for every strict `|λ| <= max_weight` (each stored at
    /// its minimal cutoff `|λ|`); returns the number of entries ensured.
    pub fn warm(&self, max_weight: u32) -> Result<usize, QError> {
        let mut count = 0usize;
        for lam in strict_partitions(max_weight) {
            let cutoff = lam.weight();
            if self.get(&lam, cutoff).is_none() {
                let q = q_schur(&lam, cutoff)?;
                self.put(&lam, cutoff, &q.polynomial)
                    .map_err(|e| QError::Cache(e.to_string()))?;
            }
            count += 1;
        }
        Ok(count)
    }

    pub fn stat(&self) -> io::Result<CacheStat> {
        let mut entries = 0usize;
        let mut bytes = 0u64;
        for entry in fs::read_dir(&self.dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().to_string();
            if Self::is_cache_file(&name) {
                entries += 1;
                bytes += entry.metadata()?.len();
            }
        }
        Ok(CacheStat { entries, bytes, convention_version: CONVENTION_VERSION })
    }

    /// Removes cache entries (any convention version); foreign files stay.
    pub fn clear(&self) -> io::Result<usize> {
        let mut removed = 0usize;
        for entry in fs::read_dir(&self.dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().to_string();
            if Self::is_cache_file(&name) {
                fs::remove_file(entry.path())?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

/// `q_schur` through the cache: hit returns the stored polynomial, miss
/// computes and stores it.
pub fn q_schur_cached(
    cache: &QCache,
    lam: &StrictPartition,
    cutoff: u32,
) -> Result<QFunction, QError> {
    if let Some(polynomial) = cache.get(lam, cutoff) {
        return Ok(QFunction { partition: lam.clone(), polynomial });
    }
    let q = q_schur(lam, cutoff)?;
    cache
        .put(lam, cutoff, &q.polynomial)
        .map_err(|e| QError::Cache(e.to_string()))?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::partitions::strict_partitions;

    #[test]
    fn round_trip_and_warm_counts() {
        let dir = tempfile::tempdir().unwrap();
        let cache = QCache::new(dir.path()).unwrap();

        assert_eq!(cache.clear().unwrap(), 0); // clear on empty cache: no-op

        let lam = StrictPartition::new(vec![2, 1]).unwrap();
        let direct = q_schur(&lam, 5).unwrap();
        let via_cache = q_schur_cached(&cache, &lam, 5).unwrap();
        assert_eq!(direct, via_cache);
        let again = q_schur_cached(&cache, &lam, 5).unwrap();
        assert_eq!(direct, again);

        let warmed = cache.warm(6).unwrap();
        assert_eq!(warmed, strict_partitions(6).len());

        let stat = cache.stat().unwrap();
        assert!(stat.entries >= warmed);
        assert!(stat.bytes > 0);
        assert_eq!(stat.convention_version, CONVENTION_VERSION);

        let removed = cache.clear().unwrap();
        assert_eq!(removed, stat.entries);
        assert_eq!(cache.stat().unwrap().entries, 0);
    }

    #[test]
    fn cached_warm_entries_reload_identically() {
        let dir = tempfile::tempdir().unwrap();
        let cache = QCache::new(dir.path()).unwrap();
        cache.warm(5).unwrap();
        for lam in strict_partitions(5) {
            let cutoff = lam.weight();
            let cached = cache.get(&lam, cutoff).expect("warmed entry present");
            assert_eq!(cached, q_schur(&lam, cutoff).unwrap().polynomial);
        }
    }
}
