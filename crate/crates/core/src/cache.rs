//! On-disk persistence of iso-class tables.
//!
//! Entries are JSON files named by (quiver hash, q, dim). Writes go to a
//! temporary file in the same directory and are renamed into place. A corrupt
//! or invalid entry is reported and treated as absent.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::quiver::{DimVector, Quiver};
use crate::table::IsoClassTable;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "HALL_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub quiver_hash: String,
    pub q: u64,
    pub dim: DimVector,
}

impl CacheKey {
    pub fn new(quiver: &Quiver, q: u64, dim: &DimVector) -> Self {
        CacheKey {
            quiver_hash: quiver.content_hash(),
            q,
            dim: dim.clone(),
        }
    }

    pub fn file_name(&self) -> String {
        let dim: Vec<String> = self.dim.iter().map(|d| d.to_string()).collect();
        format!("{}-q{}-d{}.json", self.quiver_hash, self.q, dim.join("_"))
    }

    pub fn path(&self, dir: &Path) -> PathBuf {
        dir.join(self.file_name())
    }
}

/// The cache directory from the environment, if set and nonempty.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn cache_store(dir: &Path, key: &CacheKey, table: &IsoClassTable) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(table.to_json().as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(key.path(dir)).map_err(|e| e.error)?;
    Ok(())
}

/// Loads and validates an entry. Missing entries are silently absent; entries
/// that fail to parse, fail validation or belong to another key are absent
/// with a warning.
pub fn cache_load(dir: &Path, key: &CacheKey) -> Option<IsoClassTable> {
    let path = key.path(dir);
    let text = fs::read_to_string(&path).ok()?;
    match IsoClassTable::from_json(&text) {
        Ok(t) if t.quiver().content_hash() == key.quiver_hash && t.q() as u64 == key.q && t.dim() == &key.dim => Some(t),
        Ok(_) => {
            log::warn!("cache entry {} does not match its key; rebuilding", path.display());
            None
        }
        Err(e) => {
            log::warn!("cache entry {} is corrupt ({e}); rebuilding", path.display());
            None
        }
    }
}

/// Removes every cache entry in `dir`.
pub fn cache_clear(dir: &Path) -> Result<()> {
    if !dir.exists() {
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            fs::remove_file(path)?;
        }
    }
    Ok(())
}
