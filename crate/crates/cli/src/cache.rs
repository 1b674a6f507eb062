//! On-disk result cache keyed by the SHA-256 of a run fingerprint.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use acl_core::record::CountRecord;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub fingerprint: String,
    pub records: Vec<CountRecord>,
    /// Seconds since the Unix epoch; never copied into tables.
    pub created: u64,
}

impl CacheEntry {
    pub fn new(fingerprint: &str, records: Vec<CountRecord>) -> Self {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        CacheEntry { schema_version: SCHEMA_VERSION, fingerprint: fingerprint.to_string(), records, created }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(CacheEntry),
    Miss,
    /// The file could not be parsed and was moved aside.
    Quarantined(PathBuf),
}

pub struct Cache {
    dir: PathBuf,
    writer: Mutex<()>,
}

pub fn digest(fingerprint: &str) -> String {
    Sha256::digest(fingerprint.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf(), writer: Mutex::new(()) })
    }

    pub fn path_for(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{}.json", digest(fingerprint)))
    }

    pub fn load(&self, fingerprint: &str) -> Lookup {
        let path = self.path_for(fingerprint);
        let Ok(bytes) = fs::read(&path) else { return Lookup::Miss };
        match serde_json::from_slice::<CacheEntry>(&bytes) {
            Ok(e) if e.schema_version != SCHEMA_VERSION => {
                log::info!("cache entry {} has schema {}, recomputing", path.display(), e.schema_version);
                Lookup::Miss
            }
            Ok(e) if e.fingerprint != fingerprint => {
                log::warn!("cache entry {} belongs to another run, recomputing", path.display());
                Lookup::Miss
            }
            Ok(e) => Lookup::Hit(e),
            Err(err) => {
                let bad = path.with_extension(format!("corrupt-{}", std::process::id()));
                log::warn!("corrupt cache entry {} ({err}); moved to {}", path.display(), bad.display());
                match fs::rename(&path, &bad) {
                    Ok(()) => Lookup::Quarantined(bad),
                    Err(_) => Lookup::Miss,
                }
            }
        }
    }

    /// Writes to a temporary file in the cache directory, then renames it into place.
    pub fn store(&self, entry: &CacheEntry) -> std::io::Result<PathBuf> {
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let path = self.path_for(&entry.fingerprint);
        let tmp = self.dir.join(format!(".{}.tmp-{}", digest(&entry.fingerprint), std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(entry).map_err(std::io::Error::other)?)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }
}
