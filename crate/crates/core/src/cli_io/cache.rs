//! On-disk store of local data keyed by minimal model and prime.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::LocalSource;
use crate::curve_model::WeierstrassCurve;
use crate::error::Result;
use crate::local_analysis::{local_packet, LocalData};

pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "SIGNED_EULER_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub model: String,
    #[serde(with = "crate::serde_big::biguint")]
    pub q: BigUint,
    pub value: LocalData,
}

pub struct Cache {
    dir: PathBuf,
    writer: Mutex<()>,
}

/// Directory from the environment, else the user cache directory.
pub fn default_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("signed-euler"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("signed-euler"))
}

pub fn key(model: &str, q: &BigUint) -> String {
    let mut h = Sha256::new();
    h.update(format!("v{SCHEMA_VERSION}|{model}|{q}"));
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into(), writer: Mutex::new(()) }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, model: &str, q: &BigUint) -> PathBuf {
        self.dir.join(format!("{}.json", key(model, q)))
    }

    pub fn get(&self, model: &str, q: &BigUint) -> Option<LocalData> {
        let text = fs::read_to_string(self.path(model, q)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.schema_version == SCHEMA_VERSION && entry.model == model && entry.q == *q)
            .then_some(entry.value)
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put(&self, model: &str, q: &BigUint, value: &LocalData) {
        let entry = CacheEntry {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            q: q.clone(),
            value: value.clone(),
        };
        let Ok(text) = serde_json::to_string(&entry) else { return };
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let target = self.path(model, q);
        let tmp = target.with_extension(format!("tmp{}", std::process::id()));
        let written = fs::File::create(&tmp).and_then(|mut f| f.write_all(text.as_bytes()));
        if written.is_ok() {
            let _ = fs::rename(&tmp, &target);
        } else {
            let _ = fs::remove_file(&tmp);
        }
    }
}

impl LocalSource for Cache {
    fn local(&self, minimal: &WeierstrassCurve, q: &BigUint) -> Result<LocalData> {
        let model = minimal.coefficients_string();
        if let Some(hit) = self.get(&model, q) {
            return Ok(hit);
        }
        let value = local_packet(minimal, q)?;
        self.put(&model, q, &value);
        Ok(value)
    }
}
