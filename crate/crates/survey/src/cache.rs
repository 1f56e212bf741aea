//! JSON-lines result cache. Each line is one record whose digest covers the
//! serialized payload; records that fail to parse or verify are moved to a
//! quarantine file next to the cache and recomputed.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::Mode;
use crate::error::{Result, SurveyError};

pub const CACHE_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub schema: u32,
    /// Canonical defining polynomial of the field, or the census bound.
    pub key: String,
    pub mode: Mode,
    pub params: Value,
    pub payload: Value,
    pub digest: String,
}

/// SHA-256 of the compact JSON serialization, in hex.
pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

impl CacheRecord {
    pub fn new(key: String, mode: Mode, params: Value, payload: Value) -> Self {
        let digest = digest(&payload);
        CacheRecord { schema: CACHE_SCHEMA, key, mode, params, payload, digest }
    }

    pub fn verify(&self) -> bool {
        self.schema == CACHE_SCHEMA && digest(&self.payload) == self.digest
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn parse(line: &str, number: usize) -> Result<Self> {
        let rec: CacheRecord =
            serde_json::from_str(line).map_err(|e| SurveyError::CacheCorrupt { line: number, reason: e.to_string() })?;
        if rec.schema != CACHE_SCHEMA {
            return Err(SurveyError::CacheCorrupt { line: number, reason: format!("schema {}", rec.schema) });
        }
        if !rec.verify() {
            return Err(SurveyError::CacheCorrupt { line: number, reason: "digest mismatch".into() });
        }
        Ok(rec)
    }
}

type Slot = (String, Mode, String);

fn slot(key: &str, mode: Mode, params: &Value) -> Slot {
    (key.to_string(), mode, params.to_string())
}

/// In-memory view of a cache file. Only the owner writes; new records are
/// appended on [`Cache::flush`].
#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    records: HashMap<Slot, CacheRecord>,
    pending: Vec<CacheRecord>,
    quarantined: Vec<String>,
}

pub fn quarantine_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".quarantine");
    PathBuf::from(s)
}

impl Cache {
    /// A cache that lives only in memory.
    pub fn in_memory() -> Self {
        Cache::default()
    }

    pub fn open(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Cache::in_memory());
        };
        let mut cache = Cache { path: Some(path.to_path_buf()), ..Cache::default() };
        if !path.exists() {
            return Ok(cache);
        }
        let text = fs::read_to_string(path).map_err(|e| SurveyError::io(path, e))?;
        let mut good = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match CacheRecord::parse(line, i + 1) {
                Ok(rec) => {
                    let s = slot(&rec.key, rec.mode, &rec.params);
                    if !cache.records.contains_key(&s) {
                        good.push(line.to_string());
                        cache.records.insert(s, rec);
                    }
                }
                Err(_) => cache.quarantined.push(line.to_string()),
            }
        }
        if !cache.quarantined.is_empty() {
            let q = quarantine_path(path);
            let mut f = OpenOptions::new().create(true).append(true).open(&q).map_err(|e| SurveyError::io(&q, e))?;
            for line in &cache.quarantined {
                writeln!(f, "{line}").map_err(|e| SurveyError::io(&q, e))?;
            }
            let tmp = path.with_extension("tmp");
            let mut body = good.join("\n");
            if !body.is_empty() {
                body.push('\n');
            }
            fs::write(&tmp, body).map_err(|e| SurveyError::io(&tmp, e))?;
            fs::rename(&tmp, path).map_err(|e| SurveyError::io(path, e))?;
        }
        Ok(cache)
    }

    pub fn get(&self, key: &str, mode: Mode, params: &Value) -> Option<&CacheRecord> {
        self.records.get(&slot(key, mode, params))
    }

    pub fn insert(&mut self, rec: CacheRecord) {
        let s = slot(&rec.key, rec.mode, &rec.params);
        if !self.records.contains_key(&s) {
            self.pending.push(rec.clone());
            self.records.insert(s, rec);
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of lines moved to quarantine when the cache was opened.
    pub fn quarantined(&self) -> usize {
        self.quarantined.len()
    }

    pub fn flush(&mut self) -> Result<()> {
        let Some(path) = &self.path else {
            self.pending.clear();
            return Ok(());
        };
        if self.pending.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| SurveyError::io(path, e))?;
        let mut body = String::new();
        for rec in self.pending.drain(..) {
            body.push_str(&rec.to_line());
            body.push('\n');
        }
        f.write_all(body.as_bytes()).map_err(|e| SurveyError::io(path, e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn record_round_trip() {
        let r = CacheRecord::new("x^2 + 1".into(), Mode::Heights, json!({"precision": 128}), json!({"h": 0.1 + 0.2}));
        let back = CacheRecord::parse(&r.to_line(), 1).unwrap();
        assert_eq!(back, r);
        let tampered = r.to_line().replace("0.30000000000000004", "0.3");
        assert!(matches!(CacheRecord::parse(&tampered, 7), Err(SurveyError::CacheCorrupt { line: 7, .. })));
    }
}
