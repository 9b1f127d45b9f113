//! On-disk cache for stationary solutions and eigenpairs.
//!
//! Artifacts are JSON envelopes carrying their full canonical key; a lookup
//! is a hit only when the stored key matches exactly, so hash collisions or
//! stale schema versions degrade to recomputation, never to a wrong result.
//! Writes go through a temporary file and an atomic rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Bump whenever the serialized layout of cached artifacts changes.
pub const SCHEMA_VERSION: u32 = 1;

static WRITE_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Canonical description of a cached artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub kind: String,
    /// Ordered `name=value` pairs; floats are rendered with the shortest
    /// round-trip representation plus their exact bit pattern.
    pub fields: Vec<(String, String)>,
    pub schema_version: u32,
}

impl CacheKey {
    pub fn new(kind: &str) -> Self {
        CacheKey {
            kind: kind.to_string(),
            fields: Vec::new(),
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn with_float(mut self, name: &str, value: f64) -> Self {
        self.fields.push((
            name.to_string(),
            format!("{value}/{:016x}", value.to_bits()),
        ));
        self
    }

    pub fn with_int(mut self, name: &str, value: u64) -> Self {
        self.fields.push((name.to_string(), value.to_string()));
        self
    }

    fn canonical(&self) -> String {
        let mut s = format!("kind={};schema={}", self.kind, self.schema_version);
        for (name, value) in &self.fields {
            s.push(';');
            s.push_str(name);
            s.push('=');
            s.push_str(value);
        }
        s
    }

    fn file_name(&self) -> String {
        format!(
            "{}-{:016x}.json",
            self.kind,
            fnv1a64(self.canonical().as_bytes())
        )
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325_u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    key: CacheKey,
    value: T,
}

/// Store an artifact under its key; returns the final path.
pub fn store<T: Serialize>(dir: &Path, key: &CacheKey, value: &T) -> std::io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let envelope = Envelope {
        key: key.clone(),
        value,
    };
    let body = serde_json::to_vec(&envelope)?;
    let tmp = dir.join(format!(
        "{}.tmp.{}.{}",
        key.file_name(),
        std::process::id(),
        WRITE_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, &body)?;
    let path = dir.join(key.file_name());
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Load an artifact; any mismatch or corruption is a miss.
pub fn load<T: DeserializeOwned>(dir: &Path, key: &CacheKey) -> Option<T> {
    let path = dir.join(key.file_name());
    let body = fs::read(&path).ok()?;
    match serde_json::from_slice::<Envelope<T>>(&body) {
        Ok(envelope) if envelope.key == *key => Some(envelope.value),
        Ok(_) => {
            eprintln!("cache: key mismatch in {}, recomputing", path.display());
            None
        }
        Err(err) => {
            eprintln!(
                "cache: unreadable artifact {} ({err}), recomputing",
                path.display()
            );
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir =
            std::env::temp_dir().join(format!("nodalheat-cache-test-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tmp_dir("roundtrip");
        let key = CacheKey::new("probe")
            .with_float("p", 50.0)
            .with_int("k", 2);
        let value = vec![std::f64::consts::PI, 1.0 / 3.0, 6.02214076e23];
        store(&dir, &key, &value).unwrap();
        let back: Vec<f64> = load(&dir, &key).unwrap();
        assert!(back
            .iter()
            .zip(&value)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn schema_bump_forces_miss() {
        let dir = tmp_dir("schema");
        let key = CacheKey::new("probe").with_int("k", 1);
        store(&dir, &key, &vec![1.0_f64]).unwrap();
        let mut stale = key.clone();
        stale.schema_version += 1;
        assert!(load::<Vec<f64>>(&dir, &stale).is_none());
        assert!(load::<Vec<f64>>(&dir, &key).is_some());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn corrupt_artifact_is_a_miss() {
        let dir = tmp_dir("corrupt");
        let key = CacheKey::new("probe").with_int("k", 7);
        let path = store(&dir, &key, &vec![2.0_f64]).unwrap();
        fs::write(&path, b"{ not json").unwrap();
        assert!(load::<Vec<f64>>(&dir, &key).is_none());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn distinct_keys_do_not_collide() {
        let dir = tmp_dir("distinct");
        let a = CacheKey::new("probe").with_float("p", 50.0);
        let b = CacheKey::new("probe").with_float("p", 50.0_f64.next_up());
        store(&dir, &a, &1.0_f64).unwrap();
        store(&dir, &b, &2.0_f64).unwrap();
        assert_eq!(load::<f64>(&dir, &a), Some(1.0));
        assert_eq!(load::<f64>(&dir, &b), Some(2.0));
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn concurrent_writers_to_distinct_keys() {
        let dir = tmp_dir("concurrent");
        std::thread::scope(|scope| {
            for worker in 0..8u64 {
                let dir = dir.clone();
                scope.spawn(move || {
                    let key = CacheKey::new("probe").with_int("worker", worker);
                    store(&dir, &key, &vec![worker as f64; 64]).unwrap();
                });
            }
        });
        for worker in 0..8u64 {
            let key = CacheKey::new("probe").with_int("worker", worker);
            let value: Vec<f64> = load(&dir, &key).unwrap();
            assert_eq!(value, vec![worker as f64; 64]);
        }
        let _ = fs::remove_dir_all(&dir);
    }
}
