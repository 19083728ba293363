//! Registry client for reference artifacts: digest-verified downloads with
//! retries and an on-disk cache keyed by coordinates.

use crate::gav::{resolve_artifact_url, Gav, GavError};
use sha1::{Digest, Sha1};
use std::path::{Path, PathBuf};
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error(transparent)]
    Gav(#[from] GavError),
    #[error("not found: {0}")]
    NotFound(String),
    /// The sidecar `.sha1` digest did not match the payload; nothing is
    /// cached.
    #[error("digest mismatch for {url}: expected {expected}, computed {computed}")]
    DigestMismatch { url: String, expected: String, computed: String },
    #[error("network error after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// Downloads reference artifacts, verifying each against the registry's
/// `.sha1` sidecar convention before caching.
pub struct Fetcher {
    repo_base: String,
    cache_dir: PathBuf,
    agent: ureq::Agent,
    attempts: u32,
    backoff: Duration,
}

impl Fetcher {
    pub fn new(repo_base: &str, cache_dir: &Path) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        Fetcher {
            repo_base: repo_base.to_string(),
            cache_dir: cache_dir.to_path_buf(),
            agent,
            attempts: 3,
            backoff: Duration::from_millis(250),
        }
    }

    /// Shrink the retry backoff; tests against a local server do not need
    /// to sleep.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    fn cache_path(&self, gav: &Gav) -> Result<PathBuf, FetchError> {
        Ok(self.cache_dir.join(gav.repo_path()?))
    }

    fn get(&self, url: &str) -> Result<Vec<u8>, FetchError> {
        let mut last = String::new();
        for attempt in 0..self.attempts {
            if attempt > 0 {
                std::thread::sleep(self.backoff * (1 << (attempt - 1)));
            }
            match self.agent.get(url).call() {
                Ok(mut response) => {
                    let body = response
                        .body_mut()
                        .with_config()
                        .limit(1 << 30)
                        .read_to_vec()
                        .map_err(|e| FetchError::Network { attempts: attempt + 1, message: e.to_string() })?;
                    return Ok(body);
                }
                Err(ureq::Error::StatusCode(404)) => return Err(FetchError::NotFound(url.to_string())),
                // Other status codes and transport errors are retried.
                Err(e) => last = e.to_string(),
            }
        }
        Err(FetchError::Network { attempts: self.attempts, message: last })
    }

    /// Fetch an artifact's bytes. Cache hits are served without touching
    /// the network; downloads are verified against the `.sha1` sidecar and
    /// cached via atomic rename.
    pub fn fetch_reference(&self, gav: &Gav) -> Result<Vec<u8>, FetchError> {
        let cache_path = self.cache_path(gav)?;
        if cache_path.is_file() {
            return Ok(std::fs::read(&cache_path)?);
        }

        let url = resolve_artifact_url(gav, &self.repo_base)?;
        let payload = self.get(&url)?;
        let sidecar = self.get(&format!("{url}.sha1"))?;
        let expected = String::from_utf8_lossy(&sidecar)
            .split_whitespace()
            .next()
            .unwrap_or_default()
            .to_ascii_lowercase();
        let computed = hex::encode(Sha1::digest(&payload));
        if expected != computed {
            return Err(FetchError::DigestMismatch { url, expected, computed });
        }

        if let Some(parent) = cache_path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let temp = cache_path.with_extension("part");
        std::fs::write(&temp, &payload)?;
        std::fs::rename(&temp, &cache_path)?;
        Ok(payload)
    }
}
