//! On-disk store of optimized packings.
//!
//! One JSON file per `(n, m, budget, seed)`; the file name carries `n`, `m`
//! and a SHA-256 digest of the search parameters, so changing the budget
//! never returns a stale configuration.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use sphere_gh_core::distortion::SearchBudget;
use sphere_gh_core::exec::Executor;
use sphere_gh_core::packing::{optimize_packing, PackingResult};
use sphere_gh_core::rng::RngStream;

use crate::json::{to_line, PackingDoc};

pub const CACHE_ENV: &str = "SPHERE_GH_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error(transparent)]
    Core(#[from] sphere_gh_core::Error),
    #[error("packing cache io at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone)]
pub struct PackingCache {
    dir: PathBuf,
}

impl PackingCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        PackingCache { dir: dir.into() }
    }

    /// The store named by `SPHERE_GH_CACHE_DIR`, if set and nonempty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PackingCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, n: usize, m: usize, budget: &SearchBudget, seed: u64) -> PathBuf {
        self.dir.join(format!("packing-n{n}-m{m}-{}.json", budget_hash(n, m, budget, seed)))
    }

    /// Reads a stored packing; unreadable or malformed files count as
    /// missing.
    pub fn load(&self, n: usize, m: usize, budget: &SearchBudget, seed: u64) -> Option<PackingResult> {
        let text = fs::read_to_string(self.path_for(n, m, budget, seed)).ok()?;
        let doc: PackingDoc = serde_json::from_str(&text).ok()?;
        if doc.n != n || doc.m != m {
            return None;
        }
        doc.to_result().ok()
    }

    pub fn store(
        &self,
        n: usize,
        m: usize,
        budget: &SearchBudget,
        seed: u64,
        result: &PackingResult,
    ) -> Result<(), CacheError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io_err(&self.dir))?;
        let path = self.path_for(n, m, budget, seed);
        // write then rename, so a concurrent reader never sees half a file
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, to_line(&PackingDoc::new(n, result))).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    pub fn get_or_compute<E: Executor + ?Sized>(
        &self,
        n: usize,
        m: usize,
        budget: &SearchBudget,
        seed: u64,
        exec: &E,
    ) -> Result<PackingResult, CacheError> {
        if let Some(r) = self.load(n, m, budget, seed) {
            return Ok(r);
        }
        let r = compute_packing(n, m, budget, seed, exec)?;
        self.store(n, m, budget, seed, &r)?;
        Ok(r)
    }
}

/// The packing optimizer with the stream layout used by every front end:
/// stream id `m` under the run seed.
pub fn compute_packing<E: Executor + ?Sized>(
    n: usize,
    m: usize,
    budget: &SearchBudget,
    seed: u64,
    exec: &E,
) -> Result<PackingResult, sphere_gh_core::Error> {
    optimize_packing(n, m, budget, &RngStream::new(seed, m as u64), exec)
}

/// Hex SHA-256 of every input that can change an optimizer run.
pub fn budget_hash(n: usize, m: usize, budget: &SearchBudget, seed: u64) -> String {
    let key = format!(
        "packing/v1;n={n};m={m};refine_iters={};initial_step={:016x};decay={:016x};restarts={};seed={seed}",
        budget.refine_iters,
        budget.initial_step.to_bits(),
        budget.decay.to_bits(),
        budget.restarts,
    );
    Sha256::digest(key.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
