//! On-disk cache of shooting results, keyed by a hash of everything that
//! influences the located height.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::params::ProblemParams;
use crate::error::{Error, Result};
use crate::radial_ode::{shoot, ShootOptions, ShootingResult};

/// Bumped whenever the stored layout or the solver's numerics change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    schema: u32,
    version: String,
    key: String,
    result: ShootingResult,
}

/// Directory of JSON-serialized [`ShootingResult`]s.
#[derive(Debug, Clone)]
pub struct ProfileCache {
    dir: PathBuf,
}

/// Hex SHA-256 of the parameters, solver tolerances, crate version and schema.
pub fn cache_key(params: &ProblemParams, opts: &ShootOptions) -> String {
    let s = &opts.shot;
    let text = format!(
        "schema={SCHEMA_VERSION};version={};d={};p={:016x};omega={:016x};critical={};rtol={:016x};atol={:016x};\
         horizon={:?};window={:016x};linear={:016x};bisect={:016x};polish={};mmin={:016x};mmax={:016x};\
         logstep={:016x};floor={:016x};agree={:016x}",
        env!("CARGO_PKG_VERSION"),
        params.d,
        params.p.to_bits(),
        params.omega.to_bits(),
        params.critical,
        s.control.rtol.to_bits(),
        s.control.atol.to_bits(),
        s.horizon.map(f64::to_bits),
        s.window.to_bits(),
        s.linear_threshold.to_bits(),
        opts.bisection_tol.to_bits(),
        opts.polish,
        opts.m_min.to_bits(),
        opts.m_max.to_bits(),
        opts.log_step.to_bits(),
        opts.tail_floor.to_bits(),
        opts.agreement.to_bits(),
    );
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl ProfileCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ProfileCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Cached result, if present and written by the same schema and version.
    pub fn get(&self, params: &ProblemParams, opts: &ShootOptions) -> Option<ShootingResult> {
        let key = cache_key(params, opts);
        let text = fs::read_to_string(self.path(&key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        let fresh = entry.schema == SCHEMA_VERSION
            && entry.version == env!("CARGO_PKG_VERSION")
            && entry.key == key
            && entry.result.params == *params;
        fresh.then_some(entry.result)
    }

    pub fn put(&self, opts: &ShootOptions, result: &ShootingResult) -> Result<()> {
        let key = cache_key(&result.params, opts);
        let entry = Entry {
            schema: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            key: key.clone(),
            result: result.clone(),
        };
        let text = serde_json::to_string(&entry).map_err(|e| Error::Io(e.to_string()))?;
        // Write-then-rename so concurrent readers never see a partial file.
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(&tmp, self.path(&key))?;
        Ok(())
    }

    /// Cached result or a fresh solve (which is then stored); the flag is `true` on a hit.
    pub fn get_or_solve(&self, params: &ProblemParams, opts: &ShootOptions) -> Result<(ShootingResult, bool)> {
        if let Some(hit) = self.get(params, opts) {
            return Ok((hit, true));
        }
        let res = shoot(params, opts)?;
        self.put(opts, &res)?;
        Ok((res, false))
    }
}

/// Solve through the cache when one is given.
pub fn solve_cached(
    cache: Option<&ProfileCache>,
    params: &ProblemParams,
    opts: &ShootOptions,
) -> Result<ShootingResult> {
    match cache {
        Some(c) => c.get_or_solve(params, opts).map(|(r, _)| r),
        None => shoot(params, opts),
    }
}
