//! Run configuration: built-in defaults, then an optional TOML file, then the
//! `HASSE_WORK_BUDGET` environment variable. Command-line flags win over all.

use std::path::Path;

use serde::Deserialize;

pub const BUDGET_ENV: &str = "HASSE_WORK_BUDGET";

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub prime_bound: u64,
    pub level: u32,
    pub sample_count: u64,
    pub seed: u64,
    pub work_budget: u64,
    pub partitions: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prime_bound: 100,
            level: 2,
            sample_count: 100_000,
            seed: 0,
            work_budget: hasse_core::families::DEFAULT_WORK_BUDGET,
            partitions: 1,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            cfg.work_budget = v.trim().parse().map_err(|_| format!("{BUDGET_ENV}={v:?} is not an integer"))?;
        }
        if cfg.partitions == 0 {
            return Err("partitions must be at least 1".into());
        }
        Ok(cfg)
    }
}
