//! Sweep configuration, read from a flat TOML document.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Both graphs random, independent.
    PairRandom,
    /// `G1` read from `fixed_graph`, `G2` random with density `q`.
    FixedVsRandom,
    /// `G2` is the same graph as `G1`.
    SameGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Constructive,
    Oracle,
    Both,
}

impl Engine {
    pub fn runs_constructive(self) -> bool {
        matches!(self, Engine::Constructive | Engine::Both)
    }

    pub fn runs_oracle(self) -> bool {
        matches!(self, Engine::Oracle | Engine::Both)
    }
}

/// The engine a row reports on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowEngine {
    Constructive,
    Oracle,
}

impl fmt::Display for RowEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowEngine::Constructive => "constructive",
            RowEngine::Oracle => "oracle",
        })
    }
}

fn default_restarts() -> usize {
    8
}

fn default_max_retries() -> usize {
    10
}

fn default_oracle_limit() -> usize {
    12
}

fn default_oracle_fallback_n() -> usize {
    9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub k: usize,
    /// Grid with `p = q = sqrt(c ln n / n^(k-1))`.
    #[serde(default)]
    pub c_values: Vec<f64>,
    /// Explicit `(p, q)` grid, used instead of `c_values`.
    #[serde(default)]
    pub pq_pairs: Vec<(f64, f64)>,
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    pub engine: Engine,
    #[serde(default)]
    pub fixed_graph: Option<PathBuf>,
    /// Whole-run retries of the constructive packer per trial.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_retries")]
    pub max_retries: usize,
    #[serde(default = "default_oracle_limit")]
    pub oracle_limit: usize,
    #[serde(default = "default_oracle_fallback_n")]
    pub oracle_fallback_n: usize,
    /// Wall-clock cap per constructive trial; 0 disables it.
    #[serde(default)]
    pub time_limit_ms: u64,
    /// Fill `mean_runtime_ms`; off by default so output is reproducible.
    #[serde(default)]
    pub record_runtime: bool,
}

impl SweepConfig {
    /// A pair-random constructive sweep with default knobs.
    pub fn new(n_values: Vec<usize>, k: usize, c_values: Vec<f64>, trials: u64, seed: u64) -> Self {
        SweepConfig {
            n_values,
            k,
            c_values,
            pq_pairs: Vec::new(),
            trials,
            seed,
            mode: Mode::PairRandom,
            engine: Engine::Constructive,
            fixed_graph: None,
            restarts: default_restarts(),
            max_retries: default_max_retries(),
            oracle_limit: default_oracle_limit(),
            oracle_fallback_n: default_oracle_fallback_n(),
            time_limit_ms: 0,
            record_runtime: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, LabError> {
        let config: SweepConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if self.c_values.is_empty() == self.pq_pairs.is_empty() {
            return bad("give exactly one of c_values and pq_pairs".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < self.k) {
            return bad(format!("n = {n} is below k = {}", self.k));
        }
        if self.mode == Mode::FixedVsRandom && self.fixed_graph.is_none() {
            return bad("mode fixed-vs-random needs fixed_graph".into());
        }
        if self.engine.runs_oracle() {
            if let Some(n) = self.n_values.iter().find(|&&n| n > self.oracle_limit) {
                return bad(format!("oracle engine needs n <= {}, got {n}", self.oracle_limit));
            }
        }
        for &n in &self.n_values {
            for point in self.points(n) {
                if !(0.0..=1.0).contains(&point.p) || !(0.0..=1.0).contains(&point.q) {
                    return bad(format!(
                        "grid point (p={}, q={}) at n={n} is not a probability pair",
                        point.p, point.q
                    ));
                }
            }
        }
        Ok(())
    }

    /// Grid points at order `n`, in configuration order.
    pub fn points(&self, n: usize) -> Vec<GridPoint> {
        if self.pq_pairs.is_empty() {
            self.c_values
                .iter()
                .map(|&c| {
                    let p = density_for_c(n, self.k, c);
                    GridPoint { p, q: p, c }
                })
                .collect()
        } else {
            self.pq_pairs
                .iter()
                .map(|&(p, q)| GridPoint {
                    p,
                    q,
                    c: c_for_pq(n, self.k, p * q),
                })
                .collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub p: f64,
    pub q: f64,
    pub c: f64,
}

/// `sqrt(c ln n / n^(k-1))`.
pub fn density_for_c(n: usize, k: usize, c: f64) -> f64 {
    let nf = n as f64;
    (c * nf.ln() / nf.powi(k as i32 - 1)).sqrt()
}

/// The `c` with `pq = c ln n / n^(k-1)`.
pub fn c_for_pq(n: usize, k: usize, pq: f64) -> f64 {
    let nf = n as f64;
    if nf <= 1.0 {
        return 0.0;
    }
    pq * nf.powi(k as i32 - 1) / nf.ln()
}
