//! Monte Carlo estimation of packability over a parameter grid.
//!
//! Every trial draws one uniform label per potential edge for each of the
//! two graphs and realises the whole grid from those labels, so the graphs
//! of one trial are nested in the density. Grid points are visited from the
//! densest down; a packing found at one point is checked against the next
//! sparser one and reused if it still works.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use hyperpack::{
    exact_pack, pack_hypergraphs, verify_packing, CoupledSample, FailureReason, Hypergraph, OracleConfig, PackOutcome,
    PackerParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{GridPoint, Mode, RowEngine, SweepConfig};
use crate::stats::{wilson, Z95};
use crate::LabError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub c: f64,
    pub trials: u64,
    pub successes: u64,
    pub proportion: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_runtime_ms: f64,
    pub engine: RowEngine,
}

impl SweepRow {
    pub fn key(&self) -> RowKey {
        RowKey {
            n: self.n,
            k: self.k,
            p: self.p.to_bits(),
            q: self.q.to_bits(),
            engine: self.engine,
        }
    }
}

/// Identity of a row for resuming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowKey {
    pub n: usize,
    pub k: usize,
    pub p: u64,
    pub q: u64,
    pub engine: RowEngine,
}

#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    success: bool,
    elapsed: Duration,
}

/// Per-trial outcome at every grid point, indexed like the grid.
struct TrialResult {
    constructive: Vec<Cell>,
    oracle: Vec<Cell>,
}

/// The two graphs of one trial, for all grid densities at once.
struct Instance {
    g1: CoupledSample,
    g2: Option<CoupledSample>,
    fixed: Option<Hypergraph>,
}

impl Instance {
    fn at(&self, pt: &GridPoint) -> (Hypergraph, Hypergraph) {
        match (&self.fixed, &self.g2) {
            (Some(g1), Some(g2)) => (g1.clone(), g2.at(pt.q)),
            (None, Some(g2)) => (self.g1.at(pt.p), g2.at(pt.q)),
            _ => {
                let g = self.g1.at(pt.p);
                (g.clone(), g)
            }
        }
    }
}

fn trial_seed(base: u64, trial: u64) -> u64 {
    base ^ trial
}

struct Runner<'a> {
    config: &'a SweepConfig,
    fixed: Option<&'a Hypergraph>,
    n: usize,
    points: Vec<GridPoint>,
    /// Grid indices from densest to sparsest.
    order: Vec<usize>,
}

impl Runner<'_> {
    fn instance(&self, seed: u64) -> Result<Instance, LabError> {
        let k = self.config.k;
        let p_max = self.points.iter().map(|p| p.p).fold(0.0, f64::max);
        let q_max = self.points.iter().map(|p| p.q).fold(0.0, f64::max);
        let stream = |s| hyperpack::seed::derive(seed, s);
        Ok(match self.config.mode {
            Mode::PairRandom => Instance {
                g1: CoupledSample::new(self.n, k, p_max, stream(1))?,
                g2: Some(CoupledSample::new(self.n, k, q_max, stream(2))?),
                fixed: None,
            },
            Mode::FixedVsRandom => Instance {
                g1: CoupledSample::new(self.n, k, 0.0, stream(1))?,
                g2: Some(CoupledSample::new(self.n, k, q_max, stream(2))?),
                fixed: self.fixed.cloned(),
            },
            Mode::SameGraph => Instance {
                g1: CoupledSample::new(self.n, k, p_max, stream(1))?,
                g2: None,
                fixed: None,
            },
        })
    }

    fn packer_params(&self) -> PackerParams {
        PackerParams {
            max_retries: self.config.max_retries,
            oracle_fallback_n: self.config.oracle_fallback_n,
            restarts: 0,
            ..PackerParams::default()
        }
    }

    /// Constructive packing with whole-run restarts under the time cap.
    fn constructive(&self, g1: &Hypergraph, g2: &Hypergraph, seed: u64) -> Result<Option<Vec<u32>>, LabError> {
        let params = self.packer_params();
        let start = Instant::now();
        let limit = Duration::from_millis(self.config.time_limit_ms);
        for r in 0..=self.config.restarts {
            let s = if r == 0 {
                seed
            } else {
                hyperpack::seed::derive(seed, r as u64)
            };
            match pack_hypergraphs(g1, g2, &params, s)? {
                PackOutcome::Packed(map) => {
                    if self.config.time_limit_ms > 0 && start.elapsed() > limit {
                        return Ok(None);
                    }
                    return Ok(Some(map.forward));
                }
                PackOutcome::Failed(f) if f.reason == FailureReason::Unpackable => return Ok(None),
                PackOutcome::Failed(_) => {}
            }
            if self.config.time_limit_ms > 0 && start.elapsed() > limit {
                break;
            }
        }
        Ok(None)
    }

    fn trial(&self, trial: u64) -> Result<TrialResult, LabError> {
        let seed = trial_seed(self.config.seed, trial);
        let inst = self.instance(seed)?;
        let pack_seed = hyperpack::seed::derive(seed, 3);
        let m = self.points.len();
        let mut out = TrialResult {
            constructive: vec![Cell::default(); m],
            oracle: vec![Cell::default(); m],
        };
        let oracle_config = OracleConfig {
            limit: self.config.oracle_limit,
        };
        let mut carried: Option<Vec<u32>> = None;
        let mut carried_oracle: Option<Vec<u32>> = None;
        for &idx in &self.order {
            let (g1, g2) = inst.at(&self.points[idx]);
            if self.config.engine.runs_constructive() {
                let start = Instant::now();
                let reused = carried
                    .as_ref()
                    .filter(|map| verify_packing(&g1, &g2, map).map(|c| c.is_empty()).unwrap_or(false))
                    .cloned();
                let found = match reused {
                    Some(map) => Some(map),
                    None => self.constructive(&g1, &g2, pack_seed)?,
                };
                if let Some(map) = &found {
                    debug_assert!(verify_packing(&g1, &g2, map)?.is_empty());
                    carried = Some(map.clone());
                }
                out.constructive[idx] = Cell {
                    success: found.is_some(),
                    elapsed: start.elapsed(),
                };
            }
            if self.config.engine.runs_oracle() {
                let start = Instant::now();
                let reused = carried_oracle
                    .as_ref()
                    .filter(|map| verify_packing(&g1, &g2, map).map(|c| c.is_empty()).unwrap_or(false))
                    .cloned();
                let found = match reused {
                    Some(map) => Some(map),
                    None => exact_pack(&g1, &g2, &oracle_config)?,
                };
                if found.is_some() {
                    carried_oracle = found.clone();
                }
                out.oracle[idx] = Cell {
                    success: found.is_some(),
                    elapsed: start.elapsed(),
                };
                if out.constructive[idx].success && found.is_none() {
                    return Err(LabError::Inconsistent(format!(
                        "trial {trial} at n={} p={} q={}: constructive packing found where the oracle reports none",
                        self.n, self.points[idx].p, self.points[idx].q
                    )));
                }
            }
        }
        Ok(out)
    }

    fn rows(&self, results: &[TrialResult]) -> Vec<SweepRow> {
        let mut rows = Vec::new();
        for (idx, pt) in self.points.iter().enumerate() {
            let mut engines = Vec::new();
            if self.config.engine.runs_constructive() {
                engines.push((
                    RowEngine::Constructive,
                    results.iter().map(|r| r.constructive[idx]).collect::<Vec<_>>(),
                ));
            }
            if self.config.engine.runs_oracle() {
                engines.push((RowEngine::Oracle, results.iter().map(|r| r.oracle[idx]).collect()));
            }
            for (engine, cells) in engines {
                let trials = cells.len() as u64;
                let successes = cells.iter().filter(|c| c.success).count() as u64;
                let (ci_low, ci_high) = wilson(successes, trials, Z95);
                let mean_runtime_ms = if self.config.record_runtime {
                    cells.iter().map(|c| c.elapsed.as_secs_f64() * 1e3).sum::<f64>() / trials as f64
                } else {
                    0.0
                };
                rows.push(SweepRow {
                    n: self.n,
                    k: self.config.k,
                    p: pt.p,
                    q: pt.q,
                    c: pt.c,
                    trials,
                    successes,
                    proportion: successes as f64 / trials as f64,
                    ci_low,
                    ci_high,
                    mean_runtime_ms,
                    engine,
                });
            }
        }
        rows
    }
}

/// Runs the sweep, handing each completed row to `emit` in grid order.
/// Rows whose key is in `skip` are neither computed (when a whole order is
/// covered) nor emitted.
pub fn run_sweep_with(
    config: &SweepConfig,
    skip: &HashSet<RowKey>,
    mut emit: impl FnMut(&SweepRow) -> Result<(), LabError>,
) -> Result<Vec<SweepRow>, LabError> {
    config.validate()?;
    let fixed = match (&config.mode, &config.fixed_graph) {
        (Mode::FixedVsRandom, Some(path)) => Some(hyperpack::read_edge_list(path)?),
        _ => None,
    };
    if let Some(g) = &fixed {
        if g.k() != config.k || config.n_values.iter().any(|&n| n != g.n()) {
            return Err(LabError::Config(format!(
                "fixed graph has n={} k={}, which does not match the grid",
                g.n(),
                g.k()
            )));
        }
    }

    let mut all = Vec::new();
    for &n in &config.n_values {
        let points = config.points(n);
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&points[a], &points[b]);
            (y.p * y.q).total_cmp(&(x.p * x.q)).then(a.cmp(&b))
        });
        let runner = Runner {
            config,
            fixed: fixed.as_ref(),
            n,
            points,
            order,
        };
        let expected = runner.rows(&[]);
        if expected.iter().all(|r| skip.contains(&r.key())) {
            continue;
        }
        let results: Vec<TrialResult> = (0..config.trials)
            .into_par_iter()
            .map(|t| runner.trial(t))
            .collect::<Result<_, _>>()?;
        for row in runner.rows(&results) {
            if !skip.contains(&row.key()) {
                emit(&row)?;
                all.push(row);
            }
        }
    }
    Ok(all)
}

pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, LabError> {
    run_sweep_with(config, &HashSet::new(), |_| Ok(()))
}

/// A single grid point, `trials` pair-random instances.
pub fn estimate_packability(
    n: usize,
    k: usize,
    p: f64,
    q: f64,
    trials: u64,
    seed: u64,
    engine: crate::config::Engine,
) -> Result<Vec<SweepRow>, LabError> {
    let mut config = SweepConfig::new(vec![n], k, Vec::new(), trials, seed);
    config.pq_pairs = vec![(p, q)];
    config.engine = engine;
    run_sweep(&config)
}

/// Success proportion of a packing procedure on fixed inputs, for the
/// degenerate case where nothing is random.
pub fn estimate_fixed(
    g1: &Hypergraph,
    g2: &Hypergraph,
    trials: u64,
    seed: u64,
    engine: RowEngine,
    config: &SweepConfig,
) -> Result<(u64, u64), LabError> {
    let oracle_config = OracleConfig {
        limit: config.oracle_limit,
    };
    let mut successes = 0;
    for t in 0..trials {
        let ok = match engine {
            RowEngine::Oracle => exact_pack(g1, g2, &oracle_config)?.is_some(),
            RowEngine::Constructive => {
                let runner = Runner {
                    config,
                    fixed: None,
                    n: g1.n(),
                    points: Vec::new(),
                    order: Vec::new(),
                };
                runner.constructive(g1, g2, trial_seed(seed, t))?.is_some()
            }
        };
        successes += u64::from(ok);
    }
    Ok((successes, trials))
}
