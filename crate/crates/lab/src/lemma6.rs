//! Empirical check of the bipartite matching lemma: a sparse fixed set
//! sequence against a random one.

use hyperpack::{build_disjointness_graph, maximum_matching, min_degree, SetSequence};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::stats::quantile;
use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Params {
    /// Ground set size.
    pub n: usize,
    /// Sets per sequence.
    pub m: usize,
    /// Element probability of the random sequence `B`.
    pub p: f64,
    /// Set-size bound `qn` of the fixed sequence `A`; its elements are drawn
    /// with probability `q` and truncated at the bound.
    pub q: f64,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Lemma6Params {
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Config(m));
        if self.m == 0 || self.m > self.n {
            return bad(format!("need 1 <= m <= n, got m={} n={}", self.m, self.n));
        }
        if !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.q) {
            return bad(format!("p={} and q={} must lie in [0, 1]", self.p, self.q));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        Ok(())
    }

    /// Bound `d = m^(1-γ)` on how many sets of `A` share an element.
    pub fn multiplicity_bound(&self) -> usize {
        ((self.m as f64).powf(1.0 - self.gamma).floor() as usize).max(1)
    }

    pub fn set_size_bound(&self) -> usize {
        (self.q * self.n as f64).floor() as usize
    }

    /// `m^(1-γ/4)`.
    pub fn degree_threshold(&self) -> f64 {
        (self.m as f64).powf(1.0 - self.gamma / 4.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Report {
    pub params: Lemma6Params,
    pub degree_threshold: f64,
    pub min_degree_min: usize,
    pub min_degree_q05: usize,
    pub min_degree_median: usize,
    pub min_degree_max: usize,
    /// Fraction of trials whose minimum degree reached the threshold.
    pub min_degree_ok_frequency: f64,
    pub perfect_matching_frequency: f64,
    pub max_set_size: usize,
    pub max_multiplicity: usize,
}

struct Trial {
    min_degree: usize,
    perfect: bool,
    max_set: usize,
    max_mult: usize,
}

/// `A`: each set takes each element with probability `q`, skipping
/// elements already in `d` sets and stopping at `qn` elements.
/// `B`: each set takes each element independently with probability `p`.
pub fn sample_sequences(params: &Lemma6Params, seed: u64) -> (SetSequence, SetSequence) {
    let mut rng = hyperpack::seed::rng(seed);
    let (n, m) = (params.n, params.m);
    let d = params.multiplicity_bound();
    let cap = params.set_size_bound();
    let mut mult = vec![0usize; n];
    let a: Vec<Vec<u64>> = (0..m)
        .map(|_| {
            let mut set = Vec::new();
            for (x, count) in mult.iter_mut().enumerate() {
                if rng.gen_bool(params.q) && *count < d && set.len() < cap {
                    *count += 1;
                    set.push(x as u64);
                }
            }
            set
        })
        .collect();
    let b: Vec<Vec<u64>> = (0..m)
        .map(|_| (0..n as u64).filter(|_| rng.gen_bool(params.p)).collect())
        .collect();
    let ground = n as u64;
    (
        SetSequence::new(ground, a).expect("elements below n"),
        SetSequence::new(ground, b).expect("elements below n"),
    )
}

pub fn lemma6_diagnostics(params: &Lemma6Params) -> Result<Lemma6Report, LabError> {
    params.validate()?;
    let trials: Vec<Trial> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let (a, b) = sample_sequences(params, params.seed ^ t);
            let h = build_disjointness_graph(&a, &b).expect("equal shapes");
            Trial {
                min_degree: min_degree(&h),
                perfect: maximum_matching(&h).is_perfect(),
                max_set: a.max_set_size(),
                max_mult: a.element_max_multiplicity(),
            }
        })
        .collect();
    let mut degrees: Vec<usize> = trials.iter().map(|t| t.min_degree).collect();
    degrees.sort_unstable();
    let count = trials.len() as f64;
    let threshold = params.degree_threshold();
    Ok(Lemma6Report {
        params: *params,
        degree_threshold: threshold,
        min_degree_min: degrees[0],
        min_degree_q05: quantile(&degrees, 0.05),
        min_degree_median: quantile(&degrees, 0.5),
        min_degree_max: *degrees.last().expect("at least one trial"),
        min_degree_ok_frequency: trials.iter().filter(|t| t.min_degree as f64 >= threshold).count() as f64 / count,
        perfect_matching_frequency: trials.iter().filter(|t| t.perfect).count() as f64 / count,
        max_set_size: trials.iter().map(|t| t.max_set).max().unwrap_or(0),
        max_multiplicity: trials.iter().map(|t| t.max_mult).max().unwrap_or(0),
    })
}
