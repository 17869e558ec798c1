//! Constructive packers.
//!
//! Both packers partition the vertices of `G1` into classes `V_0, V_1, ...`,
//! split the vertices of `G2` into classes `W_i` of matching sizes, and build
//! the bijection one class at a time. At stage `i` each `v ∈ V_i` and each
//! `w ∈ W_i` contributes its type-1 neighbourhood (the `(k-1)`-sets of the
//! already-placed prefix that complete it to an edge); identifying the two
//! prefixes through the current map, a perfect matching of the disjointness
//! graph extends the map without type-1 collisions. Hypergraphs additionally
//! check type-2 edges at every stage and everything else at the end.
//!
//! A reported packing is always checked with [`verify_packing`]; a failure
//! says nothing about whether a packing exists, unless the instance was
//! small enough to hand to the exact oracle.

mod many;
mod stage;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::matching::HallViolator;
use crate::oracle::{exact_pack, OracleConfig, ORACLE_HARD_LIMIT};
use crate::partition::{class_count, independence_refine, random_color_partition, PartitionParams};
use crate::seed;

pub use many::{pack_many, ManyOutcome};
pub use stage::{repair_type2_collision, RepairError, StageState, Type2Collision};

/// Exponent `K` of the target failure probability `O(n^-K)` in the graph
/// schedule `t = ceil((K + 2) / eta)`.
pub const FAILURE_EXPONENT: f64 = 1.0;

/// A bijection `π` from the vertices of `G1` to those of `G2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingMap {
    pub forward: Vec<u32>,
    pub stage_log: Vec<StageRecord>,
}

impl PackingMap {
    pub fn identity(n: usize) -> Self {
        PackingMap {
            forward: (0..n as u32).collect(),
            stage_log: Vec::new(),
        }
    }

    /// Wraps `forward` after checking it is a permutation of `0..len`.
    pub fn from_forward(forward: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; forward.len()];
        for &w in &forward {
            match seen.get_mut(w as usize) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(Error::Parameter(format!(
                        "not a permutation: image {w} repeated or out of range"
                    )))
                }
            }
        }
        Ok(PackingMap {
            forward,
            stage_log: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0; self.forward.len()];
        for (v, &w) in self.forward.iter().enumerate() {
            inv[w as usize] = v as u32;
        }
        inv
    }
}

/// What happened at one stage of a constructive run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: usize,
    pub class_size: usize,
    pub prefix_size: usize,
    /// Attempts used, including the successful one.
    pub attempts: usize,
    /// Minimum degree of the disjointness graph in the accepted attempt.
    pub min_degree: usize,
    pub type2_collisions: usize,
    pub repaired: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackerParams {
    /// Class-size exponent; derived from the inputs when `None`.
    pub eta: Option<f64>,
    /// Neighbour bound for the graph partition; derived when `None`.
    pub t: Option<usize>,
    /// Candidate pairs tried by the type-2 repair; derived when `None`.
    pub repair_budget: Option<usize>,
    /// Extra attempts per stage, each with a freshly drawn `W_i`.
    pub max_retries: usize,
    /// Instances of order below this go to the exact oracle.
    pub oracle_fallback_n: usize,
    /// Whole-run retries with fresh seeds after a failed run.
    pub restarts: usize,
}

impl Default for PackerParams {
    fn default() -> Self {
        PackerParams {
            eta: None,
            t: None,
            repair_budget: None,
            max_retries: 10,
            oracle_fallback_n: 9,
            restarts: 0,
        }
    }
}

impl PackerParams {
    pub fn validate(&self) -> Result<()> {
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::Parameter(format!("eta must lie in (0, 1), got {eta}")));
            }
        }
        if self.t == Some(0) {
            return Err(Error::Parameter("t must be at least 1".into()));
        }
        if self.repair_budget == Some(0) {
            return Err(Error::Parameter("repair budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FailureReason {
    /// No colouring met the neighbour bound; carries the error text.
    Refinement(String),
    NoPerfectMatching(HallViolator),
    RepairExhausted,
    ResidualCollision {
        collisions: usize,
    },
    /// The exact oracle proved that no packing exists.
    Unpackable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub stage: usize,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PackOutcome {
    Packed(PackingMap),
    Failed(Failure),
}

impl PackOutcome {
    pub fn is_packed(&self) -> bool {
        matches!(self, PackOutcome::Packed(_))
    }

    pub fn map(&self) -> Option<&PackingMap> {
        match self {
            PackOutcome::Packed(m) => Some(m),
            PackOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            PackOutcome::Packed(_) => None,
            PackOutcome::Failed(f) => Some(f),
        }
    }
}

fn check_dims(g1: &Hypergraph, g2: &Hypergraph) -> Result<()> {
    if g1.n() != g2.n() || g1.k() != g2.k() {
        return Err(Error::Dimension(format!(
            "(n={}, k={}) vs (n={}, k={})",
            g1.n(),
            g1.k(),
            g2.n(),
            g2.k()
        )));
    }
    Ok(())
}

/// Edges `e` of `G1` whose image `π(e)` is an edge of `G2`.
pub fn verify_packing(g1: &Hypergraph, g2: &Hypergraph, map: &[u32]) -> Result<Vec<Vec<u32>>> {
    check_dims(g1, g2)?;
    if map.len() != g1.n() {
        return Err(Error::Dimension(format!(
            "map has {} entries for {} vertices",
            map.len(),
            g1.n()
        )));
    }
    PackingMap::from_forward(map.to_vec())?;
    let mut buf = vec![0u32; g1.k()];
    Ok(g1
        .edges()
        .filter(|e| {
            for (b, &v) in buf.iter_mut().zip(e.iter()) {
                *b = map[v as usize];
            }
            g2.contains_unsorted(&mut buf)
        })
        .map(<[u32]>::to_vec)
        .collect())
}

fn oracle_outcome(g1: &Hypergraph, g2: &Hypergraph) -> Result<PackOutcome> {
    let config = OracleConfig {
        limit: ORACLE_HARD_LIMIT,
    };
    Ok(match exact_pack(g1, g2, &config)? {
        Some(forward) => PackOutcome::Packed(PackingMap::from_forward(forward)?),
        None => PackOutcome::Failed(Failure {
            stage: 0,
            reason: FailureReason::Unpackable,
        }),
    })
}

/// `(eta, t)` for packing a graph of maximum degree `Δ1` on `n` vertices:
/// `γ = min(1, -ln(max(Δ1/n, 1/n)) / ln n)`, `eta = max(γ/2, 0.1)`,
/// `t = ceil((K + 2) / eta)`.
pub fn graph_schedule(n: usize, max_degree: usize, params: &PackerParams) -> (f64, usize) {
    let eta = params.eta.unwrap_or_else(|| {
        if n < 2 {
            return 0.5;
        }
        let nf = n as f64;
        let q = (max_degree as f64 / nf).max(1.0 / nf);
        let gamma = (-q.ln() / nf.ln()).min(1.0);
        (gamma / 2.0).max(0.1)
    });
    let t = params
        .t
        .unwrap_or_else(|| ((FAILURE_EXPONENT + 2.0) / eta).ceil() as usize);
    (eta, t)
}

/// Packs two graphs on the same vertex count, following the stage-wise
/// construction with `G1` as the bounded-degree side.
pub fn pack_graphs(g1: &Hypergraph, g2: &Hypergraph, params: &PackerParams, seed: u64) -> Result<PackOutcome> {
    check_dims(g1, g2)?;
    params.validate()?;
    if g1.k() != 2 {
        return Err(Error::Parameter(format!("pack_graphs needs k = 2, got {}", g1.k())));
    }
    restarting(params, seed, |s| pack_graphs_once(g1, g2, params, s))
}

fn restarting(
    params: &PackerParams,
    seed: u64,
    mut run: impl FnMut(u64) -> Result<PackOutcome>,
) -> Result<PackOutcome> {
    let mut outcome = run(seed)?;
    for r in 1..=params.restarts {
        match &outcome {
            PackOutcome::Packed(_) => break,
            PackOutcome::Failed(f) if f.reason == FailureReason::Unpackable => break,
            PackOutcome::Failed(f) => log::debug!("restart {r} after failure at stage {}: {:?}", f.stage, f.reason),
        }
        outcome = run(seed::derive(seed, 0x5EED_0000 + r as u64))?;
    }
    Ok(outcome)
}

fn pack_graphs_once(g1: &Hypergraph, g2: &Hypergraph, params: &PackerParams, seed: u64) -> Result<PackOutcome> {
    let n = g1.n();
    if n < params.oracle_fallback_n && n <= ORACLE_HARD_LIMIT {
        return oracle_outcome(g1, g2);
    }
    if g1.max_degree() == 0 {
        return Ok(PackOutcome::Packed(PackingMap::identity(n)));
    }
    let (eta, t) = graph_schedule(n, g1.max_degree(), params);
    let pp = PartitionParams {
        eta,
        t,
        seed: seed::derive(seed, 1),
    };
    let partition = match independence_refine(g1, &pp) {
        Ok(p) => p,
        Err(e @ Error::Refinement { .. }) => {
            return Ok(PackOutcome::Failed(Failure {
                stage: 0,
                reason: FailureReason::Refinement(e.to_string()),
            }))
        }
        Err(e) => return Err(e),
    };
    if partition.num_classes() < 2 && n <= ORACLE_HARD_LIMIT {
        return oracle_outcome(g1, g2);
    }
    stage::run(g1, g2, &partition, params, seed)
}

/// Packs two k-uniform hypergraphs. `k = 2` is handed to [`pack_graphs`].
///
/// Classes come from a uniform random colouring with `n^(1-eta)` colours
/// (`eta = 1/5` unless overridden). Type-1 collisions are excluded by the
/// stage matchings, a single type-2 collision is repaired, and edges of type
/// three or more are checked once the map is complete.
pub fn pack_hypergraphs(g1: &Hypergraph, g2: &Hypergraph, params: &PackerParams, seed: u64) -> Result<PackOutcome> {
    check_dims(g1, g2)?;
    params.validate()?;
    if g1.k() == 2 {
        return pack_graphs(g1, g2, params, seed);
    }
    restarting(params, seed, |s| pack_hypergraphs_once(g1, g2, params, s))
}

fn pack_hypergraphs_once(g1: &Hypergraph, g2: &Hypergraph, params: &PackerParams, seed: u64) -> Result<PackOutcome> {
    let n = g1.n();
    if n < params.oracle_fallback_n && n <= ORACLE_HARD_LIMIT {
        return oracle_outcome(g1, g2);
    }
    if g1.is_empty() {
        return Ok(PackOutcome::Packed(PackingMap::identity(n)));
    }
    let eta = params.eta.unwrap_or(0.2);
    let partition = random_color_partition(n, class_count(n, eta), seed::derive(seed, 1))?;
    if partition.num_classes() < 2 && n <= ORACLE_HARD_LIMIT {
        return oracle_outcome(g1, g2);
    }
    stage::run(g1, g2, &partition, params, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{generate_random, unpackable_graph_pair, GenParams};

    #[test]
    fn identity_on_triangles_collides_everywhere() {
        let k3 = Hypergraph::complete(3, 2).unwrap();
        assert_eq!(verify_packing(&k3, &k3, &[0, 1, 2]).unwrap().len(), 3);
        let empty = Hypergraph::empty(3, 2).unwrap();
        assert!(verify_packing(&empty, &k3, &[2, 0, 1]).unwrap().is_empty());
        assert!(verify_packing(&k3, &k3, &[0, 0, 1]).is_err());
        assert!(verify_packing(&k3, &k3, &[0, 1]).is_err());
    }

    #[test]
    fn empty_first_graph_packs() {
        let g1 = Hypergraph::empty(50, 2).unwrap();
        let g2 = generate_random(&GenParams::new(50, 2, 0.5, 1)).unwrap();
        assert!(pack_graphs(&g1, &g2, &PackerParams::default(), 0).unwrap().is_packed());
        let h1 = Hypergraph::empty(20, 3).unwrap();
        let h2 = generate_random(&GenParams::new(20, 3, 0.5, 1)).unwrap();
        assert!(pack_hypergraphs(&h1, &h2, &PackerParams::default(), 0)
            .unwrap()
            .is_packed());
    }

    #[test]
    fn matching_into_random_graph() {
        let g1 = Hypergraph::new(200, 2, (0..100u32).map(|i| [2 * i, 2 * i + 1])).unwrap();
        let g2 = generate_random(&GenParams::new(200, 2, 0.2, 7)).unwrap();
        let out = pack_graphs(&g1, &g2, &PackerParams::default(), 3).unwrap();
        let map = out.map().expect("packed");
        assert!(verify_packing(&g1, &g2, &map.forward).unwrap().is_empty());
        assert!(!map.stage_log.is_empty());
    }

    #[test]
    fn small_extremal_pair_goes_to_oracle() {
        let (g1, g2) = unpackable_graph_pair(3, 3).unwrap();
        let out = pack_graphs(&g1, &g2, &PackerParams::default(), 0).unwrap();
        assert_eq!(out.failure().unwrap().reason, FailureReason::Unpackable);
    }

    #[test]
    fn deterministic_given_seed() {
        let g1 = generate_random(&GenParams::new(120, 2, 0.05, 1)).unwrap();
        let g2 = generate_random(&GenParams::new(120, 2, 0.05, 2)).unwrap();
        let p = PackerParams::default();
        assert_eq!(
            pack_graphs(&g1, &g2, &p, 9).unwrap(),
            pack_graphs(&g1, &g2, &p, 9).unwrap()
        );
    }

    #[test]
    fn schedule_values() {
        let p = PackerParams::default();
        let (eta, t) = graph_schedule(1000, 10, &p);
        // q = 0.01, γ = 2/3
        assert!((eta - 1.0 / 3.0).abs() < 1e-12);
        assert!((9..=10).contains(&t));
        assert_eq!(graph_schedule(1000, 900, &p).0, 0.1);
    }
}
