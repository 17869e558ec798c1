//! Packing one fixed graph together with several random graphs.

use super::{pack_graphs, verify_packing, Failure, PackOutcome, PackerParams, PackingMap};
use crate::error::{Error, Result};
use crate::hypergraph::{generate_random, GenParams, Hypergraph};
use crate::seed;

#[derive(Clone, Debug, PartialEq)]
pub enum ManyOutcome {
    /// `placed[0]` is `G0`; `placed[i]` is the copy of the `i`-th random
    /// graph in `G0`'s coordinates, and `maps[i - 1]` the map that put it
    /// there (from the union so far onto the random graph).
    Packed {
        placed: Vec<Hypergraph>,
        maps: Vec<PackingMap>,
    },
    /// `index` is the position in `randoms` of the graph that could not be added.
    Failed { index: usize, failure: Failure },
}

impl ManyOutcome {
    pub fn is_packed(&self) -> bool {
        matches!(self, ManyOutcome::Packed { .. })
    }
}

/// Packs `G0` with graphs drawn from `randoms`, adding them one at a time
/// in order of increasing density. Each step packs the union placed so far
/// (the bounded-degree side) with the next random graph.
pub fn pack_many(g0: &Hypergraph, randoms: &[GenParams], params: &PackerParams, seed: u64) -> Result<ManyOutcome> {
    if g0.k() != 2 {
        return Err(Error::Parameter(format!("pack_many needs graphs, got k={}", g0.k())));
    }
    let graphs: Vec<Hypergraph> = randoms
        .iter()
        .map(|gp| {
            if gp.n != g0.n() || gp.k != 2 {
                return Err(Error::Dimension(format!(
                    "random graph (n={}, k={}) does not match G0 (n={}, k=2)",
                    gp.n,
                    gp.k,
                    g0.n()
                )));
            }
            generate_random(gp)
        })
        .collect::<Result<_>>()?;

    let mut order: Vec<usize> = (0..randoms.len()).collect();
    order.sort_by(|&a, &b| randoms[a].p.total_cmp(&randoms[b].p));

    let mut union = g0.clone();
    let mut degree_budget = g0.max_degree();
    let mut placed: Vec<Option<Hypergraph>> = vec![None; randoms.len()];
    let mut maps: Vec<Option<PackingMap>> = vec![None; randoms.len()];
    for (step, &idx) in order.iter().enumerate() {
        let gi = &graphs[idx];
        let map = match pack_graphs(&union, gi, params, seed::derive(seed, step as u64))? {
            PackOutcome::Packed(map) => map,
            PackOutcome::Failed(failure) => return Ok(ManyOutcome::Failed { index: idx, failure }),
        };
        let copy = gi.relabel(&map.inverse());
        debug_assert!(verify_packing(&union, gi, &map.forward)?.is_empty());
        union = union.union(&copy)?;
        degree_budget += gi.max_degree();
        assert!(
            union.max_degree() <= degree_budget,
            "maximum degree of a union exceeds the sum of maxima"
        );
        placed[idx] = Some(copy);
        maps[idx] = Some(map);
    }

    let mut all = vec![g0.clone()];
    all.extend(placed.into_iter().map(|g| g.expect("every graph placed")));
    let identity: Vec<u32> = (0..g0.n() as u32).collect();
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            let shared = verify_packing(&all[a], &all[b], &identity)?;
            assert!(
                shared.is_empty(),
                "placed graphs {a} and {b} share {} edges",
                shared.len()
            );
        }
    }
    Ok(ManyOutcome::Packed {
        placed: all,
        maps: maps.into_iter().map(|m| m.expect("every graph placed")).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_random_graph_matches_pack_graphs() {
        let g0 = Hypergraph::new(60, 2, (0..30u32).map(|i| [2 * i, 2 * i + 1])).unwrap();
        let gp = GenParams::new(60, 2, 0.1, 4);
        let params = PackerParams::default();
        let many = pack_many(&g0, &[gp], &params, 8).unwrap();
        let single = pack_graphs(&g0, &generate_random(&gp).unwrap(), &params, seed::derive(8, 0)).unwrap();
        match (many, single) {
            (ManyOutcome::Packed { maps, .. }, PackOutcome::Packed(m)) => assert_eq!(maps[0], m),
            (ManyOutcome::Failed { failure, .. }, PackOutcome::Failed(f)) => assert_eq!(failure, f),
            other => panic!("outcomes disagree: {other:?}"),
        }
    }

    #[test]
    fn placed_graphs_are_pairwise_disjoint() {
        let g0 = Hypergraph::empty(150, 2).unwrap();
        let randoms = [GenParams::new(150, 2, 0.03, 1), GenParams::new(150, 2, 0.02, 2)];
        let params = PackerParams {
            restarts: 3,
            ..PackerParams::default()
        };
        match pack_many(&g0, &randoms, &params, 5).unwrap() {
            ManyOutcome::Packed { placed, .. } => {
                assert_eq!(placed.len(), 3);
                let total: usize = placed.iter().map(Hypergraph::edge_count).sum();
                let union = placed
                    .iter()
                    .skip(1)
                    .fold(placed[0].clone(), |u, g| u.union(g).unwrap());
                assert_eq!(union.edge_count(), total);
            }
            ManyOutcome::Failed { index, failure } => panic!("graph {index} failed: {failure:?}"),
        }
    }

    #[test]
    fn rejects_mismatched_orders() {
        let g0 = Hypergraph::empty(10, 2).unwrap();
        assert!(pack_many(&g0, &[GenParams::new(11, 2, 0.1, 0)], &PackerParams::default(), 0).is_err());
    }
}
