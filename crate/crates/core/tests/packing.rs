use std::collections::HashSet;

use hyperpack::{
    classify_edge_type, equitable_coloring, exact_pack, generate_random, independence_refine, pack_graphs,
    pack_hypergraphs, pack_many, verify_packing, EdgeType, FailureReason, GenParams, Hypergraph, ManyOutcome,
    OracleConfig, PackOutcome, PackerParams, PartitionParams,
};
use proptest::prelude::*;

/// Edges of `g1` whose image under `map` is an edge of `g2`, by a full
/// rescan against a hash set.
fn collisions(g1: &Hypergraph, g2: &Hypergraph, map: &[u32]) -> Vec<Vec<u32>> {
    let e2: HashSet<Vec<u32>> = g2.edges().map(<[u32]>::to_vec).collect();
    g1.edges()
        .filter(|e| {
            let mut img: Vec<u32> = e.iter().map(|&v| map[v as usize]).collect();
            img.sort_unstable();
            e2.contains(&img)
        })
        .map(<[u32]>::to_vec)
        .collect()
}

fn is_permutation(map: &[u32]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&v| (v as usize) < map.len() && !std::mem::replace(&mut seen[v as usize], true))
}

fn random_pair(n: usize, k: usize, p: f64, q: f64, seed: u64) -> (Hypergraph, Hypergraph) {
    (
        generate_random(&GenParams::new(n, k, p, seed)).unwrap(),
        generate_random(&GenParams::new(n, k, q, seed ^ 0xABCD)).unwrap(),
    )
}

fn sparse_density(n: usize, k: usize, c: f64) -> f64 {
    let nf = n as f64;
    (c * nf.ln() / nf.powi(k as i32 - 1)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verify_packing_matches_rescan(n in 3usize..30, k in 2usize..=3, p in 0.0f64..0.6, seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (g1, g2) = random_pair(n, k, p, p, seed);
        let mut map: Vec<u32> = (0..n as u32).collect();
        use rand::seq::SliceRandom;
        map.shuffle(&mut hyperpack::seed::rng(perm_seed));
        let mut got = verify_packing(&g1, &g2, &map).unwrap();
        let mut want = collisions(&g1, &g2, &map);
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn reported_graph_packings_are_sound(n in 9usize..120, c in 0.01f64..3.0, seed in any::<u64>()) {
        let p = sparse_density(n, 2, c);
        let (g1, g2) = random_pair(n, 2, p, p, seed);
        match pack_graphs(&g1, &g2, &PackerParams::default(), seed).unwrap() {
            PackOutcome::Packed(map) => {
                prop_assert!(is_permutation(&map.forward));
                prop_assert!(collisions(&g1, &g2, &map.forward).is_empty());
                let mut prefix = 0;
                for (i, rec) in map.stage_log.iter().enumerate() {
                    prop_assert_eq!(rec.stage, i);
                    prop_assert_eq!(rec.prefix_size, prefix);
                    prop_assert!(rec.attempts >= 1);
                    prefix += rec.class_size;
                }
                if !map.stage_log.is_empty() {
                    prop_assert_eq!(prefix, n);
                }
            }
            PackOutcome::Failed(f) => prop_assert_ne!(f.reason, FailureReason::Unpackable),
        }
    }

    #[test]
    fn reported_hypergraph_packings_are_sound(n in 9usize..40, c in 0.01f64..3.0, seed in any::<u64>()) {
        let p = sparse_density(n, 3, c);
        let (g1, g2) = random_pair(n, 3, p, p, seed);
        if let PackOutcome::Packed(map) = pack_hypergraphs(&g1, &g2, &PackerParams::default(), seed).unwrap() {
            prop_assert!(is_permutation(&map.forward));
            prop_assert!(collisions(&g1, &g2, &map.forward).is_empty());
        }
    }

    #[test]
    fn small_orders_agree_with_the_oracle(n in 3usize..9, p in 0.0f64..0.8, q in 0.0f64..0.8, seed in any::<u64>()) {
        let (g1, g2) = random_pair(n, 2, p, q, seed);
        let exact = exact_pack(&g1, &g2, &OracleConfig::default()).unwrap();
        for fallback in [0, 9] {
            let params = PackerParams { oracle_fallback_n: fallback, ..PackerParams::default() };
            match pack_graphs(&g1, &g2, &params, seed).unwrap() {
                PackOutcome::Packed(map) => {
                    prop_assert!(exact.is_some());
                    prop_assert!(collisions(&g1, &g2, &map.forward).is_empty());
                }
                PackOutcome::Failed(f) => {
                    if fallback == 9 {
                        prop_assert!(exact.is_none());
                        prop_assert_eq!(f.reason, FailureReason::Unpackable);
                    }
                }
            }
        }
    }

    #[test]
    fn equitable_colouring_is_proper_and_balanced(n in 1usize..80, p in 0.0f64..0.5, seed in any::<u64>(), extra in 1usize..4) {
        let g = generate_random(&GenParams::new(n.max(2), 2, p, seed)).unwrap();
        let colours = g.max_degree() + extra;
        let classes = equitable_coloring(&g, colours).unwrap();
        prop_assert_eq!(classes.len(), colours);
        let mut colour = vec![usize::MAX; g.n()];
        for (c, class) in classes.iter().enumerate() {
            for &v in class {
                prop_assert_eq!(colour[v as usize], usize::MAX);
                colour[v as usize] = c;
            }
        }
        prop_assert!(colour.iter().all(|&c| c != usize::MAX));
        prop_assert!(g.edges().all(|e| colour[e[0] as usize] != colour[e[1] as usize]));
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn refinement_meets_its_postcondition(n in 4usize..150, deg in 0.0f64..4.0, seed in any::<u64>()) {
        let g = generate_random(&GenParams::new(n, 2, (deg / n as f64).min(1.0), seed)).unwrap();
        let params = PartitionParams { eta: 0.5, t: 4, seed };
        if let Ok(part) = independence_refine(&g, &params) {
            let mut all: Vec<u32> = part.classes().concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n as u32).collect::<Vec<_>>());
            for class in part.classes() {
                let members: HashSet<u32> = class.iter().copied().collect();
                prop_assert!(g.edges().all(|e| !(members.contains(&e[0]) && members.contains(&e[1]))));
                for v in 0..n as u32 {
                    let inside = g.neighbors(v).iter().filter(|u| members.contains(u)).count();
                    prop_assert!(inside < params.t);
                }
            }
            let sizes = part.sizes();
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn edge_types_count_vertices_in_the_current_class(n in 4usize..20, seed in any::<u64>(), classes in 1usize..4) {
        let g = generate_random(&GenParams::new(n, 3, 0.2, seed)).unwrap();
        let part = hyperpack::random_color_partition(n, classes.min(n), seed).unwrap();
        for stage in 0..part.num_classes() {
            for e in g.edges() {
                let later = e.iter().any(|&v| part.class_of(v) > stage);
                let here = e.iter().filter(|&&v| part.class_of(v) == stage).count();
                let want = if later || here == 0 { EdgeType::Irrelevant } else { EdgeType::Type(here) };
                prop_assert_eq!(classify_edge_type(e, &part, stage).unwrap(), want);
            }
        }
    }
}

#[test]
fn matching_packs_into_dense_random_graph() {
    let n = 200;
    let g1 = Hypergraph::new(n, 2, (0..n as u32 / 2).map(|i| [2 * i, 2 * i + 1])).unwrap();
    let g2 = generate_random(&GenParams::new(n, 2, 0.2, 5)).unwrap();
    let out = pack_graphs(
        &g1,
        &g2,
        &PackerParams {
            restarts: 4,
            ..PackerParams::default()
        },
        1,
    )
    .unwrap();
    let map = out.map().expect("packed");
    assert!(collisions(&g1, &g2, &map.forward).is_empty());
}

#[test]
fn many_graphs_placed_pairwise_disjoint() {
    let n = 300;
    let g0 = generate_random(&GenParams::new(n, 2, 2.0 / n as f64, 1)).unwrap();
    let p = sparse_density(n, 2, 0.05);
    let randoms = [GenParams::new(n, 2, p, 11), GenParams::new(n, 2, p / 2.0, 12)];
    let params = PackerParams {
        restarts: 8,
        ..PackerParams::default()
    };
    let mut packed = 0;
    for seed in 0..5 {
        if let ManyOutcome::Packed { placed, .. } = pack_many(&g0, &randoms, &params, seed).unwrap() {
            packed += 1;
            let identity: Vec<u32> = (0..n as u32).collect();
            for a in 0..placed.len() {
                for b in a + 1..placed.len() {
                    assert!(collisions(&placed[a], &placed[b], &identity).is_empty());
                }
            }
            let total: usize = placed.iter().map(Hypergraph::edge_count).sum();
            assert_eq!(
                placed
                    .iter()
                    .fold(Hypergraph::empty(n, 2).unwrap(), |u, g| u.union(g).unwrap())
                    .edge_count(),
                total
            );
        }
    }
    assert!(packed >= 4, "only {packed} of 5 runs packed");
}
