use hyperpack::combinatorics::{binomial_f64, for_each_subset};
use hyperpack::edgelist::{read_edge_list_from, write_edge_list_to};
use hyperpack::{generate_random, CoupledSample, GenParams, Hypergraph};
use proptest::prelude::*;

fn five_sigma(n: usize, k: usize, p: f64, edges: usize) {
    let total = binomial_f64(n as u64, k as u64);
    let sigma = (total * p * (1.0 - p)).sqrt();
    let dev = (edges as f64 - total * p).abs();
    assert!(
        dev <= 5.0 * sigma,
        "n={n} k={k} p={p}: {edges} edges, mean {}, sigma {sigma}",
        total * p
    );
}

#[test]
fn edge_counts_within_five_sigma() {
    for (n, k, p) in [(1000, 2, 0.5), (1000, 2, 0.01), (80, 3, 0.1), (40, 4, 0.02)] {
        for seed in 0..3 {
            let g = generate_random(&GenParams::new(n, k, p, seed)).unwrap();
            five_sigma(n, k, p, g.edge_count());
        }
    }
}

#[test]
fn coupled_sample_marginal_within_five_sigma() {
    let s = CoupledSample::new(600, 2, 0.2, 9).unwrap();
    for p in [0.2, 0.1, 0.01] {
        five_sigma(600, 2, p, s.at(p).edge_count());
    }
}

#[test]
fn vertex_degrees_are_unbiased() {
    // Mean degree over many seeds, per vertex, against p(n-1).
    let (n, p, reps) = (30, 0.3, 400);
    let mut deg = vec![0usize; n];
    for seed in 0..reps {
        let g = generate_random(&GenParams::new(n, 2, p, seed)).unwrap();
        for (v, d) in deg.iter_mut().enumerate() {
            *d += g.degree(v as u32);
        }
    }
    let sigma = ((n - 1) as f64 * p * (1.0 - p) * reps as f64).sqrt();
    let mean = (n - 1) as f64 * p * reps as f64;
    for d in deg {
        assert!((d as f64 - mean).abs() <= 5.0 * sigma);
    }
}

fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    (2usize..=4, 0usize..8).prop_flat_map(|(k, extra)| {
        let n = k + extra;
        let mut all = Vec::new();
        for_each_subset(&(0..n as u32).collect::<Vec<_>>(), k, |s| all.push(s.to_vec()));
        prop::collection::vec(any::<bool>(), all.len()).prop_map(move |mask| {
            let edges = all.iter().zip(&mask).filter(|(_, &m)| m).map(|(e, _)| e.clone());
            Hypergraph::new(n, k, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn count_extensions_matches_scan(h in hypergraph()) {
        let verts: Vec<u32> = (0..h.n() as u32).collect();
        for_each_subset(&verts, h.k() - 1, |set| {
            let brute = verts
                .iter()
                .filter(|v| !set.contains(v))
                .filter(|&&v| {
                    let mut e = set.to_vec();
                    e.push(v);
                    e.sort_unstable();
                    h.edges().any(|f| f == e.as_slice())
                })
                .count();
            assert_eq!(h.count_extensions(set).unwrap(), brute);
        });
    }

    #[test]
    fn degrees_and_neighbourhoods_match_scan(h in hypergraph()) {
        for v in 0..h.n() as u32 {
            let inc: Vec<&[u32]> = h.edges().filter(|e| e.contains(&v)).collect();
            prop_assert_eq!(h.degree(v), inc.len());
            let mut nb: Vec<u32> = inc.iter().flat_map(|e| e.iter().copied()).filter(|&u| u != v).collect();
            nb.sort_unstable();
            nb.dedup();
            prop_assert_eq!(h.neighbors(v), nb);
        }
    }

    #[test]
    fn edge_list_round_trip(h in hypergraph()) {
        let mut buf = Vec::new();
        write_edge_list_to(&h, &mut buf).unwrap();
        prop_assert_eq!(read_edge_list_from(&buf[..]).unwrap(), h);
    }

    #[test]
    fn coupled_members_nest_and_match_thresholds(seed in any::<u64>(), a in 0.0f64..0.6, b in 0.0f64..0.6) {
        let s = CoupledSample::new(25, 2, 0.6, seed).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (small, big) = (s.at(lo), s.at(hi));
        prop_assert!(small.edges().all(|e| big.contains(e)));
        prop_assert_eq!(s.at(hi), big);
    }

    #[test]
    fn generation_is_a_function_of_the_seed(n in 3usize..40, k in 2usize..=3, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let params = GenParams::new(n, k, p, seed);
        let g = generate_random(&params).unwrap();
        prop_assert_eq!(&g, &generate_random(&params).unwrap());
        prop_assert_eq!(g.k(), k);
        prop_assert!(g.edges().all(|e| e.len() == k && e.windows(2).all(|w| w[0] < w[1]) && (e[k - 1] as usize) < n));
    }
}
