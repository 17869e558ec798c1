use hyperpack::matching::{build_disjointness_graph_bitmap, disjoint_collections, intersection_graph};
use hyperpack::{
    build_disjointness_graph, disjoint_count, maximum_matching, min_degree, BipartiteDisjointnessGraph, SetSequence,
    Side,
};
use proptest::prelude::*;

fn set_sequence(ground: u64, max_len: usize) -> impl Strategy<Value = SetSequence> {
    prop::collection::vec(prop::collection::vec(0..ground, 0..5), 0..=max_len)
        .prop_map(move |sets| SetSequence::new(ground, sets).unwrap())
}

fn equal_pair(ground: u64, max_len: usize) -> impl Strategy<Value = (SetSequence, SetSequence)> {
    (1..ground, 0..=max_len).prop_flat_map(|(g, m)| {
        let seq = move || {
            prop::collection::vec(prop::collection::vec(0..g, 0..5), m)
                .prop_map(move |sets| SetSequence::new(g, sets).unwrap())
        };
        (seq(), seq())
    })
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().all(|x| !b.contains(x))
}

fn bipartite(max: usize) -> impl Strategy<Value = BipartiteDisjointnessGraph> {
    (1..=max, 1..=max).prop_flat_map(|(l, r)| {
        prop::collection::vec(prop::collection::vec(0..r as u32, 0..=r), l)
            .prop_map(move |left| BipartiteDisjointnessGraph::from_adjacency(r, left).unwrap())
    })
}

/// Largest matching by trying every right partner (or none) for each left
/// vertex in turn.
fn brute_matching(h: &BipartiteDisjointnessGraph) -> usize {
    fn go(h: &BipartiteDisjointnessGraph, i: usize, used: &mut Vec<bool>) -> usize {
        if i == h.left_size() {
            return 0;
        }
        let mut best = go(h, i + 1, used);
        for j in 0..h.right_size() {
            if !used[j] && h.has_edge(i, j) {
                used[j] = true;
                best = best.max(1 + go(h, i + 1, used));
                used[j] = false;
            }
        }
        best
    }
    go(h, 0, &mut vec![false; h.right_size()])
}

proptest! {
    #[test]
    fn adjacency_is_pairwise_disjointness((a, b) in equal_pair(12, 8)) {
        let h = build_disjointness_graph(&a, &b).unwrap();
        prop_assert_eq!(&h, &build_disjointness_graph_bitmap(&a, &b).unwrap());
        for i in 0..a.len() {
            for j in 0..b.len() {
                prop_assert_eq!(h.has_edge(i, j), disjoint(a.set(i), b.set(j)));
            }
        }
        for j in 0..b.len() {
            let expect = a.sets().iter().filter(|s| disjoint(s, b.set(j))).count();
            prop_assert_eq!(disjoint_count(b.set(j), &a), expect);
            prop_assert_eq!(h.right_adj(j).len(), expect);
        }
    }

    #[test]
    fn matching_size_equals_exhaustive_search(h in bipartite(7)) {
        let r = maximum_matching(&h);
        prop_assert_eq!(r.size(), brute_matching(&h));
        let mut seen = vec![false; h.right_size()];
        for (i, m) in r.matching.iter().enumerate() {
            if let Some(j) = *m {
                prop_assert!(h.has_edge(i, j as usize));
                prop_assert!(!std::mem::replace(&mut seen[j as usize], true));
            }
        }
        let perfect = h.left_size() == h.right_size() && r.size() == h.left_size();
        prop_assert_eq!(r.is_perfect(), perfect);
        match &r.violator {
            Some(v) => {
                prop_assert!(!perfect);
                prop_assert!(v.verify(&h));
                prop_assert!(v.neighbors.len() < v.set.len());
                let (side_len, other) = match v.side {
                    Side::Left => (h.left_size(), h.right_size()),
                    Side::Right => (h.right_size(), h.left_size()),
                };
                prop_assert!(v.set.iter().all(|&x| (x as usize) < side_len));
                prop_assert!(v.neighbors.iter().all(|&y| (y as usize) < other));
            }
            None => prop_assert!(perfect),
        }
    }

    #[test]
    fn min_degree_is_smallest_row_or_column(h in bipartite(7)) {
        let rows = (0..h.left_size()).map(|i| h.left_adj(i).len());
        let cols = (0..h.right_size()).map(|j| h.right_adj(j).len());
        prop_assert_eq!(min_degree(&h), rows.chain(cols).min().unwrap());
    }

    #[test]
    fn disjoint_collections_are_disjoint_and_equitable(a in set_sequence(10, 12)) {
        let g = intersection_graph(&a);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                prop_assert_eq!(g.contains(&[i as u32, j as u32]), !disjoint(a.set(i), a.set(j)));
            }
        }
        let cols = disjoint_collections(&a).unwrap();
        let mut all: Vec<u32> = cols.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..a.len() as u32).collect::<Vec<_>>());
        if !cols.is_empty() {
            let sizes: Vec<usize> = cols.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            prop_assert_eq!(cols.len(), g.max_degree() + 1);
        }
        for c in &cols {
            for (x, &i) in c.iter().enumerate() {
                for &j in &c[x + 1..] {
                    prop_assert!(disjoint(a.set(i as usize), a.set(j as usize)));
                }
            }
        }
    }
}
