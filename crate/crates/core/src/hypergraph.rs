//! k-uniform hypergraphs on the vertex set `0..n`.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng as _;

use crate::combinatorics::{binomial, colex_unrank, for_each_subset};
use crate::error::{param, Result};
use crate::seed;

/// A k-uniform hypergraph with vertices `0..n`.
///
/// Edges are stored sorted within and lexicographically across, without
/// duplicates, so two hypergraphs with the same edge set compare equal and
/// iterate identically.
#[derive(Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    /// Flat storage, `k` vertices per edge.
    edges: Vec<u32>,
    /// Edge indices incident to each vertex.
    incidence: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary vertex lists. Each edge is sorted;
    /// duplicate edges are merged.
    pub fn new<I, E>(n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        Self::with_duplicates(n, k, edges).map(|(h, _)| h)
    }

    /// Like [`Hypergraph::new`], also returning how many duplicate edges were dropped.
    pub fn with_duplicates<I, E>(n: usize, k: usize, edges: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        if k < 2 {
            return Err(param(format!("uniformity must be at least 2, got {k}")));
        }
        if n > u32::MAX as usize {
            return Err(param("vertex count exceeds u32 range"));
        }
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for e in edges {
            let mut e = e.as_ref().to_vec();
            check_edge(n, k, &mut e)?;
            rows.push(e);
        }
        rows.sort_unstable();
        let before = rows.len();
        rows.dedup();
        let dups = before - rows.len();
        Ok((Self::from_sorted_rows(n, k, rows.concat()), dups))
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new::<_, [u32; 0]>(n, k, [])
    }

    /// Complete k-uniform hypergraph on `n` vertices.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(param(format!("uniformity must be at least 2, got {k}")));
        }
        disjoint_cliques(k, &[n], 0)
    }

    fn from_sorted_rows(n: usize, k: usize, edges: Vec<u32>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.chunks_exact(k).enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        Hypergraph { n, k, edges, incidence }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i * self.k..(i + 1) * self.k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k)
    }

    /// Edges containing `v`.
    pub fn incident(&self, v: u32) -> impl Iterator<Item = &[u32]> + '_ {
        self.incidence[v as usize].iter().map(move |&i| self.edge(i as usize))
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    /// Largest number of edges meeting a single vertex.
    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Membership test for a sorted vertex list.
    pub fn contains(&self, sorted: &[u32]) -> bool {
        if sorted.len() != self.k {
            return false;
        }
        self.find(sorted).is_ok()
    }

    /// Membership test for an unsorted vertex list; sorts `vertices` in place.
    pub fn contains_unsorted(&self, vertices: &mut [u32]) -> bool {
        vertices.sort_unstable();
        self.contains(vertices)
    }

    fn find(&self, sorted: &[u32]) -> std::result::Result<usize, usize> {
        let (mut lo, mut hi) = (0usize, self.edge_count());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.edge(mid).cmp(sorted) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Ok(mid),
            }
        }
        Err(lo)
    }

    /// Vertices sharing at least one edge with `v`, sorted, without `v`.
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .incident(v)
            .flat_map(|e| e.iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of vertices `v` outside `set` such that `set ∪ {v}` is an edge.
    /// `set` must have exactly `k - 1` vertices.
    pub fn count_extensions(&self, set: &[u32]) -> Result<usize> {
        if set.len() + 1 != self.k {
            return Err(param(format!(
                "expected a set of size {}, got {}",
                self.k - 1,
                set.len()
            )));
        }
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(param("set has repeated vertices"));
        }
        if let Some(&v) = sorted.iter().find(|&&v| v as usize >= self.n) {
            return Err(param(format!("vertex {v} out of range 0..{}", self.n)));
        }
        // Every extension is an edge through the least-degree vertex of the set.
        let pivot = *sorted.iter().min_by_key(|&&v| self.degree(v)).expect("k >= 2");
        Ok(self
            .incident(pivot)
            .filter(|e| sorted.iter().all(|v| e.binary_search(v).is_ok()))
            .count())
    }

    /// Image of the hypergraph under the vertex map `map` (a permutation).
    pub fn relabel(&self, map: &[u32]) -> Self {
        let mut rows: Vec<Vec<u32>> = self
            .edges()
            .map(|e| {
                let mut r: Vec<u32> = e.iter().map(|&v| map[v as usize]).collect();
                r.sort_unstable();
                r
            })
            .collect();
        rows.sort_unstable();
        Self::from_sorted_rows(self.n, self.k, rows.concat())
    }

    /// Edge-union of two hypergraphs on the same vertex set.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.k != other.k {
            return Err(crate::Error::Dimension(format!(
                "cannot union (n={}, k={}) with (n={}, k={})",
                self.n, self.k, other.n, other.k
            )));
        }
        Self::new(self.n, self.k, self.edges().chain(other.edges()))
    }
}

fn check_edge(n: usize, k: usize, e: &mut [u32]) -> Result<()> {
    if e.len() != k {
        return Err(param(format!("edge has {} vertices, expected {k}", e.len())));
    }
    e.sort_unstable();
    if e.windows(2).any(|w| w[0] == w[1]) {
        return Err(param(format!("edge {e:?} repeats a vertex")));
    }
    if let Some(&v) = e.last().filter(|&&v| v as usize >= n) {
        return Err(param(format!("vertex {v} out of range 0..{n}")));
    }
    Ok(())
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Parameters of the random model `G(n, k, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn new(n: usize, k: usize, p: f64, seed: u64) -> Self {
        GenParams { n, k, p, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(param(format!("uniformity must be at least 2, got {}", self.k)));
        }
        if self.n < self.k {
            return Err(param(format!("need n >= k, got n={} k={}", self.n, self.k)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(param(format!("edge probability {} outside [0, 1]", self.p)));
        }
        potential_edges(self.n, self.k).map(|_| ())
    }
}

fn potential_edges(n: usize, k: usize) -> Result<u64> {
    binomial(n as u64, k as u64).ok_or_else(|| param(format!("C({n}, {k}) overflows the edge index space")))
}

/// Number of failures before the next success in Bernoulli(p) trials.
fn geometric_skip(rng: &mut seed::Rng, ln_q: f64) -> u64 {
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let skip = (u.ln() / ln_q).floor();
    if skip >= u64::MAX as f64 {
        u64::MAX
    } else {
        skip as u64
    }
}

/// Visits the colex indices of a Bernoulli(p) subset of `0..total`, calling
/// `f(index, rng)` for each in increasing order.
fn sample_indices(total: u64, p: f64, rng: &mut seed::Rng, mut f: impl FnMut(u64, &mut seed::Rng)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        for i in 0..total {
            f(i, rng);
        }
        return;
    }
    let ln_q = (-p).ln_1p();
    let mut next = 0u64;
    loop {
        let skip = geometric_skip(rng, ln_q);
        let Some(idx) = next.checked_add(skip).filter(|&i| i < total) else {
            return;
        };
        f(idx, rng);
        next = idx + 1;
    }
}

/// Samples `G(n, k, p)`. Each of the `C(n, k)` potential edges is present
/// independently with probability `p`; the sampler jumps between present
/// edges with geometric skips, so the work is proportional to the number of
/// edges produced.
pub fn generate_random(params: &GenParams) -> Result<Hypergraph> {
    params.validate()?;
    let total = potential_edges(params.n, params.k)?;
    let mut rng = seed::rng(params.seed);
    let mut flat = Vec::new();
    let mut buf = vec![0u32; params.k];
    sample_indices(total, params.p, &mut rng, |idx, _| {
        colex_unrank(idx, params.k, &mut buf);
        flat.extend_from_slice(&buf);
    });
    Ok(from_unsorted_flat(params.n, params.k, flat))
}

fn from_unsorted_flat(n: usize, k: usize, flat: Vec<u32>) -> Hypergraph {
    let mut rows: Vec<&[u32]> = flat.chunks_exact(k).collect();
    rows.sort_unstable();
    let sorted = rows.concat();
    Hypergraph::from_sorted_rows(n, k, sorted)
}

/// A coupled family of random hypergraphs `G(n, k, p)` for all `p <= p_max`.
///
/// Every potential edge carries one uniform label `U_e` in `[0, 1)`; the
/// member at density `p` contains exactly the edges with `U_e < p`. Only
/// edges with `U_e < p_max` are materialised. Members are therefore nested:
/// `p <= p'` implies `at(p) ⊆ at(p')`.
#[derive(Clone, Debug)]
pub struct CoupledSample {
    n: usize,
    k: usize,
    p_max: f64,
    /// (label, edge) pairs with label < p_max.
    labelled: Vec<(f64, Vec<u32>)>,
}

impl CoupledSample {
    pub fn new(n: usize, k: usize, p_max: f64, seed: u64) -> Result<Self> {
        let params = GenParams::new(n, k, p_max, seed);
        params.validate()?;
        let total = potential_edges(n, k)?;
        let mut rng = seed::rng(seed);
        let mut labelled = Vec::new();
        sample_indices(total, p_max, &mut rng, |idx, rng| {
            let mut e = vec![0u32; k];
            colex_unrank(idx, k, &mut e);
            // conditional on U_e < p_max, U_e is uniform on [0, p_max)
            let label = rng.gen::<f64>() * p_max;
            labelled.push((label, e));
        });
        Ok(CoupledSample { n, k, p_max, labelled })
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// The member of the family at density `p` (clamped to `p_max`).
    pub fn at(&self, p: f64) -> Hypergraph {
        let flat: Vec<u32> = if p >= self.p_max {
            self.labelled.iter().flat_map(|(_, e)| e.iter().copied()).collect()
        } else {
            self.labelled
                .iter()
                .filter(|(u, _)| *u < p)
                .flat_map(|(_, e)| e.iter().copied())
                .collect()
        };
        from_unsorted_flat(self.n, self.k, flat)
    }
}

/// Disjoint union of complete k-uniform blocks of the given orders, followed
/// by `isolated` isolated vertices.
fn disjoint_cliques(k: usize, blocks: &[usize], isolated: usize) -> Result<Hypergraph> {
    let n = blocks.iter().sum::<usize>() + isolated;
    let mut flat = Vec::new();
    let mut start = 0u32;
    for &size in blocks {
        let members: Vec<u32> = (start..start + size as u32).collect();
        for_each_subset(&members, k, |s| flat.extend_from_slice(s));
        start += size as u32;
    }
    Ok(Hypergraph::from_sorted_rows(n, k, flat))
}

/// The graph pair `G1 = (b-1)K_a ∪ K_{a-2}`, `G2 = (a-1)K_b ∪ K_{b-2}` on
/// `n = ab - 2` vertices. It satisfies `(Δ1 + 1)(Δ2 + 1) = n + 2` and has no
/// packing.
pub fn unpackable_graph_pair(a: usize, b: usize) -> Result<(Hypergraph, Hypergraph)> {
    if a < 2 || b < 2 {
        return Err(param(format!("need a, b >= 2, got a={a} b={b}")));
    }
    let mut blocks1 = vec![a; b - 1];
    blocks1.push(a - 2);
    let mut blocks2 = vec![b; a - 1];
    blocks2.push(b - 2);
    Ok((disjoint_cliques(2, &blocks1, 0)?, disjoint_cliques(2, &blocks2, 0)?))
}

/// The k-uniform analogue: `G1` is `b-1` disjoint complete k-graphs of order
/// `(a-1)(k-1)+1` plus `a-2` isolated vertices, `G2` the same with `a` and
/// `b` swapped, both on `n = (a-1)(b-1)(k-1) + a + b - 3` vertices.
pub fn unpackable_hypergraph_pair(a: usize, b: usize, k: usize) -> Result<(Hypergraph, Hypergraph)> {
    if k < 3 {
        return Err(param(format!("need k >= 3, got {k}")));
    }
    if a < 2 || b < 2 {
        return Err(param(format!("need a, b >= 2, got a={a} b={b}")));
    }
    let g1 = disjoint_cliques(k, &vec![(a - 1) * (k - 1) + 1; b - 1], a - 2)?;
    let g2 = disjoint_cliques(k, &vec![(b - 1) * (k - 1) + 1; a - 1], b - 2)?;
    debug_assert_eq!(g1.n(), g2.n());
    Ok((g1, g2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Hypergraph {
        Hypergraph::complete(4, 2).unwrap()
    }

    #[test]
    fn construction_canonicalises() {
        let h = Hypergraph::new(5, 3, [[4, 1, 0], [2, 1, 0], [0, 1, 4]]).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![&[0, 1, 2][..], &[0, 1, 4]]);
        assert!(h.contains(&[0, 1, 4]));
        assert!(!h.contains(&[0, 1, 3]));
        assert!(h.contains_unsorted(&mut [4, 0, 1]));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::new(3, 2, [[0, 3]]).is_err());
        assert!(Hypergraph::new(3, 2, [[1, 1]]).is_err());
        assert!(Hypergraph::new(3, 3, [[0, 1]]).is_err());
        assert!(Hypergraph::empty(3, 1).is_err());
    }

    #[test]
    fn max_degree_examples() {
        assert_eq!(Hypergraph::empty(5, 2).unwrap().max_degree(), 0);
        assert_eq!(k4().max_degree(), 3);
        let (g1, _) = unpackable_graph_pair(3, 3).unwrap();
        assert_eq!(g1.n(), 7);
        assert_eq!(g1.max_degree(), 2);
    }

    #[test]
    fn count_extensions_examples() {
        assert_eq!(k4().count_extensions(&[0]).unwrap(), 3);
        assert_eq!(Hypergraph::empty(4, 2).unwrap().count_extensions(&[0]).unwrap(), 0);
        let single = Hypergraph::new(3, 3, [[0, 1, 2]]).unwrap();
        assert_eq!(single.count_extensions(&[0, 1]).unwrap(), 1);
        assert_eq!(single.count_extensions(&[1, 0]).unwrap(), 1);
        assert!(single.count_extensions(&[0]).is_err());
        assert!(single.count_extensions(&[0, 7]).is_err());
    }

    #[test]
    fn generate_extremes() {
        let empty = generate_random(&GenParams::new(5, 2, 0.0, 1)).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = generate_random(&GenParams::new(5, 2, 1.0, 1)).unwrap();
        assert_eq!(full, Hypergraph::complete(5, 2).unwrap());
        assert_eq!(full.edge_count(), 10);
        assert!(generate_random(&GenParams::new(1, 2, 0.5, 1)).is_err());
        assert!(generate_random(&GenParams::new(5, 2, 1.5, 1)).is_err());
    }

    #[test]
    fn generate_is_deterministic() {
        let p = GenParams::new(60, 3, 0.01, 99);
        assert_eq!(generate_random(&p).unwrap(), generate_random(&p).unwrap());
    }

    #[test]
    fn coupled_members_are_nested() {
        let s = CoupledSample::new(40, 2, 0.5, 7).unwrap();
        let lo = s.at(0.1);
        let hi = s.at(0.3);
        assert!(lo.edges().all(|e| hi.contains(e)));
        assert_eq!(s.at(0.0).edge_count(), 0);
        assert_eq!(s.at(0.5).edge_count(), s.at(0.9).edge_count());
    }

    #[test]
    fn unpackable_pair_shapes() {
        let (g1, g2) = unpackable_graph_pair(2, 3).unwrap();
        assert_eq!((g1.n(), g2.n()), (4, 4));
        // 2K_2 ∪ K_0 and K_3 ∪ K_1
        assert_eq!(g1.edge_count(), 2);
        assert_eq!(g1.max_degree(), 1);
        assert_eq!(g2.edge_count(), 3);
        assert_eq!(g2.max_degree(), 2);
        assert_eq!(g2.degree(3), 0);
        assert!(unpackable_graph_pair(1, 3).is_err());

        let (h1, h2) = unpackable_hypergraph_pair(2, 2, 3).unwrap();
        assert_eq!(h1.n(), 3);
        assert_eq!(h1.edge_count(), 1);
        assert_eq!(h1, h2);
        assert!(unpackable_hypergraph_pair(2, 2, 2).is_err());
    }

    #[test]
    fn relabel_and_union() {
        let h = Hypergraph::new(4, 2, [[0, 1]]).unwrap();
        let r = h.relabel(&[3, 2, 1, 0]);
        assert!(r.contains(&[2, 3]));
        let u = h.union(&r).unwrap();
        assert_eq!(u.edge_count(), 2);
    }
}
