//! Set sequences, the bipartite disjointness graph between two of them, and
//! maximum matching with Hall-violator certificates.

use std::collections::HashMap;

use crate::equitable::equitable_coloring;
use crate::error::{param, Error, Result};
use crate::hypergraph::Hypergraph;

const NONE: u32 = u32::MAX;

/// An indexed family of subsets of `0..ground_size`. Repeats are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSequence {
    ground_size: u64,
    sets: Vec<Vec<u64>>,
}

impl SetSequence {
    /// Sorts and deduplicates each set; fails if an element is out of range.
    pub fn new(ground_size: u64, sets: Vec<Vec<u64>>) -> Result<Self> {
        let mut sets = sets;
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&x) = s.last().filter(|&&x| x >= ground_size) {
                return Err(param(format!("element {x} outside ground set 0..{ground_size}")));
            }
        }
        Ok(SetSequence { ground_size, sets })
    }

    pub fn ground_size(&self) -> u64 {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[u64] {
        &self.sets[i]
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest number of sets sharing one element.
    pub fn element_max_multiplicity(&self) -> usize {
        let mut count: HashMap<u64, usize> = HashMap::new();
        for &x in self.sets.iter().flatten() {
            *count.entry(x).or_default() += 1;
        }
        count.into_values().max().unwrap_or(0)
    }
}

fn disjoint_sorted(a: &[u64], b: &[u64]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Bipartite graph with adjacency kept on both sides, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteDisjointnessGraph {
    left: Vec<Vec<u32>>,
    right: Vec<Vec<u32>>,
}

impl BipartiteDisjointnessGraph {
    /// Any bipartite graph, from left adjacency lists.
    pub fn from_adjacency(right_size: usize, left: Vec<Vec<u32>>) -> Result<Self> {
        let mut right = vec![Vec::new(); right_size];
        let mut left = left;
        for (i, ns) in left.iter_mut().enumerate() {
            ns.sort_unstable();
            ns.dedup();
            for &j in ns.iter() {
                right
                    .get_mut(j as usize)
                    .ok_or_else(|| param(format!("right vertex {j} out of range 0..{right_size}")))?
                    .push(i as u32);
            }
        }
        Ok(BipartiteDisjointnessGraph { left, right })
    }

    pub fn left_size(&self) -> usize {
        self.left.len()
    }

    pub fn right_size(&self) -> usize {
        self.right.len()
    }

    pub fn left_adj(&self, i: usize) -> &[u32] {
        &self.left[i]
    }

    pub fn right_adj(&self, j: usize) -> &[u32] {
        &self.right[j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.left[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.left.iter().map(Vec::len).sum()
    }
}

fn check_shapes(a: &SetSequence, b: &SetSequence) -> Result<()> {
    if a.len() != b.len() || a.ground_size() != b.ground_size() {
        return Err(Error::Dimension(format!(
            "sequences of {} sets over {} and {} sets over {}",
            a.len(),
            a.ground_size(),
            b.len(),
            b.ground_size()
        )));
    }
    Ok(())
}

/// Joins `A_i` to `B_j` when they are disjoint.
///
/// Conflicts are found through an inverted index on the elements of `B`, so
/// the cost is proportional to the number of intersecting pairs rather than
/// to the ground set.
pub fn build_disjointness_graph(a: &SetSequence, b: &SetSequence) -> Result<BipartiteDisjointnessGraph> {
    check_shapes(a, b)?;
    let m = a.len();
    let mut holders: HashMap<u64, Vec<u32>> = HashMap::new();
    for (j, s) in b.sets().iter().enumerate() {
        for &x in s {
            holders.entry(x).or_default().push(j as u32);
        }
    }
    let mut blocked = vec![usize::MAX; m];
    let left = a
        .sets()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            for x in s {
                for &j in holders.get(x).map(Vec::as_slice).unwrap_or(&[]) {
                    blocked[j as usize] = i;
                }
            }
            (0..m as u32).filter(|&j| blocked[j as usize] != i).collect()
        })
        .collect();
    BipartiteDisjointnessGraph::from_adjacency(m, left)
}

/// Same graph as [`build_disjointness_graph`], computed with fixed-width
/// bitmaps over the ground set. Suited to small dense ground sets.
pub fn build_disjointness_graph_bitmap(a: &SetSequence, b: &SetSequence) -> Result<BipartiteDisjointnessGraph> {
    check_shapes(a, b)?;
    let words = (a.ground_size() as usize).div_ceil(64);
    let bitmap = |s: &[u64]| {
        let mut w = vec![0u64; words];
        for &x in s {
            w[(x / 64) as usize] |= 1 << (x % 64);
        }
        w
    };
    let bs: Vec<Vec<u64>> = b.sets().iter().map(|s| bitmap(s)).collect();
    let left = a
        .sets()
        .iter()
        .map(|s| {
            let wa = bitmap(s);
            (0..bs.len() as u32)
                .filter(|&j| wa.iter().zip(&bs[j as usize]).all(|(x, y)| x & y == 0))
                .collect()
        })
        .collect();
    BipartiteDisjointnessGraph::from_adjacency(b.len(), left)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A vertex set `S` on one side with `|N(S)| < |S|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallViolator {
    pub side: Side,
    pub set: Vec<u32>,
    pub neighbors: Vec<u32>,
}

impl HallViolator {
    /// Recomputes `N(S)` from the graph and checks `|N(S)| < |S|`.
    pub fn verify(&self, h: &BipartiteDisjointnessGraph) -> bool {
        let adj = |v: u32| match self.side {
            Side::Left => h.left.get(v as usize),
            Side::Right => h.right.get(v as usize),
        };
        let mut nbrs = Vec::new();
        for &v in &self.set {
            match adj(v) {
                Some(ns) => nbrs.extend_from_slice(ns),
                None => return false,
            }
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        let mut set = self.set.clone();
        set.sort_unstable();
        set.dedup();
        set.len() == self.set.len() && nbrs.len() < set.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchStatus {
    Perfect,
    Deficient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    /// `matching[i]` is the right partner of left vertex `i`.
    pub matching: Vec<Option<u32>>,
    /// Present exactly when the matching is not perfect.
    pub violator: Option<HallViolator>,
}

impl MatchResult {
    pub fn size(&self) -> usize {
        self.matching.iter().flatten().count()
    }

    pub fn status(&self) -> MatchStatus {
        if self.violator.is_none() {
            MatchStatus::Perfect
        } else {
            MatchStatus::Deficient
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.violator.is_none()
    }
}

/// Maximum-cardinality matching by shortest augmenting paths in phases.
/// Vertices and adjacency are scanned in index order, so the result is a
/// deterministic function of the graph.
pub fn maximum_matching(h: &BipartiteDisjointnessGraph) -> MatchResult {
    let nl = h.left_size();
    let mut match_l = vec![NONE; nl];
    let mut match_r = vec![NONE; h.right_size()];
    let mut dist = vec![u32::MAX; nl];
    let mut next = vec![0usize; nl];
    loop {
        let mut queue: Vec<u32> = (0..nl as u32).filter(|&u| match_l[u as usize] == NONE).collect();
        dist.fill(u32::MAX);
        for &u in &queue {
            dist[u as usize] = 0;
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &v in &h.left[u] {
                let w = match_r[v as usize];
                if w == NONE {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            break;
        }
        next.fill(0);
        for u in 0..nl {
            if match_l[u] == NONE {
                augment(h, u, &mut match_l, &mut match_r, &mut dist, &mut next);
            }
        }
    }

    let violator = if match_l.contains(&NONE) {
        Some(violator_from(&h.left, &h.right, &match_l, &match_r, Side::Left))
    } else if match_r.contains(&NONE) {
        Some(violator_from(&h.right, &h.left, &match_r, &match_l, Side::Right))
    } else {
        None
    };
    MatchResult {
        matching: match_l.iter().map(|&j| (j != NONE).then_some(j)).collect(),
        violator,
    }
}

fn augment(
    h: &BipartiteDisjointnessGraph,
    u: usize,
    match_l: &mut [u32],
    match_r: &mut [u32],
    dist: &mut [u32],
    next: &mut [usize],
) -> bool {
    while next[u] < h.left[u].len() {
        let v = h.left[u][next[u]];
        next[u] += 1;
        let w = match_r[v as usize];
        let ok = w == NONE || (dist[w as usize] == dist[u] + 1 && augment(h, w as usize, match_l, match_r, dist, next));
        if ok {
            match_l[u] = v;
            match_r[v as usize] = u as u32;
            return true;
        }
    }
    dist[u] = u32::MAX;
    false
}

/// Alternating reachability from the unmatched vertices of one side. The
/// reached vertices of that side have only reached neighbours on the other,
/// all matched back into the set, so the set outnumbers its neighbourhood
/// by the number of unmatched starting points.
fn violator_from(adj: &[Vec<u32>], other: &[Vec<u32>], mate: &[u32], other_mate: &[u32], side: Side) -> HallViolator {
    let mut in_set = vec![false; adj.len()];
    let mut reached = vec![false; other.len()];
    let mut queue: Vec<u32> = (0..adj.len() as u32).filter(|&u| mate[u as usize] == NONE).collect();
    for &u in &queue {
        in_set[u as usize] = true;
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        for &v in &adj[u] {
            if !reached[v as usize] {
                reached[v as usize] = true;
                let w = other_mate[v as usize];
                debug_assert_ne!(w, NONE, "maximum matching admits no augmenting path");
                if w != NONE && !in_set[w as usize] {
                    in_set[w as usize] = true;
                    queue.push(w);
                }
            }
        }
    }
    let collect = |flags: &[bool]| (0..flags.len() as u32).filter(|&i| flags[i as usize]).collect();
    HallViolator {
        side,
        set: collect(&in_set),
        neighbors: collect(&reached),
    }
}

/// Smallest degree over both sides; 0 for the empty graph.
pub fn min_degree(h: &BipartiteDisjointnessGraph) -> usize {
    h.left.iter().chain(&h.right).map(Vec::len).min().unwrap_or(0)
}

/// Number of sets of `a` disjoint from `b` (sorted).
pub fn disjoint_count(b: &[u64], a: &SetSequence) -> usize {
    a.sets().iter().filter(|s| disjoint_sorted(b, s)).count()
}

/// Intersection graph of a set sequence: vertex `i` per set, joined when the
/// sets meet.
pub fn intersection_graph(a: &SetSequence) -> Hypergraph {
    let mut holders: HashMap<u64, Vec<u32>> = HashMap::new();
    for (i, s) in a.sets().iter().enumerate() {
        for &x in s {
            holders.entry(x).or_default().push(i as u32);
        }
    }
    let mut edges = Vec::new();
    for hs in holders.values() {
        for (p, &i) in hs.iter().enumerate() {
            for &j in &hs[p + 1..] {
                edges.push([i, j]);
            }
        }
    }
    Hypergraph::new(a.len(), 2, edges).expect("indices are in range")
}

/// Splits the indices of `a` into `Δ + 1` collections of pairwise disjoint
/// sets of near-equal size, `Δ` being the maximum degree of the
/// intersection graph.
pub fn disjoint_collections(a: &SetSequence) -> Result<Vec<Vec<u32>>> {
    let g = intersection_graph(a);
    if a.is_empty() {
        return Ok(Vec::new());
    }
    equitable_coloring(&g, g.max_degree() + 1)
}
