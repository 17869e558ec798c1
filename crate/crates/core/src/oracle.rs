//! Exact packing search for small orders, and the analytic bounds used to
//! sanity-check experiments.

use crate::combinatorics::{binomial_f64, ln_factorial};
use crate::error::{param, Error, Result};
use crate::hypergraph::Hypergraph;

/// Orders above this are refused regardless of configuration.
pub const ORACLE_HARD_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { limit: 12 }
    }
}

impl OracleConfig {
    fn check(&self, g1: &Hypergraph, g2: &Hypergraph) -> Result<()> {
        if g1.n() != g2.n() || g1.k() != g2.k() {
            return Err(Error::Dimension(format!(
                "(n={}, k={}) vs (n={}, k={})",
                g1.n(),
                g1.k(),
                g2.n(),
                g2.k()
            )));
        }
        let limit = self.limit.min(ORACLE_HARD_LIMIT);
        if g1.n() > limit {
            return Err(Error::OracleLimit { n: g1.n(), limit });
        }
        Ok(())
    }
}

/// Backtracking state. Non-isolated vertices of `G1` are placed in order of
/// decreasing degree; an edge is checked as soon as its last vertex is placed.
struct Search<'a> {
    g2: &'a Hypergraph,
    order: Vec<u32>,
    /// Edges of `G1` completed at each depth.
    closing: Vec<Vec<&'a [u32]>>,
    map: Vec<u32>,
    used: Vec<bool>,
    buf: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(g1: &'a Hypergraph, g2: &'a Hypergraph) -> Self {
        let n = g1.n();
        let mut order: Vec<u32> = (0..n as u32).filter(|&v| g1.degree(v) > 0).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(g1.degree(v)));
        let mut depth = vec![usize::MAX; n];
        for (d, &v) in order.iter().enumerate() {
            depth[v as usize] = d;
        }
        let mut closing = vec![Vec::new(); order.len()];
        for e in g1.edges() {
            let last = e.iter().map(|&v| depth[v as usize]).max().expect("k >= 2");
            closing[last].push(e);
        }
        Search {
            g2,
            order,
            closing,
            map: vec![u32::MAX; n],
            used: vec![false; n],
            buf: vec![0; g1.k()],
        }
    }

    fn collides(&mut self, depth: usize) -> bool {
        for e in &self.closing[depth] {
            for (b, &v) in self.buf.iter_mut().zip(e.iter()) {
                *b = self.map[v as usize];
            }
            if self.g2.contains_unsorted(&mut self.buf) {
                return true;
            }
        }
        false
    }

    /// Visits every collision-free placement of the ordered vertices.
    /// `visit` returns `false` to stop the search.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if depth == self.order.len() {
            return visit(&self.map);
        }
        let v = self.order[depth] as usize;
        for w in 0..self.map.len() {
            if self.used[w] {
                continue;
            }
            self.map[v] = w as u32;
            self.used[w] = true;
            let go_on = self.collides(depth) || self.run(depth + 1, visit);
            self.used[w] = false;
            self.map[v] = u32::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// A permutation `π` with `π(e) ∉ E(G2)` for every edge `e` of `G1`, or
/// `None` if no packing exists.
pub fn exact_pack(g1: &Hypergraph, g2: &Hypergraph, config: &OracleConfig) -> Result<Option<Vec<u32>>> {
    config.check(g1, g2)?;
    let mut search = Search::new(g1, g2);
    let mut found = None;
    search.run(0, &mut |map| {
        found = Some(map.to_vec());
        false
    });
    Ok(found.map(|mut map| {
        // isolated vertices take the unused images in increasing order
        let mut used = vec![false; map.len()];
        for &w in map.iter().filter(|&&w| w != u32::MAX) {
            used[w as usize] = true;
        }
        let mut free = (0..map.len() as u32).filter(|&w| !used[w as usize]);
        for slot in map.iter_mut().filter(|w| **w == u32::MAX) {
            *slot = free.next().expect("as many free images as unplaced vertices");
        }
        map
    }))
}

/// Number of permutations that pack `G1` and `G2`.
pub fn count_packings(g1: &Hypergraph, g2: &Hypergraph, config: &OracleConfig) -> Result<u64> {
    config.check(g1, g2)?;
    let mut search = Search::new(g1, g2);
    let free = g1.n() - search.order.len();
    let mut count = 0u64;
    search.run(0, &mut |_| {
        count += 1;
        true
    });
    Ok(count * (1..=free as u64).product::<u64>())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInputs {
    pub n: usize,
    pub k: usize,
    pub pq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub ln_value: f64,
}

/// `n! (1 - pq)^C(n, k)`, the expected number of packings of
/// `G(n, k, p)` and `G(n, k, q)`, evaluated in log space.
pub fn expected_packings_bound(b: &BoundInputs) -> Result<Bound> {
    if !(0.0..=1.0).contains(&b.pq) {
        return Err(param(format!("pq = {} outside [0, 1]", b.pq)));
    }
    if b.k < 2 {
        return Err(param(format!("uniformity must be at least 2, got {}", b.k)));
    }
    let edges = binomial_f64(b.n as u64, b.k as u64);
    let ln_value = if edges == 0.0 {
        ln_factorial(b.n as u64)
    } else {
        ln_factorial(b.n as u64) + edges * (-b.pq).ln_1p()
    };
    Ok(Bound {
        value: ln_value.exp(),
        ln_value,
    })
}

fn check_nonnegative(mu: f64, t: f64) -> Result<()> {
    if !(mu >= 0.0 && t >= 0.0) {
        return Err(param(format!("need mu, t >= 0, got mu={mu} t={t}")));
    }
    Ok(())
}

/// `exp(-t² / 2μ)`, bounding `P[X <= EX - t]`.
pub fn chernoff_lower(mu: f64, t: f64) -> Result<f64> {
    check_nonnegative(mu, t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok((-t * t / (2.0 * mu)).exp())
}

/// `exp(-t² / (2μ + 2t/3))`, bounding `P[X >= EX + t]`.
pub fn chernoff_upper(mu: f64, t: f64) -> Result<f64> {
    check_nonnegative(mu, t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok((-t * t / (2.0 * mu + 2.0 * t / 3.0)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailFlag {
    /// `P[Bin(n, p) >= x] <= value`.
    Bound(f64),
    NotApplicable,
}

/// `e^{-Kx}` when `np <= e^{-K-1} x`, the regime where the binomial upper
/// tail at `x` is at most that.
pub fn binomial_tail_flag(n: u64, p: f64, x: f64, k: f64) -> Result<TailFlag> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("probability {p} outside [0, 1]")));
    }
    if !(x > 0.0 && k > 0.0) {
        return Err(param(format!("need x > 0 and K > 0, got x={x} K={k}")));
    }
    let delta = (-k - 1.0).exp();
    Ok(if n as f64 * p <= delta * x {
        TailFlag::Bound((-k * x).exp())
    } else {
        TailFlag::NotApplicable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::unpackable_graph_pair;

    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    fn edge01() -> Hypergraph {
        Hypergraph::new(3, 2, [[0, 1]]).unwrap()
    }

    #[test]
    fn triangles_do_not_pack() {
        let k3 = Hypergraph::complete(3, 2).unwrap();
        assert_eq!(exact_pack(&k3, &k3, &cfg()).unwrap(), None);
        assert_eq!(count_packings(&k3, &k3, &cfg()).unwrap(), 0);
    }

    #[test]
    fn single_edges() {
        let e = edge01();
        let map = exact_pack(&e, &e, &cfg()).unwrap().unwrap();
        let mut img = [map[0], map[1]];
        img.sort_unstable();
        assert_ne!(img, [0, 1]);
        assert_eq!(count_packings(&e, &e, &cfg()).unwrap(), 4);
    }

    #[test]
    fn empty_first_graph_counts_all_permutations() {
        let g1 = Hypergraph::empty(6, 2).unwrap();
        let g2 = Hypergraph::complete(6, 2).unwrap();
        assert_eq!(count_packings(&g1, &g2, &cfg()).unwrap(), 720);
        let map = exact_pack(&g1, &g2, &cfg()).unwrap().unwrap();
        assert_eq!(map, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn extremal_pair_is_unpackable() {
        let (g1, g2) = unpackable_graph_pair(3, 3).unwrap();
        assert_eq!(exact_pack(&g1, &g2, &cfg()).unwrap(), None);
        assert_eq!(count_packings(&g1, &g2, &cfg()).unwrap(), 0);
    }

    #[test]
    fn limits_are_enforced() {
        let g = Hypergraph::empty(13, 2).unwrap();
        assert!(matches!(
            exact_pack(&g, &g, &cfg()),
            Err(Error::OracleLimit { n: 13, limit: 12 })
        ));
        let g15 = Hypergraph::empty(15, 2).unwrap();
        let wide = OracleConfig { limit: 20 };
        assert!(matches!(
            count_packings(&g15, &g15, &wide),
            Err(Error::OracleLimit { limit: 14, .. })
        ));
        assert!(exact_pack(&edge01(), &Hypergraph::empty(4, 2).unwrap(), &cfg()).is_err());
    }

    #[test]
    fn bound_arithmetic() {
        let b = expected_packings_bound(&BoundInputs { n: 4, k: 2, pq: 0.5 }).unwrap();
        assert!((b.value - 0.375).abs() < 1e-12);
        let b = expected_packings_bound(&BoundInputs { n: 5, k: 2, pq: 0.0 }).unwrap();
        assert!((b.value - 120.0).abs() < 1e-9);
        let b = expected_packings_bound(&BoundInputs { n: 5, k: 2, pq: 1.0 }).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(expected_packings_bound(&BoundInputs { n: 5, k: 2, pq: 1.5 }).is_err());
    }

    #[test]
    fn chernoff_values() {
        assert!((chernoff_lower(100.0, 20.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert_eq!(chernoff_upper(100.0, 0.0).unwrap(), 1.0);
        assert!(chernoff_lower(-1.0, 1.0).is_err());
        assert!(chernoff_upper(1.0, -1.0).is_err());
    }

    #[test]
    fn tail_flag() {
        assert_eq!(
            binomial_tail_flag(100, 0.001, 10.0, 1.0).unwrap(),
            TailFlag::Bound((-10.0f64).exp())
        );
        assert_eq!(
            binomial_tail_flag(100, 0.5, 10.0, 1.0).unwrap(),
            TailFlag::NotApplicable
        );
        assert!(binomial_tail_flag(100, 0.5, 0.0, 1.0).is_err());
    }
}
