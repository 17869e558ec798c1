//! Staged vertex partitions: random colourings, the t-neighbour refinement
//! for graphs, and edge-type classification against a stage.

use rand::Rng as _;

use crate::equitable::equitable_coloring;
use crate::error::{param, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::seed;

/// Resamples of the random colouring before [`independence_refine`] gives up.
pub const REFINE_RETRIES: usize = 20;

/// Ordered classes `V_1, V_2, ...` covering `0..n`, largest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    classes: Vec<Vec<u32>>,
    class_of: Vec<usize>,
}

impl VertexPartition {
    /// Validates that `classes` partition `0..n`, drops empty classes and
    /// sorts by nonincreasing size (stable, so ties keep input order).
    pub fn new(n: usize, classes: Vec<Vec<u32>>) -> Result<Self> {
        let mut classes: Vec<Vec<u32>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        classes.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let mut class_of = vec![usize::MAX; n];
        for (i, c) in classes.iter_mut().enumerate() {
            c.sort_unstable();
            for &v in c.iter() {
                match class_of.get_mut(v as usize) {
                    Some(slot) if *slot == usize::MAX => *slot = i,
                    Some(_) => return Err(param(format!("vertex {v} is in two classes"))),
                    None => return Err(param(format!("vertex {v} out of range 0..{n}"))),
                }
            }
        }
        if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(param(format!("vertex {v} is in no class")));
        }
        Ok(VertexPartition { classes, class_of })
    }

    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &[u32] {
        &self.classes[i]
    }

    pub fn class_of(&self, v: u32) -> usize {
        self.class_of[v as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// `S_i`: the union of the classes before `i`, sorted.
    pub fn prefix(&self, i: usize) -> Vec<u32> {
        let mut s: Vec<u32> = self.classes[..i].iter().flatten().copied().collect();
        s.sort_unstable();
        s
    }

    pub fn prefix_len(&self, i: usize) -> usize {
        self.classes[..i].iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionParams {
    /// Classes have size about `n^eta`.
    pub eta: f64,
    /// Every vertex must have fewer than `t` neighbours in each class.
    pub t: usize,
    pub seed: u64,
}

impl PartitionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(param(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if self.t == 0 {
            return Err(param("t must be at least 1"));
        }
        Ok(())
    }
}

/// `max(1, round(n^(1 - eta)))`, capped at `n`.
pub fn class_count(n: usize, eta: f64) -> usize {
    if n == 0 {
        return 1;
    }
    ((n as f64).powf(1.0 - eta).round() as usize).clamp(1, n)
}

fn random_colors(n: usize, num_classes: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| rng.gen_range(0..num_classes)).collect()
}

fn group(colors: &[usize], num_classes: usize) -> Vec<Vec<u32>> {
    let mut classes = vec![Vec::new(); num_classes];
    for (v, &c) in colors.iter().enumerate() {
        classes[c].push(v as u32);
    }
    classes
}

/// Colours each vertex uniformly and independently with one of
/// `num_classes` colours. Empty colour classes are dropped.
pub fn random_color_partition(n: usize, num_classes: usize, seed: u64) -> Result<VertexPartition> {
    if num_classes == 0 || num_classes > n {
        return Err(param(format!(
            "need 1 <= num_classes <= n, got {num_classes} classes for n={n}"
        )));
    }
    VertexPartition::new(n, group(&random_colors(n, num_classes, seed), num_classes))
}

/// A partition of a graph's vertices into independent sets such that no
/// vertex has `t` or more neighbours in any one class.
///
/// A random colouring with `n^(1-eta)` colours is resampled until it
/// satisfies the neighbour bound, then each colour class is split by an
/// equitable colouring of the subgraph it induces.
pub fn independence_refine(g1: &Hypergraph, params: &PartitionParams) -> Result<VertexPartition> {
    params.validate()?;
    if g1.k() != 2 {
        return Err(param(format!("refinement needs a graph, got k={}", g1.k())));
    }
    let n = g1.n();
    if n == 0 {
        return VertexPartition::new(0, Vec::new());
    }
    let num_classes = class_count(n, params.eta);
    let adj: Vec<Vec<u32>> = (0..n as u32).map(|v| g1.neighbors(v)).collect();

    let mut worst = (0u32, 0usize, 0usize);
    for attempt in 0..=REFINE_RETRIES {
        let colors = random_colors(n, num_classes, seed::derive(params.seed, attempt as u64));
        match crowded_vertex(&adj, &colors, num_classes, params.t) {
            Some(v) => {
                log::debug!(
                    "refinement attempt {attempt}: vertex {} has {} neighbours in class {}",
                    v.0,
                    v.2,
                    v.1
                );
                worst = v;
            }
            None => {
                let mut classes = Vec::new();
                for class in group(&colors, num_classes) {
                    classes.extend(split_independent(g1, &class)?);
                }
                return VertexPartition::new(n, classes);
            }
        }
    }
    Err(Error::Refinement {
        attempts: REFINE_RETRIES + 1,
        vertex: worst.0,
        class: worst.1,
        count: worst.2,
    })
}

/// First vertex with at least `t` neighbours of one colour, with that colour and count.
fn crowded_vertex(adj: &[Vec<u32>], colors: &[usize], num_classes: usize, t: usize) -> Option<(u32, usize, usize)> {
    let mut count = vec![0usize; num_classes];
    for (v, ns) in adj.iter().enumerate() {
        for &u in ns {
            count[colors[u as usize]] += 1;
        }
        let hit = ns
            .iter()
            .map(|&u| colors[u as usize])
            .find(|&c| count[c] >= t)
            .map(|c| (v as u32, c, count[c]));
        for &u in ns {
            count[colors[u as usize]] = 0;
        }
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Splits `class` into `Δ + 1` equitable independent sets of the subgraph it induces.
fn split_independent(g: &Hypergraph, class: &[u32]) -> Result<Vec<Vec<u32>>> {
    let local = induced_subgraph(g, class);
    if local.is_empty() {
        return Ok(vec![class.to_vec()]);
    }
    let parts = equitable_coloring(&local, local.max_degree() + 1)?;
    Ok(parts
        .into_iter()
        .map(|p| p.into_iter().map(|i| class[i as usize]).collect())
        .collect())
}

/// The subgraph induced on `vertices` (sorted), relabelled to `0..len`.
pub fn induced_subgraph(g: &Hypergraph, vertices: &[u32]) -> Hypergraph {
    let mut local = vec![u32::MAX; g.n()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let mut edges = Vec::new();
    for &v in vertices {
        for e in g.incident(v) {
            // each edge once, from its smallest vertex
            if e[0] == v && e.iter().all(|&u| local[u as usize] != u32::MAX) {
                edges.push(e.iter().map(|&u| local[u as usize]).collect::<Vec<u32>>());
            }
        }
    }
    Hypergraph::new(vertices.len(), g.k(), edges).expect("relabelled edges are valid")
}

/// How an edge meets stage `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeType {
    /// `j` vertices in `V_i`, the rest in `S_i`.
    Type(usize),
    Irrelevant,
}

pub fn classify_edge_type(edge: &[u32], partition: &VertexPartition, stage: usize) -> Result<EdgeType> {
    if stage >= partition.num_classes() {
        return Err(param(format!(
            "stage {stage} out of range for {} classes",
            partition.num_classes()
        )));
    }
    let mut j = 0;
    for &v in edge {
        if v as usize >= partition.n() {
            return Err(param(format!("vertex {v} out of range 0..{}", partition.n())));
        }
        match partition.class_of(v).cmp(&stage) {
            std::cmp::Ordering::Equal => j += 1,
            std::cmp::Ordering::Greater => return Ok(EdgeType::Irrelevant),
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(if j == 0 {
        EdgeType::Irrelevant
    } else {
        EdgeType::Type(j)
    })
}
