//! The stage loop shared by the graph and hypergraph packers, and the
//! type-2 collision repair.

use rand::seq::SliceRandom;

use super::{verify_packing, Failure, FailureReason, PackOutcome, PackerParams, PackingMap, StageRecord};
use crate::combinatorics::{binomial, colex_rank};
use crate::error::Result;
use crate::hypergraph::Hypergraph;
use crate::matching::{
    build_disjointness_graph, maximum_matching, min_degree, BipartiteDisjointnessGraph, HallViolator, SetSequence,
};
use crate::partition::VertexPartition;
use crate::seed;

const NONE: u32 = u32::MAX;

/// A type-2 edge `A ∪ {u, v}` of `G1` whose image `φ(A) ∪ {x, y}` is an
/// edge of `G2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type2Collision {
    pub edge: Vec<u32>,
    pub u: u32,
    pub v: u32,
    pub x: u32,
    pub y: u32,
    /// `φ(A)`, sorted.
    pub image_rest: Vec<u32>,
}

/// Everything the repair needs about the current stage.
pub struct StageState<'a> {
    pub g1: &'a Hypergraph,
    pub g2: &'a Hypergraph,
    /// The map so far; `u32::MAX` for vertices not yet placed.
    pub phi: &'a [u32],
    /// Which vertices of `G1` lie in the placed prefix `S_i`.
    pub in_prefix: &'a [bool],
    pub v_class: &'a [u32],
    pub w_class: &'a [u32],
    /// Disjointness graph with left index into `v_class`, right into `w_class`.
    pub graph: &'a BipartiteDisjointnessGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepairError {
    /// No pair of candidates could be formed, or every candidate pair was blocked.
    Exhausted,
    /// The chosen replacement map collides on another type-2 edge.
    NewCollision(Type2Collision),
}

/// Replaces `φ*` by a map `φ**` on the stage classes that sends `u` to some
/// `x_l` and `v` to some `y_l` with `φ(A) ∪ {x_l, y_l} ∉ G2`, and matches the
/// rest of the class through the disjointness graph.
///
/// Candidates `x_1, y_1, ..., x_D, y_D` are distinct vertices of `W_i`, the
/// `x_l` adjacent to `u` and the `y_l` to `v` in the disjointness graph, taken
/// in index order. Only the first usable pair is tried; the resulting map is
/// rechecked for type-2 collisions before it is returned. The result lists
/// the image of each vertex of `v_class`, in order.
pub fn repair_type2_collision(
    state: &StageState<'_>,
    collision: &Type2Collision,
    budget: usize,
) -> std::result::Result<Vec<u32>, RepairError> {
    let pos = |v: u32| state.v_class.iter().position(|&x| x == v);
    let (Some(iu), Some(iv)) = (pos(collision.u), pos(collision.v)) else {
        return Err(RepairError::Exhausted);
    };
    let h = state.graph;
    let mut taken = vec![false; state.w_class.len()];
    let mut xs = h.left_adj(iu).iter().copied();
    let mut ys = h.left_adj(iv).iter().copied();
    let mut buf = Vec::with_capacity(state.g2.k());
    for _ in 0..budget {
        let Some(xl) = xs.by_ref().find(|&j| !taken[j as usize]) else {
            break;
        };
        taken[xl as usize] = true;
        let Some(yl) = ys.by_ref().find(|&j| !taken[j as usize]) else {
            break;
        };
        taken[yl as usize] = true;

        buf.clear();
        buf.extend_from_slice(&collision.image_rest);
        buf.push(state.w_class[xl as usize]);
        buf.push(state.w_class[yl as usize]);
        if state.g2.contains_unsorted(&mut buf) {
            continue;
        }
        let Some(mut assignment) = match_without(h, iu, iv, xl, yl) else {
            continue;
        };
        assignment[iu] = xl;
        assignment[iv] = yl;
        let images: Vec<u32> = assignment.iter().map(|&j| state.w_class[j as usize]).collect();
        let mut phi = state.phi.to_vec();
        for (&v, &w) in state.v_class.iter().zip(&images) {
            phi[v as usize] = w;
        }
        return match type2_collisions(state.g1, state.g2, &phi, state.in_prefix, state.v_class)
            .into_iter()
            .next()
        {
            None => Ok(images),
            Some(c) => Err(RepairError::NewCollision(c)),
        };
    }
    Err(RepairError::Exhausted)
}

/// Perfect matching of the disjointness graph with left `iu, iv` and right
/// `xl, yl` removed, as right indices per left index (the removed ones unset).
fn match_without(h: &BipartiteDisjointnessGraph, iu: usize, iv: usize, xl: u32, yl: u32) -> Option<Vec<u32>> {
    let m = h.left_size();
    let right_index: Vec<u32> = {
        let mut next = 0;
        (0..h.right_size() as u32)
            .map(|j| {
                if j == xl || j == yl {
                    NONE
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect()
    };
    let right_back: Vec<u32> = (0..h.right_size() as u32).filter(|&j| j != xl && j != yl).collect();
    let lefts: Vec<usize> = (0..m).filter(|&i| i != iu && i != iv).collect();
    let adj = lefts
        .iter()
        .map(|&i| {
            h.left_adj(i)
                .iter()
                .map(|&j| right_index[j as usize])
                .filter(|&j| j != NONE)
                .collect()
        })
        .collect();
    let sub = BipartiteDisjointnessGraph::from_adjacency(right_back.len(), adj).ok()?;
    let r = maximum_matching(&sub);
    if !r.is_perfect() {
        return None;
    }
    let mut out = vec![NONE; m];
    for (li, j) in lefts.iter().zip(r.matching) {
        out[*li] = right_back[j? as usize];
    }
    Some(out)
}

/// Type-2 edges for the stage (two vertices in `v_class`, the rest in the
/// prefix) whose image under `phi` is an edge of `G2`.
fn type2_collisions(
    g1: &Hypergraph,
    g2: &Hypergraph,
    phi: &[u32],
    in_prefix: &[bool],
    v_class: &[u32],
) -> Vec<Type2Collision> {
    let mut in_class = vec![false; g1.n()];
    for &v in v_class {
        in_class[v as usize] = true;
    }
    let mut out = Vec::new();
    let mut image = Vec::with_capacity(g1.k());
    for &v in v_class {
        for e in g1.incident(v) {
            let mut others = e.iter().filter(|&&u| u != v && in_class[u as usize]);
            let (Some(&u), None) = (others.next(), others.next()) else {
                continue;
            };
            if u < v || !e.iter().all(|&x| in_class[x as usize] || in_prefix[x as usize]) {
                continue;
            }
            image.clear();
            image.extend(e.iter().map(|&x| phi[x as usize]));
            if g2.contains_unsorted(&mut image) {
                let mut rest: Vec<u32> = e
                    .iter()
                    .filter(|&&x| x != u && x != v)
                    .map(|&x| phi[x as usize])
                    .collect();
                rest.sort_unstable();
                out.push(Type2Collision {
                    edge: e.to_vec(),
                    u: v,
                    v: u,
                    x: phi[v as usize],
                    y: phi[u as usize],
                    image_rest: rest,
                });
            }
        }
    }
    out
}

struct Engine<'a> {
    g1: &'a Hypergraph,
    g2: &'a Hypergraph,
    partition: &'a VertexPartition,
    params: &'a PackerParams,
    delta: f64,
    phi: Vec<u32>,
    in_prefix: Vec<bool>,
    w_placed: Vec<bool>,
    /// A random order of the vertices of `G2`; `W_i` is the next slice of it.
    w_pool: Vec<u32>,
    rng: seed::Rng,
    log: Vec<StageRecord>,
}

/// Runs the stages over `partition` and verifies the result.
pub(super) fn run(
    g1: &Hypergraph,
    g2: &Hypergraph,
    partition: &VertexPartition,
    params: &PackerParams,
    seed: u64,
) -> Result<PackOutcome> {
    let n = g1.n();
    // The W-side order is fixed from the seed alone, before G2 is read.
    let mut w_pool: Vec<u32> = (0..n as u32).collect();
    w_pool.shuffle(&mut seed::rng(seed::derive(seed, 2)));

    let total = binomial(n as u64, g2.k() as u64).unwrap_or(u64::MAX) as f64;
    let density = if total > 0.0 {
        g2.edge_count() as f64 / total
    } else {
        0.0
    };
    let mut engine = Engine {
        g1,
        g2,
        partition,
        params,
        delta: (1.0 - density).max(0.1),
        phi: vec![NONE; n],
        in_prefix: vec![false; n],
        w_placed: vec![false; n],
        w_pool,
        rng: seed::rng(seed::derive(seed, 3)),
        log: Vec::new(),
    };
    if let Err(f) = engine.first_stage() {
        return Ok(PackOutcome::Failed(f));
    }
    for i in 1..partition.num_classes() {
        if let Err(f) = engine.stage(i) {
            return Ok(PackOutcome::Failed(f));
        }
    }
    let residual = verify_packing(g1, g2, &engine.phi)?;
    if !residual.is_empty() {
        return Ok(PackOutcome::Failed(Failure {
            stage: partition.num_classes(),
            reason: FailureReason::ResidualCollision {
                collisions: residual.len(),
            },
        }));
    }
    Ok(PackOutcome::Packed(PackingMap {
        forward: engine.phi,
        stage_log: engine.log,
    }))
}

impl Engine<'_> {
    fn commit(&mut self, v_class: &[u32], images: &[u32]) {
        for (&v, &w) in v_class.iter().zip(images) {
            self.phi[v as usize] = w;
            self.in_prefix[v as usize] = true;
            self.w_placed[w as usize] = true;
        }
    }

    /// An arbitrary bijection on the first classes, redrawn while any edge
    /// inside the class collides.
    fn first_stage(&mut self) -> std::result::Result<(), Failure> {
        let v_class = self.partition.class(0).to_vec();
        let m = v_class.len();
        let mut last = 0;
        for attempt in 0..=self.params.max_retries {
            if attempt > 0 {
                self.w_pool.shuffle(&mut self.rng);
            }
            let images = self.w_pool[..m].to_vec();
            let mut phi = self.phi.clone();
            for (&v, &w) in v_class.iter().zip(&images) {
                phi[v as usize] = w;
            }
            let collisions = self.inside_collisions(&v_class, &phi);
            if collisions == 0 {
                self.commit(&v_class, &images);
                self.log.push(StageRecord {
                    stage: 0,
                    class_size: m,
                    prefix_size: 0,
                    attempts: attempt + 1,
                    min_degree: 0,
                    type2_collisions: 0,
                    repaired: false,
                });
                return Ok(());
            }
            last = collisions;
        }
        Err(Failure {
            stage: 0,
            reason: FailureReason::ResidualCollision { collisions: last },
        })
    }

    /// Edges of `G1` inside one class that `phi` maps onto edges of `G2`.
    fn inside_collisions(&self, class: &[u32], phi: &[u32]) -> usize {
        let mut count = 0;
        let mut image = Vec::with_capacity(self.g1.k());
        for &v in class {
            for e in self.g1.incident(v) {
                if e[0] != v
                    || !e
                        .iter()
                        .all(|&u| self.partition.class_of(u) == self.partition.class_of(v))
                {
                    continue;
                }
                image.clear();
                image.extend(e.iter().map(|&u| phi[u as usize]));
                if self.g2.contains_unsorted(&mut image) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Type-1 neighbourhoods of `v_class` in `G1`, carried into `G2`'s
    /// coordinates by the current map and encoded by colex rank.
    fn left_sets(&self, v_class: &[u32]) -> Vec<Vec<u64>> {
        let mut buf = Vec::with_capacity(self.g1.k());
        v_class
            .iter()
            .map(|&v| {
                let mut set = Vec::new();
                for e in self.g1.incident(v) {
                    buf.clear();
                    let type1 = e.iter().filter(|&&u| u != v).all(|&u| {
                        buf.push(self.phi[u as usize]);
                        self.in_prefix[u as usize]
                    });
                    if type1 {
                        buf.sort_unstable();
                        set.push(colex_rank(&buf));
                    }
                }
                set
            })
            .collect()
    }

    /// Type-1 neighbourhoods of `w_class` in `G2` over the placed vertices.
    fn right_sets(&self, w_class: &[u32]) -> Vec<Vec<u64>> {
        let mut buf = Vec::with_capacity(self.g2.k());
        w_class
            .iter()
            .map(|&w| {
                let mut set = Vec::new();
                for e in self.g2.incident(w) {
                    buf.clear();
                    let type1 = e.iter().filter(|&&x| x != w).all(|&x| {
                        buf.push(x);
                        self.w_placed[x as usize]
                    });
                    if type1 {
                        set.push(colex_rank(&buf));
                    }
                }
                set
            })
            .collect()
    }

    fn repair_budget(&self, prefix: usize) -> usize {
        self.params.repair_budget.unwrap_or_else(|| {
            let ground = crate::combinatorics::ln_binomial(prefix as u64, self.g1.k() as u64 - 1);
            ((6.0 * ground.max(0.0) / self.delta).ceil() as usize).max(1)
        })
    }

    fn stage(&mut self, i: usize) -> std::result::Result<(), Failure> {
        let v_class = self.partition.class(i).to_vec();
        let m = v_class.len();
        let start = self.partition.prefix_len(i);
        let ground = binomial(self.g1.n() as u64, self.g1.k() as u64 - 1).unwrap_or(u64::MAX);
        let left = SetSequence::new(ground, self.left_sets(&v_class)).expect("ranks are below the ground size");
        let mut violator: Option<HallViolator> = None;
        let mut repair_failed = false;
        let mut too_many = 0;

        for attempt in 0..=self.params.max_retries {
            if attempt > 0 {
                self.w_pool[start..].shuffle(&mut self.rng);
            }
            let w_class = self.w_pool[start..start + m].to_vec();
            let right = SetSequence::new(ground, self.right_sets(&w_class)).expect("ranks are below the ground size");
            let h = build_disjointness_graph(&left, &right).expect("sequences have equal shape");
            let r = maximum_matching(&h);
            if let Some(v) = r.violator {
                violator = Some(v);
                continue;
            }
            let mut images: Vec<u32> = r
                .matching
                .iter()
                .map(|j| w_class[j.expect("perfect") as usize])
                .collect();
            let mut phi = self.phi.clone();
            for (&v, &w) in v_class.iter().zip(&images) {
                phi[v as usize] = w;
            }
            let collisions = type2_collisions(self.g1, self.g2, &phi, &self.in_prefix, &v_class);
            let mut repaired = false;
            match collisions.len() {
                0 => {}
                1 => {
                    let state = StageState {
                        g1: self.g1,
                        g2: self.g2,
                        phi: &self.phi,
                        in_prefix: &self.in_prefix,
                        v_class: &v_class,
                        w_class: &w_class,
                        graph: &h,
                    };
                    match repair_type2_collision(&state, &collisions[0], self.repair_budget(start)) {
                        Ok(fixed) => {
                            images = fixed;
                            repaired = true;
                        }
                        Err(e) => {
                            log::debug!("stage {i} attempt {attempt}: repair failed: {e:?}");
                            repair_failed = true;
                            continue;
                        }
                    }
                }
                c => {
                    too_many = c;
                    continue;
                }
            }
            self.commit(&v_class, &images);
            self.log.push(StageRecord {
                stage: i,
                class_size: m,
                prefix_size: start,
                attempts: attempt + 1,
                min_degree: min_degree(&h),
                type2_collisions: collisions.len(),
                repaired,
            });
            return Ok(());
        }

        let reason = if repair_failed {
            FailureReason::RepairExhausted
        } else if too_many > 0 {
            FailureReason::ResidualCollision { collisions: too_many }
        } else {
            FailureReason::NoPerfectMatching(violator.expect("every attempt lacked a perfect matching"))
        };
        Err(Failure { stage: i, reason })
    }
}
