//! Constructive equitable colouring of graphs with `Δ(G) < r + 1` colours.
//!
//! Edges are inserted one at a time into an equitable colouring of the empty
//! graph. When an insertion joins two vertices of the same class, one end
//! moves to a class where it has no neighbour, leaving one class short
//! (`V-`) and one class over (`V+`). The recolouring then restores balance by
//! moving "witnesses" along the auxiliary digraph on classes, where `U -> W`
//! whenever some vertex of `U` has no neighbour in `W`:
//!
//! * if `V+` reaches `V-`, shift one vertex along the path;
//! * otherwise, with `A` the classes reaching `V-` and `B` the rest, look in
//!   a leaf class `V` of the reachability tree for a vertex `z` movable
//!   inside `A` whose removal frees some `y ∈ B` (y's only neighbour in `V`
//!   is `z`). Move `z` out, shift toward `V-`, pull `y` into `V`, and
//!   continue on `G[B - y]`, whose classes again form a nearly equitable
//!   colouring with maximum degree below the class count;
//! * otherwise find `z ∈ V` with two non-adjacent solo neighbours `y1, y2`
//!   in `B`, `y1` in a class reachable from `V+`. Shift `V+` toward `y1`'s
//!   class, swap `y1` into `V`, send `z` to a class of `B` where it has no
//!   neighbours. `y2` can now move into `V`, so `A` strictly grows.
//!
//! Every move is checked to keep the colouring proper, and the final
//! colouring is verified before it is returned.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::seed;

const NONE: usize = usize::MAX;
const ATTEMPTS: u64 = 16;

/// Splits the vertices of a graph into `num_colors` independent sets whose
/// sizes differ by at most one. Requires `num_colors > Δ(g)`.
pub fn equitable_coloring(g: &Hypergraph, num_colors: usize) -> Result<Vec<Vec<u32>>> {
    if g.k() != 2 {
        return Err(Error::Parameter(format!(
            "equitable colouring needs a graph, got k={}",
            g.k()
        )));
    }
    if num_colors == 0 {
        return Err(Error::Parameter("need at least one colour".into()));
    }
    let delta = g.max_degree();
    if num_colors <= delta {
        return Err(Error::Unsupported(format!(
            "{num_colors} colours cannot be guaranteed for maximum degree {delta}"
        )));
    }

    let n = g.n();
    let padded = n.div_ceil(num_colors) * num_colors;
    let mut adj: Vec<Vec<u32>> = (0..n as u32).map(|v| g.neighbors(v)).collect();
    // A clique on the padding vertices forces them into distinct classes,
    // so removing them afterwards keeps the sizes within one of each other.
    for u in n..padded {
        adj.push((n..padded).filter(|&v| v != u).map(|v| v as u32).collect());
    }
    let mut edges: Vec<(u32, u32)> = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v as usize > u).map(move |&v| (u as u32, v)))
        .collect();

    let mut last = String::new();
    for attempt in 0..ATTEMPTS {
        if attempt > 0 {
            edges.shuffle(&mut seed::rng(seed::derive(attempt, 0xC0105)));
        }
        let mut rc = Recolorer::new(padded, num_colors);
        match edges.iter().try_for_each(|&(u, v)| rc.insert(u, v)) {
            Ok(()) => {
                let classes: Vec<Vec<u32>> = rc
                    .members
                    .into_iter()
                    .map(|mut c| {
                        c.retain(|&v| (v as usize) < n);
                        c.sort_unstable();
                        c
                    })
                    .collect();
                debug_assert!(is_equitable_coloring(g, &classes));
                return Ok(classes);
            }
            Err(Stuck(why)) => {
                log::debug!("equitable colouring attempt {attempt} stuck: {why}");
                last = why;
            }
        }
    }
    Err(Error::Coloring(last))
}

/// `classes` partition `0..n`, each is independent in `g`, and sizes differ
/// by at most one.
pub fn is_equitable_coloring(g: &Hypergraph, classes: &[Vec<u32>]) -> bool {
    let mut color = vec![NONE; g.n()];
    for (c, members) in classes.iter().enumerate() {
        for &v in members {
            match color.get_mut(v as usize) {
                Some(slot) if *slot == NONE => *slot = c,
                _ => return false,
            }
        }
    }
    if color.contains(&NONE) {
        return false;
    }
    let proper = g.edges().all(|e| color[e[0] as usize] != color[e[1] as usize]);
    let max = classes.iter().map(Vec::len).max().unwrap_or(0);
    let min = classes.iter().map(Vec::len).min().unwrap_or(0);
    proper && max - min <= 1
}

struct Stuck(String);

struct Recolorer {
    classes: usize,
    color: Vec<usize>,
    members: Vec<Vec<u32>>,
    pos: Vec<usize>,
    adj: Vec<Vec<u32>>,
    /// `nb[v * classes + c]`: neighbours of `v` currently in class `c`.
    nb: Vec<u32>,
}

impl Recolorer {
    fn new(n: usize, classes: usize) -> Self {
        let color: Vec<usize> = (0..n).map(|v| v % classes).collect();
        let mut members = vec![Vec::new(); classes];
        let mut pos = vec![0; n];
        for v in 0..n {
            pos[v] = members[color[v]].len();
            members[color[v]].push(v as u32);
        }
        Recolorer {
            classes,
            color,
            members,
            pos,
            adj: vec![Vec::new(); n],
            nb: vec![0; n * classes],
        }
    }

    fn count(&self, v: u32, c: usize) -> u32 {
        self.nb[v as usize * self.classes + c]
    }

    fn adjacent(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].contains(&v)
    }

    fn move_to(&mut self, v: u32, to: usize) {
        let from = self.color[v as usize];
        debug_assert_ne!(from, to);
        let p = self.pos[v as usize];
        self.members[from].swap_remove(p);
        if let Some(&moved) = self.members[from].get(p) {
            self.pos[moved as usize] = p;
        }
        self.pos[v as usize] = self.members[to].len();
        self.members[to].push(v);
        self.color[v as usize] = to;
        for i in 0..self.adj[v as usize].len() {
            let u = self.adj[v as usize][i] as usize;
            self.nb[u * self.classes + from] -= 1;
            self.nb[u * self.classes + to] += 1;
        }
    }

    fn insert(&mut self, u: u32, v: u32) -> std::result::Result<(), Stuck> {
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        let (cu, cv) = (self.color[u as usize], self.color[v as usize]);
        self.nb[u as usize * self.classes + cv] += 1;
        self.nb[v as usize * self.classes + cu] += 1;
        if cu != cv {
            return Ok(());
        }
        // u has at most classes-1 neighbours, one of them in its own class.
        let target = (0..self.classes)
            .find(|&c| c != cu && self.count(u, c) == 0)
            .ok_or_else(|| Stuck("no free class for a conflicting vertex".into()))?;
        self.move_to(u, target);
        self.rebalance(cu, target)
    }

    /// First vertex of class `from` with no neighbour in class `to`.
    fn witness(&self, from: usize, to: usize) -> Option<u32> {
        self.members[from].iter().copied().find(|&x| self.count(x, to) == 0)
    }

    /// Moves one witness along each arc of `path`.
    fn shift(&mut self, path: &[usize]) -> std::result::Result<(), Stuck> {
        for arc in path.windows(2) {
            let x = self
                .witness(arc[0], arc[1])
                .ok_or_else(|| Stuck(format!("lost witness for arc {} -> {}", arc[0], arc[1])))?;
            self.move_to(x, arc[1]);
        }
        Ok(())
    }

    fn rebalance(&mut self, vminus: usize, vplus: usize) -> std::result::Result<(), Stuck> {
        let (mut vminus, mut vplus) = (vminus, vplus);
        let mut active = vec![true; self.classes];
        let budget = 4 * self.classes * self.classes + 16;
        for _ in 0..budget {
            let acc = self.accessible(vminus, &active);
            if acc.contains[vplus] {
                let path = acc.path_from(vplus);
                return self.shift(&path);
            }
            let mut leaves: Vec<usize> = if acc.order.len() == 1 {
                vec![vminus]
            } else {
                acc.order
                    .iter()
                    .copied()
                    .filter(|&c| c != vminus && !acc.has_child[c])
                    .collect()
            };
            leaves.reverse();

            if acc.order.len() > 1 {
                if let Some((z, w, y)) = self.find_movable_solo(&leaves, &acc, &active) {
                    let v = self.color[z as usize];
                    self.move_to(z, w);
                    self.shift(&acc.path_from(w))?;
                    let x = self.color[y as usize];
                    if self.count(y, v) != 0 {
                        return Err(Stuck("solo neighbour blocked after shift".into()));
                    }
                    self.move_to(y, v);
                    for &c in &acc.order {
                        active[c] = false;
                    }
                    if x == vplus {
                        return Ok(());
                    }
                    vminus = x;
                    continue;
                }
            }

            let reach = self.reachable_from(vplus, &active, &acc.contains);
            match self.find_solo_pair(&leaves, &acc, &active, &reach) {
                Some((z, y1)) => {
                    let v = self.color[z as usize];
                    let path = reach.path_to(self.color[y1 as usize]);
                    self.shift(&path)?;
                    self.move_to(y1, v);
                    let dest = (0..self.classes)
                        .find(|&c| active[c] && !acc.contains[c] && self.count(z, c) == 0)
                        .ok_or_else(|| Stuck("no class in B can take the displaced vertex".into()))?;
                    self.move_to(z, dest);
                    vplus = dest;
                }
                None => return Err(Stuck("no solo structure in terminal classes".into())),
            }
        }
        Err(Stuck("recolouring budget exhausted".into()))
    }

    /// Classes that can reach `target`, with a BFS in-tree toward it.
    fn accessible(&self, target: usize, active: &[bool]) -> Access {
        let mut acc = Access {
            contains: vec![false; self.classes],
            parent: vec![NONE; self.classes],
            has_child: vec![false; self.classes],
            order: vec![target],
        };
        acc.contains[target] = true;
        let mut head = 0;
        while head < acc.order.len() {
            let w = acc.order[head];
            head += 1;
            for (u, &on) in active.iter().enumerate() {
                if on && !acc.contains[u] && self.witness(u, w).is_some() {
                    acc.contains[u] = true;
                    acc.parent[u] = w;
                    acc.has_child[w] = true;
                    acc.order.push(u);
                }
            }
        }
        acc
    }

    /// Classes outside `excluded` reachable from `source`, with BFS parents.
    fn reachable_from(&self, source: usize, active: &[bool], excluded: &[bool]) -> Reach {
        let mut parent = vec![NONE; self.classes];
        let mut seen = vec![false; self.classes];
        seen[source] = true;
        let mut queue = vec![source];
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for w in 0..self.classes {
                if active[w] && !excluded[w] && !seen[w] && self.witness(u, w).is_some() {
                    seen[w] = true;
                    parent[w] = u;
                    queue.push(w);
                }
            }
        }
        Reach { seen, parent }
    }

    /// Solo neighbours in `B` of `z`: vertices whose only neighbour in `z`'s class is `z`.
    fn solo_neighbors<'a>(&'a self, z: u32, acc: &'a Access, active: &'a [bool]) -> impl Iterator<Item = u32> + 'a {
        let v = self.color[z as usize];
        self.adj[z as usize].iter().copied().filter(move |&y| {
            let c = self.color[y as usize];
            active[c] && !acc.contains[c] && self.count(y, v) == 1
        })
    }

    fn find_movable_solo(&self, leaves: &[usize], acc: &Access, active: &[bool]) -> Option<(u32, usize, u32)> {
        for &v in leaves {
            for &z in &self.members[v] {
                let Some(w) = acc.order.iter().copied().find(|&w| w != v && self.count(z, w) == 0) else {
                    continue;
                };
                if let Some(y) = self.solo_neighbors(z, acc, active).min() {
                    return Some((z, w, y));
                }
            }
        }
        None
    }

    fn find_solo_pair(&self, leaves: &[usize], acc: &Access, active: &[bool], reach: &Reach) -> Option<(u32, u32)> {
        for &v in leaves {
            for &z in &self.members[v] {
                let mut solo: Vec<u32> = self.solo_neighbors(z, acc, active).collect();
                solo.sort_unstable();
                for &y1 in &solo {
                    if !reach.seen[self.color[y1 as usize]] {
                        continue;
                    }
                    if solo.iter().any(|&y2| y2 != y1 && !self.adjacent(y1, y2)) {
                        return Some((z, y1));
                    }
                }
            }
        }
        None
    }
}

struct Access {
    contains: Vec<bool>,
    parent: Vec<usize>,
    has_child: Vec<bool>,
    order: Vec<usize>,
}

impl Access {
    fn path_from(&self, mut c: usize) -> Vec<usize> {
        let mut path = vec![c];
        while self.parent[c] != NONE {
            c = self.parent[c];
            path.push(c);
        }
        path
    }
}

struct Reach {
    seen: Vec<bool>,
    parent: Vec<usize>,
}

impl Reach {
    fn path_to(&self, mut c: usize) -> Vec<usize> {
        let mut path = vec![c];
        while self.parent[c] != NONE {
            c = self.parent[c];
            path.push(c);
        }
        path.reverse();
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{generate_random, GenParams};

    fn cycle(n: u32) -> Hypergraph {
        Hypergraph::new(n as usize, 2, (0..n).map(|i| [i, (i + 1) % n])).unwrap()
    }

    fn sizes(classes: &[Vec<u32>]) -> Vec<usize> {
        let mut s: Vec<usize> = classes.iter().map(Vec::len).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    #[test]
    fn c5_three_colours() {
        let g = cycle(5);
        let classes = equitable_coloring(&g, 3).unwrap();
        assert!(is_equitable_coloring(&g, &classes));
        assert_eq!(sizes(&classes), vec![2, 2, 1]);
    }

    #[test]
    fn empty_graph_two_colours() {
        let g = Hypergraph::empty(5, 2).unwrap();
        let classes = equitable_coloring(&g, 2).unwrap();
        assert_eq!(sizes(&classes), vec![3, 2]);
    }

    #[test]
    fn too_few_colours_is_unsupported() {
        assert!(matches!(equitable_coloring(&cycle(5), 2), Err(Error::Unsupported(_))));
        assert!(equitable_coloring(&Hypergraph::new(3, 3, [[0, 1, 2]]).unwrap(), 3).is_err());
    }

    #[test]
    fn cliques_and_stars() {
        let k6 = Hypergraph::complete(6, 2).unwrap();
        assert!(is_equitable_coloring(&k6, &equitable_coloring(&k6, 6).unwrap()));
        let star = Hypergraph::new(9, 2, (1..9u32).map(|v| [0, v])).unwrap();
        let classes = equitable_coloring(&star, 9).unwrap();
        assert!(is_equitable_coloring(&star, &classes));
        // the extremal pair: disjoint cliques with exactly Δ+1 colours
        let (g1, _) = crate::hypergraph::unpackable_graph_pair(4, 3).unwrap();
        let c = equitable_coloring(&g1, g1.max_degree() + 1).unwrap();
        assert!(is_equitable_coloring(&g1, &c));
    }

    #[test]
    fn more_colours_than_vertices() {
        let g = cycle(4);
        let classes = equitable_coloring(&g, 7).unwrap();
        assert_eq!(classes.len(), 7);
        assert!(is_equitable_coloring(&g, &classes));
    }

    #[test]
    fn random_graphs_with_delta_plus_one() {
        for seed in 0..40 {
            let p = [0.05, 0.2, 0.5, 0.9][seed as usize % 4];
            let g = generate_random(&GenParams::new(40, 2, p, seed)).unwrap();
            let r = g.max_degree() + 1;
            let classes = equitable_coloring(&g, r).unwrap();
            assert!(is_equitable_coloring(&g, &classes), "seed {seed}");
        }
    }
}
