//! Breadth-first search over finite graphs with optional clique hyperedges.
//!
//! A clique stands for "all members pairwise adjacent" without storing the
//! quadratic edge list; coned-off balls use one clique per coset.

use std::collections::VecDeque;

pub const INF: u32 = u32::MAX;

pub trait Graph: Sync {
    fn vertex_count(&self) -> usize;
    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize));
    /// Ids of the cliques containing `v`.
    fn cliques_of(&self, _v: usize) -> &[u32] {
        &[]
    }
    fn clique_members(&self, _c: usize) -> &[u32] {
        &[]
    }
    fn clique_count(&self) -> usize {
        0
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_neighbor(v, &mut |w| out.push(w));
        for &c in self.cliques_of(v) {
            out.extend(self.clique_members(c as usize).iter().map(|&w| w as usize).filter(|&w| w != v));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        let mut found = false;
        self.for_each_neighbor(u, &mut |w| found |= w == v);
        found
            || self
                .cliques_of(u)
                .iter()
                .any(|c| u != v && self.cliques_of(v).contains(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bfs {
    pub dist: Vec<u32>,
    /// First discoverer; `INF` for sources and unreached vertices.
    pub parent: Vec<u32>,
}

impl Bfs {
    /// Vertex path from a source to `v`, or `None` if unreached.
    pub fn path_to(&self, v: usize) -> Option<Vec<usize>> {
        if self.dist[v] == INF {
            return None;
        }
        let mut path = vec![v];
        let mut x = v;
        while self.parent[x] != INF {
            x = self.parent[x] as usize;
            path.push(x);
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, Default)]
pub struct BfsLimits<'a> {
    /// Vertices that may not be entered.
    pub blocked: Option<&'a [bool]>,
    /// Stop once every listed vertex has been settled.
    pub targets: Option<&'a [usize]>,
    pub max_depth: Option<u32>,
}

pub fn bfs<G: Graph + ?Sized>(g: &G, sources: &[usize], limits: BfsLimits<'_>) -> Bfs {
    let n = g.vertex_count();
    let mut dist = vec![INF; n];
    let mut parent = vec![INF; n];
    let mut clique_done = vec![false; g.clique_count()];
    let blocked = |v: usize| limits.blocked.is_some_and(|b| b[v]);
    let target_mask: Option<Vec<bool>> = limits.targets.map(|t| {
        let mut m = vec![false; n];
        t.iter().for_each(|&v| m[v] = true);
        m
    });
    let mut remaining = target_mask.as_ref().map(|m| m.iter().filter(|&&b| b).count());
    let is_target = |v: usize| target_mask.as_ref().is_some_and(|m| m[v]);
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == INF && !blocked(s) {
            dist[s] = 0;
            queue.push_back(s);
            if is_target(s) {
                remaining = remaining.map(|r| r - 1);
            }
        }
    }
    while let Some(u) = queue.pop_front() {
        if remaining == Some(0) {
            break;
        }
        let d = dist[u];
        if limits.max_depth.is_some_and(|m| d >= m) {
            continue;
        }
        let mut visit = |w: usize, dist: &mut Vec<u32>, parent: &mut Vec<u32>, queue: &mut VecDeque<usize>| {
            if dist[w] == INF && !blocked(w) {
                dist[w] = d + 1;
                parent[w] = u as u32;
                queue.push_back(w);
                if is_target(w) {
                    remaining = remaining.map(|r| r - 1);
                }
            }
        };
        g.for_each_neighbor(u, &mut |w| visit(w, &mut dist, &mut parent, &mut queue));
        for &c in g.cliques_of(u) {
            if !clique_done[c as usize] {
                clique_done[c as usize] = true;
                for &w in g.clique_members(c as usize) {
                    visit(w as usize, &mut dist, &mut parent, &mut queue);
                }
            }
        }
    }
    Bfs { dist, parent }
}

/// Distance between two vertices, `None` when disconnected.
pub fn distance<G: Graph + ?Sized>(g: &G, u: usize, v: usize, blocked: Option<&[bool]>) -> Option<u32> {
    let r = bfs(
        g,
        &[u],
        BfsLimits {
            blocked,
            targets: Some(&[v]),
            max_depth: None,
        },
    );
    (r.dist[v] != INF).then_some(r.dist[v])
}

/// A plain adjacency-list graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdjacencyGraph {
    pub adj: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    pub fn new(n: usize) -> Self {
        AdjacencyGraph { adj: vec![Vec::new(); n] }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }
}

impl Graph for AdjacencyGraph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.adj[v].iter().for_each(|&w| f(w));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cliqued {
        base: AdjacencyGraph,
        of: Vec<Vec<u32>>,
        members: Vec<Vec<u32>>,
    }

    impl Graph for Cliqued {
        fn vertex_count(&self) -> usize {
            self.base.vertex_count()
        }
        fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
            self.base.for_each_neighbor(v, f)
        }
        fn cliques_of(&self, v: usize) -> &[u32] {
            &self.of[v]
        }
        fn clique_members(&self, c: usize) -> &[u32] {
            &self.members[c]
        }
        fn clique_count(&self) -> usize {
            self.members.len()
        }
    }

    fn path(n: usize) -> AdjacencyGraph {
        let mut g = AdjacencyGraph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    #[test]
    fn path_distances_and_blocking() {
        let g = path(6);
        let r = bfs(&g, &[0], BfsLimits::default());
        assert_eq!(r.dist, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(r.path_to(3).unwrap(), vec![0, 1, 2, 3]);
        let blocked = [false, false, true, false, false, false];
        assert_eq!(distance(&g, 0, 4, Some(&blocked)), None);
    }

    #[test]
    fn clique_shortcuts() {
        let mut of = vec![Vec::new(); 6];
        for v in [1, 3, 5] {
            of[v].push(0);
        }
        let g = Cliqued {
            base: path(6),
            of,
            members: vec![vec![1, 3, 5]],
        };
        assert_eq!(bfs(&g, &[0], BfsLimits::default()).dist, vec![0, 1, 2, 2, 3, 2]);
        assert!(g.adjacent(1, 5));
        assert_eq!(g.neighbors(3), vec![1, 2, 4, 5]);
    }
}
