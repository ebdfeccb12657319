//! Regular trees and the collapse map `T₃ → T_k`.
//!
//! Each vertex of `T_k` is the image of a path of `k − 2` vertices of `T₃`
//! (so `k − 3` edges are collapsed); the remaining "thin" edges map
//! isometrically. A `T₃` path of `k − 2` vertices has `3(k−2) − 2(k−3) = k`
//! outgoing edges, which is why the quotient is `k`-regular.
//!
//! Blocks are chosen as follows: a block starts at the root or at any
//! vertex that is not its parent's first child, and continues through first
//! children until it has `k − 2` vertices. A first child whose parent ends a
//! block starts a new one. The choice only depends on the position in the
//! tree, so it is stable as the radius grows.

use crate::error::QiError;
use crate::graph::AdjacencyGraph;

use super::{FiniteMetricSample, MapSample};

/// Ball of radius `radius` in the `valence`-regular tree, numbered
/// breadth-first with children in order.
pub fn tree_ball(valence: usize, radius: usize) -> TreeBall {
    let mut parent = vec![usize::MAX];
    let mut depth = vec![0usize];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier = vec![0usize];
    for d in 0..radius {
        let mut next = Vec::new();
        for &v in &frontier {
            let count = if v == 0 { valence } else { valence - 1 };
            for _ in 0..count {
                let c = parent.len();
                parent.push(v);
                depth.push(d + 1);
                children.push(Vec::new());
                children[v].push(c);
                next.push(c);
            }
        }
        frontier = next;
    }
    let mut graph = AdjacencyGraph::new(parent.len());
    for (c, &p) in parent.iter().enumerate().skip(1) {
        graph.add_edge(p, c);
    }
    TreeBall {
        parent,
        depth,
        children,
        graph,
    }
}

#[derive(Clone, Debug)]
pub struct TreeBall {
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    pub graph: AdjacencyGraph,
}

impl TreeBall {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TreeQi {
    pub valence: usize,
    pub radius: usize,
    pub domain_tree: TreeBall,
    /// Block (= image vertex) of each domain vertex.
    pub block: Vec<usize>,
    /// Position of each vertex inside its block path.
    pub position: Vec<usize>,
    pub quotient: AdjacencyGraph,
    pub map: MapSample,
}

pub fn build_tree_qi(k: usize, radius: usize) -> Result<TreeQi, QiError> {
    if k < 4 || radius < 2 {
        return Err(QiError::InvalidMap(format!("tree map needs k ≥ 4 and R ≥ 2, got k = {k}, R = {radius}")));
    }
    let t = tree_ball(3, radius);
    let n = t.len();
    let mut block = vec![0usize; n];
    let mut position = vec![0usize; n];
    let mut blocks = 1;
    for v in 1..n {
        let p = t.parent[v];
        let first_child = t.children[p].first() == Some(&v);
        if first_child && position[p] + 1 < k - 2 {
            block[v] = block[p];
            position[v] = position[p] + 1;
        } else {
            block[v] = blocks;
            blocks += 1;
        }
    }
    let mut quotient = AdjacencyGraph::new(blocks);
    for v in 1..n {
        let (a, b) = (block[t.parent[v]], block[v]);
        if a != b {
            quotient.add_edge(a, b);
        }
    }
    let domain = FiniteMetricSample::from_graph(format!("tree/3/{radius}"), &t.graph)?;
    let range = FiniteMetricSample::from_graph(format!("treeqi-image/{k}/{radius}"), &quotient)?;
    let map = MapSample::new(domain, range, block.clone())?;
    Ok(TreeQi {
        valence: k,
        radius,
        domain_tree: t,
        block,
        position,
        quotient,
        map,
    })
}
