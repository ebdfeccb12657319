//! Finite tree-graded graphs: axiom checks, projections onto pieces,
//! transversal trees, plus loop division and Følner search on Cayley balls.

mod chord;
mod folner;

pub use chord::{chord_division, ChordDivision};
pub use folner::{folner_component, folner_search, kf_size, FolnerComponent, FolnerOptions, FolnerOutcome, FolnerSet};

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ParseError, TreeGradedError};
use crate::graph::{bfs, AdjacencyGraph, BfsLimits, Graph, INF};

pub const TREEGRADED_SCHEMA: &str = "treegraded/1";
pub const CYCLE_CAP: usize = 10_000;
const DFS_STEP_CAP: usize = 2_000_000;

#[derive(Debug)]
pub struct TreeGradedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    graph: AdjacencyGraph,
    piece_names: Vec<String>,
    /// Sorted vertex lists.
    pieces: Vec<Vec<usize>>,
    /// Pieces containing each vertex.
    pieces_of: Vec<Vec<usize>>,
    report: OnceLock<AxiomReport>,
}

impl Clone for TreeGradedGraph {
    fn clone(&self) -> Self {
        TreeGradedGraph {
            names: self.names.clone(),
            index: self.index.clone(),
            graph: self.graph.clone(),
            piece_names: self.piece_names.clone(),
            pieces: self.pieces.clone(),
            pieces_of: self.pieces_of.clone(),
            report: OnceLock::new(),
        }
    }
}

fn induced_connected(g: &AdjacencyGraph, members: &[usize]) -> bool {
    let mut outside = vec![true; g.vertex_count()];
    members.iter().for_each(|&v| outside[v] = false);
    let r = bfs(
        g,
        &members[..1],
        BfsLimits {
            blocked: Some(&outside),
            ..BfsLimits::default()
        },
    );
    members.iter().all(|&v| r.dist[v] != INF)
}

impl TreeGradedGraph {
    /// Builds the graph; every piece must induce a connected subgraph.
    pub fn new(names: Vec<String>, edges: &[(usize, usize)], pieces: Vec<(String, Vec<usize>)>) -> Result<Self, ParseError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ParseError::DuplicateVertex(n.clone()));
            }
        }
        let mut graph = AdjacencyGraph::new(names.len());
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in edges {
            if u >= names.len() || v >= names.len() {
                return Err(ParseError::UnknownVertex(u.max(v).to_string()));
            }
            if u == v {
                return Err(ParseError::SelfLoop(names[u].clone()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ParseError::DuplicateEdge(format!("{} {}", names[u], names[v])));
            }
            graph.add_edge(u, v);
        }
        let mut piece_names = Vec::new();
        let mut piece_sets = Vec::new();
        let mut pieces_of = vec![Vec::new(); names.len()];
        for (name, mut members) in pieces {
            if piece_names.contains(&name) {
                return Err(ParseError::Duplicate { line: 0, key: format!("piece {name}") });
            }
            members.sort_unstable();
            members.dedup();
            if members.is_empty() || members.iter().any(|&v| v >= names.len()) || !induced_connected(&graph, &members) {
                return Err(ParseError::BadPiece(name));
            }
            for &v in &members {
                pieces_of[v].push(piece_sets.len());
            }
            piece_names.push(name);
            piece_sets.push(members);
        }
        Ok(TreeGradedGraph {
            names,
            index,
            graph,
            piece_names,
            pieces: piece_sets,
            pieces_of,
            report: OnceLock::new(),
        })
    }

    /// Parses `vertex: id`, `edge: u v` and `piece: id = v1 v2 ...` lines.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut names = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut pieces = Vec::new();
        let lookup = |index: &HashMap<String, usize>, v: &str| index.get(v).copied().ok_or_else(|| ParseError::UnknownVertex(v.to_string()));
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(ParseError::BadLine { line: n + 1, text: line.to_string() });
            };
            let value = value.trim();
            match key.trim() {
                "vertex" => {
                    if value.is_empty() {
                        return Err(ParseError::BadLine { line: n + 1, text: line.to_string() });
                    }
                    for v in value.split_whitespace() {
                        if index.insert(v.to_string(), names.len()).is_some() {
                            return Err(ParseError::DuplicateVertex(v.to_string()));
                        }
                        names.push(v.to_string());
                    }
                }
                "edge" => {
                    let ends: Vec<&str> = value.split_whitespace().collect();
                    if ends.len() != 2 {
                        return Err(ParseError::BadLine { line: n + 1, text: line.to_string() });
                    }
                    edges.push((lookup(&index, ends[0])?, lookup(&index, ends[1])?));
                }
                "piece" => {
                    let Some((id, members)) = value.split_once('=') else {
                        return Err(ParseError::BadLine { line: n + 1, text: line.to_string() });
                    };
                    let id = id.trim();
                    if id.is_empty() || id.contains(char::is_whitespace) {
                        return Err(ParseError::BadLine { line: n + 1, text: line.to_string() });
                    }
                    let members = members.split_whitespace().map(|v| lookup(&index, v)).collect::<Result<Vec<_>, _>>()?;
                    pieces.push((id.to_string(), members));
                }
                other => return Err(ParseError::UnknownKey { line: n + 1, key: other.to_string() }),
            }
        }
        Self::new(names, &edges, pieces)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, TreeGradedError> {
        self.index.get(name).copied().ok_or_else(|| TreeGradedError::UnknownVertex(name.to_string()))
    }

    pub fn piece_index(&self, name: &str) -> Result<usize, TreeGradedError> {
        self.piece_names.iter().position(|p| p == name).ok_or_else(|| TreeGradedError::UnknownPiece(name.to_string()))
    }

    pub fn piece_name(&self, i: usize) -> &str {
        &self.piece_names[i]
    }

    pub fn pieces(&self) -> &[Vec<usize>] {
        &self.pieces
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        &self.graph
    }

    fn names_of(&self, vs: &[usize]) -> Vec<String> {
        vs.iter().map(|&v| self.names[v].clone()).collect()
    }

    /// Some piece contains every listed vertex.
    pub fn in_one_piece(&self, vs: &[usize]) -> bool {
        vs.first().is_none_or(|&v0| self.pieces_of[v0].iter().any(|&p| vs.iter().all(|v| self.pieces[p].binary_search(v).is_ok())))
    }

    /// An edge not inside any piece.
    pub fn is_transversal_edge(&self, u: usize, v: usize) -> bool {
        !self.pieces_of[u].iter().any(|p| self.pieces_of[v].contains(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T1Check {
    pub pass: bool,
    /// Two pieces and two of their common vertices.
    pub witness: Option<([String; 2], [String; 2])>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T2Check {
    pub pass: bool,
    /// The cycle enumeration hit its cap; the verdict then rests on the
    /// fundamental-cycle basis.
    pub partial: bool,
    /// A simple loop not inside one piece, as a closed vertex list.
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicPieces {
    pub pass: bool,
    /// A piece and two of its vertices closer in the graph than in the piece.
    pub witness: Option<(String, [String; 2])>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub schema: &'static str,
    pub pass: bool,
    pub t1: T1Check,
    pub t2pp: T2Check,
    pub pieces_geodesic: GeodesicPieces,
    pub cut_points: Vec<String>,
    /// Vertices lying in two distinct pieces.
    pub piece_intersections: Vec<String>,
    /// Connected components of the transversal edges with at least two vertices.
    pub transversal_trees: Vec<Vec<String>>,
    /// Intersection points and non-leaf transversal vertices are cut-points.
    pub cut_point_duality: bool,
}

impl AxiomReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Blocks {
    blocks: Vec<Vec<usize>>,
    cut: Vec<bool>,
}

/// Biconnected blocks and articulation points, iteratively.
fn biconnected(g: &AdjacencyGraph) -> Blocks {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut cut = vec![false; n];
    let mut blocks = Vec::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        let mut edges: Vec<(usize, usize)> = Vec::new();
        while let Some(frame) = stack.last_mut() {
            let (v, parent, i) = *frame;
            if i < g.adj[v].len() {
                frame.2 += 1;
                let w = g.adj[v][i];
                if disc[w] == usize::MAX {
                    edges.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edges.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
                continue;
            }
            stack.pop();
            let Some(&(u, _, _)) = stack.last() else { break };
            low[u] = low[u].min(low[v]);
            if low[v] >= disc[u] {
                if u == root {
                    root_children += 1;
                } else {
                    cut[u] = true;
                }
                let mut block = Vec::new();
                while let Some(e) = edges.pop() {
                    block.push(e.0);
                    block.push(e.1);
                    if e == (u, v) {
                        break;
                    }
                }
                block.sort_unstable();
                block.dedup();
                blocks.push(block);
            }
        }
        if root_children >= 2 {
            cut[root] = true;
        }
    }
    Blocks { blocks, cut }
}

/// Simple cycles of the subgraph induced on `block`, each listed once as a
/// closed vertex list. Stops at `cap` cycles or the step budget; the flag
/// reports whether the enumeration was cut short.
fn simple_cycles(g: &AdjacencyGraph, block: &[usize], cap: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut inside = vec![false; g.vertex_count()];
    block.iter().for_each(|&v| inside[v] = true);
    let mut on_path = vec![false; g.vertex_count()];
    let mut found = 0;
    let mut steps = 0;
    for &s in block {
        let mut path = vec![s];
        let mut iters = vec![0usize];
        on_path[s] = true;
        while let Some(&v) = path.last() {
            steps += 1;
            if steps > DFS_STEP_CAP || found >= cap {
                path.iter().for_each(|&x| on_path[x] = false);
                return true;
            }
            let i = *iters.last().unwrap();
            if i >= g.adj[v].len() {
                on_path[v] = false;
                path.pop();
                iters.pop();
                continue;
            }
            *iters.last_mut().unwrap() += 1;
            let w = g.adj[v][i];
            if !inside[w] || w < s {
                continue;
            }
            if w == s && path.len() >= 3 && path[1] < v {
                found += 1;
                let mut cycle = path.clone();
                cycle.push(s);
                if !visit(&cycle) {
                    path.iter().for_each(|&x| on_path[x] = false);
                    return false;
                }
            } else if !on_path[w] && w != s {
                on_path[w] = true;
                path.push(w);
                iters.push(0);
            }
        }
    }
    false
}

/// Fundamental cycles of a spanning tree of the block.
fn fundamental_cycles(g: &AdjacencyGraph, block: &[usize]) -> Vec<Vec<usize>> {
    let mut outside = vec![true; g.vertex_count()];
    block.iter().for_each(|&v| outside[v] = false);
    let t = bfs(
        g,
        &block[..1],
        BfsLimits {
            blocked: Some(&outside),
            ..BfsLimits::default()
        },
    );
    let mut out = Vec::new();
    for &u in block {
        for &v in &g.adj[u] {
            if outside[v] || u >= v || t.parent[u] == v as u32 || t.parent[v] == u as u32 {
                continue;
            }
            let (pu, pv) = (t.path_to(u).unwrap(), t.path_to(v).unwrap());
            let common = pu.iter().zip(&pv).take_while(|(a, b)| a == b).count();
            let mut cycle: Vec<usize> = pu[common - 1..].to_vec();
            cycle.extend(pv[common..].iter().rev());
            cycle.push(pu[common - 1]);
            out.push(cycle);
        }
    }
    out
}

impl TreeGradedGraph {
    /// Checks (T₁), (T₂''), geodesic pieces and the cut-point properties.
    /// The result is cached.
    pub fn verify_axioms(&self) -> &AxiomReport {
        self.report.get_or_init(|| self.compute_report())
    }

    fn compute_report(&self) -> AxiomReport {
        let g = &self.graph;
        let k = self.pieces.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        let t1_witness = pairs.par_iter().find_first(|&&(i, j)| common_count(&self.pieces[i], &self.pieces[j]) >= 2).map(|&(i, j)| {
            let common: Vec<usize> = self.pieces[i].iter().copied().filter(|v| self.pieces[j].binary_search(v).is_ok()).take(2).collect();
            ([self.piece_names[i].clone(), self.piece_names[j].clone()], [self.names[common[0]].clone(), self.names[common[1]].clone()])
        });
        let Blocks { blocks, cut } = biconnected(g);
        let mut partial = false;
        let mut t2_witness = None;
        for block in blocks.iter().filter(|b| b.len() >= 3) {
            if self.in_one_piece(block) {
                continue;
            }
            let mut witness = None;
            let cut_short = simple_cycles(g, block, CYCLE_CAP, |c| {
                if self.in_one_piece(&c[..c.len() - 1]) {
                    true
                } else {
                    witness = Some(c.to_vec());
                    false
                }
            });
            if witness.is_none() && cut_short {
                partial = true;
                witness = fundamental_cycles(g, block).into_iter().find(|c| !self.in_one_piece(&c[..c.len() - 1]));
            }
            if let Some(w) = witness {
                t2_witness = Some(self.names_of(&w));
                break;
            }
        }
        let geodesic_witness = (0..k).into_par_iter().find_map_first(|i| self.non_geodesic_pair(i));
        let piece_intersections: Vec<usize> = (0..self.names.len()).filter(|&v| self.pieces_of[v].len() >= 2).collect();
        let trees = self.transversal_components();
        let duality = piece_intersections.iter().all(|&v| cut[v])
            && trees.iter().filter(|t| t.len() >= 2).flatten().all(|&v| cut[v] || g.adj[v].len() <= 1);
        let t1 = T1Check {
            pass: t1_witness.is_none(),
            witness: t1_witness,
        };
        let t2pp = T2Check {
            pass: t2_witness.is_none(),
            partial,
            witness: t2_witness,
        };
        let pieces_geodesic = GeodesicPieces {
            pass: geodesic_witness.is_none(),
            witness: geodesic_witness,
        };
        AxiomReport {
            schema: TREEGRADED_SCHEMA,
            pass: t1.pass && t2pp.pass && pieces_geodesic.pass,
            t1,
            t2pp,
            pieces_geodesic,
            cut_points: (0..self.names.len()).filter(|&v| cut[v]).map(|v| self.names[v].clone()).collect(),
            piece_intersections: self.names_of(&piece_intersections),
            transversal_trees: trees.iter().filter(|t| t.len() >= 2).map(|t| self.names_of(t)).collect(),
            cut_point_duality: duality,
        }
    }

    fn non_geodesic_pair(&self, i: usize) -> Option<(String, [String; 2])> {
        let members = &self.pieces[i];
        let mut outside = vec![true; self.names.len()];
        members.iter().for_each(|&v| outside[v] = false);
        for &u in members {
            let full = bfs(&self.graph, &[u], BfsLimits::default());
            let inner = bfs(
                &self.graph,
                &[u],
                BfsLimits {
                    blocked: Some(&outside),
                    ..BfsLimits::default()
                },
            );
            if let Some(&v) = members.iter().find(|&&v| full.dist[v] != inner.dist[v]) {
                return Some((self.piece_names[i].clone(), [self.names[u].clone(), self.names[v].clone()]));
            }
        }
        None
    }

    /// Components of the graph of transversal edges, singletons included.
    fn transversal_components(&self) -> Vec<Vec<usize>> {
        let n = self.names.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = out.len();
            let mut members = vec![s];
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for &w in &self.graph.adj[u] {
                    if comp[w] == usize::MAX && self.is_transversal_edge(u, w) {
                        comp[w] = out.len();
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    fn require_verified(&self) -> Result<(), TreeGradedError> {
        if self.verify_axioms().pass {
            Ok(())
        } else {
            Err(TreeGradedError::AxiomsNotVerified)
        }
    }

    /// The unique vertex of piece `m` nearest to `x`.
    pub fn project_to_piece(&self, x: usize, m: usize) -> Result<usize, TreeGradedError> {
        self.require_verified()?;
        if x >= self.names.len() {
            return Err(TreeGradedError::UnknownVertex(x.to_string()));
        }
        let piece = self.pieces.get(m).ok_or_else(|| TreeGradedError::UnknownPiece(m.to_string()))?;
        let d = bfs(&self.graph, &[x], BfsLimits::default()).dist;
        let best = piece.iter().map(|&v| d[v]).min().unwrap();
        let nearest: Vec<usize> = piece.iter().copied().filter(|&v| d[v] == best).collect();
        if best == INF || nearest.len() > 1 {
            return Err(TreeGradedError::NonUniqueProjection {
                vertex: self.names[x].clone(),
                candidates: self.names_of(&nearest),
            });
        }
        Ok(nearest[0])
    }

    /// Vertices joined to `x` by a path meeting every piece in at most one
    /// vertex. Pendant trees hang off the transversal part.
    pub fn transversal_tree_of(&self, x: usize) -> Result<Vec<usize>, TreeGradedError> {
        self.require_verified()?;
        if x >= self.names.len() {
            return Err(TreeGradedError::UnknownVertex(x.to_string()));
        }
        Ok(self.transversal_components().into_iter().find(|c| c.contains(&x)).unwrap())
    }
}

fn common_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() && n < 2 {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREE: &str = "vertex: a b c d e\nedge: a b\nedge: b c\nedge: b d\nedge: d e\npiece: p1 = a b\npiece: p2 = b c\npiece: p3 = b d\npiece: p4 = d e\n";
    const VERTEX_GLUED: &str = "vertex: a b v c d\nedge: a b\nedge: b v\nedge: v a\nedge: v c\nedge: c d\nedge: d v\npiece: A = a b v\npiece: B = v c d\n";
    const EDGE_GLUED: &str = "vertex: a b c d\nedge: a b\nedge: b c\nedge: c a\nedge: b d\nedge: d c\npiece: A = a b c\npiece: B = b c d\n";

    #[test]
    fn fixtures() {
        let t = TreeGradedGraph::parse(TREE).unwrap();
        let r = t.verify_axioms();
        assert!(r.pass);
        assert_eq!(r.cut_points, vec!["b", "d"]);
        let v = TreeGradedGraph::parse(VERTEX_GLUED).unwrap();
        assert!(v.verify_axioms().pass);
        assert_eq!(v.verify_axioms().cut_points, vec!["v"]);
        let e = TreeGradedGraph::parse(EDGE_GLUED).unwrap();
        let r = e.verify_axioms();
        assert!(!r.t1.pass);
        assert_eq!(r.t1.witness.as_ref().unwrap().1, ["b".to_string(), "c".to_string()]);
        assert!(!r.t2pp.pass);
    }

    #[test]
    fn projections() {
        let v = TreeGradedGraph::parse(VERTEX_GLUED).unwrap();
        let b = v.piece_index("B").unwrap();
        assert_eq!(v.project_to_piece(v.vertex_index("a").unwrap(), b).unwrap(), v.vertex_index("v").unwrap());
        assert_eq!(v.project_to_piece(3, b).unwrap(), 3);
        let e = TreeGradedGraph::parse(EDGE_GLUED).unwrap();
        assert_eq!(e.project_to_piece(0, 1), Err(TreeGradedError::AxiomsNotVerified));
    }

    #[test]
    fn transversal_trees() {
        let text = "vertex: a b c\nedge: a b\nedge: b c\npiece: pa = a\npiece: pb = b\npiece: pc = c\n";
        let t = TreeGradedGraph::parse(text).unwrap();
        assert_eq!(t.transversal_tree_of(0).unwrap(), vec![0, 1, 2]);
        let pendant = format!("{VERTEX_GLUED}vertex: p\nedge: v p\n");
        let t = TreeGradedGraph::parse(&pendant).unwrap();
        let v = t.vertex_index("v").unwrap();
        assert_eq!(t.transversal_tree_of(v).unwrap(), vec![v, t.vertex_index("p").unwrap()]);
        assert_eq!(t.transversal_tree_of(0).unwrap(), vec![0]);
        assert!(t.verify_axioms().cut_point_duality);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(TreeGradedGraph::parse("vertex: a\nedge: a b\n"), Err(ParseError::UnknownVertex(_))));
        assert!(matches!(TreeGradedGraph::parse("vertex: a\nedge: a a\n"), Err(ParseError::SelfLoop(_))));
        assert!(matches!(TreeGradedGraph::parse("vertex: a b\npiece: p = a b\n"), Err(ParseError::BadPiece(_))));
        assert!(matches!(TreeGradedGraph::parse("colour: red\n"), Err(ParseError::UnknownKey { .. })));
    }

    #[test]
    fn non_geodesic_piece_detected() {
        // On a 5-cycle the path a-b-c-d is shortcut through e.
        let text = "vertex: a b c d e\nedge: a b\nedge: b c\nedge: c d\nedge: d e\nedge: e a\npiece: P = a b c d\n";
        let r = TreeGradedGraph::parse(text).unwrap().verify_axioms().clone();
        assert!(r.t1.pass);
        assert!(!r.t2pp.pass);
        assert_eq!(r.pieces_geodesic.witness, Some(("P".to_string(), ["a".to_string(), "d".to_string()])));
    }

    #[test]
    fn cycles_enumerated_once() {
        let text = "vertex: a b c d\nedge: a b\nedge: b c\nedge: c d\nedge: d a\nedge: a c\n";
        let t = TreeGradedGraph::parse(text).unwrap();
        let mut n = 0;
        simple_cycles(&t.graph, &[0, 1, 2, 3], 100, |_| {
            n += 1;
            true
        });
        assert_eq!(n, 3);
        assert_eq!(fundamental_cycles(&t.graph, &[0, 1, 2, 3]).len(), 2);
    }
}
