use std::collections::{HashSet, VecDeque};

use cayleylab::error::{ParseError, TreeGradedError};
use cayleylab::treegraded::{chord_division, folner_component, folner_search, kf_size, FolnerOptions, FolnerOutcome, TreeGradedGraph};
use cayleylab::{CayleyBall, Presentation, Word};
use proptest::prelude::*;

fn fixture(name: &str) -> TreeGradedGraph {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    TreeGradedGraph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A random instance: pieces attached one at a time at a single existing
/// vertex, plus pendant edges that belong to no piece.
#[derive(Clone, Debug)]
struct Instance {
    n: usize,
    edges: Vec<(usize, usize)>,
    pieces: Vec<Vec<usize>>,
    cyclic: bool,
}

impl Instance {
    fn build(&self) -> TreeGradedGraph {
        let names = (0..self.n).map(|i| format!("v{i}")).collect();
        let pieces = self.pieces.iter().enumerate().map(|(i, p)| (format!("P{i}"), p.clone())).collect();
        TreeGradedGraph::new(names, &self.edges, pieces).unwrap()
    }

    fn adjacency(&self, extra: Option<(usize, usize)>) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in self.edges.iter().chain(extra.iter()) {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

/// `(kind, size, attach)` with kind 0 a random tree, 1 a cycle, 2 a complete
/// graph, 3 a pendant transversal edge.
fn instance(cyclic: bool) -> impl Strategy<Value = Instance> {
    let kinds = if cyclic { 0..4u8 } else { 0..1u8 };
    let step = (prop_oneof![3 => kinds, 1 => Just(3u8)], 2..6usize, any::<prop::sample::Index>(), prop::collection::vec(any::<prop::sample::Index>(), 6));
    prop::collection::vec(step, 1..7).prop_map(|steps| {
        let mut inst = Instance {
            n: 1,
            edges: Vec::new(),
            pieces: Vec::new(),
            cyclic: false,
        };
        for (kind, size, attach, shape) in steps {
            let root = attach.index(inst.n);
            if kind == 3 {
                inst.edges.push((root, inst.n));
                inst.n += 1;
                continue;
            }
            let size = if kind == 1 { size.max(3) } else { size };
            let mut members = vec![root];
            members.extend(inst.n..inst.n + size - 1);
            inst.n += size - 1;
            match kind {
                0 => {
                    for i in 1..size {
                        let parent = shape[(i - 1) % shape.len()].index(i);
                        inst.edges.push((members[parent], members[i]));
                    }
                }
                1 => {
                    for i in 0..size {
                        inst.edges.push((members[i], members[(i + 1) % size]));
                    }
                    inst.cyclic = true;
                }
                _ => {
                    for i in 0..size {
                        for j in i + 1..size {
                            inst.edges.push((members[i], members[j]));
                        }
                    }
                    inst.cyclic |= size >= 3;
                }
            }
            members.sort();
            inst.pieces.push(members);
        }
        inst
    })
}

fn reachable(adj: &[Vec<usize>], from: usize, removed: Option<usize>) -> usize {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    let mut count = 1;
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if !seen[y] && Some(y) != removed {
                seen[y] = true;
                count += 1;
                q.push_back(y);
            }
        }
    }
    count
}

/// Removal test: `v` is a cut-point iff the rest falls apart.
fn is_cut_point(adj: &[Vec<usize>], v: usize) -> bool {
    if adj.len() < 3 {
        return false;
    }
    let start = (v + 1) % adj.len();
    reachable(adj, start, Some(v)) < adj.len() - 1
}

fn bfs(adj: &[Vec<usize>], from: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[from] = 0;
    let mut q = VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if d[y] == usize::MAX {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

#[test]
fn fixture_verdicts() {
    let tree = fixture("pure_tree.tg");
    assert!(tree.verify_axioms().pass);
    let glued = fixture("vertex_glued.tg");
    let r = glued.verify_axioms();
    assert!(r.pass && r.cut_point_duality);
    assert_eq!(r.cut_points, vec!["v"]);
    assert_eq!(r.piece_intersections, vec!["v"]);
    let edge = fixture("edge_glued.tg");
    let r = edge.verify_axioms();
    assert!(!r.pass && !r.t1.pass);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["pass"], false);
    assert!(matches!(edge.project_to_piece(0, 0), Err(TreeGradedError::AxiomsNotVerified)));
}

#[test]
fn cut_points_match_removal_search() {
    for name in ["pure_tree.tg", "vertex_glued.tg", "edge_glued.tg"] {
        let t = fixture(name);
        let mut adj = vec![Vec::new(); t.vertex_count()];
        for (u, nb) in adj.iter_mut().enumerate() {
            for v in 0..t.vertex_count() {
                if u != v && cayleylab::graph::Graph::adjacent(t.graph(), u, v) {
                    nb.push(v);
                }
            }
        }
        let expected: Vec<&str> = (0..t.vertex_count()).filter(|&v| is_cut_point(&adj, v)).map(|v| t.name(v)).collect();
        assert_eq!(t.verify_axioms().cut_points, expected, "{name}");
    }
}

#[test]
fn projection_examples() {
    let g = fixture("vertex_glued.tg");
    let (a, b) = (g.piece_index("A").unwrap(), g.piece_index("B").unwrap());
    let v = g.vertex_index("v").unwrap();
    for x in ["a", "b", "v"] {
        let x = g.vertex_index(x).unwrap();
        assert_eq!(g.project_to_piece(x, a).unwrap(), x);
    }
    for x in ["a", "b", "p"] {
        assert_eq!(g.project_to_piece(g.vertex_index(x).unwrap(), b).unwrap(), v);
    }

    // Three triangles in a chain, glued at u and w.
    let chain = TreeGradedGraph::parse(
        "vertex: a b u c w d e\nedge: a b\nedge: b u\nedge: u a\nedge: u c\nedge: c w\nedge: w u\nedge: w d\nedge: d e\nedge: e w\npiece: A = a b u\npiece: B = u c w\npiece: C = w d e\n",
    )
    .unwrap();
    assert!(chain.verify_axioms().pass);
    let c = chain.piece_index("C").unwrap();
    let w = chain.vertex_index("w").unwrap();
    for x in ["a", "b", "u", "c"] {
        assert_eq!(chain.project_to_piece(chain.vertex_index(x).unwrap(), c).unwrap(), w);
    }
    assert!(matches!(chain.project_to_piece(0, 9), Err(TreeGradedError::UnknownPiece(_))));
}

#[test]
fn transversal_examples() {
    let g = fixture("vertex_glued.tg");
    let v = g.vertex_index("v").unwrap();
    let p = g.vertex_index("p").unwrap();
    let mut tv = g.transversal_tree_of(v).unwrap();
    tv.sort();
    let mut expected = vec![v, p];
    expected.sort();
    assert_eq!(tv, expected);
    let a = g.vertex_index("a").unwrap();
    assert_eq!(g.transversal_tree_of(a).unwrap(), vec![a]);

    // A path with no pieces at all is one transversal tree.
    let bare = TreeGradedGraph::parse("vertex: a b c d\nedge: a b\nedge: b c\nedge: c d\n").unwrap();
    assert!(bare.verify_axioms().pass);
    let mut t = bare.transversal_tree_of(2).unwrap();
    t.sort();
    assert_eq!(t, vec![0, 1, 2, 3]);
    // Singleton pieces do not cut it either.
    let singles = TreeGradedGraph::parse("vertex: a b c\nedge: a b\nedge: b c\npiece: A = a\npiece: B = b\npiece: C = c\n").unwrap();
    let mut t = singles.transversal_tree_of(0).unwrap();
    t.sort();
    assert_eq!(t, vec![0, 1, 2]);
}

#[test]
fn parse_errors() {
    for bad in [
        "vertex: a a\n",
        "vertex: a b\nedge: a c\n",
        "vertex: a b\nedge: a a\n",
        "vertex: a b\nedge: a b\nedge: b a\n",
        "vertex: a b c\nedge: a b\npiece: P = a c\n",
        "vertex: a b\nedge: a b\npiece: P =\n",
        "vertex: a b\nedge: a b\npiece: P = a\npiece: P = b\n",
        "vertex: a\nedges: a\n",
        "vertex: a b\nedge: a\n",
    ] {
        assert!(TreeGradedGraph::parse(bad).is_err(), "{bad:?}");
    }
    assert!(matches!(TreeGradedGraph::parse("nonsense"), Err(ParseError::BadLine { .. } | ParseError::UnknownKey { .. })));
}

fn walk(b: &CayleyBall, start: &str, moves: &str) -> Vec<usize> {
    let p = b.presentation();
    let mut v = b.vertex_str(start).unwrap();
    let mut out = vec![v];
    for m in moves.split_whitespace() {
        v = b.find(&p.multiply(b.word(v), &p.parse_word(m).unwrap()).unwrap()).unwrap().unwrap();
        out.push(v);
    }
    out
}

#[test]
fn chord_examples() {
    let b = CayleyBall::build(&Presentation::free_abelian(2), 20).unwrap();
    let square = walk(&b, "1", "x y x- y-");
    let d = chord_division(&b, &square, 2).unwrap();
    assert_eq!(d.loops.len(), 2);
    assert!(d.max_length <= 8);
    let once = chord_division(&b, &square, 1).unwrap();
    assert_eq!((once.max_length, once.loops[0].clone()), (4, square.clone()));

    let side = format!("{}{}{}{}{}", "x ".repeat(5), "y ".repeat(10), "x- ".repeat(10), "y- ".repeat(10), "x ".repeat(5));
    let rect = walk(&b, "y^-5", &side);
    let d = chord_division(&b, &rect, 2).unwrap();
    assert_eq!(d.length, 40);
    assert!(d.max_length < 40, "{}", d.max_length);
    assert_eq!(d.max_length, 30);
    for l in &d.loops {
        assert_eq!(l.first(), l.last());
    }

    assert!(matches!(chord_division(&b, &square[..3], 2), Err(TreeGradedError::InvalidLoop(_))));
    assert!(matches!(chord_division(&b, &square, 5), Err(TreeGradedError::LoopTooShort { .. })));
    let far = walk(&b, "x^11", "x x-");
    assert!(matches!(chord_division(&b, &far, 1), Err(TreeGradedError::LeavesCertifiedRegion(_))));
}

/// `|KF|` by multiplying every pair and counting distinct normal forms.
fn kf_by_hand(p: &Presentation, k: &[Word], f: &[Word]) -> usize {
    let mut out = HashSet::new();
    for a in k {
        for x in f {
            out.insert(p.multiply(a, x).unwrap());
        }
    }
    out.len()
}

#[test]
fn folner_sets_in_the_line_and_plane() {
    let zp = Presentation::free(1);
    let b = CayleyBall::build(&zp, 30).unwrap();
    let k: Vec<usize> = ["a", "a-"].iter().map(|w| b.vertex_str(w).unwrap()).collect();
    let kw: Vec<Word> = k.iter().map(|&v| b.word(v).clone()).collect();
    let opts = FolnerOptions {
        epsilon: 0.1,
        size_cap: 40,
        ..FolnerOptions::default()
    };
    let FolnerOutcome::Found(f) = folner_search(&b, &k, opts).unwrap() else { panic!("Z is amenable") };
    let fw: Vec<Word> = f.set.iter().map(|&v| b.word(v).clone()).collect();
    assert!(f.size >= 21);
    assert_eq!(f.kf, kf_by_hand(&zp, &kw, &fw));
    assert_eq!(f.kf, f.size + 2);
    assert!((f.kf as f64) < 1.1 * f.size as f64);
    assert_eq!(kf_size(&zp, &kw, &fw).unwrap(), f.kf);

    let p = Presentation::free_abelian(2);
    let b = CayleyBall::build(&p, 16).unwrap();
    let k: Vec<usize> = ["x", "x-", "y", "y-"].iter().map(|w| b.vertex_str(w).unwrap()).collect();
    let opts = FolnerOptions {
        epsilon: 0.5,
        size_cap: 64,
        ..FolnerOptions::default()
    };
    let FolnerOutcome::Found(f) = folner_search(&b, &k, opts).unwrap() else { panic!("Z² is amenable") };
    let fw: Vec<Word> = f.set.iter().map(|&v| b.word(v).clone()).collect();
    let kw: Vec<Word> = k.iter().map(|&v| b.word(v).clone()).collect();
    assert_eq!(f.kf, kf_by_hand(&p, &kw, &fw));
    assert!((f.kf as f64) < 1.5 * f.size as f64);

    // Restricting to K ⊆ ⟨x⟩ leaves a row that is Følner in ⟨x⟩.
    let kx = vec![p.parse_word("x").unwrap(), p.parse_word("x-").unwrap()];
    let c = folner_component(&p, &kx, &fw, 0.5).unwrap().expect("a good row exists");
    let shifted: Vec<Word> = c.shifted.iter().map(|s| p.parse_word(s).unwrap()).collect();
    assert_eq!(c.size, shifted.len());
    assert!(shifted.iter().all(|w| p.normal_form(w).unwrap().letters().iter().all(|l| l.generator() == 0)));
    let kv = kf_by_hand(&p, &kx, &shifted);
    assert_eq!(kv, c.kv);
    assert!((kv as f64) < 1.5 * c.size as f64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn glued_trees_and_cycles_verify(inst in instance(true)) {
        let t = inst.build();
        let r = t.verify_axioms();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert!(r.cut_point_duality);
        let adj = inst.adjacency(None);
        let expected: Vec<String> = (0..inst.n).filter(|&v| is_cut_point(&adj, v)).map(|v| format!("v{v}")).collect();
        prop_assert_eq!(&r.cut_points, &expected);
        for name in &r.piece_intersections {
            prop_assert!(expected.contains(name));
        }
    }

    #[test]
    fn acyclic_instances_are_trees(inst in instance(false)) {
        let t = inst.build();
        prop_assert!(!inst.cyclic);
        prop_assert!(t.verify_axioms().pass);
        prop_assert_eq!(inst.edges.len(), inst.n - 1);
        prop_assert_eq!(reachable(&inst.adjacency(None), 0, None), inst.n);
    }

    #[test]
    fn a_cross_piece_edge_breaks_the_axioms(inst in instance(true), u in any::<prop::sample::Index>(), v in any::<prop::sample::Index>()) {
        let (u, v) = (u.index(inst.n), v.index(inst.n));
        let share = inst.pieces.iter().any(|p| p.contains(&u) && p.contains(&v));
        let adjacent = inst.edges.iter().any(|&e| e == (u, v) || e == (v, u));
        prop_assume!(u != v && !share && !adjacent);
        let mut broken = inst.clone();
        broken.edges.push((u, v));
        prop_assert!(!broken.build().verify_axioms().pass);
    }

    #[test]
    fn projections_are_coarsely_constant(inst in instance(true), m in any::<prop::sample::Index>(), start in any::<prop::sample::Index>(), grow in prop::collection::vec(any::<prop::sample::Index>(), 1..10)) {
        prop_assume!(!inst.pieces.is_empty());
        let t = inst.build();
        let m = m.index(inst.pieces.len());
        let piece = &inst.pieces[m];
        let adj = inst.adjacency(None);
        let x = start.index(inst.n);
        let d = bfs(&adj, x);
        let nearest = piece.iter().map(|&v| d[v]).min().unwrap();
        let candidates: Vec<usize> = piece.iter().copied().filter(|&v| d[v] == nearest).collect();
        prop_assert_eq!(candidates.len(), 1);
        prop_assert_eq!(t.project_to_piece(x, m).unwrap(), candidates[0]);

        // A connected set meeting the piece in at most one vertex.
        let mut set = vec![x];
        let mut hits = usize::from(piece.contains(&x));
        for g in grow {
            let frontier: Vec<usize> = set
                .iter()
                .flat_map(|&s| adj[s].iter().copied())
                .filter(|y| !set.contains(y) && (hits == 0 || !piece.contains(y)))
                .collect();
            if frontier.is_empty() {
                break;
            }
            let y = frontier[g.index(frontier.len())];
            hits += usize::from(piece.contains(&y));
            set.push(y);
        }
        let images: HashSet<usize> = set.iter().map(|&s| t.project_to_piece(s, m).unwrap()).collect();
        prop_assert_eq!(images.len(), 1);
    }

    #[test]
    fn transversal_trees_are_consistent_trees(inst in instance(true), x in any::<prop::sample::Index>()) {
        let t = inst.build();
        let x = x.index(inst.n);
        let tx = t.transversal_tree_of(x).unwrap();
        prop_assert!(tx.contains(&x));
        let inside: Vec<(usize, usize)> = inst.edges.iter().copied().filter(|&(a, b)| tx.contains(&a) && tx.contains(&b)).collect();
        prop_assert_eq!(inside.len() + 1, tx.len());
        for &y in &tx {
            let mut ty = t.transversal_tree_of(y).unwrap();
            ty.sort();
            let mut sorted = tx.clone();
            sorted.sort();
            prop_assert_eq!(ty, sorted);
        }
    }
}
