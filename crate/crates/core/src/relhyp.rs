//! Coned-off Cayley balls, peripheral components of paths and the bounded
//! coset penetration test.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{CayleyError, RelhypError};
use crate::graph::{bfs, BfsLimits, Graph, INF};
use crate::group::{subgroup_member, Membership, SubgroupSpec};
use crate::hyperbolicity::MetricBall;

pub const BCP_SCHEMA: &str = "bcp/1";

/// Left coset `gH_i`: peripheral index and the shortlex-least ball member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetTag {
    pub peripheral: usize,
    pub rep: usize,
}

/// A Cayley ball with every peripheral coset turned into a clique.
#[derive(Clone, Debug)]
pub struct ConedOffBall {
    base: CayleyBall,
    peripherals: Vec<SubgroupSpec>,
    /// `cliques[c]` lists the ball members of one coset, ascending.
    cliques: Vec<Vec<u32>>,
    clique_tag: Vec<CosetTag>,
    /// `vertex_cliques[v * k + i]` is the clique of `v` for peripheral `i`.
    vertex_cliques: Vec<u32>,
    dist_coned: Vec<u32>,
}

fn word_err(e: crate::error::GroupError) -> RelhypError {
    RelhypError::Cayley(CayleyError::from(e))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        // Keep the smaller index as root so roots are shortlex-least.
        if a < b {
            self.0[b] = a;
        } else {
            self.0[a] = b;
        }
    }
}

/// Coset label of every vertex for one peripheral, as the least member.
fn coset_classes(base: &CayleyBall, s: &SubgroupSpec) -> Result<Vec<usize>, RelhypError> {
    let p = base.presentation();
    let n = base.len();
    if s.coset_key(p, &crate::Word::empty()).map_err(word_err)?.is_some() {
        let keys: Vec<crate::Word> = (0..n)
            .into_par_iter()
            .map(|v| s.coset_key(p, base.word(v)).map(|k| k.expect("coset key is uniform per oracle")))
            .collect::<Result<_, _>>()
            .map_err(word_err)?;
        let mut first: HashMap<&crate::Word, usize> = HashMap::new();
        return Ok(keys.iter().enumerate().map(|(v, k)| *first.entry(k).or_insert(v)).collect());
    }
    // No canonical form: join along generator steps, then compare classes
    // pairwise with the membership oracle.
    let mut uf = UnionFind((0..n).collect());
    for g in s.generators() {
        for h in [g.clone(), g.inverse()] {
            for v in 0..n {
                if let Some(w) = base.find(&base.word(v).concat(&h)).map_err(word_err)? {
                    uf.union(v, w);
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..n).filter(|&v| uf.find(v) == v).collect();
    roots.sort_unstable();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let (a, b) = (roots[i], roots[j]);
            if uf.find(a) == uf.find(b) {
                continue;
            }
            let w = base.word(a).inverse().concat(base.word(b));
            match subgroup_member(p, s, &w, 2 * base.radius()).map_err(word_err)? {
                Membership::Yes => uf.union(a, b),
                Membership::No => {}
                Membership::Unknown => return Err(RelhypError::MembershipUnknown(p.word_string(&w))),
            }
        }
    }
    Ok((0..n).map(|v| uf.find(v)).collect())
}

/// Adds a clique for every peripheral coset meeting the ball.
pub fn build_coned_off(base: CayleyBall, peripherals: Vec<SubgroupSpec>) -> Result<ConedOffBall, RelhypError> {
    let n = base.len();
    let k = peripherals.len();
    let mut cliques: Vec<Vec<u32>> = Vec::new();
    let mut clique_tag = Vec::new();
    let mut vertex_cliques = vec![0u32; n * k];
    for (i, s) in peripherals.iter().enumerate() {
        let class = coset_classes(&base, s)?;
        let mut id_of: HashMap<usize, u32> = HashMap::new();
        for v in 0..n {
            let c = *id_of.entry(class[v]).or_insert_with(|| {
                cliques.push(Vec::new());
                clique_tag.push(CosetTag {
                    peripheral: i,
                    rep: class[v],
                });
                (cliques.len() - 1) as u32
            });
            cliques[c as usize].push(v as u32);
            vertex_cliques[v * k + i] = c;
        }
    }
    let mut c = ConedOffBall {
        base,
        peripherals,
        cliques,
        clique_tag,
        vertex_cliques,
        dist_coned: Vec::new(),
    };
    c.dist_coned = bfs(&c, &[0], BfsLimits::default()).dist;
    Ok(c)
}

impl ConedOffBall {
    pub fn base(&self) -> &CayleyBall {
        &self.base
    }

    pub fn peripherals(&self) -> &[SubgroupSpec] {
        &self.peripherals
    }

    pub fn dist_coned(&self, v: usize) -> u32 {
        self.dist_coned[v]
    }

    pub fn coset_of(&self, v: usize, peripheral: usize) -> CosetTag {
        self.clique_tag[self.vertex_cliques[v * self.peripherals.len() + peripheral] as usize]
    }

    pub fn tag_label(&self, t: CosetTag) -> String {
        format!("{}:{}", t.peripheral, self.base.word_string(t.rep))
    }

    /// Pairs `u < v` joined only through a coset, with the coset.
    pub fn peripheral_edges(&self) -> impl Iterator<Item = (usize, usize, CosetTag)> + '_ {
        self.cliques.iter().zip(&self.clique_tag).flat_map(move |(m, &t)| {
            m.iter()
                .enumerate()
                .flat_map(move |(i, &u)| m[i + 1..].iter().map(move |&v| (u as usize, v as usize, t)))
                .filter(|&(u, v, _)| !self.base.neighbor_row(u).contains(&(v as u32)))
        })
    }

    pub fn label(&self, v: usize) -> String {
        self.base.word_string(v)
    }
}

impl Graph for ConedOffBall {
    fn vertex_count(&self) -> usize {
        self.base.len()
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        self.base.for_each_neighbor(v, f)
    }

    fn cliques_of(&self, v: usize) -> &[u32] {
        let k = self.peripherals.len();
        &self.vertex_cliques[v * k..(v + 1) * k]
    }

    fn clique_members(&self, c: usize) -> &[u32] {
        &self.cliques[c]
    }

    fn clique_count(&self) -> usize {
        self.cliques.len()
    }
}

impl MetricBall for ConedOffBall {
    fn radius(&self) -> usize {
        self.base.radius()
    }

    fn word_dist0(&self, v: usize) -> u32 {
        self.base.dist0(v)
    }

    fn label(&self, v: usize) -> String {
        self.base.word_string(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub start: usize,
    pub end: usize,
    pub tag: CosetTag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    pub path: Vec<usize>,
    pub components: Vec<Component>,
    pub backtracks: Vec<CosetTag>,
}

/// Maximal runs of at least two consecutive path vertices inside one coset.
pub fn decompose_path(c: &ConedOffBall, path: &[usize]) -> Result<PathDecomposition, RelhypError> {
    for (i, w) in path.windows(2).enumerate() {
        if w[0] >= c.vertex_count() || w[1] >= c.vertex_count() || w[0] == w[1] || !c.adjacent(w[0], w[1]) {
            return Err(RelhypError::InvalidPath(i));
        }
    }
    if path.len() == 1 && path[0] >= c.vertex_count() {
        return Err(RelhypError::InvalidPath(0));
    }
    let mut components = Vec::new();
    for i in 0..c.peripherals.len() {
        let mut start = 0;
        for j in 1..=path.len() {
            let same = j < path.len() && c.coset_of(path[j], i) == c.coset_of(path[start], i);
            if !same {
                if j - start >= 2 {
                    components.push(Component {
                        start,
                        end: j - 1,
                        tag: c.coset_of(path[start], i),
                    });
                }
                start = j;
            }
        }
    }
    components.sort_by_key(|x| (x.start, x.tag.peripheral));
    let mut count: HashMap<CosetTag, usize> = HashMap::new();
    for x in &components {
        *count.entry(x.tag).or_default() += 1;
    }
    let mut backtracks: Vec<CosetTag> = count.into_iter().filter(|&(_, n)| n >= 2).map(|(t, _)| t).collect();
    backtracks.sort();
    Ok(PathDecomposition {
        path: path.to_vec(),
        components,
        backtracks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPair {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub endpoints: usize,
    pub paths: usize,
    pub pairs: usize,
    /// Some endpoint had more geodesics than the cap.
    pub capped: bool,
    pub tested: usize,
    pub skipped_shape: usize,
    pub skipped_bilipschitz: usize,
    pub skipped_backtracking: usize,
    pub skipped_truncated: usize,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub pairs: Vec<PathPair>,
    pub stats: CorpusStats,
}

pub const GEODESICS_PER_ENDPOINT: usize = 64;

/// Coned-off geodesics from the identity to every vertex of `B(R/2)`,
/// paired with those ending at most one generator away.
pub fn geodesic_corpus(c: &ConedOffBall, per_endpoint: usize) -> Corpus {
    let half = c.base.radius() / 2;
    let endpoints: Vec<usize> = c.base.sub_ball(half).collect();
    let found: Vec<(Vec<Vec<usize>>, bool)> = endpoints
        .par_iter()
        .map(|&v| {
            let de = bfs(c, &[v], BfsLimits::default()).dist;
            let mut out = Vec::new();
            let mut capped = false;
            let mut stack = vec![0usize];
            forward_geodesics(c, &de, &mut stack, v, per_endpoint, &mut out, &mut capped);
            (out, capped)
        })
        .collect();
    let index: HashMap<usize, usize> = endpoints.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut pairs = Vec::new();
    for (i, &v) in endpoints.iter().enumerate() {
        let mut partners = vec![i];
        for &w in c.base.neighbor_row(v) {
            if let Some(&j) = index.get(&(w as usize)) {
                if j > i && !partners.contains(&j) {
                    partners.push(j);
                }
            }
        }
        for j in partners {
            for (a, p) in found[i].0.iter().enumerate() {
                for (b, q) in found[j].0.iter().enumerate() {
                    if i == j && b < a {
                        continue;
                    }
                    pairs.push(PathPair { p: p.clone(), q: q.clone() });
                }
            }
        }
    }
    let stats = CorpusStats {
        endpoints: endpoints.len(),
        paths: found.iter().map(|f| f.0.len()).sum(),
        pairs: pairs.len(),
        capped: found.iter().any(|f| f.1),
        ..CorpusStats::default()
    };
    Corpus { pairs, stats }
}

fn forward_geodesics(c: &ConedOffBall, de: &[u32], stack: &mut Vec<usize>, target: usize, cap: usize, out: &mut Vec<Vec<usize>>, capped: &mut bool) {
    let u = *stack.last().unwrap();
    if u == target {
        if out.len() < cap {
            out.push(stack.clone());
        } else {
            *capped = true;
        }
        return;
    }
    for w in c.neighbors(u) {
        if *capped {
            return;
        }
        if de[w] != INF && de[w] + 1 == de[u] {
            stack.push(w);
            forward_geodesics(c, de, stack, target, cap, out, capped);
            stack.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BcpVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcpWitness {
    pub clause: u8,
    /// Largest word length of a vertex of either path.
    pub scale: u32,
    /// `dist_S` of the unmatched component (clause 1) or of the matched
    /// endpoints (clause 2).
    pub length: u32,
    /// Smallest `a` this pair tolerates.
    pub required_a: u32,
    pub coset: String,
    pub p: Vec<String>,
    pub q: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BcpReport {
    pub schema: &'static str,
    pub lambda: f64,
    pub a_estimate: Option<u32>,
    pub verdict: BcpVerdict,
    /// Cumulative smallest admissible `a` over pairs up to each scale.
    pub required_by_scale: Vec<(u32, u32)>,
    pub clause1_witnesses: Vec<BcpWitness>,
    pub clause2_witnesses: Vec<BcpWitness>,
    pub corpus_stats: CorpusStats,
}

impl BcpReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            schema: &'a str,
            lambda: f64,
            a_estimate: Option<u32>,
            verdict: BcpVerdict,
            required_by_scale: &'a [(u32, u32)],
            witnesses: Vec<&'a BcpWitness>,
            corpus_stats: &'a CorpusStats,
        }
        serde_json::to_string_pretty(&Out {
            schema: self.schema,
            lambda: self.lambda,
            a_estimate: self.a_estimate,
            verdict: self.verdict,
            required_by_scale: &self.required_by_scale,
            witnesses: self.clause1_witnesses.iter().chain(&self.clause2_witnesses).collect(),
            corpus_stats: &self.corpus_stats,
        })
        .expect("report serializes")
    }
}

enum PairOutcome {
    Shape,
    BiLipschitz,
    Backtracking,
    Truncated,
    Tested { scale: u32, req: u32, worst1: Option<BcpWitness>, worst2: Option<BcpWitness> },
}

fn is_bilipschitz(c: &ConedOffBall, path: &[usize], lambda: f64) -> bool {
    path.iter().enumerate().all(|(i, &u)| {
        let d = bfs(
            c,
            &[u],
            BfsLimits {
                targets: Some(&path[i + 1..]),
                ..BfsLimits::default()
            },
        )
        .dist;
        path.iter().enumerate().skip(i + 1).all(|(j, &v)| {
            let t = (j - i) as f64;
            let d = d[v] as f64;
            d != INF as f64 && t / lambda <= d + 1e-9 && d <= lambda * t + 1e-9
        })
    })
}

fn evaluate_pair(c: &ConedOffBall, lambda: f64, pair: &PathPair) -> Result<PairOutcome, RelhypError> {
    let (p, q) = (&pair.p, &pair.q);
    if p.is_empty() || q.is_empty() || p[0] != q[0] {
        return Ok(PairOutcome::Shape);
    }
    let b = &c.base;
    match b.group_distance(*p.last().unwrap(), *q.last().unwrap()) {
        Some(d) if d <= 1 => {}
        _ => return Ok(PairOutcome::Shape),
    }
    let dp = decompose_path(c, p)?;
    let dq = decompose_path(c, q)?;
    if !is_bilipschitz(c, p, lambda) || !is_bilipschitz(c, q, lambda) {
        return Ok(PairOutcome::BiLipschitz);
    }
    if !dp.backtracks.is_empty() || !dq.backtracks.is_empty() {
        return Ok(PairOutcome::Backtracking);
    }
    let scale = p.iter().chain(q).map(|&v| b.dist0(v)).max().unwrap();
    let labels = |x: &[usize]| x.iter().map(|&v| b.word_string(v)).collect::<Vec<_>>();
    let mut req = 0;
    let mut worst1: Option<BcpWitness> = None;
    let mut worst2: Option<BcpWitness> = None;
    for (x, dx, dy, swapped) in [(p, &dp, &dq, false), (q, &dq, &dp, true)] {
        for s in &dx.components {
            let (sm, sp) = (x[s.start], x[s.end]);
            let Some(len) = b.group_distance(sm, sp) else {
                return Ok(PairOutcome::Truncated);
            };
            let partner = dy.components.iter().find(|t| t.tag == s.tag);
            let (clause, length, need) = match partner {
                None => (1u8, len, len + 1),
                Some(t) => {
                    let y = if swapped { p } else { q };
                    let (Some(d1), Some(d2)) = (b.group_distance(sm, y[t.start]), b.group_distance(sp, y[t.end])) else {
                        return Ok(PairOutcome::Truncated);
                    };
                    (2u8, d1.max(d2), d1.max(d2))
                }
            };
            req = req.max(need);
            let slot = if clause == 1 { &mut worst1 } else { &mut worst2 };
            if need > 0 && slot.as_ref().is_none_or(|w| need > w.required_a) {
                let (pp, qq) = if swapped { (q, p) } else { (p, q) };
                *slot = Some(BcpWitness {
                    clause,
                    scale,
                    length,
                    required_a: need,
                    coset: c.tag_label(s.tag),
                    p: labels(pp),
                    q: labels(qq),
                });
            }
        }
    }
    Ok(PairOutcome::Tested { scale, req, worst1, worst2 })
}

/// Runs both clauses over the corpus and estimates the smallest `a`.
///
/// The verdict is FAIL when the required `a` keeps growing with the scale
/// of the tested pairs over the upper half of the scales seen (at least two),
/// or exceeds the schedule bound `2R`.
pub fn bcp_test(c: &ConedOffBall, lambda: f64, corpus: &Corpus) -> Result<BcpReport, RelhypError> {
    if corpus.pairs.is_empty() {
        return Err(RelhypError::EmptyCorpus);
    }
    let outcomes: Vec<PairOutcome> = corpus.pairs.par_iter().map(|pair| evaluate_pair(c, lambda, pair)).collect::<Result<_, _>>()?;
    let mut stats = corpus.stats.clone();
    stats.pairs = corpus.pairs.len();
    let mut by_scale: std::collections::BTreeMap<u32, (u32, Option<BcpWitness>, Option<BcpWitness>)> = Default::default();
    for o in outcomes {
        match o {
            PairOutcome::Shape => stats.skipped_shape += 1,
            PairOutcome::BiLipschitz => stats.skipped_bilipschitz += 1,
            PairOutcome::Backtracking => stats.skipped_backtracking += 1,
            PairOutcome::Truncated => stats.skipped_truncated += 1,
            PairOutcome::Tested { scale, req, worst1, worst2 } => {
                stats.tested += 1;
                let e = by_scale.entry(scale).or_insert((0, None, None));
                e.0 = e.0.max(req);
                for (slot, w) in [(&mut e.1, worst1), (&mut e.2, worst2)] {
                    if let Some(w) = w {
                        if slot.as_ref().is_none_or(|s| w.required_a > s.required_a) {
                            *slot = Some(w);
                        }
                    }
                }
            }
        }
    }
    if stats.tested == 0 {
        return Err(RelhypError::EmptyCorpus);
    }
    let mut required_by_scale = Vec::new();
    let mut running = 0;
    for (&s, e) in &by_scale {
        running = running.max(e.0);
        required_by_scale.push((s, running));
    }
    let k = required_by_scale.len();
    let window = &required_by_scale[k - k.div_ceil(2).max(2).min(k)..];
    let growing = window.len() >= 2 && window.windows(2).all(|w| w[1].1 > w[0].1);
    let a = running;
    let fail = growing || a as usize > 2 * c.base.radius();
    let (clause1_witnesses, clause2_witnesses) = if fail {
        (by_scale.values().filter_map(|e| e.1.clone()).collect(), by_scale.values().filter_map(|e| e.2.clone()).collect())
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(BcpReport {
        schema: BCP_SCHEMA,
        lambda,
        a_estimate: (!fail).then_some(a),
        verdict: if fail { BcpVerdict::Fail } else { BcpVerdict::Pass },
        required_by_scale,
        clause1_witnesses,
        clause2_witnesses,
        corpus_stats: stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetProbeEntry {
    /// Window radius: both cosets are sampled as `g · (H ∩ B(rho))`.
    pub rho: usize,
    pub distance: Option<u32>,
    /// Some window point or distance left the ball.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetProbe {
    pub entries: Vec<CosetProbeEntry>,
    /// Distances strictly increase over the last three windows.
    pub growing: bool,
}

/// Hausdorff distance between windows `r·(H ∩ B(rho))` of `g₁H` and `g₂H`,
/// with `r` the least ball member of each coset.
pub fn coset_hausdorff_probe(b: &CayleyBall, s: &SubgroupSpec, g1: usize, g2: usize, rhos: &[usize]) -> Result<CosetProbe, RelhypError> {
    if g1 >= b.len() || g2 >= b.len() {
        return Err(RelhypError::EmptyCoset);
    }
    let p = b.presentation();
    // Windows are anchored at the least member, so they only depend on the coset.
    let class = coset_classes(b, s)?;
    let (g1, g2) = (class[g1], class[g2]);
    let max_rho = rhos.iter().copied().max().unwrap_or(0).min(b.radius());
    let mut h = Vec::new();
    for v in b.sub_ball(max_rho) {
        match subgroup_member(p, s, b.word(v), 2 * b.radius()).map_err(word_err)? {
            Membership::Yes => h.push(v),
            Membership::No => {}
            Membership::Unknown => return Err(RelhypError::MembershipUnknown(b.word_string(v))),
        }
    }
    let mut entries = Vec::new();
    for &rho in rhos {
        let mut truncated = rho > b.radius();
        let window = |g: usize, truncated: &mut bool| -> Result<Vec<usize>, RelhypError> {
            let mut out = Vec::new();
            for &x in h.iter().filter(|&&x| b.dist0(x) as usize <= rho) {
                match b.left_multiply(b.word(g), x).map_err(word_err)? {
                    Some(y) => out.push(y),
                    None => *truncated = true,
                }
            }
            Ok(out)
        };
        let a = window(g1, &mut truncated)?;
        let c = window(g2, &mut truncated)?;
        let directed = |from: &[usize], to: &[usize], truncated: &mut bool| -> Option<u32> {
            let mut worst = 0;
            for &x in from {
                // A missing distance exceeds R, so it only matters when no
                // partner is within the ball.
                let best = to.iter().filter_map(|&y| b.group_distance(x, y)).min();
                match best {
                    Some(d) => worst = worst.max(d),
                    None => {
                        *truncated = true;
                        return None;
                    }
                }
            }
            Some(worst)
        };
        let d1 = directed(&a, &c, &mut truncated);
        let d2 = directed(&c, &a, &mut truncated);
        let distance = match (d1, d2) {
            (Some(x), Some(y)) if !a.is_empty() && !c.is_empty() => Some(x.max(y)),
            _ => None,
        };
        if a.is_empty() || c.is_empty() {
            return Err(RelhypError::EmptyCoset);
        }
        entries.push(CosetProbeEntry { rho, distance, truncated });
    }
    let ds: Vec<u32> = entries.iter().filter_map(|e| e.distance).collect();
    let growing = ds.len() >= 3 && ds[ds.len() - 3..].windows(2).all(|w| w[1] > w[0]);
    Ok(CosetProbe { entries, growing })
}

/// DOT export; peripheral shortcuts are dashed.
pub fn coned_to_dot(c: &ConedOffBall) -> String {
    let b = &c.base;
    let mut out = String::from("graph coned {\n");
    for v in 0..b.len() {
        let _ = writeln!(out, "  {v} [label=\"{}\"];", b.word_string(v));
    }
    for (u, v, s) in b.edges() {
        let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", b.step_name(s));
    }
    for (u, v, t) in c.peripheral_edges() {
        let _ = writeln!(out, "  {u} -- {v} [style=dashed, color=red, label=\"H{}\"];", t.peripheral);
    }
    out.push_str("}\n");
    out
}
