//! Følner sets: `|KF| < (1 + ε)|F|`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{CayleyError, GroupError, TreeGradedError};
use crate::group::{Presentation, Strategy};
use crate::graph::INF;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FolnerOptions {
    pub epsilon: f64,
    pub size_cap: usize,
    /// Try balls and boxes before the exhaustive search.
    pub structured: bool,
    /// A uniform-amenability bound `C(ε, |K|)` to compare the result with.
    pub bound: Option<usize>,
}

impl Default for FolnerOptions {
    fn default() -> Self {
        FolnerOptions {
            epsilon: 0.5,
            size_cap: 12,
            structured: true,
            bound: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerSet {
    /// Ball vertices, ascending.
    pub set: Vec<usize>,
    pub words: Vec<String>,
    pub size: usize,
    /// `|KF|`, recomputed from normal forms.
    pub kf: usize,
    pub method: &'static str,
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum FolnerOutcome {
    Found(FolnerSet),
    NotFound {
        size_cap: usize,
        /// Connected sets containing the identity that were evaluated.
        candidates: u64,
        /// Branches cut because `|KS| ≥ (1 + ε)·size_cap` already.
        pruned: u64,
        /// Smallest `|KF| / |F|` among evaluated candidates.
        min_ratio: f64,
    },
}

/// `|KF|` by direct multiplication of normal forms.
pub fn kf_size(p: &Presentation, k: &[Word], f: &[Word]) -> Result<usize, GroupError> {
    let mut out = HashSet::new();
    for a in k {
        for x in f {
            out.insert(p.multiply(a, x)?);
        }
    }
    Ok(out.len())
}

fn passes(kf: usize, size: usize, eps: f64) -> bool {
    (kf as f64) < (1.0 + eps) * size as f64
}

struct Search<'a> {
    /// `left[k][f]` is the vertex of `k·f`.
    left: &'a [Vec<u32>],
    nbrs: &'a [Vec<u32>],
    eps: f64,
    cap: usize,
    count: Vec<u16>,
    kf: usize,
    set: Vec<u32>,
    in_set: Vec<bool>,
    banned: Vec<u16>,
    in_front: Vec<u16>,
    candidates: u64,
    pruned: u64,
    min_ratio: f64,
}

impl Search<'_> {
    fn add(&mut self, w: u32) {
        self.set.push(w);
        self.in_set[w as usize] = true;
        for t in self.left {
            let c = t[w as usize] as usize;
            if self.count[c] == 0 {
                self.kf += 1;
            }
            self.count[c] += 1;
        }
    }

    fn remove(&mut self) {
        let w = self.set.pop().unwrap();
        self.in_set[w as usize] = false;
        for t in self.left {
            let c = t[w as usize] as usize;
            self.count[c] -= 1;
            if self.count[c] == 0 {
                self.kf -= 1;
            }
        }
    }

    /// Visits every connected superset of the current set reachable through
    /// `frontier`, each exactly once.
    fn run(&mut self, frontier: &[u32]) -> Option<Vec<u32>> {
        self.candidates += 1;
        let size = self.set.len();
        self.min_ratio = self.min_ratio.min(self.kf as f64 / size as f64);
        if passes(self.kf, size, self.eps) {
            return Some(self.set.clone());
        }
        if size >= self.cap {
            return None;
        }
        if self.kf as f64 >= (1.0 + self.eps) * self.cap as f64 {
            self.pruned += 1;
            return None;
        }
        let mut found = None;
        for i in 0..frontier.len() {
            let w = frontier[i];
            self.add(w);
            let mut next: Vec<u32> = frontier[i + 1..].to_vec();
            let extra_from = next.len();
            for &u in &self.nbrs[w as usize] {
                let ui = u as usize;
                if !self.in_set[ui] && self.banned[ui] == 0 && self.in_front[ui] == 0 {
                    self.in_front[ui] += 1;
                    next.push(u);
                }
            }
            found = self.run(&next);
            for &u in &next[extra_from..] {
                self.in_front[u as usize] -= 1;
            }
            self.remove();
            self.banned[w as usize] += 1;
            if found.is_some() {
                for &x in &frontier[..=i] {
                    self.banned[x as usize] -= 1;
                }
                return found;
            }
        }
        for &x in frontier {
            self.banned[x as usize] -= 1;
        }
        found
    }
}

fn abelian_coords(b: &CayleyBall, n: usize, v: usize) -> Vec<i64> {
    let mut c = vec![0i64; n];
    for l in b.word(v).letters() {
        c[l.generator()] += if l.is_inverse() { -1 } else { 1 };
    }
    c
}

/// Searches for a Følner set for `K` among subsets of `B(R − max|k|)`: balls and
/// (for free abelian groups) centred boxes first, then every connected set
/// containing the identity of size at most `size_cap`.
pub fn folner_search(b: &CayleyBall, k: &[usize], opts: FolnerOptions) -> Result<FolnerOutcome, TreeGradedError> {
    // F may use any vertex whose products with K stay in the ball.
    let kmax = k.iter().map(|&x| b.dist0(x) as usize).max().unwrap_or(usize::MAX);
    if k.is_empty() || k.iter().any(|&x| x >= b.len()) || kmax > b.radius() {
        return Err(TreeGradedError::ProductsLeaveBall);
    }
    let reach = b.radius() - kmax;
    let region = b.sub_ball(reach).end;
    let left: Vec<Vec<u32>> = k
        .par_iter()
        .map(|&x| {
            (0..region)
                .map(|f| b.product(x, f).map(|o| o.map_or(INF, |v| v as u32)))
                .collect::<Result<Vec<u32>, GroupError>>()
        })
        .collect::<Result<_, _>>()
        .map_err(CayleyError::from)?;
    if left.iter().flatten().any(|&v| v == INF) {
        return Err(TreeGradedError::ProductsLeaveBall);
    }
    let kf_of = |set: &[usize]| -> usize {
        let mut s = HashSet::new();
        for t in &left {
            s.extend(set.iter().map(|&f| t[f]));
        }
        s.len()
    };
    let p = b.presentation();
    let k_words: Vec<Word> = k.iter().map(|&x| b.word(x).clone()).collect();
    let finish = |mut set: Vec<usize>, method: &'static str| -> Result<FolnerOutcome, TreeGradedError> {
        set.sort_unstable();
        let words: Vec<Word> = set.iter().map(|&v| b.word(v).clone()).collect();
        let kf = kf_size(p, &k_words, &words).map_err(CayleyError::from)?;
        assert!(passes(kf, set.len(), opts.epsilon), "Følner set failed re-verification");
        Ok(FolnerOutcome::Found(FolnerSet {
            size: set.len(),
            words: set.iter().map(|&v| b.word_string(v)).collect(),
            set,
            kf,
            method,
            within_bound: opts.bound.map(|c| words.len() <= c),
        }))
    };

    if opts.structured {
        let mut candidates: Vec<(Vec<usize>, &'static str)> = (0..=reach).map(|r| (b.sub_ball(r).collect(), "ball")).collect();
        if let Strategy::FreeAbelian(n) = p.strategy() {
            let n = *n;
            let coords: Vec<Vec<i64>> = (0..region).map(|v| abelian_coords(b, n, v)).collect();
            let mut side = 1i64;
            loop {
                let lo = -(side - 1) / 2;
                let hi = lo + side - 1;
                if n as i64 * lo.abs().max(hi) > reach as i64 {
                    break;
                }
                let set: Vec<usize> = (0..region).filter(|&v| coords[v].iter().all(|&c| lo <= c && c <= hi)).collect();
                candidates.push((set, "box"));
                side += 1;
            }
        }
        candidates.sort_by_key(|c| c.0.len());
        for (set, method) in candidates {
            if passes(kf_of(&set), set.len(), opts.epsilon) {
                return finish(set, method);
            }
        }
    }

    let nbrs: Vec<Vec<u32>> = (0..region)
        .map(|v| b.neighbor_row(v).iter().copied().filter(|&w| w != INF && (w as usize) < region).collect())
        .collect();
    let fresh = || Search {
        left: &left,
        nbrs: &nbrs,
        eps: opts.epsilon,
        cap: opts.size_cap.max(1),
        count: vec![0; b.len()],
        kf: 0,
        set: Vec::new(),
        in_set: vec![false; region],
        banned: vec![0; region],
        in_front: vec![0; region],
        candidates: 0,
        pruned: 0,
        min_ratio: f64::INFINITY,
    };
    // The identity alone, then one parallel branch per first added neighbour.
    let mut root = fresh();
    root.add(0);
    let mut root_front = nbrs[0].clone();
    root_front.sort_unstable();
    root_front.dedup();
    root.candidates += 1;
    root.min_ratio = root.kf as f64;
    if passes(root.kf, 1, opts.epsilon) {
        return finish(vec![0], "exhaustive");
    }
    let (mut candidates, mut pruned, mut min_ratio) = (root.candidates, 0u64, root.min_ratio);
    if opts.size_cap > 1 {
        let branches: Vec<(Option<Vec<u32>>, u64, u64, f64)> = (0..root_front.len())
            .into_par_iter()
            .map(|i| {
                let mut s = fresh();
                s.add(0);
                for &x in &root_front {
                    s.in_front[x as usize] += 1;
                }
                for &x in &root_front[..i] {
                    s.banned[x as usize] += 1;
                }
                let w = root_front[i];
                s.add(w);
                let mut next: Vec<u32> = root_front[i + 1..].to_vec();
                for &u in &nbrs[w as usize] {
                    let ui = u as usize;
                    if !s.in_set[ui] && s.banned[ui] == 0 && s.in_front[ui] == 0 {
                        s.in_front[ui] += 1;
                        next.push(u);
                    }
                }
                let found = s.run(&next);
                (found, s.candidates, s.pruned, s.min_ratio)
            })
            .collect();
        for (found, c, pr, mr) in branches {
            if let Some(set) = found {
                return finish(set.into_iter().map(|v| v as usize).collect(), "exhaustive");
            }
            candidates += c;
            pruned += pr;
            min_ratio = min_ratio.min(mr);
        }
    }
    Ok(FolnerOutcome::NotFound {
        size_cap: opts.size_cap,
        candidates,
        pruned,
        min_ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FolnerComponent {
    /// Component of the `K`-graph on `F`, as normal-form strings.
    pub component: Vec<String>,
    /// The component translated into the subgroup, `V_C · c⁻¹`.
    pub shifted: Vec<String>,
    pub size: usize,
    pub kv: usize,
}

/// Splits `F` into components of the graph `f ~ kf` (`k ∈ K`) and returns
/// the first component that is itself Følner for `K`, translated to contain
/// the identity.
///
/// When the translates `K·V_C` of different components overlap, no component
/// need pass even though `F` does; the result is then `None`.
pub fn folner_component(p: &Presentation, k: &[Word], f: &[Word], epsilon: f64) -> Result<Option<FolnerComponent>, GroupError> {
    let nf: Vec<Word> = f.iter().map(|w| p.normal_form(w)).collect::<Result<_, _>>()?;
    let index: HashMap<&Word, usize> = nf.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut comp = vec![usize::MAX; nf.len()];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..nf.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = comps.len();
        let mut members = vec![s];
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            i += 1;
            for a in k {
                for w in [p.multiply(a, &nf[u])?, p.multiply(&a.inverse(), &nf[u])?] {
                    if let Some(&j) = index.get(&w) {
                        if comp[j] == usize::MAX {
                            comp[j] = comps.len();
                            members.push(j);
                        }
                    }
                }
            }
        }
        comps.push(members);
    }
    for members in comps {
        let words: Vec<Word> = members.iter().map(|&i| nf[i].clone()).collect();
        let kv = kf_size(p, k, &words)?;
        if passes(kv, words.len(), epsilon) {
            let c_inv = words[0].inverse();
            let shifted: Vec<Word> = words.iter().map(|w| p.multiply(w, &c_inv)).collect::<Result<_, _>>()?;
            return Ok(Some(FolnerComponent {
                component: words.iter().map(|w| p.word_string(w)).collect(),
                shifted: shifted.iter().map(|w| p.word_string(w)).collect(),
                size: words.len(),
                kv,
            }));
        }
    }
    Ok(None)
}
