//! Cayley-graph balls, the word metric, growth tables and exports.

mod export;
mod growth;

pub use export::{ball_to_dot, ball_to_json, growth_to_csv, BallRecord, BALL_SCHEMA};
pub use growth::{classify_growth, growth_table, GrowthClass, GrowthTable};

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{CayleyError, GroupError};
use crate::graph::{Graph, INF};
use crate::group::{GroupAction, Presentation};
use crate::word::{Letter, Word};

pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;
pub const VERTEX_CAP_ENV: &str = "CAYLEYLAB_MAX_VERTICES";

/// The vertex cap, honouring `CAYLEYLAB_MAX_VERTICES` when set.
pub fn vertex_cap() -> usize {
    std::env::var(VERTEX_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_VERTEX_CAP)
}

const CHUNK: usize = 1 << 15;

/// The ball of radius `R` about the identity in a Cayley graph.
///
/// Vertex `0` is the identity. Vertices are numbered layer by layer and,
/// inside a layer, in shortlex order of their least geodesic words
/// (letters ordered `s₀, s₀⁻¹, s₁, s₁⁻¹, ...`).
#[derive(Clone, Debug)]
pub struct CayleyBall {
    presentation: Presentation,
    radius: usize,
    /// Group element for each step letter; letter `2i` is generator `i`.
    steps: Vec<Word>,
    step_names: Vec<String>,
    words: Vec<Word>,
    index: HashMap<Word, u32>,
    /// `steps.len()` entries per vertex, `INF` when outside the ball.
    neighbors: Vec<u32>,
    dist0: Vec<u32>,
    parent_step: Vec<u16>,
    layer_start: Vec<usize>,
}

impl CayleyBall {
    pub fn build(p: &Presentation, radius: usize) -> Result<Self, CayleyError> {
        Self::build_with_cap(p, radius, vertex_cap())
    }

    pub fn build_with_cap(p: &Presentation, radius: usize, cap: usize) -> Result<Self, CayleyError> {
        let gens = (0..p.generator_count()).map(|g| Word::letter(Letter::new(g, false))).collect();
        let names = p.alphabet().letters().map(|l| p.alphabet().letter_name(l)).collect();
        Self::build_inner(p, gens, names, radius, cap)
    }

    /// The ball for a different generating set, given as words in `p`.
    pub fn build_with_generators(p: &Presentation, generators: Vec<Word>, radius: usize, cap: usize) -> Result<Self, CayleyError> {
        let names = generators
            .iter()
            .flat_map(|g| {
                let s = p.word_string(g);
                [format!("({s})"), format!("({s})-")]
            })
            .collect();
        Self::build_inner(p, generators, names, radius, cap)
    }

    fn build_inner(p: &Presentation, generators: Vec<Word>, step_names: Vec<String>, radius: usize, cap: usize) -> Result<Self, CayleyError> {
        for g in &generators {
            p.check_word(g)?;
        }
        p.normal_form(&Word::empty())?;
        let steps: Vec<Word> = generators
            .iter()
            .flat_map(|g| [g.clone(), g.inverse()])
            .map(|g| p.normal_form(&g))
            .collect::<Result<_, _>>()?;
        let k = steps.len();
        let identity = Word::empty();
        let mut words = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0u32)]);
        let mut dist0 = vec![0u32];
        let mut parent_step = vec![u16::MAX];
        let mut neighbors: Vec<u32> = Vec::new();
        let mut layer_start = vec![0usize, 1];
        for layer in 0..=radius {
            let (start, end) = (layer_start[layer], layer_start[layer + 1]);
            let mut v = start;
            while v < end {
                let chunk_end = (v + CHUNK).min(end);
                let products: Vec<Result<Vec<Word>, GroupError>> = (v..chunk_end)
                    .into_par_iter()
                    .map(|u| steps.iter().map(|s| p.multiply(&words[u], s)).collect())
                    .collect();
                for (offset, row) in products.into_iter().enumerate() {
                    for (s, w) in row?.into_iter().enumerate() {
                        let id = match index.get(&w) {
                            Some(&id) => id,
                            None if layer < radius => {
                                if words.len() >= cap {
                                    return Err(CayleyError::BallTooLarge { cap });
                                }
                                let id = words.len() as u32;
                                index.insert(w.clone(), id);
                                words.push(w);
                                dist0.push(layer as u32 + 1);
                                parent_step.push(s as u16);
                                id
                            }
                            None => INF,
                        };
                        debug_assert_eq!(neighbors.len(), (v + offset) * k + s);
                        neighbors.push(id);
                    }
                }
                v = chunk_end;
            }
            if layer < radius {
                layer_start.push(words.len());
            }
        }
        Ok(CayleyBall {
            presentation: p.clone(),
            radius,
            steps,
            step_names,
            words,
            index,
            neighbors,
            dist0,
            parent_step,
            layer_start,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of step letters (generators and inverses).
    pub fn degree(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, s: usize) -> &Word {
        &self.steps[s]
    }

    pub fn step_name(&self, s: usize) -> &str {
        &self.step_names[s]
    }

    /// Normal form of vertex `v`.
    pub fn word(&self, v: usize) -> &Word {
        &self.words[v]
    }

    pub fn word_string(&self, v: usize) -> String {
        self.presentation.word_string(&self.words[v])
    }

    pub fn dist0(&self, v: usize) -> u32 {
        self.dist0[v]
    }

    pub fn distances(&self) -> &[u32] {
        &self.dist0
    }

    /// Vertices at distance exactly `n` from the identity.
    pub fn layer(&self, n: usize) -> std::ops::Range<usize> {
        if n > self.radius {
            return self.len()..self.len();
        }
        let end = self.layer_start.get(n + 1).copied().unwrap_or(self.len());
        self.layer_start[n]..end
    }

    pub fn neighbor(&self, v: usize, step: usize) -> Option<usize> {
        let id = self.neighbors[v * self.steps.len() + step];
        (id != INF).then_some(id as usize)
    }

    pub fn neighbor_row(&self, v: usize) -> &[u32] {
        let k = self.steps.len();
        &self.neighbors[v * k..(v + 1) * k]
    }

    /// Vertex of the element `w`, if it lies in the ball.
    pub fn find(&self, w: &Word) -> Result<Option<usize>, GroupError> {
        let nf = self.presentation.normal_form(w)?;
        Ok(self.index.get(&nf).map(|&v| v as usize))
    }

    pub fn find_str(&self, text: &str) -> Result<Option<usize>, GroupError> {
        let w = self.presentation.parse_word(text)?;
        self.find(&w)
    }

    /// Like [`find`](Self::find) but an error when outside the ball.
    pub fn vertex(&self, w: &Word) -> Result<usize, CayleyError> {
        self.find(w)?
            .ok_or_else(|| CayleyError::ElementOutsideBall(self.presentation.word_string(w)))
    }

    pub fn vertex_str(&self, text: &str) -> Result<usize, CayleyError> {
        let w = self.presentation.parse_word(text).map_err(GroupError::from)?;
        self.vertex(&w)
    }

    pub(crate) fn lookup_nf(&self, nf: &Word) -> Option<usize> {
        self.index.get(nf).map(|&v| v as usize)
    }

    /// The shortlex-least geodesic step word from the identity to `v`.
    pub fn geodesic_steps(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dist0[v] as usize);
        let mut x = v;
        while x != 0 {
            let s = self.parent_step[x] as usize;
            out.push(s);
            x = self.neighbor(x, s ^ 1).expect("parent inside the ball");
        }
        out.reverse();
        out
    }

    /// Vertex path of [`geodesic_steps`](Self::geodesic_steps).
    pub fn geodesic_from_identity(&self, v: usize) -> Vec<usize> {
        let mut path = vec![0];
        let mut x = 0;
        for s in self.geodesic_steps(v) {
            x = self.neighbor(x, s).expect("geodesic inside the ball");
            path.push(x);
        }
        path
    }

    /// `u · v` as a vertex, when the product lies in the ball.
    pub fn product(&self, u: usize, v: usize) -> Result<Option<usize>, GroupError> {
        let nf = self.presentation.multiply(&self.words[u], &self.words[v])?;
        Ok(self.lookup_nf(&nf))
    }

    /// `g · v` for an arbitrary word `g`.
    pub fn left_multiply(&self, g: &Word, v: usize) -> Result<Option<usize>, GroupError> {
        let nf = self.presentation.multiply(g, &self.words[v])?;
        Ok(self.lookup_nf(&nf))
    }

    pub fn inverse(&self, v: usize) -> Option<usize> {
        let nf = self.presentation.invert(&self.words[v]).ok()?;
        self.lookup_nf(&nf)
    }

    /// Word-metric distance `|u⁻¹v|` if it is at most `R`, else `None`.
    /// Always exact: every element of length `≤ R` is in the ball.
    pub fn group_distance(&self, u: usize, v: usize) -> Option<u32> {
        let nf = self.presentation.multiply(&self.words[u].inverse(), &self.words[v]).ok()?;
        self.lookup_nf(&nf).map(|w| self.dist0[w])
    }

    /// Graph distance in the ball; certified only when
    /// `dist0(u) + dist0(v) ≤ R`, otherwise [`CayleyError::Truncated`].
    pub fn word_distance(&self, u: usize, v: usize) -> Result<u32, CayleyError> {
        for x in [u, v] {
            if x >= self.len() {
                return Err(CayleyError::VertexOutOfRange(x));
            }
        }
        if (self.dist0[u] + self.dist0[v]) as usize > self.radius {
            return Err(CayleyError::Truncated { u, v });
        }
        self.group_distance(u, v).ok_or(CayleyError::Truncated { u, v })
    }

    /// Edges `(u, v, s)` with `v = u·s`, for generator steps `s` only
    /// (inverse steps give the same edges reversed).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.steps.len();
        (0..self.len()).flat_map(move |u| {
            (0..k)
                .step_by(2)
                .filter_map(move |s| self.neighbor(u, s).map(|v| (u, v, s)))
        })
    }

    /// Vertices with `dist0 ≤ r`.
    pub fn sub_ball(&self, r: usize) -> std::ops::Range<usize> {
        0..self.layer(r.min(self.radius)).end
    }
}

impl Graph for CayleyBall {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn for_each_neighbor(&self, v: usize, f: &mut dyn FnMut(usize)) {
        for &w in self.neighbor_row(v) {
            if w != INF {
                f(w as usize);
            }
        }
    }
}

impl GroupAction for CayleyBall {
    fn point_count(&self) -> usize {
        self.len()
    }

    fn act(&self, g: &Word, point: usize) -> Option<usize> {
        self.left_multiply(g, point).ok().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_balls() {
        let f2 = Presentation::free(2);
        assert_eq!(CayleyBall::build(&f2, 2).unwrap().len(), 17);
        let z2 = Presentation::free_abelian(2);
        assert_eq!(CayleyBall::build(&z2, 3).unwrap().len(), 25);
        assert_eq!(CayleyBall::build(&Presentation::heisenberg(), 0).unwrap().len(), 1);
    }

    #[test]
    fn shortlex_numbering() {
        let f2 = Presentation::free(2);
        let b = CayleyBall::build(&f2, 2).unwrap();
        let names: Vec<String> = (0..b.len()).map(|v| b.word_string(v)).collect();
        assert_eq!(&names[..5], &["1", "a", "a-", "b", "b-"]);
        assert_eq!(&names[5..9], &["aa", "ab", "ab-", "a-a-"]);
    }

    #[test]
    fn distances() {
        let z2 = Presentation::free_abelian(2);
        let b = CayleyBall::build(&z2, 4).unwrap();
        let (x, y) = (b.vertex_str("x").unwrap(), b.vertex_str("y").unwrap());
        assert_eq!(b.word_distance(0, 0).unwrap(), 0);
        assert_eq!(b.word_distance(x, y).unwrap(), 2);
        let far = b.vertex_str("x^3").unwrap();
        let far2 = b.vertex_str("y^-2").unwrap();
        assert!(matches!(b.word_distance(far, far2), Err(CayleyError::Truncated { .. })));
        let f2 = Presentation::free(2);
        let t = CayleyBall::build(&f2, 3).unwrap();
        assert_eq!(t.word_distance(t.vertex_str("a").unwrap(), t.vertex_str("b").unwrap()).unwrap(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let f2 = Presentation::free(2);
        assert_eq!(CayleyBall::build_with_cap(&f2, 5, 100).unwrap_err(), CayleyError::BallTooLarge { cap: 100 });
    }

    #[test]
    fn geodesics_follow_parent_steps() {
        let h = Presentation::heisenberg();
        let b = CayleyBall::build(&h, 4).unwrap();
        for v in 0..b.len() {
            let path = b.geodesic_from_identity(v);
            assert_eq!(path.len() as u32, b.dist0(v) + 1);
            assert_eq!(*path.last().unwrap(), v);
        }
    }
}
