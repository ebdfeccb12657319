//! Quasi-isometry constants for explicit maps between finite metric samples.

mod action;
mod record;
mod tree;

pub use action::{quasi_action_probe, PartialMap, QuasiActionReport};
pub use record::{resolve_sample, MapRecord, MAP_SCHEMA};
pub use tree::{build_tree_qi, tree_ball, TreeQi};

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::QiError;
use crate::graph::{bfs, BfsLimits, Graph, INF};

/// A finite metric space with integer distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSample {
    id: String,
    n: usize,
    dist: Vec<u32>,
}

impl FiniteMetricSample {
    /// Validates zero diagonal, symmetry and the triangle inequality.
    pub fn from_matrix(id: impl Into<String>, rows: Vec<Vec<u32>>) -> Result<Self, QiError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(QiError::InvalidMetric("matrix is not square".into()));
        }
        let dist: Vec<u32> = rows.into_iter().flatten().collect();
        let s = FiniteMetricSample { id: id.into(), n, dist };
        for i in 0..n {
            if s.d(i, i) != 0 {
                return Err(QiError::InvalidMetric(format!("d({i},{i}) ≠ 0")));
            }
            for j in 0..n {
                if s.d(i, j) != s.d(j, i) {
                    return Err(QiError::InvalidMetric(format!("d({i},{j}) ≠ d({j},{i})")));
                }
                if i != j && s.d(i, j) == 0 {
                    return Err(QiError::InvalidMetric(format!("d({i},{j}) = 0")));
                }
            }
        }
        let bad = (0..n).into_par_iter().find_map_any(|i| {
            for j in 0..n {
                for k in 0..n {
                    if s.d(i, k) as u64 > s.d(i, j) as u64 + s.d(j, k) as u64 {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        if let Some((i, j, k)) = bad {
            return Err(QiError::InvalidMetric(format!("triangle inequality fails at ({i},{j},{k})")));
        }
        Ok(s)
    }

    /// Path metric of a connected graph.
    pub fn from_graph<G: Graph + ?Sized>(id: impl Into<String>, g: &G) -> Result<Self, QiError> {
        let n = g.vertex_count();
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|v| bfs(g, &[v], BfsLimits::default()).dist).collect();
        if rows.iter().any(|r| r.contains(&INF)) {
            return Err(QiError::InvalidMetric("graph is disconnected".into()));
        }
        Ok(FiniteMetricSample {
            id: id.into(),
            n,
            dist: rows.into_iter().flatten().collect(),
        })
    }

    /// The sub-metric on `points`, renumbered in the given order.
    pub fn restrict(&self, id: impl Into<String>, points: &[usize]) -> Self {
        let n = points.len();
        let mut dist = Vec::with_capacity(n * n);
        for &i in points {
            for &j in points {
                dist.push(self.d(i, j));
            }
        }
        FiniteMetricSample { id: id.into(), n, dist }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.n + j]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// A total map between two samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSample {
    pub domain: FiniteMetricSample,
    pub range: FiniteMetricSample,
    pub assignment: Vec<usize>,
}

impl MapSample {
    pub fn new(domain: FiniteMetricSample, range: FiniteMetricSample, assignment: Vec<usize>) -> Result<Self, QiError> {
        if assignment.len() != domain.len() {
            return Err(QiError::InvalidMap(format!(
                "{} assignments for {} domain points",
                assignment.len(),
                domain.len()
            )));
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= range.len()) {
            return Err(QiError::InvalidMap(format!("target {y} is outside the range")));
        }
        Ok(MapSample { domain, range, assignment })
    }

    pub fn identity(x: FiniteMetricSample) -> Self {
        let assignment = (0..x.len()).collect();
        MapSample {
            domain: x.clone(),
            range: x,
            assignment,
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MapSample) -> Result<MapSample, QiError> {
        if other.domain != self.range {
            return Err(QiError::InvalidMap("composition of mismatched samples".into()));
        }
        MapSample::new(
            self.domain.clone(),
            other.range.clone(),
            self.assignment.iter().map(|&y| other.assignment[y]).collect(),
        )
    }

    /// Largest distance from a range point to the image.
    pub fn coverage(&self) -> u32 {
        let image: BTreeSet<usize> = self.assignment.iter().copied().collect();
        (0..self.range.len())
            .into_par_iter()
            .map(|y| image.iter().map(|&z| self.range.d(y, z)).min().unwrap_or(INF))
            .max()
            .unwrap_or(0)
    }

    /// Distinct `(d_X, d_Y)` pairs over all point pairs.
    fn distance_pairs(&self) -> Vec<(u32, u32)> {
        let n = self.domain.len();
        let set: BTreeSet<(u32, u32)> = (0..n)
            .into_par_iter()
            .fold(BTreeSet::new, |mut acc, i| {
                for j in i + 1..n {
                    acc.insert((self.domain.d(i, j), self.range.d(self.assignment[i], self.assignment[j])));
                }
                acc
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        set.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub x1: usize,
    pub x2: usize,
    pub dx: u32,
    pub dy: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QiConstants {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub coverage: u32,
    /// Pairs at which the additive constant is attained.
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum QiFit {
    Fitted(QiConstants),
    NotEmbedding { l_max: f64, best_c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub l_max: f64,
    /// The largest additive constant accepted as "bounded".
    pub c_budget: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { l_max: 64.0, c_budget: 1.0 }
    }
}

const GRID_STEP: f64 = 0.25;
const REFINE: f64 = 1e-3;

/// Smallest additive constant making `(L, C)` satisfy
/// `d_X/L − C ≤ d_Y ≤ L·d_X + C` on all pairs.
fn min_c(pairs: &[(u32, u32)], l: f64) -> f64 {
    pairs
        .iter()
        .map(|&(dx, dy)| {
            let (dx, dy) = (dx as f64, dy as f64);
            (dx / l - dy).max(dy - l * dx)
        })
        .fold(0.0, f64::max)
}

/// Fits the canonical pair: the least `L` on the grid `1, 1.25, 1.5, …`
/// (refined by bisection to `10⁻³`) whose minimal `C(L)` is within the
/// budget and below `diam(X)/L`, the size a collapsing map would need.
pub fn fit_qi_constants(m: &MapSample) -> Result<QiFit, QiError> {
    fit_qi_constants_with(m, FitOptions::default())
}

pub fn fit_qi_constants_with(m: &MapSample, opts: FitOptions) -> Result<QiFit, QiError> {
    if m.domain.len() < 2 {
        return Err(QiError::DegenerateDomain);
    }
    let pairs = m.distance_pairs();
    let diam = m.domain.diameter() as f64;
    let ok = |l: f64| {
        let c = min_c(&pairs, l);
        c <= opts.c_budget + 1e-12 && c < diam / l
    };
    let mut l = 1.0;
    while l <= opts.l_max + 1e-12 && !ok(l) {
        l += GRID_STEP;
    }
    if l > opts.l_max + 1e-12 {
        return Ok(QiFit::NotEmbedding {
            l_max: opts.l_max,
            best_c: min_c(&pairs, opts.l_max),
        });
    }
    if l > 1.0 {
        let (mut lo, mut hi) = (l - GRID_STEP, l);
        while hi - lo > REFINE {
            let mid = (lo + hi) / 2.0;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // Snap to the 10⁻³ lattice, keeping the condition satisfied.
        let snapped = (hi / REFINE).ceil() * REFINE;
        l = if ok(snapped) { snapped } else { hi };
    }
    let c = min_c(&pairs, l);
    let n = m.domain.len();
    let mut witnesses = Vec::new();
    if c > 0.0 {
        'outer: for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (m.domain.d(i, j), m.range.d(m.assignment[i], m.assignment[j]));
                let need = (dx as f64 / l - dy as f64).max(dy as f64 - l * dx as f64);
                if (need - c).abs() < 1e-9 {
                    witnesses.push(Witness { x1: i, x2: j, dx, dy });
                    if witnesses.len() == 8 {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(QiFit::Fitted(QiConstants {
        l,
        c,
        coverage: m.coverage(),
        witnesses,
    }))
}

/// Whether `(L, C)` satisfies the two-sided inequality on every pair.
pub fn satisfies(m: &MapSample, l: f64, c: f64) -> bool {
    min_c(&m.distance_pairs(), l) <= c + 1e-12
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiConverse {
    pub map: MapSample,
    /// Largest displacement of `q̄∘q` on the domain and `q∘q̄` on the range.
    pub bound: u32,
    pub domain_displacement: u32,
    pub range_displacement: u32,
}

/// Sends each range point to a preimage of its nearest image point (lowest
/// index on ties, for both choices).
pub fn quasi_converse(m: &MapSample, coverage_bound: Option<f64>) -> Result<QuasiConverse, QiError> {
    let coverage = m.coverage();
    if let Some(bound) = coverage_bound {
        if coverage as f64 > bound {
            return Err(QiError::NotQuasiIsometry {
                coverage: coverage as f64,
                bound,
            });
        }
    }
    let mut preimage = vec![usize::MAX; m.range.len()];
    for (x, &y) in m.assignment.iter().enumerate().rev() {
        preimage[y] = x;
    }
    let image: Vec<usize> = (0..m.range.len()).filter(|&y| preimage[y] != usize::MAX).collect();
    let back: Vec<usize> = (0..m.range.len())
        .into_par_iter()
        .map(|y| {
            let z = *image.iter().min_by_key(|&&z| (m.range.d(y, z), z)).expect("nonempty image");
            preimage[z]
        })
        .collect();
    let map = MapSample::new(m.range.clone(), m.domain.clone(), back)?;
    let domain_displacement = (0..m.domain.len())
        .map(|x| m.domain.d(x, map.assignment[m.assignment[x]]))
        .max()
        .unwrap_or(0);
    let range_displacement = (0..m.range.len())
        .map(|y| m.range.d(y, m.assignment[map.assignment[y]]))
        .max()
        .unwrap_or(0);
    Ok(QuasiConverse {
        map,
        bound: domain_displacement.max(range_displacement),
        domain_displacement,
        range_displacement,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetReport {
    pub separated: bool,
    pub covering: bool,
    /// A pair of net points closer than `δ`.
    pub separation_witness: Option<(usize, usize, u32)>,
    /// A point farther than `ε` from the net.
    pub covering_witness: Option<(usize, u32)>,
}

impl NetReport {
    pub fn passed(&self) -> bool {
        self.separated && self.covering
    }
}

/// `N` is `δ`-separated when distinct net points are at distance `≥ δ`,
/// and `ε`-covering when every point is within `ε` of `N`.
pub fn check_net(x: &FiniteMetricSample, net: &[usize], delta: f64, epsilon: f64) -> NetReport {
    let mut separation_witness = None;
    'outer: for (a, &i) in net.iter().enumerate() {
        for &j in &net[a + 1..] {
            if i != j && (x.d(i, j) as f64) < delta {
                separation_witness = Some((i, j, x.d(i, j)));
                break 'outer;
            }
        }
    }
    let covering_witness = (0..x.len())
        .map(|p| (p, net.iter().map(|&q| x.d(p, q)).min().unwrap_or(INF)))
        .find(|&(_, d)| d as f64 > epsilon);
    NetReport {
        separated: separation_witness.is_none(),
        covering: covering_witness.is_none(),
        separation_witness,
        covering_witness,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hausdorff {
    Finite(u32),
    /// Some point of one set cannot reach the other.
    Infinite,
}

pub fn hausdorff_distance(a: &[usize], b: &[usize], x: &FiniteMetricSample) -> Result<Hausdorff, QiError> {
    if a.is_empty() || b.is_empty() {
        return Err(QiError::InvalidMap("Hausdorff distance of an empty set".into()));
    }
    let one_way = |s: &[usize], t: &[usize]| s.iter().map(|&p| t.iter().map(|&q| x.d(p, q)).min().unwrap()).max().unwrap();
    let h = one_way(a, b).max(one_way(b, a));
    Ok(if h == INF { Hausdorff::Infinite } else { Hausdorff::Finite(h) })
}
