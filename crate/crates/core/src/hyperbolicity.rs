//! Thin-triangle estimates, an empirical Morse-lemma check and a
//! divergence proxy for cut-points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{CayleyError, HyperbolicityError};
use crate::graph::{bfs, Bfs, BfsLimits, Graph, INF};
use crate::group::Presentation;

/// A finite ball about the identity, as a graph.
pub trait MetricBall: Graph {
    fn radius(&self) -> usize;
    /// Word-metric distance from the identity (not the graph's own metric
    /// when the graph has extra edges).
    fn word_dist0(&self, v: usize) -> u32;
    fn label(&self, v: usize) -> String;
}

impl MetricBall for CayleyBall {
    fn radius(&self) -> usize {
        CayleyBall::radius(self)
    }

    fn word_dist0(&self, v: usize) -> u32 {
        self.dist0(v)
    }

    fn label(&self, v: usize) -> String {
        self.word_string(v)
    }
}

/// The first geodesic found by breadth-first search from `u`.
pub fn bfs_geodesic<B: MetricBall + ?Sized>(b: &B, u: usize, v: usize) -> Option<Vec<usize>> {
    bfs(
        b,
        &[u],
        BfsLimits {
            targets: Some(&[v]),
            ..BfsLimits::default()
        },
    )
    .path_to(v)
}

fn distance_to_set<B: MetricBall + ?Sized>(b: &B, set: &[usize], targets: &[usize]) -> Bfs {
    bfs(
        b,
        set,
        BfsLimits {
            targets: Some(targets),
            ..BfsLimits::default()
        },
    )
}

/// Largest distance from a point of one side to the union of the other two.
pub fn triangle_defect<B: MetricBall + ?Sized>(b: &B, x: usize, y: usize, z: usize) -> Option<u32> {
    let sides = [bfs_geodesic(b, x, y)?, bfs_geodesic(b, y, z)?, bfs_geodesic(b, z, x)?];
    let mut defect = 0;
    for i in 0..3 {
        let others: Vec<usize> = sides[(i + 1) % 3].iter().chain(&sides[(i + 2) % 3]).copied().collect();
        let r = distance_to_set(b, &others, &sides[i]);
        for &p in &sides[i] {
            if r.dist[p] == INF {
                return None;
            }
            defect = defect.max(r.dist[p]);
        }
    }
    Some(defect)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub delta_thin: u32,
    pub sample_size: usize,
    pub radius: usize,
    pub seed: u64,
    /// A triangle attaining the maximum, as vertex labels.
    pub worst: Option<[String; 3]>,
}

/// Samples `samples` triangles with vertices drawn uniformly from the
/// word-metric ball `B(R/2)` and returns the largest thinness defect.
pub fn estimate_delta<B: MetricBall + ?Sized>(b: &B, samples: usize, seed: u64) -> Result<HyperbolicityReport, HyperbolicityError> {
    let radius = b.radius();
    if radius < 4 {
        return Err(HyperbolicityError::RadiusTooSmall(format!("thin-triangle sampling needs R ≥ 4, got {radius}")));
    }
    let region: Vec<usize> = (0..b.vertex_count()).filter(|&v| 2 * b.word_dist0(v) as usize <= radius).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[usize; 3]> = (0..samples)
        .map(|_| std::array::from_fn(|_| region[rng.random_range(0..region.len())]))
        .collect();
    let defects: Vec<u32> = triples
        .par_iter()
        .map(|t| triangle_defect(b, t[0], t[1], t[2]).unwrap_or(0))
        .collect();
    let (delta, worst) = match defects.iter().enumerate().max_by_key(|&(i, &d)| (d, std::cmp::Reverse(i))) {
        Some((i, &d)) => (d, Some(triples[i].map(|v| b.label(v)))),
        None => (0, None),
    };
    Ok(HyperbolicityReport {
        delta_thin: delta,
        sample_size: samples,
        radius,
        seed,
        worst,
    })
}

/// `estimate_delta` over a sweep of radii, building each ball.
pub fn delta_sweep(p: &Presentation, radii: &[usize], samples: usize, seed: u64) -> Result<Vec<HyperbolicityReport>, HyperbolicityError> {
    radii
        .iter()
        .map(|&r| {
            let b = CayleyBall::build(p, r)?;
            estimate_delta(&b, samples, seed)
        })
        .collect()
}

pub fn sweep_to_csv(reports: &[HyperbolicityReport]) -> String {
    let mut out = String::from("radius,delta_thin,samples\n");
    for r in reports {
        out.push_str(&format!("{},{},{}\n", r.radius, r.delta_thin, r.sample_size));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorseReport {
    /// Hausdorff distance between the path and the breadth-first geodesic.
    pub hausdorff: u32,
    /// Minimum over all geodesics, when there are at most `GEODESIC_CAP`.
    pub hausdorff_min: Option<u32>,
    /// Number of geodesics between the endpoints (saturating).
    pub geodesics: u64,
    pub geodesic: Vec<usize>,
}

pub const GEODESIC_CAP: u64 = 10_000;

/// Checks that `path` is an `(L, C)`-quasi-geodesic for its index
/// parametrization, then measures how far it strays from geodesics.
pub fn morse_check<B: MetricBall + ?Sized>(b: &B, path: &[usize], l: f64, c: f64) -> Result<MorseReport, HyperbolicityError> {
    let n = b.vertex_count();
    if path.is_empty() {
        return Err(HyperbolicityError::InvalidPath("empty path".into()));
    }
    if let Some(&v) = path.iter().find(|&&v| v >= n) {
        return Err(HyperbolicityError::InvalidPath(format!("vertex {v} is not in the ball")));
    }
    for (i, w) in path.windows(2).enumerate() {
        if w[0] != w[1] && !b.adjacent(w[0], w[1]) {
            return Err(HyperbolicityError::InvalidPath(format!("steps {i} and {} are not adjacent", i + 1)));
        }
    }
    let (start, end) = (path[0], *path.last().unwrap());
    for v in [start, end] {
        if 2 * b.word_dist0(v) as usize > b.radius() {
            return Err(HyperbolicityError::InvalidPath(format!("endpoint {} lies outside B(R/2)", b.label(v))));
        }
    }
    let from_path: Vec<Vec<u32>> = path.par_iter().map(|&p| bfs(b, &[p], BfsLimits::default()).dist).collect();
    for (i, row) in from_path.iter().enumerate() {
        for j in i + 1..path.len() {
            let t = (j - i) as f64;
            let d = row[path[j]] as f64;
            if d < t / l - c - 1e-9 || d > l * t + c + 1e-9 {
                return Err(HyperbolicityError::NotQuasiGeodesic { i, j });
            }
        }
    }
    let to_path: Vec<u32> = (0..n).map(|v| from_path.iter().map(|d| d[v]).min().unwrap()).collect();
    let hausdorff_to = |geo: &[usize]| -> u32 {
        let a = geo.iter().map(|&v| to_path[v]).max().unwrap_or(0);
        let b = from_path.iter().map(|d| geo.iter().map(|&v| d[v]).min().unwrap()).max().unwrap_or(0);
        a.max(b)
    };
    let geodesic = bfs_geodesic(b, start, end).ok_or_else(|| HyperbolicityError::InvalidPath("endpoints are disconnected".into()))?;
    let hausdorff = hausdorff_to(&geodesic);

    // Geodesic DAG: vertices on some shortest start–end path.
    let ds = &bfs(b, &[start], BfsLimits::default()).dist;
    let de = &bfs(b, &[end], BfsLimits::default()).dist;
    let total = ds[end];
    let mut layers: Vec<Vec<usize>> = vec![Vec::new(); total as usize + 1];
    for v in 0..n {
        if ds[v] != INF && de[v] != INF && ds[v] + de[v] == total {
            layers[ds[v] as usize].push(v);
        }
    }
    let mut count = vec![0u64; n];
    count[start] = 1;
    for layer in layers.iter().skip(1) {
        for &v in layer {
            let mut c = 0u64;
            for w in b.neighbors(v) {
                if ds[w] != INF && ds[w] + 1 == ds[v] && de[w] != INF && ds[w] + de[w] == total {
                    c = c.saturating_add(count[w]);
                }
            }
            count[v] = c;
        }
    }
    let geodesics = count[end];
    let hausdorff_min = (geodesics <= GEODESIC_CAP).then(|| {
        let mut best = u32::MAX;
        let mut stack = vec![end];
        enumerate_geodesics(b, ds, de, total, &mut stack, start, &mut |geo| best = best.min(hausdorff_to(geo)));
        best
    });
    Ok(MorseReport {
        hausdorff,
        hausdorff_min,
        geodesics,
        geodesic,
    })
}

fn enumerate_geodesics<B: MetricBall + ?Sized>(b: &B, ds: &[u32], de: &[u32], total: u32, stack: &mut Vec<usize>, start: usize, f: &mut dyn FnMut(&[usize])) {
    let v = *stack.last().unwrap();
    if v == start {
        let geo: Vec<usize> = stack.iter().rev().copied().collect();
        f(&geo);
        return;
    }
    for w in b.neighbors(v) {
        if ds[w] != INF && ds[w] + 1 == ds[v] && de[w] != INF && ds[w] + de[w] == total {
            stack.push(w);
            enumerate_geodesics(b, ds, de, total, stack, start, f);
            stack.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceEntry {
    pub r: usize,
    /// Mean detour length over the pairs, `None` when some pair is cut off.
    pub div: Option<f64>,
    pub infinite: bool,
    pub pairs: usize,
    pub max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceProfile {
    pub radius: usize,
    pub entries: Vec<DivergenceEntry>,
}

impl DivergenceProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,div,flag\n");
        for e in &self.entries {
            let div = e.div.map_or("inf".to_string(), |d| format!("{d:.4}"));
            let flag = if e.infinite { "infinite" } else { "finite" };
            out.push_str(&format!("{},{div},{flag}\n", e.r));
        }
        out
    }
}

pub const DIVERGENCE_PAIR_CAP: usize = 64;

/// For each `r`, pairs `x, y ∈ S(r)` with `d(x, y) = 2r` (so the identity is
/// a midpoint) are joined by a shortest path avoiding the open ball of
/// radius `r/2` about the identity.
pub fn divergence_profile(b: &CayleyBall, r_values: &[usize], pair_cap: usize) -> Result<DivergenceProfile, HyperbolicityError> {
    let radius = b.radius();
    if let Some(&r) = r_values.iter().find(|&&r| r < 2) {
        return Err(HyperbolicityError::RadiusTooSmall(format!("divergence needs r ≥ 2, got {r}")));
    }
    if let Some(&r) = r_values.iter().find(|&&r| 2 * r > radius) {
        return Err(HyperbolicityError::RadiusTooSmall(format!("r = {r} needs a ball of radius ≥ {}, got {radius}", 2 * r)));
    }
    let mut entries = Vec::new();
    for &r in r_values {
        let sphere: Vec<usize> = b.layer(r).collect();
        let stride = sphere.len().div_ceil(pair_cap.max(1)).max(1);
        let mut pairs = Vec::new();
        for &x in sphere.iter().step_by(stride) {
            let antipode = b
                .inverse(x)
                .filter(|&y| b.group_distance(x, y) == Some(2 * r as u32))
                .or_else(|| sphere.iter().copied().find(|&y| b.group_distance(x, y) == Some(2 * r as u32)));
            if let Some(y) = antipode {
                pairs.push((x, y));
            }
        }
        let blocked: Vec<bool> = (0..b.len()).map(|v| 2 * (b.dist0(v) as usize) < r).collect();
        let lengths: Vec<Option<u32>> = pairs
            .par_iter()
            .map(|&(x, y)| crate::graph::distance(b, x, y, Some(&blocked)))
            .collect();
        let infinite = lengths.iter().any(|l| l.is_none());
        let finite: Vec<u32> = lengths.iter().flatten().copied().collect();
        entries.push(DivergenceEntry {
            r,
            div: (!infinite && !finite.is_empty()).then(|| finite.iter().map(|&l| l as f64).sum::<f64>() / finite.len() as f64),
            infinite,
            pairs: pairs.len(),
            max: finite.iter().copied().max(),
        });
    }
    Ok(DivergenceProfile { radius, entries })
}

impl From<crate::error::GroupError> for HyperbolicityError {
    fn from(e: crate::error::GroupError) -> Self {
        HyperbolicityError::Cayley(CayleyError::Group(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_triangle() {
        let b = CayleyBall::build(&Presentation::free_abelian(2), 4).unwrap();
        assert_eq!(triangle_defect(&b, 3, 3, 3), Some(0));
    }

    #[test]
    fn lattice_triangle_defect() {
        // The L-shaped geodesics of the triangle (−2,−2), (2,0), (0,2).
        let b = CayleyBall::build(&Presentation::free_abelian(2), 8).unwrap();
        let v = |s: &str| b.vertex_str(s).unwrap();
        assert_eq!(triangle_defect(&b, v("x-x-y-y-"), v("xx"), v("yy")), Some(2));
    }

    #[test]
    fn small_radius_rejected() {
        let b = CayleyBall::build(&Presentation::free(2), 3).unwrap();
        assert!(matches!(estimate_delta(&b, 4, 1), Err(HyperbolicityError::RadiusTooSmall(_))));
        let big = CayleyBall::build(&Presentation::free(2), 6).unwrap();
        assert!(divergence_profile(&big, &[0], 4).is_err());
        assert!(divergence_profile(&big, &[4], 4).is_err());
    }

    #[test]
    fn tree_has_zero_defect() {
        let b = CayleyBall::build(&Presentation::free(2), 6).unwrap();
        assert_eq!(estimate_delta(&b, 200, 3).unwrap().delta_thin, 0);
    }

    #[test]
    fn geodesic_is_its_own_morse_bound() {
        let b = CayleyBall::build(&Presentation::free_abelian(2), 8).unwrap();
        let target = b.vertex_str("xxyy").unwrap();
        let path = b.geodesic_from_identity(target);
        let r = morse_check(&b, &path, 1.0, 0.0).unwrap();
        assert_eq!(r.hausdorff, 0);
        assert_eq!(r.hausdorff_min, Some(0));
        assert_eq!(r.geodesics, 6);
    }
}
