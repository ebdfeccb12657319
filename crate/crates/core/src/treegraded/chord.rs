//! Cutting a loop into shorter loops by geodesic chords to a hub.

use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::TreeGradedError;
use crate::graph::Graph;
use crate::hyperbolicity::bfs_geodesic;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChordDivision {
    pub length: usize,
    pub parts: usize,
    /// Closed vertex paths, one per arc between consecutive marks.
    pub loops: Vec<Vec<usize>>,
    pub max_length: usize,
    /// Every sub-loop has length at most half the original.
    pub halved: bool,
}

/// Places `parts` marks at arc-distance `ℓ/parts` along `lp` (closed) and
/// joins each mark to `lp[0]` by a breadth-first geodesic.
pub fn chord_division(b: &CayleyBall, lp: &[usize], parts: usize) -> Result<ChordDivision, TreeGradedError> {
    if lp.len() < 2 || lp[0] != *lp.last().unwrap() {
        return Err(TreeGradedError::InvalidLoop("the loop must start and end at the same vertex".into()));
    }
    if let Some(&v) = lp.iter().find(|&&v| v >= b.len()) {
        return Err(TreeGradedError::InvalidLoop(format!("vertex {v} is not in the ball")));
    }
    for (i, w) in lp.windows(2).enumerate() {
        if !b.adjacent(w[0], w[1]) {
            return Err(TreeGradedError::InvalidLoop(format!("steps {i} and {} are not adjacent", i + 1)));
        }
    }
    let length = lp.len() - 1;
    if parts == 0 || length < parts {
        return Err(TreeGradedError::LoopTooShort { length, parts });
    }
    if let Some(&v) = lp.iter().find(|&&v| 2 * b.dist0(v) as usize > b.radius()) {
        return Err(TreeGradedError::LeavesCertifiedRegion(v));
    }
    let loops: Vec<Vec<usize>> = if parts == 1 {
        vec![lp.to_vec()]
    } else {
        let hub = lp[0];
        let marks: Vec<usize> = (0..=parts).map(|k| ((k * length) as f64 / parts as f64).round() as usize).collect();
        let chord = |i: usize| bfs_geodesic(b, hub, lp[i]).expect("ball is connected");
        marks
            .windows(2)
            .map(|m| {
                let mut l = chord(m[0]);
                l.extend_from_slice(&lp[m[0] + 1..=m[1]]);
                let back = chord(m[1]);
                l.extend(back.iter().rev().skip(1));
                l
            })
            .collect()
    };
    let max_length = loops.iter().map(|l| l.len() - 1).max().unwrap();
    Ok(ChordDivision {
        length,
        parts,
        loops,
        max_length,
        halved: 2 * max_length <= length,
    })
}
