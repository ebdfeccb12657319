use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::PingPongError;
use crate::word::Word;

/// A partial left action of the group on a finite point set.
pub trait GroupAction {
    fn point_count(&self) -> usize;
    /// Image of `point` under `g`, or `None` when it leaves the finite set.
    fn act(&self, g: &Word, point: usize) -> Option<usize>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct PingPongCertificate {
    pub g: Word,
    pub h: Word,
    pub g_plus: Vec<usize>,
    pub g_minus: Vec<usize>,
    pub h_plus: Vec<usize>,
    pub h_minus: Vec<usize>,
    /// Reduced words in `g, h` up to this length are checked for relations.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PingPongFailure {
    SetsOverlap { point: usize },
    /// A reduced word in `g, h` (letters `g`, `G = g⁻¹`, `h`, `H = h⁻¹`)
    /// fixes every probe on which it is defined.
    Relation { word: String },
    Landing { actor: String, point: usize, image: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PingPongVerdict {
    Certified { depth: usize, checked: usize, skipped: usize },
    Failed(PingPongFailure),
}

impl PingPongVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, PingPongVerdict::Certified { .. })
    }
}

impl fmt::Display for PingPongFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PingPongFailure::SetsOverlap { point } => write!(f, "point {point} lies in two sets"),
            PingPongFailure::Relation { word } => write!(f, "relation {word} fixes the probes"),
            PingPongFailure::Landing { actor, point, image } => write!(f, "{actor} sends {point} to {image}, outside its target set"),
        }
    }
}

const ACTOR_NAMES: [char; 4] = ['g', 'G', 'h', 'H'];

/// Checks the two-sided ping-pong conditions: `g` maps everything outside
/// `X_g⁻` into `X_g⁺`, `g⁻¹` maps everything outside `X_g⁺` into `X_g⁻`,
/// and likewise for `h`. Before that, reduced words of length up to
/// `depth` are searched for one that acts trivially on the probes.
pub fn verify_ping_pong<A: GroupAction + ?Sized>(cert: &PingPongCertificate, action: &A) -> Result<PingPongVerdict, PingPongError> {
    let n = action.point_count();
    let mut owner = vec![usize::MAX; n];
    let sets = [&cert.g_plus, &cert.g_minus, &cert.h_plus, &cert.h_minus];
    for (i, set) in sets.iter().enumerate() {
        for &x in set.iter() {
            if x >= n {
                return Err(PingPongError::ActionUndefined);
            }
            if owner[x] != usize::MAX && owner[x] != i {
                return Ok(PingPongVerdict::Failed(PingPongFailure::SetsOverlap { point: x }));
            }
            owner[x] = i;
        }
    }
    let actors = [cert.g.clone(), cert.g.inverse(), cert.h.clone(), cert.h.inverse()];
    let probes: BTreeSet<usize> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    if let Some(word) = find_relation(&actors, &probes, cert.depth, action) {
        return Ok(PingPongVerdict::Failed(PingPongFailure::Relation { word }));
    }
    // Actor i must send every point outside `sets[i ^ 1]` into `sets[i]`.
    let (mut checked, mut skipped) = (0, 0);
    for (i, actor) in actors.iter().enumerate() {
        for x in 0..n {
            if owner[x] == (i ^ 1) {
                continue;
            }
            match action.act(actor, x) {
                None => skipped += 1,
                Some(y) => {
                    checked += 1;
                    if owner[y] != i {
                        return Ok(PingPongVerdict::Failed(PingPongFailure::Landing {
                            actor: ACTOR_NAMES[i].to_string(),
                            point: x,
                            image: y,
                        }));
                    }
                }
            }
        }
    }
    if checked == 0 {
        return Err(PingPongError::ActionUndefined);
    }
    Ok(PingPongVerdict::Certified {
        depth: cert.depth,
        checked,
        skipped,
    })
}

/// Depth-first over reduced words, carrying the images of all probes.
fn find_relation<A: GroupAction + ?Sized>(actors: &[Word; 4], probes: &BTreeSet<usize>, depth: usize, action: &A) -> Option<String> {
    let start: Vec<(usize, Option<usize>)> = probes.iter().map(|&x| (x, Some(x))).collect();
    let mut word = Vec::new();
    fn go<A: GroupAction + ?Sized>(actors: &[Word; 4], images: &[(usize, Option<usize>)], word: &mut Vec<usize>, depth: usize, action: &A) -> Option<String> {
        if word.len() == depth {
            return None;
        }
        for i in 0..4 {
            if word.last() == Some(&(i ^ 1)) {
                continue;
            }
            // Words act on the left, so the newest letter is applied last.
            let next: Vec<(usize, Option<usize>)> = images.iter().map(|&(x, y)| (x, y.and_then(|y| action.act(&actors[i], y)))).collect();
            word.push(i);
            let defined = next.iter().filter(|(_, y)| y.is_some()).count();
            if defined > 0 && next.iter().all(|&(x, y)| y.is_none_or(|y| y == x)) {
                return Some(word.iter().rev().map(|&i| ACTOR_NAMES[i]).collect());
            }
            if defined > 0 {
                if let Some(found) = go(actors, &next, word, depth, action) {
                    return Some(found);
                }
            }
            word.pop();
        }
        None
    }
    go(actors, &start, &mut word, depth, action)
}
