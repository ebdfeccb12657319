use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

use super::{CayleyBall, GrowthTable};

pub const BALL_SCHEMA: &str = "cayley-ball/1";

/// Serialized form of a ball. Edges are `[u, v, step]` with `v = u·s` for
/// generator steps only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallRecord {
    pub schema: String,
    pub group: String,
    pub radius: usize,
    pub generators: Vec<String>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub word: String,
    pub dist: u32,
}

impl BallRecord {
    pub fn from_ball(b: &CayleyBall) -> Self {
        BallRecord {
            schema: BALL_SCHEMA.to_string(),
            group: b.presentation().describe(),
            radius: b.radius(),
            generators: (0..b.degree()).step_by(2).map(|s| b.step_name(s).to_string()).collect(),
            vertices: (0..b.len())
                .map(|v| VertexRecord {
                    id: v,
                    word: b.word_string(v),
                    dist: b.dist0(v),
                })
                .collect(),
            edges: b.edges().map(|(u, v, s)| [u, v, s / 2]).collect(),
        }
    }

    /// Parses and validates a `cayley-ball/1` document.
    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let r: BallRecord = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        if r.schema != BALL_SCHEMA {
            return Err(ParseError::Schema {
                expected: BALL_SCHEMA,
                found: r.schema,
            });
        }
        let n = r.vertices.len();
        for (i, v) in r.vertices.iter().enumerate() {
            if v.id != i || v.dist as usize > r.radius {
                return Err(ParseError::Json(format!("vertex {i} is malformed")));
            }
        }
        if n == 0 || r.vertices[0].dist != 0 {
            return Err(ParseError::Json("vertex 0 must be the identity".into()));
        }
        for e in &r.edges {
            if e[0] >= n || e[1] >= n || e[2] >= r.generators.len() {
                return Err(ParseError::Json(format!("edge {e:?} is out of range")));
            }
            if r.vertices[e[0]].dist.abs_diff(r.vertices[e[1]].dist) > 1 {
                return Err(ParseError::Json(format!("edge {e:?} skips a layer")));
            }
        }
        Ok(r)
    }
}

pub fn ball_to_json(b: &CayleyBall) -> String {
    serde_json::to_string_pretty(&BallRecord::from_ball(b)).expect("ball serializes")
}

/// Directed graph with one edge per generator step, labelled by generator.
pub fn ball_to_dot(b: &CayleyBall) -> String {
    let mut out = String::from("digraph cayley {\n");
    for v in 0..b.len() {
        let _ = writeln!(out, "  {v} [label=\"{}\"];", b.word_string(v));
    }
    for (u, v, s) in b.edges() {
        let _ = writeln!(out, "  {u} -> {v} [label=\"{}\"];", b.step_name(s));
    }
    out.push_str("}\n");
    out
}

pub fn growth_to_csv(t: &GrowthTable) -> String {
    let mut out = String::from("n,ball,sphere\n");
    for (n, (b, s)) in t.ball.iter().zip(&t.sphere).enumerate() {
        let _ = writeln!(out, "{n},{b},{s}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::growth_table;
    use crate::group::Presentation;

    #[test]
    fn json_round_trip() {
        let b = CayleyBall::build(&Presentation::free_abelian(2), 2).unwrap();
        let text = ball_to_json(&b);
        let r = BallRecord::from_json(&text).unwrap();
        assert_eq!(r.vertices.len(), 13);
        assert_eq!(r.edges.len(), b.edges().count());
        assert!(BallRecord::from_json(&text.replace("cayley-ball/1", "cayley-ball/9")).is_err());
        assert!(BallRecord::from_json("{").is_err());
    }

    #[test]
    fn csv_rows() {
        let csv = growth_to_csv(&growth_table(&Presentation::free(2), 4).unwrap());
        assert!(csv.lines().any(|l| l == "4,161,108"));
        assert!(csv.starts_with("n,ball,sphere\n0,1,1\n"));
    }

    #[test]
    fn dot_has_every_edge() {
        let b = CayleyBall::build(&Presentation::free(1), 2).unwrap();
        let dot = ball_to_dot(&b);
        assert_eq!(dot.matches("->").count(), 4);
        assert!(dot.contains("[label=\"a-a-\"]"));
    }
}
