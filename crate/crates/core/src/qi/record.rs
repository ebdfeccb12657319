//! The `qi-map/1` interchange format and sample ids.
//!
//! Samples are named rather than stored: `ball/<group>/<R>` is a Cayley
//! ball with its path metric, `tree/<valence>/<R>` a regular tree ball and
//! `treeqi-image/<k>/<R>` the image of the tree collapse map.

use serde::{Deserialize, Serialize};

use crate::cayley::CayleyBall;
use crate::error::{CayleyError, ParseError, QiError};
use crate::group::Presentation;

use super::tree::{build_tree_qi, tree_ball};
use super::{FiniteMetricSample, MapSample};

pub const MAP_SCHEMA: &str = "qi-map/1";

/// Largest sample the resolver will materialize (distance matrices are
/// quadratic).
pub const SAMPLE_POINT_CAP: usize = 6000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub schema: String,
    pub domain: String,
    pub range: String,
    pub assignment: Vec<usize>,
}

impl MapRecord {
    pub fn from_map(m: &MapSample) -> Self {
        MapRecord {
            schema: MAP_SCHEMA.to_string(),
            domain: m.domain.id().to_string(),
            range: m.range.id().to_string(),
            assignment: m.assignment.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let r: MapRecord = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        if r.schema != MAP_SCHEMA {
            return Err(ParseError::Schema {
                expected: MAP_SCHEMA,
                found: r.schema,
            });
        }
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map record serializes")
    }

    pub fn to_map(&self) -> Result<MapSample, QiError> {
        MapSample::new(resolve_sample(&self.domain)?, resolve_sample(&self.range)?, self.assignment.clone())
    }
}

fn parse_count(id: &str, text: &str) -> Result<usize, QiError> {
    text.parse().map_err(|_| QiError::UnknownSample(id.to_string()))
}

fn check_size(id: &str, n: usize) -> Result<(), QiError> {
    if n > SAMPLE_POINT_CAP {
        return Err(QiError::InvalidMetric(format!("sample `{id}` has {n} points, the cap is {SAMPLE_POINT_CAP}")));
    }
    Ok(())
}

pub fn resolve_sample(id: &str) -> Result<FiniteMetricSample, QiError> {
    let unknown = || QiError::UnknownSample(id.to_string());
    let (kind, rest) = id.split_once('/').ok_or_else(unknown)?;
    let (middle, radius) = rest.rsplit_once('/').ok_or_else(unknown)?;
    let radius = parse_count(id, radius)?;
    match kind {
        "ball" => {
            let p = Presentation::from_spec(middle).map_err(|e| QiError::Cayley(CayleyError::Group(e)))?;
            let b = CayleyBall::build_with_cap(&p, radius, SAMPLE_POINT_CAP).map_err(|e| match e {
                CayleyError::BallTooLarge { .. } => QiError::InvalidMetric(format!("sample `{id}` exceeds {SAMPLE_POINT_CAP} points")),
                other => other.into(),
            })?;
            FiniteMetricSample::from_graph(id, &b)
        }
        "tree" => {
            let valence = parse_count(id, middle)?;
            if valence < 2 {
                return Err(unknown());
            }
            let estimate = (0..=radius).try_fold(0usize, |acc, d| {
                let layer = if d == 0 { Some(1) } else { (valence - 1).checked_pow(d as u32 - 1).and_then(|x| x.checked_mul(valence)) };
                layer.and_then(|l| acc.checked_add(l))
            });
            check_size(id, estimate.unwrap_or(usize::MAX))?;
            FiniteMetricSample::from_graph(id, &tree_ball(valence, radius).graph)
        }
        "treeqi-image" => {
            let k = parse_count(id, middle)?;
            check_size(id, 3usize.saturating_mul(1usize.checked_shl(radius as u32).unwrap_or(usize::MAX)))?;
            Ok(build_tree_qi(k, radius)?.map.range)
        }
        _ => Err(unknown()),
    }
}
