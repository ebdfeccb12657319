use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CayleyError, GroupError};
use crate::group::Presentation;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthTable {
    /// `|B(n)|` for `n = 0..=R`.
    pub ball: Vec<u64>,
    /// `|S(n)| = |B(n)| − |B(n−1)|`.
    pub sphere: Vec<u64>,
}

impl GrowthTable {
    pub fn from_spheres(sphere: Vec<u64>) -> Self {
        let ball = sphere
            .iter()
            .scan(0u64, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        GrowthTable { ball, sphere }
    }

    pub fn from_balls(ball: Vec<u64>) -> Self {
        let sphere = ball
            .iter()
            .enumerate()
            .map(|(i, &b)| if i == 0 { b } else { b - ball[i - 1] })
            .collect();
        GrowthTable { ball, sphere }
    }

    pub fn radius(&self) -> usize {
        self.ball.len().saturating_sub(1)
    }
}

/// Counts spheres layer by layer, keeping only the last three layers in
/// memory (neighbours of `S(n)` lie in `S(n−1) ∪ S(n) ∪ S(n+1)`).
pub fn growth_table(p: &Presentation, radius: usize) -> Result<GrowthTable, CayleyError> {
    growth_table_with_cap(p, radius, super::vertex_cap())
}

pub fn growth_table_with_cap(p: &Presentation, radius: usize, cap: usize) -> Result<GrowthTable, CayleyError> {
    let steps: Vec<Word> = p.alphabet().letters().map(Word::letter).collect();
    let mut prev: HashSet<Word> = HashSet::new();
    let mut current: Vec<Word> = vec![p.normal_form(&Word::empty())?];
    let mut current_set: HashSet<Word> = current.iter().cloned().collect();
    let mut spheres = vec![1u64];
    let mut total = 1usize;
    for _ in 0..radius {
        let products: Vec<Vec<Word>> = current
            .par_iter()
            .map(|w| steps.iter().map(|s| p.multiply(w, s)).collect::<Result<Vec<_>, GroupError>>())
            .collect::<Result<_, _>>()?;
        let mut next: Vec<Word> = Vec::new();
        let mut next_set: HashSet<Word> = HashSet::new();
        for w in products.into_iter().flatten() {
            if !prev.contains(&w) && !current_set.contains(&w) && next_set.insert(w.clone()) {
                next.push(w);
            }
        }
        total += next.len();
        if total > cap {
            return Err(CayleyError::BallTooLarge { cap });
        }
        spheres.push(next.len() as u64);
        prev = current_set;
        current_set = next_set;
        current = next;
    }
    Ok(GrowthTable::from_spheres(spheres))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GrowthClass {
    Polynomial { degree: f64 },
    Exponential { rate: f64 },
    Inconclusive { degree: f64, rate: f64 },
}

const RESIDUAL_FACTOR: f64 = 1.5;

/// Least-squares fits of `ln B(n)` against `c·ln n + d` and `c·n + d` over
/// the top half of the table; the fit with the clearly smaller residual
/// wins.
pub fn classify_growth(t: &GrowthTable) -> Result<GrowthClass, CayleyError> {
    let len = t.ball.len();
    if len < 6 {
        return Err(CayleyError::TableTooShort { len });
    }
    let ns: Vec<usize> = (len / 2..len).filter(|&n| n > 0).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| (t.ball[n] as f64).ln()).collect();
    if ys.iter().all(|&y| y == ys[0]) {
        return Ok(GrowthClass::Polynomial { degree: 0.0 });
    }
    let log_n: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let lin_n: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (degree, res_poly) = least_squares(&log_n, &ys);
    let (rate, res_exp) = least_squares(&lin_n, &ys);
    let (better, worse) = (res_poly.min(res_exp), res_poly.max(res_exp));
    if worse <= RESIDUAL_FACTOR * better {
        return Ok(GrowthClass::Inconclusive { degree, rate });
    }
    Ok(if res_poly < res_exp {
        GrowthClass::Polynomial { degree }
    } else {
        GrowthClass::Exponential { rate }
    })
}

/// Slope and residual sum of squares of the best line `y = c x + d`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c = sxy / sxx;
    let d = my - c * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - c * x - d).powi(2)).sum();
    (c, rss)
}
