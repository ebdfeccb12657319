//! The quasi-action `λ ↦ q ∘ L_λ ∘ q̄` induced by a quasi-isometry `Λ → G`.

use serde::Serialize;

use crate::cayley::CayleyBall;
use crate::error::{CayleyError, QiError};

/// A map between Cayley balls, undefined where the image leaves the ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    pub assignment: Vec<Option<usize>>,
}

impl PartialMap {
    pub fn identity(n: usize) -> Self {
        PartialMap {
            assignment: (0..n).map(Some).collect(),
        }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.assignment.get(v).copied().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiActionReport {
    /// Empirical `D` bounding both `d(q_λ∘q_η, q_λη)` and `d(q_λ∘q_λ⁻¹, id)`.
    pub d: u32,
    pub kernel_bound: u32,
    /// Elements `λ` with `d(q_λ, id) ≤ K`, as words.
    pub kernel: Vec<String>,
    /// `d(q_λ, id)` for each probed `λ`.
    pub displacement: Vec<u32>,
    pub probes: usize,
}

struct Probe<'a> {
    lambda: &'a CayleyBall,
    g: &'a CayleyBall,
    q: &'a PartialMap,
    qbar: &'a PartialMap,
}

impl Probe<'_> {
    fn out(&self, what: String) -> QiError {
        QiError::OutOfBall(what)
    }

    /// `q_λ(x) = q(λ · q̄(x))`.
    fn q_lambda(&self, l: usize, x: usize) -> Result<usize, QiError> {
        let y = self.qbar.get(x).ok_or_else(|| self.out(format!("q̄({})", self.g.word_string(x))))?;
        let ly = self
            .lambda
            .product(l, y)
            .map_err(CayleyError::from)?
            .ok_or_else(|| self.out(format!("{}·{}", self.lambda.word_string(l), self.lambda.word_string(y))))?;
        self.q.get(ly).ok_or_else(|| self.out(format!("q({})", self.lambda.word_string(ly))))
    }

    fn dist(&self, a: usize, b: usize) -> Result<u32, QiError> {
        self.g
            .group_distance(a, b)
            .ok_or_else(|| self.out(format!("d({}, {})", self.g.word_string(a), self.g.word_string(b))))
    }
}

/// Probes the quasi-action on `probes ⊆ G` for the elements `lambdas ⊆ Λ`.
pub fn quasi_action_probe(
    lambda_ball: &CayleyBall,
    g_ball: &CayleyBall,
    q: &PartialMap,
    qbar: &PartialMap,
    lambdas: &[usize],
    probes: &[usize],
    kernel_bound: u32,
) -> Result<QuasiActionReport, QiError> {
    let pr = Probe {
        lambda: lambda_ball,
        g: g_ball,
        q,
        qbar,
    };
    let mut d = 0;
    let mut displacement = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let l_inv = lambda_ball
            .inverse(l)
            .ok_or_else(|| pr.out(format!("{}⁻¹", lambda_ball.word_string(l))))?;
        let mut disp = 0;
        for &x in probes {
            disp = disp.max(pr.dist(pr.q_lambda(l, x)?, x)?);
            let back = pr.q_lambda(l, pr.q_lambda(l_inv, x)?)?;
            d = d.max(pr.dist(back, x)?);
        }
        displacement.push(disp);
        for &e in lambdas {
            let le = lambda_ball
                .product(l, e)
                .map_err(CayleyError::from)?
                .ok_or_else(|| pr.out(format!("{}·{}", lambda_ball.word_string(l), lambda_ball.word_string(e))))?;
            for &x in probes {
                let composed = pr.q_lambda(l, pr.q_lambda(e, x)?)?;
                d = d.max(pr.dist(composed, pr.q_lambda(le, x)?)?);
            }
        }
    }
    let kernel = lambdas
        .iter()
        .zip(&displacement)
        .filter(|(_, &disp)| disp <= kernel_bound)
        .map(|(&l, _)| lambda_ball.word_string(l))
        .collect();
    Ok(QuasiActionReport {
        d,
        kernel_bound,
        kernel,
        displacement,
        probes: probes.len(),
    })
}
