//! Rogue eigenvalues and the lowest cluster as functions of `α`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{linear_spectrum, RogueKind};
use crate::determinants::GraphParams;
use crate::potential::Potential;
use crate::transfer::dirichlet_first;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RogueRow {
    pub alpha: f64,
    pub lambda_double: f64,
    /// `λ^−`; absent for a Dirichlet root.
    pub lambda_minus: Option<f64>,
    /// Midpoint of the hull of `Σ^0`.
    pub center: f64,
    pub width: f64,
    /// `λ^= + α²`.
    pub residual_double: f64,
    /// `λ^− + b^{−2}α²`.
    pub residual_minus: Option<f64>,
    /// `center + (b+1)^{−2}α²`.
    pub residual_center: f64,
    /// `8α²(b+1)^{−2} e^{−|α|/(b+1)}`, proven for `q ≡ 0`.
    pub width_bound: f64,
    pub bound_applies: bool,
}

pub fn width_bound(b: f64, alpha: f64) -> f64 {
    8.0 * alpha * alpha / (b + 1.0).powi(2) * (-alpha.abs() / (b + 1.0)).exp()
}

/// One row per `α` (all negative), for the graph shape in `params`.
pub fn rogue_trajectory(
    params: &GraphParams,
    q: &Potential,
    alphas: &[f64],
) -> Result<Vec<RogueRow>> {
    if let Some(a) = alphas.iter().find(|a| !(**a < 0.0)) {
        return Err(Error::Precondition(format!(
            "rogue trajectories need α < 0, got {a}"
        )));
    }
    if params.n < 3 {
        return Err(Error::Precondition(format!(
            "Σ^0 is empty for n = {}",
            params.n
        )));
    }
    let d1 = dirichlet_first(q, 1)?[0];
    let b = params.b;
    alphas
        .par_iter()
        .map(|&alpha| {
            let p = GraphParams { alpha, ..*params };
            let rep = linear_spectrum(
                &p,
                q,
                -1.5 * alpha * alpha - 10.0,
                d1 - 1e-6 * d1.abs().max(1.0),
            )?;
            let lambda_double = rep
                .rogue(RogueKind::Double)
                .ok_or_else(|| Error::RootSearch(format!("λ^= not found at α = {alpha}")))?;
            let lambda_minus = rep.rogue(RogueKind::Minus);
            let sigma0 = rep
                .summary(0)
                .ok_or_else(|| Error::RootSearch(format!("Σ^0 not found at α = {alpha}")))?;
            let center = 0.5 * (sigma0.min + sigma0.max);
            let a2 = alpha * alpha;
            Ok(RogueRow {
                alpha,
                lambda_double,
                lambda_minus,
                center,
                width: sigma0.width,
                residual_double: lambda_double + a2,
                residual_minus: lambda_minus.map(|l| l + a2 / (b * b)),
                residual_center: center + a2 / (b + 1.0).powi(2),
                width_bound: width_bound(b, alpha),
                bound_applies: q.is_zero(),
            })
        })
        .collect()
}
