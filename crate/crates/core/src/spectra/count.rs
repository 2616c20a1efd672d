//! Eigenvalue counting `N(λ) = #{eigenvalues < λ}` for the linear graphs.
//!
//! Away from `σ_D`, `N(λ) = n·N_D(λ) + ν₋(K(λ))` where `K` is the
//! symmetrized vertex matrix `M_n / s` (rows of the root vertex dropped for a
//! Dirichlet root) and `ν₋` its number of negative eigenvalues.  `K` is
//! scaled by `|s|·e^{-L}` so every entry stays bounded.

use crate::determinants::{GraphParams, RootCondition};
use crate::potential::Potential;
use crate::transfer::{dirichlet_spectrum, transfer_at, TransferValues};
use crate::Result;

/// Counts eigenvalues of `B_n` / `B̊_n` below a given energy.
#[derive(Debug, Clone)]
pub struct Counter<'a> {
    pub params: GraphParams,
    pub q: &'a Potential,
    /// `σ_D ∩ (−∞, lambda_cap]`.
    pub dirichlet: Vec<f64>,
    pub lambda_cap: f64,
}

impl<'a> Counter<'a> {
    pub fn new(params: GraphParams, q: &'a Potential, lambda_cap: f64) -> Result<Self> {
        let cap = lambda_cap.max(1.0);
        let dirichlet = dirichlet_spectrum(q, cap)?.values;
        Ok(Counter {
            params,
            q,
            dirichlet,
            lambda_cap: cap,
        })
    }

    /// Number of Dirichlet eigenvalues strictly below `lambda`.
    pub fn dirichlet_count(&self, lambda: f64) -> usize {
        self.dirichlet.partition_point(|&d| d < lambda)
    }

    pub fn count(&self, lambda: f64) -> Result<usize> {
        let t = transfer_at(self.q, lambda)?;
        Ok(self.params.n * self.dirichlet_count(lambda) + negative_inertia(&self.params, &t))
    }
}

/// `ν₋` of the scaled vertex matrix at one energy.
pub fn negative_inertia(params: &GraphParams, t: &TransferValues) -> usize {
    let n = params.n;
    let (b, a) = (params.b, params.alpha);
    let sg = if t.s_hat > 0.0 {
        1.0
    } else if t.s_hat < 0.0 {
        -1.0
    } else {
        // exactly on σ_D; the caller never asks, but keep the count finite
        1.0
    };
    let off = -b.sqrt() * sg * (-t.log_scale).exp();
    let diag = |i: usize| {
        let w = if i == 0 {
            b
        } else if i == n {
            1.0
        } else {
            b + 1.0
        };
        sg * (w * t.c_hat + a * t.s_hat)
    };
    let first = match params.root_condition {
        RootCondition::Robin => 0,
        RootCondition::Dirichlet => 1,
    };
    let mut neg = 0;
    let mut d_prev = f64::NAN;
    for i in first..=n {
        let mut d = diag(i);
        if i > first {
            d -= off * off / d_prev;
        }
        if d == 0.0 {
            d = -f64::EPSILON * (diag(i).abs() + off.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            neg += 1;
        }
        d_prev = d;
    }
    neg
}
