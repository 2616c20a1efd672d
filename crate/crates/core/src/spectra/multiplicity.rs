//! Is `λ_D^k` an eigenvalue of `B_n`?  Exactly when `D_n(c(λ), s(λ))` has a
//! multiple root there, i.e. when `F = D_n/s` vanishes at `λ_D^k`.

use serde::{Deserialize, Serialize};

use crate::determinants::{reduced_secular, secular_at, GraphParams, RootCondition};
use crate::potential::Potential;
use crate::transfer::{dirichlet_first, transfer_at};
use crate::{lambda_of_mu, mu_of_lambda, Result};

/// Relative tangency tolerance.
pub const TOL_TAN: f64 = 1e-6;
/// Offsets used for the symmetric limit of `D_n/s`.
const OFFSETS: [f64; 3] = [1e-4, 1e-5, 1e-6];
/// `μ`-distance of the points that fix the local scale of `F`.
const SCALE_DMU: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletMultiplicity {
    pub k: usize,
    pub lambda_d: f64,
    /// `F(λ_D^k)` from the pole-free recurrence.
    pub f_value: f64,
    /// Richardson limit of `(F(λ_D + h) + F(λ_D − h))/2` over the offsets.
    pub f_limit: f64,
    /// `max |F(λ_D^k ± Δ)|`.
    pub scale: f64,
    pub tangential: bool,
    pub eigenvalue: bool,
    /// The sampled limit disagrees with the direct value.
    pub indeterminate: bool,
}

fn f_by_division(params: &GraphParams, q: &Potential, lambda: f64) -> Result<f64> {
    let d = secular_at(params, q, lambda)?.to_f64();
    Ok(d / transfer_at(q, lambda)?.s())
}

pub fn dirichlet_multiplicity(
    params: &GraphParams,
    q: &Potential,
    k: usize,
) -> Result<DirichletMultiplicity> {
    let lambda_d = *dirichlet_first(q, k)?.last().expect("k ≥ 1");
    multiplicity_at(params, q, k, lambda_d)
}

pub(crate) fn multiplicity_at(
    params: &GraphParams,
    q: &Potential,
    k: usize,
    lambda_d: f64,
) -> Result<DirichletMultiplicity> {
    let robin = params.root_condition == RootCondition::Robin;
    let f = |l: f64| -> Result<f64> {
        let t = transfer_at(q, l)?;
        Ok(if robin {
            reduced_secular(params, &t).to_f64()
        } else {
            secular_at(params, q, l)?.to_f64()
        })
    };
    let f_value = f(lambda_d)?;
    let mu = mu_of_lambda(lambda_d);
    let scale = f(lambda_of_mu(mu - SCALE_DMU))?
        .abs()
        .max(f(lambda_of_mu(mu + SCALE_DMU))?.abs());

    let f_limit = if robin {
        let h_scale = lambda_d.abs().max(1.0);
        let sym: Vec<f64> = OFFSETS
            .iter()
            .map(|&h| {
                let h = h * h_scale;
                Ok(0.5
                    * (f_by_division(params, q, lambda_d + h)?
                        + f_by_division(params, q, lambda_d - h)?))
            })
            .collect::<Result<_>>()?;
        // O(h²) error: extrapolate each consecutive pair (ratio 10)
        let r1 = (100.0 * sym[1] - sym[0]) / 99.0;
        let r2 = (100.0 * sym[2] - sym[1]) / 99.0;
        if (r1 - r2).abs() > 1e-3 * scale.max(f_value.abs()) {
            f64::NAN
        } else {
            r2
        }
    } else {
        f_value
    };
    let indeterminate = !f_limit.is_finite()
        || (f_limit - f_value).abs() > 1e-3 * scale.max(f_value.abs()).max(f64::MIN_POSITIVE);
    let tangential = robin && f_value.abs() < TOL_TAN * scale;
    Ok(DirichletMultiplicity {
        k,
        lambda_d,
        f_value,
        f_limit,
        scale,
        tangential,
        eigenvalue: tangential,
        indeterminate,
    })
}
