//! Vertex values and edge profiles of linear-graph eigenfunctions.
//!
//! With `ξ + ξ⁻¹ = b^{-1/2} v(λ)` and `ũ_k = b^{k/2} u_k`, the vertex values are
//! `ũ_k = (b^{1/2}ξ − c)ξ^k − (b^{1/2}ξ⁻¹ − c)ξ^{−k}` (Robin root) or
//! `ũ_k = ξ^k − ξ^{−k}` (Dirichlet root).  Exponential-regime values are
//! carried as [`Scaled`] so rogue eigenvectors at large `|α|` do not overflow.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::determinants::{secular_matrix, GraphParams, RootCondition};
use crate::potential::Potential;
use crate::transfer::{fundamental_at, transfer_at, Method, TransferValues};
use crate::{Error, Result, Scaled};

/// `|ŝ|` below which `λ` is treated as a Dirichlet point.
const DIRICHLET_S: f64 = 1e-9;

/// Half-width of the band around `|b^{-1/2} v| = 2` classified as boundary.
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Oscillatory,
    Exponential,
    Boundary,
}

/// Regime of `t = |b^{-1/2} v|`, with `v` given as `v_hat·e^log_scale`.
pub fn regime_of_v(b: f64, v_hat: f64, log_scale: f64) -> Regime {
    if log_scale > 50.0 && v_hat != 0.0 {
        return Regime::Exponential;
    }
    let t = (v_hat * log_scale.exp()).abs() / b.sqrt();
    if (t - 2.0).abs() <= BOUNDARY_BAND {
        Regime::Boundary
    } else if t < 2.0 {
        Regime::Oscillatory
    } else {
        Regime::Exponential
    }
}

pub fn regime_at(params: &GraphParams, t: &TransferValues) -> Regime {
    let v = t.v_scaled(params.b, params.alpha);
    regime_of_v(params.b, v.mantissa, v.log_scale)
}

pub fn regime(params: &GraphParams, q: &Potential, lambda: f64) -> Result<Regime> {
    Ok(regime_at(params, &transfer_at(q, lambda)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn real(re: f64) -> Self {
        ComplexValue { re, im: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// How the vertex values were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorSource {
    /// Closed-form `ξ` modes.
    Modes,
    /// Three-term recurrence (`|ξ| = 1` double root).
    Recurrence,
    /// Null vector of the secular matrix at a Dirichlet point.
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteEigenvector {
    pub lambda: f64,
    /// `u_0..u_n`, `max |u_k| = 1`.
    pub values: Vec<f64>,
    /// Root of `ξ + ξ⁻¹ = b^{-1/2} v` with `|ξ| ≥ 1`; `ξ = e^{iθ}` when oscillatory.
    pub xi: ComplexValue,
    pub ln_abs_xi: f64,
    pub regime: Regime,
    /// Mode coefficients in units of `e^coef_log_scale`.
    pub a1: ComplexValue,
    pub a2: ComplexValue,
    pub coef_log_scale: f64,
    pub source: VectorSource,
    /// Sign changes along `u_0..u_n`.
    pub sign_changes: usize,
}

impl DiscreteEigenvector {
    /// `ũ_k = b^{k/2} u_k`.
    pub fn rescaled(&self, b: f64) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, u)| u * b.powf(0.5 * k as f64))
            .collect()
    }
}

fn sqrt_scaled(x: Scaled) -> Scaled {
    if x.is_zero() {
        return x;
    }
    Scaled::new(x.mantissa.abs().sqrt(), 0.5 * x.log_scale)
}

/// `x^k` for real `x`.
fn powi_scaled(x: Scaled, k: i64) -> Scaled {
    if k == 0 {
        return Scaled::ONE;
    }
    let sign = if x.signum() < 0 && k % 2 != 0 {
        -1.0
    } else {
        1.0
    };
    Scaled::new(sign, k as f64 * x.ln_abs())
}

fn normalize(raw: &[Scaled]) -> Vec<f64> {
    let top = raw
        .iter()
        .map(Scaled::ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|u| u.shift(-top).to_f64()).collect()
}

fn sign_changes(u: &[f64]) -> usize {
    let nz: Vec<f64> = u.iter().copied().filter(|x| x.abs() > 1e-12).collect();
    nz.windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count()
}

/// Real `ξ` with `|ξ| > 1` for `|t| > 2`.
fn real_xi(t: Scaled) -> Scaled {
    let disc = sqrt_scaled(t * t - Scaled::from_f64(4.0));
    let big = (t.abs() + disc).scale(0.5);
    if t.signum() < 0 {
        -big
    } else {
        big
    }
}

pub fn vertex_values(
    params: &GraphParams,
    q: &Potential,
    lambda: f64,
) -> Result<DiscreteEigenvector> {
    let t = transfer_at(q, lambda)?;
    vertex_values_at(params, &t)
}

pub fn vertex_values_at(params: &GraphParams, tv: &TransferValues) -> Result<DiscreteEigenvector> {
    let (n, b, alpha) = (params.n, params.b, params.alpha);
    let robin = params.root_condition == RootCondition::Robin;
    let regime = regime_at(params, tv);
    if tv.s_hat.abs() < DIRICHLET_S {
        if !robin {
            return Err(Error::Precondition(format!(
                "λ = {} is a Dirichlet point of a Dirichlet-root graph",
                tv.lambda
            )));
        }
        return kernel_vector(params, tv, regime);
    }
    let c = tv.c_scaled();
    let s = tv.s_scaled();
    let sb = b.sqrt();
    let tt = tv.v_scaled(b, alpha).scale(1.0 / sb);
    let weight = |k: usize| -0.5 * k as f64 * b.ln();
    let mut raw: Vec<Scaled> = Vec::with_capacity(n + 1);
    let (xi, ln_abs_xi, a1, a2, source);
    match regime {
        Regime::Oscillatory => {
            let theta = (0.5 * tt.to_f64()).clamp(-1.0, 1.0).acos();
            for k in 0..=n {
                let kt = k as f64 * theta;
                let u = if robin {
                    Scaled::from_f64(sb * (kt + theta).sin()) - c.scale(kt.sin())
                } else {
                    Scaled::from_f64(kt.sin())
                };
                raw.push(u.shift(weight(k)));
            }
            xi = ComplexValue {
                re: theta.cos(),
                im: theta.sin(),
            };
            ln_abs_xi = 0.0;
            let ch = tv.c_hat;
            let e = (-tv.log_scale).exp();
            (a1, a2) = if robin {
                (
                    ComplexValue {
                        re: sb * theta.cos() * e - ch,
                        im: sb * theta.sin() * e,
                    },
                    ComplexValue {
                        re: -(sb * theta.cos() * e - ch),
                        im: sb * theta.sin() * e,
                    },
                )
            } else {
                (ComplexValue::real(e), ComplexValue::real(-e))
            };
            source = VectorSource::Modes;
        }
        Regime::Exponential => {
            let x = real_xi(tt);
            let xr = x.recip();
            let (ca, cb) = if robin {
                (x.scale(sb) - c, xr.scale(sb) - c)
            } else {
                (Scaled::ONE, Scaled::ONE)
            };
            let from_root: Vec<Scaled> = (0..=n)
                .map(|k| {
                    (ca * powi_scaled(x, k as i64) - cb * powi_scaled(xr, k as i64))
                        .shift(weight(k))
                })
                .collect();
            // anchored at the last vertex: stable when the mode decays away from the root
            let w = c + s.scale(alpha);
            let (pe, re) = (w - x.scale(sb), xr.scale(sb) - w);
            let from_end: Vec<Scaled> = (0..=n)
                .map(|k| {
                    let j = (n - k) as i64;
                    (pe * powi_scaled(xr, j) + re * powi_scaled(x, j)).shift(weight(k))
                })
                .collect();
            let root_res = residual_at(params, tv, &normalize(&from_root));
            let end_res = residual_at(params, tv, &normalize(&from_end));
            raw = if robin && end_res < root_res {
                from_end
            } else {
                from_root
            };
            xi = ComplexValue::real(x.to_f64());
            ln_abs_xi = x.ln_abs();
            let e = -tv.log_scale;
            a1 = ComplexValue::real(ca.shift(e).to_f64());
            a2 = ComplexValue::real(-cb.shift(e).to_f64());
            source = VectorSource::Modes;
        }
        Regime::Boundary => {
            let v = tv.v_scaled(b, alpha);
            let (u0, u1) = if robin {
                (Scaled::ONE, (c.scale(b) + s.scale(alpha)).scale(1.0 / b))
            } else {
                (Scaled::ZERO, Scaled::ONE)
            };
            raw.push(u0);
            if n >= 1 {
                raw.push(u1);
            }
            for k in 1..n {
                let next = (v * raw[k] - raw[k - 1]).scale(1.0 / b);
                raw.push(next);
            }
            xi = ComplexValue::real(tt.to_f64().signum());
            ln_abs_xi = 0.0;
            a1 = ComplexValue::real(f64::NAN);
            a2 = ComplexValue::real(f64::NAN);
            source = VectorSource::Recurrence;
        }
    }
    let values = normalize(&raw);
    Ok(DiscreteEigenvector {
        lambda: tv.lambda,
        sign_changes: sign_changes(&values),
        values,
        xi,
        ln_abs_xi,
        regime,
        a1,
        a2,
        coef_log_scale: tv.log_scale,
        source,
    })
}

fn kernel_vector(
    params: &GraphParams,
    tv: &TransferValues,
    regime: Regime,
) -> Result<DiscreteEigenvector> {
    let m = secular_matrix(params, tv.c(), tv.s());
    let svd = SVD::new(m, false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::RootSearch("SVD did not converge".into()))?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::RootSearch("empty secular matrix".into()))?;
    let mut values: Vec<f64> = vt.row(imin).iter().copied().collect();
    let top = values
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    values.iter_mut().for_each(|u| *u /= top);
    Ok(DiscreteEigenvector {
        lambda: tv.lambda,
        sign_changes: sign_changes(&values),
        values,
        xi: ComplexValue::real(f64::NAN),
        ln_abs_xi: f64::NAN,
        regime,
        a1: ComplexValue::real(f64::NAN),
        a2: ComplexValue::real(f64::NAN),
        coef_log_scale: 0.0,
        source: VectorSource::Kernel,
    })
}

/// `(b^{1/2}ξ − c)/(b^{1/2}ξ⁻¹ − c)` (Robin root).
pub fn coefficient_ratio(params: &GraphParams, q: &Potential, lambda: f64) -> Result<ComplexValue> {
    let tv = transfer_at(q, lambda)?;
    let sb = params.b.sqrt();
    let tt = tv.v_scaled(params.b, params.alpha).scale(1.0 / sb);
    match regime_at(params, &tv) {
        Regime::Exponential => {
            let x = real_xi(tt);
            let c = tv.c_scaled();
            Ok(ComplexValue::real(
                (x.scale(sb) - c).ratio(x.recip().scale(sb) - c),
            ))
        }
        _ => {
            let theta = (0.5 * tt.to_f64()).clamp(-1.0, 1.0).acos();
            let c = tv.c();
            let (nr, ni) = (sb * theta.cos() - c, sb * theta.sin());
            let (dr, di) = (sb * theta.cos() - c, -sb * theta.sin());
            let d2 = dr * dr + di * di;
            Ok(ComplexValue {
                re: (nr * dr + ni * di) / d2,
                im: (ni * dr - nr * di) / d2,
            })
        }
    }
}

/// Maximum over the `n+1` vertex equations of `|row·u| / (‖row‖₁ max|u|)`,
/// with the `c` and `αs` parts of each coefficient counted separately in `‖row‖₁`.
pub fn residual(params: &GraphParams, q: &Potential, lambda: f64, values: &[f64]) -> Result<f64> {
    let n = params.n;
    if values.len() != n + 1 {
        return Err(Error::InvalidParams(format!(
            "expected {} vertex values, got {}",
            n + 1,
            values.len()
        )));
    }
    Ok(residual_at(params, &transfer_at(q, lambda)?, values))
}

fn residual_at(params: &GraphParams, tv: &TransferValues, values: &[f64]) -> f64 {
    let n = params.n;
    let (b, a) = (params.b, params.alpha);
    let (c, s) = (tv.c_hat, tv.s_hat);
    let e = (-tv.log_scale).exp();
    let umax = values.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    if umax == 0.0 {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for k in 0..=n {
        let (r, nrm) = if k == 0 && params.root_condition == RootCondition::Dirichlet {
            (values[0], 1.0)
        } else {
            let wc = if k == n {
                1.0
            } else if k == 0 {
                b
            } else {
                b + 1.0
            };
            let mut r = (wc * c + a * s) * values[k];
            let mut nrm = wc * c.abs() + (a * s).abs();
            if k > 0 {
                r -= e * values[k - 1];
                nrm += e;
            }
            if k < n {
                r -= b * e * values[k + 1];
                nrm += b * e;
            }
            (r, nrm)
        };
        worst = worst.max(r.abs() / (nrm * umax));
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    /// Edge `k` joins vertex `k−1` to vertex `k`.
    pub k: usize,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

/// Derivative `u'(0)` on each edge `1..=n`.
fn edge_slopes(params: &GraphParams, tv: &TransferValues, u: &[f64]) -> Result<Vec<Scaled>> {
    let n = params.n;
    if tv.s_hat.abs() >= DIRICHLET_S {
        let (c, s) = (tv.c_scaled(), tv.s_scaled());
        return Ok((1..=n)
            .map(|k| (Scaled::from_f64(u[k]) - c.scale(u[k - 1])).div(s))
            .collect());
    }
    if params.root_condition == RootCondition::Dirichlet {
        return Err(Error::Precondition(
            "s(λ) = 0 on a Dirichlet-root graph".into(),
        ));
    }
    // s(λ) = 0: propagate slopes through the vertex conditions
    let (b, a) = (params.b, params.alpha);
    let (cp, sp) = (tv.c_prime(), tv.s_prime());
    let mut slopes = vec![a * u[0] / b];
    for k in 1..n {
        let out = u[k - 1] * cp + slopes[k - 1] * sp;
        slopes.push((out + a * u[k]) / b);
    }
    Ok(slopes.into_iter().map(Scaled::from_f64).collect())
}

/// `u(x) = u_{k−1} c(x, λ) + u'(0) s(x, λ)` on edge `k`.
pub fn edge_function(
    params: &GraphParams,
    q: &Potential,
    ev: &DiscreteEigenvector,
    k: usize,
    x_samples: &[f64],
) -> Result<EdgeProfile> {
    if k == 0 || k > params.n {
        return Err(Error::InvalidParams(format!(
            "edge index {k} outside 1..={}",
            params.n
        )));
    }
    let tv = transfer_at(q, ev.lambda)?;
    let slope = edge_slopes(params, &tv, &ev.values)?[k - 1];
    let u0 = ev.values[k - 1];
    let u = x_samples
        .iter()
        .map(|&x| {
            let f = fundamental_at(q, ev.lambda, x, Method::Auto)?;
            Ok((f.c_scaled().scale(u0) + slope * f.s_scaled()).to_f64())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeProfile {
        k,
        x: x_samples.to_vec(),
        u,
    })
}

/// Profiles on every edge at `samples` equally spaced points (endpoints included).
pub fn sample_eigenfunction(
    params: &GraphParams,
    q: &Potential,
    ev: &DiscreteEigenvector,
    samples: usize,
) -> Result<Vec<EdgeProfile>> {
    let m = samples.max(2);
    let xs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
    (1..=params.n)
        .map(|k| edge_function(params, q, ev, k, &xs))
        .collect()
}

/// `b^{k−1} ∫₀¹ |u_k|²` per edge, by composite Simpson on `2·half + 1` points.
pub fn weighted_energies(
    params: &GraphParams,
    q: &Potential,
    ev: &DiscreteEigenvector,
    half: usize,
) -> Result<Vec<f64>> {
    let m = 2 * half.max(1) + 1;
    let h = 1.0 / (m - 1) as f64;
    let profiles = sample_eigenfunction(params, q, ev, m)?;
    Ok(profiles
        .iter()
        .map(|p| {
            let sum: f64 =
                p.u.iter()
                    .enumerate()
                    .map(|(i, u)| {
                        let w = if i == 0 || i == m - 1 {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        w * u * u
                    })
                    .sum();
            params.b.powi(p.k as i32 - 1) * sum * h / 3.0
        })
        .collect())
}

#[cfg(test)]
mod tests;
