//! The semi-infinite regular tree: bands where `|b^{-1/2} v(λ)| ≤ 2`,
//! eigenvalues in the gaps, and the density of states.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::determinants::RootCondition;
use crate::orthopoly::limiting_root_density;
use crate::potential::Potential;
use crate::roots::{find_root, Tolerance};
use crate::transfer::{dirichlet_spectrum, transfer_at};
use crate::{lambda_of_mu, mu_of_lambda, Error, Result, Scaled};

/// Scan step in `μ` for band edges and gap roots.
const SCAN_DMU: f64 = 2e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    /// `β = arccos(2/(b^{-1/2} + b^{1/2}))`.
    pub beta: f64,
    /// Closed bands `[lo, hi]`, increasing.
    pub bands: Vec<(f64, f64)>,
    pub lambda_max: f64,
}

impl BandStructure {
    /// Gaps between consecutive bands, `gaps()[j]` separating band `j` and `j+1`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.bands.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    pub fn band_of(&self, lambda: f64) -> Option<usize> {
        self.bands
            .iter()
            .position(|&(a, b)| lambda >= a && lambda <= b)
    }
}

pub fn beta(b: f64) -> f64 {
    (2.0 / (b.sqrt() + 1.0 / b.sqrt())).acos()
}

/// `|b^{-1/2} v(λ)| − 2` as a scaled number.
fn band_excess(b: f64, alpha: f64, q: &Potential, lambda: f64) -> Result<Scaled> {
    let t = transfer_at(q, lambda)?;
    let v = t.v_scaled(b, alpha).abs().scale(1.0 / b.sqrt());
    Ok(v - Scaled::from_f64(2.0))
}

/// Lowest energy worth scanning: below it `v` is exponentially large.
fn scan_floor(alpha: f64, q: &Potential) -> f64 {
    -1.5 * alpha * alpha - 10.0 + q.min_value().min(0.0)
}

pub fn infinite_bands(b: f64, alpha: f64, q: &Potential, lambda_max: f64) -> Result<BandStructure> {
    if !lambda_max.is_finite() || !(b > 1.0) {
        return Err(Error::Precondition(
            "bands need finite lambda_max and b > 1".into(),
        ));
    }
    let lo = scan_floor(alpha, q);
    let (m0, m1) = (mu_of_lambda(lo), mu_of_lambda(lambda_max));
    let steps = ((m1 - m0) / SCAN_DMU).ceil().max(2.0) as usize;
    let tol = Tolerance::default();
    let f = |l: f64| band_excess(b, alpha, q, l);
    let mut edges = Vec::new();
    let mut prev_mu = m0;
    let mut prev = f(lo)?.signum();
    if prev <= 0 {
        return Err(Error::RootSearch(format!(
            "scan floor {lo} already lies in a band"
        )));
    }
    for i in 1..=steps {
        let mu = m0 + (m1 - m0) * i as f64 / steps as f64;
        let sg = f(lambda_of_mu(mu))?.signum();
        if sg != prev && sg != 0 {
            edges.push(find_root(f, lambda_of_mu(prev_mu), lambda_of_mu(mu), tol)?);
        }
        if sg != 0 {
            prev = sg;
        }
        prev_mu = mu;
    }
    let mut bands: Vec<(f64, f64)> = edges
        .chunks(2)
        .map(|w| (w[0], w.get(1).copied().unwrap_or(lambda_max)))
        .collect();
    // touching bands (closed gaps) are merged
    bands.dedup_by(|next, cur| {
        if next.0 - cur.1 <= 1e-12 * next.0.abs().max(1.0) {
            cur.1 = next.1;
            true
        } else {
            false
        }
    });
    Ok(BandStructure {
        beta: beta(b),
        bands,
        lambda_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEigenvalue {
    pub lambda: f64,
    /// `|b^{-1/2} c(λ)|`; above 1 means a decaying eigenfunction.
    pub decay_ratio: f64,
    pub decays: bool,
}

/// Roots of `b(c − c⁻¹) + αs`, found as roots of `b c' + α c`, which equals
/// it times `c/s` and has no poles.  Dirichlet root: `σ_D` itself.
pub fn infinite_point_spectrum(
    b: f64,
    alpha: f64,
    q: &Potential,
    lambda_max: f64,
    root_condition: RootCondition,
) -> Result<Vec<GapEigenvalue>> {
    match root_condition {
        RootCondition::Dirichlet => Ok(dirichlet_spectrum(q, lambda_max)?
            .values
            .into_iter()
            .map(|l| GapEigenvalue {
                lambda: l,
                decay_ratio: f64::NAN,
                decays: true,
            })
            .collect()),
        RootCondition::Robin => {
            let all = gap_candidates(b, alpha, q, lambda_max)?;
            Ok(all.into_iter().filter(|g| g.decays).collect())
        }
    }
}

/// Every root of `b c' + α c` up to `lambda_max` with its decay test.
pub fn gap_candidates(
    b: f64,
    alpha: f64,
    q: &Potential,
    lambda_max: f64,
) -> Result<Vec<GapEigenvalue>> {
    let h = |l: f64| -> Result<Scaled> {
        let t = transfer_at(q, l)?;
        Ok(Scaled::new(b * t.cp_hat + alpha * t.c_hat, t.log_scale))
    };
    let lo = scan_floor(alpha, q);
    let (m0, m1) = (mu_of_lambda(lo), mu_of_lambda(lambda_max));
    let steps = ((m1 - m0) / SCAN_DMU).ceil().max(2.0) as usize;
    let mut out = Vec::new();
    let mut prev_mu = m0;
    let mut prev = h(lo)?.signum();
    for i in 1..=steps {
        let mu = m0 + (m1 - m0) * i as f64 / steps as f64;
        let sg = h(lambda_of_mu(mu))?.signum();
        if sg != prev && sg != 0 && prev != 0 {
            let l = find_root(
                h,
                lambda_of_mu(prev_mu),
                lambda_of_mu(mu),
                Tolerance::default(),
            )?;
            let t = transfer_at(q, l)?;
            let ratio = (t.c_hat.abs() / b.sqrt()).ln() + t.log_scale;
            out.push(GapEigenvalue {
                lambda: l,
                decay_ratio: ratio.exp(),
                decays: ratio > 0.0,
            });
        }
        prev = sg;
        prev_mu = mu;
    }
    Ok(out)
}

/// `v(λ) = (b+1)c + αs` in plain floating point.
fn v_of(b: f64, alpha: f64, q: &Potential, lambda: f64) -> Result<f64> {
    Ok(transfer_at(q, lambda)?.v_scaled(b, alpha).to_f64())
}

/// `2√b/(π√(4b − v²)) |dv/dλ|` inside a band.
pub fn density_of_states(b: f64, alpha: f64, q: &Potential, lambda: f64) -> Result<f64> {
    let v = v_of(b, alpha, q, lambda)?;
    let rho = limiting_root_density(b, v).map_err(|_| Error::Domain {
        value: lambda,
        what: "density of states is defined inside bands only".into(),
    })?;
    let h = 1e-6 * lambda.abs().max(1.0);
    let dv = (v_of(b, alpha, q, lambda + h)? - v_of(b, alpha, q, lambda - h)?) / (2.0 * h);
    Ok(rho * dv.abs())
}

/// [`density_of_states`] divided by `2√b`, so each band carries unit mass.
pub fn normalized_density_of_states(b: f64, alpha: f64, q: &Potential, lambda: f64) -> Result<f64> {
    Ok(density_of_states(b, alpha, q, lambda)? / (2.0 * b.sqrt()))
}

/// `∫ normalized density dλ` over `band` by the midpoint rule in `φ`,
/// `λ = lo + (hi − lo)(1 − cos φ)/2`, which absorbs the edge singularities.
pub fn band_mass(b: f64, alpha: f64, q: &Potential, band: (f64, f64), nodes: usize) -> Result<f64> {
    let (lo, hi) = band;
    let h = PI / nodes as f64;
    let mut sum = 0.0;
    for i in 0..nodes {
        let phi = (i as f64 + 0.5) * h;
        let l = lo + 0.5 * (hi - lo) * (1.0 - phi.cos());
        let jac = 0.5 * (hi - lo) * phi.sin();
        sum += normalized_density_of_states(b, alpha, q, l)? * jac * h;
    }
    Ok(sum)
}

/// `|v| − 2√b`, zero at band edges.
pub fn edge_residual(b: f64, alpha: f64, q: &Potential, lambda: f64) -> Result<f64> {
    Ok(v_of(b, alpha, q, lambda)?.abs() - 2.0 * b.sqrt())
}
