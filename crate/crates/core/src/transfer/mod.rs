//! Transfer functions `c(λ) = c(1, λ)`, `s(λ) = s(1, λ)` of `-u'' + q u = λ u`,
//! the Dirichlet spectrum `σ_D(q)` and samples of the spiral curve
//! `λ ↦ (c(λ), s(λ))`.

mod ode;

use serde::{Deserialize, Serialize};

use crate::potential::Potential;
use crate::roots::{find_root, Tolerance};
use crate::{lambda_of_mu, mu_of_lambda, Error, Result, Scaled};

/// Relative tolerance handed to the adaptive integrator.
pub const ODE_RTOL: f64 = 1e-13;

/// Fundamental solutions at one point, sharing a log scale:
/// `c = c_hat·e^log_scale`, likewise `s`, `c'` and `s'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferValues {
    pub lambda: f64,
    /// Position the values refer to; `1.0` for [`transfer_at`].
    pub x: f64,
    pub c_hat: f64,
    pub s_hat: f64,
    pub cp_hat: f64,
    pub sp_hat: f64,
    pub log_scale: f64,
}

impl TransferValues {
    fn from_raw(lambda: f64, x: f64, y: [f64; 4], log_scale: f64) -> Result<Self> {
        let m = y[0].abs().max(y[2].abs());
        if !(m.is_finite()) || m == 0.0 {
            return Err(Error::Overflow(format!("transfer values at λ = {lambda}")));
        }
        Ok(TransferValues {
            lambda,
            x,
            c_hat: y[0] / m,
            cp_hat: y[1] / m,
            s_hat: y[2] / m,
            sp_hat: y[3] / m,
            log_scale: log_scale + m.ln(),
        })
    }

    pub fn c(&self) -> f64 {
        self.c_hat * self.log_scale.exp()
    }
    pub fn s(&self) -> f64 {
        self.s_hat * self.log_scale.exp()
    }
    /// `∂c(x, λ)/∂x` at the evaluation point.
    pub fn c_prime(&self) -> f64 {
        self.cp_hat * self.log_scale.exp()
    }
    pub fn s_prime(&self) -> f64 {
        self.sp_hat * self.log_scale.exp()
    }
    pub fn c_scaled(&self) -> Scaled {
        Scaled::new(self.c_hat, self.log_scale)
    }
    pub fn s_scaled(&self) -> Scaled {
        Scaled::new(self.s_hat, self.log_scale)
    }
    pub fn cp_scaled(&self) -> Scaled {
        Scaled::new(self.cp_hat, self.log_scale)
    }

    /// `v(λ) = (b+1)c + αs`.
    pub fn v_scaled(&self, b: f64, alpha: f64) -> Scaled {
        Scaled::new((b + 1.0) * self.c_hat + alpha * self.s_hat, self.log_scale)
    }

    /// Relative defect of `c² − s·c' = 1`.
    pub fn wronskian_defect(&self) -> f64 {
        let a = self.c_hat * self.c_hat;
        let b = self.s_hat * self.cp_hat;
        let one = (-2.0 * self.log_scale).exp();
        (a - b - one).abs() / a.abs().max(b.abs()).max(one)
    }
}

/// How the fundamental solutions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed form for `Zero`, interval products for `PiecewiseConstant`,
    /// adaptive integration for `Sampled`.
    Auto,
    /// Adaptive integration regardless of representation.
    Integrate,
}

/// `c(λ)`, `s(λ)`, `c'(1, λ)`, `s'(1, λ)`.
pub fn transfer_at(q: &Potential, lambda: f64) -> Result<TransferValues> {
    fundamental_at(q, lambda, 1.0, Method::Auto)
}

/// Same as [`transfer_at`] but always through the adaptive integrator.
pub fn transfer_by_integration(q: &Potential, lambda: f64) -> Result<TransferValues> {
    fundamental_at(q, lambda, 1.0, Method::Integrate)
}

/// Fundamental solutions `c(x, λ)`, `s(x, λ)` and derivatives at `x ∈ [0, 1]`.
pub fn fundamental_at(
    q: &Potential,
    lambda: f64,
    x: f64,
    method: Method,
) -> Result<TransferValues> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            value: lambda,
            what: format!("transfer at x = {x}"),
        });
    }
    match (q, method) {
        (Potential::Zero, Method::Auto) => {
            let (m, l) = constant_interval(lambda, x);
            TransferValues::from_raw(lambda, x, [m[0][0], m[1][0], m[0][1], m[1][1]], l)
        }
        (
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            },
            Method::Auto,
        ) => {
            let (m, l) = piecewise_product(breakpoints, values, lambda, x);
            TransferValues::from_raw(lambda, x, [m[0][0], m[1][0], m[0][1], m[1][1]], l)
        }
        _ => {
            let st = ode::integrate(q, lambda, x, ODE_RTOL)?;
            TransferValues::from_raw(lambda, x, st.y, st.log_scale)
        }
    }
}

type Mat2 = [[f64; 2]; 2];

/// Transfer matrix of `u'' = -(λ - V) u` over length `h` with `V = 0`, i.e.
/// `k² = λ`; returned as `(matrix, log_scale)`.
fn constant_interval(k2: f64, h: f64) -> (Mat2, f64) {
    if k2 >= 0.0 {
        let k = k2.sqrt();
        let t = k * h;
        let (sn, cs) = t.sin_cos();
        let sinc_h = if t.abs() < 1e-4 {
            h * (1.0 - t * t / 6.0 + t.powi(4) / 120.0)
        } else {
            sn / k
        };
        ([[cs, sinc_h], [-k * sn, cs]], 0.0)
    } else {
        let kappa = (-k2).sqrt();
        let t = kappa * h;
        if t < 1.0 {
            let sinh_h = if t < 1e-4 {
                h * (1.0 + t * t / 6.0 + t.powi(4) / 120.0)
            } else {
                t.sinh() / kappa
            };
            let ch = t.cosh();
            ([[ch, sinh_h], [kappa * t.sinh(), ch]], 0.0)
        } else {
            // factor out e^t: cosh = e^t (1 + e^{-2t})/2, sinh = e^t (1 - e^{-2t})/2
            let e2 = (-2.0 * t).exp();
            let ch = 0.5 * (1.0 + e2);
            let sh = 0.5 * (1.0 - e2);
            ([[ch, sh / kappa], [kappa * sh, ch]], t)
        }
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn piecewise_product(breakpoints: &[f64], values: &[f64], lambda: f64, x_end: f64) -> (Mat2, f64) {
    let mut m: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    let mut lo = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let hi = breakpoints.get(i).copied().unwrap_or(1.0).min(x_end);
        if hi > lo {
            let (t, l) = constant_interval(lambda - v, hi - lo);
            m = mat_mul(&t, &m);
            log_scale += l;
            let nm = m.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
            m.iter_mut().flatten().for_each(|e| *e /= nm);
            log_scale += nm.ln();
        }
        lo = hi;
        if lo >= x_end {
            break;
        }
    }
    (m, log_scale)
}

/// Strictly increasing Dirichlet eigenvalues `λ_D^1 < λ_D^2 < …` up to a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpectrum {
    pub values: Vec<f64>,
    pub lambda_max: f64,
}

/// Grid step in `μ` for the first sign-change pass.
const DIRICHLET_DMU: f64 = 0.05;
const DIRICHLET_MAX_REFINE: usize = 8;

/// All roots of `s(λ)` in `(-∞, lambda_max]`.
pub fn dirichlet_spectrum(q: &Potential, lambda_max: f64) -> Result<DirichletSpectrum> {
    if !(lambda_max > 0.0) {
        return Err(Error::Precondition(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    // λ_D^1 ≥ π² + min q
    let lo = q.min_value() + std::f64::consts::PI.powi(2) - 1.0;
    let values = if lo >= lambda_max {
        Vec::new()
    } else {
        s_roots_between(q, lo, lambda_max)?
    };
    Ok(DirichletSpectrum { values, lambda_max })
}

/// The first `count` Dirichlet eigenvalues.
pub fn dirichlet_first(q: &Potential, count: usize) -> Result<Vec<f64>> {
    let pi = std::f64::consts::PI;
    // Weyl: λ_D^k ≈ (kπ)² + ∫q, so μ_k ∈ kπ ± O(‖q‖/k); pad generously.
    let mut lmax = ((count as f64 + 1.0) * pi).powi(2) + q.max_value().abs() + 10.0;
    loop {
        let d = dirichlet_spectrum(q, lmax)?;
        if d.values.len() >= count {
            return Ok(d.values[..count].to_vec());
        }
        lmax *= 1.5;
    }
}

fn sign_changes(q: &Potential, mu_a: f64, mu_b: f64, cells: usize) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut prev_mu = mu_a;
    let mut prev = transfer_at(q, lambda_of_mu(mu_a))?.s_hat.signum();
    for i in 1..=cells {
        let mu = mu_a + (mu_b - mu_a) * i as f64 / cells as f64;
        let sg = transfer_at(q, lambda_of_mu(mu))?.s_hat.signum();
        if sg != prev {
            out.push((prev_mu, mu));
        }
        prev = sg;
        prev_mu = mu;
    }
    Ok(out)
}

fn s_roots_between(q: &Potential, lambda_a: f64, lambda_b: f64) -> Result<Vec<f64>> {
    let (mu_a, mu_b) = (mu_of_lambda(lambda_a), mu_of_lambda(lambda_b));
    let mut cells = (((mu_b - mu_a) / DIRICHLET_DMU).ceil() as usize).max(8);
    let mut brackets = sign_changes(q, mu_a, mu_b, cells)?;
    let mut refinements = 0;
    loop {
        let finer = sign_changes(q, mu_a, mu_b, 2 * cells)?;
        if finer.len() == brackets.len() {
            break;
        }
        brackets = finer;
        cells *= 2;
        refinements += 1;
        if refinements > DIRICHLET_MAX_REFINE {
            return Err(Error::RootSearch(format!(
                "Dirichlet scan on [{lambda_a}, {lambda_b}] did not stabilize after {refinements} refinements"
            )));
        }
    }
    let tol = Tolerance::default();
    let mut roots = Vec::with_capacity(brackets.len());
    for (ma, mb) in brackets {
        let r = find_root(
            |l| Ok(transfer_at(q, l)?.s_scaled()),
            lambda_of_mu(ma),
            lambda_of_mu(mb),
            tol,
        )?;
        // simple root: s changes sign across r with a non-vanishing slope
        let h = 1e-6 * r.abs().max(1.0);
        let (sl, sr) = (transfer_at(q, r - h)?.s(), transfer_at(q, r + h)?.s());
        if sl.signum() == sr.signum() || ((sr - sl) / (2.0 * h)).abs() < 1e-14 {
            return Err(Error::RootSearch(format!(
                "Dirichlet root near {r} is not simple"
            )));
        }
        roots.push(r);
    }
    Ok(roots)
}

/// One point of the spiral curve `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralPoint {
    pub mu: f64,
    pub lambda: f64,
    pub y: f64,
    pub z: f64,
}

/// `npts` points of `S`, uniform in `μ` over `[mu_min, mu_max]`.
pub fn sample_spiral(
    q: &Potential,
    mu_min: f64,
    mu_max: f64,
    npts: usize,
) -> Result<Vec<SpiralPoint>> {
    if !(mu_min < mu_max) || npts < 2 {
        return Err(Error::Precondition(
            "sample_spiral needs mu_min < mu_max and npts ≥ 2".into(),
        ));
    }
    (0..npts)
        .map(|i| {
            let mu = mu_min + (mu_max - mu_min) * i as f64 / (npts - 1) as f64;
            let lambda = lambda_of_mu(mu);
            let t = transfer_at(q, lambda)?;
            Ok(SpiralPoint {
                mu,
                lambda,
                y: t.c(),
                z: t.s(),
            })
        })
        .collect()
}
