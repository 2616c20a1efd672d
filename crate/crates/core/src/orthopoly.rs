//! The polynomials `P_n`, `Q_n` of `P_n = v P_{n-1} - b P_{n-2}`, their roots,
//! the Gaussian quadrature measure `ψ_n`, moments and limiting root density.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Distance from `|v| = 2√b` inside which the closed form is not used.
const CLOSED_FORM_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyParams {
    pub b: f64,
    pub n: usize,
}

impl PolyParams {
    pub fn new(b: f64, n: usize) -> Result<Self> {
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "branching factor must exceed 1, got {b}"
            )));
        }
        Ok(PolyParams { b, n })
    }

    /// Half-width `2√b` of the oscillatory region.
    pub fn edge(&self) -> f64 {
        2.0 * self.b.sqrt()
    }
}

/// `(P_n(v), Q_n(v))` by the three-term recurrence.
pub fn pq_eval(params: PolyParams, v: f64) -> (f64, f64) {
    let b = params.b;
    // (P_{k-1}, P_k) and (Q_{k-1}, Q_k), starting at k = 0
    let (mut p0, mut p1) = (0.0, 1.0);
    let (mut q0, mut q1) = (1.0, 0.0);
    for _ in 0..params.n {
        let p2 = v * p1 - b * p0;
        let q2 = v * q1 - b * q0;
        (p0, p1, q0, q1) = (p1, p2, q1, q2);
    }
    (p1, q1)
}

/// `(P_n(v), Q_n(v))` from `ξ + ξ⁻¹ = v/√b`, `|ξ| ≥ 1`:
/// `P_n = b^{n/2}(ξ^{n+1} − ξ^{−n−1})/(ξ − ξ⁻¹)`, `Q_n = −b^{(n+1)/2}(ξ^n − ξ^{−n})/(ξ − ξ⁻¹)`.
/// Falls back to the recurrence within `1e-6` of `|v| = 2√b`.
pub fn pq_closed_form(params: PolyParams, v: f64) -> (f64, f64) {
    let PolyParams { b, n } = params;
    let t = v / b.sqrt();
    if (t.abs() - 2.0).abs() <= CLOSED_FORM_GUARD {
        return pq_eval(params, v);
    }
    let nf = n as f64;
    // u_m = (ξ^m − ξ^{−m})/(ξ − ξ⁻¹)
    let u: Box<dyn Fn(f64) -> f64> = if t.abs() > 2.0 {
        let xi = 0.5 * (t + t.signum() * (t * t - 4.0).sqrt());
        Box::new(move |m: f64| (xi.powf(m) - xi.powf(-m)) / (xi - 1.0 / xi))
    } else {
        let theta = (0.5 * t).acos();
        Box::new(move |m: f64| (m * theta).sin() / theta.sin())
    };
    (
        b.powf(nf / 2.0) * u(nf + 1.0),
        -b.powf((nf + 1.0) / 2.0) * u(nf),
    )
}

fn jacobi_eigen(b: f64, n: usize, vectors: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
    if n == 0 {
        return (Vec::new(), None);
    }
    let off = b.sqrt();
    let m = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { off } else { 0.0 });
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = vectors.then(|| eig.eigenvectors.select_columns(idx.iter()));
    (vals, vecs)
}

/// Increasing roots of `P_n` (`v_{n1} < … < v_{nn}`) and of `Q_n`
/// (`w_{n1} < … < w_{n,n-1}`, the roots of `P_{n-1}`).
pub fn pq_roots(params: PolyParams) -> (Vec<f64>, Vec<f64>) {
    let (p, _) = jacobi_eigen(params.b, params.n, false);
    let (q, _) = jacobi_eigen(params.b, params.n.saturating_sub(1), false);
    (symmetrize(p), symmetrize(q))
}

/// Roots come in `±` pairs; average each pair to make that exact.
fn symmetrize(mut r: Vec<f64>) -> Vec<f64> {
    let m = r.len();
    for i in 0..m / 2 {
        let a = 0.5 * (r[m - 1 - i] - r[i]);
        r[i] = -a;
        r[m - 1 - i] = a;
    }
    if m % 2 == 1 {
        r[m / 2] = 0.0;
    }
    r
}

/// True when `a` and `b` strictly alternate, with `a` outermost when
/// `a.len() == b.len() + 1`.
pub fn strictly_interlace(a: &[f64], b: &[f64]) -> bool {
    let mut merged: Vec<(f64, u8)> = a
        .iter()
        .map(|&x| (x, 0))
        .chain(b.iter().map(|&x| (x, 1)))
        .collect();
    merged.sort_by(|x, y| x.0.total_cmp(&y.0));
    merged
        .windows(2)
        .all(|w| w[0].1 != w[1].1 && w[0].0 < w[1].0)
}

/// Gaussian quadrature for `ψ_n`: nodes are the roots of `P_n`, weights the
/// squared first components of the normalized Jacobi eigenvectors (`μ₀ = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMeasure {
    pub params: PolyParams,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `μ_k^(n)` for `k = 0..2n-1`.
    pub moments: Vec<f64>,
}

impl QuadratureMeasure {
    pub fn moment(&self, k: usize) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.powi(k as i32))
            .sum()
    }
}

pub fn quadrature_measure(params: PolyParams) -> Result<QuadratureMeasure> {
    if params.n == 0 {
        return Err(Error::Precondition("quadrature needs n ≥ 1".into()));
    }
    let (nodes, vecs) = jacobi_eigen(params.b, params.n, true);
    let vecs = vecs.expect("eigenvectors requested");
    let raw: Vec<f64> = (0..params.n).map(|j| vecs[(0, j)].powi(2)).collect();
    let total: f64 = raw.iter().sum();
    let mut q = QuadratureMeasure {
        params,
        nodes,
        weights: raw.iter().map(|w| w / total).collect(),
        moments: Vec::new(),
    };
    q.moments = (0..2 * params.n).map(|k| q.moment(k)).collect();
    Ok(q)
}

/// Limiting root density `2√b / (π√(4b − v²))` as printed; its total mass is `2√b`.
pub fn limiting_root_density(b: f64, v: f64) -> Result<f64> {
    let d = 4.0 * b - v * v;
    if !(d > 0.0) {
        return Err(Error::Domain {
            value: v,
            what: format!("root density needs |v| < 2√b = {}", 2.0 * b.sqrt()),
        });
    }
    Ok(2.0 * b.sqrt() / (PI * d.sqrt()))
}

/// Probability-normalized root density `1 / (π√(4b − v²))`.
pub fn normalized_root_density(b: f64, v: f64) -> Result<f64> {
    Ok(limiting_root_density(b, v)? / (2.0 * b.sqrt()))
}

/// Density of the orthogonality measure `dψ` with `μ₀ = 1`:
/// `√(4b − v²) / (2πb)`, whose even moments are `C_m b^m` (Catalan numbers).
pub fn orthogonality_density(b: f64, v: f64) -> f64 {
    let d = 4.0 * b - v * v;
    if d <= 0.0 {
        0.0
    } else {
        d.sqrt() / (2.0 * PI * b)
    }
}

/// Leading monomials `(power, coefficient)` of `P_n` and `Q_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingCoefficients {
    pub p: Vec<(usize, f64)>,
    pub q: Vec<(usize, f64)>,
}

pub fn leading_coefficients(params: PolyParams, num_terms: usize) -> Result<LeadingCoefficients> {
    if num_terms > 4 {
        return Err(Error::Precondition(format!(
            "at most 4 leading terms are available, asked for {num_terms}"
        )));
    }
    if params.n == 0 {
        return Err(Error::Precondition(
            "leading coefficients need n ≥ 1".into(),
        ));
    }
    let PolyParams { b, n } = params;
    let nf = n as f64;
    let p_poly = [
        1.0,
        nf - 1.0,
        (nf - 3.0) * (nf - 2.0) / 2.0,
        (nf - 5.0) * (nf - 4.0) * (nf - 3.0) / 6.0,
    ];
    let q_poly = [
        1.0,
        nf - 2.0,
        (nf - 4.0) * (nf - 3.0) / 2.0,
        (nf - 6.0) * (nf - 5.0) * (nf - 4.0) / 6.0,
    ];
    let mut p = Vec::new();
    let mut q = Vec::new();
    for j in 0..num_terms {
        let sign_pow = (-b).powi(j as i32);
        if n >= 2 * j {
            p.push((n - 2 * j, sign_pow * p_poly[j]));
        }
        if n >= 2 * j + 1 {
            q.push((n - 1 - 2 * j, -b * sign_pow * q_poly[j]));
        }
    }
    Ok(LeadingCoefficients { p, q })
}

/// Both sides of `−bP_{n+1}(v)/(vQ_{n+1}(v)) = 1 − b v⁻² Σ_{j ≤ truncation} μ_j^(n) v^{−j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl RatioCheck {
    pub fn error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn ratio_expansion_check(params: PolyParams, v: f64, truncation: usize) -> Result<RatioCheck> {
    if v.abs() <= params.edge() {
        return Err(Error::Domain {
            value: v,
            what: "ratio expansion needs |v| > 2√b".into(),
        });
    }
    if truncation + 1 > 2 * params.n {
        return Err(Error::Precondition(format!(
            "truncation {truncation} exceeds 2n − 1 = {}",
            2 * params.n as i64 - 1
        )));
    }
    let m = quadrature_measure(params)?;
    let next = PolyParams {
        n: params.n + 1,
        ..params
    };
    let (p, q) = pq_eval(next, v);
    let lhs = -params.b * p / (v * q);
    let series: f64 = (0..=truncation)
        .map(|j| m.moments[j] * v.powi(-(j as i32)))
        .sum();
    Ok(RatioCheck {
        lhs,
        rhs: 1.0 - params.b * series / (v * v),
    })
}

#[cfg(test)]
mod tests;
