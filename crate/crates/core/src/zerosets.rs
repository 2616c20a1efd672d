//! Components `C_n^k` / `C̊_n^k` of the zero sets of the secular determinants,
//! their slanted-strip constraints and the rogue asymptotes.
//!
//! At fixed `z`, `D_n(·, z)` vanishes exactly at the eigenvalues of a
//! symmetric tridiagonal matrix; at fixed `y` the same holds in `z`.  Both
//! follow from writing `M_n = yA + αz + N` with `A = diag(b, b+1, …, b+1, 1)`
//! and `N` the constant off-diagonal part, then symmetrizing.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::determinants::{GraphParams, RootCondition};
use crate::orthopoly::pq_roots;
use crate::{Error, Result};

/// Ordinates beyond this are reported as a truncated trace.
const TRACE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    ConstrainedStrip,
    Rogue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComponent {
    pub k: usize,
    pub kind: ComponentKind,
    /// `(z, y)` samples, increasing in `z`.
    pub points: Vec<(f64, f64)>,
    pub truncated: bool,
}

impl CurveComponent {
    pub fn is_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 > w[0].1)
    }

    pub fn is_monotone(&self) -> bool {
        self.is_strictly_increasing() || self.points.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// Diagonal of `A` restricted to the rows that carry unknowns.
fn a_diag(params: &GraphParams) -> Vec<f64> {
    let n = params.n;
    let b = params.b;
    let full = (0..=n).map(|i| {
        if i == 0 {
            b
        } else if i == n {
            1.0
        } else {
            b + 1.0
        }
    });
    match params.root_condition {
        RootCondition::Robin => full.collect(),
        RootCondition::Dirichlet => full.skip(1).collect(),
    }
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Smallest valid component index: `0` (Robin) or `1` (Dirichlet root).
pub fn first_index(params: &GraphParams) -> usize {
    match params.root_condition {
        RootCondition::Robin => 0,
        RootCondition::Dirichlet => 1,
    }
}

/// Number of components: `n + 1` (Robin) or `n` (Dirichlet root).
pub fn component_count(params: &GraphParams) -> usize {
    a_diag(params).len()
}

fn check_index(params: &GraphParams, k: usize) -> Result<usize> {
    let lo = first_index(params);
    if k < lo || k > params.n {
        return Err(Error::Precondition(format!(
            "component index {k} outside {lo}..={}",
            params.n
        )));
    }
    Ok(k - lo)
}

/// Increasing `y` with `D_n(y, z) = 0`; entry `r` lies on component `r + first_index`.
pub fn y_roots_at(params: &GraphParams, z: f64) -> Vec<f64> {
    let a = a_diag(params);
    let m = a.len();
    let sb = params.b.sqrt();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            -params.alpha * z / a[i]
        } else if i.abs_diff(j) == 1 {
            sb / (a[i] * a[j]).sqrt()
        } else {
            0.0
        }
    });
    sorted_eigenvalues(t)
}

/// Increasing `z` with `D_n(y, z) = 0` (needs `α ≠ 0`). Components are
/// increasing graphs, so the largest `z` belongs to the lowest index.
pub fn z_roots_at(params: &GraphParams, y: f64) -> Result<Vec<f64>> {
    if params.alpha == 0.0 {
        return Err(Error::Precondition("z-roots need α ≠ 0".into()));
    }
    let a = a_diag(params);
    let m = a.len();
    let (al, sb) = (params.alpha, params.b.sqrt());
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            -y * a[i] / al
        } else if i.abs_diff(j) == 1 {
            sb / al
        } else {
            0.0
        }
    });
    Ok(sorted_eigenvalues(t))
}

/// `g_n^k(z)`.
pub fn component_y_at(params: &GraphParams, k: usize, z: f64) -> Result<f64> {
    let r = check_index(params, k)?;
    Ok(y_roots_at(params, z)[r])
}

/// The `z` at which component `k` reaches height `y`.
pub fn component_z_at(params: &GraphParams, k: usize, y: f64) -> Result<f64> {
    let r = check_index(params, k)?;
    let zs = z_roots_at(params, y)?;
    // for α < 0 the graphs increase in z, so higher components are reached first
    Ok(if params.alpha < 0.0 {
        zs[zs.len() - 1 - r]
    } else {
        zs[r]
    })
}

/// Index of the component containing the reflection `(−y, −z)` of component `k`'s points.
pub fn mirror_index(params: &GraphParams, k: usize) -> usize {
    let lo = first_index(params);
    params.n + lo - k
}

pub fn component_kind(params: &GraphParams, k: usize) -> ComponentKind {
    let rogue = params.alpha != 0.0
        && match params.root_condition {
            RootCondition::Robin => k + 1 >= params.n,
            RootCondition::Dirichlet => k == params.n,
        };
    if rogue {
        ComponentKind::Rogue
    } else {
        ComponentKind::ConstrainedStrip
    }
}

pub fn trace_component(
    params: &GraphParams,
    k: usize,
    z_range: (f64, f64),
    npts: usize,
) -> Result<CurveComponent> {
    check_index(params, k)?;
    let (z0, z1) = z_range;
    if !(z0 < z1) || npts < 2 {
        return Err(Error::Precondition(
            "trace needs z_min < z_max and npts ≥ 2".into(),
        ));
    }
    let mut points = Vec::with_capacity(npts);
    let mut truncated = false;
    for i in 0..npts {
        let z = z0 + (z1 - z0) * i as f64 / (npts - 1) as f64;
        let y = component_y_at(params, k, z)?;
        if !y.is_finite() || y.abs() > TRACE_LIMIT {
            truncated = true;
            continue;
        }
        points.push((z, y));
    }
    Ok(CurveComponent {
        k,
        kind: component_kind(params, k),
        points,
        truncated,
    })
}

/// Result of a slanted-strip test for one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripCheck {
    pub v: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub inside: bool,
    /// Which ordinate range of the table applied.
    pub branch: StripBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripBranch {
    /// `−1 < y < 1` (Robin) or `y < 0` (Dirichlet root).
    Lower,
    /// `y > 1` (Robin) or `y > 0` (Dirichlet root).
    Upper,
}

/// Tests `v = (b+1)y + αz` against the strip table of component `k`,
/// valid for `α < 0`, `z > 0`.
pub fn strip_membership(params: &GraphParams, k: usize, point: (f64, f64)) -> Result<StripCheck> {
    check_index(params, k)?;
    let (y, z) = point;
    if !(params.alpha < 0.0) {
        return Err(Error::Precondition(format!(
            "strip table needs α < 0, got {}",
            params.alpha
        )));
    }
    if !(z > 0.0) {
        return Err(Error::Precondition(format!(
            "strip table needs z > 0, got {z}"
        )));
    }
    let n = params.n;
    let (vr, wr) = pq_roots(params.poly());
    // one-based accessors v_{nj}, w_{nj}
    let vj = |j: usize| vr[j - 1];
    let wj = |j: usize| wr[j - 1];
    let bp1 = params.b + 1.0;
    let (branch, lower, upper) = match params.root_condition {
        RootCondition::Robin => {
            if y > 1.0 {
                let (lo, hi) = if k == n {
                    (bp1, None)
                } else if k == n - 1 {
                    (vj(n), None)
                } else {
                    (vj(k + 1), Some(wj(k + 1)))
                };
                (StripBranch::Upper, Some(lo), hi)
            } else if y > -1.0 && y < 1.0 && k < n {
                let lo = if k == 0 { -bp1 } else { wj(k) };
                (StripBranch::Lower, Some(lo), Some(vj(k + 1)))
            } else {
                return Err(Error::Precondition(format!(
                    "no strip listed for component {k} at y = {y}"
                )));
            }
        }
        RootCondition::Dirichlet => {
            if y > 0.0 {
                let hi = if k == n { None } else { Some(wj(k)) };
                (StripBranch::Upper, Some(vj(k)), hi)
            } else if y < 0.0 {
                let lo = if k == 1 { -bp1 } else { wj(k - 1) };
                (StripBranch::Lower, Some(lo), Some(vj(k)))
            } else {
                return Err(Error::Precondition("no strip listed at y = 0".into()));
            }
        }
    };
    let v = params.v(y, z);
    let inside = lower.is_none_or(|l| v > l) && upper.is_none_or(|u| v < u);
    Ok(StripCheck {
        v,
        lower,
        upper,
        inside,
        branch,
    })
}

/// Unconstrained components with a straight-line asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RogueCurve {
    /// `C_n^n`, slope constant `β = 1`.
    Top,
    /// `C_n^{n−1}`, `β = b`.
    Second,
    /// `C̊_n^n`, `β = 1`.
    DirichletTop,
}

impl RogueCurve {
    pub fn beta(&self, b: f64) -> f64 {
        match self {
            RogueCurve::Second => b,
            _ => 1.0,
        }
    }

    /// Component index and root condition the curve belongs to.
    pub fn locate(&self, n: usize) -> (usize, RootCondition) {
        match self {
            RogueCurve::Top => (n, RootCondition::Robin),
            RogueCurve::Second => (n - 1, RootCondition::Robin),
            RogueCurve::DirichletTop => (n, RootCondition::Dirichlet),
        }
    }
}

/// `z = −β(y − y⁻¹)/α`.
pub fn rogue_asymptote(kind: RogueCurve, b: f64, alpha: f64, y: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::Precondition("rogue asymptotes need α ≠ 0".into()));
    }
    if !(b >= 2.0) {
        return Err(Error::Precondition(format!(
            "rogue asymptotes need b ≥ 2, got {b}"
        )));
    }
    if !(y > 1.0) {
        return Err(Error::Precondition(format!(
            "rogue asymptotes need y > 1, got {y}"
        )));
    }
    let beta = kind.beta(b);
    Ok(-(beta * y - beta / y) / alpha)
}

/// `|z_traced − z_asymptote|` for a rogue curve at height `y`.
pub fn rogue_defect(kind: RogueCurve, n: usize, b: f64, alpha: f64, y: f64) -> Result<f64> {
    let (k, rc) = kind.locate(n);
    let params = GraphParams::new(n, b, alpha, rc)?;
    let z = component_z_at(&params, k, y)?;
    Ok((z - rogue_asymptote(kind, b, alpha, y)?).abs())
}

/// Roundoff floor of a traced ordinate of size `z`.
pub fn trace_roundoff(z: f64) -> f64 {
    64.0 * f64::EPSILON * z.abs().max(1.0)
}
