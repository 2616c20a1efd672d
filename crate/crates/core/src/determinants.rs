//! Secular determinants `D_n(y, z)` (Robin root) and `D̊_n(y, z)` (Dirichlet
//! root), evaluated by the renormalized recurrence
//! `D_k = v D_{k-1} − b D_{k-2}`, `v = (b+1)y + αz`, by composition with
//! `P_n`, `Q_n`, and by an explicit tridiagonal determinant.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::orthopoly::{pq_eval, PolyParams};
use crate::potential::Potential;
use crate::transfer::{transfer_at, TransferValues};
use crate::{Error, Result, Scaled};

/// Largest `n` accepted by [`dd_matrix_det`].
pub const MATRIX_DET_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCondition {
    Robin,
    Dirichlet,
}

impl std::fmt::Display for RootCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RootCondition::Robin => "robin",
            RootCondition::Dirichlet => "dirichlet",
        })
    }
}

impl std::str::FromStr for RootCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "robin" => Ok(RootCondition::Robin),
            "dirichlet" => Ok(RootCondition::Dirichlet),
            other => Err(Error::InvalidParams(format!(
                "unknown root condition {other:?}"
            ))),
        }
    }
}

/// Linear graph `B_n` (Robin root) or `B̊_n` (Dirichlet root).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub n: usize,
    pub b: f64,
    pub alpha: f64,
    pub root_condition: RootCondition,
}

impl GraphParams {
    pub fn new(n: usize, b: f64, alpha: f64, root_condition: RootCondition) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams(
                "level count n must be at least 1".into(),
            ));
        }
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "branching factor must exceed 1, got {b}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Robin parameter must be finite, got {alpha}"
            )));
        }
        Ok(GraphParams {
            n,
            b,
            alpha,
            root_condition,
        })
    }

    pub fn robin(n: usize, b: f64, alpha: f64) -> Result<Self> {
        Self::new(n, b, alpha, RootCondition::Robin)
    }

    pub fn dirichlet(n: usize, b: f64, alpha: f64) -> Result<Self> {
        Self::new(n, b, alpha, RootCondition::Dirichlet)
    }

    pub fn with_root(self, root_condition: RootCondition) -> Self {
        GraphParams {
            root_condition,
            ..self
        }
    }

    pub fn with_n(self, n: usize) -> Self {
        GraphParams { n, ..self }
    }

    pub fn poly(&self) -> PolyParams {
        PolyParams {
            b: self.b,
            n: self.n,
        }
    }

    /// `v = (b+1)y + αz`.
    pub fn v(&self, y: f64, z: f64) -> f64 {
        (self.b + 1.0) * y + self.alpha * z
    }
}

/// Overflow-safe determinant value `value_hat · e^log_scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularValue {
    pub value_hat: f64,
    pub log_scale: f64,
    pub sign: i8,
}

impl From<Scaled> for SecularValue {
    fn from(s: Scaled) -> Self {
        SecularValue {
            value_hat: s.mantissa,
            log_scale: s.log_scale,
            sign: s.signum(),
        }
    }
}

impl From<SecularValue> for Scaled {
    fn from(v: SecularValue) -> Self {
        Scaled::new(v.value_hat, v.log_scale)
    }
}

impl SecularValue {
    pub fn to_f64(&self) -> f64 {
        Scaled::from(*self).to_f64()
    }
}

/// Runs the recurrence from `(D_{-1}, D_0)` for `n` steps.
fn run(n: usize, b: f64, v: Scaled, mut prev: Scaled, mut cur: Scaled) -> Scaled {
    for _ in 0..n {
        let next = v * cur - prev * b;
        prev = cur;
        cur = next;
    }
    cur
}

fn initial(params: &GraphParams, y: Scaled, z: Scaled) -> (Scaled, Scaled) {
    match params.root_condition {
        RootCondition::Robin => (Scaled::ONE - y * y, z * params.alpha),
        RootCondition::Dirichlet => (y, Scaled::ONE),
    }
}

/// Determinant at scaled arguments; the workhorse behind [`dd_eval`] and [`secular_at`].
pub fn dd_eval_scaled(params: &GraphParams, y: Scaled, z: Scaled) -> Scaled {
    let v = y * (params.b + 1.0) + z * params.alpha;
    let (prev, cur) = initial(params, y, z);
    run(params.n, params.b, v, prev, cur)
}

pub fn dd_eval(params: &GraphParams, y: f64, z: f64) -> SecularValue {
    dd_eval_scaled(params, Scaled::from_f64(y), Scaled::from_f64(z)).into()
}

/// `αz P_n(v) + (1−y²) Q_n(v)` or `P_n(v) + y Q_n(v)`.
pub fn dd_via_pq(params: &GraphParams, y: f64, z: f64) -> f64 {
    let (p, q) = pq_eval(params.poly(), params.v(y, z));
    match params.root_condition {
        RootCondition::Robin => params.alpha * z * p + (1.0 - y * y) * q,
        RootCondition::Dirichlet => p + y * q,
    }
}

/// The `(n+1)×(n+1)` tridiagonal matrix `M_n` or `M̊_n`.
pub fn secular_matrix(params: &GraphParams, y: f64, z: f64) -> DMatrix<f64> {
    let n = params.n;
    let (b, a) = (params.b, params.alpha);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        m[(i, i)] = if i == n {
            y + a * z
        } else if i == 0 {
            match params.root_condition {
                RootCondition::Robin => b * y + a * z,
                RootCondition::Dirichlet => 1.0,
            }
        } else {
            (b + 1.0) * y + a * z
        };
        if i < n {
            m[(i + 1, i)] = -1.0;
            let dirichlet_row = i == 0 && params.root_condition == RootCondition::Dirichlet;
            m[(i, i + 1)] = if dirichlet_row { 0.0 } else { -b };
        }
    }
    m
}

/// LU determinant of [`secular_matrix`]; oracle only.
pub fn dd_matrix_det(params: &GraphParams, y: f64, z: f64) -> Result<f64> {
    if params.n > MATRIX_DET_CAP {
        return Err(Error::SizeCap {
            size: params.n,
            cap: MATRIX_DET_CAP,
        });
    }
    Ok(secular_matrix(params, y, z).lu().determinant())
}

/// `D_n(c(λ), s(λ))` or `D̊_n(c(λ), s(λ))`.
pub fn secular_at(params: &GraphParams, q: &Potential, lambda: f64) -> Result<SecularValue> {
    Ok(secular_of(params, &transfer_at(q, lambda)?).into())
}

pub fn secular_of(params: &GraphParams, t: &TransferValues) -> Scaled {
    dd_eval_scaled(params, t.c_scaled(), t.s_scaled())
}

/// `F(λ) = D_n(c, s)/s` for the Robin root, free of the poles at `σ_D`:
/// the same recurrence started from `(−c', α)`, using `1 − c² = −s c'`.
pub fn reduced_secular(params: &GraphParams, t: &TransferValues) -> Scaled {
    let v = t.v_scaled(params.b, params.alpha);
    run(
        params.n,
        params.b,
        v,
        -t.cp_scaled(),
        Scaled::from_f64(params.alpha),
    )
}
