//! Edge potentials `q(x)` on `[0, 1]`, symmetric about `x = 1/2`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance for mirror symmetry of piecewise-constant data.
const SYMMETRY_TOL: f64 = 1e-12;
/// Sampled data deviating more than this from symmetry triggers a warning.
const SAMPLED_WARN_TOL: f64 = 1e-8;

/// Wire representation; validated into [`Potential`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PotentialRepr {
    Zero,
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Sampled {
        values: Vec<f64>,
    },
}

/// A bounded, mirror-symmetric edge potential.
///
/// `PiecewiseConstant` holds `m` increasing breakpoints in `(0, 1)` and the
/// `m + 1` constant values between them.  `Sampled` holds values on the
/// uniform grid `x_i = i / (len - 1)` and is linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialRepr", into = "PotentialRepr")]
pub enum Potential {
    Zero,
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Sampled {
        values: Vec<f64>,
    },
}

impl TryFrom<PotentialRepr> for Potential {
    type Error = Error;

    fn try_from(r: PotentialRepr) -> Result<Self> {
        match r {
            PotentialRepr::Zero => Ok(Potential::Zero),
            PotentialRepr::PiecewiseConstant {
                breakpoints,
                values,
            } => Potential::piecewise_constant(breakpoints, values),
            PotentialRepr::Sampled { values } => Potential::sampled(values),
        }
    }
}

impl From<Potential> for PotentialRepr {
    fn from(p: Potential) -> Self {
        match p {
            Potential::Zero => PotentialRepr::Zero,
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => PotentialRepr::PiecewiseConstant {
                breakpoints,
                values,
            },
            Potential::Sampled { values } => PotentialRepr::Sampled { values },
        }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Potential::Zero
    }

    /// Validated piecewise-constant potential; asymmetric data is rejected.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidPotential(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if values.iter().chain(&breakpoints).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite entry".into()));
        }
        if breakpoints.iter().any(|&x| x <= 0.0 || x >= 1.0) {
            return Err(Error::InvalidPotential(
                "breakpoints must lie in (0, 1)".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPotential(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let m = breakpoints.len();
        for i in 0..m {
            if (breakpoints[i] - (1.0 - breakpoints[m - 1 - i])).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidPotential(
                    "breakpoints are not mirror-symmetric".into(),
                ));
            }
        }
        for i in 0..values.len() {
            let j = values.len() - 1 - i;
            if (values[i] - values[j]).abs() > SYMMETRY_TOL * (1.0 + values[i].abs()) {
                return Err(Error::InvalidPotential(
                    "values are not mirror-symmetric".into(),
                ));
            }
        }
        Ok(Potential::PiecewiseConstant {
            breakpoints,
            values,
        })
    }

    /// Sampled potential on a uniform grid, symmetrized by averaging `q(x)` and `q(1-x)`.
    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPotential("need at least two samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("non-finite sample".into()));
        }
        let n = values.len();
        let dev = (0..n)
            .map(|i| (values[i] - values[n - 1 - i]).abs())
            .fold(0.0, f64::max);
        if dev > SAMPLED_WARN_TOL {
            log::warn!("sampled potential asymmetric by {dev:.3e}; symmetrizing");
        }
        let sym = (0..n)
            .map(|i| 0.5 * (values[i] + values[n - 1 - i]))
            .collect();
        Ok(Potential::Sampled { values: sym })
    }

    /// `V·χ_[1/3, 2/3]`, the step potential used throughout the examples.
    pub fn centered_step(v: f64) -> Self {
        Potential::PiecewiseConstant {
            breakpoints: vec![1.0 / 3.0, 2.0 / 3.0],
            values: vec![0.0, v, 0.0],
        }
    }

    /// Samples `f` on `npts` uniform grid points (then symmetrizes).
    pub fn sample_fn<F: Fn(f64) -> f64>(f: F, npts: usize) -> Result<Self> {
        let npts = npts.max(2);
        Self::sampled((0..npts).map(|i| f(i as f64 / (npts - 1) as f64)).collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("potential serializes")
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::PiecewiseConstant { values, .. } | Potential::Sampled { values } => {
                values.iter().all(|&v| v == 0.0)
            }
        }
    }

    /// Point value; right-continuous at breakpoints.
    pub fn value_at(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let i = breakpoints.partition_point(|&bp| bp <= x);
                values[i]
            }
            Potential::Sampled { values } => {
                let m = (values.len() - 1) as f64;
                let t = (x.clamp(0.0, 1.0) * m).min(m);
                let i = (t.floor() as usize).min(values.len() - 2);
                let w = t - i as f64;
                values[i] * (1.0 - w) + values[i + 1] * w
            }
        }
    }

    /// Breakpoints at which `q` or its derivative may jump, including `0` and `1`.
    pub fn knots(&self) -> Vec<f64> {
        let mut k = vec![0.0];
        match self {
            Potential::Zero => {}
            Potential::PiecewiseConstant { breakpoints, .. } => k.extend_from_slice(breakpoints),
            Potential::Sampled { values } => {
                let m = values.len() - 1;
                k.extend((1..m).map(|i| i as f64 / m as f64));
            }
        }
        k.push(1.0);
        k
    }

    /// Exact integral of `q` over `[a, b] ⊂ [0, 1]`.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let knots = self.knots();
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (lo, hi) = (w[0].max(a), w[1].min(b));
            if hi > lo {
                // q is affine on each knot interval: midpoint rule is exact
                let mid = 0.5 * (lo + hi);
                let qm = match self {
                    Potential::PiecewiseConstant { .. } => self.value_at(0.5 * (w[0] + w[1])),
                    _ => self.value_at(mid),
                };
                total += qm * (hi - lo);
            }
        }
        total
    }

    pub fn integral(&self) -> f64 {
        self.integral_over(0.0, 1.0)
    }

    pub fn min_value(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::PiecewiseConstant { values, .. } | Potential::Sampled { values } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::PiecewiseConstant { values, .. } | Potential::Sampled { values } => {
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }
}
