//! Real numbers carried as `mantissa · e^scale`.
//!
//! Rogue eigenvalues sit near `λ ≈ -α²`, where `c(λ) ~ e^{|α|}`; determinant
//! recurrences on top of that overflow quickly in plain `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `mantissa · e^log_scale`, with `|mantissa| ∈ [1/2, 1)` unless zero.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        log_scale: 0.0,
    };
    pub const ONE: Scaled = Scaled {
        mantissa: 0.5,
        log_scale: std::f64::consts::LN_2,
    };

    pub fn new(mantissa: f64, log_scale: f64) -> Self {
        Scaled {
            mantissa,
            log_scale,
        }
        .normalized()
    }

    pub fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    fn normalized(self) -> Self {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            return Scaled {
                mantissa: self.mantissa,
                log_scale: if self.mantissa == 0.0 {
                    0.0
                } else {
                    self.log_scale
                },
            };
        }
        let e = self.mantissa.abs().log2().floor() + 1.0;
        Scaled {
            mantissa: self.mantissa * (-e).exp2(),
            log_scale: self.log_scale + e * std::f64::consts::LN_2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(&self) -> i8 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.log_scale
        }
    }

    /// Plain value; may overflow to `±inf` or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.mantissa * self.log_scale.exp()
        }
    }

    pub fn abs(self) -> Self {
        Scaled {
            mantissa: self.mantissa.abs(),
            log_scale: self.log_scale,
        }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.mantissa * k, self.log_scale)
    }

    /// Multiplies by `e^t`.
    pub fn shift(self, t: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Scaled {
                mantissa: self.mantissa,
                log_scale: self.log_scale + t,
            }
        }
    }

    pub fn recip(self) -> Self {
        Self::new(1.0 / self.mantissa, -self.log_scale)
    }

    pub fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }

    /// Ratio as a plain number, without intermediate overflow.
    pub fn ratio(self, rhs: Self) -> f64 {
        self.div(rhs).to_f64()
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.ln_abs()
            .partial_cmp(&other.ln_abs())
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Debug for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·e^{}", self.mantissa, self.log_scale)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_f64(x)
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_scale >= rhs.log_scale {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.log_scale - big.log_scale;
        Scaled::new(big.mantissa + small.mantissa * d.exp(), big.log_scale)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        if self.is_zero() || rhs.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: f64) -> Scaled {
        self.scale(rhs)
    }
}
