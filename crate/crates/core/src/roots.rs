//! Bracketed scalar root finding.
//!
//! Secant (Illinois variant) with a bisection fallback whenever the secant
//! step fails to halve the bracket.  Function values are [`Scaled`] so that
//! secular determinants can be bracketed without ever exponentiating.

use crate::{Error, Result, Scaled};

/// Relative tolerance used for every polished root in the crate.
pub const ROOT_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-300,
            rel: ROOT_RTOL,
            max_iter: 400,
        }
    }
}

impl Tolerance {
    fn done(&self, a: f64, b: f64) -> bool {
        let scale = a.abs().max(b.abs());
        (b - a).abs() <= self.abs + self.rel * scale || (a + b) / 2.0 == a || (a + b) / 2.0 == b
    }
}

/// Root of `f` in `[a, b]`; `f(a)` and `f(b)` must have opposite signs.
pub fn find_root<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<Scaled>,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa.is_zero() {
        return Ok(a);
    }
    if fb.is_zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootSearch(format!("no sign change on [{a}, {b}]")));
    }
    // Illinois bookkeeping: which end was retained last time.
    let mut side = 0i8;
    for _ in 0..tol.max_iter {
        if tol.done(a, b) {
            break;
        }
        let width = b - a;
        // secant point x = b - fb (b - a)/(fb - fa), computed on ratios
        let t = fb.ratio(fb - fa);
        let mut x = b - t * width;
        if !x.is_finite() || x <= a || x >= b {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx.is_zero() {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == 1 {
                fa = fa.scale(0.5);
            }
            side = 1;
        } else {
            a = x;
            fa = fx;
            if side == -1 {
                fb = fb.scale(0.5);
            }
            side = -1;
        }
        // Safeguard: force a bisection if the bracket shrank too little.
        if b - a > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm.is_zero() {
                return Ok(m);
            }
            if fm.signum() == fb.signum() {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
            side = 0;
        }
    }
    Ok(0.5 * (a + b))
}

/// [`find_root`] for plain real-valued functions.
pub fn find_root_f64<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    find_root(|x| Ok(Scaled::from_f64(f(x))), a, b, tol)
}

/// Pure bisection on a monotone predicate: the smallest `x` in `[a, b]`
/// (to tolerance) with `pred(x) == true`, assuming `pred(a)` false, `pred(b)` true.
pub fn bisect_predicate<P>(mut pred: P, mut a: f64, mut b: f64, tol: Tolerance) -> Result<f64>
where
    P: FnMut(f64) -> Result<bool>,
{
    for _ in 0..tol.max_iter {
        if tol.done(a, b) {
            break;
        }
        let m = 0.5 * (a + b);
        if pred(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = find_root_f64(|x| x * x * x - 2.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn flat_function_converges() {
        // (x - 1)^9 is nearly flat around the root; the bisection guard must kick in
        let r = find_root_f64(|x| (x - 1.0).powi(9), 0.0, 3.0, Tolerance::default()).unwrap();
        assert!((r - 1.0).abs() < 1e-2);
        let r = find_root_f64(
            |x| (x - 1.0).powi(3) * (1.0 + x * x),
            -4.0,
            3.0,
            Tolerance::default(),
        )
        .unwrap();
        assert!((r - 1.0).abs() < 1e-5);
    }

    #[test]
    fn no_sign_change_is_error() {
        assert!(find_root_f64(|x| x * x + 1.0, -1.0, 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn predicate_bisection() {
        let r = bisect_predicate(|x| Ok(x > 0.3), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }
}
