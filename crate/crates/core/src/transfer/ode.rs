//! Adaptive Dormand–Prince 5(4) integration of `u'' = (q(x) - λ) u` for the
//! pair of fundamental solutions, carried in a renormalized state.

use crate::potential::Potential;
use crate::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// State `[c, c', s, s']` times `e^log_scale`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FundamentalState {
    pub y: [f64; 4],
    pub log_scale: f64,
}

fn rhs(q: &Potential, lambda: f64, x: f64, y: &[f64; 4]) -> [f64; 4] {
    let w = q.value_at(x) - lambda;
    [y[1], w * y[0], y[3], w * y[2]]
}

fn norm(y: &[f64; 4]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates from `0` to `x_end`, splitting at the potential's knots so that
/// every step sees a smooth right-hand side.
pub(crate) fn integrate(
    q: &Potential,
    lambda: f64,
    x_end: f64,
    rtol: f64,
) -> Result<FundamentalState> {
    let mut st = FundamentalState {
        y: [1.0, 0.0, 0.0, 1.0],
        log_scale: 0.0,
    };
    let knots = q.knots();
    let k = lambda.abs().sqrt().max(1.0);
    let mut h = 0.1 / k;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1].min(x_end));
        if b <= a {
            break;
        }
        // evaluate q strictly inside the cell so that jumps are not straddled
        let eps = 1e-15;
        let qs = |x: f64| x.clamp(a + eps * (b - a), b - eps * (b - a));
        h = segment(q, lambda, a, b, &mut st, h, rtol, &qs)?;
    }
    Ok(st)
}

#[allow(clippy::too_many_arguments)]
fn segment(
    q: &Potential,
    lambda: f64,
    a: f64,
    b: f64,
    st: &mut FundamentalState,
    mut h: f64,
    rtol: f64,
    clampx: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    let mut x = a;
    let hmin = 1e-14 * (b - a).max(1e-3);
    let mut k = [[0.0f64; 4]; 7];
    let mut steps = 0usize;
    while x < b {
        let last = x + h >= b;
        let hh = if last { b - x } else { h };
        k[0] = rhs(q, lambda, clampx(x), &st.y);
        for s in 1..7 {
            let mut ys = st.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let aij = A[s][j];
                if aij != 0.0 {
                    for i in 0..4 {
                        ys[i] += hh * aij * kj[i];
                    }
                }
            }
            k[s] = rhs(q, lambda, clampx(x + C[s] * hh), &ys);
        }
        let mut ynew = st.y;
        let mut err = [0.0f64; 4];
        for s in 0..7 {
            for i in 0..4 {
                ynew[i] += hh * B[s] * k[s][i];
                err[i] += hh * E[s] * k[s][i];
            }
        }
        let scale = rtol * norm(&st.y).max(norm(&ynew));
        let en = norm(&err) / scale;
        if en <= 1.0 {
            x = if last { b } else { x + hh };
            st.y = ynew;
            let m = norm(&st.y);
            if !(1e-100..=1e100).contains(&m) {
                for v in st.y.iter_mut() {
                    *v /= m;
                }
                st.log_scale += m.ln();
            }
        }
        let fac = if en == 0.0 {
            5.0
        } else {
            (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
        };
        if en <= 1.0 || !last {
            h = hh * fac;
        } else {
            h = hh * fac.min(1.0);
        }
        if h < hmin {
            return Err(Error::Integration {
                x,
                achieved: en * rtol,
            });
        }
        steps += 1;
        if steps > 5_000_000 {
            return Err(Error::Integration {
                x,
                achieved: en * rtol,
            });
        }
    }
    Ok(h)
}
