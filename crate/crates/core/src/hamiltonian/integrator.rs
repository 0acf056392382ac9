//! Dormand-Prince 5(4) in fixed-step and adaptive form.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
/// Fifth- minus fourth-order weights (stages 1..7).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn combo<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], w: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(w) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// One step; returns the fifth-order solution and the embedded error estimate.
pub fn dopri5_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + C[1] * h, &combo(y, h, &[k1], &A2));
    let k3 = f(t + C[2] * h, &combo(y, h, &[k1, k2], &A3));
    let k4 = f(t + C[3] * h, &combo(y, h, &[k1, k2, k3], &A4));
    let k5 = f(t + C[4] * h, &combo(y, h, &[k1, k2, k3, k4], &A5));
    let k6 = f(t + C[5] * h, &combo(y, h, &[k1, k2, k3, k4, k5], &A6));
    let y5 = combo(y, h, &[k1, k2, k3, k4, k5, k6], &B);
    let k7 = f(t + h, &y5);
    let mut err = [0.0; N];
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    for (k, &e) in ks.iter().zip(&E) {
        for i in 0..N {
            err[i] += h * e * k[i];
        }
    }
    (y5, err)
}

/// `n` equal steps from `t0` to `t1`.
pub fn integrate_fixed<const N: usize, F>(f: &F, t0: f64, y0: [f64; N], t1: f64, n: usize) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = dopri5_step(f, t0 + i as f64 * h, &y, h).0;
    }
    y
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-13, atol: 1e-13, max_steps: 200_000_000 }
    }
}

/// Adaptive integration from `t0` to `t1` (either direction).
pub fn integrate_adaptive<const N: usize, F>(f: &F, t0: f64, y0: [f64; N], t1: f64, tol: Tolerance) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * span.abs().min(1e-2);
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let (y_new, err) = dopri5_step(f, t, &y, h);
        let mut norm = 0.0;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            norm += (err[i] / sc).powi(2);
        }
        let norm = (norm / N as f64).sqrt();
        if !norm.is_finite() {
            return Err(Error::IntegrationFailure(format!("non-finite state at t = {t}")));
        }
        if norm <= 1.0 {
            t += h;
            y = y_new;
            if (t1 - t) * dir <= 0.0 {
                break;
            }
        }
        let fac = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::IntegrationFailure(format!("step size collapsed to {h:e} at t = {t}")));
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::IntegrationFailure(format!("more than {} steps", tol.max_steps)));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osc(_: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn fifth_order_convergence() {
        let exact = [1f64.cos(), -1f64.sin()];
        let e = |n| {
            let y = integrate_fixed(&osc, 0.0, [1.0, 0.0], 1.0, n);
            ((y[0] - exact[0]).powi(2) + (y[1] - exact[1]).powi(2)).sqrt()
        };
        let ratio = e(10) / e(20);
        assert!((ratio.log2() - 5.0).abs() < 0.3, "observed order {}", ratio.log2());
    }

    #[test]
    fn adaptive_reaches_tolerance_both_ways() {
        let y = integrate_adaptive(&osc, 0.0, [1.0, 0.0], 10.0, Tolerance::default()).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-11);
        let back = integrate_adaptive(&osc, 10.0, y, 0.0, Tolerance::default()).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-11 && back[1].abs() < 1e-11);
    }

    #[test]
    fn blow_up_is_reported() {
        let f = |_: f64, y: &[f64; 1]| [y[0] * y[0]];
        assert!(integrate_adaptive(&f, 0.0, [1.0], 2.0, Tolerance::default()).is_err());
    }
}
