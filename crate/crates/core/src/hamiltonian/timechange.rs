use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::integrator::integrate_adaptive;
use super::system::HamiltonianSystem;
use super::trigpoly::TrigPoly;
use crate::error::{Error, Result};
use crate::numerics::{frac, gauss8};

/// Time-change factor `φ > 0`.
///
/// `TwoRegion` is the two-value construction: along the orbit through a
/// section point `(θ̃, r̃)`, `1/φ = 1 + σ(θ̃)·ε·b(s)` with `b ≥ 0`, `∫b = 1`,
/// and `σ` a smooth sign that is `−1` on `[0, β − δ]` and `+1` on
/// `[β, 1 − δ]`. Its ceiling is exactly `1 − ε` or `1 + ε` away from the
/// transition strips. `b` vanishes to fourth order at integer `s`, so the
/// factor is smooth across the section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TimeChange {
    Poly(TrigPoly),
    TwoRegion { epsilon: f64, beta: f64, delta: f64 },
}

/// `C^∞` step from 0 at `x ≤ 0` to 1 at `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        g(x) / (g(x) + g(1.0 - x))
    }
}

fn bump(s: f64) -> f64 {
    let c = 1.0 - (2.0 * PI * s).cos();
    2.0 / 3.0 * c * c
}

impl TimeChange {
    pub fn name(&self) -> &'static str {
        match self {
            TimeChange::Poly(_) => "polynomial",
            TimeChange::TwoRegion { .. } => "two-region",
        }
    }

    /// Checks positivity on `|r| ≤ r_max`, `|u| ≤ u_max`.
    pub fn validate(&self, r_max: f64, u_max: f64) -> Result<()> {
        match self {
            TimeChange::Poly(p) => {
                p.validate()?;
                let lb = p.lower_bound(r_max, u_max);
                if !(lb > 0.0) {
                    return Err(Error::invalid(format!(
                        "time change φ is not certified positive on the working region (lower bound {lb})"
                    )));
                }
                Ok(())
            }
            TimeChange::TwoRegion { epsilon, beta, delta } => {
                // max b = 8/3, so 1/φ stays positive iff ε < 3/8
                if !(*epsilon >= 0.0 && *epsilon < 0.375) {
                    return Err(Error::invalid(format!("two-region ε = {epsilon} must lie in [0, 3/8)")));
                }
                if !(*beta > 0.0 && *beta < 1.0) {
                    return Err(Error::invalid(format!("two-region β = {beta} must lie in (0, 1)")));
                }
                if !(*delta > 0.0 && *delta < 0.5 * beta.min(1.0 - beta)) {
                    return Err(Error::invalid(format!("two-region strip width δ = {delta} too large for β = {beta}")));
                }
                Ok(())
            }
        }
    }

    /// Smooth sign `σ(θ̃)` of the two-region construction.
    pub fn region_sign(beta: f64, delta: f64, th: f64) -> f64 {
        let x = frac(th);
        if x < beta - delta {
            -1.0
        } else if x < beta {
            2.0 * smooth_step((x - beta + delta) / delta) - 1.0
        } else if x < 1.0 - delta {
            1.0
        } else {
            1.0 - 2.0 * smooth_step((x - 1.0 + delta) / delta)
        }
    }
}

/// `ψ(θ, r) = ∫₀¹ 1/φ(X^s(θ, r)) ds` along the `Ĥ`-orbit on the energy
/// surface, starting on the section.
pub fn reparam_ceiling(sys: &HamiltonianSystem, th: f64, r: f64) -> Result<f64> {
    if r.abs() > sys.r_max() {
        return Err(Error::invalid(format!("|r| = {} outside the working annulus", r.abs())));
    }
    match sys.phi() {
        None => Err(Error::invalid("reparametrized ceiling needs a time change φ")),
        Some(TimeChange::Poly(phi)) => {
            let e = sys.epsilon();
            let h = sys.perturbation();
            let f = |s: f64, y: &[f64; 3]| {
                let j = h.jet(y[0], y[1], s, 0.0);
                let u = sys.u_on_surface(y[0], y[1], s);
                [y[1] + e * j.grad[1], -e * j.grad[0], 1.0 / phi.value(y[0], y[1], s, u)]
            };
            let y = integrate_adaptive(&f, 0.0, [th, r, 0.0], 1.0, Default::default())?;
            Ok(y[2])
        }
        Some(TimeChange::TwoRegion { epsilon, beta, delta }) => {
            let sigma = TimeChange::region_sign(*beta, *delta, th);
            let mut total = 0.0;
            let panels = 16;
            for k in 0..panels {
                let a = k as f64 / panels as f64;
                let b = (k + 1) as f64 / panels as f64;
                total += gauss8(|s| 1.0 + sigma * epsilon * bump(s), a, b);
            }
            Ok(total)
        }
    }
}
