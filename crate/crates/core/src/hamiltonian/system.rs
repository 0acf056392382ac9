use serde::{Deserialize, Serialize};

use super::integrator::{dopri5_step, integrate_adaptive, integrate_fixed, Tolerance};
use super::timechange::TimeChange;
use super::trigpoly::{Term, TrigPoly};
use crate::error::{Error, Result};

/// `Ĥ(θ, r, s, u) = u + r²/2 + εH(θ, r, s)`, optionally time-changed to
/// `Ĥ_φ = φ·(Ĥ − Ĥ₀)`. States are `[θ, r, s, u]` with `θ` lifted to `R`.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    h: TrigPoly,
    epsilon: f64,
    h0: f64,
    phi: Option<TimeChange>,
    r_max: f64,
    steps_per_unit: usize,
    tol: Tolerance,
}

/// The perturbation `H(θ, r, s)` in a config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PerturbationSpec {
    /// `cos(2πθ)(1 + c·cos(2πs))`.
    Builtin { c: f64 },
    Poly { terms: Vec<Term> },
}

fn default_r_max() -> f64 {
    2.0
}

fn default_steps() -> usize {
    400
}

/// JSON description of a [`HamiltonianSystem`], including the working annulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub h: PerturbationSpec,
    pub epsilon: f64,
    #[serde(default)]
    pub h0: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_steps")]
    pub steps_per_unit: usize,
    #[serde(default)]
    pub phi: Option<TimeChange>,
}

impl HamiltonianSpec {
    pub fn builtin(epsilon: f64, c: f64) -> Self {
        HamiltonianSpec {
            h: PerturbationSpec::Builtin { c },
            epsilon,
            h0: 0.0,
            r_max: default_r_max(),
            steps_per_unit: default_steps(),
            phi: None,
        }
    }

    pub fn build(&self) -> Result<HamiltonianSystem> {
        let h = match &self.h {
            PerturbationSpec::Builtin { c } => TrigPoly::standard(*c),
            PerturbationSpec::Poly { terms } => TrigPoly::new(terms.clone()),
        };
        let sys = HamiltonianSystem::new(h, self.epsilon, self.h0)?
            .with_annulus(self.r_max)?
            .with_steps_per_unit(self.steps_per_unit)?;
        match &self.phi {
            Some(phi) => sys.with_phi(phi.clone()),
            None => Ok(sys),
        }
    }
}

/// 2×2 matrix `[[a, b], [c, d]]` stored row-major.
pub type Mat2 = [f64; 4];

pub fn det2(m: &Mat2) -> f64 {
    m[0] * m[3] - m[1] * m[2]
}

pub fn mul2(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistReport {
    pub min_dtheta_dr: f64,
    pub max_dtheta_dr: f64,
    pub r_range: (f64, f64),
    pub grid: (usize, usize),
    pub monotone_twist: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub finite_difference: Mat2,
    pub tangent: Mat2,
    pub det_fd: f64,
    pub det_tangent: f64,
    pub max_entry_gap: f64,
}

impl HamiltonianSystem {
    pub fn new(h: TrigPoly, epsilon: f64, h0: f64) -> Result<Self> {
        h.validate()?;
        if h.depends_on_u() {
            return Err(Error::invalid("the perturbation H must not depend on u"));
        }
        if !epsilon.is_finite() || !h0.is_finite() {
            return Err(Error::invalid("ε and Ĥ₀ must be finite"));
        }
        Ok(HamiltonianSystem { h, epsilon, h0, phi: None, r_max: 2.0, steps_per_unit: 400, tol: Tolerance::default() })
    }

    /// Builtin family `H = cos(2πθ)(1 + c·cos(2πs))`.
    pub fn standard(epsilon: f64, c: f64) -> Result<Self> {
        Self::new(TrigPoly::standard(c), epsilon, 0.0)
    }

    pub fn with_phi(mut self, phi: TimeChange) -> Result<Self> {
        phi.validate(self.r_max, self.u_bound())?;
        self.phi = Some(phi);
        Ok(self)
    }

    pub fn with_annulus(mut self, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::invalid("annulus bound R must be positive"));
        }
        self.r_max = r_max;
        if let Some(phi) = &self.phi {
            phi.validate(self.r_max, self.u_bound())?;
        }
        Ok(self)
    }

    pub fn with_steps_per_unit(mut self, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::invalid("at least 16 integrator steps per unit time are required"));
        }
        self.steps_per_unit = n;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn perturbation(&self) -> &TrigPoly {
        &self.h
    }

    pub fn phi(&self) -> Option<&TimeChange> {
        self.phi.as_ref()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn steps_per_unit(&self) -> usize {
        self.steps_per_unit
    }

    fn u_bound(&self) -> f64 {
        self.h0.abs() + 0.5 * self.r_max * self.r_max + self.epsilon.abs() * self.h.sup_bound(self.r_max, 0.0)
    }

    pub fn energy(&self, y: &[f64; 4]) -> f64 {
        y[3] + 0.5 * y[1] * y[1] + self.epsilon * self.h.value(y[0], y[1], y[2], 0.0)
    }

    /// `u` on the energy surface `Ĥ = Ĥ₀`.
    pub fn u_on_surface(&self, th: f64, r: f64, s: f64) -> f64 {
        self.h0 - 0.5 * r * r - self.epsilon * self.h.value(th, r, s, 0.0)
    }

    /// Hamiltonian vector field of `Ĥ`.
    pub fn field(&self, y: &[f64; 4]) -> [f64; 4] {
        let j = self.h.jet(y[0], y[1], y[2], 0.0);
        let e = self.epsilon;
        [y[1] + e * j.grad[1], -e * j.grad[0], 1.0, -e * j.grad[2]]
    }

    /// Vector field of `Ĥ_φ = φ(Ĥ − Ĥ₀)`: `φ X_Ĥ + (Ĥ − Ĥ₀) X_φ`.
    pub fn field_phi(&self, phi: &TrigPoly, y: &[f64; 4]) -> [f64; 4] {
        let base = self.field(y);
        let p = phi.jet(y[0], y[1], y[2], y[3]);
        let k = self.energy(y) - self.h0;
        [
            p.value * base[0] + k * p.grad[1],
            p.value * base[1] - k * p.grad[0],
            p.value * base[2] + k * p.grad[3],
            p.value * base[3] - k * p.grad[2],
        ]
    }

    fn check_region(&self, r: f64) -> Result<()> {
        if r.abs() > self.r_max {
            return Err(Error::invalid(format!("|r| = {} outside the working annulus |r| <= {}", r.abs(), self.r_max)));
        }
        Ok(())
    }

    /// Adaptive integration of the flow of `Ĥ` (or `Ĥ_φ`) for time `t`.
    pub fn integrate(&self, y0: [f64; 4], t: f64) -> Result<[f64; 4]> {
        if !(t.abs() <= 1e6) {
            return Err(Error::invalid(format!("integration time {t} exceeds 1e6")));
        }
        self.check_region(y0[1])?;
        match &self.phi {
            None => integrate_adaptive(&|_, y: &[f64; 4]| self.field(y), 0.0, y0, t, self.tol),
            Some(TimeChange::Poly(phi)) => integrate_adaptive(&|_, y: &[f64; 4]| self.field_phi(phi, y), 0.0, y0, t, self.tol),
            Some(other) => Err(Error::invalid(format!(
                "{} time change is defined through the section and cannot be integrated directly",
                other.name()
            ))),
        }
    }

    /// Reduced `(θ, r)` field with `s` as time, plus variational equations.
    fn reduced_tangent(&self, s: f64, y: &[f64; 6]) -> [f64; 6] {
        let j = self.h.jet(y[0], y[1], s, 0.0);
        let e = self.epsilon;
        let (a, b, c, d) = (e * j.hess[1], 1.0 + e * j.hess[2], -e * j.hess[0], -e * j.hess[1]);
        [
            y[1] + e * j.grad[1],
            -e * j.grad[0],
            a * y[2] + b * y[4],
            a * y[3] + b * y[5],
            c * y[2] + d * y[4],
            c * y[3] + d * y[5],
        ]
    }

    fn reduced(&self, s: f64, y: &[f64; 2]) -> [f64; 2] {
        let j = self.h.jet(y[0], y[1], s, 0.0);
        [y[1] + self.epsilon * j.grad[1], -self.epsilon * j.grad[0]]
    }

    /// Return map to the section `s ∈ Z` in lifted coordinates. With a
    /// polynomial time change the return is located by event detection on
    /// `s = 1`; other time changes do not move the orbits and use the
    /// un-reparametrized map.
    pub fn poincare_map(&self, th: f64, r: f64) -> Result<(f64, f64)> {
        self.check_region(r)?;
        if let Some(TimeChange::Poly(phi)) = &self.phi {
            return self.poincare_event(phi, th, r);
        }
        let y = integrate_fixed(&|s, y: &[f64; 2]| self.reduced(s, y), 0.0, [th, r], 1.0, self.steps_per_unit);
        Ok((y[0], y[1]))
    }

    /// Poincaré map with its tangent map.
    pub fn poincare_tangent(&self, th: f64, r: f64) -> Result<(f64, f64, Mat2)> {
        self.check_region(r)?;
        let y = integrate_fixed(
            &|s, y: &[f64; 6]| self.reduced_tangent(s, y),
            0.0,
            [th, r, 1.0, 0.0, 0.0, 1.0],
            1.0,
            self.steps_per_unit,
        );
        Ok((y[0], y[1], [y[2], y[3], y[4], y[5]]))
    }

    /// Inverse return map (backward integration from `s = 1` to `s = 0`).
    pub fn poincare_inverse(&self, th: f64, r: f64) -> Result<(f64, f64, Mat2)> {
        self.check_region(r)?;
        let y = integrate_fixed(
            &|s, y: &[f64; 6]| self.reduced_tangent(s, y),
            1.0,
            [th, r, 1.0, 0.0, 0.0, 1.0],
            0.0,
            self.steps_per_unit,
        );
        Ok((y[0], y[1], [y[2], y[3], y[4], y[5]]))
    }

    fn poincare_event(&self, phi: &TrigPoly, th: f64, r: f64) -> Result<(f64, f64)> {
        let f = |_: f64, y: &[f64; 4]| self.field_phi(phi, y);
        let mut y = [th, r, 0.0, self.u_on_surface(th, r, 0.0)];
        let lo = phi.lower_bound(self.r_max, self.u_bound()).max(1e-3);
        let h = 1.0 / (self.steps_per_unit as f64 * phi.sup_bound(self.r_max, self.u_bound()).max(1.0));
        let max_steps = (2.0 / (lo * h)).ceil() as usize + 10;
        for _ in 0..max_steps {
            let (next, _) = dopri5_step(&f, 0.0, &y, h);
            if next[2] < 1.0 {
                y = next;
                continue;
            }
            // Newton on the step length so that s lands on 1
            let mut tau = h * (1.0 - y[2]) / (next[2] - y[2]);
            for _ in 0..50 {
                let (z, _) = dopri5_step(&f, 0.0, &y, tau);
                let res = z[2] - 1.0;
                if res.abs() < 1e-15 {
                    return Ok((z[0], z[1]));
                }
                let sdot = f(0.0, &z)[2];
                tau -= res / sdot;
            }
            let (z, _) = dopri5_step(&f, 0.0, &y, tau);
            return Ok((z[0], z[1]));
        }
        Err(Error::IntegrationFailure("no return to the section s = 1".into()))
    }

    /// `min ∂θ′/∂r` by central differences on a `n_theta × n_r` grid.
    pub fn twist_check(&self, r_range: (f64, f64), n_theta: usize, n_r: usize) -> Result<TwistReport> {
        if n_theta < 10 || n_r < 10 {
            return Err(Error::invalid("twist grid must be at least 10 × 10"));
        }
        let d = 1e-5;
        self.check_region(r_range.0 - d)?;
        self.check_region(r_range.1 + d)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n_theta {
            let th = i as f64 / n_theta as f64;
            for k in 0..n_r {
                let r = r_range.0 + (r_range.1 - r_range.0) * k as f64 / (n_r - 1) as f64;
                let plus = self.poincare_map(th, r + d)?.0;
                let minus = self.poincare_map(th, r - d)?.0;
                let v = (plus - minus) / (2.0 * d);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok(TwistReport { min_dtheta_dr: lo, max_dtheta_dr: hi, r_range, grid: (n_theta, n_r), monotone_twist: lo > 0.0 })
    }

    /// Fourth-order finite-difference Jacobian of the Poincaré map against
    /// the tangent map from the variational equations.
    pub fn jacobian_check(&self, th: f64, r: f64, delta: f64) -> Result<JacobianReport> {
        let mut fd = [0.0; 4];
        for (col, (dth, dr)) in [(delta, 0.0), (0.0, delta)].into_iter().enumerate() {
            let at = |k: f64| self.poincare_map(th + k * dth, r + k * dr);
            let (p2, p1, m1, m2) = (at(2.0)?, at(1.0)?, at(-1.0)?, at(-2.0)?);
            let stencil = |a: f64, b: f64, c: f64, e: f64| (-a + 8.0 * b - 8.0 * c + e) / (12.0 * delta);
            fd[col] = stencil(p2.0, p1.0, m1.0, m2.0);
            fd[2 + col] = stencil(p2.1, p1.1, m1.1, m2.1);
        }
        let (_, _, tangent) = self.poincare_tangent(th, r)?;
        let gap = fd.iter().zip(&tangent).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok(JacobianReport { finite_difference: fd, tangent, det_fd: det2(&fd), det_tangent: det2(&tangent), max_entry_gap: gap })
    }
}
