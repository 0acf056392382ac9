use serde::{Deserialize, Serialize};

use super::aubry::OrbitConfiguration;
use super::system::{mul2, HamiltonianSystem, Mat2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub top: f64,
    pub bottom: f64,
    pub iterations: usize,
}

impl LyapunovReport {
    /// `top + bottom`, zero for an area-preserving map.
    pub fn sum(&self) -> f64 {
        self.top + self.bottom
    }
}

/// Lyapunov exponents by QR-iterated tangent maps along `T` map iterates.
pub fn lyapunov_exponent(sys: &HamiltonianSystem, start: (f64, f64), t: usize) -> Result<LyapunovReport> {
    if t < 1000 {
        return Err(Error::invalid(format!("Lyapunov estimate needs at least 1000 iterates, got {t}")));
    }
    let (mut th, mut r) = start;
    let mut q: Mat2 = [1.0, 0.0, 0.0, 1.0];
    let (mut l1, mut l2) = (0.0, 0.0);
    for _ in 0..t {
        let (a, b, m) = sys.poincare_tangent(th, r)?;
        (th, r) = (a, b);
        let v = mul2(&m, &q);
        // Gram-Schmidt on the columns
        let r11 = v[0].hypot(v[2]);
        let (e1, e2) = (v[0] / r11, v[2] / r11);
        let proj = e1 * v[1] + e2 * v[3];
        let (w1, w2) = (v[1] - proj * e1, v[3] - proj * e2);
        let r22 = w1.hypot(w2);
        l1 += r11.ln();
        l2 += r22.ln();
        q = [e1, w1 / r22, e2, w2 / r22];
    }
    Ok(LyapunovReport { top: l1 / t as f64, bottom: l2 / t as f64, iterations: t })
}

/// `log|μ_max| / q` from the monodromy matrix of a periodic orbit.
pub fn periodic_exponent(sys: &HamiltonianSystem, orbit: &OrbitConfiguration) -> Result<f64> {
    let mut m: Mat2 = [1.0, 0.0, 0.0, 1.0];
    for i in 0..orbit.q as usize {
        let (_, _, t) = sys.poincare_tangent(orbit.thetas[i], orbit.rs[i])?;
        m = mul2(&t, &m);
    }
    let tr = m[0] + m[3];
    let det = m[0] * m[3] - m[1] * m[2];
    let disc = tr * tr / 4.0 - det;
    let mu = if disc > 0.0 { tr.abs() / 2.0 + disc.sqrt() } else { det.abs().sqrt() };
    Ok(mu.ln() / orbit.q as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::aubry::am_minimize;

    #[test]
    fn shear_has_zero_exponent() {
        let sys = HamiltonianSystem::standard(0.0, 0.5).unwrap().with_steps_per_unit(64).unwrap();
        let rep = lyapunov_exponent(&sys, (0.1, 0.6180339887), 1000).unwrap();
        assert!(rep.top.abs() < 0.02 && rep.sum().abs() < 1e-12);
        assert!(lyapunov_exponent(&sys, (0.1, 0.6), 10).is_err());
    }

    #[test]
    fn exponents_sum_to_zero() {
        let sys = HamiltonianSystem::standard(0.3, 0.5).unwrap().with_annulus(4.0).unwrap().with_steps_per_unit(128).unwrap();
        let rep = lyapunov_exponent(&sys, (0.1, 0.4), 1000).unwrap();
        assert!(rep.sum().abs() < 1e-9, "{rep:?}");
        assert!(rep.top >= 0.0);
    }

    #[test]
    fn minimizing_periodic_orbit_is_hyperbolic() {
        let sys = HamiltonianSystem::standard(5e-2, 0.5).unwrap();
        let o = am_minimize(&sys, 1, 2, 2).unwrap();
        assert!(periodic_exponent(&sys, &o).unwrap() > 0.0);
    }
}
