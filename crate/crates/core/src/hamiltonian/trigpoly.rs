use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

/// `cos(2π·freq·x)` or `sin(2π·freq·x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub freq: f64,
    pub kind: Trig,
}

impl Mode {
    pub const ONE: Mode = Mode { freq: 0.0, kind: Trig::Cos };

    pub fn cos(freq: f64) -> Self {
        Mode { freq, kind: Trig::Cos }
    }

    pub fn sin(freq: f64) -> Self {
        Mode { freq, kind: Trig::Sin }
    }

    /// Value with first and second derivative.
    #[inline]
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        if self.freq == 0.0 {
            return match self.kind {
                Trig::Cos => (1.0, 0.0, 0.0),
                Trig::Sin => (0.0, 0.0, 0.0),
            };
        }
        let w = 2.0 * PI * self.freq;
        let (s, c) = (w * x).sin_cos();
        match self.kind {
            Trig::Cos => (c, -w * s, -w * w * c),
            Trig::Sin => (s, w * c, -w * w * s),
        }
    }
}

impl Default for Mode {
    fn default() -> Self {
        Mode::ONE
    }
}

/// `coef · r^r_pow · u^u_pow · theta(θ) · s(s)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    #[serde(default)]
    pub r_pow: u32,
    #[serde(default)]
    pub u_pow: u32,
    #[serde(default)]
    pub theta: Mode,
    #[serde(default)]
    pub s: Mode,
}

#[inline]
fn power(x: f64, n: u32) -> (f64, f64, f64) {
    match n {
        0 => (1.0, 0.0, 0.0),
        1 => (x, 1.0, 0.0),
        _ => {
            let n_f = n as f64;
            let p2 = x.powi(n as i32 - 2);
            (p2 * x * x, n_f * p2 * x, n_f * (n_f - 1.0) * p2)
        }
    }
}

/// Value, gradient in `(θ, r, s, u)` and the `(θ, r)` Hessian block
/// `[f_θθ, f_θr, f_rr]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 4],
    pub hess: [f64; 3],
}

/// Finite trigonometric polynomial in `θ` and `s`, polynomial in `r` and `u`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<Term>,
}

impl TrigPoly {
    pub fn new(terms: Vec<Term>) -> Self {
        TrigPoly { terms }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly { terms: vec![Term { coef: c, r_pow: 0, u_pow: 0, theta: Mode::ONE, s: Mode::ONE }] }
    }

    /// `cos(2πθ)(1 + c·cos(2πs))`.
    pub fn standard(c: f64) -> Self {
        TrigPoly {
            terms: vec![
                Term { coef: 1.0, r_pow: 0, u_pow: 0, theta: Mode::cos(1.0), s: Mode::ONE },
                Term { coef: c, r_pow: 0, u_pow: 0, theta: Mode::cos(1.0), s: Mode::cos(1.0) },
            ],
        }
    }

    pub fn depends_on_u(&self) -> bool {
        self.terms.iter().any(|t| t.u_pow > 0 && t.coef != 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !t.coef.is_finite() || !t.theta.freq.is_finite() || !t.s.freq.is_finite() {
                return Err(Error::invalid("trigonometric polynomial has non-finite coefficients"));
            }
            if t.theta.freq.fract() != 0.0 || t.s.freq.fract() != 0.0 {
                return Err(Error::invalid("θ and s frequencies must be integers (functions on the torus)"));
            }
        }
        Ok(())
    }

    pub fn value(&self, th: f64, r: f64, s: f64, u: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coef * power(r, t.r_pow).0 * power(u, t.u_pow).0 * t.theta.eval(th).0 * t.s.eval(s).0
            })
            .sum()
    }

    pub fn jet(&self, th: f64, r: f64, s: f64, u: f64) -> Jet {
        let mut j = Jet::default();
        for t in &self.terms {
            let (pr, dpr, ddpr) = power(r, t.r_pow);
            let (pu, dpu, _) = power(u, t.u_pow);
            let (a, da, dda) = t.theta.eval(th);
            let (b, db, _) = t.s.eval(s);
            let c = t.coef;
            j.value += c * pr * pu * a * b;
            j.grad[0] += c * pr * pu * da * b;
            j.grad[1] += c * dpr * pu * a * b;
            j.grad[2] += c * pr * pu * a * db;
            j.grad[3] += c * pr * dpu * a * b;
            j.hess[0] += c * pr * pu * dda * b;
            j.hess[1] += c * dpr * pu * da * b;
            j.hess[2] += c * ddpr * pu * a * b;
        }
        j
    }

    /// `Σ |coef| r_max^a u_max^b`, a bound on `|f|` over `|r| <= r_max`, `|u| <= u_max`.
    pub fn sup_bound(&self, r_max: f64, u_max: f64) -> f64 {
        self.terms
            .iter()
            .filter(|t| !(t.theta.freq == 0.0 && t.theta.kind == Trig::Sin) && !(t.s.freq == 0.0 && t.s.kind == Trig::Sin))
            .map(|t| t.coef.abs() * r_max.powi(t.r_pow as i32) * u_max.powi(t.u_pow as i32))
            .sum()
    }

    /// Certified lower bound on the region: constant part minus the sup
    /// bound of the remaining terms.
    pub fn lower_bound(&self, r_max: f64, u_max: f64) -> f64 {
        let is_const = |t: &Term| {
            t.r_pow == 0 && t.u_pow == 0 && t.theta.freq == 0.0 && t.s.freq == 0.0 && t.theta.kind == Trig::Cos && t.s.kind == Trig::Cos
        };
        let c0: f64 = self.terms.iter().filter(|t| is_const(t)).map(|t| t.coef).sum();
        let rest = TrigPoly { terms: self.terms.iter().filter(|t| !is_const(t)).copied().collect() };
        c0 - rest.sup_bound(r_max, u_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_matches_finite_differences() {
        let p = TrigPoly::new(vec![
            Term { coef: 0.7, r_pow: 2, u_pow: 1, theta: Mode::sin(2.0), s: Mode::cos(1.0) },
            Term { coef: -1.3, r_pow: 1, u_pow: 0, theta: Mode::cos(1.0), s: Mode::sin(3.0) },
            Term { coef: 0.4, r_pow: 3, u_pow: 0, theta: Mode::ONE, s: Mode::ONE },
        ]);
        let x = [0.31, 0.47, 0.12, -0.8];
        let j = p.jet(x[0], x[1], x[2], x[3]);
        let h = 1e-6;
        for k in 0..4 {
            let mut a = x;
            let mut b = x;
            a[k] += h;
            b[k] -= h;
            let fd = (p.value(a[0], a[1], a[2], a[3]) - p.value(b[0], b[1], b[2], b[3])) / (2.0 * h);
            assert!((fd - j.grad[k]).abs() < 1e-7, "component {k}");
        }
        let g = |th: f64, r: f64| p.jet(th, r, x[2], x[3]).grad;
        let fd_tt = (g(x[0] + h, x[1])[0] - g(x[0] - h, x[1])[0]) / (2.0 * h);
        let fd_tr = (g(x[0], x[1] + h)[0] - g(x[0], x[1] - h)[0]) / (2.0 * h);
        let fd_rr = (g(x[0], x[1] + h)[1] - g(x[0], x[1] - h)[1]) / (2.0 * h);
        assert!((fd_tt - j.hess[0]).abs() < 1e-6);
        assert!((fd_tr - j.hess[1]).abs() < 1e-6);
        assert!((fd_rr - j.hess[2]).abs() < 1e-6);
    }

    #[test]
    fn standard_family_and_bounds() {
        let p = TrigPoly::standard(0.5);
        assert!((p.value(0.0, 0.3, 0.0, 9.0) - 1.5).abs() < 1e-15);
        assert!((p.value(0.5, 0.3, 0.5, 9.0) - (-0.5)).abs() < 1e-15);
        assert!(!p.depends_on_u());
        let phi = TrigPoly::new(vec![
            Term { coef: 2.0, ..Default::default() },
            Term { coef: 0.5, theta: Mode::cos(1.0), ..Default::default() },
        ]);
        assert_eq!(phi.lower_bound(1.0, 1.0), 1.5);
        let bad = TrigPoly::new(vec![Term { coef: 1.0, theta: Mode::cos(0.5), ..Default::default() }]);
        assert!(bad.validate().is_err());
    }
}
