use serde::{Deserialize, Serialize};

use crate::arithmetic::Rotation;
use crate::cocycle::{Cocycle, JumpSequence};
use crate::error::{Error, Result};
use crate::numerics::frac;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Linear,
    /// Right-continuous piecewise constant.
    Previous,
}

/// Positive ceiling function on the base circle.
#[derive(Clone, Debug)]
pub enum CeilingFunction {
    Constant(f64),
    /// `values[0]` on `[0, b_1)`, `values[i]` on `[b_i, b_{i+1})`.
    Step { breakpoints: Vec<f64>, values: Vec<f64> },
    JumpBV(Box<Cocycle>),
    /// Periodic samples `(x_i, v_i)` with `x_i` increasing in `[0, 1)`.
    Sampled { xs: Vec<f64>, values: Vec<f64>, rule: Interpolation },
}

/// `(1 − ε) χ_{[0, β)} + (1 + ε) χ_{[β, 1)}`.
pub fn make_step_ceiling(epsilon: f64, beta: f64) -> Result<CeilingFunction> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("step height ε must lie in (0, 1), got {epsilon}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid(format!("step position β must lie in (0, 1), got {beta}")));
    }
    CeilingFunction::step(vec![beta], vec![1.0 - epsilon, 1.0 + epsilon])
}

impl CeilingFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("constant ceiling must be positive, got {c}")));
        }
        Ok(CeilingFunction::Constant(c))
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::invalid("step ceiling needs one more value than breakpoints"));
        }
        if breakpoints.iter().any(|b| !(*b > 0.0 && *b < 1.0)) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("step breakpoints must be increasing in (0, 1)"));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("step ceiling values must be positive"));
        }
        Ok(CeilingFunction::Step { breakpoints, values })
    }

    /// `φ = mean + Σσ_k e_k` over `rot`. Positivity is certified through
    /// `mean > 2 Σ|σ_k|` (plus the truncation bound).
    pub fn jump_bv(jumps: JumpSequence, rot: Rotation) -> Result<Self> {
        let c = Cocycle::new(jumps, rot)?;
        let need = 2.0 * c.sigma().l1() + c.jumps().tail_bound();
        if c.mean() <= need {
            return Err(Error::invalid(format!(
                "jump ceiling not certified positive: mean {} <= 2 Σ|σ_k| = {need}",
                c.mean()
            )));
        }
        Ok(CeilingFunction::JumpBV(Box::new(c)))
    }

    pub fn sampled(xs: Vec<f64>, values: Vec<f64>, rule: Interpolation) -> Result<Self> {
        if xs.is_empty() || xs.len() != values.len() {
            return Err(Error::invalid("sampled ceiling needs matching non-empty grids"));
        }
        if xs.iter().any(|x| !(0.0..1.0).contains(x)) || xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sample points must be increasing in [0, 1)"));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::invalid("sampled ceiling values must be positive"));
        }
        Ok(CeilingFunction::Sampled { xs, values, rule })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CeilingFunction::Constant(c) => *c,
            CeilingFunction::Step { breakpoints, values } => {
                let x = frac(x);
                values[breakpoints.partition_point(|&b| b <= x)]
            }
            CeilingFunction::JumpBV(c) => c.phi(x),
            CeilingFunction::Sampled { xs, values, rule } => {
                let x = frac(x);
                let n = xs.len();
                let i = xs.partition_point(|&s| s <= x);
                // periodic neighbours
                let (x0, v0) = if i == 0 { (xs[n - 1] - 1.0, values[n - 1]) } else { (xs[i - 1], values[i - 1]) };
                match rule {
                    Interpolation::Previous => v0,
                    Interpolation::Linear => {
                        let (x1, v1) = if i == n { (xs[0] + 1.0, values[0]) } else { (xs[i], values[i]) };
                        if x1 == x0 {
                            v0
                        } else {
                            v0 + (v1 - v0) * (x - x0) / (x1 - x0)
                        }
                    }
                }
            }
        }
    }

    /// Mean against Lebesgue measure on the circle, exact for every variant.
    pub fn lebesgue_mean(&self) -> f64 {
        match self {
            CeilingFunction::Constant(c) => *c,
            CeilingFunction::Step { breakpoints, values } => {
                let mut edges = vec![0.0];
                edges.extend(breakpoints);
                edges.push(1.0);
                edges.windows(2).zip(values).map(|(w, v)| (w[1] - w[0]) * v).sum()
            }
            CeilingFunction::JumpBV(c) => c.mean(),
            CeilingFunction::Sampled { xs, values, rule } => {
                let n = xs.len();
                (0..n)
                    .map(|i| {
                        let (x1, v1) = if i + 1 == n { (xs[0] + 1.0, values[0]) } else { (xs[i + 1], values[i + 1]) };
                        let w = x1 - xs[i];
                        match rule {
                            Interpolation::Previous => w * values[i],
                            Interpolation::Linear => 0.5 * w * (values[i] + v1),
                        }
                    })
                    .sum::<f64>()
            }
        }
    }

    /// Certified positive lower bound.
    pub fn lower_bound(&self) -> f64 {
        match self {
            CeilingFunction::Constant(c) => *c,
            CeilingFunction::Step { values, .. } | CeilingFunction::Sampled { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
            CeilingFunction::JumpBV(c) => c.mean() - c.sigma().l1() - c.jumps().tail_bound(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CeilingFunction::Constant(c) => format!("constant {c}"),
            CeilingFunction::Step { breakpoints, values } => format!("step at {breakpoints:?} with values {values:?}"),
            CeilingFunction::JumpBV(c) => format!("jump-bv with mean {} and Σ|σ| = {}", c.mean(), c.sigma().l1()),
            CeilingFunction::Sampled { xs, .. } => format!("sampled on {} points", xs.len()),
        }
    }
}

/// Config description of a ceiling.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CeilingSpec {
    Constant { value: f64 },
    Step { epsilon: f64, beta: f64 },
    StepGeneral { breakpoints: Vec<f64>, values: Vec<f64> },
    JumpBv { jumps: JumpSequence },
    Sampled { xs: Vec<f64>, values: Vec<f64>, rule: Interpolation },
}

impl CeilingSpec {
    pub fn build(&self, rot: &Rotation) -> Result<CeilingFunction> {
        match self {
            CeilingSpec::Constant { value } => CeilingFunction::constant(*value),
            CeilingSpec::Step { epsilon, beta } => make_step_ceiling(*epsilon, *beta),
            CeilingSpec::StepGeneral { breakpoints, values } => CeilingFunction::step(breakpoints.clone(), values.clone()),
            CeilingSpec::JumpBv { jumps } => CeilingFunction::jump_bv(jumps.clone(), *rot),
            CeilingSpec::Sampled { xs, values, rule } => CeilingFunction::sampled(xs.clone(), values.clone(), *rule),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::ContinuedFraction;

    #[test]
    fn step_values_and_mean() {
        let c = make_step_ceiling(0.25, 0.5).unwrap();
        assert_eq!(c.eval(0.2), 0.75);
        assert_eq!(c.eval(0.7), 1.25);
        assert_eq!(c.eval(0.5), 1.25);
        assert_eq!(c.lebesgue_mean(), 1.0);
        let d = make_step_ceiling(0.5, 0.25).unwrap();
        assert!((d.lebesgue_mean() - (0.5 * 0.25 + 1.5 * 0.75)).abs() < 1e-15);
        assert!(make_step_ceiling(1.0, 0.5).is_err());
        assert!(make_step_ceiling(0.5, 0.0).is_err());
        let tiny = make_step_ceiling(1e-9, 0.3).unwrap();
        assert!((tiny.eval(0.1) - 1.0).abs() < 2e-9);
    }

    #[test]
    fn jump_ceiling_positivity_rule() {
        let rot = ContinuedFraction::golden(60).unwrap().rotation();
        // Σ|σ| = 4/3 for C = 1, Δ = 1/2
        assert!(CeilingFunction::jump_bv(JumpSequence::geometric(1.0, 0.5, 60, 1.0).unwrap(), rot).is_err());
        let c = CeilingFunction::jump_bv(JumpSequence::geometric(0.25, 0.5, 60, 1.0).unwrap(), rot).unwrap();
        assert!(c.lower_bound() > 0.6);
        assert_eq!(c.lebesgue_mean(), 1.0);
    }

    #[test]
    fn sampled_interpolation() {
        let c = CeilingFunction::sampled(vec![0.0, 0.5], vec![1.0, 2.0], Interpolation::Linear).unwrap();
        assert!((c.eval(0.25) - 1.5).abs() < 1e-15);
        assert!((c.eval(0.75) - 1.5).abs() < 1e-15);
        assert!((c.lebesgue_mean() - 1.5).abs() < 1e-15);
        let p = CeilingFunction::sampled(vec![0.25, 0.5], vec![1.0, 3.0], Interpolation::Previous).unwrap();
        assert_eq!(p.eval(0.1), 3.0);
        assert_eq!(p.eval(0.3), 1.0);
        assert!((p.lebesgue_mean() - (0.25 * 1.0 + 0.75 * 3.0)).abs() < 1e-15);
    }

    #[test]
    fn spec_round_trip() {
        let s: CeilingSpec = serde_json::from_str(r#"{"type": "step", "epsilon": 0.25, "beta": 0.5}"#).unwrap();
        let rot = Rotation::from_value(0.3);
        assert_eq!(s.build(&rot).unwrap().eval(0.7), 1.25);
        let j: CeilingSpec =
            serde_json::from_str(r#"{"type": "jump-bv", "jumps": {"tail": {"C": 0.25, "Delta": 0.5, "K": 60}, "mean": 1.0}}"#)
                .unwrap();
        assert!(j.build(&rot).is_ok());
    }
}
