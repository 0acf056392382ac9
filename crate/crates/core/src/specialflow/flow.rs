use std::fmt::Debug;

use serde::Serialize;

use super::ceiling::CeilingFunction;
use crate::arithmetic::Rotation;
use crate::denjoy::{CantorPoint, DenjoyModel};
use crate::error::{Error, Result};
use crate::numerics::{frac, KahanSum};

/// Invertible base map with exact iterates.
pub trait BaseDynamics: Sync {
    type Point: Copy + Debug + Send + Sync;

    /// `n`-th iterate computed directly from `p` (no accumulated drift).
    fn iterate(&self, p: &Self::Point, n: i64) -> Self::Point;

    /// Circle coordinate in `[0, 1)` at which the ceiling is evaluated.
    fn coord(&self, p: &Self::Point) -> f64;

    fn point(&self, x: f64) -> Self::Point;

    fn check_iterate(&self, n: i64) -> Result<()>;

    /// Mean of the ceiling against the invariant measure of the base.
    fn ceiling_mean(&self, c: &CeilingFunction) -> f64;
}

impl BaseDynamics for Rotation {
    type Point = f64;

    #[inline]
    fn iterate(&self, p: &f64, n: i64) -> f64 {
        self.point(*p, n)
    }

    #[inline]
    fn coord(&self, p: &f64) -> f64 {
        *p
    }

    fn point(&self, x: f64) -> f64 {
        frac(x)
    }

    fn check_iterate(&self, n: i64) -> Result<()> {
        Rotation::check_iterate(self, n)
    }

    fn ceiling_mean(&self, c: &CeilingFunction) -> f64 {
        c.lebesgue_mean()
    }
}

impl BaseDynamics for DenjoyModel {
    type Point = CantorPoint;

    fn iterate(&self, p: &CantorPoint, n: i64) -> CantorPoint {
        DenjoyModel::iterate(self, p, n)
    }

    fn coord(&self, p: &CantorPoint) -> f64 {
        p.x
    }

    fn point(&self, x: f64) -> CantorPoint {
        self.point_at(x)
    }

    fn check_iterate(&self, n: i64) -> Result<()> {
        self.cf().rotation().check_iterate(n)
    }

    fn ceiling_mean(&self, c: &CeilingFunction) -> f64 {
        self.integrate(|x| c.eval(x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecialFlowPoint<P> {
    pub base: P,
    pub height: f64,
}

/// Suspension of `base` under `ceiling`.
#[derive(Clone, Debug)]
pub struct SpecialFlow<B> {
    base: B,
    ceiling: CeilingFunction,
    mean: f64,
}

impl<B: BaseDynamics> SpecialFlow<B> {
    pub fn new(base: B, ceiling: CeilingFunction) -> Result<Self> {
        if !(ceiling.lower_bound() > 0.0) {
            return Err(Error::invalid(format!("ceiling is not positive: {}", ceiling.describe())));
        }
        let mean = base.ceiling_mean(&ceiling);
        Ok(SpecialFlow { base, ceiling, mean })
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn ceiling(&self) -> &CeilingFunction {
        &self.ceiling
    }

    /// `∫ ceiling dμ` over the base.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    #[inline]
    pub fn ceiling_at(&self, p: &B::Point) -> f64 {
        self.ceiling.eval(self.base.coord(p))
    }

    /// Ceiling values `χ(f^i x)` for `i < n`.
    pub fn ceiling_orbit(&self, x: &B::Point, n: usize) -> Result<Vec<f64>> {
        self.base.check_iterate(n as i64)?;
        Ok((0..n as i64).map(|i| self.ceiling_at(&self.base.iterate(x, i))).collect())
    }

    /// Birkhoff sum `S_m χ(x)`; negative `m` gives `−S_{|m|} χ(f^m x)`.
    pub fn birkhoff(&self, x: &B::Point, m: i64) -> Result<f64> {
        self.base.check_iterate(m)?;
        let mut acc = KahanSum::new();
        if m >= 0 {
            (0..m).for_each(|i| acc.add(self.ceiling_at(&self.base.iterate(x, i))));
            Ok(acc.value())
        } else {
            (m..0).for_each(|i| acc.add(self.ceiling_at(&self.base.iterate(x, i))));
            Ok(-acc.value())
        }
    }

    pub fn start(&self, x: f64, height: f64) -> Result<SpecialFlowPoint<B::Point>> {
        let base = self.base.point(x);
        let c = self.ceiling_at(&base);
        if !(0.0..c).contains(&height) {
            return Err(Error::invalid(format!("height {height} outside [0, {c})")));
        }
        Ok(SpecialFlowPoint { base, height })
    }

    /// Moves `p` for time `t` (either sign): vertical unit speed, and
    /// `(x, χ(x))` is identified with `(f x, 0)`. The iterate count `m` is the
    /// one with `S_m χ(x) <= height + t < S_{m+1} χ(x)`.
    pub fn advance(&self, p: &SpecialFlowPoint<B::Point>, t: f64) -> Result<SpecialFlowPoint<B::Point>> {
        if !t.is_finite() || t.abs() > 1e9 * self.mean {
            return Err(Error::invalid(format!("flow time {t} outside ±1e9 × mean ceiling")));
        }
        let s = p.height + t;
        let mut acc = KahanSum::new();
        let mut m: i64 = 0;
        if s >= 0.0 {
            loop {
                let c = self.ceiling_at(&self.base.iterate(&p.base, m));
                if acc.value() + c > s {
                    break;
                }
                acc.add(c);
                m += 1;
                self.base.check_iterate(m)?;
            }
        } else {
            loop {
                m -= 1;
                self.base.check_iterate(m)?;
                acc.add(-self.ceiling_at(&self.base.iterate(&p.base, m)));
                if acc.value() <= s {
                    break;
                }
            }
        }
        let base = self.base.iterate(&p.base, m);
        let c = self.ceiling_at(&base);
        let height = (s - acc.value()).clamp(0.0, c.next_down_safe());
        Ok(SpecialFlowPoint { base, height })
    }

    /// Distance in the flow, treating `(x, χ(x))` and `(f x, 0)` as equal:
    /// the time needed to go from the earlier of `a`, `b` to the later,
    /// when both lie within one base step of each other. Returns `None`
    /// when they are further apart.
    pub fn gap_between(&self, a: &SpecialFlowPoint<B::Point>, b: &SpecialFlowPoint<B::Point>) -> Option<f64> {
        let xa = self.base.coord(&a.base);
        let xb = self.base.coord(&b.base);
        let close = |u: f64, v: f64| {
            let d = (u - v).abs();
            d.min(1.0 - d) < 1e-12
        };
        if close(xa, xb) {
            return Some((a.height - b.height).abs());
        }
        let fa = self.base.coord(&self.base.iterate(&a.base, 1));
        if close(fa, xb) {
            return Some((self.ceiling_at(&a.base) - a.height + b.height).abs());
        }
        let fb = self.base.coord(&self.base.iterate(&b.base, 1));
        if close(fb, xa) {
            return Some((self.ceiling_at(&b.base) - b.height + a.height).abs());
        }
        None
    }

    /// Flow samples at times `t0 + j·dt`, `j < n`, along one orbit, as
    /// `(base coordinate, height, ceiling)`.
    pub fn orbit_samples(&self, p: &SpecialFlowPoint<B::Point>, dt: f64, n: usize) -> Result<Vec<(f64, f64, f64)>> {
        if !(dt > 0.0) {
            return Err(Error::invalid("sample spacing must be positive"));
        }
        let horizon = dt * n as f64 + p.height;
        let needed = (horizon / self.ceiling.lower_bound()).ceil() as i64 + 2;
        self.base.check_iterate(needed)?;
        let mut out = Vec::with_capacity(n);
        let mut m: i64 = 0;
        let mut acc = KahanSum::new();
        let mut cur = p.base;
        let mut c = self.ceiling_at(&cur);
        for j in 0..n {
            let s = p.height + j as f64 * dt;
            while acc.value() + c <= s {
                acc.add(c);
                m += 1;
                cur = self.base.iterate(&p.base, m);
                c = self.ceiling_at(&cur);
            }
            out.push((self.base.coord(&cur), s - acc.value(), c));
        }
        Ok(out)
    }
}

trait NextDown {
    fn next_down_safe(self) -> f64;
}

impl NextDown for f64 {
    fn next_down_safe(self) -> f64 {
        f64::from_bits(self.to_bits() - 1)
    }
}
