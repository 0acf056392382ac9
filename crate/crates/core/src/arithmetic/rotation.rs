use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::angle::Angle;
use super::cf::ContinuedFraction;
use super::dd::Dd;
use crate::error::{Error, Result};
use crate::numerics::{frac, two_prod, two_sum};

/// Largest `|m|` accepted by [`orbit_point`].
pub const ORBIT_POINT_MAX_ITERATE: u64 = 1_000_000_000;
/// Absolute accuracy guaranteed by [`orbit_point`] and [`Rotation::point`].
pub const ORBIT_POINT_TOLERANCE: f64 = 1e-15;

/// `{x0 + m α}` evaluated exactly on a convergent `p_n/q_n` with
/// `q_n q_{n+1} > |m| 1e15`, so that `|m| |α − p_n/q_n| < 1e-15`.
///
/// The result is the exact rational `{x0 + m p_n/q_n}` when `x0` is
/// rational, and carries the truncation bound as its error.
pub fn orbit_point(cf: &ContinuedFraction, x0: &Angle, m: i64) -> Result<Angle> {
    let abs_m = m.unsigned_abs();
    if abs_m > ORBIT_POINT_MAX_ITERATE {
        return Err(Error::invalid(format!(
            "iterate {m} exceeds the supported range |m| <= {ORBIT_POINT_MAX_ITERATE}"
        )));
    }
    if m == 0 {
        return Ok(x0.clone());
    }
    let need = BigUint::from(abs_m) * BigUint::from(1_000_000_000_000_000u64);
    let depth = cf.depth() as i64;
    let n = (0..depth)
        .find(|&n| cf.q(n) * cf.q(n + 1) > need)
        .ok_or_else(|| {
            Error::InsufficientDepth(format!(
                "iterate {m} needs q_n q_(n+1) > {need}, depth {depth} is too shallow"
            ))
        })?;
    let qn = cf.q(n);
    let mut r = (BigUint::from(abs_m) * cf.p(n)) % qn;
    if m < 0 && !r.is_zero() {
        r = qn - r;
    }
    let step = BigRational::new(BigInt::from(r), BigInt::from(qn.clone()));
    let bound = abs_m as f64 / (cf.q(n) * cf.q(n + 1)).to_f64().unwrap_or(f64::INFINITY);
    let shifted = match x0.as_rational() {
        Some(x) => Angle::from_ratio_with_error(x + step, x0.error_bound() + bound),
        None => Angle::from_dd(x0.to_dd().add(Dd::from_rational(&step)), x0.error_bound() + bound),
    };
    Ok(shifted)
}

/// Fast evaluation of orbit points `{x + m α}` for Birkhoff sums.
///
/// `m α` is formed with an error-free product against a double-double `α`,
/// so there is no drift with `m`: every point is accurate to a few ulps of
/// 1 as long as `|m| <= max_iterate`.
#[derive(Clone, Copy, Debug)]
pub struct Rotation {
    alpha: Dd,
    max_iterate: u64,
}

impl Rotation {
    pub fn from_cf(cf: &ContinuedFraction) -> Self {
        let max_iterate = cf.max_guaranteed_iterate().min(1u64 << 52);
        Rotation { alpha: cf.alpha(), max_iterate }
    }

    /// Rotation by the binary value of `alpha`. Intended for fixed toy
    /// numbers; the orbit is exact for that binary value.
    pub fn from_value(alpha: f64) -> Self {
        Rotation { alpha: Dd::from_f64(frac(alpha)), max_iterate: 1u64 << 52 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn alpha_dd(&self) -> Dd {
        self.alpha
    }

    pub fn max_iterate(&self) -> u64 {
        self.max_iterate
    }

    pub fn check_iterate(&self, m: i64) -> Result<()> {
        if m.unsigned_abs() > self.max_iterate {
            Err(Error::InsufficientDepth(format!(
                "iterate {m} exceeds the guaranteed range {} of the stored depth",
                self.max_iterate
            )))
        } else {
            Ok(())
        }
    }

    /// `{x + m α}`. Callers are expected to have checked `m` with
    /// [`Rotation::check_iterate`].
    #[inline]
    pub fn point(&self, x: f64, m: i64) -> f64 {
        debug_assert!(m.unsigned_abs() <= self.max_iterate);
        let mf = m as f64;
        let (p, e) = two_prod(mf, self.alpha.hi);
        let fp = p - p.floor();
        let tail = e + mf * self.alpha.lo;
        let (s, err) = two_sum(fp, x);
        let r = s - s.floor();
        frac(r + (err + tail))
    }

    pub fn try_point(&self, x: f64, m: i64) -> Result<f64> {
        self.check_iterate(m)?;
        Ok(self.point(x, m))
    }

    /// Iterator over `{x + i α}` for `i = 0, 1, ..., count - 1`.
    pub fn orbit(&self, x: f64, count: usize) -> impl Iterator<Item = f64> + '_ {
        (0..count as i64).map(move |i| self.point(x, i))
    }
}
