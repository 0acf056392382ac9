use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numerics::{two_prod, two_sum};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2` (double-double).
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Nearest double-double to an exact rational.
    pub fn from_rational(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let exact_hi = BigRational::from_f64(hi).unwrap_or_else(BigRational::zero);
        let lo = (r - exact_hi).to_f64().unwrap_or(0.0);
        Dd::new(hi, lo)
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Dd::from_rational(&BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = two_sum(s, e + t);
        Dd::new(s, e + f)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Dd::new(p, e)
    }

    /// Fractional part in `[0, 1)`, right-continuous at integers.
    pub fn frac(self) -> Dd {
        // past 2^53 the low word can carry an integer part of its own
        let mut r = self;
        for _ in 0..2 {
            let fl = r.hi.floor();
            r = Dd::new(r.hi - fl, r.lo);
        }
        if r.hi < 0.0 || (r.hi == 0.0 && r.lo < 0.0) {
            r = r.add(Dd::from_f64(1.0));
        }
        if r.hi >= 1.0 {
            r = r.sub(Dd::from_f64(1.0));
        }
        if r.hi < 0.0 {
            // |r| below double-double resolution around an integer
            r = Dd::ZERO;
        }
        r
    }
}
