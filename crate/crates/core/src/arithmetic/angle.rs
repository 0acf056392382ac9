use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dd::Dd;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Rational(BigRational),
    Real(Dd),
}

/// A point of the circle `T = R/Z`, normalised to `[0, 1)`.
///
/// The value is either an exact rational or a double-double. `error` is the
/// tracked absolute distance to the point the angle is meant to represent:
/// zero for literals, `|m|/(q_n q_{n+1})` for an orbit point evaluated on a
/// convergent, and so on. Arithmetic adds the bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct Angle {
    repr: Repr,
    error: f64,
}

fn reduce_rational(r: &BigRational) -> BigRational {
    let fl = r.floor();
    r - fl
}

impl Angle {
    pub fn zero() -> Self {
        Angle { repr: Repr::Rational(BigRational::zero()), error: 0.0 }
    }

    /// The exact rational `num/den` reduced mod 1.
    pub fn rational(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be positive"));
        }
        Ok(Self::from_ratio(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Angle { repr: Repr::Rational(reduce_rational(&r)), error: 0.0 }
    }

    pub(crate) fn from_ratio_with_error(r: BigRational, error: f64) -> Self {
        Angle { repr: Repr::Rational(reduce_rational(&r)), error }
    }

    /// The binary value of `x`, reduced mod 1.
    pub fn from_f64(x: f64) -> Self {
        Angle { repr: Repr::Real(Dd::from_f64(x).frac()), error: 0.0 }
    }

    pub fn from_dd(x: Dd, error: f64) -> Self {
        Angle { repr: Repr::Real(x.frac()), error }
    }

    pub fn value(&self) -> f64 {
        self.to_dd().to_f64()
    }

    pub fn to_dd(&self) -> Dd {
        match &self.repr {
            Repr::Rational(r) => Dd::from_rational(r),
            Repr::Real(d) => *d,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rational(r) => Some(r),
            Repr::Real(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.repr, Repr::Rational(_))
    }

    /// Absolute error bound with respect to the intended point.
    pub fn error_bound(&self) -> f64 {
        self.error
    }

    pub fn add(&self, other: &Angle) -> Angle {
        let error = self.error + other.error;
        match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Angle::from_ratio_with_error(a + b, error),
            _ => {
                let s = self.to_dd().add(other.to_dd());
                // double-double rounding is ~1e-32, far below any tracked bound
                Angle { repr: Repr::Real(s.frac()), error }
            }
        }
    }

    pub fn neg(&self) -> Angle {
        match &self.repr {
            Repr::Rational(a) => Angle::from_ratio_with_error(-a, self.error),
            Repr::Real(d) => Angle { repr: Repr::Real(d.neg().frac()), error: self.error },
        }
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        self.add(&other.neg())
    }

    /// Parse `"p/q"`, a decimal literal (`"0.25"`, read exactly), or an
    /// integer. Decimal literals become exact rationals.
    pub fn parse(s: &str) -> Result<Angle> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::invalid("empty angle literal"));
        }
        if let Some((n, d)) = t.split_once('/') {
            let n = BigInt::from_str(n.trim())
                .map_err(|_| Error::invalid(format!("bad numerator in angle '{s}'")))?;
            let d = BigInt::from_str(d.trim())
                .map_err(|_| Error::invalid(format!("bad denominator in angle '{s}'")))?;
            if !d.is_positive() {
                return Err(Error::invalid(format!("non-positive denominator in angle '{s}'")));
            }
            return Ok(Angle::from_ratio(BigRational::new(n, d)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::invalid(format!("cannot parse angle '{s}'")));
        }
        let digits = format!("{}{}", if int_part.is_empty() { "0" } else { int_part }, frac_part);
        let mut num = BigInt::from_str(&digits).map_err(|_| Error::invalid(format!("cannot parse angle '{s}'")))?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Angle::from_ratio(BigRational::new(num, den)))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Repr::Real(d) => write!(f, "{:.17}", d.to_f64()),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            S(String),
            F(f64),
        }
        match Lit::deserialize(d)? {
            Lit::S(s) => Angle::parse(&s).map_err(serde::de::Error::custom),
            Lit::F(x) => Ok(Angle::from_f64(x)),
        }
    }
}

/// `‖r‖`, the distance from an exact rational to the nearest integer.
pub(crate) fn rational_mod1_distance(r: &BigRational) -> f64 {
    let f = reduce_rational(r);
    let one_minus = BigRational::one() - &f;
    let m = if f < one_minus { f } else { one_minus };
    m.to_f64().unwrap_or(0.0)
}
