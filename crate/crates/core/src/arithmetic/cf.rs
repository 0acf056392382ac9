use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::angle::Angle;
use super::dd::Dd;
use super::rotation::Rotation;
use crate::error::{Error, Result};

/// Serializable description of a continued fraction: the partial quotients,
/// repeated periodically up to `depth` when `depth` exceeds their count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfSpec {
    pub partial_quotients: Vec<u64>,
    #[serde(default)]
    pub depth: Option<usize>,
}

impl CfSpec {
    pub fn golden(depth: usize) -> Self {
        CfSpec { partial_quotients: vec![1], depth: Some(depth) }
    }

    pub fn expanded(&self) -> Result<Vec<u64>> {
        if self.partial_quotients.is_empty() {
            return Err(Error::invalid("continued fraction needs at least one partial quotient"));
        }
        let depth = self.depth.unwrap_or(self.partial_quotients.len());
        Ok(self.partial_quotients.iter().copied().cycle().take(depth).collect())
    }

    pub fn build(&self) -> Result<ContinuedFraction> {
        ContinuedFraction::new(&self.expanded()?)
    }
}

/// `α = [0; 1, a_1, ..., a_N]` with exact convergents `p_n/q_n`, `-1 <= n <= N`.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    quotients: Vec<u64>,
    // index n + 1 holds p_n, q_n
    p: Vec<BigUint>,
    q: Vec<BigUint>,
    alpha: Dd,
}

impl ContinuedFraction {
    /// Build from `a_1, ..., a_N` with `q_{-1} = q_0 = 1`, `p_{-1} = 0`, `p_0 = 1`.
    pub fn new(partial_quotients: &[u64]) -> Result<Self> {
        if partial_quotients.is_empty() {
            return Err(Error::invalid("continued fraction depth must be at least 1"));
        }
        if let Some(pos) = partial_quotients.iter().position(|&a| a == 0) {
            return Err(Error::invalid(format!(
                "partial quotient a_{} is zero; all partial quotients must be >= 1",
                pos + 1
            )));
        }
        let n = partial_quotients.len();
        let mut p = Vec::with_capacity(n + 2);
        let mut q = Vec::with_capacity(n + 2);
        p.push(BigUint::zero());
        p.push(BigUint::one());
        q.push(BigUint::one());
        q.push(BigUint::one());
        for (i, &a) in partial_quotients.iter().enumerate() {
            let a = BigUint::from(a);
            let pn = &a * &p[i + 1] + &p[i];
            let qn = &a * &q[i + 1] + &q[i];
            p.push(pn);
            q.push(qn);
        }
        let last = BigRational::new(BigInt::from(p[n + 1].clone()), BigInt::from(q[n + 1].clone()));
        let alpha = Dd::from_rational(&last);
        Ok(ContinuedFraction { quotients: partial_quotients.to_vec(), p, q, alpha })
    }

    /// All partial quotients equal to one: `α = (√5 − 1)/2`.
    pub fn golden(depth: usize) -> Result<Self> {
        Self::new(&vec![1; depth])
    }

    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn partial_quotients(&self) -> &[u64] {
        &self.quotients
    }

    fn index(&self, n: i64) -> usize {
        assert!(n >= -1 && n <= self.depth() as i64, "convergent index {n} out of range");
        (n + 1) as usize
    }

    pub fn p(&self, n: i64) -> &BigUint {
        &self.p[self.index(n)]
    }

    pub fn q(&self, n: i64) -> &BigUint {
        &self.q[self.index(n)]
    }

    /// `q_n` as `f64` (rounded for huge denominators).
    pub fn q_f64(&self, n: i64) -> f64 {
        self.q(n).to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn convergent(&self, n: i64) -> BigRational {
        BigRational::new(BigInt::from(self.p(n).clone()), BigInt::from(self.q(n).clone()))
    }

    /// `α` as a double-double, evaluated on the deepest convergent.
    pub fn alpha(&self) -> Dd {
        self.alpha
    }

    /// `α` as the exact deepest convergent, carrying `error_bound()`.
    pub fn alpha_angle(&self) -> Angle {
        Angle::from_ratio_with_error(self.convergent(self.depth() as i64), self.error_bound())
    }

    pub fn value(&self) -> f64 {
        self.alpha.to_f64()
    }

    /// Bound on `|α − p_N/q_N|` for any irrational with these leading
    /// partial quotients: `1/(q_N q_{N+1})` with the smallest admissible
    /// `q_{N+1} = q_N + q_{N-1}`.
    pub fn error_bound(&self) -> f64 {
        let n = self.depth() as i64;
        let next = self.q(n) + self.q(n - 1);
        let prod = self.q(n) * next;
        1.0 / prod.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Decimal expansion of the deepest convergent, truncated to `digits`.
    pub fn decimal(&self, digits: usize) -> String {
        let n = self.depth() as i64;
        let scaled = self.p(n) * num_traits::pow(BigUint::from(10u32), digits) / self.q(n);
        let s = scaled.to_string();
        let padded = format!("{:0>width$}", s, width = digits);
        format!("0.{padded}")
    }

    /// `gcd(q_n, q_{n+1})` for `-1 <= n < N`.
    pub fn consecutive_gcd(&self, n: i64) -> BigUint {
        self.q(n).gcd(self.q(n + 1))
    }

    /// Largest iterate `|m|` whose orbit point is guaranteed to `1e-15`
    /// (`q_{N-1} q_N > |m| 1e15`).
    pub fn max_guaranteed_iterate(&self) -> u64 {
        let n = self.depth() as i64;
        let prod = self.q(n - 1) * self.q(n);
        let lim = prod / BigUint::from(1_000_000_000_000_000u64);
        lim.to_u64().unwrap_or(u64::MAX)
    }

    pub fn rotation(&self) -> Rotation {
        Rotation::from_cf(self)
    }

    pub fn spec(&self) -> CfSpec {
        CfSpec { partial_quotients: self.quotients.clone(), depth: Some(self.depth()) }
    }
}
