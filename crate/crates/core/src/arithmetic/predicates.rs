use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::angle::{rational_mod1_distance, Angle};
use super::cf::ContinuedFraction;
use super::dd::Dd;
use crate::error::{Error, Result};

/// Default failure threshold for finite-depth general-position evidence.
pub const DEFAULT_GP_THRESHOLD: f64 = 1e-3;

/// Distance to the nearest integer, `min({x}, 1 − {x})`.
pub fn circle_norm(x: &Angle) -> f64 {
    match x.as_rational() {
        Some(r) => rational_mod1_distance(r),
        None => circle_norm_f64(x.value()),
    }
}

pub fn circle_norm_f64(x: f64) -> f64 {
    let f = crate::numerics::frac(x);
    f.min(1.0 - f)
}

/// `‖q β‖` for a big denominator `q`, exact when `β` is rational.
fn norm_of_multiple(q: &BigUint, beta: &Angle) -> f64 {
    match beta.as_rational() {
        Some(r) => {
            let prod = r * BigRational::from_integer(BigInt::from(q.clone()));
            rational_mod1_distance(&prod)
        }
        None => {
            let prod = Dd::from_biguint(q).mul(beta.to_dd()).frac().to_f64();
            prod.min(1.0 - prod)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GpVerdict {
    EvidenceHolds,
    EvidenceFails,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralPositionRow {
    pub n: usize,
    pub q_n: String,
    pub norm_qn_alpha: f64,
    pub norm_qn_beta: f64,
}

/// Finite-depth evidence for `‖q_n β‖ ↛ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralPositionReport {
    pub beta: Angle,
    pub depth: usize,
    /// `‖q_n β‖` for `n = 0..=depth`.
    pub norms: Vec<f64>,
    pub rows: Vec<GeneralPositionRow>,
    /// First index of the tail window (last third of the indices).
    pub window_start: usize,
    pub tail_min: f64,
    pub tail_max: f64,
    pub fail_threshold: f64,
    /// Bound on the absolute error of every entry of `norms`.
    pub precision: f64,
    pub verdict: GpVerdict,
}

impl GeneralPositionReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wr.serialize(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Graded evidence for general position of `β` with respect to `α`.
///
/// The verdict is `EvidenceHolds` when the largest norm over the last third
/// of the indices exceeds `fail_threshold` by more than `precision`,
/// `EvidenceFails` when the tail stays below it (again up to `precision`) and
/// is non-increasing, and `Inconclusive` otherwise.
pub fn general_position(
    cf: &ContinuedFraction,
    beta: &Angle,
    depth: usize,
    fail_threshold: f64,
) -> Result<GeneralPositionReport> {
    if depth > cf.depth() {
        return Err(Error::InsufficientDepth(format!(
            "general position requested to depth {depth}, continued fraction has depth {}",
            cf.depth()
        )));
    }
    let big_n = cf.depth() as i64;
    let pn_last = BigInt::from(cf.p(big_n).clone());
    let qn_last = BigInt::from(cf.q(big_n).clone());
    let mut rows = Vec::with_capacity(depth + 1);
    let mut norms = Vec::with_capacity(depth + 1);
    let mut precision: f64 = 0.0;
    for n in 0..=depth {
        let q = cf.q(n as i64);
        // ‖q_n α‖ on the deepest convergent: |q_n p_N − p_n q_N| / q_N
        let num = BigInt::from(q.clone()) * &pn_last - BigInt::from(cf.p(n as i64).clone()) * &qn_last;
        let norm_alpha = rational_mod1_distance(&BigRational::new(num, qn_last.clone()));
        let norm_beta = norm_of_multiple(q, beta);
        let qf = q.to_f64().unwrap_or(f64::INFINITY);
        let err = if beta.is_rational() {
            qf * beta.error_bound()
        } else {
            qf * (beta.error_bound() + 2f64.powi(-100))
        };
        precision = precision.max(err);
        norms.push(norm_beta);
        rows.push(GeneralPositionRow { n, q_n: q.to_string(), norm_qn_alpha: norm_alpha, norm_qn_beta: norm_beta });
    }
    let len = norms.len();
    let window = len.div_ceil(3).max(1);
    let window_start = len - window;
    let tail = &norms[window_start..];
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(0.0, f64::max);
    // entries are known to ±precision only
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0] + precision);
    let verdict = if tail_max - precision > fail_threshold {
        GpVerdict::EvidenceHolds
    } else if tail_max + precision <= fail_threshold && non_increasing {
        GpVerdict::EvidenceFails
    } else {
        GpVerdict::Inconclusive
    };
    Ok(GeneralPositionReport {
        beta: beta.clone(),
        depth,
        norms,
        rows,
        window_start,
        tail_min,
        tail_max,
        fail_threshold,
        precision,
        verdict,
    })
}

/// Indices `n` with `q_n` odd. Consecutive denominators are coprime, so
/// every pair `{n, n+1}` contains at least one of them.
#[derive(Clone, Debug, Serialize)]
pub struct HalfCertificate {
    pub indices: Vec<usize>,
    pub depth: usize,
    pub covers_every_pair: bool,
    pub consecutive_coprime: bool,
}

pub fn half_general_position_certificate(cf: &ContinuedFraction, depth: usize) -> Result<HalfCertificate> {
    if depth < 2 {
        return Err(Error::invalid("parity certificate needs depth >= 2"));
    }
    if depth > cf.depth() {
        return Err(Error::InsufficientDepth(format!(
            "certificate requested to depth {depth}, continued fraction has depth {}",
            cf.depth()
        )));
    }
    let odd: Vec<bool> = (0..=depth).map(|n| cf.q(n as i64).is_odd()).collect();
    let indices = (0..=depth).filter(|&n| odd[n]).collect();
    let covers_every_pair = odd.windows(2).all(|w| w[0] || w[1]);
    let consecutive_coprime = (-1..depth as i64).all(|n| cf.consecutive_gcd(n).is_one());
    Ok(HalfCertificate { indices, depth, covers_every_pair, consecutive_coprime })
}

/// Outcome of the bounded search for `l + l/ε = k α + 2p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum RelationSearch {
    NoRelationFound { bound: u32 },
    RelationFound { l: i64, k: i64, p: i64 },
}

impl RelationSearch {
    pub fn found(&self) -> bool {
        matches!(self, RelationSearch::RelationFound { .. })
    }
}

/// Bounded membership test for `L_α = {ε : 1/ε ∉ Q + αQ}` through the
/// relation `l + l/ε = kα + 2p`, `0 < l <= K`, `|k|, |p| <= K`, at tolerance
/// `1e-12 K`. Solutions come in sign-symmetric pairs, so `l > 0` suffices.
pub fn in_l_alpha(epsilon: f64, cf: &ContinuedFraction, bound: u32) -> Result<RelationSearch> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if bound == 0 {
        return Err(Error::invalid("search bound K must be >= 1"));
    }
    let kk = bound as i64;
    let tol = 1e-12 * bound as f64;
    let alpha = cf.alpha();
    for l in 1..=kk {
        let lhs = l as f64 + l as f64 / epsilon;
        for k in -kk..=kk {
            let ka = Dd::from_f64(k as f64).mul(alpha).to_f64();
            let v = lhs - ka;
            let p = (v / 2.0).round();
            if p.abs() <= kk as f64 && (v - 2.0 * p).abs() <= tol {
                return Ok(RelationSearch::RelationFound { l, k, p: p as i64 });
            }
        }
    }
    Ok(RelationSearch::NoRelationFound { bound })
}

/// Search `l + l/ε = kα + 2p` for one fixed `l`, `|k|, |p| <= K`.
/// Returns `(k, p)` for `l > 0`; negative `l` is answered through the sign
/// symmetry of the relation.
pub fn relation_for_l(l: i64, epsilon: f64, cf: &ContinuedFraction, bound: u32) -> Option<(i64, i64)> {
    if l == 0 {
        return Some((0, 0));
    }
    let sign = l.signum();
    let la = l.abs();
    let kk = bound as i64;
    let tol = 1e-12 * bound as f64;
    let lhs = la as f64 + la as f64 / epsilon;
    let alpha = cf.alpha();
    (-kk..=kk).find_map(|k| {
        let v = lhs - Dd::from_f64(k as f64).mul(alpha).to_f64();
        let p = (v / 2.0).round();
        (p.abs() <= kk as f64 && (v - 2.0 * p).abs() <= tol).then_some((sign * k, sign * p as i64))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_norm_examples() {
        assert_eq!(circle_norm(&Angle::zero()), 0.0);
        assert_eq!(circle_norm(&Angle::rational(1, 2).unwrap()), 0.5);
        assert!((circle_norm(&Angle::parse("0.8").unwrap()) - 0.2).abs() < 1e-16);
        assert!((circle_norm_f64(0.8) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn beta_alpha_fails_and_half_holds() {
        let cf = ContinuedFraction::golden(60).unwrap();
        let alpha = cf.alpha_angle();
        let r = general_position(&cf, &alpha, 50, DEFAULT_GP_THRESHOLD).unwrap();
        assert_eq!(r.verdict, GpVerdict::EvidenceFails);
        let h = general_position(&cf, &Angle::rational(1, 2).unwrap(), 50, DEFAULT_GP_THRESHOLD).unwrap();
        assert_eq!(h.verdict, GpVerdict::EvidenceHolds);
        assert_eq!(h.tail_max, 0.5);
        let z = general_position(&cf, &Angle::zero(), 50, DEFAULT_GP_THRESHOLD).unwrap();
        assert!(z.norms.iter().all(|&x| x == 0.0));
        assert_eq!(z.verdict, GpVerdict::EvidenceFails);
    }

    #[test]
    fn depth_beyond_cf_is_rejected() {
        let cf = ContinuedFraction::golden(10).unwrap();
        assert!(general_position(&cf, &Angle::zero(), 11, 1e-3).is_err());
    }

    #[test]
    fn report_csv_has_expected_columns() {
        let cf = ContinuedFraction::golden(12).unwrap();
        let r = general_position(&cf, &Angle::rational(1, 3).unwrap(), 10, 1e-3).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,q_n,norm_qn_alpha,norm_qn_beta\n0,1,"));
        assert_eq!(text.lines().count(), 12);
    }

    #[test]
    fn golden_parity_certificate() {
        let cf = ContinuedFraction::golden(6).unwrap();
        let c = half_general_position_certificate(&cf, 6).unwrap();
        // q_0..q_6 = 1, 2, 3, 5, 8, 13, 21
        assert_eq!(c.indices, vec![0, 2, 3, 5, 6]);
        assert!(c.covers_every_pair && c.consecutive_coprime);
        assert!(half_general_position_certificate(&cf, 1).is_err());
    }

    #[test]
    fn even_quotients_give_all_odd_denominators() {
        let cf = ContinuedFraction::new(&[2, 4, 6, 2, 8, 2]).unwrap();
        let c = half_general_position_certificate(&cf, 6).unwrap();
        assert_eq!(c.indices, (0..=6).collect::<Vec<_>>());
    }

    #[test]
    fn relation_search_examples() {
        let cf = ContinuedFraction::golden(60).unwrap();
        assert!(in_l_alpha(0.5, &cf, 10).unwrap().found());
        match in_l_alpha(cf.value(), &cf, 10).unwrap() {
            RelationSearch::RelationFound { k, .. } => assert_ne!(k, 0),
            other => panic!("expected a relation, got {other:?}"),
        }
        assert_eq!(
            in_l_alpha(1.0 / std::f64::consts::PI, &cf, 50).unwrap(),
            RelationSearch::NoRelationFound { bound: 50 }
        );
        assert!(in_l_alpha(1.5, &cf, 10).is_err());
        assert_eq!(relation_for_l(2, 0.5, &cf, 10), Some((0, 3)));
        assert_eq!(relation_for_l(-2, 0.5, &cf, 10), Some((0, -3)));
        assert_eq!(relation_for_l(1, 1.0 / std::f64::consts::PI, &cf, 50), None);
    }
}
