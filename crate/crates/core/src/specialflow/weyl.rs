use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{BaseDynamics, SpecialFlow};
use crate::arithmetic::{relation_for_l, ContinuedFraction};
use crate::error::{Error, Result};
use crate::numerics::KahanSum;

/// `(1/N) |Σ_{m<N} e^{iλ S_m χ(x)}|`.
pub fn weyl_sum<B: BaseDynamics>(flow: &SpecialFlow<B>, lambda: f64, x: &B::Point, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("Weyl sum needs N >= 1"));
    }
    let s = birkhoff_prefix(flow, x, n)?;
    Ok(magnitudes_at(&s, lambda, &[n])[0])
}

/// `S_m χ(x)` for `m = 0..n`, from exact orbit points.
pub fn birkhoff_prefix<B: BaseDynamics>(flow: &SpecialFlow<B>, x: &B::Point, n: usize) -> Result<Vec<f64>> {
    let c = flow.ceiling_orbit(x, n)?;
    let mut acc = KahanSum::new();
    Ok(c.iter()
        .map(|v| {
            let s = acc.value();
            acc.add(*v);
            s
        })
        .collect())
}

/// Weyl magnitudes of one prefix array at each `N` of an increasing schedule.
fn magnitudes_at(s: &[f64], lambda: f64, schedule: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(schedule.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut done = 0;
    for &n in schedule {
        for v in &s[done..n] {
            acc += Complex64::from_polar(1.0, lambda * v);
        }
        done = n;
        out.push((acc.norm() / n as f64).min(1.0));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeylVerdict {
    EigenvalueEvidence,
    DecayEvidence,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanThresholds {
    pub theta_decay: f64,
    pub theta_eig: f64,
    /// Fraction of grid points that must decrease along the schedule.
    pub monotone_fraction: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        ScanThresholds { theta_decay: 0.2, theta_eig: 0.6, monotone_fraction: 0.95 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub lambda: f64,
    pub n_schedule: Vec<usize>,
    /// `magnitudes[x_index][schedule_index]`.
    pub magnitudes: Vec<Vec<f64>>,
    pub max_at_n_max: f64,
    pub min_overall: f64,
    /// Mean over base points strictly decreasing along the schedule.
    pub monotone: bool,
    pub verdict: WeylVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub thresholds: ScanThresholds,
    pub n_schedule: Vec<usize>,
    pub reports: Vec<WeylReport>,
    pub monotone_fraction: f64,
    pub max_at_n_max: f64,
    pub verdict: WeylVerdict,
}

#[derive(Serialize)]
struct ScanRow {
    lambda: f64,
    #[serde(rename = "N")]
    n: usize,
    x_index: usize,
    magnitude: f64,
}

impl ScanReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.reports {
            for (xi, row) in r.magnitudes.iter().enumerate() {
                for (n, m) in self.n_schedule.iter().zip(row) {
                    wr.serialize(ScanRow { lambda: r.lambda, n: *n, x_index: xi, magnitude: *m })?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// `{"verdict", "thresholds", "evidence"}` where the evidence lists the
    /// λ carrying eigenvalue evidence and the largest magnitudes at `N_max`.
    pub fn verdict_json(&self) -> serde_json::Value {
        let mut worst: Vec<&WeylReport> = self.reports.iter().collect();
        worst.sort_by(|a, b| b.max_at_n_max.total_cmp(&a.max_at_n_max));
        let evidence: Vec<serde_json::Value> = worst
            .iter()
            .filter(|r| r.verdict == WeylVerdict::EigenvalueEvidence)
            .chain(worst.iter().take(5))
            .map(|r| {
                serde_json::json!({
                    "lambda": r.lambda,
                    "lambda_over_pi": r.lambda / PI,
                    "verdict": r.verdict,
                    "max_at_n_max": r.max_at_n_max,
                    "min_overall": r.min_overall,
                    "monotone": r.monotone,
                })
            })
            .collect();
        serde_json::json!({
            "verdict": self.verdict,
            "thresholds": self.thresholds,
            "n_schedule": self.n_schedule,
            "grid_points": self.reports.len(),
            "max_at_n_max": self.max_at_n_max,
            "monotone_fraction": self.monotone_fraction,
            "evidence": evidence,
        })
    }
}

fn classify(lambda: f64, schedule: &[usize], magnitudes: Vec<Vec<f64>>, th: &ScanThresholds) -> WeylReport {
    let last = schedule.len() - 1;
    let max_at_n_max = magnitudes.iter().map(|r| r[last]).fold(0.0, f64::max);
    let min_overall = magnitudes.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let means: Vec<f64> =
        (0..schedule.len()).map(|j| magnitudes.iter().map(|r| r[j]).sum::<f64>() / magnitudes.len() as f64).collect();
    let monotone = means.windows(2).all(|w| w[1] < w[0]);
    let verdict = if min_overall > th.theta_eig {
        WeylVerdict::EigenvalueEvidence
    } else if max_at_n_max < th.theta_decay && monotone {
        WeylVerdict::DecayEvidence
    } else {
        WeylVerdict::Inconclusive
    };
    WeylReport { lambda, n_schedule: schedule.to_vec(), magnitudes, max_at_n_max, min_overall, monotone, verdict }
}

/// Weyl magnitudes over a λ-grid, a schedule of `N` and several base points.
///
/// Overall verdict: eigenvalue evidence if some λ stays above `theta_eig` at
/// every `(x, N)`; decay evidence if every λ is below `theta_decay` at the
/// largest `N` and the required fraction decreases along the schedule.
pub fn eigenvalue_scan<B: BaseDynamics>(
    flow: &SpecialFlow<B>,
    lambdas: &[f64],
    schedule: &[usize],
    xs: &[B::Point],
    thresholds: ScanThresholds,
) -> Result<ScanReport> {
    if lambdas.is_empty() || lambdas.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(Error::invalid("λ-grid must be non-empty and exclude 0"));
    }
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N-schedule must be increasing and positive"));
    }
    if xs.is_empty() {
        return Err(Error::invalid("at least one base point is required"));
    }
    let n_max = *schedule.last().unwrap();
    let prefixes: Vec<Vec<f64>> =
        xs.par_iter().map(|x| birkhoff_prefix(flow, x, n_max)).collect::<Result<_>>()?;
    let reports: Vec<WeylReport> = lambdas
        .par_iter()
        .map(|&l| {
            let mags = prefixes.iter().map(|s| magnitudes_at(s, l, schedule)).collect();
            classify(l, schedule, mags, &thresholds)
        })
        .collect();
    let max_at_n_max = reports.iter().map(|r| r.max_at_n_max).fold(0.0, f64::max);
    let monotone_fraction = reports.iter().filter(|r| r.monotone).count() as f64 / reports.len() as f64;
    let verdict = if reports.iter().any(|r| r.verdict == WeylVerdict::EigenvalueEvidence) {
        WeylVerdict::EigenvalueEvidence
    } else if max_at_n_max < thresholds.theta_decay && monotone_fraction >= thresholds.monotone_fraction {
        WeylVerdict::DecayEvidence
    } else {
        WeylVerdict::Inconclusive
    };
    Ok(ScanReport { thresholds, n_schedule: schedule.to_vec(), reports, monotone_fraction, max_at_n_max, verdict })
}

/// `points` values `λ = upper·i/points`, `i = 1..=points`, followed by the
/// suspect values `lπ/ε` for `l = 1..=l_max` (only positive λ: Weyl
/// magnitudes are even in λ).
pub fn default_lambda_grid(upper: f64, points: usize, epsilon: Option<f64>, l_max: u32) -> Vec<f64> {
    let mut g: Vec<f64> = (1..=points).map(|i| upper * i as f64 / points as f64).collect();
    if let Some(e) = epsilon {
        g.extend((1..=l_max).map(|l| l as f64 * PI / e));
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum KsExclusion {
    /// `λ = 0`: constants are eigenfunctions.
    NotExcluded,
    /// `λε/π` is not an integer, so no measurable eigenfunction can exist.
    ExcludedByStepLemma,
    /// `λε = lπ` and the relation `l + l/ε = kα + 2p` holds.
    RelationFound { l: i64, k: i64, p: i64 },
    /// `λε = lπ` but no relation with `|k|, |p| <= bound`.
    ExcludedByArithmetic { l: i64, bound: u32 },
}

/// Arithmetic exclusion of `λ` as an eigenvalue of the two-step special flow.
pub fn ks_exclusion(epsilon: f64, cf: &ContinuedFraction, lambda: f64, bound: u32) -> Result<KsExclusion> {
    if bound == 0 {
        return Err(Error::invalid("relation bound K must be >= 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("ε must lie in (0, 1), got {epsilon}")));
    }
    if lambda == 0.0 {
        return Ok(KsExclusion::NotExcluded);
    }
    let r = lambda * epsilon / PI;
    let l = r.round();
    if (r - l).abs() > 1e-9 {
        return Ok(KsExclusion::ExcludedByStepLemma);
    }
    let l = l as i64;
    Ok(match relation_for_l(l, epsilon, cf, bound) {
        Some((k, p)) => KsExclusion::RelationFound { l, k, p },
        None => KsExclusion::ExcludedByArithmetic { l, bound },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::Rotation;
    use crate::specialflow::{make_step_ceiling, CeilingFunction};

    fn golden() -> ContinuedFraction {
        ContinuedFraction::golden(60).unwrap()
    }

    #[test]
    fn constant_ceiling_has_eigenvalue_two_pi() {
        let f = SpecialFlow::new(golden().rotation(), CeilingFunction::constant(1.0).unwrap()).unwrap();
        for n in [1, 10, 1000] {
            assert!((weyl_sum(&f, 2.0 * PI, &0.3, n).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(weyl_sum(&f, 0.0, &0.3, n).unwrap(), 1.0);
        }
        let r = eigenvalue_scan(&f, &[1.0, 2.0 * PI], &[100, 1000], &[0.1, 0.6], ScanThresholds::default()).unwrap();
        assert_eq!(r.verdict, WeylVerdict::EigenvalueEvidence);
        assert_eq!(r.reports[1].verdict, WeylVerdict::EigenvalueEvidence);
        assert_eq!(r.reports[0].verdict, WeylVerdict::DecayEvidence);
    }

    #[test]
    fn prefix_matches_direct_sum() {
        let rot: Rotation = golden().rotation();
        let f = SpecialFlow::new(rot, make_step_ceiling(0.3, 0.5).unwrap()).unwrap();
        let s = birkhoff_prefix(&f, &0.25, 50).unwrap();
        assert_eq!(s[0], 0.0);
        assert!((s[49] - f.birkhoff(&0.25, 49).unwrap()).abs() < 1e-13);
        let direct: Complex64 = s[..20].iter().map(|v| Complex64::from_polar(1.0, 1.7 * v)).sum();
        assert!((weyl_sum(&f, 1.7, &0.25, 20).unwrap() - direct.norm() / 20.0).abs() < 1e-14);
    }

    #[test]
    fn grid_contents() {
        let g = default_lambda_grid(8.0 * PI, 400, Some(0.5), 20);
        assert_eq!(g.len(), 420);
        assert!((g[399] - 8.0 * PI).abs() < 1e-12);
        assert!((g[400] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn exclusion_cases() {
        let cf = golden();
        let eps = 1.0 / PI;
        assert_eq!(ks_exclusion(eps, &cf, 1.0, 50).unwrap(), KsExclusion::ExcludedByStepLemma);
        assert_eq!(ks_exclusion(eps, &cf, 0.0, 50).unwrap(), KsExclusion::NotExcluded);
        assert_eq!(ks_exclusion(0.5, &cf, 4.0 * PI, 10).unwrap(), KsExclusion::RelationFound { l: 2, k: 0, p: 3 });
        assert_eq!(
            ks_exclusion(eps, &cf, PI / eps, 50).unwrap(),
            KsExclusion::ExcludedByArithmetic { l: 1, bound: 50 }
        );
    }

    #[test]
    fn scan_input_validation() {
        let f = SpecialFlow::new(golden().rotation(), CeilingFunction::constant(1.0).unwrap()).unwrap();
        let th = ScanThresholds::default();
        assert!(eigenvalue_scan(&f, &[], &[10], &[0.1], th).is_err());
        assert!(eigenvalue_scan(&f, &[0.0], &[10], &[0.1], th).is_err());
        assert!(eigenvalue_scan(&f, &[1.0], &[10, 5], &[0.1], th).is_err());
    }
}
