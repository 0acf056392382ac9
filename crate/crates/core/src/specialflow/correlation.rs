use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{BaseDynamics, SpecialFlow, SpecialFlowPoint};
use crate::error::{Error, Result};
use crate::numerics::KahanSum;

/// Bounded real observable on the suspended space, a function of the base
/// coordinate `x` and the height `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Observable {
    Constant { value: f64 },
    /// Indicator of `[a, b) × [c, d)`.
    Indicator { base: (f64, f64), height: (f64, f64) },
    /// `cos(2π·freq·s)`.
    HeightCos { freq: f64 },
    /// `cos(2π·freq·x)`.
    BaseCos { freq: f64 },
}

impl Observable {
    #[inline]
    pub fn eval(&self, x: f64, s: f64) -> f64 {
        match *self {
            Observable::Constant { value } => value,
            Observable::Indicator { base: (a, b), height: (c, d) } => {
                if a <= x && x < b && c <= s && s < d {
                    1.0
                } else {
                    0.0
                }
            }
            Observable::HeightCos { freq } => (2.0 * PI * freq * s).cos(),
            Observable::BaseCos { freq } => (2.0 * PI * freq * x).cos(),
        }
    }
}

struct Series {
    f: Vec<f64>,
    g: Vec<f64>,
}

fn sample_series<B: BaseDynamics>(
    flow: &SpecialFlow<B>,
    p: &SpecialFlowPoint<B::Point>,
    f: &Observable,
    g: &Observable,
    dt: f64,
    n: usize,
) -> Result<Series> {
    let samples = flow.orbit_samples(p, dt, n)?;
    Ok(Series {
        f: samples.iter().map(|&(x, s, _)| f.eval(x, s)).collect(),
        g: samples.iter().map(|&(x, s, _)| g.eval(x, s)).collect(),
    })
}

/// `⟨F∘T^{lag}, G⟩ − ⟨F⟩⟨G⟩` on the first `n_avg` samples.
fn lagged(series: &Series, lag: usize, n_avg: usize) -> f64 {
    let mut fg = KahanSum::new();
    let mut fs = KahanSum::new();
    let mut gs = KahanSum::new();
    for j in 0..n_avg {
        let fv = series.f[j + lag];
        let gv = series.g[j];
        fg.add(fv * gv);
        fs.add(fv);
        gs.add(gv);
    }
    let n = n_avg as f64;
    fg.value() / n - (fs.value() / n) * (gs.value() / n)
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

/// Single-orbit estimate of `⟨F∘T^t, G⟩ − ⟨F⟩⟨G⟩`, averaged over flow times
/// `[0, t_avg)` sampled every `dt`. `t` is rounded to a multiple of `dt`.
pub fn correlation<B: BaseDynamics>(
    flow: &SpecialFlow<B>,
    p: &SpecialFlowPoint<B::Point>,
    f: &Observable,
    g: &Observable,
    t: f64,
    t_avg: f64,
    dt: f64,
) -> Result<f64> {
    if !(t >= 0.0) || !(dt > 0.0) || t_avg < 1e3 * flow.mean() {
        return Err(Error::invalid("correlation needs t >= 0, dt > 0 and t_avg >= 1e3 × mean ceiling"));
    }
    let lag = (t / dt).round() as usize;
    let n_avg = (t_avg / dt).round() as usize;
    let series = sample_series(flow, p, f, g, dt, n_avg + lag)?;
    Ok(lagged(&series, lag, n_avg))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CesaroVerdict {
    WeakMixingEvidence,
    NoDecay,
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroCurve {
    pub f: Observable,
    pub g: Observable,
    pub variance_product: f64,
    /// Lag grid `t_i = i·resolution`.
    pub t: Vec<f64>,
    pub corr: Vec<f64>,
    /// `M(t_i) = mean of corr(t_j)^2 over j <= i`.
    pub m_t: Vec<f64>,
    /// `M` at `t_max·2^{−j}`, `j = checkpoints−1, ..., 0`.
    pub checkpoints: Vec<(f64, f64)>,
    pub decays: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroReport {
    pub t_max: f64,
    pub resolution: f64,
    pub t_avg: f64,
    pub threshold: f64,
    pub curves: Vec<CesaroCurve>,
    pub verdict: CesaroVerdict,
}

impl CesaroReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["pair", "t", "corr", "M_t"])?;
        for (i, c) in self.curves.iter().enumerate() {
            for j in 0..c.t.len() {
                wr.write_record([i.to_string(), c.t[j].to_string(), c.corr[j].to_string(), c.m_t[j].to_string()])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

const CHECKPOINTS: i32 = 5;

/// Cesàro mean `M(T) = (1/T)∫₀^T corr(t)² dt` on a lag grid of spacing
/// `resolution`. A pair decays when `M` is non-increasing at
/// `T = t_max·2^{−j}` and `M(t_max) <= threshold·Var F·Var G`.
pub fn cesaro_mixing_test<B: BaseDynamics>(
    flow: &SpecialFlow<B>,
    p: &SpecialFlowPoint<B::Point>,
    pairs: &[(Observable, Observable)],
    t_max: f64,
    resolution: f64,
    t_avg: f64,
    threshold: f64,
) -> Result<CesaroReport> {
    if t_max < 100.0 {
        return Err(Error::invalid("Cesàro test needs t_max >= 100"));
    }
    if !(resolution > 0.0) || resolution > t_max / 16.0 {
        return Err(Error::invalid("resolution must be positive and at most t_max / 16"));
    }
    if t_avg < 1e3 * flow.mean() {
        return Err(Error::invalid("t_avg must be at least 1e3 × mean ceiling"));
    }
    let dt = resolution / 2.0;
    let lags = (t_max / resolution).round() as usize;
    let n_avg = (t_avg / dt).round() as usize;
    let n = n_avg + 2 * lags + 1;
    let curves = pairs
        .iter()
        .map(|(f, g)| {
            let series = sample_series(flow, p, f, g, dt, n)?;
            let corr: Vec<f64> = (0..=lags).into_par_iter().map(|i| lagged(&series, 2 * i, n_avg)).collect();
            let t: Vec<f64> = (0..=lags).map(|i| i as f64 * resolution).collect();
            let mut acc = KahanSum::new();
            let m_t: Vec<f64> = corr
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    acc.add(c * c);
                    acc.value() / (i + 1) as f64
                })
                .collect();
            let variance_product = variance(&series.f[..n_avg]) * variance(&series.g[..n_avg]);
            let checkpoints: Vec<(f64, f64)> = (0..CHECKPOINTS)
                .rev()
                .map(|j| {
                    let idx = ((lags as f64) / 2f64.powi(j)).round() as usize;
                    (t[idx], m_t[idx])
                })
                .collect();
            let monotone = checkpoints.windows(2).all(|w| w[1].1 <= w[0].1);
            let decays = monotone && *m_t.last().unwrap() <= threshold * variance_product;
            Ok(CesaroCurve { f: f.clone(), g: g.clone(), variance_product, t, corr, m_t, checkpoints, decays })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict =
        if curves.iter().all(|c| c.decays) { CesaroVerdict::WeakMixingEvidence } else { CesaroVerdict::NoDecay };
    Ok(CesaroReport { t_max, resolution, t_avg, threshold, curves, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::ContinuedFraction;
    use crate::specialflow::CeilingFunction;

    fn unit_flow() -> SpecialFlow<crate::arithmetic::Rotation> {
        SpecialFlow::new(ContinuedFraction::golden(60).unwrap().rotation(), CeilingFunction::constant(1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn constants_do_not_correlate() {
        let f = unit_flow();
        let p = f.start(0.2, 0.0).unwrap();
        let c = Observable::Constant { value: 3.0 };
        assert!(correlation(&f, &p, &c, &c, 5.0, 1000.0, 0.25).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_lag_is_variance() {
        let f = unit_flow();
        let p = f.start(0.2, 0.0).unwrap();
        let h = Observable::HeightCos { freq: 1.0 };
        let v = correlation(&f, &p, &h, &h, 0.0, 1000.0, 0.01).unwrap();
        assert!((v - 0.5).abs() < 1e-3, "{v}");
    }

    #[test]
    fn eigenfunction_does_not_decay() {
        let f = unit_flow();
        let p = f.start(0.2, 0.0).unwrap();
        let h = Observable::HeightCos { freq: 1.0 };
        let r = cesaro_mixing_test(&f, &p, &[(h.clone(), h)], 100.0, 0.5, 1000.0, 0.05).unwrap();
        assert_eq!(r.verdict, CesaroVerdict::NoDecay);
        let c = Observable::Constant { value: 1.0 };
        let r = cesaro_mixing_test(&f, &p, &[(c.clone(), c)], 100.0, 0.5, 1000.0, 0.05).unwrap();
        assert!(r.curves[0].m_t.iter().all(|m| m.abs() < 1e-20));
        assert_eq!(r.verdict, CesaroVerdict::WeakMixingEvidence);
    }
}
