//! Jump sequences, the `σ_k e_k` decomposition of pure-jump BV functions over
//! the rotation, and explicit solutions of the coboundary equation
//!
//! ```text
//! ξ(x) − ξ(x + α) = φ(x) − mean.
//! ```
//!
//! A jump sequence `Δ_k` with `Σ Δ_k = 0` describes the function with jump
//! `Δ_k` at `{kα}` and slope zero elsewhere. With `σ_k = Σ_{j<=k} Δ_j` and
//! `e_k(x) = {x − (k+1)α} − {x − kα}` it equals `mean + Σ σ_k e_k`, and
//! `ξ = Σ σ_k ({x − (k+1)α} − 1/2)` solves the equation above.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::Rotation;
use crate::denjoy::DenjoyModel;
use crate::error::{Error, Result};
use crate::numerics::KahanSum;

/// Balance tolerance for finite jump lists and for geometric truncations.
pub const JUMP_BALANCE_TOL: f64 = 1e-12;
pub const DEFAULT_K_JUMP: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Delta")]
    pub rate: f64,
    #[serde(rename = "K")]
    pub k: usize,
}

impl GeometricTail {
    /// Bound on `sup |φ_K − φ_∞|` for the alternating geometric family: the
    /// discarded jumps shift every retained `σ_k` by at most `C r^{K+1}/(1+r)`
    /// and the discarded `σ_k` sum to `2 C r^{K+1} / ((1+r)(1−r))`.
    pub fn sup_bound(&self) -> f64 {
        let r = self.rate;
        let t = self.c * r.powi(self.k as i32 + 1) / (1.0 + r);
        (2 * self.k + 1) as f64 * t + 2.0 * t / (1.0 - r)
    }
}

/// Finitely supported jumps `Δ_k` on the window `kmin..=kmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "JumpSequenceRepr", into = "JumpSequenceRepr")]
pub struct JumpSequence {
    kmin: i64,
    deltas: Vec<f64>,
    mean: f64,
    tail: Option<GeometricTail>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct JumpSequenceRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<(i64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<GeometricTail>,
    #[serde(default = "one")]
    mean: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<JumpSequenceRepr> for JumpSequence {
    type Error = Error;
    fn try_from(r: JumpSequenceRepr) -> Result<Self> {
        match (r.support, r.tail) {
            (None, Some(t)) => JumpSequence::geometric(t.c, t.rate, t.k, r.mean),
            (Some(s), tail) => {
                let mut j = JumpSequence::finite(&s, r.mean)?;
                j.tail = tail;
                Ok(j)
            }
            (None, None) => Ok(JumpSequence::zero(r.mean)),
        }
    }
}

impl From<JumpSequence> for JumpSequenceRepr {
    fn from(j: JumpSequence) -> Self {
        let support = if j.tail.is_some() { None } else { Some(j.iter().filter(|(_, d)| *d != 0.0).collect()) };
        JumpSequenceRepr { support, tail: j.tail, mean: j.mean }
    }
}

impl JumpSequence {
    pub fn zero(mean: f64) -> Self {
        JumpSequence { kmin: 0, deltas: vec![0.0], mean, tail: None }
    }

    /// Jumps from `(k, Δ_k)` pairs; repeated `k` are added up.
    pub fn finite(pairs: &[(i64, f64)], mean: f64) -> Result<Self> {
        Self::with_tolerance(pairs, mean, JUMP_BALANCE_TOL)
    }

    pub fn with_tolerance(pairs: &[(i64, f64)], mean: f64, tolerance: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Ok(Self::zero(mean));
        }
        if !mean.is_finite() || pairs.iter().any(|(_, d)| !d.is_finite()) {
            return Err(Error::invalid("jumps and mean must be finite"));
        }
        let kmin = pairs.iter().map(|p| p.0).min().unwrap();
        let kmax = pairs.iter().map(|p| p.0).max().unwrap();
        let mut deltas = vec![0.0; (kmax - kmin + 1) as usize];
        for &(k, d) in pairs {
            deltas[(k - kmin) as usize] += d;
        }
        let sum = crate::numerics::kahan_total(deltas.iter().copied());
        if sum.abs() > tolerance {
            return Err(Error::UnbalancedJumps { sum, tolerance });
        }
        Ok(JumpSequence { kmin, deltas, mean, tail: None })
    }

    /// `Δ_k = C r^{|k|} (−1)^k` for `0 < |k| <= K`, with `Δ_0` balancing the sum.
    pub fn geometric(c: f64, rate: f64, k: usize, mean: f64) -> Result<Self> {
        if !(rate > 0.0 && rate < 1.0) || !c.is_finite() || k == 0 {
            return Err(Error::invalid(format!("geometric jumps need C finite, Δ ∈ (0,1), K >= 1 (got {c}, {rate}, {k})")));
        }
        let kk = k as i64;
        let mut deltas: Vec<f64> = (-kk..=kk)
            .map(|j| if j == 0 { 0.0 } else { c * rate.powi(j.unsigned_abs() as i32) * if j % 2 == 0 { 1.0 } else { -1.0 } })
            .collect();
        deltas[k] = -crate::numerics::kahan_total(deltas.iter().copied());
        Ok(JumpSequence { kmin: -kk, deltas, mean, tail: Some(GeometricTail { c, rate, k }) })
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.deltas.len() as i64 - 1
    }

    pub fn tail(&self) -> Option<GeometricTail> {
        self.tail
    }

    pub fn delta(&self, k: i64) -> f64 {
        if k < self.kmin || k > self.kmax() {
            0.0
        } else {
            self.deltas[(k - self.kmin) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.deltas.iter().enumerate().map(move |(i, &d)| (self.kmin + i as i64, d))
    }

    pub fn sum(&self) -> f64 {
        crate::numerics::kahan_total(self.deltas.iter().copied())
    }

    /// `Σ |k Δ_k|`.
    pub fn weighted_mass(&self) -> f64 {
        self.iter().map(|(k, d)| (k as f64 * d).abs()).sum()
    }

    /// `Σ (1 + |i|) |Δ_i|`.
    pub fn bv_bound(&self) -> f64 {
        self.iter().map(|(k, d)| (1.0 + k.unsigned_abs() as f64) * d.abs()).sum()
    }

    /// Bound on the sup-norm error from truncating an infinite family.
    pub fn tail_bound(&self) -> f64 {
        self.tail.map_or(0.0, |t| t.sup_bound())
    }
}

/// `σ_k` on `kmin..=kmax`; zero outside (so `σ_kmax` is zero up to rounding).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaSequence {
    kmin: i64,
    sigma: Vec<f64>,
}

impl SigmaSequence {
    pub fn get(&self, k: i64) -> f64 {
        if k < self.kmin || k >= self.kmin + self.sigma.len() as i64 {
            0.0
        } else {
            self.sigma[(k - self.kmin) as usize]
        }
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.sigma.iter().enumerate().map(move |(i, &s)| (self.kmin + i as i64, s))
    }

    /// `Σ |σ_k|`.
    pub fn l1(&self) -> f64 {
        self.sigma.iter().map(|s| s.abs()).sum()
    }

    /// `Σ σ_k`.
    pub fn total(&self) -> f64 {
        crate::numerics::kahan_total(self.sigma.iter().copied())
    }
}

/// `σ_k = Σ_{j<=k} Δ_j`, checked against `−Σ_{j>k} Δ_j`.
pub fn sigma_from_jumps(j: &JumpSequence) -> Result<SigmaSequence> {
    let n = j.deltas.len();
    let mut left = Vec::with_capacity(n);
    let mut acc = KahanSum::new();
    for &d in &j.deltas {
        acc.add(d);
        left.push(acc.value());
    }
    let mut right = vec![0.0; n];
    let mut acc = KahanSum::new();
    for i in (0..n).rev() {
        right[i] = -acc.value();
        acc.add(j.deltas[i]);
    }
    let scale = j.deltas.iter().map(|d| d.abs()).fold(1.0, f64::max);
    let tolerance = JUMP_BALANCE_TOL * scale;
    let worst = left.iter().zip(&right).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if worst > tolerance {
        return Err(Error::UnbalancedJumps { sum: j.sum(), tolerance });
    }
    Ok(SigmaSequence { kmin: j.kmin, sigma: left })
}

/// `e_k(x) = {x − (k+1)α} − {x − kα}`.
#[inline]
pub fn e_k_eval(k: i64, x: f64, rot: &Rotation) -> f64 {
    rot.point(x, -(k + 1)) - rot.point(x, -k)
}

/// A jump sequence over a fixed rotation with its `σ` precomputed.
#[derive(Clone, Debug)]
pub struct Cocycle {
    jumps: JumpSequence,
    sigma: SigmaSequence,
    rot: Rotation,
    sigma_total: f64,
}

impl Cocycle {
    pub fn new(jumps: JumpSequence, rot: Rotation) -> Result<Self> {
        let sigma = sigma_from_jumps(&jumps)?;
        rot.check_iterate(jumps.kmin.abs().max(jumps.kmax().abs()) + 1)?;
        let sigma_total = sigma.total();
        Ok(Cocycle { jumps, sigma, rot, sigma_total })
    }

    pub fn jumps(&self) -> &JumpSequence {
        &self.jumps
    }

    pub fn sigma(&self) -> &SigmaSequence {
        &self.sigma
    }

    pub fn rotation(&self) -> &Rotation {
        &self.rot
    }

    pub fn mean(&self) -> f64 {
        self.jumps.mean
    }

    /// `Σ σ_k e_k(x)` (zero-mean part of `φ`).
    pub fn phi0(&self, x: f64) -> f64 {
        let mut acc = KahanSum::new();
        for (k, s) in self.sigma.iter() {
            if s != 0.0 {
                acc.add(s * e_k_eval(k, x, &self.rot));
            }
        }
        acc.value()
    }

    /// `φ(x) = mean + Σ σ_k e_k(x)`.
    pub fn phi(&self, x: f64) -> f64 {
        self.jumps.mean + self.phi0(x)
    }

    /// `ξ(x) = Σ σ_k ({x − (k+1)α} − 1/2)`.
    pub fn xi(&self, x: f64) -> f64 {
        let mut acc = KahanSum::new();
        for (k, s) in self.sigma.iter() {
            if s != 0.0 {
                acc.add(s * (self.rot.point(x, -(k + 1)) - 0.5));
            }
        }
        acc.value()
    }

    /// `|ξ(x) − ξ(x+α) − (φ(x) − mean)|`.
    pub fn coboundary_residual(&self, x: f64) -> f64 {
        (self.xi(x) - self.xi(self.rot.point(x, 1)) - self.phi0(x)).abs()
    }

    /// Lower bound `mean − Σ|σ_k|` for `φ` (since `|e_k| < 1`).
    pub fn ceiling_lower_bound(&self) -> f64 {
        self.jumps.mean - self.sigma.l1() - self.jumps.tail_bound()
    }

    /// `∫₀¹ e^{−iλξ(x)} dx`, exact for the truncated `ξ`.
    ///
    /// `ξ` is affine with slope `Σσ_k` between the points `{(k+1)α}`, where
    /// it drops by `σ_k`.
    pub fn phase_integral(&self, lambda: f64) -> Complex64 {
        let mut cuts: Vec<f64> = self
            .sigma
            .iter()
            .filter(|(_, s)| *s != 0.0)
            .map(|(k, _)| self.rot.point(0.0, k + 1))
            .collect();
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let slope = self.sigma_total;
        let mut acc = Complex64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = b - a;
            if len <= 0.0 {
                continue;
            }
            // value just right of the cut, extrapolated back from the midpoint
            let mid = 0.5 * (a + b);
            let c = self.xi(mid) - slope * (mid - a);
            let phase = Complex64::from_polar(1.0, -lambda * c);
            let w_ = lambda * slope;
            let piece = if (w_ * len).abs() < 1e-8 {
                Complex64::new(len, -0.5 * w_ * len * len)
            } else {
                (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -w_ * len)) / Complex64::new(0.0, w_)
            };
            acc += phase * piece;
        }
        acc
    }

    /// Birkhoff sum `Σ_{i<m} (φ − mean)(x + iα)`.
    pub fn birkhoff_phi0(&self, x: f64, m: u64) -> Result<f64> {
        birkhoff_sum(|y| self.phi0(y), &self.rot, x, m)
    }
}

/// `Σ_{i<m} f({x + iα})` with exact orbit points.
pub fn birkhoff_sum<F: Fn(f64) -> f64>(f: F, rot: &Rotation, x: f64, m: u64) -> Result<f64> {
    rot.check_iterate(m as i64)?;
    let mut acc = KahanSum::new();
    for i in 0..m as i64 {
        acc.add(f(rot.point(x, i)));
    }
    Ok(acc.value())
}

/// `mean + Σ σ_k e_k(x)` for a one-off evaluation. Use [`Cocycle`] for many.
pub fn phi_from_jumps(j: &JumpSequence, rot: &Rotation, x: f64) -> Result<f64> {
    Ok(Cocycle::new(j.clone(), *rot)?.phi(x))
}

/// `ξ(x)` for a one-off evaluation.
pub fn transfer_function(j: &JumpSequence, rot: &Rotation, x: f64) -> Result<f64> {
    Ok(Cocycle::new(j.clone(), *rot)?.xi(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct SpreadRow {
    pub m: u64,
    pub spread_m: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpreadReport {
    /// `max_m max_{x,x'} |S_m φ(x) − S_m φ(x')|`.
    pub spread: f64,
    /// `Σ (1+|i|) |Δ_i|`.
    pub bound: f64,
    pub sigma_l1: f64,
    pub m_max: u64,
    pub grid_size: usize,
    /// `spread <= 2 Σ|σ_k| <= 2 bound`.
    pub within_bound: bool,
    pub rows: Vec<SpreadRow>,
}

impl SpreadReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Spread of Birkhoff sums of `φ − mean` over a uniform grid and `m <= m_max`.
pub fn birkhoff_spread(cocycle: &Cocycle, m_max: u64, grid_size: usize) -> Result<SpreadReport> {
    if m_max < 1 || grid_size < 2 {
        return Err(Error::invalid("birkhoff spread needs m_max >= 1 and grid_size >= 2"));
    }
    cocycle.rot.check_iterate(m_max as i64)?;
    let sums: Vec<Vec<f64>> = (0..grid_size)
        .into_par_iter()
        .map(|g| {
            let x = g as f64 / grid_size as f64;
            let mut acc = KahanSum::new();
            (0..m_max as i64)
                .map(|i| {
                    acc.add(cocycle.phi0(cocycle.rot.point(x, i)));
                    acc.value()
                })
                .collect()
        })
        .collect();
    let bound = cocycle.jumps.bv_bound();
    let mut spread = 0.0f64;
    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 0..m_max as usize {
        let (lo, hi) = sums.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s[m]), hi.max(s[m])));
        let s = hi - lo;
        spread = spread.max(s);
        rows.push(SpreadRow { m: m as u64 + 1, spread_m: s, bound });
    }
    let sigma_l1 = cocycle.sigma.l1();
    let slack = 1e-9 * (1.0 + m_max as f64 * f64::EPSILON * 1e3);
    let within_bound = spread <= 2.0 * sigma_l1 + slack && sigma_l1 <= bound + 1e-12;
    Ok(SpreadReport { spread, bound, sigma_l1, m_max, grid_size, within_bound, rows })
}

/// `max |S_m e_k(x)|` over `m <= m_max` and a uniform grid. The telescoping
/// identity gives `S_m e_k(x) = {x − (k+1)α} − {x − (k+1−m)α}`, so this is
/// below one.
pub fn ek_birkhoff_max(k: i64, rot: &Rotation, m_max: u64, grid_size: usize) -> Result<f64> {
    rot.check_iterate(m_max as i64 + k.abs() + 1)?;
    let worst = (0..grid_size)
        .into_par_iter()
        .map(|g| {
            let x = g as f64 / grid_size as f64;
            let mut acc = KahanSum::new();
            let mut w = 0.0f64;
            for i in 0..m_max as i64 {
                acc.add(e_k_eval(k, rot.point(x, i), rot));
                w = w.max(acc.value().abs());
            }
            w
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Raw `ψ(right) − ψ(left)` over the gaps of one hole.
pub fn gap_jumps<F: Fn(f64) -> f64>(model: &DenjoyModel, hole: usize, psi: F) -> Vec<(i64, f64)> {
    let kk = model.holes()[hole].k_gap as i64;
    (-kk..=kk)
        .map(|k| {
            let g = model.gap(hole, k).unwrap();
            (k, psi(g.right()) - psi(g.left))
        })
        .collect()
}

/// Jump sequence of a Lipschitz function on a one-hole model whose gaps have
/// full measure. The jump `Δ_k` sits at the orbit point of gap `k`, i.e. at
/// `{β + kα}`; for `β = 0` this is the rotation's own orbit of `0`. The mean
/// is `∫ψ dμ_α`.
pub fn jumps_from_ceiling<F: Fn(f64) -> f64>(model: &DenjoyModel, psi: F, lipschitz: f64) -> Result<JumpSequence> {
    if model.holes().len() != 1 {
        return Err(Error::NotOneHole(model.holes().len()));
    }
    if model.cantor_mass() > 0.0 {
        return Err(Error::NotFullGapMeasure(model.cantor_mass()));
    }
    let pairs = gap_jumps(model, 0, &psi);
    let mean = model.integrate(&psi);
    let tol = JUMP_BALANCE_TOL.max(1e-12 * pairs.len() as f64 * lipschitz.max(1.0));
    JumpSequence::with_tolerance(&pairs, mean, tol)
}
