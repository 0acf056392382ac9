//! Minimal Cantor circle systems (Denjoy examples) with prescribed holes.
//!
//! A model is a circle of total length one carrying, for every hole `j` and
//! every `|k| <= K_gap`, a wandering interval (gap) of length `ℓ_{j,k}` placed
//! over the rotation orbit point `θ_{j,k} = {β_j + kα}`. The model coordinate
//! of a rotation angle is given by the staircase
//!
//! ```text
//! H(θ) = (1 − G) θ + Σ_{θ_{j,k} <= θ} ℓ_{j,k},    G = Σ ℓ_{j,k}
//! ```
//!
//! and the semi-conjugacy `h` collapses each gap onto its orbit point, so that
//! `h ∘ f = R_α ∘ h` where `f` is the induced map on the model circle.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{Angle, CfSpec, ContinuedFraction, Dd};
use crate::error::{Error, Result};
use crate::numerics::{frac, gauss8, KahanSum};

/// Iterate bound for the hole orbit-distinctness check.
pub const HOLE_ORBIT_CHECK: i64 = 10_000;
const HOLE_ORBIT_TOL: f64 = 1e-12;
pub const DEFAULT_K_GAP: usize = 200;

/// One orbit of gaps. Lengths are `C·Δ^{|k|}` for `|k| <= K_gap` unless an
/// explicit list (indexed `-K_gap..=K_gap`) is given.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HoleSpec {
    pub beta: Angle,
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    #[serde(rename = "Delta", default = "half")]
    pub rate: f64,
    #[serde(rename = "K_gap", default = "default_k_gap")]
    pub k_gap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    #[serde(default = "yes")]
    pub hyperbolic: bool,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn yes() -> bool {
    true
}
fn default_k_gap() -> usize {
    DEFAULT_K_GAP
}

impl HoleSpec {
    pub fn geometric(beta: Angle, c: f64, rate: f64, k_gap: usize) -> Self {
        HoleSpec { beta, c, rate, k_gap, lengths: None, hyperbolic: true }
    }

    /// Hole with explicit gap lengths for `k = -K..=K` (`lengths.len() = 2K+1`).
    pub fn explicit(beta: Angle, lengths: Vec<f64>) -> Self {
        let k_gap = lengths.len() / 2;
        HoleSpec { beta, c: 1.0, rate: 0.5, k_gap, lengths: Some(lengths), hyperbolic: false }
    }

    fn raw_lengths(&self) -> Result<Vec<f64>> {
        let kk = self.k_gap as i64;
        let lengths: Vec<f64> = match &self.lengths {
            Some(l) => {
                if l.len() != 2 * self.k_gap + 1 {
                    return Err(Error::invalid("explicit gap lengths must have odd length 2K+1"));
                }
                l.clone()
            }
            None => {
                if !(self.rate > 0.0 && self.rate < 1.0) {
                    return Err(Error::invalid(format!("gap decay rate must lie in (0,1), got {}", self.rate)));
                }
                if !(self.c > 0.0 && self.c.is_finite()) {
                    return Err(Error::invalid(format!("gap constant must be positive, got {}", self.c)));
                }
                (-kk..=kk).map(|k| self.c * self.rate.powi(k.unsigned_abs() as i32)).collect()
            }
        };
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("gap length at k = {} is not positive", i as i64 - kk)));
            }
            if self.hyperbolic {
                let k = (i as i64 - kk).unsigned_abs() as i32;
                if l > self.c * self.rate.powi(k) * (1.0 + 1e-12) {
                    return Err(Error::invalid(format!(
                        "gap length at k = {} exceeds the geometric envelope",
                        i as i64 - kk
                    )));
                }
            }
        }
        Ok(lengths)
    }
}

/// Serializable description of a model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenjoySpec {
    pub cf: CfSpec,
    #[serde(default)]
    pub holes: Vec<HoleSpec>,
    #[serde(default)]
    pub cantor_mass: f64,
}

impl DenjoySpec {
    pub fn build(&self) -> Result<DenjoyModel> {
        build_denjoy(&self.cf.build()?, &self.holes, self.cantor_mass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub hole: usize,
    pub k: i64,
    /// Orbit point `{β_j + kα}` the gap collapses to.
    pub theta: f64,
    pub left: f64,
    pub length: f64,
}

impl Gap {
    pub fn right(&self) -> f64 {
        self.left + self.length
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointKind {
    /// Point of the Cantor set with `h = theta`.
    Cantor { theta: f64 },
    /// Point of gap `(hole, k)` at relative position `t ∈ [0, 1)`; `t = 0` is
    /// the left endpoint.
    Gap { hole: usize, k: i64, t: f64 },
}

/// A point of the model circle together with its classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorPoint {
    pub x: f64,
    pub kind: PointKind,
}

#[derive(Clone, Debug)]
pub struct DenjoyModel {
    cf: ContinuedFraction,
    alpha: Dd,
    holes: Vec<HoleSpec>,
    cantor_mass: f64,
    /// Gaps sorted by `theta`.
    gaps: Vec<Gap>,
    /// `lookup[j][k + K_j]` is the position of gap `(j, k)` in `gaps`.
    lookup: Vec<Vec<usize>>,
    thetas: Vec<f64>,
}

/// Builds a model. Gap lengths of all holes are scaled together so that the
/// total gap mass is `1 − cantor_mass`; this also redistributes the truncated
/// tail proportionally.
pub fn build_denjoy(cf: &ContinuedFraction, holes: &[HoleSpec], cantor_mass: f64) -> Result<DenjoyModel> {
    if !(0.0..=1.0).contains(&cantor_mass) {
        return Err(Error::InvalidMass(format!("cantor mass {cantor_mass} outside [0, 1]")));
    }
    if holes.is_empty() && cantor_mass != 1.0 {
        return Err(Error::InvalidMass(format!(
            "a model without holes needs cantor mass 1, got {cantor_mass}"
        )));
    }
    if !holes.is_empty() && cantor_mass >= 1.0 {
        return Err(Error::InvalidMass("holes need positive gap mass, cantor mass must be < 1".into()));
    }
    let alpha = cf.alpha();
    check_distinct_orbits(holes, alpha)?;

    let raw: Vec<Vec<f64>> = holes.iter().map(HoleSpec::raw_lengths).collect::<Result<_>>()?;
    let mut total = KahanSum::new();
    raw.iter().flatten().for_each(|&l| total.add(l));
    let total = total.value();
    let scale = if holes.is_empty() { 1.0 } else { (1.0 - cantor_mass) / total };
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidMass("gap lengths cannot be normalized".into()));
    }

    let mut gaps = Vec::new();
    for (j, (hole, lens)) in holes.iter().zip(&raw).enumerate() {
        let kk = hole.k_gap as i64;
        for (i, &l) in lens.iter().enumerate() {
            let k = i as i64 - kk;
            gaps.push(Gap { hole: j, k, theta: orbit_theta(hole.beta.to_dd(), alpha, k), left: 0.0, length: l * scale });
        }
    }
    gaps.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    for w in gaps.windows(2) {
        if w[0].theta == w[1].theta {
            return Err(Error::InvalidHoles(format!(
                "gaps ({}, {}) and ({}, {}) sit over the same orbit point",
                w[0].hole, w[0].k, w[1].hole, w[1].k
            )));
        }
    }
    let mut acc = KahanSum::new();
    for g in gaps.iter_mut() {
        g.left = cantor_mass * g.theta + acc.value();
        acc.add(g.length);
    }
    let mut lookup: Vec<Vec<usize>> = holes.iter().map(|h| vec![0; 2 * h.k_gap + 1]).collect();
    for (pos, g) in gaps.iter().enumerate() {
        lookup[g.hole][(g.k + holes[g.hole].k_gap as i64) as usize] = pos;
    }
    let thetas = gaps.iter().map(|g| g.theta).collect();
    Ok(DenjoyModel { cf: cf.clone(), alpha, holes: holes.to_vec(), cantor_mass, gaps, lookup, thetas })
}

fn orbit_theta(beta: Dd, alpha: Dd, k: i64) -> f64 {
    let t = beta.add(Dd::from_f64(k as f64).mul(alpha)).frac().to_f64();
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

fn check_distinct_orbits(holes: &[HoleSpec], alpha: Dd) -> Result<()> {
    for i in 0..holes.len() {
        for j in i + 1..holes.len() {
            let d = holes[i].beta.to_dd().sub(holes[j].beta.to_dd());
            for k in -HOLE_ORBIT_CHECK..=HOLE_ORBIT_CHECK {
                let r = d.sub(Dd::from_f64(k as f64).mul(alpha)).frac().to_f64();
                if r.min(1.0 - r) < HOLE_ORBIT_TOL {
                    return Err(Error::InvalidHoles(format!(
                        "holes {i} and {j} lie on one rotation orbit (β_{i} − β_{j} ≈ {k}α mod 1)"
                    )));
                }
            }
        }
    }
    Ok(())
}

impl DenjoyModel {
    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn holes(&self) -> &[HoleSpec] {
        &self.holes
    }

    pub fn cantor_mass(&self) -> f64 {
        self.cantor_mass
    }

    pub fn total_gap_mass(&self) -> f64 {
        1.0 - self.cantor_mass
    }

    /// All gaps in circle order.
    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn gap(&self, hole: usize, k: i64) -> Option<&Gap> {
        let kk = self.holes.get(hole)?.k_gap as i64;
        if k.abs() > kk {
            return None;
        }
        Some(&self.gaps[self.lookup[hole][(k + kk) as usize]])
    }

    /// Gap lengths of one hole, ordered by `k = -K..=K`.
    pub fn gap_lengths(&self, hole: usize) -> Vec<(i64, f64)> {
        let kk = self.holes[hole].k_gap as i64;
        (-kk..=kk).map(|k| (k, self.gap(hole, k).unwrap().length)).collect()
    }

    /// Staircase `H(θ)`, right-continuous.
    pub fn staircase(&self, theta: f64) -> f64 {
        let th = frac(theta);
        let n = self.thetas.partition_point(|&t| t <= th);
        if n == 0 {
            self.cantor_mass * th
        } else {
            let g = &self.gaps[n - 1];
            g.right() + self.cantor_mass * (th - g.theta)
        }
    }

    fn theta_index(&self, theta: f64) -> Option<usize> {
        self.thetas.binary_search_by(|t| t.total_cmp(&theta)).ok()
    }

    /// Rotation angle of hole `j`'s orbit point number `k`, beyond the gap
    /// truncation if needed.
    pub fn orbit_theta(&self, hole: usize, k: i64) -> f64 {
        match self.gap(hole, k) {
            Some(g) => g.theta,
            None => orbit_theta(self.holes[hole].beta.to_dd(), self.alpha, k),
        }
    }

    /// Point of gap `(hole, k)` at relative position `t ∈ [0, 1)`. Beyond the
    /// truncation the gap has length zero and sits at the section of its
    /// orbit point; the label keeps `t` so that iterating back is exact.
    pub fn gap_point(&self, hole: usize, k: i64, t: f64) -> CantorPoint {
        match self.gap(hole, k) {
            Some(g) => CantorPoint { x: g.left + t * g.length, kind: PointKind::Gap { hole, k, t } },
            None => CantorPoint {
                x: self.semiconj_h_inv(self.orbit_theta(hole, k)).x,
                kind: PointKind::Gap { hole, k, t },
            },
        }
    }

    /// Classifies a model coordinate `x ∈ [0, 1)`.
    pub fn point_at(&self, x: f64) -> CantorPoint {
        let x = frac(x);
        // last gap whose left endpoint is <= x
        let n = self.gaps.partition_point(|g| g.left <= x);
        if n > 0 {
            let g = &self.gaps[n - 1];
            if x < g.right() {
                let t = ((x - g.left) / g.length).clamp(0.0, 1.0 - f64::EPSILON);
                return CantorPoint { x, kind: PointKind::Gap { hole: g.hole, k: g.k, t } };
            }
        }
        let theta = if self.cantor_mass > 0.0 {
            let before = if n > 0 { self.gaps[n - 1].right() - self.cantor_mass * self.gaps[n - 1].theta } else { 0.0 };
            let lo = if n > 0 { self.gaps[n - 1].theta } else { 0.0 };
            let hi = self.gaps.get(n).map_or(1.0, |g| g.theta);
            ((x - before) / self.cantor_mass).clamp(lo, hi)
        } else if n > 0 {
            self.gaps[n - 1].theta
        } else {
            0.0
        };
        CantorPoint { x, kind: PointKind::Cantor { theta: if theta >= 1.0 { 0.0 } else { theta } } }
    }

    /// `h(x)`: the rotation angle a model point projects to.
    pub fn semiconj_h(&self, p: &CantorPoint) -> f64 {
        match p.kind {
            PointKind::Cantor { theta } => theta,
            PointKind::Gap { hole, k, .. } => self.orbit_theta(hole, k),
        }
    }

    /// Right-continuous section of `h`: gap orbit points go to the right
    /// endpoint of their gap.
    pub fn semiconj_h_inv(&self, theta: f64) -> CantorPoint {
        let th = frac(theta);
        let x = self.staircase(th);
        CantorPoint { x: if x >= 1.0 { x - 1.0 } else { x }, kind: PointKind::Cantor { theta: th } }
    }

    /// Cumulative `μ_α` mass of `[0, x]`, where `μ_α` is the invariant measure.
    pub fn invariant_measure_cdf(&self, p: &CantorPoint) -> f64 {
        self.semiconj_h(p)
    }

    /// `n`-th iterate of the induced map. Gaps move affinely onto gaps and
    /// gap endpoints stay gap endpoints.
    pub fn iterate(&self, p: &CantorPoint, n: i64) -> CantorPoint {
        if n == 0 {
            return *p;
        }
        match p.kind {
            PointKind::Gap { hole, k, t } => self.gap_point(hole, k + n, t),
            PointKind::Cantor { theta } => {
                if let Some(i) = self.theta_index(theta) {
                    let g = &self.gaps[i];
                    return self.semiconj_h_inv(self.orbit_theta(g.hole, g.k + n));
                }
                let th = Dd::from_f64(theta).add(Dd::from_f64(n as f64).mul(self.alpha)).frac().to_f64();
                self.semiconj_h_inv(th)
            }
        }
    }

    /// The induced map `f`.
    pub fn denjoy_map(&self, p: &CantorPoint) -> CantorPoint {
        self.iterate(p, 1)
    }

    /// `∫ψ dμ_α`, computed as `∫₀¹ ψ(H(θ)) dθ` with Gauss panels between
    /// consecutive gap orbit points.
    pub fn integrate<F: Fn(f64) -> f64>(&self, psi: F) -> f64 {
        let mut acc = KahanSum::new();
        let mut prev = 0.0;
        let mut cuts: Vec<f64> = self.thetas.clone();
        cuts.push(1.0);
        for &c in &cuts {
            if c > prev {
                acc.add(gauss8(|th| psi(self.staircase_left_of(th, prev)), prev, c));
            }
            prev = c;
        }
        acc.value()
    }

    /// `H` restricted to the open panel right of the cut `from`.
    fn staircase_left_of(&self, theta: f64, from: f64) -> f64 {
        let n = self.thetas.partition_point(|&t| t <= from.max(0.0));
        let base = if n == 0 { 0.0 } else { self.gaps[n - 1].right() - self.cantor_mass * self.gaps[n - 1].theta };
        base + self.cantor_mass * theta
    }

    /// Same model with every hole projection shifted by `u`, i.e. another
    /// choice of base point for `h`.
    pub fn rebased(&self, u: &Angle) -> Result<DenjoyModel> {
        let holes: Vec<HoleSpec> = self
            .holes
            .iter()
            .map(|h| HoleSpec { beta: h.beta.add(u), ..h.clone() })
            .collect();
        build_denjoy(&self.cf, &holes, self.cantor_mass)
    }

    /// Writes `(θ, H(θ))` on `n` equally spaced angles.
    pub fn write_staircase_csv<W: Write>(&self, w: W, n: usize) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["theta", "H"])?;
        for i in 0..n {
            let th = i as f64 / n as f64;
            wr.write_record([th.to_string(), self.staircase(th).to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Least-squares fit `log ℓ_k ≈ log C + |k| log Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapFit {
    pub c_est: f64,
    pub delta_est: f64,
    pub r2: f64,
}

pub fn gap_decay_fit(lengths: &[(i64, f64)]) -> Result<GapFit> {
    if lengths.len() < 10 {
        return Err(Error::invalid(format!("gap decay fit needs at least 10 lengths, got {}", lengths.len())));
    }
    if let Some((k, l)) = lengths.iter().find(|(_, l)| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::invalid(format!("gap length {l} at k = {k} is not positive")));
    }
    let n = lengths.len() as f64;
    let xs: Vec<f64> = lengths.iter().map(|(k, _)| k.unsigned_abs() as f64).collect();
    let ys: Vec<f64> = lengths.iter().map(|(_, l)| l.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("gap decay fit needs at least two distinct |k|"));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(GapFit { c_est: icpt.exp(), delta_est: slope.exp(), r2 })
}
