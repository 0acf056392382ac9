use std::io::Write;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::integrator::integrate_fixed;
use super::system::{HamiltonianSystem, Mat2};
use crate::arithmetic::ContinuedFraction;
use crate::denjoy::{gap_decay_fit, GapFit};
use crate::error::{Error, Result};
use crate::numerics::frac;

const GRAD_TOL: f64 = 1e-10;
const CLOSURE_TOL: f64 = 1e-6;

/// Periodic configuration `θ_0 < … < θ_{q−1}` with `θ_{i+q} = θ_i + p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfiguration {
    pub p: u64,
    pub q: u64,
    pub thetas: Vec<f64>,
    /// Departure momentum at each `θ_i`.
    pub rs: Vec<f64>,
    pub action: f64,
    pub gradient_norm: f64,
    pub monotone: bool,
    pub birkhoff_ordered: bool,
    /// `max_i |P(θ_i, r_i) − (θ_{i+1}, r_{i+1})|` for the Poincaré map `P`.
    pub closure_error: f64,
    /// `θ_q − θ_0 − p` after following `(θ_0, r_0)` under `q` map steps;
    /// `None` when roundoff growth along a hyperbolic orbit leaves the annulus.
    pub displacement_error: Option<f64>,
}

impl OrbitConfiguration {
    pub fn theta(&self, i: i64) -> f64 {
        let q = self.q as i64;
        let (d, m) = i.div_mod_floor(&q);
        self.thetas[m as usize] + (d * self.p as i64) as f64
    }

    /// Points `(θ mod 1, r)` sorted by angle.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.thetas.iter().zip(&self.rs).map(|(t, r)| (frac(*t), *r)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["i", "theta", "r"])?;
        for (i, (t, r)) in self.thetas.iter().zip(&self.rs).enumerate() {
            out.write_record([i.to_string(), format!("{t:.17e}"), format!("{r:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `θ_i + k < θ_j ⇒ θ_{i+1} + k < θ_{j+1}` for all `i, j, k`.
pub fn is_birkhoff_ordered(thetas: &[f64], p: u64) -> bool {
    let q = thetas.len();
    let at = |i: usize| if i < q { thetas[i] } else { thetas[i - q] + p as f64 };
    for i in 0..q {
        for j in 0..q {
            if i == j {
                continue;
            }
            let d = thetas[j] - thetas[i];
            let dn = at(j + 1) - at(i + 1);
            // k with θ_i + k < θ_j is k < d; order preserved iff dn lies in the same unit cell
            if d.floor() != dn.floor() || d == d.floor() || dn == dn.floor() {
                return false;
            }
        }
    }
    true
}

struct Segment {
    r0: f64,
    r1: f64,
    action: f64,
    m: Mat2,
}

impl HamiltonianSystem {
    fn flow_with_action(&self, th: f64, r: f64) -> [f64; 7] {
        let e = self.epsilon();
        let h = self.perturbation();
        let f = |s: f64, y: &[f64; 7]| {
            let j = h.jet(y[0], y[1], s, 0.0);
            let (a, b, c, d) = (e * j.hess[1], 1.0 + e * j.hess[2], -e * j.hess[0], -e * j.hess[1]);
            let thdot = y[1] + e * j.grad[1];
            [
                thdot,
                -e * j.grad[0],
                a * y[2] + b * y[4],
                a * y[3] + b * y[5],
                c * y[2] + d * y[4],
                c * y[3] + d * y[5],
                y[1] * thdot - 0.5 * y[1] * y[1] - e * j.value,
            ]
        };
        integrate_fixed(&f, 0.0, [th, r, 1.0, 0.0, 0.0, 1.0, 0.0], 1.0, self.steps_per_unit())
    }

    /// Shooting for the orbit segment from `θ0` at `s = 0` to `θ1` at `s = 1`.
    fn segment(&self, th0: f64, th1: f64, guess: Option<f64>) -> Result<Segment> {
        // H has integer frequencies, so shift the segment next to the origin
        let shift = th0.floor();
        let (a, b) = (th0 - shift, th1 - shift);
        let mut r = guess.unwrap_or(b - a);
        let mut prev = f64::INFINITY;
        for _ in 0..60 {
            if !(r.abs() <= self.r_max()) {
                return Err(Error::MinimizationFailed(format!("shooting left the annulus (r = {r})")));
            }
            let y = self.flow_with_action(a, r);
            let res = y[0] - b;
            // stop at 1e-14 or once Newton stagnates at roundoff level
            if res.abs() < 1e-14 || (res.abs() < 1e-12 && res.abs() >= 0.5 * prev) {
                return Ok(Segment { r0: r, r1: y[1], action: y[6], m: [y[2], y[3], y[4], y[5]] });
            }
            if y[3] <= 0.0 {
                return Err(Error::MinimizationFailed("twist lost during shooting".into()));
            }
            prev = res.abs();
            r -= res / y[3];
        }
        Err(Error::MinimizationFailed("shooting did not converge".into()))
    }
}

struct Eval {
    action: f64,
    grad: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
    rs: Vec<f64>,
}

fn evaluate(sys: &HamiltonianSystem, thetas: &[f64], p: u64, guesses: Option<&[f64]>) -> Result<Eval> {
    let q = thetas.len();
    let mut segs = Vec::with_capacity(q);
    for i in 0..q {
        let next = if i + 1 < q { thetas[i + 1] } else { thetas[0] + p as f64 };
        segs.push(sys.segment(thetas[i], next, guesses.map(|g| g[i]))?);
    }
    let action = segs.iter().map(|s| s.action).sum();
    let mut grad = vec![0.0; q];
    let mut diag = vec![0.0; q];
    let mut off = vec![0.0; q];
    for i in 0..q {
        let prev = &segs[(i + q - 1) % q];
        let cur = &segs[i];
        grad[i] = prev.r1 - cur.r0;
        diag[i] = prev.m[3] / prev.m[1] + cur.m[0] / cur.m[1];
        off[i] = -1.0 / cur.m[1];
    }
    let rs = segs.iter().map(|s| s.r0).collect();
    Ok(Eval { action, grad, diag, off, rs })
}

/// Dense solve of the cyclic tridiagonal system (used for small `q`).
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Thomas algorithm for a (non-cyclic) tridiagonal system.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut den = diag[0];
    if den.abs() < 1e-300 {
        return None;
    }
    c[0] = upper[0] / den;
    d[0] = rhs[0] / den;
    for i in 1..n {
        den = diag[i] - lower[i] * c[i - 1];
        if den.abs() < 1e-300 {
            return None;
        }
        c[i] = if i + 1 < n { upper[i] / den } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Solves `(A + μI) x = rhs` with `A` cyclic tridiagonal:
/// `A[i][i] = diag[i]`, `A[i][i+1] = A[i+1][i] = off[i]` (indices mod q).
fn solve_cyclic(diag: &[f64], off: &[f64], mu: f64, rhs: &[f64]) -> Option<Vec<f64>> {
    let q = diag.len();
    if q <= 3 {
        let mut a = vec![vec![0.0; q]; q];
        for i in 0..q {
            a[i][i] += diag[i] + mu;
            let j = (i + 1) % q;
            a[i][j] += off[i];
            a[j][i] += off[i];
        }
        let mut b = rhs.to_vec();
        return solve_dense(&mut a, &mut b);
    }
    // Sherman-Morrison: A = T + u vᵀ with u = (γ, 0, …, 0, c), v = (1, 0, …, 0, c/γ)
    let c = off[q - 1];
    let d: Vec<f64> = diag.iter().map(|x| x + mu).collect();
    let gamma = -d[0];
    let mut dd = d.clone();
    dd[0] -= gamma;
    dd[q - 1] -= c * c / gamma;
    let mut lower = vec![0.0; q];
    let mut upper = vec![0.0; q];
    upper[..q - 1].copy_from_slice(&off[..q - 1]);
    lower[1..].copy_from_slice(&off[..q - 1]);
    let y = thomas(&lower, &dd, &upper, rhs)?;
    let mut u = vec![0.0; q];
    u[0] = gamma;
    u[q - 1] = c;
    let z = thomas(&lower, &dd, &upper, &u)?;
    let vy = y[0] + c / gamma * y[q - 1];
    let vz = z[0] + c / gamma * z[q - 1];
    let f = vy / (1.0 + vz);
    Some(y.iter().zip(&z).map(|(a, b)| a - f * b).collect())
}

/// Positive definiteness of the cyclic tridiagonal matrix by symmetric
/// elimination; fill-in only appears in the last column.
fn cyclic_positive_definite(diag: &[f64], off: &[f64]) -> bool {
    let q = diag.len();
    match q {
        1 => diag[0] + 2.0 * off[0] > 0.0,
        2 => {
            let o = off[0] + off[1];
            diag[0] > 0.0 && diag[0] * diag[1] - o * o > 0.0
        }
        _ => {
            let mut d = diag[0];
            let mut w = off[q - 1];
            if d <= 0.0 {
                return false;
            }
            let mut last = diag[q - 1] - w * w / d;
            for i in 1..q - 1 {
                let e = off[i - 1];
                let di = diag[i] - e * e / d;
                if di <= 0.0 {
                    return false;
                }
                let col = if i == q - 2 { off[q - 2] } else { 0.0 };
                let wi = col - e * w / d;
                last -= wi * wi / di;
                d = di;
                w = wi;
            }
            last > 0.0
        }
    }
}

fn min_spacing(thetas: &[f64], p: u64) -> f64 {
    let q = thetas.len();
    (0..q)
        .map(|i| if i + 1 < q { thetas[i + 1] - thetas[i] } else { thetas[0] + p as f64 - thetas[i] })
        .fold(f64::INFINITY, f64::min)
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn minimize_from(sys: &HamiltonianSystem, p: u64, mut thetas: Vec<f64>) -> Result<(Vec<f64>, Eval)> {
    let mut ev = evaluate(sys, &thetas, p, None)?;
    let mut mu = 1e-3;
    for _ in 0..500 {
        let g = norm_inf(&ev.grad);
        if g < GRAD_TOL {
            break;
        }
        let rhs: Vec<f64> = ev.grad.iter().map(|x| -x).collect();
        let mut accepted = false;
        while mu < 1e12 {
            let shifted: Vec<f64> = ev.diag.iter().map(|d| d + mu).collect();
            if !cyclic_positive_definite(&shifted, &ev.off) {
                mu = (mu * 10.0).max(1e-8);
                continue;
            }
            let Some(step) = solve_cyclic(&ev.diag, &ev.off, mu, &rhs) else {
                mu *= 10.0;
                continue;
            };
            // cap the step so consecutive points cannot cross
            let scale = (0.25 * min_spacing(&thetas, p) / norm_inf(&step).max(1e-300)).min(1.0);
            let trial: Vec<f64> = thetas.iter().zip(&step).map(|(t, s)| t + scale * s).collect();
            if !(min_spacing(&trial, p) > 0.0) {
                mu *= 10.0;
                continue;
            }
            match evaluate(sys, &trial, p, Some(&ev.rs)) {
                Ok(next) => {
                    let flat = next.action <= ev.action + 1e-13 * (1.0 + ev.action.abs());
                    if next.action < ev.action || (flat && norm_inf(&next.grad) < g) {
                        thetas = trial;
                        ev = next;
                        mu = (mu / 10.0).max(1e-15);
                        accepted = true;
                        break;
                    }
                    mu *= 10.0;
                }
                Err(_) => mu *= 10.0,
            }
        }
        if !accepted {
            break;
        }
    }
    let g = norm_inf(&ev.grad);
    if g < GRAD_TOL {
        // ε = 0 is degenerate (translation mode), every other minimum is strict
        // near a KAM circle the translation mode is flat to roundoff, so allow
        // curvature down to −1e-9 relative
        let tau = 1e-9 * norm_inf(&ev.diag);
        let shifted: Vec<f64> = ev.diag.iter().map(|d| d + tau).collect();
        if sys.epsilon() != 0.0 && !cyclic_positive_definite(&shifted, &ev.off) {
            return Err(Error::MinimizationFailed("critical point is a saddle".into()));
        }
        Ok((thetas, ev))
    } else {
        Err(Error::MinimizationFailed(format!("gradient norm stalled at {g:e}")))
    }
}

/// Lift displacement `θ_q − θ_0 − p` after `q` applications of the map.
pub fn lift_displacement(sys: &HamiltonianSystem, th: f64, r: f64, p: u64, q: u64) -> Result<f64> {
    let (mut a, mut b) = (th, r);
    for _ in 0..q {
        (a, b) = sys.poincare_map(a, b)?;
    }
    Ok(a - th - p as f64)
}

/// Minimizing `p/q`-periodic orbit of the Poincaré map by action
/// minimization with Levenberg-Marquardt steps (Newton near the minimum).
pub fn am_minimize(sys: &HamiltonianSystem, p: u64, q: u64, restarts: usize) -> Result<OrbitConfiguration> {
    if q == 0 || q > 10_000 {
        return Err(Error::invalid(format!("period q = {q} must lie in 1..=10000")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::invalid(format!("{p}/{q} is not in lowest terms")));
    }
    let rho = p as f64 / q as f64;
    let band = (rho - 0.1, rho + 0.1);
    let twist = sys.twist_check(band, 10, 10)?;
    if !twist.monotone_twist {
        return Err(Error::invalid(format!(
            "twist not verified near r = {rho} (min ∂θ′/∂r = {:.3e})",
            twist.min_dtheta_dr
        )));
    }
    let restarts = restarts.max(1);
    let mut best: Option<(Vec<f64>, Eval)> = None;
    let mut last_err = None;
    for j in 0..restarts {
        // off the reversible-symmetric starts θ_0 ∈ (1/2q)Z
        let th0 = (j as f64 + 0.3819660112501051) / (restarts as f64 * q as f64);
        let start: Vec<f64> = (0..q).map(|i| th0 + i as f64 * rho).collect();
        match minimize_from(sys, p, start) {
            Ok((th, ev)) => {
                if !is_birkhoff_ordered(&th, p) {
                    last_err = Some(Error::MinimizationFailed("critical point is not Birkhoff ordered".into()));
                    continue;
                }
                if best.as_ref().is_none_or(|(_, b)| ev.action < b.action) {
                    best = Some((th, ev));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((thetas, ev)) = best else {
        return Err(last_err.unwrap_or_else(|| Error::MinimizationFailed("no restart converged".into())));
    };
    let monotone = thetas.windows(2).all(|w| w[1] > w[0]);
    if !monotone {
        return Err(Error::MinimizationFailed("minimizer is not monotone".into()));
    }
    let q_us = q as usize;
    let mut closure_error: f64 = 0.0;
    for i in 0..q_us {
        let (a, b) = sys.poincare_map(thetas[i], ev.rs[i])?;
        let (t, r) = if i + 1 < q_us { (thetas[i + 1], ev.rs[i + 1]) } else { (thetas[0] + p as f64, ev.rs[0]) };
        closure_error = closure_error.max((a - t).abs()).max((b - r).abs());
    }
    if !(closure_error < CLOSURE_TOL) {
        return Err(Error::MinimizationFailed(format!("configuration is not an orbit: closure error {closure_error:e}")));
    }
    let displacement_error = lift_displacement(sys, thetas[0], ev.rs[0], p, q).ok();
    Ok(OrbitConfiguration {
        p,
        q,
        gradient_norm: norm_inf(&ev.grad),
        rs: ev.rs,
        thetas,
        action: ev.action,
        monotone,
        birkhoff_ordered: true,
        closure_error,
        displacement_error,
    })
}

/// Action of the equally spaced configuration `θ_i = θ_0 + i p/q`.
pub fn uniform_action(sys: &HamiltonianSystem, p: u64, q: u64, th0: f64) -> Result<f64> {
    let thetas: Vec<f64> = (0..q).map(|i| th0 + i as f64 * p as f64 / q as f64).collect();
    Ok(evaluate(sys, &thetas, p, None)?.action)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmLevel {
    pub p: u64,
    pub q: u64,
    pub orbit: OrbitConfiguration,
    /// Largest `|Δr|/|Δθ|` between angularly adjacent points.
    pub lipschitz: f64,
    pub largest_gap: f64,
    pub gap_left: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmApproximation {
    pub levels: Vec<AmLevel>,
    /// Iterate lengths `(k, ℓ_k)` of the largest gap at the deepest level.
    pub gap_lengths: Vec<(i64, f64)>,
    pub gap_fit: Option<GapFit>,
}

impl AmApproximation {
    /// All points of every level as `(θ mod 1, r)`, sorted.
    pub fn point_cloud(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.levels.iter().flat_map(|l| l.orbit.points()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pts
    }

    pub fn write_points_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["p", "q", "theta", "r"])?;
        for l in &self.levels {
            for (t, r) in l.orbit.points() {
                out.write_record([l.p.to_string(), l.q.to_string(), format!("{t:.17e}"), format!("{r:.17e}")])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn circle_gap(a: f64, b: f64) -> f64 {
    frac(b - a)
}

/// Union of minimizing orbits along the convergents `p_n/q_n`,
/// `n = 1..=n_levels`, with gap diagnostics at the deepest level.
pub fn am_cantor_approx(
    sys: &HamiltonianSystem,
    cf: &ContinuedFraction,
    n_levels: usize,
    restarts: usize,
) -> Result<AmApproximation> {
    if n_levels == 0 || n_levels > cf.depth() {
        return Err(Error::InsufficientDepth(format!(
            "{n_levels} levels requested, continued fraction has depth {}",
            cf.depth()
        )));
    }
    let mut levels = Vec::with_capacity(n_levels);
    for n in 1..=n_levels as i64 {
        let (p, q) = (cf.p(n).to_u64(), cf.q(n).to_u64());
        let (Some(p), Some(q)) = (p, q) else {
            return Err(Error::invalid("convergent does not fit in 64 bits"));
        };
        let orbit = am_minimize(sys, p, q, restarts)?;
        let pts = orbit.points();
        let m = pts.len();
        let mut lip: f64 = 0.0;
        let mut gap = (0.0, 0.0);
        for i in 0..m {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            let dth = circle_gap(a.0, b.0);
            if m > 1 {
                lip = lip.max((b.1 - a.1).abs() / dth);
            }
            let len = if m == 1 { 1.0 } else { dth };
            if len > gap.0 {
                gap = (len, a.0);
            }
        }
        levels.push(AmLevel { p, q, orbit, lipschitz: lip, largest_gap: gap.0, gap_left: gap.1 });
    }
    let deepest = &levels.last().expect("at least one level").orbit;
    let gap_lengths = largest_gap_orbit(deepest);
    let gap_fit = if gap_lengths.len() >= 10 { gap_decay_fit(&gap_lengths).ok() } else { None };
    Ok(AmApproximation { levels, gap_lengths, gap_fit })
}

/// Lengths `ℓ_k` of the images of the largest complementary interval.
fn largest_gap_orbit(orbit: &OrbitConfiguration) -> Vec<(i64, f64)> {
    let q = orbit.q as i64;
    if q < 3 {
        return Vec::new();
    }
    let mut idx: Vec<i64> = (0..q).collect();
    idx.sort_by(|&a, &b| frac(orbit.theta(a)).total_cmp(&frac(orbit.theta(b))));
    let mut best = (0.0, 0, 0);
    for i in 0..q as usize {
        let (a, b) = (idx[i], idx[(i + 1) % q as usize]);
        let len = circle_gap(orbit.theta(a), orbit.theta(b));
        if len > best.0 {
            best = (len, a, b);
        }
    }
    let (_, a, b) = best;
    let half = (q - 1) / 2;
    (-half..=half).map(|k| (k, circle_gap(orbit.theta(a + k), orbit.theta(b + k)))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrable_case_is_uniform() {
        let sys = HamiltonianSystem::standard(0.0, 0.5).unwrap();
        let o = am_minimize(&sys, 1, 2, 1).unwrap();
        assert!((o.thetas[1] - o.thetas[0] - 0.5).abs() < 1e-14);
        assert!(o.rs.iter().all(|r| (r - 0.5).abs() < 1e-13));
        assert!(o.displacement_error.unwrap().abs() < 1e-12);
    }

    #[test]
    fn convergent_orbits_close_up() {
        let sys = HamiltonianSystem::standard(1e-2, 0.5).unwrap();
        for (p, q) in [(1, 2), (2, 3), (3, 5), (5, 8)] {
            let o = am_minimize(&sys, p, q, 3).unwrap();
            assert!(o.monotone && o.birkhoff_ordered);
            assert!(o.gradient_norm < 1e-10);
            assert!(o.displacement_error.unwrap().abs() < 1e-6 && o.closure_error < 1e-9);
            assert!(o.action <= uniform_action(&sys, p, q, 0.0).unwrap() + 1e-12);
            assert!(o.action <= uniform_action(&sys, p, q, 0.37).unwrap() + 1e-12);
        }
    }

    #[test]
    fn cyclic_solver_matches_dense() {
        let diag = [4.0, 3.5, 5.0, 4.2, 3.9, 4.4];
        let off = [-1.0, -0.7, -1.2, -0.9, -1.1, -0.8];
        let rhs = [1.0, -2.0, 0.5, 0.3, -0.7, 2.2];
        let x = solve_cyclic(&diag, &off, 0.1, &rhs).unwrap();
        let n = diag.len();
        for i in 0..n {
            let v = (diag[i] + 0.1) * x[i] + off[i] * x[(i + 1) % n] + off[(i + n - 1) % n] * x[(i + n - 1) % n];
            assert!((v - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_definiteness() {
        assert!(cyclic_positive_definite(&[2.0, 2.0, 2.0, 2.0, 2.0], &[-0.9; 5]));
        assert!(!cyclic_positive_definite(&[2.0, 2.0, 2.0, 2.0, 2.0], &[-1.0; 5]));
        assert!(!cyclic_positive_definite(&[2.0, 0.1, 2.0], &[-1.0, -0.2, -0.3]));
        assert!(cyclic_positive_definite(&[2.0, 2.0], &[-0.5, -0.5]));
    }

    #[test]
    fn order_check() {
        assert!(is_birkhoff_ordered(&[0.0, 0.6, 1.2, 1.8, 2.4], 3));
        assert!(!is_birkhoff_ordered(&[0.0, 0.9, 1.2, 1.8, 2.4], 3));
    }

    #[test]
    fn rejects_bad_rationals() {
        let sys = HamiltonianSystem::standard(1e-2, 0.5).unwrap();
        assert!(am_minimize(&sys, 2, 4, 1).is_err());
        assert!(am_minimize(&sys, 1, 0, 1).is_err());
    }
}
