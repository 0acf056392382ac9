//! Config-driven experiments with reproducible artifacts.
//!
//! A run validates the whole config first (each owning module checks its own
//! preconditions), then computes, then writes `verdicts.json`, the CSVs and
//! `manifest.json`. Sample points come from a ChaCha8 stream seeded by the
//! config, so CSVs are byte-identical across runs with the same seed.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arithmetic::{
    general_position, half_general_position_certificate, in_l_alpha, Angle, CfSpec, ContinuedFraction, GpVerdict,
    Rotation, DEFAULT_GP_THRESHOLD,
};
use crate::cocycle::{birkhoff_spread, Cocycle, JumpSequence, DEFAULT_K_JUMP};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    am_cantor_approx, am_minimize, lyapunov_exponent, periodic_exponent, reparam_ceiling, HamiltonianSpec,
    HamiltonianSystem, TimeChange, TrigPoly,
};
use crate::specialflow::{
    cesaro_mixing_test, default_lambda_grid, eigenvalue_scan, ks_exclusion, make_step_ceiling, CeilingFunction,
    KsExclusion, Observable, ScanThresholds, SpecialFlow, WeylVerdict,
};

fn default_schedule() -> Vec<usize> {
    vec![1_000, 10_000, 100_000]
}

fn default_base_points() -> usize {
    5
}

fn default_m_max() -> u64 {
    10_000
}

fn default_grid() -> usize {
    100
}

fn default_lambdas() -> Vec<f64> {
    vec![2.0 * PI]
}

fn default_beta() -> BetaSpec {
    BetaSpec::Angle(Angle::rational(1, 2).expect("1/2 is a valid angle"))
}

fn default_upper() -> f64 {
    8.0 * PI
}

fn default_points() -> usize {
    400
}

fn default_l_max() -> u32 {
    20
}

fn default_relation_bound() -> u32 {
    50
}

fn default_true() -> bool {
    true
}

fn default_gp_threshold() -> f64 {
    DEFAULT_GP_THRESHOLD
}

fn default_orbits() -> Vec<(u64, u64)> {
    vec![(1, 2), (2, 3), (3, 5), (5, 8)]
}

fn default_restarts() -> usize {
    3
}

fn default_lyapunov_iterates() -> usize {
    1_000
}

fn default_r_range() -> (f64, f64) {
    (0.3, 0.9)
}

fn default_twist_grid() -> (usize, usize) {
    (10, 10)
}

fn default_reparam_points() -> usize {
    16
}

/// Jump sequence of the one-hole experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum JumpsConfig {
    /// `Δ_k = C·Δ^{|k|}`, balanced, truncated at `|k| <= K`.
    Geometric {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "Delta")]
        rate: f64,
        #[serde(rename = "K", default)]
        k: Option<usize>,
        mean: f64,
    },
    Explicit { jumps: JumpSequence },
}

impl Default for JumpsConfig {
    fn default() -> Self {
        JumpsConfig::Geometric { c: 0.25, rate: 0.5, k: None, mean: 1.0 }
    }
}

impl JumpsConfig {
    pub fn build(&self) -> Result<JumpSequence> {
        match self {
            JumpsConfig::Geometric { c, rate, k, mean } => {
                JumpSequence::geometric(*c, *rate, k.unwrap_or(DEFAULT_K_JUMP), *mean)
            }
            JumpsConfig::Explicit { jumps } => Ok(jumps.clone()),
        }
    }
}

/// Step position: an angle literal or the keyword `"alpha"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Keyword(BetaKeyword),
    Angle(Angle),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaKeyword {
    Alpha,
}

impl BetaSpec {
    pub fn resolve(&self, cf: &ContinuedFraction) -> Angle {
        match self {
            BetaSpec::Keyword(BetaKeyword::Alpha) => cf.alpha_angle(),
            BetaSpec::Angle(a) => a.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CesaroConfig {
    pub t_max: f64,
    pub resolution: f64,
    pub t_avg: f64,
    pub threshold: f64,
    pub pairs: Vec<(Observable, Observable)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Experiment {
    OneHoleRigidity {
        #[serde(default)]
        jumps: JumpsConfig,
        #[serde(default = "default_m_max")]
        m_max: u64,
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_lambdas")]
        lambdas: Vec<f64>,
        #[serde(default = "default_schedule")]
        n_schedule: Vec<usize>,
        #[serde(default = "default_base_points")]
        base_points: usize,
        #[serde(default)]
        thresholds: ScanThresholds,
    },
    TwoHoleWeakMixing {
        epsilon: f64,
        #[serde(default = "default_beta")]
        beta: BetaSpec,
        #[serde(default = "default_upper")]
        lambda_upper: f64,
        #[serde(default = "default_points")]
        lambda_points: usize,
        #[serde(default = "default_l_max")]
        l_max: u32,
        #[serde(default = "default_relation_bound")]
        relation_bound: u32,
        #[serde(default = "default_schedule")]
        n_schedule: Vec<usize>,
        #[serde(default = "default_base_points")]
        base_points: usize,
        #[serde(default)]
        thresholds: ScanThresholds,
        #[serde(default = "default_true")]
        control: bool,
        #[serde(default)]
        cesaro: Option<CesaroConfig>,
    },
    HalfCoverCorollary {
        #[serde(default)]
        depth: Option<usize>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default = "default_relation_bound")]
        relation_bound: u32,
        #[serde(default = "default_gp_threshold")]
        gp_threshold: f64,
    },
    AmPipeline {
        system: HamiltonianSpec,
        #[serde(default = "default_orbits")]
        orbits: Vec<(u64, u64)>,
        #[serde(default = "default_restarts")]
        restarts: usize,
        #[serde(default)]
        cantor_levels: usize,
        #[serde(default = "default_lyapunov_iterates")]
        lyapunov_iterates: usize,
        #[serde(default = "default_r_range")]
        r_range: (f64, f64),
        #[serde(default = "default_twist_grid")]
        twist_grid: (usize, usize),
        #[serde(default = "default_reparam_points")]
        reparam_points: usize,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::OneHoleRigidity { .. } => "one-hole-rigidity",
            Experiment::TwoHoleWeakMixing { .. } => "two-hole-weak-mixing",
            Experiment::HalfCoverCorollary { .. } => "half-cover-corollary",
            Experiment::AmPipeline { .. } => "am-pipeline",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub cf: CfSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub level: Level,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    fn warning(code: &str, message: String) -> Self {
        Diagnostic { level: Level::Warning, code: code.into(), message }
    }

    fn error(e: &Error) -> Self {
        Diagnostic { level: Level::Error, code: e.kind().into(), message: e.to_string() }
    }
}

fn check_schedule(schedule: &[usize], rot: &Rotation) -> Result<()> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N-schedule must be non-empty, positive and increasing"));
    }
    let n_max = *schedule.last().expect("non-empty");
    if n_max as u64 > rot.max_iterate() {
        return Err(Error::InsufficientDepth(format!(
            "N = {n_max} exceeds the {} iterates the continued-fraction depth can resolve; add partial quotients",
            rot.max_iterate()
        )));
    }
    Ok(())
}

fn check_base_points(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("at least one base point is required"));
    }
    Ok(())
}

/// Everything built during validation and reused by the run.
enum Prepared {
    OneHole { cocycle: Cocycle, flow: SpecialFlow<Rotation> },
    TwoHole { flow: SpecialFlow<Rotation>, beta: Angle, lambdas: Vec<f64> },
    HalfCover { depth: usize },
    Am { system: HamiltonianSystem },
}

fn prepare(config: &ExperimentConfig, warnings: &mut Vec<Diagnostic>) -> Result<(ContinuedFraction, Prepared)> {
    let cf = config.cf.build()?;
    let rot = cf.rotation();
    let prepared = match &config.experiment {
        Experiment::OneHoleRigidity { jumps, m_max, grid, lambdas, n_schedule, base_points, .. } => {
            let jumps = jumps.build()?;
            let cocycle = Cocycle::new(jumps.clone(), rot)?;
            let flow = SpecialFlow::new(rot, CeilingFunction::jump_bv(jumps, rot)?)?;
            if *m_max == 0 || *grid < 2 {
                return Err(Error::invalid("spread check needs m_max >= 1 and grid >= 2"));
            }
            rot.check_iterate(*m_max as i64)?;
            if lambdas.is_empty() || lambdas.iter().any(|l| *l == 0.0 || !l.is_finite()) {
                return Err(Error::invalid("λ list must be non-empty, finite and exclude 0"));
            }
            check_schedule(n_schedule, &rot)?;
            check_base_points(*base_points)?;
            Prepared::OneHole { cocycle, flow }
        }
        Experiment::TwoHoleWeakMixing {
            epsilon,
            beta,
            lambda_upper,
            lambda_points,
            l_max,
            relation_bound,
            n_schedule,
            base_points,
            cesaro,
            ..
        } => {
            let beta = beta.resolve(&cf);
            let flow = SpecialFlow::new(rot, make_step_ceiling(*epsilon, beta.value())?)?;
            if !(*lambda_upper > 0.0) || *lambda_points == 0 {
                return Err(Error::invalid("λ-grid needs a positive upper end and at least one point"));
            }
            if *relation_bound == 0 {
                return Err(Error::invalid("relation bound K must be >= 1"));
            }
            check_schedule(n_schedule, &rot)?;
            check_base_points(*base_points)?;
            if let Some(c) = cesaro {
                if c.t_max < 100.0 || !(c.resolution > 0.0) || c.resolution > c.t_max / 16.0 {
                    return Err(Error::invalid("Cesàro test needs t_max >= 100 and 0 < resolution <= t_max/16"));
                }
                if c.t_avg < 1e3 * flow.mean() {
                    return Err(Error::invalid("Cesàro averaging time must be at least 1e3 × mean ceiling"));
                }
                if c.pairs.is_empty() {
                    return Err(Error::invalid("Cesàro test needs at least one observable pair"));
                }
            }
            let gp = general_position(&cf, &beta, cf.depth(), DEFAULT_GP_THRESHOLD)?;
            if gp.verdict == GpVerdict::EvidenceFails {
                warnings.push(Diagnostic::warning(
                    "general-position",
                    format!(
                        "β = {beta} is not in general position with respect to α: ‖q_n β‖ stays below {:e} and \
                         decreases over the last third of the indices (max {:e})",
                        gp.fail_threshold, gp.tail_max
                    ),
                ));
            }
            if let crate::arithmetic::RelationSearch::RelationFound { l, k, p } = in_l_alpha(*epsilon, &cf, *relation_bound)? {
                warnings.push(Diagnostic::warning(
                    "arithmetic-relation",
                    format!("ε satisfies l + l/ε = kα + 2p with (l, k, p) = ({l}, {k}, {p}); λ = lπ/ε may be an eigenvalue"),
                ));
            }
            let lambdas = default_lambda_grid(*lambda_upper, *lambda_points, Some(*epsilon), *l_max);
            Prepared::TwoHole { flow, beta, lambdas }
        }
        Experiment::HalfCoverCorollary { depth, epsilon, relation_bound, gp_threshold } => {
            let depth = depth.unwrap_or(cf.depth());
            if depth < 2 {
                return Err(Error::invalid("parity certificate needs depth >= 2"));
            }
            if depth > cf.depth() {
                return Err(Error::InsufficientDepth(format!(
                    "requested depth {depth} exceeds the continued-fraction depth {}",
                    cf.depth()
                )));
            }
            if let Some(e) = epsilon {
                if !(*e > 0.0 && *e < 1.0) {
                    return Err(Error::invalid(format!("step height ε must lie in (0, 1), got {e}")));
                }
            }
            if *relation_bound == 0 || !(*gp_threshold > 0.0) {
                return Err(Error::invalid("relation bound and general-position threshold must be positive"));
            }
            Prepared::HalfCover { depth }
        }
        Experiment::AmPipeline { system, orbits, cantor_levels, lyapunov_iterates, r_range, twist_grid, .. } => {
            let sys = system.build()?;
            for &(p, q) in orbits {
                if q == 0 || q > 10_000 || num_integer::gcd(p, q) != 1 {
                    return Err(Error::invalid(format!("orbit {p}/{q} must be in lowest terms with 1 <= q <= 10000")));
                }
            }
            if *cantor_levels > cf.depth() {
                return Err(Error::InsufficientDepth(format!(
                    "{cantor_levels} Aubry-Mather levels requested, continued fraction has depth {}",
                    cf.depth()
                )));
            }
            if *lyapunov_iterates < 1000 {
                return Err(Error::invalid("Lyapunov estimate needs at least 1000 iterates"));
            }
            if twist_grid.0 < 10 || twist_grid.1 < 10 {
                return Err(Error::invalid("twist grid must be at least 10 × 10"));
            }
            if !(r_range.0 < r_range.1) || r_range.0.abs().max(r_range.1.abs()) >= sys.r_max() {
                return Err(Error::invalid("twist r-range must be increasing and inside the working annulus"));
            }
            Prepared::Am { system: sys }
        }
    };
    Ok((cf, prepared))
}

/// Dry-run validation: builds every object, computes nothing.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Err(e) = prepare(config, &mut out) {
        out.push(Diagnostic::error(&e));
    }
    out
}

/// Verdict document plus the files it was written to.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub verdicts: Value,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }
}

fn base_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

/// Runs the experiment and writes `verdicts.json`, CSVs and `manifest.json`
/// into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let started = Instant::now();
    let mut warnings = Vec::new();
    let (cf, prepared) = prepare(config, &mut warnings)?;
    std::fs::create_dir_all(out_dir)?;
    let mut out = Outputs { dir: out_dir.to_path_buf(), files: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (verdicts, trace, samples) = match (&config.experiment, prepared) {
        (Experiment::OneHoleRigidity { m_max, grid, lambdas, n_schedule, base_points: nb, thresholds, .. }, Prepared::OneHole { cocycle, flow }) => {
            let xs = base_points(&mut rng, *nb);
            let spread = birkhoff_spread(&cocycle, *m_max, *grid)?;
            spread.write_csv(out.create("spread.csv")?)?;
            let scan = eigenvalue_scan(&flow, lambdas, n_schedule, &xs, *thresholds)?;
            scan.write_csv(out.create("weyl.csv")?)?;
            let oracle: Vec<Value> = lambdas
                .iter()
                .map(|&l| json!({"lambda": l, "magnitude": cocycle.phase_integral(l).norm()}))
                .collect();
            let spread_word = if spread.within_bound { "bounded-spread" } else { "spread-bound-violated" };
            let scan_word = serde_json::to_value(scan.verdict)?;
            let verdict = format!("{spread_word} + {}", scan_word.as_str().unwrap_or("inconclusive"));
            let v = json!({
                "verdict": verdict,
                "spread": {
                    "spread": spread.spread,
                    "two_sigma_l1": 2.0 * spread.sigma_l1,
                    "bv_bound": spread.bound,
                    "within_bound": spread.within_bound,
                },
                "weyl": scan.verdict_json(),
                "phase_integral_oracle": oracle,
                "ceiling_lower_bound": cocycle.ceiling_lower_bound(),
            });
            let trace = json!({
                "spread": "cocycle::birkhoff_spread",
                "weyl": "specialflow::eigenvalue_scan",
                "phase_integral_oracle": "cocycle::Cocycle::phase_integral",
                "ceiling_lower_bound": "cocycle::Cocycle::ceiling_lower_bound",
            });
            (v, trace, json!({"base_points": xs}))
        }
        (
            Experiment::TwoHoleWeakMixing {
                epsilon, relation_bound, n_schedule, base_points: nb, thresholds, control, cesaro, ..
            },
            Prepared::TwoHole { flow, beta, lambdas },
        ) => {
            let xs = base_points(&mut rng, *nb);
            let scan = eigenvalue_scan(&flow, &lambdas, n_schedule, &xs, *thresholds)?;
            scan.write_csv(out.create("weyl.csv")?)?;
            let mut exclusions = Vec::with_capacity(lambdas.len());
            let mut violations = Vec::new();
            {
                let mut w = csv::Writer::from_writer(out.create("exclusions.csv")?);
                w.write_record(["lambda", "exclusion", "verdict"])?;
                for r in &scan.reports {
                    let ex = ks_exclusion(*epsilon, &cf, r.lambda, *relation_bound)?;
                    let tag = serde_json::to_value(ex)?["result"].as_str().unwrap_or("").to_string();
                    let verdict = serde_json::to_value(r.verdict)?.as_str().unwrap_or("").to_string();
                    if matches!(ex, KsExclusion::ExcludedByStepLemma | KsExclusion::ExcludedByArithmetic { .. })
                        && r.verdict == WeylVerdict::EigenvalueEvidence
                    {
                        violations.push(json!({"lambda": r.lambda, "lambda_over_pi": r.lambda / PI, "exclusion": tag, "min_magnitude": r.min_overall}));
                    }
                    w.write_record([r.lambda.to_string(), tag, verdict])?;
                    exclusions.push(ex);
                }
                w.flush()?;
            }
            let relation = in_l_alpha(*epsilon, &cf, *relation_bound)?;
            let gp = general_position(&cf, &beta, cf.depth(), DEFAULT_GP_THRESHOLD)?;
            let mut v = json!({
                "verdict": scan.verdict,
                "scan": scan.verdict_json(),
                "exclusion_soundness": {"sound": violations.is_empty(), "violations": violations},
                "relation_search": relation,
                "general_position": {"beta": beta.to_string(), "verdict": gp.verdict, "tail_max": gp.tail_max},
            });
            let mut trace = json!({
                "scan": "specialflow::eigenvalue_scan",
                "exclusion_soundness": "specialflow::ks_exclusion",
                "relation_search": "arithmetic::in_l_alpha",
                "general_position": "arithmetic::general_position",
            });
            if *control {
                let unit = SpecialFlow::new(cf.rotation(), CeilingFunction::constant(1.0)?)?;
                let c = eigenvalue_scan(&unit, &[2.0 * PI], n_schedule, &xs, *thresholds)?;
                v["control"] = json!({
                    "ceiling": "constant 1",
                    "lambda": 2.0 * PI,
                    "verdict": c.verdict,
                    "min_magnitude": c.reports[0].min_overall,
                });
                trace["control"] = json!("specialflow::eigenvalue_scan");
            }
            if let Some(c) = cesaro {
                let start = flow.start(xs[0], 0.0)?;
                let rep = cesaro_mixing_test(&flow, &start, &c.pairs, c.t_max, c.resolution, c.t_avg, c.threshold)?;
                rep.write_csv(out.create("cesaro.csv")?)?;
                v["cesaro"] = json!({
                    "verdict": rep.verdict,
                    "checkpoints": rep.curves.iter().map(|c| &c.checkpoints).collect::<Vec<_>>(),
                });
                trace["cesaro"] = json!("specialflow::cesaro_mixing_test");
            }
            (v, trace, json!({"base_points": xs}))
        }
        (Experiment::HalfCoverCorollary { epsilon, relation_bound, gp_threshold, .. }, Prepared::HalfCover { depth }) => {
            let cert = half_general_position_certificate(&cf, depth)?;
            let half = Angle::rational(1, 2)?;
            let alpha = cf.alpha_angle();
            let gp_half = general_position(&cf, &half, depth, *gp_threshold)?;
            let gp_alpha = general_position(&cf, &alpha, depth, *gp_threshold)?;
            gp_half.write_csv(out.create("general_position_half.csv")?)?;
            gp_alpha.write_csv(out.create("general_position_alpha.csv")?)?;
            let enough = cert.indices.len() * 3 >= depth;
            let holds = cert.covers_every_pair && enough && gp_half.verdict == GpVerdict::EvidenceHolds;
            let mut v = json!({
                "verdict": if holds { "half-in-general-position" } else { "inconclusive" },
                "parity_certificate": {
                    "odd_indices": cert.indices.len(),
                    "depth": depth,
                    "covers_every_pair": cert.covers_every_pair,
                    "consecutive_coprime": cert.consecutive_coprime,
                },
                "general_position_half": gp_half.verdict,
                "general_position_alpha": gp_alpha.verdict,
            });
            let mut trace = json!({
                "parity_certificate": "arithmetic::half_general_position_certificate",
                "general_position_half": "arithmetic::general_position",
                "general_position_alpha": "arithmetic::general_position",
            });
            if let Some(e) = epsilon {
                v["relation_search"] = serde_json::to_value(in_l_alpha(*e, &cf, *relation_bound)?)?;
                trace["relation_search"] = json!("arithmetic::in_l_alpha");
            }
            (v, trace, Value::Null)
        }
        (
            Experiment::AmPipeline { orbits, restarts, cantor_levels, lyapunov_iterates, r_range, twist_grid, reparam_points, .. },
            Prepared::Am { system },
        ) => run_am(&system, &cf, &mut out, &mut rng, orbits, *restarts, *cantor_levels, *lyapunov_iterates, *r_range, *twist_grid, *reparam_points)?,
        _ => unreachable!("prepare matches the experiment"),
    };
    let mut verdicts = verdicts;
    verdicts["experiment"] = json!(config.experiment.name());
    verdicts["warnings"] = serde_json::to_value(&warnings)?;
    serde_json::to_writer_pretty(out.create("verdicts.json")?, &verdicts)?;
    out.files.push("manifest.json".into());
    let manifest = json!({
        "experiment": config.experiment.name(),
        "config": config,
        "seed": config.seed,
        "rng": "ChaCha8",
        "samples": samples,
        "versions": {"amlab": env!("CARGO_PKG_VERSION")},
        "cf": {"depth": cf.depth(), "alpha": cf.decimal(30)},
        "operations": trace,
        "outputs": out.files,
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    serde_json::to_writer_pretty(BufWriter::new(File::create(out_dir.join("manifest.json"))?), &manifest)?;
    Ok(RunOutcome { verdicts, out_dir: out_dir.to_path_buf(), files: out.files })
}

#[allow(clippy::too_many_arguments)]
fn run_am(
    sys: &HamiltonianSystem,
    cf: &ContinuedFraction,
    out: &mut Outputs,
    rng: &mut ChaCha8Rng,
    orbits: &[(u64, u64)],
    restarts: usize,
    cantor_levels: usize,
    lyapunov_iterates: usize,
    r_range: (f64, f64),
    twist_grid: (usize, usize),
    reparam_points: usize,
) -> Result<(Value, Value, Value)> {
    let twist = sys.twist_check(r_range, twist_grid.0, twist_grid.1)?;
    let mid = 0.5 * (r_range.0 + r_range.1);
    let jac = sys.jacobian_check(0.37, mid, 1e-3)?;
    let area_preserving = (jac.det_fd - 1.0).abs() < 1e-8;
    let mut orbit_rows = Vec::new();
    let mut all_closed = true;
    {
        let mut w = csv::Writer::from_writer(out.create("orbits.csv")?);
        w.write_record(["p", "q", "i", "theta", "r"])?;
        for &(p, q) in orbits {
            let o = am_minimize(sys, p, q, restarts)?;
            for (i, (t, r)) in o.thetas.iter().zip(&o.rs).enumerate() {
                w.write_record([p.to_string(), q.to_string(), i.to_string(), t.to_string(), r.to_string()])?;
            }
            let closed = o.monotone && o.displacement_error.is_some_and(|d| d.abs() < 1e-6);
            all_closed &= closed;
            orbit_rows.push(json!({
                "p": p,
                "q": q,
                "action": o.action,
                "gradient_norm": o.gradient_norm,
                "monotone": o.monotone,
                "lift_displacement_error": o.displacement_error,
                "closure_error": o.closure_error,
                "lyapunov": periodic_exponent(sys, &o)?,
            }));
        }
        w.flush()?;
    }
    let start = (rng.gen::<f64>(), r_range.0 + (r_range.1 - r_range.0) * rng.gen::<f64>());
    let lyap = lyapunov_exponent(sys, start, lyapunov_iterates)?;
    let mut v = json!({
        "twist": twist,
        "jacobian": {"det_fd": jac.det_fd, "det_tangent": jac.det_tangent, "max_entry_gap": jac.max_entry_gap},
        "orbits": orbit_rows,
        "lyapunov": {"start": start, "top": lyap.top, "bottom": lyap.bottom, "sum": lyap.sum(), "iterates": lyap.iterations},
    });
    let mut trace = json!({
        "twist": "hamiltonian::twist_check",
        "jacobian": "hamiltonian::jacobian_check",
        "orbits": "hamiltonian::am_minimize + hamiltonian::lift_displacement + hamiltonian::periodic_exponent",
        "lyapunov": "hamiltonian::lyapunov_exponent",
    });
    let mut words = vec![
        if twist.monotone_twist { "monotone-twist" } else { "twist-fails" },
        if area_preserving { "area-preserving" } else { "area-defect" },
        if all_closed { "ordered-periodic-orbits" } else { "orbit-defect" },
    ];
    if cantor_levels > 0 {
        let am = am_cantor_approx(sys, cf, cantor_levels, restarts)?;
        am.write_points_csv(out.create("cantor.csv")?)?;
        {
            let mut w = csv::Writer::from_writer(out.create("gap_lengths.csv")?);
            w.write_record(["k", "length"])?;
            for (k, l) in &am.gap_lengths {
                w.write_record([k.to_string(), l.to_string()])?;
            }
            w.flush()?;
        }
        let geometric = am.gap_fit.is_some_and(|f| f.delta_est < 1.0 && f.r2 > 0.9);
        let last = am.levels.last().expect("levels >= 1");
        let persistent = last.largest_gap * last.q as f64 > 4.0;
        words.push(match (persistent, geometric) {
            (true, true) => "persistent-gap-geometric-decay",
            (true, false) => "persistent-gap",
            _ => "no-persistent-gap",
        });
        v["aubry_mather"] = json!({
            "levels": am.levels.iter().map(|l| json!({
                "p": l.p, "q": l.q, "largest_gap": l.largest_gap, "q_times_gap": l.largest_gap * l.q as f64,
                "gap_left": l.gap_left, "lipschitz": l.lipschitz,
            })).collect::<Vec<_>>(),
            "gap_fit": am.gap_fit,
        });
        trace["aubry_mather"] = json!("hamiltonian::am_cantor_approx + denjoy::gap_decay_fit");
    }
    // quadrature checks of the reparametrized ceiling
    let one = sys.clone().with_phi(TimeChange::Poly(TrigPoly::constant(1.0)))?;
    let two = sys.clone().with_phi(TimeChange::Poly(TrigPoly::constant(2.0)))?;
    let eps_step = 1.0 / PI;
    let step = sys.clone().with_phi(TimeChange::TwoRegion { epsilon: eps_step, beta: 0.5, delta: 0.01 })?;
    let mut worst: f64 = 0.0;
    {
        let mut w = csv::Writer::from_writer(out.create("reparam.csv")?);
        w.write_record(["theta", "r", "psi_one", "psi_two", "psi_step", "psi_config"])?;
        for _ in 0..reparam_points {
            let th = rng.gen::<f64>();
            let r = r_range.0 + (r_range.1 - r_range.0) * rng.gen::<f64>();
            let a = reparam_ceiling(&one, th, r)?;
            let b = reparam_ceiling(&two, th, r)?;
            let c = reparam_ceiling(&step, th, r)?;
            let x = th.rem_euclid(1.0);
            let expect = if x < 0.49 { Some(1.0 - eps_step) } else if (0.5..0.99).contains(&x) { Some(1.0 + eps_step) } else { None };
            worst = worst.max((a - 1.0).abs()).max((b - 0.5).abs());
            if let Some(e) = expect {
                worst = worst.max((c - e).abs());
            }
            let own = if sys.phi().is_some() { reparam_ceiling(sys, th, r)?.to_string() } else { String::new() };
            w.write_record([th.to_string(), r.to_string(), a.to_string(), b.to_string(), c.to_string(), own])?;
        }
        w.flush()?;
    }
    let reparam_ok = worst < 1e-10;
    words.push(if reparam_ok { "reparam-exact" } else { "reparam-defect" });
    v["reparam"] = json!({"max_error": worst, "ok": reparam_ok, "step_epsilon": eps_step});
    trace["reparam"] = json!("hamiltonian::reparam_ceiling");
    v["verdict"] = json!(words.join(" + "));
    Ok((v, trace, json!({"lyapunov_start": start})))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_hole(eps: f64, beta: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"experiment": "two-hole-weak-mixing", "cf": {{"partial_quotients": [1], "depth": 60}},
                "epsilon": {eps}, "beta": "{beta}", "lambda_points": 8, "n_schedule": [100, 1000]}}"#
        ))
        .unwrap()
    }

    #[test]
    fn well_formed_config_has_no_diagnostics() {
        assert!(validate(&two_hole(1.0 / PI, "1/2")).is_empty());
    }

    #[test]
    fn invalid_epsilon_is_an_error() {
        let d = validate(&two_hole(2.0, "1/2"));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].level, Level::Error);
        assert!(d[0].message.contains("ε must lie in (0, 1)"));
    }

    #[test]
    fn beta_alpha_warns() {
        let d = validate(&two_hole(1.0 / PI, "alpha"));
        assert!(d.iter().any(|x| x.level == Level::Warning && x.code == "general-position"), "{d:?}");
    }

    #[test]
    fn too_shallow_cf_is_reported() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "two-hole-weak-mixing", "cf": {"partial_quotients": [1], "depth": 40},
                "epsilon": 0.3, "n_schedule": [1000, 100000]}"#,
        )
        .unwrap();
        let d = validate(&cfg);
        assert_eq!(d.last().unwrap().code, "insufficient-depth");
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment": "one-hole-rigidity", "cf": {"partial_quotients": [1], "depth": 60}}"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, 0);
        match &cfg.experiment {
            Experiment::OneHoleRigidity { n_schedule, base_points, .. } => {
                assert_eq!(n_schedule, &default_schedule());
                assert_eq!(*base_points, 5);
            }
            _ => panic!("wrong experiment"),
        }
        assert!(validate(&cfg).is_empty());
    }
}
