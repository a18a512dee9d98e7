//! Config-driven verification runs.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::aux::{eta_identity_check, eval_aux, log_log_slope, AuxExponents};
use super::calibrate::{calibrated_checks, potential_grand_pair, run_calibrated, CalibratedCheck, CalibratedParams, Calibration};
use super::checks::{
    commutator_cz, commutator_potential, dominance_check, embedding_chain_check, fefferman_stein_check,
    reduction_transfer_check, FormulaBound,
};
use super::constants::ConstantFormula;
use super::corpus::{CorpusSpec, Family};
use super::report::{CorpusInfo, VerificationReport};
use super::VerifyError;
use crate::funcnorm::{EpsGrid, GrandParams, GridSpec, Profile};
use crate::homspace::{
    check_annulus, doubling_witness, iterated_doubling_worst, read_space_json, reverse_doubling_exponent,
    DiscreteHomSpace, Geometry, DEFAULT_REVERSE_DOUBLING_SCALE,
};
use crate::operators::{dini_integral, l2_ratio, smoothness_envelope, CzOperator, Identity, KernelSpec, Maximal};

/// Above this size the quartic iterated-doubling scan is skipped.
const ITERATED_DOUBLING_MAX_N: usize = 64;
/// Above this size the cubic kernel-smoothness scan is skipped.
const SMOOTHNESS_MAX_N: usize = 512;

/// Where the space comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// `n` equispaced points on the circle.
    Circle { n: usize },
    /// `n` equispaced points per axis of `[0, 1]^dim`.
    Grid {
        n: usize,
        #[serde(default = "one")]
        dim: usize,
    },
    /// A space file in the JSON layout of [`crate::homspace::SpaceFile`].
    File { path: PathBuf },
}

fn one() -> usize {
    1
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec::Circle { n: 256 }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Circle { n } => write!(f, "circle:{n}"),
            SpaceSpec::Grid { n, dim } => write!(f, "grid:{n}^{dim}"),
            SpaceSpec::File { path } => write!(f, "file:{}", path.display()),
        }
    }
}

impl SpaceSpec {
    pub fn build(&self) -> Result<DiscreteHomSpace, VerifyError> {
        Ok(match self {
            SpaceSpec::Circle { n } => DiscreteHomSpace::uniform_grid(*n, 1, Geometry::Circle)?,
            SpaceSpec::Grid { n, dim } => DiscreteHomSpace::uniform_grid(*n, *dim, Geometry::Interval)?,
            SpaceSpec::File { path } => read_space_json(path)?,
        })
    }

    /// The built-in singular-integral kernel matching the geometry, if any.
    pub fn default_kernel(&self, space: &DiscreteHomSpace) -> Result<Option<KernelSpec>, VerifyError> {
        Ok(match self {
            SpaceSpec::Circle { .. } => Some(KernelSpec::circle_conjugate(space)?),
            SpaceSpec::Grid { dim: 1, .. } => Some(KernelSpec::interval_hilbert(space)?),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    EtaIdentity,
    AuxValues,
    Space,
    Kernel,
    Calibrated,
    Dominance,
    Reduction,
    Embedding,
    FeffermanStein,
    CommutatorCz,
    CommutatorPotential,
}

impl CheckKind {
    pub fn all() -> Vec<CheckKind> {
        use CheckKind::*;
        vec![
            EtaIdentity,
            AuxValues,
            Space,
            Kernel,
            Calibrated,
            Dominance,
            Reduction,
            Embedding,
            FeffermanStein,
            CommutatorCz,
            CommutatorPotential,
        ]
    }
}

/// Pass/fail thresholds. Nothing in the check logic is hard-coded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Maximum residual of the exponent identity.
    pub eta: f64,
    /// Absolute error allowed on closed-form auxiliary values.
    pub aux: f64,
    /// Allowed deviation of the fitted `ψ` log-log slope.
    pub psi_slope: f64,
    /// Factor over the frozen calibrated bound.
    pub headroom: f64,
    /// Relative change of the dominance constant under corpus doubling.
    pub dominance: f64,
    pub fefferman_stein: f64,
    pub commutator: f64,
    /// Relative slack in the embedding chain and the transfer bound.
    pub embedding_slack: f64,
    pub transfer_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eta: 1e-12,
            aux: 1e-12,
            psi_slope: 0.05,
            headroom: 1.5,
            dominance: 0.05,
            fefferman_stein: 0.10,
            commutator: 0.10,
            embedding_slack: 1e-12,
            transfer_slack: 1e-12,
        }
    }
}

/// Parameters of the non-calibrated checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteParams {
    #[serde(flatten)]
    pub calibrated: CalibratedParams,
    /// Parameter draws for the exponent identity.
    pub eta_draws: usize,
    /// Levels for the dominance check, as fractions of `s_max`.
    pub dominance_levels: Vec<f64>,
    pub embedding_p: f64,
    pub embedding_theta1: f64,
    pub embedding_theta2: f64,
    pub embedding_eps: f64,
    /// Separation used when estimating the kernel smoothness constant.
    pub smoothness_separation: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            calibrated: CalibratedParams::default(),
            eta_draws: 1000,
            dominance_levels: vec![0.125, 0.25, 0.5, 0.75],
            embedding_p: 2.0,
            embedding_theta1: 1.0,
            embedding_theta2: 2.0,
            embedding_eps: 0.5,
            smoothness_separation: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSettings {
    pub family: Family,
    pub size: usize,
}

impl Default for CorpusSettings {
    fn default() -> Self {
        Self {
            family: Family::Mixed,
            size: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub space: SpaceSpec,
    pub seed: u64,
    pub corpus: CorpusSettings,
    pub checks: Vec<CheckKind>,
    pub tolerances: Tolerances,
    pub params: SuiteParams,
    /// Frozen constants; the built-in circle file when absent.
    pub calibration: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            space: SpaceSpec::default(),
            seed: 0,
            corpus: CorpusSettings::default(),
            checks: CheckKind::all(),
            tolerances: Tolerances::default(),
            params: SuiteParams::default(),
            calibration: None,
        }
    }
}

impl SuiteConfig {
    pub fn read(path: &Path) -> Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| VerifyError::Config(format!("{}: {e}", path.display())))
    }

    fn corpus(&self, size: usize) -> CorpusSpec {
        CorpusSpec::new(self.corpus.family, size, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub passed: bool,
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutcome, VerifyError> {
    if config.checks.is_empty() {
        return Err(VerifyError::NoChecks);
    }
    let space = config.space.build()?;
    let kernel = config.space.default_kernel(&space)?;
    let mut reports = Vec::new();
    for &check in &config.checks {
        let mut batch = match check {
            CheckKind::EtaIdentity => vec![eta_report(config)?],
            CheckKind::AuxValues => aux_reports(config)?,
            CheckKind::Space => vec![space_report(&space, &config.space.to_string())],
            CheckKind::Kernel => vec![kernel_report(config, &space, need(&kernel, "kernel")?)?],
            CheckKind::Calibrated => calibrated_reports(config, &space, need(&kernel, "calibrated")?)?,
            CheckKind::Dominance => vec![dominance_report(config, &space)?],
            CheckKind::Reduction => reduction_reports(config, &space, kernel.as_ref())?,
            CheckKind::Embedding => vec![embedding_report(config, &space)?],
            CheckKind::FeffermanStein => vec![fefferman_stein_report(config, &space)?],
            CheckKind::CommutatorCz => commutator_cz_reports(config, &space, need(&kernel, "commutator_cz")?)?,
            CheckKind::CommutatorPotential => commutator_potential_reports(config, &space)?,
        };
        reports.append(&mut batch);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    Ok(SuiteOutcome { reports, passed })
}

fn need<'k>(kernel: &'k Option<KernelSpec>, check: &str) -> Result<&'k KernelSpec, VerifyError> {
    kernel
        .as_ref()
        .ok_or_else(|| VerifyError::Config(format!("check {check} needs a built-in kernel; use a circle or a 1-d grid")))
}

/// Randomized exponent bundles; half with `A₂ ≡ 0`, half with a linear `A₂`.
fn eta_report(config: &SuiteConfig) -> Result<VerificationReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6574_6100);
    let draws = config.params.eta_draws;
    let mut worst = (0.0f64, 0usize);
    let mut sum = 0.0;
    let mut rejected = 0usize;
    let mut i = 0;
    while i < draws {
        let p = rng.gen_range(1.1..4.0);
        let lambda = rng.gen_range(0.0..0.9);
        let alpha = rng.gen_range(0.05..0.95) * (1.0 - lambda) / p;
        let q = 1.0 / (1.0 / p - alpha / (1.0 - lambda));
        let theta1 = rng.gen_range(0.5..2.0);
        let theta2 = AuxExponents::minimal_theta2(p, alpha, lambda, theta1);
        let bound = (1.0 - lambda).powi(2) / (alpha * q * q);
        let a2 = if i % 2 == 0 {
            Profile::Zero
        } else {
            Profile::linear(rng.gen_range(0.0..0.5) * bound)
        };
        let delta = (q - 1.0) * rng.gen_range(0.05..1.0);
        let exps = match AuxExponents::new(p, alpha, lambda, a2, theta1, theta2, delta) {
            Ok(e) => e,
            Err(VerifyError::InvalidExponents(_)) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let eps = delta * rng.gen_range(1e-6..1.0);
        let r = eta_identity_check(eps, &exps)?;
        sum += r;
        if r > worst.0 || i == 0 {
            worst = (r, i);
        }
        i += 1;
    }
    let mut report = VerificationReport::new("eta_identity", "1/(p − φ̄(ε)) − 1/(q − ε) = α/(1 − λ + A₂(ε))")
        .value("max_residual", worst.0)
        .value("mean_residual", if draws > 0 { sum / draws as f64 } else { 0.0 })
        .value("draws", draws as f64)
        .value("tolerance", config.tolerances.eta)
        .worst(Some(worst));
    if rejected > 0 {
        report.note(format!("{rejected} draws redrawn: φ̄ not monotone on (0, δ]"));
    }
    Ok(report.verdict(worst.0 <= config.tolerances.eta))
}

/// Closed-form values at `(p, q, α, λ, A₂) = (2, 4, 1/4, 0, 0)` and the
/// small-`x` slope of `ψ`.
fn aux_reports(config: &SuiteConfig) -> Result<Vec<VerificationReport>, VerifyError> {
    let tol = config.tolerances;
    let theta1 = 1.0;
    let theta2 = AuxExponents::minimal_theta2(2.0, 0.25, 0.0, theta1);
    let exps = AuxExponents::new(2.0, 0.25, 0.0, Profile::Zero, theta1, theta2, 3.0)?;
    let v = eval_aux(1.0, &exps)?;
    let e_phibar = (v.phibar - 2.0 / 7.0).abs();
    let e_abar = (v.abar - 7.0 / 4.0).abs();
    let e_phi = (v.phi - (2.0f64 / 7.0).powf(1.75)).abs();
    let closed = VerificationReport::new("aux_values", "φ̄(1) = 2/7, Ā(1) = 7/4, φ(1) = (2/7)^{7/4} at (2, 4, 1/4, 0, 0)")
        .value("phibar", v.phibar)
        .value("abar", v.abar)
        .value("phi", v.phi)
        .value("psi", v.psi)
        .value("phitilde", v.phitilde)
        .value("atilde", v.atilde)
        .value("error_phibar", e_phibar)
        .value("error_abar", e_abar)
        .value("error_phi", e_phi)
        .value("tolerance", tol.aux)
        .verdict(e_phibar <= tol.aux && e_abar <= tol.aux && e_phi <= tol.aux);

    let expected = theta1 * (1.0 + exps.alpha * exps.q / (1.0 - exps.lambda));
    let slope = log_log_slope(|x| exps.psi(x).unwrap_or(f64::NAN), 1e-4, 1e-2, 64);
    let slope_report = VerificationReport::new("aux_psi_slope", "ψ(x) ~ x^{θ₁(1 + αq/(1−λ))} as x → 0 when A₂ ≡ 0")
        .value("slope", slope)
        .value("expected", expected)
        .value("tolerance", tol.psi_slope)
        .verdict((slope - expected).abs() <= tol.psi_slope);
    Ok(vec![closed, slope_report])
}

/// Doubling, reverse doubling and annulus diagnostics for a space.
pub fn space_report(space: &DiscreteHomSpace, label: &str) -> VerificationReport {
    let w = doubling_witness(space);
    let annulus = check_annulus(space);
    let mut r = VerificationReport::new(format!("space:{label}"), "μB(x,2r) ≤ C_d μB(x,r); annulus measures positive")
        .value("points", space.len() as f64)
        .value("c_t", space.ct())
        .value("c_s", space.cs())
        .value("c_d", w.constant)
        .value("diameter", space.diameter())
        .value("total_measure", space.total_measure())
        .value("annulus_failures", annulus.failures.len() as f64)
        .value("open_gaps", annulus.open_gaps as f64);
    let mut ok = annulus.pass && w.constant.is_finite();
    match reverse_doubling_exponent(space, DEFAULT_REVERSE_DOUBLING_SCALE) {
        Ok(rd) => {
            r.set("gamma", rd.gamma);
            r.set("reverse_doubling_constant", rd.fitted_constant);
            r.set("reverse_doubling_envelope", rd.envelope);
            ok &= rd.gamma > 0.0;
        }
        Err(e) => r.note(format!("reverse doubling fit unavailable: {e}")),
    }
    if space.len() <= ITERATED_DOUBLING_MAX_N {
        let worst = iterated_doubling_worst(space);
        r.set("iterated_doubling_worst", worst);
        ok &= worst <= 1.0 + 1e-12;
    } else {
        r.note(format!("iterated doubling skipped above {ITERATED_DOUBLING_MAX_N} points"));
    }
    for n in annulus.notes {
        r.note(n);
    }
    r.verdict(ok)
}

fn kernel_report(config: &SuiteConfig, space: &DiscreteHomSpace, kernel: &KernelSpec) -> Result<VerificationReport, VerifyError> {
    let dini = dini_integral(kernel.modulus())?;
    let op = CzOperator::new(space, kernel.clone())?;
    let spec = config.corpus(config.corpus.size);
    let fs = spec.generate(space);
    let l2 = l2_ratio(&op, &fs)?;
    let mut r = VerificationReport::new(
        format!("kernel:{:?}", kernel.kind()).to_lowercase(),
        "|K(x,y)| ≤ C/μB(x,d(x,y)), Dini modulus, ‖Tf‖₂ ≤ C‖f‖₂",
    )
    .with_corpus(Some(CorpusInfo::from(&spec)))
    .value("size_constant", kernel.size_constant())
    .value("dini_integral", dini.integral)
    .value("dini_series", dini.series)
    .worst(l2);
    if let Some((v, _)) = l2 {
        r.set("l2_ratio", v);
    }
    if space.len() <= SMOOTHNESS_MAX_N {
        let sm = smoothness_envelope(space, kernel, config.params.smoothness_separation);
        r.set("smoothness_constant", sm.constant);
        r.set("smoothness_separation", sm.separation);
    } else {
        r.note(format!("smoothness scan skipped above {SMOOTHNESS_MAX_N} points"));
    }
    let ok = dini.integral.is_finite() && l2.is_some_and(|(v, _)| v.is_finite()) && kernel.size_constant().is_finite();
    Ok(r.verdict(ok))
}

fn load_calibration(config: &SuiteConfig) -> Result<Calibration, VerifyError> {
    match &config.calibration {
        Some(path) => Calibration::read(path),
        None => Calibration::frozen(),
    }
}

fn calibrated_reports(
    config: &SuiteConfig,
    space: &DiscreteHomSpace,
    kernel: &KernelSpec,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let cal = load_calibration(config)?;
    run_calibrated(
        space,
        &config.space.to_string(),
        kernel,
        config.params.calibrated,
        &cal,
        calibrated_checks(),
        config.seed,
        config.corpus.size,
        config.tolerances.headroom,
    )
}

/// The grand norm shared by the maximal and singular-integral checks.
fn grand_params(config: &SuiteConfig, p: f64) -> Result<GrandParams, VerifyError> {
    let c = &config.params.calibrated;
    Ok(GrandParams::new(
        p,
        c.lambda,
        Profile::power(c.theta),
        Profile::linear(c.a_slope),
        &GridSpec::default(),
    )?)
}

fn dominance_report(config: &SuiteConfig, space: &DiscreteHomSpace) -> Result<VerificationReport, VerifyError> {
    let params = grand_params(config, config.params.calibrated.p)?;
    let levels: Vec<f64> = config.params.dominance_levels.iter().map(|t| t * params.s_max).collect();
    let spec = config.corpus(2 * config.corpus.size);
    dominance_check(&params, &levels, &spec.generate(space), Some(CorpusInfo::from(&spec)), config.tolerances.dominance)
}

fn reduction_reports(
    config: &SuiteConfig,
    space: &DiscreteHomSpace,
    kernel: Option<&KernelSpec>,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let spec = config.corpus(config.corpus.size);
    let fs = spec.generate(space);
    let info = Some(CorpusInfo::from(&spec));
    let slack = config.tolerances.transfer_slack;
    let params = grand_params(config, config.params.calibrated.p)?;
    let mut out = vec![reduction_transfer_check(
        &Maximal,
        &Identity,
        &params,
        &params,
        params.s_max / 2.0,
        &fs,
        info.clone(),
        slack,
    )?];
    if let Some(k) = kernel {
        let t = CzOperator::new(space, k.clone())?;
        let params = grand_params(config, config.params.calibrated.cz_high_p)?;
        out.push(reduction_transfer_check(&t, &Identity, &params, &params, params.s_max / 2.0, &fs, info, slack)?);
    }
    Ok(out)
}

fn embedding_report(config: &SuiteConfig, space: &DiscreteHomSpace) -> Result<VerificationReport, VerifyError> {
    let sp = &config.params;
    let grid = EpsGrid::from_spec(&GridSpec::default(), sp.embedding_p - 1.0)?;
    let spec = config.corpus(config.corpus.size);
    embedding_chain_check(
        sp.embedding_p,
        sp.embedding_theta1,
        sp.embedding_theta2,
        sp.embedding_eps,
        &grid,
        &spec.generate(space),
        Some(CorpusInfo::from(&spec)),
        config.tolerances.embedding_slack,
    )
}

fn fefferman_stein_report(config: &SuiteConfig, space: &DiscreteHomSpace) -> Result<VerificationReport, VerifyError> {
    let c = &config.params.calibrated;
    let spec = config.corpus(2 * config.corpus.size).mean_zero();
    fefferman_stein_check(
        c.p,
        c.lambda,
        &spec.generate(space),
        Some(CorpusInfo::from(&spec)),
        None,
        config.tolerances.fefferman_stein,
    )
}

fn commutator_cz_reports(
    config: &SuiteConfig,
    space: &DiscreteHomSpace,
    kernel: &KernelSpec,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let c = &config.params.calibrated;
    let params = grand_params(config, c.cz_high_p)?;
    let spec = config.corpus(2 * config.corpus.size);
    let bs = CorpusSpec::new(Family::Bmo, 2 * config.corpus.size, config.seed).generate(space);
    let t = CzOperator::new(space, kernel.clone())?;
    commutator_cz(
        &t,
        &params,
        c.s,
        &bs,
        &spec.generate(space),
        Some(CorpusInfo::from(&spec)),
        config.tolerances.commutator,
    )
}

fn commutator_potential_reports(config: &SuiteConfig, space: &DiscreteHomSpace) -> Result<Vec<VerificationReport>, VerifyError> {
    let c = &config.params.calibrated;
    let theta2 = AuxExponents::minimal_theta2(c.p, c.alpha, c.lambda, c.theta);
    let q = 1.0 / (1.0 / c.p - c.alpha / (1.0 - c.lambda));
    let exps = AuxExponents::new(c.p, c.alpha, c.lambda, Profile::linear(c.a2_slope), c.theta, theta2, q - 1.0)?;
    let (input, output) = potential_grand_pair(&exps)?;
    let cal = load_calibration(config)?;
    let key = CalibratedCheck::MaximalCommutatorPotential.key();
    let bound = cal.constants.get(key).map(|e| FormulaBound {
        formula: ConstantFormula::MaximalCommutatorPotential {
            p: exps.p,
            q: exps.q,
            alpha: exps.alpha,
            lambda: exps.lambda,
            s: c.s,
            b: crate::homspace::doubling_constant(space),
        },
        constant: e.constant,
        headroom: config.tolerances.headroom,
    });
    let spec = config.corpus(2 * config.corpus.size);
    let bs = CorpusSpec::new(Family::Bmo, 2 * config.corpus.size, config.seed).generate(space);
    let mut reports = commutator_potential(
        &exps,
        &input,
        &output,
        &bs,
        &spec.generate(space),
        Some(CorpusInfo::from(&spec)),
        bound,
        config.tolerances.commutator,
    )?;
    if bound.is_none() {
        reports[0].note(format!("no frozen constant for {key}; formula not compared"));
    }
    Ok(reports)
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    check: &'a str,
    verdict: &'a str,
    worst_sample: Option<usize>,
    worst_value: Option<f64>,
    theoretical: Option<f64>,
    corpus_family: Option<String>,
    corpus_size: Option<usize>,
    seed: Option<u64>,
    notes: String,
}

/// CSV summary, one row per report.
pub fn summary_csv(reports: &[VerificationReport]) -> Result<String, VerifyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(SummaryRow {
            check: &r.check,
            verdict: if r.passed() { "pass" } else { "fail" },
            worst_sample: r.worst_sample,
            worst_value: r.worst_value,
            theoretical: r.theoretical,
            corpus_family: r.corpus.as_ref().map(|c| format!("{:?}", c.family).to_lowercase()),
            corpus_size: r.corpus.as_ref().map(|c| c.size),
            seed: r.corpus.as_ref().map(|c| c.seed),
            notes: r.notes.join("; "),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| VerifyError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes `reports.json` and `summary.csv` into `dir`, returning both paths.
pub fn write_outputs(dir: &Path, reports: &[VerificationReport]) -> Result<(PathBuf, PathBuf), VerifyError> {
    std::fs::create_dir_all(dir)?;
    let json = dir.join("reports.json");
    let csv = dir.join("summary.csv");
    std::fs::write(&json, serde_json::to_string_pretty(reports)? + "\n")?;
    std::fs::write(&csv, summary_csv(reports)?)?;
    Ok((json, csv))
}
