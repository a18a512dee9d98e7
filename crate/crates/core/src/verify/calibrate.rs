//! Calibrated-constant regression.
//!
//! Each bound below has the shape `ratio ≤ C·unit + offset` with an unknown
//! absolute `C`. A calibration run measures the smallest `C` covering a fixed
//! corpus; later runs re-check fresh corpora against `headroom × (C·unit + offset)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::aux::AuxExponents;
use super::checks::{max_with_index, sample_ratios, NormEval, NormSpec};
use super::constants::ConstantFormula;
use super::corpus::{CorpusSpec, Family};
use super::report::{CorpusInfo, VerificationReport};
use super::VerifyError;
use crate::funcnorm::{bmo_norm, BmoVariant, GrandEvaluator, GrandParams, GridFunction, GridSpec, Profile};
use crate::homspace::{doubling_constant, DiscreteHomSpace};
use crate::operators::{maximal, Commutator, CzOperator, KernelSpec, Maximal, MaximalS, Operator, Potential};

pub const CALIBRATION_SEED: u64 = 7919;
pub const CALIBRATION_SAMPLES: usize = 1000;

const FROZEN_CIRCLE_256: &str = include_str!("../../calibration/circle256.json");

/// Exponents shared by the calibrated checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibratedParams {
    pub p: f64,
    pub lambda: f64,
    pub s: f64,
    pub alpha: f64,
    /// Exponents for the singular-integral checks, one on each side of 2.
    pub cz_low_p: f64,
    pub cz_high_p: f64,
    /// `φ(ε) = ε^θ` for the grand norms.
    pub theta: f64,
    /// `A(x) = a_slope·x` for the maximal and singular-integral grand norms.
    pub a_slope: f64,
    /// `A₂(x) = a2_slope·x` for the potential commutator.
    pub a2_slope: f64,
}

impl Default for CalibratedParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            lambda: 0.25,
            s: 1.25,
            alpha: 0.15,
            cz_low_p: 1.5,
            cz_high_p: 3.0,
            theta: 1.0,
            a_slope: 0.5,
            a2_slope: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibratedCheck {
    /// `‖Mf‖_{p,λ} / ‖f‖_{p,λ}`.
    MaximalMorrey,
    /// `‖M_s f‖_{p,λ} / ‖f‖_{p,λ}`.
    MaximalSMorrey,
    /// `‖Tf‖_{p,λ} / ‖f‖_{p,λ}` with `p < 2`.
    CzMorreyLow,
    /// The same with `p > 2`.
    CzMorreyHigh,
    /// `‖M([b,I^α]f)‖_{q,λ} / (‖b‖_BMO ‖f‖_{p,λ})`.
    MaximalCommutatorPotential,
    /// `‖Mf‖ / ‖f‖` in one generalized grand Morrey norm.
    MaximalGrand,
    /// `‖Tf‖ / ‖f‖` in one generalized grand Morrey norm.
    CzGrand,
    /// `‖[b,T]f‖ / (‖b‖_BMO ‖f‖)` in one generalized grand Morrey norm.
    CzCommutatorGrand,
    /// `‖M([b,I^α]f)‖_{q),λ)}_{ψ,A₂} / (‖b‖_BMO ‖f‖_{p),λ)}_{θ₁,A₁})`.
    PotentialCommutatorGrand,
}

pub fn calibrated_checks() -> &'static [CalibratedCheck] {
    use CalibratedCheck::*;
    &[
        MaximalMorrey,
        MaximalSMorrey,
        CzMorreyLow,
        CzMorreyHigh,
        MaximalCommutatorPotential,
        MaximalGrand,
        CzGrand,
        CzCommutatorGrand,
        PotentialCommutatorGrand,
    ]
}

impl CalibratedCheck {
    pub fn key(self) -> &'static str {
        use CalibratedCheck::*;
        match self {
            MaximalMorrey => "maximal_morrey",
            MaximalSMorrey => "maximal_s_morrey",
            CzMorreyLow => "cz_morrey_low",
            CzMorreyHigh => "cz_morrey_high",
            MaximalCommutatorPotential => "maximal_commutator_potential",
            MaximalGrand => "maximal_grand",
            CzGrand => "cz_grand",
            CzCommutatorGrand => "cz_commutator_grand",
            PotentialCommutatorGrand => "potential_commutator_grand",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        calibrated_checks().iter().copied().find(|c| c.key() == key)
    }

    fn anchor(self) -> &'static str {
        use CalibratedCheck::*;
        match self {
            MaximalMorrey => "‖Mf‖_{p,λ} ≤ (C b^{λ/p}(p')^{1/p} + 1)‖f‖_{p,λ}",
            MaximalSMorrey => "‖M_s f‖_{p,λ} ≤ (C b^{λs/p}((p/s)')^{s/p} + 1)‖f‖_{p,λ}",
            CzMorreyLow | CzMorreyHigh => "‖Tf‖_{p,λ} ≤ c·K(p,λ)‖f‖_{p,λ}",
            MaximalCommutatorPotential => "‖M([b,I^α]f)‖_{q,λ} ≤ C_{p,q,α,λ}‖b‖_BMO‖f‖_{p,λ}",
            MaximalGrand => "‖Mf‖_{p),λ)} ≤ C₀ F ‖f‖_{p),λ)}",
            CzGrand => "‖Tf‖_{p),λ)} ≤ C₀ F ‖f‖_{p),λ)}",
            CzCommutatorGrand => "‖[b,T]f‖_{p),λ)} ≤ C₀ F ‖b‖_BMO ‖f‖_{p),λ)}",
            PotentialCommutatorGrand => "‖M([b,I^α]f)‖_{q),λ)}_{ψ,A₂} ≤ C₀ F ‖b‖_BMO ‖f‖_{p),λ)}_{θ₁,A₁}",
        }
    }
}

/// One frozen constant together with what produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub constant: f64,
    pub max_ratio: f64,
    pub unit: f64,
    pub offset: f64,
}

/// A set of frozen constants for one space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub space: String,
    pub seed: u64,
    pub samples: usize,
    pub constants: BTreeMap<String, CalibrationEntry>,
}

impl Calibration {
    /// The constants shipped with the crate, measured on the 256-point circle.
    pub fn frozen() -> Result<Self, VerifyError> {
        Ok(serde_json::from_str(FROZEN_CIRCLE_256)?)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, VerifyError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> Result<String, VerifyError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The bound for one check on one space: `ratio ≤ C·unit + offset`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    unit: f64,
    offset: f64,
}

fn affine(f: ConstantFormula) -> Result<Shape, VerifyError> {
    let (unit, offset) = f.affine()?;
    Ok(Shape { unit, offset })
}

/// `φ_out(σ)^{-1/(q−σ)} · max_{ε<σ} g(ε)` for a grand-norm transfer of the
/// per-exponent bound `g`, with `σ = s_max/2` of the output norm.
fn structural(out: &GrandParams, g: impl Fn(f64) -> Result<f64, VerifyError>) -> Result<Shape, VerifyError> {
    let sigma = out.s_max / 2.0;
    let mut sup = 0.0f64;
    for &e in out.grid.points().iter().filter(|&&e| e < sigma) {
        sup = sup.max(g(e)?);
    }
    Ok(Shape {
        unit: sup / out.eps_weight(sigma),
        offset: 0.0,
    })
}

fn unit_value(f: ConstantFormula) -> Result<f64, VerifyError> {
    f.value(1.0)
}

/// Everything the checks share on one space and corpus.
struct Bench<'s> {
    space: &'s DiscreteHomSpace,
    kernel: &'s KernelSpec,
    params: CalibratedParams,
    b: f64,
    fs: Vec<GridFunction<'s>>,
    bs: Vec<GridFunction<'s>>,
    bmo: Vec<f64>,
    f_info: CorpusInfo,
}

impl<'s> Bench<'s> {
    fn new(
        space: &'s DiscreteHomSpace,
        kernel: &'s KernelSpec,
        params: CalibratedParams,
        seed: u64,
        samples: usize,
    ) -> Result<Self, VerifyError> {
        let fspec = CorpusSpec::new(Family::Mixed, samples, seed);
        let fs = fspec.generate(space);
        let bs = CorpusSpec::new(Family::Bmo, samples, seed).generate(space);
        let bmo = bs
            .iter()
            .map(|b| bmo_norm(b, BmoVariant::Mean))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            space,
            kernel,
            params,
            b: doubling_constant(space),
            fs,
            bs,
            bmo,
            f_info: CorpusInfo::from(&fspec),
        })
    }

    fn grand(&self, p: f64, slope: f64) -> Result<GrandParams, VerifyError> {
        Ok(GrandParams::new(
            p,
            self.params.lambda,
            Profile::power(self.params.theta),
            Profile::linear(slope),
            &GridSpec::default(),
        )?)
    }

    fn cz(&self) -> Result<CzOperator<'s>, VerifyError> {
        Ok(CzOperator::new(self.space, self.kernel.clone())?)
    }

    /// Ratios `‖Uf‖_out / ‖f‖_in` over the function corpus.
    fn op_ratios(&self, op: &dyn Operator, norm_in: &NormEval, norm_out: &NormEval) -> Result<Vec<Option<f64>>, VerifyError> {
        sample_ratios(self.fs.len(), |i| {
            let den = norm_in.eval(&self.fs[i])?;
            if den == 0.0 {
                return Ok(None);
            }
            Ok(Some(norm_out.eval(&op.apply(&self.fs[i])?)? / den))
        })
    }

    /// Ratios `‖V_b f‖_out / (‖b‖_BMO ‖f‖_in)` where `V_b` is built per multiplier.
    fn commutator_ratios<F>(&self, norm_in: &NormEval, norm_out: &NormEval, apply: F) -> Result<Vec<Option<f64>>, VerifyError>
    where
        F: Fn(&GridFunction<'s>, &GridFunction<'s>) -> Result<GridFunction<'s>, VerifyError> + Sync + Send,
    {
        sample_ratios(self.fs.len(), |i| {
            let den = self.bmo[i] * norm_in.eval(&self.fs[i])?;
            if den == 0.0 {
                return Ok(None);
            }
            Ok(Some(norm_out.eval(&apply(&self.bs[i], &self.fs[i])?)? / den))
        })
    }

    fn potential_exponents(&self) -> Result<AuxExponents, VerifyError> {
        let CalibratedParams {
            p,
            lambda,
            alpha,
            theta,
            a2_slope,
            ..
        } = self.params;
        let theta2 = AuxExponents::minimal_theta2(p, alpha, lambda, theta);
        let q = 1.0 / (1.0 / p - alpha / (1.0 - lambda));
        AuxExponents::new(p, alpha, lambda, Profile::linear(a2_slope), theta, theta2, q - 1.0)
    }

    fn measure(&self, check: CalibratedCheck) -> Result<(Vec<Option<f64>>, Shape), VerifyError> {
        use CalibratedCheck::*;
        let CalibratedParams { p, lambda, s, .. } = self.params;
        let b = self.b;
        let morrey = |p: f64| NormSpec::Morrey { p, lambda }.evaluator(self.space);
        match check {
            MaximalMorrey => Ok((
                self.op_ratios(&Maximal, &morrey(p), &morrey(p))?,
                affine(ConstantFormula::MaximalMorrey { p, lambda, b })?,
            )),
            MaximalSMorrey => Ok((
                self.op_ratios(&MaximalS::new(s)?, &morrey(p), &morrey(p))?,
                affine(ConstantFormula::MaximalSMorrey { p, lambda, s, b })?,
            )),
            CzMorreyLow | CzMorreyHigh => {
                let p = if check == CzMorreyLow {
                    self.params.cz_low_p
                } else {
                    self.params.cz_high_p
                };
                Ok((
                    self.op_ratios(&self.cz()?, &morrey(p), &morrey(p))?,
                    affine(ConstantFormula::CzMorrey { p, lambda })?,
                ))
            }
            MaximalCommutatorPotential => {
                let exps = self.potential_exponents()?;
                let pot = Potential::new(self.space, exps.alpha)?;
                let ratios = self.commutator_ratios(&morrey(p), &morrey(exps.q), |b, f| {
                    Ok(maximal(&Commutator::new(b, &pot)?.apply(f)?))
                })?;
                let formula = ConstantFormula::MaximalCommutatorPotential {
                    p,
                    q: exps.q,
                    alpha: exps.alpha,
                    lambda,
                    s,
                    b,
                };
                Ok((ratios, affine(formula)?))
            }
            MaximalGrand | CzGrand => {
                let gp = if check == MaximalGrand { p } else { self.params.cz_high_p };
                let params = self.grand(gp, self.params.a_slope)?;
                let ev = GrandEvaluator::new(self.space, &params);
                let norm = NormEval::Grand(ev);
                let shape = structural(&params, |e| {
                    let (pe, le) = (gp - e, params.shifted_lambda(e));
                    if check == MaximalGrand {
                        unit_value(ConstantFormula::MaximalMorrey { p: pe, lambda: le, b })
                    } else {
                        unit_value(ConstantFormula::CzMorrey { p: pe, lambda: le })
                    }
                })?;
                let ratios = if check == MaximalGrand {
                    self.op_ratios(&Maximal, &norm, &norm)?
                } else {
                    self.op_ratios(&self.cz()?, &norm, &norm)?
                };
                Ok((ratios, shape))
            }
            CzCommutatorGrand => {
                let gp = self.params.cz_high_p;
                let params = self.grand(gp, self.params.a_slope)?;
                let norm = NormEval::Grand(GrandEvaluator::new(self.space, &params));
                let shape = structural(&params, |e| {
                    let (pe, le) = (gp - e, params.shifted_lambda(e));
                    let fs = unit_value(ConstantFormula::FeffermanStein { p: pe, lambda: le, b })?;
                    let ms = unit_value(ConstantFormula::MaximalSMorrey { p: pe, lambda: le, s, b })?;
                    let cz = unit_value(ConstantFormula::CzMorrey { p: pe, lambda: le })?;
                    Ok(fs * ms * (cz + 1.0))
                })?;
                let t = self.cz()?;
                let ratios = self.commutator_ratios(&norm, &norm, |b, f| Ok(Commutator::new(b, &t)?.apply(f)?))?;
                Ok((ratios, shape))
            }
            PotentialCommutatorGrand => {
                let exps = self.potential_exponents()?;
                let (input, output) = potential_grand_pair(&exps)?;
                let shape = structural(&output, |e| {
                    unit_value(ConstantFormula::MaximalCommutatorPotential {
                        p: exps.p - exps.phibar(e)?,
                        q: exps.q - e,
                        alpha: exps.alpha,
                        lambda: output.shifted_lambda(e),
                        s,
                        b,
                    })
                })?;
                let pot = Potential::new(self.space, exps.alpha)?;
                let nin = NormEval::Grand(GrandEvaluator::new(self.space, &input));
                let nout = NormEval::Grand(GrandEvaluator::new(self.space, &output));
                let ratios = self.commutator_ratios(&nin, &nout, |b, f| {
                    Ok(maximal(&Commutator::new(b, &pot)?.apply(f)?))
                })?;
                Ok((ratios, shape))
            }
        }
    }
}

/// Input and output grand norms for the potential commutator: `p` with
/// weight `ε^{θ₁}` and shift `A₁`, and `q` with weight `ψ` and shift `A₂`.
/// `ψ` is tabulated on the output grid and at `s_max`.
pub fn potential_grand_pair(exps: &AuxExponents) -> Result<(GrandParams, GrandParams), VerifyError> {
    let input = GrandParams::new(
        exps.p,
        exps.lambda,
        Profile::power(exps.theta1),
        exps.a1.clone(),
        &GridSpec::default(),
    )?;
    let skeleton = GrandParams::new(exps.q, exps.lambda, Profile::power(1.0), exps.a2.clone(), &GridSpec::default())?;
    let top = skeleton.s_max.min(exps.delta);
    let mut xs: Vec<f64> = skeleton.grid.points().iter().copied().filter(|&e| e < top).collect();
    xs.push(top);
    xs.sort_by(f64::total_cmp);
    let output = GrandParams {
        phi: exps.psi_profile(&xs)?,
        ..skeleton
    }
    .with_grid(crate::funcnorm::EpsGrid::explicit(xs[..xs.len() - 1].to_vec())?)?;
    Ok((input, output))
}

/// Measures every calibrated check on `space` and returns the smallest
/// covering constants.
pub fn calibrate(
    space: &DiscreteHomSpace,
    label: &str,
    kernel: &KernelSpec,
    params: CalibratedParams,
    seed: u64,
    samples: usize,
) -> Result<Calibration, VerifyError> {
    let bench = Bench::new(space, kernel, params, seed, samples)?;
    let mut constants = BTreeMap::new();
    for &check in calibrated_checks() {
        let (ratios, shape) = bench.measure(check)?;
        let (max_ratio, _) =
            max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate(check.key().into()))?;
        let constant = ((max_ratio - shape.offset) / shape.unit).max(0.0);
        constants.insert(
            check.key().to_string(),
            CalibrationEntry {
                constant,
                max_ratio,
                unit: shape.unit,
                offset: shape.offset,
            },
        );
    }
    Ok(Calibration {
        space: label.to_string(),
        seed,
        samples,
        constants,
    })
}

/// Re-checks `checks` on a fresh corpus against `headroom × (C·unit + offset)`.
#[allow(clippy::too_many_arguments)]
pub fn run_calibrated(
    space: &DiscreteHomSpace,
    label: &str,
    kernel: &KernelSpec,
    params: CalibratedParams,
    calibration: &Calibration,
    checks: &[CalibratedCheck],
    seed: u64,
    samples: usize,
    headroom: f64,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let bench = Bench::new(space, kernel, params, seed, samples)?;
    let mut reports = Vec::new();
    for &check in checks {
        let entry = calibration
            .constants
            .get(check.key())
            .ok_or_else(|| VerifyError::Calibration(format!("no frozen constant for {}", check.key())))?;
        let (ratios, shape) = bench.measure(check)?;
        let best = max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate(check.key().into()))?;
        let bound = entry.constant * shape.unit + shape.offset;
        let mut r = VerificationReport::new(format!("calibrated:{}", check.key()), check.anchor())
            .with_corpus(Some(bench.f_info.clone()))
            .value("max_ratio", best.0)
            .value("constant", entry.constant)
            .value("unit", shape.unit)
            .value("offset", shape.offset)
            .value("headroom", headroom)
            .value("doubling_b", bench.b)
            .worst(Some(best));
        r.theoretical = Some(bound);
        if calibration.space != label {
            r.note(format!("constants calibrated on {}, applied to {label}", calibration.space));
        }
        if seed == calibration.seed {
            r.note("corpus seed equals the calibration seed; this is not a fresh corpus");
        }
        let ok = best.0.is_finite() && best.0 <= headroom * bound;
        reports.push(r.verdict(ok));
    }
    Ok(reports)
}
