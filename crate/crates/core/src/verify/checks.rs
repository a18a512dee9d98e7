use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aux::AuxExponents;
use super::constants::ConstantFormula;
use super::report::{CorpusInfo, VerificationReport};
use super::VerifyError;
use crate::funcnorm::{
    bmo_norm, grand_lebesgue_norm, lp_norm, morrey_norm, BmoVariant, EpsGrid, GrandEvaluator, GrandParams,
    GridFunction,
};
use crate::homspace::DiscreteHomSpace;
use crate::operators::{maximal, maximal_s, sharp_maximal, Commutator, Operator, Potential};

/// A norm to measure inputs or outputs with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormSpec {
    Lp { p: f64 },
    Morrey { p: f64, lambda: f64 },
    Grand { params: GrandParams },
    Bmo { variant: BmoVariant },
}

impl NormSpec {
    pub fn evaluator<'s>(&self, space: &'s DiscreteHomSpace) -> NormEval<'s> {
        match self {
            NormSpec::Grand { params } => NormEval::Grand(GrandEvaluator::new(space, params)),
            other => NormEval::Plain(other.clone()),
        }
    }
}

/// A [`NormSpec`] with any per-space precomputation done.
#[derive(Debug)]
pub enum NormEval<'s> {
    Plain(NormSpec),
    Grand(GrandEvaluator<'s>),
}

impl NormEval<'_> {
    pub fn eval(&self, f: &GridFunction) -> Result<f64, VerifyError> {
        Ok(match self {
            NormEval::Plain(NormSpec::Lp { p }) => lp_norm(f, *p)?,
            NormEval::Plain(NormSpec::Morrey { p, lambda }) => morrey_norm(f, *p, *lambda)?,
            NormEval::Plain(NormSpec::Bmo { variant }) => bmo_norm(f, *variant)?,
            NormEval::Plain(NormSpec::Grand { .. }) => unreachable!("grand norms use an evaluator"),
            NormEval::Grand(ev) => ev.norm(f)?.value,
        })
    }
}

/// A constant formula with its calibrated constant and the allowed headroom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaBound {
    pub formula: ConstantFormula,
    pub constant: f64,
    pub headroom: f64,
}

impl FormulaBound {
    pub fn limit(&self) -> Result<f64, VerifyError> {
        Ok(self.headroom * self.formula.value(self.constant)?)
    }
}

/// Per-sample ratios in sample order; `None` marks an excluded sample.
pub fn sample_ratios<F>(n: usize, f: F) -> Result<Vec<Option<f64>>, VerifyError>
where
    F: Fn(usize) -> Result<Option<f64>, VerifyError> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// First maximum and its index.
pub(crate) fn max_with_index(values: &[Option<f64>]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(b, _)| v > b || (v.is_nan() && !b.is_nan())) {
                best = Some((v, i));
            }
        }
    }
    best
}

/// Maximum over the first half of the samples versus all of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub half: f64,
    pub full: f64,
    pub relative_change: f64,
}

pub fn stability(values: &[Option<f64>]) -> Option<Stability> {
    let (full, _) = max_with_index(values)?;
    let (half, _) = max_with_index(&values[..values.len() / 2])?;
    let relative_change = if half == full {
        0.0
    } else {
        (full - half).abs() / half.abs()
    };
    Some(Stability {
        half,
        full,
        relative_change,
    })
}

fn record_stability(report: &mut VerificationReport, st: &Option<Stability>) -> bool {
    match st {
        Some(s) => {
            report.set("half_corpus_max", s.half);
            report.set("relative_change", s.relative_change);
            true
        }
        None => {
            report.note("stability undefined: no admissible sample in the first half");
            false
        }
    }
}

/// `max_f ‖Uf‖_out / ‖f‖_in`, optionally against a calibrated formula.
pub fn operator_norm_ratio(
    op: &dyn Operator,
    norm_in: &NormSpec,
    norm_out: &NormSpec,
    corpus: &[GridFunction],
    info: Option<CorpusInfo>,
    bound: Option<FormulaBound>,
) -> Result<VerificationReport, VerifyError> {
    let name = format!("operator_norm_ratio:{}", op.name());
    let Some(space) = corpus.first().map(|f| f.space()) else {
        return Err(VerifyError::AllSamplesDegenerate(name));
    };
    let ein = norm_in.evaluator(space);
    let eout = norm_out.evaluator(space);
    let ratios = sample_ratios(corpus.len(), |i| {
        let f = &corpus[i];
        let den = ein.eval(f)?;
        if den == 0.0 {
            return Ok(None);
        }
        Ok(Some(eout.eval(&op.apply(f)?)? / den))
    })?;
    let best = max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate(name.clone()))?;
    let mut report = VerificationReport::new(name, "‖Uf‖_out ≤ C ‖f‖_in")
        .with_corpus(info)
        .value("max_ratio", best.0)
        .worst(Some(best));
    let mut ok = best.0.is_finite();
    if let Some(b) = bound {
        let limit = b.limit()?;
        report.theoretical = Some(b.formula.value(b.constant)?);
        report.set("headroom", b.headroom);
        report.set("constant", b.constant);
        ok &= best.0 <= limit;
    }
    Ok(report.verdict(ok))
}

fn sorted_levels(levels: &[f64], s_max: f64) -> Result<Vec<f64>, VerifyError> {
    let mut v = levels.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    if v.len() < 2 || v.iter().any(|&l| !(l > 0.0 && l < s_max)) {
        return Err(VerifyError::OutOfRange(format!(
            "need at least two distinct levels in (0, s_max = {s_max})"
        )));
    }
    Ok(v)
}

/// `C = max Φ(f,s)·φ(σ)^{1/(p−σ)} / Φ(f,σ)` over samples and level pairs
/// `σ < s`; `corpus` should be a doubled corpus, whose first half is the
/// reference for the stability test.
pub fn dominance_check(
    params: &GrandParams,
    levels: &[f64],
    corpus: &[GridFunction],
    info: Option<CorpusInfo>,
    tolerance: f64,
) -> Result<VerificationReport, VerifyError> {
    let levels = sorted_levels(levels, params.s_max)?;
    let space = corpus
        .first()
        .ok_or_else(|| VerifyError::AllSamplesDegenerate("dominance".into()))?
        .space();
    let ev = GrandEvaluator::new(space, params);
    let weights: Vec<f64> = levels.iter().map(|&s| params.eps_weight(s)).collect();
    let ratios = sample_ratios(corpus.len(), |i| {
        let phi = ev.phi_levels(&corpus[i], &levels)?;
        let mut best: Option<f64> = None;
        for a in 0..levels.len() {
            if phi[a] == 0.0 {
                continue;
            }
            for b in a + 1..levels.len() {
                let r = phi[b] * weights[a] / phi[a];
                best = Some(best.map_or(r, |x: f64| x.max(r)));
            }
        }
        Ok(best)
    })?;
    let best = max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate("dominance".into()))?;
    let st = stability(&ratios);
    let mut report = VerificationReport::new("dominance", "Φ(f,s) ≤ C φ(σ)^{-1/(p−σ)} Φ(f,σ) for σ < s < s_max")
        .with_corpus(info)
        .value("c_emp", best.0)
        .value("tolerance", tolerance)
        .worst(Some(best));
    let ok = record_stability(&mut report, &st)
        && best.0.is_finite()
        && st.is_some_and(|s| s.relative_change <= tolerance);
    Ok(report.verdict(ok))
}

/// Restricts `params` to the union of both grids.
fn on_merged(params: &GrandParams, merged: &EpsGrid) -> Result<GrandParams, VerifyError> {
    let pts: Vec<f64> = merged
        .points()
        .iter()
        .copied()
        .filter(|&e| e <= params.s_max)
        .collect();
    Ok(params.with_grid(EpsGrid::explicit(pts)?)?)
}

/// Transfers per-exponent Morrey bounds `‖Uf‖_{q−ε} ≤ C(ε)‖Λf‖_{p−ε}` to the
/// grand norms and checks the resulting constant
/// `C₀ · ψ(σ)^{-1/(q−σ)} · sup ψ^{1/(q−ε)}/φ^{1/(p−ε)} · sup C(ε)`.
///
/// `C(ε)` and the dominance constant `C₀` are measured on the same corpus, so
/// a violation means the evaluation is inconsistent, not that a constant was
/// underestimated.
#[allow(clippy::too_many_arguments)]
pub fn reduction_transfer_check(
    u: &dyn Operator,
    lambda_op: &dyn Operator,
    input: &GrandParams,
    output: &GrandParams,
    sigma: f64,
    corpus: &[GridFunction],
    info: Option<CorpusInfo>,
    slack: f64,
) -> Result<VerificationReport, VerifyError> {
    let top = input.s_max.min(output.s_max);
    if !(sigma > 0.0 && sigma < top) {
        return Err(VerifyError::OutOfRange(format!("σ = {sigma} outside (0, {top})")));
    }
    let space = corpus
        .first()
        .ok_or_else(|| VerifyError::AllSamplesDegenerate("reduction".into()))?
        .space();
    let merged = input.grid.merged(&output.grid);
    let pin = on_merged(input, &merged)?;
    let pout = on_merged(output, &merged)?;
    let ein = GrandEvaluator::new(space, &pin);
    let eout = GrandEvaluator::new(space, &pout);
    let k_sigma = pin.grid.count_below(sigma);
    debug_assert_eq!(k_sigma, pout.grid.count_below(sigma));
    if k_sigma == 0 {
        return Err(VerifyError::Norm(crate::funcnorm::NormError::EmptyGrid(sigma)));
    }
    let k_in = pin.grid.count_below(pin.s_max);
    let k_out = pout.grid.count_below(pout.s_max);
    let win = ein.eps_weights();
    let wout = eout.eps_weights();

    struct Sample {
        per_eps: Vec<f64>,
        ratio: Option<f64>,
        c0: Option<f64>,
    }
    let samples: Vec<Sample> = (0..corpus.len())
        .into_par_iter()
        .map(|i| -> Result<Sample, VerifyError> {
            let f = &corpus[i];
            let uf = u.apply(f)?;
            let lf = lambda_op.apply(f)?;
            let mu = eout.per_eps(&uf);
            let ml = ein.per_eps(&lf);
            let per_eps = (0..k_sigma)
                .map(|k| match (mu[k], ml[k]) {
                    (0.0, _) => 0.0,
                    (_, 0.0) => f64::INFINITY,
                    (a, b) => a / b,
                })
                .collect();
            let wmax = |w: &[f64], m: &[f64], k: usize| (0..k).map(|j| w[j] * m[j]).fold(0.0, f64::max);
            let out_norm = wmax(wout, &mu, k_out);
            let in_norm = wmax(win, &ml, k_in);
            let out_sigma = wmax(wout, &mu, k_sigma);
            Ok(Sample {
                per_eps,
                ratio: (in_norm > 0.0).then(|| out_norm / in_norm),
                c0: (out_sigma > 0.0).then(|| out_norm * pout.eps_weight(sigma) / out_sigma),
            })
        })
        .collect::<Result<_, _>>()?;

    let c_eps: Vec<f64> = (0..k_sigma)
        .map(|k| samples.iter().map(|s| s.per_eps[k]).fold(0.0, f64::max))
        .collect();
    let (c_sup, c_arg) = c_eps
        .iter()
        .enumerate()
        .fold((0.0, 0), |(b, bi), (k, &v)| if v > b { (v, k) } else { (b, bi) });
    let weight_ratio = (0..k_sigma).map(|k| wout[k] / win[k]).fold(0.0, f64::max);
    let ratios: Vec<Option<f64>> = samples.iter().map(|s| s.ratio).collect();
    let c0s: Vec<Option<f64>> = samples.iter().map(|s| s.c0).collect();
    let best = max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate("reduction".into()))?;
    let c0 = max_with_index(&c0s).map_or(0.0, |(v, _)| v);
    let bound = c0 / pout.eps_weight(sigma) * weight_ratio * c_sup;

    let name = format!("reduction_transfer:{}/{}", u.name(), lambda_op.name());
    let mut report = VerificationReport::new(
        name,
        "‖Uf‖_{q),λ)} ≤ C₀ ψ(σ)^{-1/(q−σ)} sup_ε ψ^{1/(q−ε)}/φ^{1/(p−ε)} sup_ε C(ε) ‖Λf‖_{p),λ)}",
    )
    .with_corpus(info)
    .value("sigma", sigma)
    .value("c_sup", c_sup)
    .value("weight_ratio_sup", weight_ratio)
    .value("c0", c0)
    .value("max_ratio", best.0)
    .value("input_weight_factor", 1.0 / pin.eps_weight(sigma))
    .worst(Some(best));
    report.theoretical = Some(bound);
    report.note(format!(
        "sup C(ε) attained at ε = {:e}; grids merged to {} points",
        pin.grid.points()[c_arg],
        merged.len()
    ));
    let mut ok = true;
    if !c_sup.is_finite() {
        report.note("per-exponent bound hypothesis fails: some ‖Λf‖ vanishes where ‖Uf‖ does not");
        ok = false;
    }
    if !weight_ratio.is_finite() {
        report.note("weight-ratio hypothesis fails");
        ok = false;
    }
    ok &= best.0 <= bound * (1.0 + slack);
    Ok(report.verdict(ok))
}

/// Ordering of grand Lebesgue norms against `L^p` and `L^{p−ε}`.
///
/// For `p ≤ 2` (so the grid lies in `(0,1)`) asserts
/// `‖f‖_{p),θ₂} ≤ ‖f‖_{p),θ₁} ≤ max(1, μX)‖f‖_p` per sample; for `p > 2`
/// only reports the constants. Always reports `max ‖f‖_{p−ε} / ‖f‖_{p),θ₂}`.
#[allow(clippy::too_many_arguments)]
pub fn embedding_chain_check(
    p: f64,
    theta1: f64,
    theta2: f64,
    eps: f64,
    grid: &EpsGrid,
    corpus: &[GridFunction],
    info: Option<CorpusInfo>,
    slack: f64,
) -> Result<VerificationReport, VerifyError> {
    if !(theta1 > 0.0 && theta1 <= theta2) {
        return Err(VerifyError::OutOfRange("need 0 < θ₁ ≤ θ₂".into()));
    }
    if !(eps > 0.0 && eps < p - 1.0) {
        return Err(VerifyError::OutOfRange(format!("ε = {eps} outside (0, p − 1)")));
    }
    let Some(space) = corpus.first().map(|f| f.space()) else {
        return Err(VerifyError::AllSamplesDegenerate("embedding_chain".into()));
    };
    let scale = space.total_measure().max(1.0);
    let rows = (0..corpus.len())
        .into_par_iter()
        .map(|i| -> Result<[f64; 4], VerifyError> {
            let f = &corpus[i];
            Ok([
                lp_norm(f, p)?,
                grand_lebesgue_norm(f, p, theta1, grid)?,
                grand_lebesgue_norm(f, p, theta2, grid)?,
                lp_norm(f, p - eps)?,
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ratio = |num: usize, den: usize| -> Vec<Option<f64>> {
        rows.iter()
            .map(|r| (r[den] > 0.0).then(|| r[num] / r[den]))
            .collect()
    };
    let tail = max_with_index(&ratio(3, 2));
    let g1_lp = max_with_index(&ratio(1, 0));
    let g2_g1 = max_with_index(&ratio(2, 1));
    let mut report = VerificationReport::new(
        "embedding_chain",
        "‖f‖_{p),θ₂} ≤ ‖f‖_{p),θ₁} ≤ max(1,μX)‖f‖_p and ‖f‖_{p−ε} ≤ C‖f‖_{p),θ₂}",
    )
    .with_corpus(info)
    .value("c_tail", tail.map_or(0.0, |t| t.0))
    .value("c_grand1_over_lp", g1_lp.map_or(0.0, |t| t.0))
    .value("c_grand2_over_grand1", g2_g1.map_or(0.0, |t| t.0))
    .worst(tail);
    if p > 2.0 {
        report.note("p > 2: embedding constants reported, ordering not asserted");
        return Ok(report.verdict(tail.is_none_or(|t| t.0.is_finite())));
    }
    let mut violations = 0usize;
    let mut first = None;
    for (i, r) in rows.iter().enumerate() {
        let ordered = r[2] <= r[1] && r[1] <= scale * r[0] * (1.0 + slack);
        if !ordered {
            violations += 1;
            first.get_or_insert(i);
        }
    }
    report.set("violations", violations as f64);
    if let Some(i) = first {
        report.note(format!("first violation at sample {i}"));
    }
    let ok = violations == 0 && tail.is_none_or(|t| t.0.is_finite());
    Ok(report.verdict(ok))
}

/// `max ‖Mf‖_{p,λ} / ‖f♯‖_{p,λ}` over mean-zero samples, with stability
/// under corpus doubling.
pub fn fefferman_stein_check(
    p: f64,
    lambda: f64,
    corpus: &[GridFunction],
    info: Option<CorpusInfo>,
    bound: Option<FormulaBound>,
    tolerance: f64,
) -> Result<VerificationReport, VerifyError> {
    let ratios = sample_ratios(corpus.len(), |i| {
        let f = &corpus[i];
        if f.mean().abs() > 1e-12 * f.max_abs().max(f64::MIN_POSITIVE) {
            return Ok(None);
        }
        let den = morrey_norm(&sharp_maximal(f), p, lambda)?;
        if den == 0.0 {
            return Ok(None);
        }
        Ok(Some(morrey_norm(&maximal(f), p, lambda)? / den))
    })?;
    let excluded = ratios.iter().filter(|r| r.is_none()).count();
    let best = max_with_index(&ratios).ok_or_else(|| VerifyError::AllSamplesDegenerate("fefferman_stein".into()))?;
    let st = stability(&ratios);
    let mut report = VerificationReport::new("fefferman_stein", "‖Mf‖_{p,λ} ≤ C(b^{λ/p}+1)‖f♯‖_{p,λ} for mean-zero f")
        .with_corpus(info)
        .value("c_emp", best.0)
        .value("excluded", excluded as f64)
        .value("tolerance", tolerance)
        .worst(Some(best));
    if excluded > 0 {
        report.note(format!(
            "{excluded} samples excluded: nonzero mean or vanishing sharp function"
        ));
    }
    let mut ok = record_stability(&mut report, &st)
        && best.0.is_finite()
        && st.is_some_and(|s| s.relative_change <= tolerance);
    if let Some(b) = bound {
        report.theoretical = Some(b.formula.value(b.constant)?);
        ok &= best.0 <= b.limit()?;
    }
    Ok(report.verdict(ok))
}

/// Singular-integral commutator checks: the pointwise sharp-function bound
/// and the grand-norm ratio.
///
/// Sample `i` pairs `bs[i]` with `fs[i]`; both corpora should be doubled.
#[allow(clippy::too_many_arguments)]
pub fn commutator_cz(
    t: &dyn Operator,
    params: &GrandParams,
    s: f64,
    bs: &[GridFunction],
    fs: &[GridFunction],
    info: Option<CorpusInfo>,
    tolerance: f64,
) -> Result<Vec<VerificationReport>, VerifyError> {
    if bs.len() != fs.len() || fs.is_empty() {
        return Err(VerifyError::OutOfRange("need equally many multipliers and functions".into()));
    }
    let ev = GrandEvaluator::new(fs[0].space(), params);
    let rows = (0..fs.len())
        .into_par_iter()
        .map(|i| -> Result<(Option<f64>, Option<f64>), VerifyError> {
            let (b, f) = (&bs[i], &fs[i]);
            let bmo = bmo_norm(b, BmoVariant::Mean)?;
            let g = Commutator::new(b, t)?.apply(f)?;
            let sharp = sharp_maximal(&g);
            let tf = t.apply(f)?;
            let ms_tf = maximal_s(&tf, s)?;
            let ms_f = maximal_s(f, s)?;
            let mut point: Option<f64> = None;
            for x in 0..f.len() {
                let den = bmo * (ms_tf.values()[x] + ms_f.values()[x]);
                if den > 0.0 {
                    let r = sharp.values()[x] / den;
                    point = Some(point.map_or(r, |p: f64| p.max(r)));
                }
            }
            let den = bmo * ev.norm(f)?.value;
            let grand = (den > 0.0).then(|| -> Result<f64, VerifyError> { Ok(ev.norm(&g)?.value / den) });
            Ok((point, grand.transpose()?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let point: Vec<Option<f64>> = rows.iter().map(|r| r.0).collect();
    let grand: Vec<Option<f64>> = rows.iter().map(|r| r.1).collect();
    let mut out = Vec::new();
    for (name, anchor, vals) in [
        (
            "commutator_cz:pointwise",
            "([b,T]f)♯(x) ≤ C ‖b‖_BMO (M_s(Tf)(x) + M_s f(x))",
            point,
        ),
        (
            "commutator_cz:grand",
            "‖[b,T]f‖_{p),λ)} ≤ C ‖b‖_BMO ‖f‖_{p),λ)}",
            grand,
        ),
    ] {
        let best = max_with_index(&vals).ok_or_else(|| VerifyError::AllSamplesDegenerate(name.into()))?;
        let st = stability(&vals);
        let mut r = VerificationReport::new(name, anchor)
            .with_corpus(info.clone())
            .value("c_emp", best.0)
            .value("tolerance", tolerance)
            .value("s", s)
            .worst(Some(best));
        let ok = record_stability(&mut r, &st)
            && best.0.is_finite()
            && st.is_some_and(|s| s.relative_change <= tolerance);
        out.push(r.verdict(ok));
    }
    Ok(out)
}

/// Potential commutator checks: the Morrey bound for `M∘[b, I^α]`, the
/// grand-norm bound between the paired exponent families, and the pointwise
/// domination `|g| ≤ Mg` for `g = [b, I^α]f`.
#[allow(clippy::too_many_arguments)]
pub fn commutator_potential(
    exps: &AuxExponents,
    input: &GrandParams,
    output: &GrandParams,
    bs: &[GridFunction],
    fs: &[GridFunction],
    info: Option<CorpusInfo>,
    morrey_bound: Option<FormulaBound>,
    tolerance: f64,
) -> Result<Vec<VerificationReport>, VerifyError> {
    if bs.len() != fs.len() || fs.is_empty() {
        return Err(VerifyError::OutOfRange("need equally many multipliers and functions".into()));
    }
    let space = fs[0].space();
    let pot = Potential::new(space, exps.alpha)?;
    let ein = GrandEvaluator::new(space, input);
    let eout = GrandEvaluator::new(space, output);
    let rows = (0..fs.len())
        .into_par_iter()
        .map(|i| -> Result<(Option<f64>, Option<f64>, f64), VerifyError> {
            let (b, f) = (&bs[i], &fs[i]);
            let bmo = bmo_norm(b, BmoVariant::Mean)?;
            let g = Commutator::new(b, &pot)?.apply(f)?;
            let mg = maximal(&g);
            let excess = g
                .values()
                .iter()
                .zip(mg.values())
                .map(|(a, m)| a.abs() - m)
                .fold(f64::NEG_INFINITY, f64::max);
            let den = bmo * morrey_norm(f, exps.p, exps.lambda)?;
            let morrey = if den > 0.0 {
                Some(morrey_norm(&mg, exps.q, exps.lambda)? / den)
            } else {
                None
            };
            let den = bmo * ein.norm(f)?.value;
            let grand = if den > 0.0 {
                Some(eout.norm(&mg)?.value / den)
            } else {
                None
            };
            Ok((morrey, grand, excess))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let morrey: Vec<Option<f64>> = rows.iter().map(|r| r.0).collect();
    let grand: Vec<Option<f64>> = rows.iter().map(|r| r.1).collect();
    let mut out = Vec::new();
    for (name, anchor, vals, bound) in [
        (
            "commutator_potential:morrey",
            "‖M([b,I^α]f)‖_{q,λ} ≤ C_{p,q,α,λ} ‖b‖_BMO ‖f‖_{p,λ}",
            morrey,
            morrey_bound,
        ),
        (
            "commutator_potential:grand",
            "‖M([b,I^α]f)‖_{q),λ)}_{ψ,A₂} ≤ C ‖b‖_BMO ‖f‖_{p),λ)}_{θ₁,A₁}",
            grand,
            None,
        ),
    ] {
        let best = max_with_index(&vals).ok_or_else(|| VerifyError::AllSamplesDegenerate(name.into()))?;
        let st = stability(&vals);
        let mut r = VerificationReport::new(name, anchor)
            .with_corpus(info.clone())
            .value("c_emp", best.0)
            .value("tolerance", tolerance)
            .worst(Some(best));
        let mut ok = record_stability(&mut r, &st)
            && best.0.is_finite()
            && st.is_some_and(|s| s.relative_change <= tolerance);
        if let Some(b) = bound {
            r.theoretical = Some(b.formula.value(b.constant)?);
            r.set("headroom", b.headroom);
            ok &= best.0 <= b.limit()?;
        }
        out.push(r.verdict(ok));
    }
    let excess = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let worst = rows
        .iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |(b, bi), (i, r)| if r.2 > b { (r.2, i) } else { (b, bi) });
    out.push(
        VerificationReport::new("commutator_potential:domination", "|[b,I^α]f(x)| ≤ M([b,I^α]f)(x)")
            .with_corpus(info)
            .value("max_excess", excess)
            .worst(Some(worst))
            .verdict(excess <= 0.0),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcnorm::Profile;
    use crate::homspace::Geometry;
    use crate::operators::{Identity, Maximal};
    use crate::verify::corpus::{CorpusSpec, Family};

    fn circle(n: usize) -> DiscreteHomSpace {
        DiscreteHomSpace::uniform_grid(n, 1, Geometry::Circle).unwrap()
    }

    #[test]
    fn identity_ratio_is_one() {
        let s = circle(16);
        let fs = CorpusSpec::new(Family::Mixed, 12, 1).generate(&s);
        let n = NormSpec::Morrey { p: 2.0, lambda: 0.25 };
        let r = operator_norm_ratio(&Identity, &n, &n, &fs, None, None).unwrap();
        assert!((r.empirical["max_ratio"] - 1.0).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn degenerate_corpus_is_an_error() {
        let s = circle(8);
        let fs = vec![GridFunction::zeros(&s)];
        let n = NormSpec::Lp { p: 2.0 };
        assert!(matches!(
            operator_norm_ratio(&Identity, &n, &n, &fs, None, None),
            Err(VerifyError::AllSamplesDegenerate(_))
        ));
    }

    #[test]
    fn dominance_is_scale_invariant() {
        let s = circle(16);
        let params = GrandParams::new(2.0, 0.25, Profile::power(1.0), Profile::linear(0.5), &Default::default()).unwrap();
        let one = vec![GridFunction::constant(&s, 1.0), GridFunction::constant(&s, 1.0)];
        let seven = vec![GridFunction::constant(&s, 7.0), GridFunction::constant(&s, 7.0)];
        let levels = [0.1, 0.2, 0.4];
        let a = dominance_check(&params, &levels, &one, None, 0.05).unwrap();
        let b = dominance_check(&params, &levels, &seven, None, 0.05).unwrap();
        let (ca, cb) = (a.empirical["c_emp"], b.empirical["c_emp"]);
        assert!((ca - cb).abs() <= 1e-12 * ca);
        assert!(dominance_check(&params, &[0.2, 0.2], &one, None, 0.05).is_err());
    }

    #[test]
    fn identity_transfer_ratio_one() {
        let s = circle(16);
        let fs = CorpusSpec::new(Family::Mixed, 8, 2).generate(&s);
        let params = GrandParams::grand_morrey(2.0, 0.25, 1.0).unwrap();
        let r = reduction_transfer_check(&Identity, &Identity, &params, &params, 0.3, &fs, None, 1e-12).unwrap();
        assert!((r.empirical["max_ratio"] - 1.0).abs() < 1e-15);
        assert!((r.empirical["c_sup"] - 1.0).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn maximal_transfer_holds() {
        let s = circle(24);
        let fs = CorpusSpec::new(Family::Mixed, 16, 3).generate(&s);
        let params = GrandParams::new(2.0, 0.25, Profile::power(1.0), Profile::linear(0.5), &Default::default()).unwrap();
        let r = reduction_transfer_check(&Maximal, &Identity, &params, &params, 0.25, &fs, None, 1e-12).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
