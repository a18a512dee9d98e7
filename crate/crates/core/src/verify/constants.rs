//! Closed-form operator-norm bounds with one unknown absolute constant.
//!
//! Every formula is affine in that constant, `value = C·unit + offset`, so a
//! measured ratio converts directly into the smallest constant that covers it.

use serde::{Deserialize, Serialize};

use super::VerifyError;

/// `p' = p/(p − 1)`.
fn conj(p: f64) -> f64 {
    p / (p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ConstantFormula {
    /// `C·b^{λ/p}(p')^{1/p} + 1` for the maximal operator on `L^{p,λ}`.
    MaximalMorrey { p: f64, lambda: f64, b: f64 },
    /// `C·b^{λs/p}((p/s)')^{s/p} + 1` for `M_s` on `L^{p,λ}`, `1 < s < p`.
    MaximalSMorrey { p: f64, lambda: f64, s: f64, b: f64 },
    /// `c·{p/(p−1) + p/(2−p) + (p−λ+1)/(1−λ)}` for `1 < p < 2`,
    /// `c·{p + p/(p−2) + (p−λ+1)/(1−λ)}` for `p > 2`; singular integrals on `L^{p,λ}`.
    CzMorrey { p: f64, lambda: f64 },
    /// `C(b^{λs/p}((p/s)')^{s/p} + 1)^{1+p/q}(1 + p/(1−λ−αp))[(p')^{1/q} + 1]`
    /// for `M∘[b, I^α]` from `L^{p,λ}` to `L^{q,λ}`.
    MaximalCommutatorPotential {
        p: f64,
        q: f64,
        alpha: f64,
        lambda: f64,
        s: f64,
        b: f64,
    },
    /// `C(b^{λ/p} + 1)`, controlling `‖Mf‖_{p,λ}` by `‖f♯‖_{p,λ}`.
    FeffermanStein { p: f64, lambda: f64, b: f64 },
}

fn check(ok: bool, what: &str) -> Result<(), VerifyError> {
    if ok {
        Ok(())
    } else {
        Err(VerifyError::OutOfRange(what.to_string()))
    }
}

impl ConstantFormula {
    pub fn key(&self) -> &'static str {
        match self {
            ConstantFormula::MaximalMorrey { .. } => "maximal_morrey",
            ConstantFormula::MaximalSMorrey { .. } => "maximal_s_morrey",
            ConstantFormula::CzMorrey { .. } => "cz_morrey",
            ConstantFormula::MaximalCommutatorPotential { .. } => "maximal_commutator_potential",
            ConstantFormula::FeffermanStein { .. } => "fefferman_stein",
        }
    }

    /// `(unit, offset)` with `value(C) = C·unit + offset`.
    pub fn affine(&self) -> Result<(f64, f64), VerifyError> {
        let lam_ok = |l: f64| (0.0..1.0).contains(&l);
        match *self {
            ConstantFormula::MaximalMorrey { p, lambda, b } => {
                check(p > 1.0 && lam_ok(lambda) && b >= 1.0, "need p > 1, 0 ≤ λ < 1, b ≥ 1")?;
                Ok((b.powf(lambda / p) * conj(p).powf(1.0 / p), 1.0))
            }
            ConstantFormula::MaximalSMorrey { p, lambda, s, b } => {
                check(1.0 < s && s < p && lam_ok(lambda) && b >= 1.0, "need 1 < s < p, 0 ≤ λ < 1, b ≥ 1")?;
                Ok((b.powf(lambda * s / p) * conj(p / s).powf(s / p), 1.0))
            }
            ConstantFormula::CzMorrey { p, lambda } => {
                check(p > 1.0 && lam_ok(lambda), "need p > 1, 0 ≤ λ < 1")?;
                let tail = (p - lambda + 1.0) / (1.0 - lambda);
                if p < 2.0 {
                    Ok((p / (p - 1.0) + p / (2.0 - p) + tail, 0.0))
                } else if p > 2.0 {
                    Ok((p + p / (p - 2.0) + tail, 0.0))
                } else {
                    Err(VerifyError::OutOfRange(
                        "the singular-integral bound has no branch at p = 2".into(),
                    ))
                }
            }
            ConstantFormula::MaximalCommutatorPotential {
                p,
                q,
                alpha,
                lambda,
                s,
                b,
            } => {
                check(
                    1.0 < s && s < p && lam_ok(lambda) && alpha > 0.0 && alpha * p < 1.0 - lambda && q > p && b >= 1.0,
                    "need 1 < s < p < q, 0 ≤ λ < 1, 0 < α < (1−λ)/p, b ≥ 1",
                )?;
                let ms = b.powf(lambda * s / p) * conj(p / s).powf(s / p) + 1.0;
                let unit = ms.powf(1.0 + p / q)
                    * (1.0 + p / (1.0 - lambda - alpha * p))
                    * (conj(p).powf(1.0 / q) + 1.0);
                Ok((unit, 0.0))
            }
            ConstantFormula::FeffermanStein { p, lambda, b } => {
                check(p > 1.0 && lam_ok(lambda) && b >= 1.0, "need p > 1, 0 ≤ λ < 1, b ≥ 1")?;
                Ok((b.powf(lambda / p) + 1.0, 0.0))
            }
        }
    }

    pub fn value(&self, constant: f64) -> Result<f64, VerifyError> {
        let (unit, offset) = self.affine()?;
        Ok(constant * unit + offset)
    }

    /// Smallest non-negative constant with `value(C) ≥ ratio`.
    pub fn calibrate(&self, ratio: f64) -> Result<f64, VerifyError> {
        let (unit, offset) = self.affine()?;
        Ok(((ratio - offset) / unit).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cz_branch_above_two() {
        let f = ConstantFormula::CzMorrey { p: 3.0, lambda: 0.5 };
        assert!((f.value(1.0).unwrap() - 13.0).abs() < 1e-12);
        assert!(ConstantFormula::CzMorrey { p: 2.0, lambda: 0.5 }.value(1.0).is_err());
    }

    #[test]
    fn maximal_lambda_zero_ignores_b() {
        for b in [1.0, 3.0, 40.0] {
            let f = ConstantFormula::MaximalMorrey { p: 3.0, lambda: 0.0, b };
            assert!((f.value(1.0).unwrap() - (1.5f64.powf(1.0 / 3.0) + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn calibration_inverts_value() {
        let f = ConstantFormula::MaximalSMorrey { p: 2.0, lambda: 0.25, s: 1.25, b: 3.0 };
        let c = f.calibrate(4.2).unwrap();
        assert!((f.value(c).unwrap() - 4.2).abs() < 1e-12);
        assert_eq!(f.calibrate(0.5).unwrap(), 0.0);
    }

    #[test]
    fn commutator_formula_finite_near_degenerate() {
        let f = ConstantFormula::MaximalCommutatorPotential {
            p: 2.0,
            q: 2.0 + 1e-9,
            alpha: 1e-9,
            lambda: 0.0,
            s: 1.5,
            b: 2.0,
        };
        let v = f.value(1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
