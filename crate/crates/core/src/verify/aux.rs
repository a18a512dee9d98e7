//! Exponent bookkeeping for the potential-commutator transfer: the source
//! exponent `p − η` and the target exponent `q − ε` are linked by
//! `1/(p−η) − 1/(q−ε) = α/(1 − λ + A₂(ε))`, solved as `η = φ̄(ε)`.

use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::funcnorm::Profile;

/// Nodes used to check monotonicity of `φ̄` on `(0, δ]`.
const MONOTONE_TABLE: usize = 512;
/// Geometric nodes `δ·2^{-j/8}` used to tabulate the induced `A₁`.
const A1_NODES: usize = 8 * 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxExponents {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub a1: Profile,
    pub a2: Profile,
    pub theta1: f64,
    pub theta2: f64,
    pub delta: f64,
}

/// All auxiliary functions at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxValues {
    pub phibar: f64,
    pub phitilde: f64,
    pub abar: f64,
    pub atilde: f64,
    pub phi: f64,
    pub phi_cap: f64,
    pub psi: f64,
    pub psi_cap: f64,
}

fn invalid(msg: impl Into<String>) -> VerifyError {
    VerifyError::InvalidExponents(msg.into())
}

impl AuxExponents {
    /// Builds the bundle from `(p, α, λ, A₂, θ₁, θ₂, δ)`: `q` solves
    /// `1/p − 1/q = α/(1−λ)` and `A₁ = A₂ ∘ φ̄⁻¹` is tabulated.
    pub fn new(
        p: f64,
        alpha: f64,
        lambda: f64,
        a2: Profile,
        theta1: f64,
        theta2: f64,
        delta: f64,
    ) -> Result<Self, VerifyError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("p = {p} must satisfy 1 < p < ∞")));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(invalid(format!("λ = {lambda} must lie in [0, 1)")));
        }
        if !(alpha > 0.0 && alpha < (1.0 - lambda) / p) {
            return Err(invalid(format!("α = {alpha} must lie in (0, (1−λ)/p)")));
        }
        let q = 1.0 / (1.0 / p - alpha / (1.0 - lambda));
        let mut exps = Self {
            p,
            q,
            alpha,
            lambda,
            a1: Profile::Zero,
            a2,
            theta1,
            theta2,
            delta,
        };
        exps.validate_without_a1()?;
        exps.a1 = exps.induced_a1()?;
        Ok(exps)
    }

    /// `θ₂ = θ₁(1 + αq/(1−λ))`, the smallest admissible target weight.
    pub fn minimal_theta2(p: f64, alpha: f64, lambda: f64, theta1: f64) -> f64 {
        let q = 1.0 / (1.0 / p - alpha / (1.0 - lambda));
        theta1 * (1.0 + alpha * q / (1.0 - lambda))
    }

    /// `lim_{x→0+} A₂'(x)`.
    pub fn b_limit(&self) -> f64 {
        self.a2.right_derivative_at_zero()
    }

    /// Upper bound `(1−λ)²/(αq²)` for the derivative limit.
    pub fn b_bound(&self) -> f64 {
        (1.0 - self.lambda).powi(2) / (self.alpha * self.q * self.q)
    }

    fn validate_without_a1(&self) -> Result<(), VerifyError> {
        if !(self.theta1 > 0.0 && self.theta1.is_finite()) {
            return Err(invalid(format!("θ₁ = {} must be positive", self.theta1)));
        }
        let need = self.theta1 * (1.0 + self.alpha * self.q / (1.0 - self.lambda));
        if !(self.theta2 >= need * (1.0 - 1e-12)) {
            return Err(invalid(format!("θ₂ = {} below θ₁(1 + αq/(1−λ)) = {need}", self.theta2)));
        }
        if !(self.delta > 0.0 && self.delta <= (self.q - 1.0) * (1.0 + 1e-12)) {
            return Err(invalid(format!("δ = {} must lie in (0, q − 1]", self.delta)));
        }
        self.a2.validate().map_err(|e| invalid(e.to_string()))?;
        if !self.a2.is_non_decreasing() || self.a2.eval(0.0) != 0.0 {
            return Err(invalid("A₂ must be non-negative, non-decreasing and vanish at 0+"));
        }
        let b = self.b_limit();
        if !(b >= 0.0 && b < self.b_bound()) {
            return Err(invalid(format!("A₂'(0+) = {b} must lie in [0, {})", self.b_bound())));
        }
        let mut prev = 0.0;
        for k in 1..=MONOTONE_TABLE {
            let x = self.delta * k as f64 / MONOTONE_TABLE as f64;
            let v = self.phibar(x)?;
            if !(v > prev) {
                return Err(invalid(format!("φ̄ is not strictly increasing near x = {x}")));
            }
            prev = v;
        }
        Ok(())
    }

    fn induced_a1(&self) -> Result<Profile, VerifyError> {
        if self.a2 == Profile::Zero {
            return Ok(Profile::Zero);
        }
        let mut xs = Vec::with_capacity(A1_NODES + 1);
        let mut ys = Vec::with_capacity(A1_NODES + 1);
        for j in (0..=A1_NODES).rev() {
            let x = self.delta * (-(j as f64) / 8.0).exp2();
            xs.push(self.phibar(x)?);
            ys.push(self.a2.eval(x));
        }
        Profile::table(xs, ys).map_err(|e| invalid(e.to_string()))
    }

    fn d2(&self, x: f64) -> f64 {
        1.0 - self.lambda + self.a2.eval(x)
    }

    fn d1(&self, x: f64) -> f64 {
        1.0 - self.lambda + self.a1.eval(x)
    }

    fn nonzero(x: f64, den: f64) -> Result<f64, VerifyError> {
        if den == 0.0 || !den.is_finite() {
            Err(VerifyError::SingularDenominator(x))
        } else {
            Ok(den)
        }
    }

    /// `φ̄(x) = p + (x − q)D/(D − α(x − q))`, `D = 1 − λ + A₂(x)`.
    pub fn phibar(&self, x: f64) -> Result<f64, VerifyError> {
        let d = self.d2(x);
        let den = Self::nonzero(x, d - self.alpha * (x - self.q))?;
        Ok(self.p + (x - self.q) * d / den)
    }

    /// `Ā(x) = 1 − α(x − q)/D`.
    pub fn abar(&self, x: f64) -> Result<f64, VerifyError> {
        let d = Self::nonzero(x, self.d2(x))?;
        Ok(1.0 - self.alpha * (x - self.q) / d)
    }

    /// `φ̃(x) = q − (p − x)D₁/(D₁ − α(p − x))`, `D₁ = 1 − λ + A₁(x)`.
    pub fn phitilde(&self, x: f64) -> Result<f64, VerifyError> {
        let d = self.d1(x);
        let den = Self::nonzero(x, d - self.alpha * (self.p - x))?;
        Ok(self.q - (self.p - x) * d / den)
    }

    /// `Ã(x) = D₁/(D₁ − (p − x)α)`.
    pub fn atilde(&self, x: f64) -> Result<f64, VerifyError> {
        let d = self.d1(x);
        let den = Self::nonzero(x, d - (self.p - x) * self.alpha)?;
        Ok(d / den)
    }

    /// `φ(x) = φ̄(x)^{Ā(x)}`.
    pub fn phi(&self, x: f64) -> Result<f64, VerifyError> {
        Ok(self.phibar(x)?.powf(self.abar(x)?))
    }

    /// `Φ(x) = φ̃(x)^{Ã(x)}`.
    pub fn phi_cap(&self, x: f64) -> Result<f64, VerifyError> {
        Ok(self.phitilde(x)?.powf(self.atilde(x)?))
    }

    /// `ψ(ε) = φ(ε^{θ₁})`.
    pub fn psi(&self, eps: f64) -> Result<f64, VerifyError> {
        self.phi(eps.powf(self.theta1))
    }

    /// `Ψ(ε) = Φ(ε^{θ₁})`.
    pub fn psi_cap(&self, eps: f64) -> Result<f64, VerifyError> {
        self.phi_cap(eps.powf(self.theta1))
    }

    /// `φ̄⁻¹(η)` on `(0, δ]` by bisection; `None` outside `(0, φ̄(δ)]`.
    pub fn phibar_inverse(&self, eta: f64) -> Option<f64> {
        let top = self.phibar(self.delta).ok()?;
        if !(eta > 0.0 && eta <= top) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, self.delta);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phibar(mid).ok()? < eta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// `ψ` tabulated at `xs`, for use as a grand-norm weight.
    pub fn psi_profile(&self, xs: &[f64]) -> Result<Profile, VerifyError> {
        let ys = xs.iter().map(|&x| self.psi(x)).collect::<Result<Vec<_>, _>>()?;
        Profile::table(xs.to_vec(), ys).map_err(|e| invalid(e.to_string()))
    }
}

pub fn eval_aux(x: f64, exps: &AuxExponents) -> Result<AuxValues, VerifyError> {
    if !(x > 0.0 && x <= exps.delta) {
        return Err(invalid(format!("x = {x} outside (0, δ = {}]", exps.delta)));
    }
    Ok(AuxValues {
        phibar: exps.phibar(x)?,
        phitilde: exps.phitilde(x)?,
        abar: exps.abar(x)?,
        atilde: exps.atilde(x)?,
        phi: exps.phi(x)?,
        phi_cap: exps.phi_cap(x)?,
        psi: exps.psi(x)?,
        psi_cap: exps.psi_cap(x)?,
    })
}

/// `|1/(p − φ̄(ε)) − 1/(q − ε) − α/(1 − λ + A₂(ε))|`.
pub fn eta_identity_check(eps: f64, exps: &AuxExponents) -> Result<f64, VerifyError> {
    if !(eps > 0.0 && eps <= exps.delta) {
        return Err(invalid(format!("ε = {eps} outside (0, δ = {}]", exps.delta)));
    }
    let eta = exps.phibar(eps)?;
    Ok((1.0 / (exps.p - eta) - 1.0 / (exps.q - eps) - exps.alpha / exps.d2(eps)).abs())
}

/// Least-squares slope of `log f` against `log x` on `n` geometric points of `[lo, hi]`.
pub fn log_log_slope(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            let x = lo * (hi / lo).powf(t);
            (x.ln(), f(x).ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> AuxExponents {
        AuxExponents::new(2.0, 0.25, 0.0, Profile::Zero, 1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let e = reference();
        assert_eq!(e.q, 4.0);
        let v = eval_aux(1.0, &e).unwrap();
        assert!((v.phibar - 2.0 / 7.0).abs() < 1e-15);
        assert!((v.abar - 7.0 / 4.0).abs() < 1e-15);
        assert!((v.phi - (2.0f64 / 7.0).powf(1.75)).abs() < 1e-15);
        assert!((v.phi - 0.11166).abs() < 1e-5);
        assert!(eta_identity_check(1.0, &e).unwrap() <= 1e-15);
    }

    #[test]
    fn phibar_vanishes_at_zero_like_x() {
        let e = reference();
        let r1 = e.phibar(1e-6).unwrap() / 1e-6;
        let r2 = e.phibar(1e-8).unwrap() / 1e-8;
        assert!(r1 > 0.0 && (r1 - r2).abs() < 1e-4 * r2);
    }

    #[test]
    fn phitilde_inverts_phibar() {
        let e = AuxExponents::new(2.0, 0.15, 0.25, Profile::linear(0.1), 1.0, 5.0 / 3.0, 1.0).unwrap();
        for x in [0.01, 0.1, 0.5, 0.9] {
            let eta = e.phibar(x).unwrap();
            assert!((e.phitilde(eta).unwrap() - x).abs() < 1e-4 * x, "x = {x}");
            assert!((e.phibar_inverse(eta).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_bundles() {
        assert!(AuxExponents::new(2.0, 0.6, 0.0, Profile::Zero, 1.0, 3.0, 1.0).is_err());
        assert!(AuxExponents::new(2.0, 0.25, 0.0, Profile::Zero, 1.0, 1.5, 1.0).is_err());
        // derivative limit too large: bound is 1/(1/4·16) = 1/4
        assert!(AuxExponents::new(2.0, 0.25, 0.0, Profile::linear(0.3), 1.0, 2.0, 1.0).is_err());
        assert!(matches!(
            eval_aux(1.5, &reference()),
            Err(VerifyError::InvalidExponents(_))
        ));
    }

    #[test]
    fn psi_slope() {
        let e = reference();
        let s = log_log_slope(|x| e.psi(x).unwrap(), 1e-4, 1e-2, 33);
        assert!((s - 2.0).abs() < 0.05, "slope {s}");
    }
}
