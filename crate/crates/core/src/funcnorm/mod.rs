//! Lebesgue, Morrey, BMO, grand Lebesgue and generalized grand Morrey norms on
//! a [`DiscreteHomSpace`].
//!
//! Every supremum over balls is a maximum over the realized closed-ball family;
//! every supremum over `ε` is a maximum over a finite [`EpsGrid`].

mod bmo;
mod grand;
pub(crate) mod oscillation;
mod profile;

pub use bmo::{ball_oscillations, bmo_norm, bmo_norm_argmax, BmoVariant};
pub use grand::{
    grand_lebesgue_norm, grand_lebesgue_norm_argmax, grand_morrey_norm, phi_functional, s_max,
    EpsGrid, GrandEvaluator, GrandParams, GridSpec, DEFAULT_GRID_FLOOR, DEFAULT_GRID_RATIO,
};
pub use oscillation::Oscillation;
pub use profile::Profile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homspace::DiscreteHomSpace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("function has {got} values, space has {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("value {value} at point {index} is not finite")]
    NonFinite { index: usize, value: f64 },
    #[error("{name} = {value} violates {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("grid point ε = {eps} outside ({lower}, {upper})")]
    EpsOutOfRange { eps: f64, lower: f64, upper: f64 },
    #[error("no grid point below s = {0}")]
    EmptyGrid(f64),
    #[error("ε-grid must be strictly increasing, positive and finite")]
    BadGrid,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("λ − A(ε) = {shifted} < 0 at ε = {eps}")]
    NegativeShift { eps: f64, shifted: f64 },
    #[error("functions live on different spaces")]
    DifferentSpaces,
}

/// A real function on the points of a space.
#[derive(Debug, Clone)]
pub struct GridFunction<'s> {
    space: &'s DiscreteHomSpace,
    values: Vec<f64>,
}

impl<'s> GridFunction<'s> {
    pub fn new(space: &'s DiscreteHomSpace, values: Vec<f64>) -> Result<Self, NormError> {
        if values.len() != space.len() {
            return Err(NormError::LengthMismatch {
                got: values.len(),
                expected: space.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(NormError::NonFinite { index, value });
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(space: &'s DiscreteHomSpace, f: impl FnMut(usize) -> f64) -> Self {
        let values = (0..space.len()).map(f).collect();
        Self { space, values }
    }

    pub fn constant(space: &'s DiscreteHomSpace, c: f64) -> Self {
        Self::from_fn(space, |_| c)
    }

    pub fn zeros(space: &'s DiscreteHomSpace) -> Self {
        Self::constant(space, 0.0)
    }

    pub(crate) fn from_raw(space: &'s DiscreteHomSpace, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), space.len());
        Self { space, values }
    }

    pub fn space(&self) -> &'s DiscreteHomSpace {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.space, self.values.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self, NormError> {
        if !std::ptr::eq(self.space, other.space) && self.len() != other.len() {
            return Err(NormError::DifferentSpaces);
        }
        Ok(Self::from_raw(
            self.space,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self, NormError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NormError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self, NormError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `∫ f dμ / μX`.
    pub fn mean(&self) -> f64 {
        let w = self.space.weights();
        let s: f64 = self.values.iter().zip(w).map(|(v, w)| v * w).sum();
        s / self.space.total_measure()
    }

    /// `f − mean(f)`.
    pub fn centered(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Where a norm's maximum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub eps: Option<f64>,
    pub center: Option<usize>,
    pub radius_rank: Option<usize>,
}

/// A norm value with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub argmax: Option<Argmax>,
}

impl NormValue {
    pub(crate) fn at_ball(value: f64, space: &DiscreteHomSpace, ball: usize, eps: Option<f64>) -> Self {
        let (center, rank) = locate_ball(space, ball);
        Self {
            value,
            argmax: Some(Argmax {
                eps,
                center: Some(center),
                radius_rank: Some(rank),
            }),
        }
    }
}

pub(crate) fn locate_ball(space: &DiscreteHomSpace, ball: usize) -> (usize, usize) {
    space.balls().locate(ball)
}

pub(crate) fn check_exponent(name: &'static str, p: f64, min: f64) -> Result<(), NormError> {
    if p.is_finite() && p >= min {
        Ok(())
    } else {
        Err(NormError::InvalidParameter {
            name,
            value: p,
            requirement: if min == 1.0 { "p ≥ 1" } else { "exponent range" },
        })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<(), NormError> {
    if (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(NormError::InvalidParameter {
            name: "lambda",
            value: lambda,
            requirement: "0 ≤ λ < 1",
        })
    }
}

/// `(Σ |f_i|^p μ_i)^{1/p}`.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64, NormError> {
    check_exponent("p", p, 1.0)?;
    Ok(lp_unchecked(f, p))
}

pub(crate) fn lp_unchecked(f: &GridFunction, p: f64) -> f64 {
    let s: f64 = f
        .values()
        .iter()
        .zip(f.space().weights())
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum();
    s.powf(1.0 / p)
}

/// `|f|^p μ` per point.
pub(crate) fn mass(f: &GridFunction, p: f64) -> Vec<f64> {
    f.values()
        .iter()
        .zip(f.space().weights())
        .map(|(v, w)| if *v == 0.0 { 0.0 } else { v.abs().powf(p) * w })
        .collect()
}

/// `max_B scale[class(B)] · Σ_{i∈B} mass_i` with its flat ball index.
///
/// Sums are accumulated along each center's distance order, so every ball
/// costs one addition per new member.
pub(crate) fn ball_sup(space: &DiscreteHomSpace, mass: &[f64], class_scale: &[f64]) -> (f64, usize) {
    let fam = space.balls();
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for x in 0..space.len() {
        let row = fam.order_row(x);
        let mut acc = 0.0;
        let mut pos = 0;
        for b in fam.range(x) {
            let end = fam.end(b);
            while pos < end {
                acc += mass[row[pos] as usize];
                pos += 1;
            }
            let v = acc * class_scale[fam.class_of(b)];
            if v > best {
                best = v;
                arg = b;
            }
        }
    }
    (best, arg)
}

/// `μ^{-λ}` for every distinct ball measure.
pub(crate) fn class_scale(space: &DiscreteHomSpace, lambda: f64) -> Vec<f64> {
    space
        .balls()
        .class_measures()
        .iter()
        .map(|m| if lambda == 0.0 { 1.0 } else { m.powf(-lambda) })
        .collect()
}

/// `max_B (μB^{-λ} Σ_{i∈B} |f_i|^p μ_i)^{1/p}` over realized balls.
pub fn morrey_norm(f: &GridFunction, p: f64, lambda: f64) -> Result<f64, NormError> {
    morrey_norm_argmax(f, p, lambda).map(|v| v.value)
}

pub fn morrey_norm_argmax(f: &GridFunction, p: f64, lambda: f64) -> Result<NormValue, NormError> {
    check_exponent("p", p, 1.0)?;
    check_lambda(lambda)?;
    let space = f.space();
    let (m, ball) = ball_sup(space, &mass(f, p), &class_scale(space, lambda));
    Ok(NormValue::at_ball(m.powf(1.0 / p), space, ball, None))
}
