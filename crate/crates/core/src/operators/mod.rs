//! Maximal, sharp maximal, singular-integral and potential operators, and
//! commutators with a multiplier.

mod kernel;
mod maximal;
mod potential;

pub use kernel::{
    cz_apply, dini_integral, l2_ratio, smoothness_envelope, CzOperator, DiniReport, KernelKind,
    KernelSpec, Modulus, SmoothnessReport,
};
pub use maximal::{maximal, maximal_s, sharp_maximal, Identity, Maximal, MaximalS, SharpMaximal};
pub use potential::{potential_apply, Potential};

use thiserror::Error;

use crate::funcnorm::{GridFunction, NormError};
use crate::homspace::DiscreteHomSpace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("{name} = {value} violates {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("kernel size bound fails at ({x}, {y}): |K|·μ = {value} > {bound}")]
    KernelSizeViolation {
        x: usize,
        y: usize,
        value: f64,
        bound: f64,
    },
    #[error("kernel has {rows} rows or columns, space has {expected} points")]
    KernelShape { rows: usize, expected: usize },
    #[error("kernel entry ({x}, {y}) = {value} is not finite")]
    NonFiniteKernel { x: usize, y: usize, value: f64 },
    #[error("{0} kernel needs one-dimensional point labels")]
    MissingLabels(&'static str),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("Dini series looks divergent: integral {integral}, partial sum {series}, tail ratio {cauchy}")]
    DivergenceSuspected { integral: f64, series: f64, cauchy: f64 },
    #[error("function has {got} values, operator expects {expected}")]
    SpaceMismatch { got: usize, expected: usize },
    #[error("{0} is not linear")]
    NotLinear(String),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// A map between functions on one space.
pub trait Operator: Sync {
    fn name(&self) -> String;
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError>;
    fn is_linear(&self) -> bool {
        false
    }
}

impl<T: Operator + ?Sized> Operator for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        (**self).apply(f)
    }
    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
}

pub(crate) fn check_space(space: &DiscreteHomSpace, f: &GridFunction) -> Result<(), OperatorError> {
    if f.len() != space.len() {
        return Err(OperatorError::SpaceMismatch {
            got: f.len(),
            expected: space.len(),
        });
    }
    Ok(())
}

/// `[b, U]f = b·Uf − U(bf)` for a linear `U`.
#[derive(Debug, Clone)]
pub struct Commutator<'b, 's, U> {
    b: &'b GridFunction<'s>,
    op: U,
}

impl<'b, 's, U: Operator> Commutator<'b, 's, U> {
    pub fn new(b: &'b GridFunction<'s>, op: U) -> Result<Self, OperatorError> {
        if !op.is_linear() {
            return Err(OperatorError::NotLinear(op.name()));
        }
        Ok(Self { b, op })
    }
}

impl<U: Operator> Operator for Commutator<'_, '_, U> {
    fn name(&self) -> String {
        format!("commutator({})", self.op.name())
    }
    fn apply<'a>(&self, f: &GridFunction<'a>) -> Result<GridFunction<'a>, OperatorError> {
        if f.len() != self.b.len() {
            return Err(OperatorError::SpaceMismatch {
                got: f.len(),
                expected: self.b.len(),
            });
        }
        let uf = self.op.apply(f)?;
        let bf = GridFunction::from_raw(
            f.space(),
            f.values().iter().zip(self.b.values()).map(|(a, b)| a * b).collect(),
        );
        let ubf = self.op.apply(&bf)?;
        let out = uf
            .values()
            .iter()
            .zip(ubf.values())
            .zip(self.b.values())
            .map(|((u, v), b)| b * u - v)
            .collect();
        Ok(GridFunction::from_raw(f.space(), out))
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// `[b, U]f` in one call.
pub fn commutator<'s>(b: &GridFunction<'s>, op: &dyn Operator, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
    Commutator::new(b, op)?.apply(f)
}

/// `outer ∘ inner`.
#[derive(Debug, Clone)]
pub struct Compose<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<A: Operator, B: Operator> Operator for Compose<A, B> {
    fn name(&self) -> String {
        format!("{}∘{}", self.outer.name(), self.inner.name())
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        self.outer.apply(&self.inner.apply(f)?)
    }
    fn is_linear(&self) -> bool {
        self.outer.is_linear() && self.inner.is_linear()
    }
}
