use super::maximal::DenseMatrix;
use super::{Operator, OperatorError};
use crate::funcnorm::GridFunction;
use crate::homspace::DiscreteHomSpace;

/// `I^α f(x) = Σ_y f(y) μ{y} / μ{z : d(x,z) < d(x,y)}^{1−α}`; the diagonal
/// term uses the atom `μ{x}`.
#[derive(Debug, Clone)]
pub struct Potential<'s> {
    space: &'s DiscreteHomSpace,
    alpha: f64,
    matrix: DenseMatrix,
}

impl<'s> Potential<'s> {
    pub fn new(space: &'s DiscreteHomSpace, alpha: f64) -> Result<Self, OperatorError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(OperatorError::InvalidParameter {
                name: "alpha",
                value: alpha,
                requirement: "0 < α < 1",
            });
        }
        let n = space.len();
        let w = space.weights();
        let fam = space.balls();
        let a = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                w[y] * fam.open_measure(x, y).powf(alpha - 1.0)
            })
            .collect();
        Ok(Self {
            space,
            alpha,
            matrix: DenseMatrix::new(n, a),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Operator for Potential<'_> {
    fn name(&self) -> String {
        format!("potential({})", self.alpha)
    }
    fn apply<'a>(&self, f: &GridFunction<'a>) -> Result<GridFunction<'a>, OperatorError> {
        self.matrix.apply(self.space, f)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

pub fn potential_apply<'s>(f: &GridFunction<'s>, alpha: f64) -> Result<GridFunction<'s>, OperatorError> {
    Potential::new(f.space(), alpha)?.apply(f)
}
