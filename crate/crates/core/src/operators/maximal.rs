use super::{check_space, Operator, OperatorError};
use crate::funcnorm::oscillation::for_each_ball;
use crate::funcnorm::GridFunction;
use crate::homspace::DiscreteHomSpace;

/// `max_B avg_B g` over balls centered at each point, for `g ≥ 0`.
///
/// Starts from `g(x)` itself: the singleton ball is always realized, and
/// seeding with the exact value keeps `Mg ≥ g` free of rounding.
fn ball_average_max(space: &DiscreteHomSpace, g: &[f64]) -> Vec<f64> {
    let fam = space.balls();
    let w = space.weights();
    (0..space.len())
        .map(|x| {
            let row = fam.order_row(x);
            let mut best = g[x];
            let (mut sum, mut mass) = (0.0, 0.0);
            let mut pos = 0;
            for b in fam.range(x) {
                let end = fam.end(b);
                while pos < end {
                    let y = row[pos] as usize;
                    sum += g[y] * w[y];
                    mass += w[y];
                    pos += 1;
                }
                best = best.max(sum / mass);
            }
            best
        })
        .collect()
}

/// Hardy–Littlewood maximal function over realized closed balls.
pub fn maximal<'s>(f: &GridFunction<'s>) -> GridFunction<'s> {
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    GridFunction::from_raw(f.space(), ball_average_max(f.space(), &abs))
}

/// `(M|f|^s)^{1/s}`.
pub fn maximal_s<'s>(f: &GridFunction<'s>, s: f64) -> Result<GridFunction<'s>, OperatorError> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(OperatorError::InvalidParameter {
            name: "s",
            value: s,
            requirement: "1 ≤ s < ∞",
        });
    }
    if s == 1.0 {
        return Ok(maximal(f));
    }
    let pow: Vec<f64> = f.values().iter().map(|v| v.abs().powf(s)).collect();
    let m = ball_average_max(f.space(), &pow);
    Ok(GridFunction::from_raw(
        f.space(),
        m.into_iter().map(|v| v.powf(1.0 / s)).collect(),
    ))
}

/// `f♯(x) = max_B avg_B |f − f_B|` over balls centered at `x`.
pub fn sharp_maximal<'s>(f: &GridFunction<'s>) -> GridFunction<'s> {
    let mut out = vec![0.0f64; f.len()];
    for_each_ball(f.space(), f.values(), |x, _, o| {
        out[x] = out[x].max(o.about_mean);
    });
    GridFunction::from_raw(f.space(), out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Maximal;

impl Operator for Maximal {
    fn name(&self) -> String {
        "maximal".into()
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        Ok(maximal(f))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MaximalS {
    s: f64,
}

impl MaximalS {
    pub fn new(s: f64) -> Result<Self, OperatorError> {
        if !(s >= 1.0 && s.is_finite()) {
            return Err(OperatorError::InvalidParameter {
                name: "s",
                value: s,
                requirement: "1 ≤ s < ∞",
            });
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl Operator for MaximalS {
    fn name(&self) -> String {
        format!("maximal_s({})", self.s)
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        maximal_s(f, self.s)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SharpMaximal;

impl Operator for SharpMaximal {
    fn name(&self) -> String {
        "sharp_maximal".into()
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        Ok(sharp_maximal(f))
    }
}

/// The identity, for reduction checks whose input side is untransformed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Operator for Identity {
    fn name(&self) -> String {
        "identity".into()
    }
    fn apply<'s>(&self, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
        Ok(f.clone())
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// A dense linear operator `f ↦ (Σ_y a[x][y] f(y))_x` on a fixed space.
#[derive(Debug, Clone)]
pub(crate) struct DenseMatrix {
    n: usize,
    a: Vec<f64>,
}

impl DenseMatrix {
    pub(crate) fn new(n: usize, a: Vec<f64>) -> Self {
        debug_assert_eq!(a.len(), n * n);
        Self { n, a }
    }

    pub(crate) fn apply<'s>(
        &self,
        space: &DiscreteHomSpace,
        f: &GridFunction<'s>,
    ) -> Result<GridFunction<'s>, OperatorError> {
        check_space(space, f)?;
        let v = f.values();
        let out = self
            .a
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        Ok(GridFunction::from_raw(f.space(), out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::Geometry;

    #[test]
    fn three_point_maximal_vector() {
        let s = DiscreteHomSpace::uniform_grid(3, 1, Geometry::Interval).unwrap();
        let f = GridFunction::new(&s, vec![1.0, 0.0, 0.0]).unwrap();
        let m = maximal(&f);
        let want = [1.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in m.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn two_atom_maximal_s() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let f = GridFunction::new(&s, vec![0.0, 2.0]).unwrap();
        let m = maximal_s(&f, 2.0).unwrap();
        assert!((m.values()[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((m.values()[1] - 2.0).abs() < 1e-15);
        assert!(maximal_s(&f, 0.5).is_err());
    }

    #[test]
    fn two_atom_sharp() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let f = GridFunction::new(&s, vec![0.0, 1.0]).unwrap();
        assert_eq!(sharp_maximal(&f).values(), &[0.5, 0.5]);
    }

    #[test]
    fn constants() {
        let s = DiscreteHomSpace::uniform_grid(5, 1, Geometry::Circle).unwrap();
        let f = GridFunction::constant(&s, -0.7);
        assert!(maximal(&f).values().iter().all(|&v| (v - 0.7).abs() < 1e-15));
        assert!(sharp_maximal(&f).values().iter().all(|&v| v < 1e-15));
    }
}
