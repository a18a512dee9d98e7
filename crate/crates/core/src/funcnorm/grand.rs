use serde::{Deserialize, Serialize};

use super::{
    ball_sup, check_lambda, class_scale, lp_unchecked, mass, Argmax, GridFunction, NormError,
    NormValue, Profile,
};
use crate::homspace::DiscreteHomSpace;

pub const DEFAULT_GRID_RATIO: f64 = 0.9;
pub const DEFAULT_GRID_FLOOR: f64 = 1e-6;

/// Above this many cached `μ^{-λ}` entries the evaluator recomputes the
/// per-class scales on every call instead of storing them.
const SCALE_CACHE_LIMIT: usize = 4_000_000;

/// How to discretize `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// `top·ratio^k` for `k ≥ 1`, down to `floor`.
    Geometric { ratio: f64, floor: f64 },
    Explicit { points: Vec<f64> },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Geometric {
            ratio: DEFAULT_GRID_RATIO,
            floor: DEFAULT_GRID_FLOOR,
        }
    }
}

/// Strictly increasing positive `ε` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EpsGrid(Vec<f64>);

impl EpsGrid {
    /// Points `top·ratio^k`, `k ≥ 1`, that are `≥ floor`, ascending. All of
    /// them lie strictly below `top`.
    pub fn geometric(top: f64, ratio: f64, floor: f64) -> Result<Self, NormError> {
        if !(top > 0.0 && top.is_finite() && ratio > 0.0 && ratio < 1.0 && floor > 0.0) {
            return Err(NormError::BadGrid);
        }
        let mut pts = Vec::new();
        let mut e = top * ratio;
        while e >= floor {
            pts.push(e);
            e *= ratio;
        }
        if pts.is_empty() {
            return Err(NormError::EmptyGrid(top));
        }
        pts.reverse();
        Ok(Self(pts))
    }

    pub fn explicit(points: Vec<f64>) -> Result<Self, NormError> {
        if points.is_empty()
            || !(points[0] > 0.0)
            || points.iter().any(|e| !e.is_finite())
            || points.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(NormError::BadGrid);
        }
        Ok(Self(points))
    }

    pub fn from_spec(spec: &GridSpec, top: f64) -> Result<Self, NormError> {
        match spec {
            GridSpec::Geometric { ratio, floor } => Self::geometric(top, *ratio, *floor),
            GridSpec::Explicit { points } => Self::explicit(points.clone()),
        }
    }

    /// Union of two grids.
    pub fn merged(&self, other: &EpsGrid) -> EpsGrid {
        let mut v: Vec<f64> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        EpsGrid(v)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of grid points strictly below `s`.
    pub fn count_below(&self, s: f64) -> usize {
        self.0.partition_point(|&e| e < s)
    }

    pub fn max(&self) -> f64 {
        *self.0.last().expect("grids are non-empty")
    }
}

impl TryFrom<Vec<f64>> for EpsGrid {
    type Error = NormError;
    fn try_from(v: Vec<f64>) -> Result<Self, NormError> {
        Self::explicit(v)
    }
}

impl From<EpsGrid> for Vec<f64> {
    fn from(g: EpsGrid) -> Self {
        g.0
    }
}

/// `min{p − 1, sup{x > 0 : A(x) ≤ λ}}`.
pub fn s_max(p: f64, lambda: f64, a: &Profile) -> f64 {
    (p - 1.0).min(a.level_sup(lambda))
}

/// Everything that defines a generalized grand Morrey norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrandParams {
    pub p: f64,
    pub lambda: f64,
    pub phi: Profile,
    pub a: Profile,
    pub grid: EpsGrid,
    pub s_max: f64,
}

impl GrandParams {
    pub fn new(p: f64, lambda: f64, phi: Profile, a: Profile, grid: &GridSpec) -> Result<Self, NormError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(NormError::InvalidParameter {
                name: "p",
                value: p,
                requirement: "1 < p < ∞",
            });
        }
        check_lambda(lambda)?;
        phi.validate()?;
        a.validate()?;
        if !a.is_non_decreasing() {
            return Err(NormError::InvalidProfile(
                "A must be non-negative and non-decreasing".into(),
            ));
        }
        let top = s_max(p, lambda, &a);
        if !(top > 0.0) {
            return Err(NormError::InvalidParameter {
                name: "s_max",
                value: top,
                requirement: "s_max > 0",
            });
        }
        let grid = EpsGrid::from_spec(grid, top)?;
        let params = Self {
            p,
            lambda,
            phi,
            a,
            grid,
            s_max: top,
        };
        params.check_grid()?;
        Ok(params)
    }

    /// `φ(ε) = ε^θ`, `A ≡ 0`, default grid.
    pub fn grand_morrey(p: f64, lambda: f64, theta: f64) -> Result<Self, NormError> {
        Self::new(p, lambda, Profile::power(theta), Profile::Zero, &GridSpec::default())
    }

    /// Same norm on a different grid.
    pub fn with_grid(&self, grid: EpsGrid) -> Result<Self, NormError> {
        let params = Self { grid, ..self.clone() };
        params.check_grid()?;
        Ok(params)
    }

    fn check_grid(&self) -> Result<(), NormError> {
        for &e in self.grid.points() {
            if !(e > 0.0 && e <= self.s_max) {
                return Err(NormError::EpsOutOfRange {
                    eps: e,
                    lower: 0.0,
                    upper: self.s_max,
                });
            }
            let shifted = self.lambda - self.a.eval(e);
            if shifted < -1e-12 {
                return Err(NormError::NegativeShift { eps: e, shifted });
            }
            let w = self.phi.eval(e);
            if !(w > 0.0 && w.is_finite()) {
                return Err(NormError::InvalidProfile(format!("φ({e}) = {w} is not positive")));
            }
        }
        Ok(())
    }

    /// `λ − A(ε)`, clamped at zero against rounding.
    pub fn shifted_lambda(&self, eps: f64) -> f64 {
        (self.lambda - self.a.eval(eps)).max(0.0)
    }

    /// `φ(ε)^{1/(p−ε)}`.
    pub fn eps_weight(&self, eps: f64) -> f64 {
        self.phi.eval(eps).powf(1.0 / (self.p - eps))
    }
}

/// Precomputed per-`ε` data for repeated grand-norm evaluations on one space.
#[derive(Debug)]
pub struct GrandEvaluator<'s> {
    space: &'s DiscreteHomSpace,
    params: GrandParams,
    weights: Vec<f64>,
    lambdas: Vec<f64>,
    /// Index into `tables` for each grid point.
    table_of: Vec<usize>,
    tables: Vec<Vec<f64>>,
    cached: bool,
}

impl<'s> GrandEvaluator<'s> {
    pub fn new(space: &'s DiscreteHomSpace, params: &GrandParams) -> Self {
        let pts = params.grid.points();
        let weights = pts.iter().map(|&e| params.eps_weight(e)).collect();
        let lambdas: Vec<f64> = pts.iter().map(|&e| params.shifted_lambda(e)).collect();
        let mut distinct: Vec<f64> = Vec::new();
        let table_of = lambdas
            .iter()
            .map(|l| match distinct.iter().position(|d| d.to_bits() == l.to_bits()) {
                Some(i) => i,
                None => {
                    distinct.push(*l);
                    distinct.len() - 1
                }
            })
            .collect();
        let classes = space.balls().class_measures().len();
        let cached = classes * distinct.len() <= SCALE_CACHE_LIMIT;
        let tables = if cached {
            distinct.iter().map(|&l| class_scale(space, l)).collect()
        } else {
            Vec::new()
        };
        Self {
            space,
            params: params.clone(),
            weights,
            lambdas,
            table_of,
            tables,
            cached,
        }
    }

    pub fn params(&self) -> &GrandParams {
        &self.params
    }

    pub fn space(&self) -> &'s DiscreteHomSpace {
        self.space
    }

    /// Unweighted `‖f‖_{L^{p−ε, λ−A(ε)}}` and its maximizing ball for the
    /// first `k` grid points.
    fn morrey_prefix(&self, f: &GridFunction, k: usize) -> Vec<(f64, usize)> {
        let pts = self.params.grid.points();
        (0..k)
            .map(|i| {
                let e = self.params.p - pts[i];
                let m = mass(f, e);
                let (v, ball) = if self.cached {
                    ball_sup(self.space, &m, &self.tables[self.table_of[i]])
                } else {
                    ball_sup(self.space, &m, &class_scale(self.space, self.lambdas[i]))
                };
                (v.powf(1.0 / e), ball)
            })
            .collect()
    }

    /// `‖f‖_{L^{p−ε, λ−A(ε)}}` at every grid point.
    pub fn per_eps(&self, f: &GridFunction) -> Vec<f64> {
        self.morrey_prefix(f, self.params.grid.len())
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    }

    /// `φ(ε)^{1/(p−ε)}` at every grid point.
    pub fn eps_weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Φ(f, s)`: maximum over grid points `ε < s` of the weighted Morrey norms.
    pub fn phi(&self, f: &GridFunction, s: f64) -> Result<NormValue, NormError> {
        if !(s > 0.0 && s <= self.params.s_max) {
            return Err(NormError::EpsOutOfRange {
                eps: s,
                lower: 0.0,
                upper: self.params.s_max,
            });
        }
        let k = self.params.grid.count_below(s);
        if k == 0 {
            return Err(NormError::EmptyGrid(s));
        }
        Ok(self.weighted_max(&self.morrey_prefix(f, k)))
    }

    /// `Φ(f, s)` for every `s` in `levels`, sharing one Morrey pass.
    pub fn phi_levels(&self, f: &GridFunction, levels: &[f64]) -> Result<Vec<f64>, NormError> {
        let top = levels.iter().copied().fold(0.0, f64::max);
        let k = self.params.grid.count_below(top);
        let per = self.morrey_prefix(f, k);
        levels
            .iter()
            .map(|&s| {
                let k = self.params.grid.count_below(s);
                if k == 0 {
                    Err(NormError::EmptyGrid(s))
                } else {
                    Ok(self.weighted_max(&per[..k]).value)
                }
            })
            .collect()
    }

    fn weighted_max(&self, per: &[(f64, usize)]) -> NormValue {
        let pts = self.params.grid.points();
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (i, (v, _)) in per.iter().enumerate() {
            let w = self.weights[i] * v;
            if w > best {
                best = w;
                arg = i;
            }
        }
        NormValue::at_ball(best, self.space, per[arg].1, Some(pts[arg]))
    }

    /// The generalized grand Morrey norm, `Φ(f, s_max)`.
    ///
    /// Grid points equal to `s_max` are excluded, as in every `Φ(f, s)`.
    pub fn norm(&self, f: &GridFunction) -> Result<NormValue, NormError> {
        self.phi(f, self.params.s_max)
    }
}

/// `Φ(f, s)` for one function.
pub fn phi_functional(f: &GridFunction, params: &GrandParams, s: f64) -> Result<f64, NormError> {
    GrandEvaluator::new(f.space(), params).phi(f, s).map(|v| v.value)
}

/// `Φ(f, s_max)` for one function, with its maximizer.
pub fn grand_morrey_norm(f: &GridFunction, params: &GrandParams) -> Result<NormValue, NormError> {
    GrandEvaluator::new(f.space(), params).norm(f)
}

/// `max_ε ε^{θ/(p−ε)} ‖f‖_{L^{p−ε}}` over a grid inside `(0, p − 1)`.
pub fn grand_lebesgue_norm(f: &GridFunction, p: f64, theta: f64, grid: &EpsGrid) -> Result<f64, NormError> {
    grand_lebesgue_norm_argmax(f, p, theta, grid).map(|v| v.value)
}

pub fn grand_lebesgue_norm_argmax(
    f: &GridFunction,
    p: f64,
    theta: f64,
    grid: &EpsGrid,
) -> Result<NormValue, NormError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(NormError::InvalidParameter {
            name: "p",
            value: p,
            requirement: "1 < p < ∞",
        });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(NormError::InvalidParameter {
            name: "theta",
            value: theta,
            requirement: "θ > 0",
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0.0;
    for &e in grid.points() {
        if !(e > 0.0 && e < p - 1.0) {
            return Err(NormError::EpsOutOfRange {
                eps: e,
                lower: 0.0,
                upper: p - 1.0,
            });
        }
        let v = e.powf(theta / (p - e)) * lp_unchecked(f, p - e);
        if v > best {
            best = v;
            arg = e;
        }
    }
    Ok(NormValue {
        value: best,
        argmax: Some(Argmax {
            eps: Some(arg),
            center: None,
            radius_rank: None,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcnorm::morrey_norm;
    use crate::homspace::Geometry;

    #[test]
    fn s_max_examples() {
        assert_eq!(s_max(3.0, 0.0, &Profile::Zero), 2.0);
        assert_eq!(s_max(2.0, 0.5, &Profile::linear(1.0)), 0.5);
        assert_eq!(s_max(4.0, 0.5, &Profile::linear(2.0)), 0.25);
    }

    #[test]
    fn geometric_grid_stays_below_top() {
        let g = EpsGrid::geometric(0.5, 0.9, 1e-6).unwrap();
        assert!(g.max() < 0.5);
        assert!((g.max() - 0.45).abs() < 1e-15);
        assert!(g.points()[0] >= 1e-6);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn explicit_grid_validation() {
        assert!(EpsGrid::explicit(vec![0.1, 0.1]).is_err());
        assert!(EpsGrid::explicit(vec![0.0, 0.1]).is_err());
        assert!(EpsGrid::explicit(vec![]).is_err());
        let p = GrandParams::new(2.0, 0.5, Profile::power(1.0), Profile::linear(1.0), &GridSpec::Explicit {
            points: vec![0.1, 0.6],
        });
        assert!(matches!(p, Err(NormError::EpsOutOfRange { .. })));
    }

    #[test]
    fn grand_lebesgue_constant_near_one() {
        let s = DiscreteHomSpace::uniform_grid(4, 1, Geometry::Interval).unwrap();
        let one = GridFunction::constant(&s, 1.0);
        let grid = EpsGrid::explicit(vec![0.25, 0.5, 0.75, 1.0 - 1e-6]).unwrap();
        let v = grand_lebesgue_norm(&one, 2.0, 1.0, &grid).unwrap();
        assert!((v - 1.0).abs() < 1e-5);
        let bad = EpsGrid::explicit(vec![0.5, 1.0]).unwrap();
        assert!(grand_lebesgue_norm(&one, 2.0, 1.0, &bad).is_err());
    }

    #[test]
    fn phi_needs_grid_points_below_s() {
        let s = DiscreteHomSpace::uniform_grid(4, 1, Geometry::Interval).unwrap();
        let f = GridFunction::constant(&s, 1.0);
        let params = GrandParams::grand_morrey(2.0, 0.25, 1.0).unwrap();
        let e0 = params.grid.points()[0];
        assert!(matches!(
            GrandEvaluator::new(&s, &params).phi(&f, e0),
            Err(NormError::EmptyGrid(_))
        ));
    }

    #[test]
    fn specialization_matches_explicit_max() {
        let s = DiscreteHomSpace::uniform_grid(7, 1, Geometry::Circle).unwrap();
        let f = GridFunction::from_fn(&s, |i| (i as f64 - 2.5).powi(2));
        let params = GrandParams::grand_morrey(2.5, 0.3, 0.7).unwrap();
        let got = grand_morrey_norm(&f, &params).unwrap().value;
        let want = params
            .grid
            .points()
            .iter()
            .filter(|&&e| e < params.s_max)
            .map(|&e| e.powf(0.7 / (2.5 - e)) * morrey_norm(&f, 2.5 - e, 0.3).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((got - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn phi_levels_match_single_calls() {
        let s = DiscreteHomSpace::uniform_grid(9, 1, Geometry::Interval).unwrap();
        let f = GridFunction::from_fn(&s, |i| if i == 3 { 2.0 } else { 0.1 });
        let params = GrandParams::new(2.0, 0.5, Profile::power(1.0), Profile::linear(1.0), &GridSpec::default()).unwrap();
        let ev = GrandEvaluator::new(&s, &params);
        let levels = [0.1, 0.3, 0.5];
        let all = ev.phi_levels(&f, &levels).unwrap();
        for (l, v) in levels.iter().zip(all) {
            assert_eq!(ev.phi(&f, *l).unwrap().value, v);
        }
    }
}
