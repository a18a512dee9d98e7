//! Finite quasi-metric measure spaces and their ball families.
//!
//! A [`DiscreteHomSpace`] is a finite point set `0..n` carrying a quasi-metric
//! table, strictly positive atomic weights, and the declared quasi-triangle and
//! quasi-symmetry constants. Balls are closed balls at realized radii: for a
//! center `x` and every distinct distance `ρ` from `x`, the ball is
//! `{y : d(x, y) ≤ ρ}`. Every supremum over radii therefore becomes a maximum over
//! a finite, deterministic family (see [`BallFamily`]).

mod balls;
mod build;
mod diagnostics;
mod io;

pub use balls::{Ball, BallFamily};
pub use build::{build_uniform_grid, Geometry};
pub use diagnostics::{
    check_annulus, doubling_constant, doubling_witness, iterated_doubling_worst,
    reverse_doubling_exponent, AnnulusFailure, AnnulusReport, DoublingWitness, ReverseDoubling,
    DEFAULT_REVERSE_DOUBLING_SCALE,
};
pub use io::{read_point_csv, read_space_json, SpaceFile, SpaceIoError};

use thiserror::Error;

/// Relative slack applied to the quasi-triangle and quasi-symmetry checks so that
/// floating-point round-off on collinear Euclidean points is not reported as a
/// violation.
pub const AXIOM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("a grid needs at least 2 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("unsupported grid dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("empty space")]
    Empty,
    #[error("distance table row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("{got} weights supplied for {expected} points")]
    WeightLength { got: usize, expected: usize },
    #[error("d({i},{j}) = {value} is not a finite non-negative number")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("d({0},{0}) = {1} must be zero")]
    NonZeroDiagonal(usize, f64),
    #[error("d({0},{1}) = 0 for distinct points")]
    ZeroDistanceOffDiagonal(usize, usize),
    #[error("weight of point {0} is not strictly positive and finite")]
    NonPositiveWeight(usize),
    #[error("quasi-symmetry violated: d({0},{1}) > C_s d({1},{0})")]
    SymmetryViolation(usize, usize),
    #[error("quasi-triangle violated: d({0},{1}) > C_t (d({0},{2}) + d({2},{1}))")]
    QuasiTriangleViolation(usize, usize, usize),
    #[error("constant {name} = {value} must be finite and positive")]
    InvalidConstant { name: &'static str, value: f64 },
    #[error("{0} labels supplied for {1} points")]
    LabelLength(usize, usize),
    #[error("degenerate reverse-doubling fit: {0} usable ball pairs")]
    DegenerateFit(usize),
}

/// The triplet `(X, d, μ)` on a finite set, with its cached ball family.
///
/// Immutable after construction; share it freely between threads.
#[derive(Debug, Clone)]
pub struct DiscreteHomSpace {
    n: usize,
    dist: Vec<f64>,
    weight: Vec<f64>,
    ct: f64,
    cs: f64,
    diameter: f64,
    total_measure: f64,
    labels: Option<Vec<Vec<f64>>>,
    balls: BallFamily,
}

impl DiscreteHomSpace {
    /// Validates every axiom and builds the ball family.
    ///
    /// `dist` is row-major `n × n`. Checks run in a fixed order (shape, weights,
    /// distances, symmetry, triangle) and the first witness found is returned.
    pub fn from_parts(
        dist: Vec<f64>,
        weight: Vec<f64>,
        ct: f64,
        cs: f64,
        labels: Option<Vec<Vec<f64>>>,
    ) -> Result<Self, SpaceError> {
        let n = weight.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        if dist.len() != n * n {
            return Err(SpaceError::WeightLength {
                got: n,
                expected: (dist.len() as f64).sqrt() as usize,
            });
        }
        for (name, value) in [("C_t", ct), ("C_s", cs)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SpaceError::InvalidConstant { name, value });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(SpaceError::LabelLength(labels.len(), n));
            }
        }
        if let Some(i) = weight.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SpaceError::NonPositiveWeight(i));
        }
        for i in 0..n {
            for j in 0..n {
                let d = dist[i * n + j];
                if !(d.is_finite() && d >= 0.0) {
                    return Err(SpaceError::InvalidDistance { i, j, value: d });
                }
                if i == j && d != 0.0 {
                    return Err(SpaceError::NonZeroDiagonal(i, d));
                }
                if i != j && d == 0.0 {
                    return Err(SpaceError::ZeroDistanceOffDiagonal(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if dist[i * n + j] > cs * dist[j * n + i] * (1.0 + AXIOM_SLACK) {
                    return Err(SpaceError::SymmetryViolation(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = dist[i * n + j];
                for k in 0..n {
                    let via = dist[i * n + k] + dist[k * n + j];
                    if dij > ct * via * (1.0 + AXIOM_SLACK) {
                        return Err(SpaceError::QuasiTriangleViolation(i, j, k));
                    }
                }
            }
        }
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        let total_measure = weight.iter().sum();
        let balls = BallFamily::build(n, &dist, &weight);
        Ok(Self {
            n,
            dist,
            weight,
            ct,
            cs,
            diameter,
            total_measure,
            labels,
            balls,
        })
    }

    /// Ingests a square table of quasi-metric values with declared constants.
    pub fn from_table(
        table: &[Vec<f64>],
        weight: &[f64],
        ct: f64,
        cs: f64,
    ) -> Result<Self, SpaceError> {
        let n = table.len();
        if weight.len() != n {
            return Err(SpaceError::WeightLength {
                got: weight.len(),
                expected: n,
            });
        }
        let mut dist = Vec::with_capacity(n * n);
        for (row, values) in table.iter().enumerate() {
            if values.len() != n {
                return Err(SpaceError::NotSquare {
                    row,
                    len: values.len(),
                    expected: n,
                });
            }
            dist.extend_from_slice(values);
        }
        Self::from_parts(dist, weight.to_vec(), ct, cs, None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Row `i` of the distance table.
    pub fn dist_row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn dist_table(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    pub fn ct(&self) -> f64 {
        self.ct
    }

    pub fn cs(&self) -> f64 {
        self.cs
    }

    /// `d_X`, the largest entry of the distance table.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `μX`.
    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn labels(&self) -> Option<&[Vec<f64>]> {
        self.labels.as_deref()
    }

    pub fn balls(&self) -> &BallFamily {
        &self.balls
    }

    /// Smallest positive distance in the table (0 for a single atom).
    pub fn min_positive_distance(&self) -> f64 {
        let min = self
            .dist
            .iter()
            .copied()
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            min
        } else {
            0.0
        }
    }
}

/// The cached closed-ball family of a space.
pub fn realized_balls(space: &DiscreteHomSpace) -> &BallFamily {
    space.balls()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_point(d02: f64) -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 1.0, d02],
            vec![1.0, 0.0, 1.0],
            vec![d02, 1.0, 0.0],
        ]
    }

    #[test]
    fn triangle_violation_names_witness() {
        let err = DiscreteHomSpace::from_table(&three_point(5.0), &[1.0; 3], 1.0, 1.0).unwrap_err();
        assert_eq!(err, SpaceError::QuasiTriangleViolation(0, 2, 1));
        // a looser constant admits the same table
        assert!(DiscreteHomSpace::from_table(&three_point(5.0), &[1.0; 3], 2.5, 1.0).is_ok());
    }

    #[test]
    fn zero_off_diagonal_rejected() {
        let table = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let err = DiscreteHomSpace::from_table(&table, &[0.5, 0.5], 1.0, 1.0).unwrap_err();
        assert_eq!(err, SpaceError::ZeroDistanceOffDiagonal(0, 1));
    }

    #[test]
    fn weights_must_be_positive() {
        let table = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let err = DiscreteHomSpace::from_table(&table, &[0.5, 0.0], 1.0, 1.0).unwrap_err();
        assert_eq!(err, SpaceError::NonPositiveWeight(1));
    }

    #[test]
    fn asymmetry_needs_symmetry_constant() {
        let table = vec![vec![0.0, 2.0], vec![1.0, 0.0]];
        let err = DiscreteHomSpace::from_table(&table, &[0.5, 0.5], 1.0, 1.0).unwrap_err();
        assert_eq!(err, SpaceError::SymmetryViolation(0, 1));
        let ok = DiscreteHomSpace::from_table(&table, &[0.5, 0.5], 1.0, 2.0).unwrap();
        assert_eq!(ok.diameter(), 2.0);
    }

    #[test]
    fn ragged_table_rejected() {
        let table = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            DiscreteHomSpace::from_table(&table, &[0.5, 0.5], 1.0, 1.0),
            Err(SpaceError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn single_atom_is_a_space() {
        let s = DiscreteHomSpace::from_table(&[vec![0.0]], &[1.0], 1.0, 1.0).unwrap();
        assert_eq!(s.diameter(), 0.0);
        assert_eq!(s.balls().n_ranks(0), 1);
    }
}
