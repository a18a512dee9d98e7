use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{DiscreteHomSpace, SpaceError};

/// Canonical test geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Equispaced points of `[0, 1]^dim` with the Euclidean metric.
    Interval,
    /// Equispaced angles of the unit circle (a flat torus for `dim = 2`) with
    /// the arc-length metric; circumference `2π`.
    Circle,
}

impl DiscreteHomSpace {
    /// Equispaced grid with `n` points per axis and uniform weights `1/n^dim`,
    /// so `μX = 1`. `C_t = C_s = 1`.
    ///
    /// Distances are computed from integer offsets, so symmetric pairs tie
    /// exactly and collapse into one ball rank.
    pub fn uniform_grid(n: usize, dim: usize, geometry: Geometry) -> Result<Self, SpaceError> {
        if n < 2 {
            return Err(SpaceError::TooFewPoints(n));
        }
        if !(1..=2).contains(&dim) {
            return Err(SpaceError::UnsupportedDimension(dim));
        }
        let total = n.pow(dim as u32);
        let unit = match geometry {
            Geometry::Interval => 1.0 / (n - 1) as f64,
            Geometry::Circle => TAU / n as f64,
        };
        let offset = |a: usize, b: usize| -> u64 {
            let k = a.abs_diff(b);
            match geometry {
                Geometry::Interval => k as u64,
                Geometry::Circle => k.min(n - k) as u64,
            }
        };
        let coord = |i: usize| -> Vec<usize> {
            if dim == 1 {
                vec![i]
            } else {
                vec![i / n, i % n]
            }
        };
        let mut dist = vec![0.0; total * total];
        for i in 0..total {
            let ci = coord(i);
            for j in 0..total {
                let cj = coord(j);
                dist[i * total + j] = if dim == 1 {
                    offset(ci[0], cj[0]) as f64 * unit
                } else {
                    let (a, b) = (offset(ci[0], cj[0]), offset(ci[1], cj[1]));
                    ((a * a + b * b) as f64).sqrt() * unit
                };
            }
        }
        let labels = (0..total)
            .map(|i| coord(i).into_iter().map(|c| c as f64 * unit).collect())
            .collect();
        let weight = vec![1.0 / total as f64; total];
        Ok(Self::from_trusted_parts(dist, weight, 1.0, 1.0, Some(labels)))
    }

    /// Euclidean point cloud with the given atom weights.
    pub fn euclidean(points: &[Vec<f64>], weight: &[f64]) -> Result<Self, SpaceError> {
        let n = points.len();
        if weight.len() != n {
            return Err(SpaceError::WeightLength {
                got: weight.len(),
                expected: n,
            });
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
            }
        }
        Self::from_parts(dist, weight.to_vec(), 1.0, 1.0, Some(points.to_vec()))
    }

    /// Skips the cubic axiom scan; only for builders whose metric is known.
    fn from_trusted_parts(
        dist: Vec<f64>,
        weight: Vec<f64>,
        ct: f64,
        cs: f64,
        labels: Option<Vec<Vec<f64>>>,
    ) -> Self {
        let n = weight.len();
        let diameter = dist.iter().copied().fold(0.0, f64::max);
        let total_measure = weight.iter().sum();
        let balls = super::BallFamily::build(n, &dist, &weight);
        Self {
            n,
            dist,
            weight,
            ct,
            cs,
            diameter,
            total_measure,
            labels,
            balls,
        }
    }
}

/// See [`DiscreteHomSpace::uniform_grid`].
pub fn build_uniform_grid(
    n: usize,
    dim: usize,
    geometry: Geometry,
) -> Result<DiscreteHomSpace, SpaceError> {
    DiscreteHomSpace::uniform_grid(n, dim, geometry)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_atom_interval() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        assert_eq!(s.dist(0, 1), 1.0);
        assert_eq!(s.weights(), &[0.5, 0.5]);
        assert_eq!(s.diameter(), 1.0);
    }

    #[test]
    fn three_point_interval_is_equispaced() {
        let s = DiscreteHomSpace::uniform_grid(3, 1, Geometry::Interval).unwrap();
        let xs: Vec<f64> = s.labels().unwrap().iter().map(|c| c[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
        for w in s.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-16);
        }
    }

    #[test]
    fn circle_diameter_is_half_circumference() {
        let s = DiscreteHomSpace::uniform_grid(8, 1, Geometry::Circle).unwrap();
        assert_eq!(s.diameter(), std::f64::consts::PI);
        for i in 0..8 {
            for j in 0..8 {
                // arc length never exceeds half the circumference
                assert!(s.dist(i, j) <= std::f64::consts::PI);
                // direct arc-length computation
                let raw = (i as f64 - j as f64).abs() * TAU / 8.0;
                assert!((s.dist(i, j) - raw.min(TAU - raw)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_tiny_grids() {
        assert_eq!(
            DiscreteHomSpace::uniform_grid(1, 1, Geometry::Interval).unwrap_err(),
            SpaceError::TooFewPoints(1)
        );
        assert_eq!(
            DiscreteHomSpace::uniform_grid(4, 3, Geometry::Circle).unwrap_err(),
            SpaceError::UnsupportedDimension(3)
        );
    }

    #[test]
    fn two_dimensional_grids_have_unit_mass() {
        for geometry in [Geometry::Interval, Geometry::Circle] {
            let s = DiscreteHomSpace::uniform_grid(5, 2, geometry).unwrap();
            assert_eq!(s.len(), 25);
            assert!((s.total_measure() - 1.0).abs() < 1e-14);
            assert_eq!(s.dist(0, 6), s.dist(6, 0));
        }
    }

    #[test]
    fn grid_round_trips_through_table_ingestion() {
        let s = DiscreteHomSpace::uniform_grid(3, 1, Geometry::Interval).unwrap();
        let t = DiscreteHomSpace::from_table(&s.dist_table(), s.weights(), s.ct(), s.cs()).unwrap();
        assert_eq!(t.dist_table(), s.dist_table());
        assert_eq!(t.weights(), s.weights());
        assert_eq!(t.diameter(), s.diameter());
    }
}
