use serde::{Deserialize, Serialize};

use super::{DiscreteHomSpace, SpaceError};

/// Default upper radius for the reverse-doubling fit, as a fraction of `d_X`.
/// Reverse doubling is a small-scale property; larger balls saturate at `μX`.
pub const DEFAULT_REVERSE_DOUBLING_SCALE: f64 = 0.5;

/// Where the empirical doubling constant is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingWitness {
    pub constant: f64,
    pub center: usize,
    /// Rank of the small ball `B(x, r)`.
    pub rank: usize,
    /// Rank of the ball `B(x, 2r)`.
    pub doubled_rank: usize,
}

/// `C_d = sup μB(x, 2r) / μB(x, r)` over all centers and `r > 0`.
///
/// For `r` between consecutive realized radii `ρ_k ≤ r < ρ_{k+1}` the small
/// ball is fixed while `B(x, 2r)` grows, so the supremum over that interval is
/// `μ{y : d(x, y) < 2ρ_{k+1}} / μB(x, ρ_k)`.
pub fn doubling_witness(space: &DiscreteHomSpace) -> DoublingWitness {
    let fam = space.balls();
    let mut best = DoublingWitness {
        constant: 1.0,
        center: 0,
        rank: 0,
        doubled_rank: 0,
    };
    for x in 0..space.len() {
        let range = fam.range(x);
        for k in range.start..range.end.saturating_sub(1) {
            let doubled = fam
                .last_below(x, 2.0 * fam.radius(k + 1))
                .expect("ball k+1 lies below twice its own radius");
            let ratio = fam.measure(doubled) / fam.measure(k);
            if ratio > best.constant {
                best = DoublingWitness {
                    constant: ratio,
                    center: x,
                    rank: k - range.start,
                    doubled_rank: doubled - range.start,
                };
            }
        }
    }
    best
}

pub fn doubling_constant(space: &DiscreteHomSpace) -> f64 {
    doubling_witness(space).constant
}

/// Largest value of `[μB(x,R)/μB(y,r)] / [C_d (R/r)^{log₂ C_d}]` over nested
/// realized pairs `B(y, r) ⊂ B(x, R)` with `0 < r ≤ R`. The iterated doubling
/// bound holds on the family iff the result is `≤ 1`.
///
/// Quartic in the number of points; intended for small spaces.
pub fn iterated_doubling_worst(space: &DiscreteHomSpace) -> f64 {
    let fam = space.balls();
    let cd = doubling_constant(space);
    let power = cd.log2();
    let n = space.len();
    let mut worst: f64 = 0.0;
    for y in 0..n {
        for small in fam.range(y) {
            let r = fam.radius(small);
            if r <= 0.0 {
                continue;
            }
            let members = &fam.order_row(y)[..fam.end(small)];
            for x in 0..n {
                let reach = members
                    .iter()
                    .map(|&z| space.dist(x, z as usize))
                    .fold(0.0, f64::max);
                for big in fam.range(x) {
                    let big_r = fam.radius(big);
                    if big_r < reach || big_r < r {
                        continue;
                    }
                    let lhs = fam.measure(big) / fam.measure(small);
                    let rhs = cd * (big_r / r).powf(power);
                    worst = worst.max(lhs / rhs);
                }
            }
        }
    }
    worst
}

/// Least-squares reverse-doubling fit `log(μB(x,r)/μB(x,R)) ≈ log C + γ log(r/R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseDoubling {
    pub gamma: f64,
    /// `exp` of the fitted intercept.
    pub fitted_constant: f64,
    /// Smallest `C ≥ 1` with `μB(x,r)/μB(x,R) ≤ C (r/R)^γ` on every fitted pair.
    pub envelope: f64,
    pub pairs: usize,
}

/// Fit over nested realized pairs at the same center with
/// `0 < r < R ≤ scale · d_X`.
pub fn reverse_doubling_exponent(
    space: &DiscreteHomSpace,
    scale: f64,
) -> Result<ReverseDoubling, SpaceError> {
    let fam = space.balls();
    let limit = scale * space.diameter();
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let mut count = 0usize;
    let usable = |x: usize| {
        fam.range(x)
            .filter(|&b| fam.radius(b) > 0.0 && fam.radius(b) <= limit)
            .map(|b| (fam.radius(b).ln(), fam.measure(b).ln()))
            .collect::<Vec<_>>()
    };
    for x in 0..space.len() {
        let logs = usable(x);
        for (i, &(lr, lm)) in logs.iter().enumerate() {
            for &(lr_big, lm_big) in &logs[i + 1..] {
                let (dx, dy) = (lr - lr_big, lm - lm_big);
                sx += dx;
                sy += dy;
                sxx += dx * dx;
                sxy += dx * dy;
                count += 1;
            }
        }
    }
    let m = count as f64;
    let det = m * sxx - sx * sx;
    if count < 2 || det <= 1e-12 * m * sxx {
        return Err(SpaceError::DegenerateFit(count));
    }
    let gamma = (m * sxy - sx * sy) / det;
    let intercept = (sy - gamma * sx) / m;
    let mut envelope: f64 = 1.0;
    for x in 0..space.len() {
        let logs = usable(x);
        for (i, &(lr, lm)) in logs.iter().enumerate() {
            for &(lr_big, lm_big) in &logs[i + 1..] {
                let resid = (lm - lm_big) - gamma * (lr - lr_big);
                envelope = envelope.max(resid.exp());
            }
        }
    }
    Ok(ReverseDoubling {
        gamma,
        fitted_constant: intercept.exp(),
        envelope,
        pairs: count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusFailure {
    pub center: usize,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub pass: bool,
    pub failures: Vec<AnnulusFailure>,
    /// Gaps between consecutive realized distances below `d_X`. Open balls
    /// with both radii inside such a gap have an empty annulus.
    pub open_gaps: usize,
    pub notes: Vec<String>,
}

/// `μ(B(x,R) \ B(x,r)) > 0` for realized radii `r < R < d_X` at every center.
pub fn check_annulus(space: &DiscreteHomSpace) -> AnnulusReport {
    let fam = space.balls();
    let d_x = space.diameter();
    let mut failures = Vec::new();
    let mut open_gaps = 0;
    for x in 0..space.len() {
        let range = fam.range(x);
        for k in range.start..range.end.saturating_sub(1) {
            let (inner, outer) = (fam.radius(k), fam.radius(k + 1));
            if outer >= d_x {
                continue;
            }
            open_gaps += 1;
            if fam.measure(k + 1) - fam.measure(k) <= 0.0 {
                failures.push(AnnulusFailure { center: x, inner, outer });
            }
        }
    }
    let mut notes = Vec::new();
    if open_gaps > 0 {
        notes.push(format!(
            "{open_gaps} gaps between consecutive realized radii: open-ball annuli inside a gap \
             are empty; closed balls at realized radii are used instead"
        ));
    }
    AnnulusReport {
        pass: failures.is_empty(),
        failures,
        open_gaps,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::Geometry;

    #[test]
    fn two_atoms_double_exactly() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let w = doubling_witness(&s);
        assert_eq!(w.constant, 2.0);
        assert_eq!((w.rank, w.doubled_rank), (0, 1));
    }

    #[test]
    fn single_atom_has_trivial_doubling() {
        let s = DiscreteHomSpace::from_table(&[vec![0.0]], &[1.0], 1.0, 1.0).unwrap();
        assert_eq!(doubling_constant(&s), 1.0);
    }

    /// Brute force over a dense set of radii, independent of the rank formula.
    fn brute_doubling(s: &DiscreteHomSpace) -> f64 {
        let mut best: f64 = 1.0;
        let ball = |x: usize, r: f64| -> f64 {
            (0..s.len())
                .filter(|&y| s.dist(x, y) <= r)
                .map(|y| s.weight(y))
                .sum()
        };
        let steps = 4000;
        for x in 0..s.len() {
            for i in 1..=steps {
                let r = s.diameter() * i as f64 / steps as f64;
                best = best.max(ball(x, 2.0 * r) / ball(x, r));
            }
        }
        best
    }

    #[test]
    fn interval_grid_doubling_matches_brute_force() {
        let s = DiscreteHomSpace::uniform_grid(8, 1, Geometry::Interval).unwrap();
        let cd = doubling_constant(&s);
        assert!(cd <= 3.0 + 1e-12);
        assert!((cd - brute_doubling(&s)).abs() < 1e-12, "{cd}");
    }

    #[test]
    fn reverse_doubling_two_atoms_is_degenerate() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        assert!(matches!(
            reverse_doubling_exponent(&s, DEFAULT_REVERSE_DOUBLING_SCALE),
            Err(SpaceError::DegenerateFit(_))
        ));
    }

    #[test]
    fn equal_distances_pass_annulus_vacuously() {
        let table = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let s = DiscreteHomSpace::from_table(&table, &[1.0; 3], 1.0, 1.0).unwrap();
        let report = check_annulus(&s);
        assert!(report.pass);
        assert_eq!(report.open_gaps, 0);
    }

    #[test]
    fn open_gap_is_noted_but_passes() {
        // distances 1 and 3: open balls with 1 < r < R < 3 have an empty annulus
        let table = vec![
            vec![0.0, 1.0, 3.0, 4.0],
            vec![1.0, 0.0, 2.0, 3.0],
            vec![3.0, 2.0, 0.0, 1.0],
            vec![4.0, 3.0, 1.0, 0.0],
        ];
        let s = DiscreteHomSpace::from_table(&table, &[0.25; 4], 1.0, 1.0).unwrap();
        let report = check_annulus(&s);
        assert!(report.pass);
        assert!(report.open_gaps > 0);
        assert_eq!(report.notes.len(), 1);
    }
}
