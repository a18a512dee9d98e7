use serde::{Deserialize, Serialize};

use super::oscillation::{for_each_ball, Oscillation};
use super::{GridFunction, NormError, NormValue};

/// Three equivalent ways of measuring bounded mean oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BmoVariant {
    /// `max_B avg_B |b − b_B|`.
    Mean,
    /// `max_B min_c avg_B |b − c|`, attained at a weighted median.
    Inf,
    /// `max_B (avg_B |b − b_B|^p)^{1/p}`.
    JohnNirenberg { p: f64 },
}

impl BmoVariant {
    pub fn name(&self) -> String {
        match self {
            BmoVariant::Mean => "mean".into(),
            BmoVariant::Inf => "inf".into(),
            BmoVariant::JohnNirenberg { p } => format!("jn({p})"),
        }
    }
}

pub fn bmo_norm(b: &GridFunction, variant: BmoVariant) -> Result<f64, NormError> {
    bmo_norm_argmax(b, variant).map(|v| v.value)
}

pub fn bmo_norm_argmax(b: &GridFunction, variant: BmoVariant) -> Result<NormValue, NormError> {
    let space = b.space();
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    let mut consider = |v: f64, ball: usize| {
        if v > best {
            best = v;
            arg = ball;
        }
    };
    match variant {
        BmoVariant::Mean => for_each_ball(space, b.values(), |_, ball, o| consider(o.about_mean, ball)),
        BmoVariant::Inf => for_each_ball(space, b.values(), |_, ball, o| consider(o.about_median, ball)),
        BmoVariant::JohnNirenberg { p } => {
            if !(p > 1.0 && p.is_finite()) {
                return Err(NormError::InvalidParameter {
                    name: "p",
                    value: p,
                    requirement: "1 < p < ∞",
                });
            }
            let fam = space.balls();
            let w = space.weights();
            let vals = b.values();
            for ball in fam.iter() {
                let (mut wt, mut sum) = (0.0, 0.0);
                for &y in ball.members {
                    wt += w[y as usize];
                    sum += w[y as usize] * vals[y as usize];
                }
                let mean = sum / wt;
                let dev: f64 = ball
                    .members
                    .iter()
                    .map(|&y| w[y as usize] * (vals[y as usize] - mean).abs().powf(p))
                    .sum();
                consider((dev / wt).powf(1.0 / p), ball.index);
            }
        }
    }
    Ok(NormValue::at_ball(best, space, arg, None))
}

/// Mean and median oscillation of `b` on every realized ball, in flat ball order.
pub fn ball_oscillations(b: &GridFunction) -> Vec<Oscillation> {
    let mut out = Vec::with_capacity(b.space().balls().len());
    for_each_ball(b.space(), b.values(), |_, _, o| out.push(o));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::{DiscreteHomSpace, Geometry};

    #[test]
    fn two_atom_examples() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let b = GridFunction::new(&s, vec![0.0, 1.0]).unwrap();
        assert!((bmo_norm(&b, BmoVariant::Mean).unwrap() - 0.5).abs() < 1e-15);
        assert!((bmo_norm(&b, BmoVariant::Inf).unwrap() - 0.5).abs() < 1e-15);
        assert!((bmo_norm(&b, BmoVariant::JohnNirenberg { p: 2.0 }).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constants_vanish() {
        let s = DiscreteHomSpace::uniform_grid(6, 1, Geometry::Circle).unwrap();
        let b = GridFunction::constant(&s, 0.3);
        for v in [BmoVariant::Mean, BmoVariant::Inf, BmoVariant::JohnNirenberg { p: 3.0 }] {
            assert!(bmo_norm(&b, v).unwrap() < 1e-15);
        }
    }

    #[test]
    fn jn_rejects_p_one() {
        let s = DiscreteHomSpace::uniform_grid(2, 1, Geometry::Interval).unwrap();
        let b = GridFunction::zeros(&s);
        assert!(bmo_norm(&b, BmoVariant::JohnNirenberg { p: 1.0 }).is_err());
    }
}
