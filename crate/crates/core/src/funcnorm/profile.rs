use serde::{Deserialize, Serialize};

use super::NormError;

/// A scalar function of `ε ≥ 0`, used both for the weight `φ` and for the
/// exponent shift `A`.
///
/// Tables are piecewise linear through `(0, 0)` and the given nodes, flat past
/// the last node. Closed forms are kept exact rather than tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Linear { slope: f64 },
    Power { coef: f64, exponent: f64 },
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl Profile {
    /// `ε^θ`.
    pub fn power(exponent: f64) -> Self {
        Profile::Power {
            coef: 1.0,
            exponent,
        }
    }

    pub fn linear(slope: f64) -> Self {
        Profile::Linear { slope }
    }

    pub fn table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, NormError> {
        let p = Profile::Table { xs, ys };
        p.validate()?;
        Ok(p)
    }

    /// Samples `f` at `xs` into a table.
    pub fn tabulate(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self, NormError> {
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::table(xs, ys)
    }

    pub fn validate(&self) -> Result<(), NormError> {
        let bad = |m: &str| Err(NormError::InvalidProfile(m.to_string()));
        match self {
            Profile::Zero => Ok(()),
            Profile::Linear { slope } if slope.is_finite() => Ok(()),
            Profile::Linear { .. } => bad("slope must be finite"),
            Profile::Power { coef, exponent }
                if coef.is_finite() && exponent.is_finite() && *exponent >= 0.0 =>
            {
                Ok(())
            }
            Profile::Power { .. } => bad("power needs finite coef and exponent ≥ 0"),
            Profile::Table { xs, ys } => {
                if xs.is_empty() || xs.len() != ys.len() {
                    return bad("table needs equally many xs and ys, at least one");
                }
                if !(xs[0] > 0.0) || xs.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("table xs must be positive and strictly increasing");
                }
                if xs.iter().chain(ys).any(|v| !v.is_finite()) {
                    return bad("table entries must be finite");
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Linear { slope } => slope * x,
            Profile::Power { coef, exponent } => {
                if *exponent == 0.0 {
                    *coef
                } else {
                    coef * x.max(0.0).powf(*exponent)
                }
            }
            Profile::Table { xs, ys } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let k = xs.partition_point(|&t| t < x);
                if k == xs.len() {
                    return ys[k - 1];
                }
                let (x0, y0) = if k == 0 { (0.0, 0.0) } else { (xs[k - 1], ys[k - 1]) };
                y0 + (ys[k] - y0) * (x - x0) / (xs[k] - x0)
            }
        }
    }

    /// Right derivative at `0`; `+∞` for sublinear powers.
    pub fn right_derivative_at_zero(&self) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Linear { slope } => *slope,
            Profile::Power { coef, exponent } => {
                if *coef == 0.0 || *exponent > 1.0 {
                    0.0
                } else if *exponent == 1.0 {
                    *coef
                } else if *exponent == 0.0 {
                    // a jump at the origin
                    f64::NAN
                } else {
                    f64::INFINITY * coef.signum()
                }
            }
            Profile::Table { xs, ys } => ys[0] / xs[0],
        }
    }

    /// `sup{x > 0 : A(x) ≤ level}`; `+∞` when `A` never exceeds `level`
    /// from some point on, `0` when no positive `x` qualifies.
    pub fn level_sup(&self, level: f64) -> f64 {
        match self {
            Profile::Zero => {
                if level >= 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Profile::Linear { slope } => {
                if *slope > 0.0 {
                    (level / slope).max(0.0)
                } else if level >= 0.0 || *slope < 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Profile::Power { coef, exponent } => {
                if *coef <= 0.0 {
                    if level >= 0.0 || *coef < 0.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else if *exponent == 0.0 {
                    if *coef <= level {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else if level <= 0.0 {
                    0.0
                } else {
                    (level / coef).powf(1.0 / exponent)
                }
            }
            Profile::Table { xs, ys } => {
                let n = xs.len();
                if ys[n - 1] <= level {
                    return f64::INFINITY;
                }
                // last node (including the anchor at the origin) not above level
                let k = (0..n).rev().find(|&i| ys[i] <= level);
                let (x0, y0) = match k {
                    Some(i) => (xs[i], ys[i]),
                    None if level >= 0.0 => (0.0, 0.0),
                    None => return 0.0,
                };
                let i1 = k.map_or(0, |i| i + 1);
                let (x1, y1) = (xs[i1], ys[i1]);
                x0 + (level - y0) / (y1 - y0) * (x1 - x0)
            }
        }
    }

    pub fn is_non_decreasing(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Linear { slope } => *slope >= 0.0,
            Profile::Power { coef, .. } => *coef >= 0.0,
            Profile::Table { ys, .. } => ys[0] >= 0.0 && ys.windows(2).all(|w| w[1] >= w[0]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_anchored_and_flat() {
        let t = Profile::table(vec![1.0, 2.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(t.eval(0.0), 0.0);
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(1.5), 2.5);
        assert_eq!(t.eval(10.0), 3.0);
        assert_eq!(t.right_derivative_at_zero(), 2.0);
    }

    #[test]
    fn level_sup_closed_forms() {
        assert_eq!(Profile::Zero.level_sup(0.25), f64::INFINITY);
        assert_eq!(Profile::linear(0.5).level_sup(0.25), 0.5);
        let p = Profile::Power {
            coef: 1.0,
            exponent: 2.0,
        };
        assert!((p.level_sup(0.25) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn level_sup_table_crossing() {
        let t = Profile::table(vec![1.0, 2.0, 3.0], vec![0.1, 0.5, 0.9]).unwrap();
        assert!((t.level_sup(0.3) - 1.5).abs() < 1e-15);
        assert!((t.level_sup(0.05) - 0.5).abs() < 1e-15);
        assert_eq!(t.level_sup(1.0), f64::INFINITY);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(Profile::table(vec![], vec![]).is_err());
        assert!(Profile::table(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(Profile::table(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(Profile::table(vec![1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn serde_tagged() {
        let p: Profile = serde_json::from_str(r#"{"kind":"power","coef":1.0,"exponent":2.0}"#).unwrap();
        assert_eq!(p, Profile::power(2.0));
        let z: Profile = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert_eq!(z, Profile::Zero);
    }
}
