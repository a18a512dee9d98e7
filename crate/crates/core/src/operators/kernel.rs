use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::maximal::DenseMatrix;
use super::{Operator, OperatorError};
use crate::funcnorm::{lp_norm, GridFunction};
use crate::homspace::DiscreteHomSpace;

/// Nodes per octave and number of octaves used to tabulate a modulus.
const NODES_PER_OCTAVE: usize = 8;
const OCTAVES: usize = 64;
/// Relative growth of the dyadic partial sums, between `K/2` and `K` terms,
/// above which the series is reported as divergent.
const CAUCHY_TOLERANCE: f64 = 1e-2;

/// A smoothness modulus `w` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// `t^exponent`.
    Power { exponent: f64 },
    /// `1 / log(e/t)` on `(0, 1]`, `1` beyond.
    LogInverse,
    /// Log-log interpolation through `(ts, ws)`, power-law extrapolation.
    Table { ts: Vec<f64>, ws: Vec<f64> },
}

impl Modulus {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Modulus::Power { exponent } => t.powf(*exponent),
            Modulus::LogInverse => {
                if t >= 1.0 {
                    1.0
                } else {
                    1.0 / (E / t).ln()
                }
            }
            Modulus::Table { ts, ws } => {
                if ts.len() == 1 {
                    return ws[0];
                }
                let k = ts.partition_point(|&x| x < t).clamp(1, ts.len() - 1);
                let (t0, t1, w0, w1) = (ts[k - 1], ts[k], ws[k - 1], ws[k]);
                let a = (w1 / w0).ln() / (t1 / t0).ln();
                w0 * (t / t0).powf(a)
            }
        }
    }

    fn validate(&self) -> Result<(), OperatorError> {
        let bad = |m: &str| Err(OperatorError::InvalidModulus(m.into()));
        match self {
            Modulus::Power { exponent } if *exponent > 0.0 && exponent.is_finite() => Ok(()),
            Modulus::Power { .. } => bad("power modulus needs a positive finite exponent"),
            Modulus::LogInverse => Ok(()),
            Modulus::Table { ts, ws } => {
                if ts.is_empty() || ts.len() != ws.len() {
                    return bad("table needs equally many ts and ws");
                }
                if !(ts[0] > 0.0) || ts.windows(2).any(|p| !(p[1] > p[0])) {
                    return bad("ts must be positive and strictly increasing");
                }
                if ws.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                    return bad("ws must be positive and finite");
                }
                Ok(())
            }
        }
    }
}

/// Dini integral and dyadic series of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiniReport {
    /// `∫₀¹ w(t)/t dt`.
    pub integral: f64,
    /// `Σ_{k=1}^{K} w(2^{-k})`.
    pub series: f64,
    pub terms: usize,
    /// `sup w(2t)/w(t)` on the table.
    pub delta2: f64,
}

/// `∫₀¹ w(t)/t dt` and `Σ w(2^{-k})`.
///
/// `w` is tabulated at `t_j = 2^{-j/8}` down to `2^{-64}`; between nodes it is
/// treated as a power of `t`, which integrates exactly against `dt/t`, and the
/// segment below the last node continues the last power law. Pure powers are
/// therefore integrated without discretization error.
pub fn dini_integral(w: &Modulus) -> Result<DiniReport, OperatorError> {
    w.validate()?;
    let m = NODES_PER_OCTAVE * OCTAVES;
    let h = std::f64::consts::LN_2 / NODES_PER_OCTAVE as f64;
    let ws: Vec<f64> = (0..=m)
        .map(|j| w.eval((-(j as f64) * h).exp()))
        .collect();
    if ws.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(OperatorError::InvalidModulus("w must be positive on (0, 1]".into()));
    }
    if ws.windows(2).any(|p| p[1] > p[0]) {
        return Err(OperatorError::InvalidModulus("w must be non-decreasing".into()));
    }
    let mut integral = 0.0;
    let mut last_exp = 0.0;
    for p in ws.windows(2) {
        let a = (p[0] / p[1]).ln() / h;
        integral += if a > 0.0 { (p[0] - p[1]) / a } else { p[0] * h };
        last_exp = a;
    }
    integral += if last_exp > 0.0 { ws[m] / last_exp } else { f64::INFINITY };
    let term = |k: usize| ws[k * NODES_PER_OCTAVE];
    let series: f64 = (1..=OCTAVES).map(term).sum();
    let half: f64 = (1..=OCTAVES / 2).map(term).sum();
    let delta2 = (NODES_PER_OCTAVE..=m)
        .map(|j| ws[j - NODES_PER_OCTAVE] / ws[j])
        .fold(1.0, f64::max);
    let cauchy = (series - half) / series;
    if !integral.is_finite() || cauchy > CAUCHY_TOLERANCE {
        return Err(OperatorError::DivergenceSuspected {
            integral,
            series,
            cauchy,
        });
    }
    Ok(DiniReport {
        integral,
        series,
        terms: OCTAVES,
        delta2,
    })
}

/// Built-in singular kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `cot((θx − θy)/2)` on angle labels, normalized to the total measure.
    CircleConjugate,
    /// `1/(π(x − y))` on coordinate labels, normalized to the total measure.
    IntervalHilbert,
    /// A user-supplied dense table.
    Table,
}

/// A dense singular kernel on one space, with its size constant, smoothness
/// modulus and Dini data.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    kind: KernelKind,
    n: usize,
    /// `K(x, y)`, row-major; the diagonal is ignored.
    kernel: Vec<f64>,
    size_constant: f64,
    modulus: Modulus,
    dini: DiniReport,
}

/// `μ{z : d(x, z) < d(x, y)}`, the measure bounding the kernel size.
fn size_measure(space: &DiscreteHomSpace, x: usize, y: usize) -> f64 {
    space.balls().open_measure(x, y)
}

fn scalar_labels(space: &DiscreteHomSpace, kernel: &'static str) -> Result<Vec<f64>, OperatorError> {
    match space.labels() {
        Some(l) if l.iter().all(|c| c.len() == 1) => Ok(l.iter().map(|c| c[0]).collect()),
        _ => Err(OperatorError::MissingLabels(kernel)),
    }
}

impl KernelSpec {
    /// Conjugate-function kernel; labels are angles in radians.
    pub fn circle_conjugate(space: &DiscreteHomSpace) -> Result<Self, OperatorError> {
        let th = scalar_labels(space, "circle_conjugate")?;
        let scale = 1.0 / space.total_measure();
        let n = space.len();
        let kernel = Self::fill(n, |x, y| scale / ((th[x] - th[y]) / 2.0).tan());
        Self::build(space, KernelKind::CircleConjugate, kernel, None, Modulus::Power { exponent: 1.0 })
    }

    /// Hilbert kernel on a line segment; labels are coordinates.
    pub fn interval_hilbert(space: &DiscreteHomSpace) -> Result<Self, OperatorError> {
        let xs = scalar_labels(space, "interval_hilbert")?;
        let (lo, hi) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let scale = (hi - lo) / space.total_measure();
        let n = space.len();
        let kernel = Self::fill(n, |x, y| scale / (PI * (xs[x] - xs[y])));
        Self::build(space, KernelKind::IntervalHilbert, kernel, None, Modulus::Power { exponent: 1.0 })
    }

    /// A dense `N×N` table. With `size_constant` given, every off-diagonal
    /// entry must respect it; otherwise the smallest valid one is computed.
    pub fn from_table(
        space: &DiscreteHomSpace,
        table: &[Vec<f64>],
        size_constant: Option<f64>,
        modulus: Modulus,
    ) -> Result<Self, OperatorError> {
        let n = space.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(OperatorError::KernelShape {
                rows: table.len(),
                expected: n,
            });
        }
        let kernel: Vec<f64> = table.iter().flatten().copied().collect();
        if let Some((i, v)) = kernel
            .iter()
            .enumerate()
            .find(|(i, v)| i / n != i % n && !v.is_finite())
        {
            return Err(OperatorError::NonFiniteKernel {
                x: i / n,
                y: i % n,
                value: *v,
            });
        }
        Self::build(space, KernelKind::Table, kernel, size_constant, modulus)
    }

    fn fill(n: usize, k: impl Fn(usize, usize) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    out[x * n + y] = k(x, y);
                }
            }
        }
        out
    }

    fn build(
        space: &DiscreteHomSpace,
        kind: KernelKind,
        mut kernel: Vec<f64>,
        declared: Option<f64>,
        modulus: Modulus,
    ) -> Result<Self, OperatorError> {
        let n = space.len();
        for x in 0..n {
            kernel[x * n + x] = 0.0;
        }
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let v = kernel[x * n + y].abs() * size_measure(space, x, y);
                if let Some(c) = declared {
                    if v > c * (1.0 + 1e-12) {
                        return Err(OperatorError::KernelSizeViolation {
                            x,
                            y,
                            value: v,
                            bound: c,
                        });
                    }
                }
                worst = worst.max(v);
            }
        }
        let dini = dini_integral(&modulus)?;
        Ok(Self {
            kind,
            n,
            kernel,
            size_constant: declared.unwrap_or(worst),
            modulus,
            dini,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.kernel[x * self.n + y]
    }

    /// `C` in `|K(x,y)| ≤ C / μ{z : d(x,z) < d(x,y)}`.
    pub fn size_constant(&self) -> f64 {
        self.size_constant
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn dini(&self) -> &DiniReport {
        &self.dini
    }
}

/// `Tf(x) = Σ_{y≠x} K(x,y) f(y) μ{y}`.
#[derive(Debug, Clone)]
pub struct CzOperator<'s> {
    space: &'s DiscreteHomSpace,
    spec: KernelSpec,
    matrix: DenseMatrix,
}

impl<'s> CzOperator<'s> {
    pub fn new(space: &'s DiscreteHomSpace, spec: KernelSpec) -> Result<Self, OperatorError> {
        let n = space.len();
        if spec.n != n {
            return Err(OperatorError::KernelShape {
                rows: spec.n,
                expected: n,
            });
        }
        let w = space.weights();
        let a = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                if x == y {
                    0.0
                } else {
                    spec.kernel[i] * w[y]
                }
            })
            .collect();
        Ok(Self {
            space,
            spec,
            matrix: DenseMatrix::new(n, a),
        })
    }

    pub fn circle_conjugate(space: &'s DiscreteHomSpace) -> Result<Self, OperatorError> {
        Self::new(space, KernelSpec::circle_conjugate(space)?)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }
}

impl Operator for CzOperator<'_> {
    fn name(&self) -> String {
        match self.spec.kind {
            KernelKind::CircleConjugate => "cz(circle_conjugate)".into(),
            KernelKind::IntervalHilbert => "cz(interval_hilbert)".into(),
            KernelKind::Table => "cz(table)".into(),
        }
    }
    fn apply<'a>(&self, f: &GridFunction<'a>) -> Result<GridFunction<'a>, OperatorError> {
        self.matrix.apply(self.space, f)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// Apply a kernel once without keeping the operator around.
pub fn cz_apply<'s>(kernel: &KernelSpec, f: &GridFunction<'s>) -> Result<GridFunction<'s>, OperatorError> {
    CzOperator::new(f.space(), kernel.clone())?.apply(f)
}

/// Best constant in the smoothness condition for a given separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// Pairs qualify when `d(x₁, y) ≥ separation · d(x₁, x₂)`.
    pub separation: f64,
    /// `max |K(x₁,y) − K(x₂,y)| · μ{d(x₁,·) < d(x₁,y)} / w(d(x₁,x₂)/d(x₁,y))`.
    pub constant: f64,
    /// `(x₁, x₂, y)` attaining it.
    pub witness: Option<(usize, usize, usize)>,
    pub triples: usize,
}

/// Estimates the smoothness constant of `kernel` by scanning every
/// qualifying triple, `O(N³)`.
pub fn smoothness_envelope(space: &DiscreteHomSpace, kernel: &KernelSpec, separation: f64) -> SmoothnessReport {
    let n = space.len();
    let mut best = 0.0;
    let mut witness = None;
    let mut triples = 0;
    for x1 in 0..n {
        for x2 in 0..n {
            if x1 == x2 {
                continue;
            }
            let d12 = space.dist(x1, x2);
            for y in 0..n {
                if y == x1 || y == x2 {
                    continue;
                }
                let d1y = space.dist(x1, y);
                if d1y < separation * d12 {
                    continue;
                }
                triples += 1;
                let diff = (kernel.get(x1, y) - kernel.get(x2, y)).abs();
                let r = diff * size_measure(space, x1, y) / kernel.modulus.eval(d12 / d1y);
                if r > best {
                    best = r;
                    witness = Some((x1, x2, y));
                }
            }
        }
    }
    SmoothnessReport {
        separation,
        constant: best,
        witness,
        triples,
    }
}

/// `max ‖Tf‖₂ / ‖f‖₂` over the given functions, skipping zeros; with the
/// index attaining it.
pub fn l2_ratio(op: &dyn Operator, fs: &[GridFunction]) -> Result<Option<(f64, usize)>, OperatorError> {
    let mut best: Option<(f64, usize)> = None;
    for (i, f) in fs.iter().enumerate() {
        let den = lp_norm(f, 2.0).expect("p = 2 is valid");
        if den == 0.0 {
            continue;
        }
        let r = lp_norm(&op.apply(f)?, 2.0).expect("p = 2 is valid") / den;
        if best.is_none_or(|(b, _)| r > b) {
            best = Some((r, i));
        }
    }
    Ok(best)
}
