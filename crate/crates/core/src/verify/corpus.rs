//! Deterministic random test functions.
//!
//! Sample `i` of a corpus depends only on `(seed, family, i)`, never on the
//! corpus size, so a corpus of size `2m` starts with the corpus of size `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::funcnorm::GridFunction;
use crate::homspace::DiscreteHomSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Steps, trigonometric polynomials, spikes and mixtures in rotation.
    Mixed,
    /// Linear combinations of indicator functions of random balls.
    Steps,
    /// Low-frequency trigonometric polynomials in the point labels.
    Trig,
    /// A single nonzero atom.
    Spikes,
    /// Signed sums of the other three shapes.
    Mixtures,
    /// Multipliers of bounded mean oscillation: offset ball steps and
    /// clipped logarithmic profiles.
    Bmo,
}

impl Family {
    fn tag(self) -> u64 {
        match self {
            Family::Mixed => 0x6d69_7865_6400_0001,
            Family::Steps => 0x7374_6570_7300_0002,
            Family::Trig => 0x7472_6967_0000_0003,
            Family::Spikes => 0x7370_696b_6500_0004,
            Family::Mixtures => 0x6d69_7874_7500_0005,
            Family::Bmo => 0x626d_6f00_0000_0006,
        }
    }
}

/// Which functions a check runs on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub family: Family,
    pub size: usize,
    pub seed: u64,
    /// Subtract the mean of every sample.
    #[serde(default)]
    pub mean_zero: bool,
}

impl CorpusSpec {
    pub fn new(family: Family, size: usize, seed: u64) -> Self {
        Self {
            family,
            size,
            seed,
            mean_zero: false,
        }
    }

    pub fn mean_zero(mut self) -> Self {
        self.mean_zero = true;
        self
    }

    pub fn generate<'s>(&self, space: &'s DiscreteHomSpace) -> Vec<GridFunction<'s>> {
        (0..self.size).map(|i| self.sample(space, i)).collect()
    }

    pub fn sample<'s>(&self, space: &'s DiscreteHomSpace, index: usize) -> GridFunction<'s> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ self.family.tag());
        rng.set_stream(index as u64);
        let shape = |k: usize| match k % 4 {
            0 => Family::Steps,
            1 => Family::Trig,
            2 => Family::Spikes,
            _ => Family::Mixtures,
        };
        let family = if self.family == Family::Mixed {
            shape(index)
        } else {
            self.family
        };
        let values = match family {
            Family::Steps => steps(space, &mut rng),
            Family::Trig => trig(space, &mut rng),
            Family::Spikes => spike(space, &mut rng),
            Family::Mixtures => mixture(space, &mut rng),
            Family::Bmo => bmo(space, &mut rng, index),
            Family::Mixed => unreachable!(),
        };
        let f = GridFunction::new(space, values).expect("generated values are finite");
        if self.mean_zero {
            f.centered()
        } else {
            f
        }
    }
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn random_ball(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let fam = space.balls();
    let x = rng.gen_range(0..space.len());
    let rank = rng.gen_range(0..fam.n_ranks(x));
    fam.ball(x, rank).members.iter().map(|&y| y as usize).collect()
}

fn steps(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = vec![0.0; space.len()];
    for _ in 0..rng.gen_range(1..=3) {
        let c = signed(rng, 0.2, 1.0);
        for y in random_ball(space, rng) {
            v[y] += c;
        }
    }
    v
}

/// Per-coordinate phase variables: labels rescaled so that integer
/// frequencies are periodic on equispaced grids (exactly so on the circle).
fn phases(space: &DiscreteHomSpace) -> Option<Vec<Vec<f64>>> {
    let labels = space.labels()?;
    let dim = labels.first()?.len();
    let mut scaled = vec![Vec::with_capacity(dim); labels.len()];
    for d in 0..dim {
        let mut coords: Vec<f64> = labels.iter().map(|l| l[d]).collect();
        let raw = coords.clone();
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        let (lo, hi) = (coords[0], coords[coords.len() - 1]);
        let gap = coords
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let period = if gap.is_finite() { hi - lo + gap } else { 1.0 };
        for (i, x) in raw.iter().enumerate() {
            scaled[i].push(std::f64::consts::TAU * (x - lo) / period);
        }
    }
    Some(scaled)
}

fn trig(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = space.len();
    let terms = rng.gen_range(1..=8);
    let mut v = vec![0.0; n];
    match phases(space) {
        Some(t) => {
            let dim = t[0].len();
            for _ in 0..terms {
                let freq: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..=6) as f64).collect();
                let k = freq.iter().map(|f| f * f).sum::<f64>().sqrt().max(1.0);
                let amp = signed(rng, 0.1, 1.0) / k;
                let shift = rng.gen_range(0.0..std::f64::consts::TAU);
                for (i, ti) in t.iter().enumerate() {
                    let arg: f64 = ti.iter().zip(&freq).map(|(a, b)| a * b).sum();
                    v[i] += amp * (arg + shift).cos();
                }
            }
        }
        None => {
            let diam = space.diameter();
            for _ in 0..terms {
                let x0 = rng.gen_range(0..n);
                let omega = rng.gen_range(1..=6) as f64 * std::f64::consts::PI / diam;
                let amp = signed(rng, 0.1, 1.0);
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi += amp * (omega * space.dist(x0, i)).cos();
                }
            }
        }
    }
    // a constant polynomial would make every ratio degenerate for oscillation checks
    if v.iter().all(|x| x.abs() < 1e-12) {
        v[rng.gen_range(0..n)] = 1.0;
    }
    v
}

fn spike(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = vec![0.0; space.len()];
    v[rng.gen_range(0..space.len())] = signed(rng, 0.5, 2.0);
    v
}

fn mixture(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let a = steps(space, rng);
    let b = trig(space, rng);
    let c = spike(space, rng);
    let (wa, wb, wc) = (signed(rng, 0.2, 1.0), signed(rng, 0.2, 1.0), signed(rng, 0.2, 1.0));
    a.iter()
        .zip(&b)
        .zip(&c)
        .map(|((x, y), z)| wa * x + wb * y + wc * z)
        .collect()
}

fn bmo(space: &DiscreteHomSpace, rng: &mut ChaCha8Rng, index: usize) -> Vec<f64> {
    let offset = rng.gen_range(-1.0..1.0);
    if index % 2 == 0 {
        let c = signed(rng, 0.5, 2.0);
        let mut v = vec![offset; space.len()];
        for y in random_ball(space, rng) {
            v[y] += c;
        }
        v
    } else {
        let diam = space.diameter();
        let floor = space.min_positive_distance() / diam;
        let x0 = rng.gen_range(0..space.len());
        let amp = signed(rng, 0.5, 1.5);
        (0..space.len())
            .map(|y| offset + amp * (1.0 / (space.dist(x0, y) / diam).max(floor)).ln())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homspace::Geometry;

    #[test]
    fn samples_do_not_depend_on_size() {
        let s = DiscreteHomSpace::uniform_grid(32, 1, Geometry::Circle).unwrap();
        let small = CorpusSpec::new(Family::Mixed, 5, 11).generate(&s);
        let big = CorpusSpec::new(Family::Mixed, 10, 11).generate(&s);
        for (a, b) in small.iter().zip(&big) {
            assert_eq!(a.values(), b.values());
        }
        let other = CorpusSpec::new(Family::Mixed, 5, 12).generate(&s);
        assert_ne!(small[0].values(), other[0].values());
    }

    #[test]
    fn mean_zero_corpus() {
        let s = DiscreteHomSpace::uniform_grid(16, 1, Geometry::Interval).unwrap();
        for f in CorpusSpec::new(Family::Mixed, 8, 3).mean_zero().generate(&s) {
            assert!(f.mean().abs() < 1e-14);
        }
    }

    #[test]
    fn circle_trig_is_periodic() {
        let s = DiscreteHomSpace::uniform_grid(8, 1, Geometry::Circle).unwrap();
        let t = phases(&s).unwrap();
        assert!((t[1][0] - std::f64::consts::TAU / 8.0).abs() < 1e-15);
    }

    #[test]
    fn every_family_is_nonzero() {
        let s = DiscreteHomSpace::uniform_grid(9, 2, Geometry::Interval).unwrap();
        for fam in [Family::Steps, Family::Trig, Family::Spikes, Family::Mixtures, Family::Bmo] {
            for f in CorpusSpec::new(fam, 6, 5).generate(&s) {
                assert!(f.max_abs() > 0.0, "{fam:?}");
            }
        }
    }
}
