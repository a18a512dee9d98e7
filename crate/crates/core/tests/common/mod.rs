//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here enumerates balls directly from the distance table, without
//! the cached ball family, so agreement with the library is a real check.
#![allow(dead_code)]

use grand_morrey::funcnorm::GrandParams;
use grand_morrey::DiscreteHomSpace;
use rand::seq::SliceRandom;
use rand::Rng;

/// `n` distinct points of a small integer lattice, so many distances tie.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> DiscreteHomSpace {
    let side = ((n as f64).sqrt().ceil() as usize + 2).max(3);
    let mut cells: Vec<(usize, usize)> = (0..side).flat_map(|i| (0..side).map(move |j| (i, j))).collect();
    cells.shuffle(rng);
    let points: Vec<Vec<f64>> = cells[..n].iter().map(|&(i, j)| vec![i as f64, j as f64]).collect();
    let weight: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    DiscreteHomSpace::euclidean(&points, &weight).expect("lattice points are distinct")
}

pub fn random_values<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-3.0..3.0) })
        .collect()
}

/// Every closed ball `{y : d(x,y) ≤ ρ}` for `ρ` a distance from `x`.
pub fn naive_balls(space: &DiscreteHomSpace) -> Vec<(usize, Vec<usize>, f64)> {
    let n = space.len();
    let mut out = Vec::new();
    for x in 0..n {
        let mut radii: Vec<f64> = (0..n).map(|y| space.dist(x, y)).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let members: Vec<usize> = (0..n).filter(|&y| space.dist(x, y) <= r).collect();
            let mu = members.iter().map(|&y| space.weight(y)).sum();
            out.push((x, members, mu));
        }
    }
    out
}

pub fn naive_lp(space: &DiscreteHomSpace, f: &[f64], p: f64) -> f64 {
    (0..space.len())
        .map(|i| f[i].abs().powf(p) * space.weight(i))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub fn naive_morrey(space: &DiscreteHomSpace, f: &[f64], p: f64, lambda: f64) -> f64 {
    naive_balls(space)
        .iter()
        .map(|(_, members, mu)| {
            let mass: f64 = members.iter().map(|&y| f[y].abs().powf(p) * space.weight(y)).sum();
            (mass / mu.powf(lambda)).powf(1.0 / p)
        })
        .fold(0.0, f64::max)
}

/// Triple loop over `(ε, center, radius)`.
pub fn naive_grand(space: &DiscreteHomSpace, f: &[f64], params: &GrandParams) -> f64 {
    let mut best: f64 = 0.0;
    for &e in params.grid.points() {
        if e >= params.s_max {
            continue;
        }
        let pe = params.p - e;
        let lam = (params.lambda - params.a.eval(e)).max(0.0);
        let weight = params.phi.eval(e).powf(1.0 / pe);
        for x in 0..space.len() {
            for r in (0..space.len()).map(|y| space.dist(x, y)) {
                let mut mass = 0.0;
                let mut mu = 0.0;
                for y in 0..space.len() {
                    if space.dist(x, y) <= r {
                        mass += f[y].abs().powf(pe) * space.weight(y);
                        mu += space.weight(y);
                    }
                }
                best = best.max(weight * (mass / mu.powf(lam)).powf(1.0 / pe));
            }
        }
    }
    best
}

fn avg(space: &DiscreteHomSpace, members: &[usize], mu: f64, g: impl Fn(usize) -> f64) -> f64 {
    members.iter().map(|&y| g(y) * space.weight(y)).sum::<f64>() / mu
}

pub fn naive_maximal(space: &DiscreteHomSpace, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; space.len()];
    for (x, members, mu) in naive_balls(space) {
        out[x] = out[x].max(avg(space, &members, mu, |y| f[y].abs()));
    }
    out
}

pub fn naive_sharp(space: &DiscreteHomSpace, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; space.len()];
    for (x, members, mu) in naive_balls(space) {
        let mean = avg(space, &members, mu, |y| f[y]);
        out[x] = out[x].max(avg(space, &members, mu, |y| (f[y] - mean).abs()));
    }
    out
}

pub fn naive_bmo_mean(space: &DiscreteHomSpace, b: &[f64]) -> f64 {
    naive_sharp(space, b).into_iter().fold(0.0, f64::max)
}

/// `max_B min_c avg_B |b − c|`; the minimum is attained at one of the values.
pub fn naive_bmo_inf(space: &DiscreteHomSpace, b: &[f64]) -> f64 {
    naive_balls(space)
        .iter()
        .map(|(_, members, mu)| {
            members
                .iter()
                .map(|&c| avg(space, members, *mu, |y| (b[y] - b[c]).abs()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `μ{z : d(x,z) < d(x,y)}`, or `μ{x}` on the diagonal.
pub fn naive_kernel_measure(space: &DiscreteHomSpace, x: usize, y: usize) -> f64 {
    if x == y {
        return space.weight(x);
    }
    let r = space.dist(x, y);
    (0..space.len())
        .filter(|&z| space.dist(x, z) < r)
        .map(|z| space.weight(z))
        .sum()
}

pub fn naive_potential(space: &DiscreteHomSpace, f: &[f64], alpha: f64) -> Vec<f64> {
    (0..space.len())
        .map(|x| {
            (0..space.len())
                .map(|y| f[y] * space.weight(y) / naive_kernel_measure(space, x, y).powf(1.0 - alpha))
                .sum()
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
