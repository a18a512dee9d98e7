mod common;

use common::*;
use grand_morrey::funcnorm::{
    bmo_norm, grand_morrey_norm, lp_norm, morrey_norm, BmoVariant, EpsGrid, GrandParams, GridSpec, Profile,
};
use grand_morrey::operators::{maximal, potential_apply, sharp_maximal, CzOperator, Operator};
use grand_morrey::{DiscreteHomSpace, Geometry, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close_vec(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| rel_close(*x, *y, tol) || (x - y).abs() <= 1e-14)
}

#[test]
fn lp_and_morrey_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let n = rng.gen_range(1..=30);
        let space = random_space(&mut rng, n);
        let vals = random_values(&mut rng, n);
        let f = GridFunction::new(&space, vals.clone()).unwrap();
        let p = rng.gen_range(1.0..4.0);
        let lambda = rng.gen_range(0.0..0.95);
        assert!(rel_close(lp_norm(&f, p).unwrap(), naive_lp(&space, &vals, p), 1e-12));
        assert!(rel_close(morrey_norm(&f, p, lambda).unwrap(), naive_morrey(&space, &vals, p, lambda), 1e-12));
    }
}

#[test]
fn grand_morrey_matches_triple_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = rng.gen_range(2..=25);
        let space = random_space(&mut rng, n);
        let vals = random_values(&mut rng, n);
        let f = GridFunction::new(&space, vals.clone()).unwrap();
        let p = rng.gen_range(1.3..3.5);
        let lambda = rng.gen_range(0.05..0.9);
        let a = Profile::linear(rng.gen_range(0.0..2.0));
        let phi = Profile::power(rng.gen_range(0.3..2.0));
        let params = GrandParams::new(p, lambda, phi, a, &GridSpec::Geometric { ratio: 0.6, floor: 1e-3 }).unwrap();
        let grid: Vec<f64> = params.grid.points().iter().rev().take(8).rev().copied().collect();
        let params = params.with_grid(EpsGrid::explicit(grid).unwrap()).unwrap();
        let got = grand_morrey_norm(&f, &params).unwrap().value;
        assert!(rel_close(got, naive_grand(&space, &vals, &params), 1e-12));
    }
}

#[test]
fn maximal_and_sharp_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let n = rng.gen_range(1..=30);
        let space = random_space(&mut rng, n);
        let vals = random_values(&mut rng, n);
        let f = GridFunction::new(&space, vals.clone()).unwrap();
        assert!(close_vec(maximal(&f).values(), &naive_maximal(&space, &vals), 1e-12));
        assert!(close_vec(sharp_maximal(&f).values(), &naive_sharp(&space, &vals), 1e-12));
    }
}

#[test]
fn bmo_variants_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let n = rng.gen_range(1..=25);
        let space = random_space(&mut rng, n);
        let vals = random_values(&mut rng, n);
        let b = GridFunction::new(&space, vals.clone()).unwrap();
        let mean = bmo_norm(&b, BmoVariant::Mean).unwrap();
        let inf = bmo_norm(&b, BmoVariant::Inf).unwrap();
        assert!(rel_close(mean, naive_bmo_mean(&space, &vals), 1e-12));
        assert!(rel_close(inf, naive_bmo_inf(&space, &vals), 1e-12));
    }
}

#[test]
fn potential_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let n = rng.gen_range(1..=30);
        let space = random_space(&mut rng, n);
        let vals = random_values(&mut rng, n);
        let f = GridFunction::new(&space, vals.clone()).unwrap();
        let alpha = rng.gen_range(0.05..0.95);
        let got = potential_apply(&f, alpha).unwrap();
        assert!(close_vec(got.values(), &naive_potential(&space, &vals, alpha), 1e-12));
    }
}

/// Principal-value conjugate function of `cos` by the midpoint rule on `m`
/// nodes offset by half a step from every evaluation point.
fn conjugate_cos_quadrature(theta: f64, m: usize) -> f64 {
    let h = std::f64::consts::TAU / m as f64;
    let mut sum = 0.0;
    for k in 0..m {
        let t = theta + (k as f64 + 0.5) * h;
        sum += (t.cos()) / ((theta - t) / 2.0).tan();
    }
    sum * h / std::f64::consts::TAU
}

#[test]
fn circle_conjugate_of_cos_is_sin() {
    let n = 512;
    let space = DiscreteHomSpace::uniform_grid(n, 1, Geometry::Circle).unwrap();
    let theta: Vec<f64> = space.labels().unwrap().iter().map(|c| c[0]).collect();
    let f = GridFunction::from_fn(&space, |i| theta[i].cos());
    let tf = CzOperator::circle_conjugate(&space).unwrap().apply(&f).unwrap();
    let mut err_sin: f64 = 0.0;
    let mut err_oracle: f64 = 0.0;
    for i in (0..n).step_by(8) {
        let oracle = conjugate_cos_quadrature(theta[i], 1 << 16);
        assert!((oracle - theta[i].sin()).abs() < 1e-9, "quadrature oracle is off at {i}");
        err_oracle = err_oracle.max((tf.values()[i] - oracle).abs());
    }
    for i in 0..n {
        err_sin = err_sin.max((tf.values()[i] - theta[i].sin()).abs());
    }
    assert!(err_sin <= 0.02, "sup error {err_sin}");
    assert!(err_oracle <= 0.02, "oracle error {err_oracle}");
}
