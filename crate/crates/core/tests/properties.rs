mod common;

use common::random_space;
use grand_morrey::funcnorm::{
    bmo_norm, grand_lebesgue_norm, grand_morrey_norm, lp_norm, morrey_norm, phi_functional, BmoVariant, EpsGrid,
    GrandParams, GridSpec, Profile,
};
use grand_morrey::homspace::doubling_constant;
use grand_morrey::operators::{
    commutator, maximal, maximal_s, potential_apply, sharp_maximal, CzOperator, Operator, Potential,
};
use grand_morrey::verify::{eta_identity_check, AuxExponents, NormSpec};
use grand_morrey::{DiscreteHomSpace, Geometry, GridFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_from_seed(seed: u64, n: usize) -> DiscreteHomSpace {
    random_space(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], n)
}

fn space_and_two(max_n: usize) -> impl Strategy<Value = (u64, Vec<f64>, Vec<f64>)> {
    (any::<u64>(), 1..=max_n).prop_flat_map(|(seed, n)| (Just(seed), values(n), values(n)))
}

fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous_and_subadditive((seed, a, b) in space_and_two(16), c in -4.0..4.0f64) {
        let s = space_from_seed(seed, a.len());
        let f = GridFunction::new(&s, a).unwrap();
        let g = GridFunction::new(&s, b).unwrap();
        let sum = f.add(&g).unwrap();
        let params = GrandParams::new(2.5, 0.4, Profile::power(1.0), Profile::linear(0.3), &GridSpec::default()).unwrap();
        let norms: Vec<Box<dyn Fn(&GridFunction) -> f64>> = vec![
            Box::new(|h| lp_norm(h, 1.7).unwrap()),
            Box::new(|h| morrey_norm(h, 2.0, 0.3).unwrap()),
            Box::new(|h| bmo_norm(h, BmoVariant::Mean).unwrap()),
            Box::new(|h| bmo_norm(h, BmoVariant::Inf).unwrap()),
            Box::new(move |h| grand_morrey_norm(h, &params).unwrap().value),
        ];
        for n in &norms {
            let (nf, ng) = (n(&f), n(&g));
            prop_assert!((n(&f.scaled(c)) - c.abs() * nf).abs() <= 1e-12 * (1.0 + c.abs() * nf));
            prop_assert!(le(n(&sum), nf + ng));
        }
    }

    #[test]
    fn morrey_is_monotone_in_lambda_on_small_balls(seed in any::<u64>(), vals in values(12), l1 in 0.0..0.9f64, dl in 0.0..0.09f64) {
        // Weights below 1/12 keep every ball measure below 1.
        let s = space_from_seed(seed, 12);
        let w: Vec<f64> = s.weights().iter().map(|w| w / 12.0).collect();
        let s = DiscreteHomSpace::from_table(&s.dist_table(), &w, 1.0, 1.0).unwrap();
        let f = GridFunction::new(&s, vals).unwrap();
        prop_assert!(le(morrey_norm(&f, 2.0, l1).unwrap(), morrey_norm(&f, 2.0, l1 + dl).unwrap()));
    }

    #[test]
    fn bmo_variants_are_equivalent((seed, a, _) in space_and_two(20)) {
        let s = space_from_seed(seed, a.len());
        let b = GridFunction::new(&s, a).unwrap();
        let inf = bmo_norm(&b, BmoVariant::Inf).unwrap();
        let mean = bmo_norm(&b, BmoVariant::Mean).unwrap();
        prop_assert!(le(inf, mean) && le(mean, 2.0 * inf));
    }

    #[test]
    fn maximal_is_sublinear_monotone_and_dominating((seed, a, b) in space_and_two(20), c in -3.0..3.0f64) {
        let s = space_from_seed(seed, a.len());
        let f = GridFunction::new(&s, a).unwrap();
        let g = GridFunction::new(&s, b).unwrap();
        let (mf, mg) = (maximal(&f), maximal(&g));
        let msum = maximal(&f.add(&g).unwrap());
        let mc = maximal(&f.scaled(c));
        let big = f.map(f64::abs).add(&g.map(f64::abs)).unwrap();
        let mbig = maximal(&big);
        let sharp = sharp_maximal(&f);
        for x in 0..s.len() {
            prop_assert!(le(msum.values()[x], mf.values()[x] + mg.values()[x]));
            prop_assert!((mc.values()[x] - c.abs() * mf.values()[x]).abs() <= 1e-12 * (1.0 + mc.values()[x]));
            prop_assert!(le(mf.values()[x], mbig.values()[x]));
            prop_assert!(mf.values()[x] >= f.values()[x].abs());
            prop_assert!(le(sharp.values()[x], 2.0 * mf.values()[x]));
        }
    }

    #[test]
    fn maximal_s_grows_with_s((seed, a, _) in space_and_two(16), s1 in 1.0..3.0f64, ds in 0.0..2.0f64) {
        let s = space_from_seed(seed, a.len());
        let f = GridFunction::new(&s, a).unwrap();
        let lo = maximal_s(&f, s1).unwrap();
        let hi = maximal_s(&f, s1 + ds).unwrap();
        for x in 0..s.len() {
            prop_assert!(le(lo.values()[x], hi.values()[x]));
        }
    }

    #[test]
    fn potential_and_commutators_are_linear((seed, a, b) in space_and_two(16), c in -3.0..3.0f64, alpha in 0.05..0.95f64, k in -2.0..2.0f64) {
        let s = space_from_seed(seed, a.len());
        let f = GridFunction::new(&s, a).unwrap();
        let g = GridFunction::new(&s, b).unwrap();
        let combo = f.scaled(c).add(&g).unwrap();
        let pot = Potential::new(&s, alpha).unwrap();
        let lhs = pot.apply(&combo).unwrap();
        let rhs = pot.apply(&f).unwrap().scaled(c).add(&pot.apply(&g).unwrap()).unwrap();
        let scale = 1.0 + lhs.max_abs().max(rhs.max_abs());
        for x in 0..s.len() {
            prop_assert!((lhs.values()[x] - rhs.values()[x]).abs() <= 1e-12 * scale);
        }
        let constant = GridFunction::constant(&s, k);
        let zero = commutator(&constant, &pot, &f).unwrap();
        prop_assert!(zero.max_abs() <= 1e-12 * (1.0 + potential_apply(&f, alpha).unwrap().max_abs() * k.abs()));
    }

    #[test]
    fn phi_is_monotone_in_s_and_refinement_never_decreases((seed, a, _) in space_and_two(14), t1 in 0.05..1.0f64, t2 in 0.05..1.0f64) {
        let s = space_from_seed(seed, a.len());
        let f = GridFunction::new(&s, a).unwrap();
        let params = GrandParams::new(2.0, 0.5, Profile::power(1.5), Profile::linear(1.0), &GridSpec::default()).unwrap();
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let (lo, hi) = (lo * params.s_max, hi * params.s_max);
        if params.grid.count_below(lo) > 0 {
            prop_assert!(le(phi_functional(&f, &params, lo).unwrap(), phi_functional(&f, &params, hi).unwrap()));
        }
        let coarse = EpsGrid::geometric(0.999, 0.8, 1e-4).unwrap();
        let fine = coarse.merged(&EpsGrid::geometric(0.999, 0.93, 1e-4).unwrap());
        prop_assert!(le(grand_lebesgue_norm(&f, 2.0, 1.0, &coarse).unwrap(), grand_lebesgue_norm(&f, 2.0, 1.0, &fine).unwrap()));
    }

    #[test]
    fn doubling_constant_at_least_one(seed in any::<u64>(), n in 1usize..20) {
        prop_assert!(doubling_constant(&space_from_seed(seed, n)) >= 1.0);
    }

    #[test]
    fn exponent_identity_holds(p in 1.1..4.0f64, lambda in 0.0..0.9f64, t in 0.05..0.95f64, u in 0.01..1.0f64, slope in 0.0..0.5f64) {
        let alpha = t * (1.0 - lambda) / p;
        let q = 1.0 / (1.0 / p - alpha / (1.0 - lambda));
        let theta2 = AuxExponents::minimal_theta2(p, alpha, lambda, 1.0);
        let b = slope * (1.0 - lambda).powi(2) / (alpha * q * q);
        let delta = (q - 1.0) * 0.5;
        if let Ok(exps) = AuxExponents::new(p, alpha, lambda, Profile::linear(b), 1.0, theta2, delta) {
            prop_assert!(eta_identity_check(delta * u, &exps).unwrap() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ratios_are_scale_invariant(seed in any::<u64>(), c in 0.01..100.0f64) {
        let space = DiscreteHomSpace::uniform_grid(24, 1, Geometry::Circle).unwrap();
        let t = CzOperator::circle_conjugate(&space).unwrap();
        let f = grand_morrey::verify::CorpusSpec::new(grand_morrey::verify::Family::Mixed, 1, seed).sample(&space, 0);
        let norm = NormSpec::Morrey { p: 2.0, lambda: 0.25 }.evaluator(&space);
        let ratio = |h: &GridFunction| norm.eval(&t.apply(h).unwrap()).unwrap() / norm.eval(h).unwrap();
        // Tf of a constant is rounding noise around zero, hence the absolute floor.
        let (r1, r2) = (ratio(&f), ratio(&f.scaled(c)));
        prop_assert!((r1 - r2).abs() <= 1e-12 * r1.max(1.0), "{r1} vs {r2}");
        let m = |h: &GridFunction| norm.eval(&maximal(h)).unwrap() / norm.eval(h).unwrap();
        prop_assert!((m(&f) - m(&f.scaled(c))).abs() <= 1e-12 * m(&f));
    }
}
