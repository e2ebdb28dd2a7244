use gmact_core::{Derivation, MultiPoly, RatFunc};
use gmact_testkit::{
    random_derivation, random_nonzero_ratfunc, random_ratfunc, random_triangular_map, random_weights, rng, xy,
};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn apply_satisfies_leibniz(seed in any::<u64>()) {
        let ctx = xy();
        let mut r = rng(seed);
        let d = random_derivation(&mut r, &ctx, 2);
        let f = random_ratfunc(&mut r, &ctx, 2);
        let g = random_ratfunc(&mut r, &ctx, 2);
        prop_assert_eq!(d.apply(&(&f * &g)), &(&f * &d.apply(&g)) + &(&d.apply(&f) * &g));
    }

    #[test]
    fn iterates_compose(seed in any::<u64>(), i in 0usize..4, j in 0usize..4) {
        let ctx = xy();
        let mut r = rng(seed);
        let d = random_derivation(&mut r, &ctx, 1);
        let f = random_ratfunc(&mut r, &ctx, 1);
        prop_assert_eq!(d.iterate(&f, i + j), d.iterate(&d.iterate(&f, j), i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn exp_series_is_a_ring_homomorphism(seed in any::<u64>()) {
        let ctx = xy();
        let mut r = rng(seed);
        let d = random_derivation(&mut r, &ctx, 1);
        let f = random_ratfunc(&mut r, &ctx, 1);
        let g = random_ratfunc(&mut r, &ctx, 1);
        let (ef, eg) = (d.exp_series(&f, 6), d.exp_series(&g, 6));
        prop_assert_eq!(d.exp_series(&(&f * &g), 6), ef.checked_mul(&eg).unwrap());
        prop_assert_eq!(d.exp_series(&(&f + &g), 6), ef.checked_add(&eg).unwrap());
    }

    /// Eigenvalues are preserved when both the derivation and the function
    /// are transported along a birational map.
    #[test]
    fn eigenvalues_are_conjugation_invariant(seed in any::<u64>()) {
        let ctx = xy();
        let mut r = rng(seed);
        let weights = random_weights(&mut r, 2);
        let d = Derivation::euler(&ctx, &weights).unwrap();
        let (a, b) = (r.gen_range(-3i64..=3), r.gen_range(-3i64..=3));
        let monomial = &RatFunc::var(&ctx, 0).pow(a).unwrap() * &RatFunc::var(&ctx, 1).pow(b).unwrap();
        let c = RatFunc::from_int(&ctx, r.gen_range(1..=5));
        let m = random_triangular_map(&mut r, &ctx);
        let dm = d.conjugate(&m).unwrap();
        for f in [&monomial * &c, &monomial + &c, random_nonzero_ratfunc(&mut r, &ctx, 2)] {
            let before = d.eigen_test(&f).unwrap();
            let after = dm.eigen_test(&m.apply_forward(&f).unwrap()).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}

#[test]
fn euler_monomial_eigenvalue() {
    let ctx = xy();
    let d = Derivation::euler(&ctx, &[2, 3]).unwrap();
    let x = MultiPoly::var(&ctx, 0);
    let y = MultiPoly::var(&ctx, 1);
    let f = RatFunc::new(&x * &x, &(&y * &y) * &y).unwrap();
    assert_eq!(d.eigen_test(&f).unwrap(), Some(gmact_core::BigRational::from_integer((-5).into())));
}
