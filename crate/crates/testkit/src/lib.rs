//! Seeded random inputs for the test suites.
//!
//! Everything is driven by a `ChaCha8Rng`, so a seed fully determines the
//! generated values.

use gmact_core::{BirationalMap, Context, Derivation, GmAction, MultiPoly, RatFunc, SeriesVar, TruncSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn xy() -> Context {
    Context::new(&["x", "y"]).unwrap()
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A rational with numerator in `[-4, 4]` and denominator in `[1, 3]`.
pub fn small_rational(rng: &mut TestRng) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(rng.gen_range(1..=3)))
}

pub fn small_nonzero_rational(rng: &mut TestRng) -> BigRational {
    loop {
        let c = small_rational(rng);
        if c != int(0) {
            return c;
        }
    }
}

/// Up to `max_terms` monomials of total degree at most `max_deg`.
pub fn random_poly(rng: &mut TestRng, ctx: &Context, max_deg: u32, max_terms: usize) -> MultiPoly {
    let n = ctx.nvars();
    let count = rng.gen_range(1..=max_terms);
    let terms = (0..count).map(|_| {
        let mut budget = rng.gen_range(0..=max_deg);
        let mut e = vec![0u32; n];
        for slot in e.iter_mut() {
            let k = rng.gen_range(0..=budget);
            *slot = k;
            budget -= k;
        }
        e.shuffle(rng);
        (e, small_rational(rng))
    });
    MultiPoly::from_terms(ctx, terms.collect::<Vec<_>>())
}

pub fn random_nonzero_poly(rng: &mut TestRng, ctx: &Context, max_deg: u32, max_terms: usize) -> MultiPoly {
    loop {
        let p = random_poly(rng, ctx, max_deg, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// `p / q` with both parts of total degree at most `max_deg`.
pub fn random_ratfunc(rng: &mut TestRng, ctx: &Context, max_deg: u32) -> RatFunc {
    let p = random_poly(rng, ctx, max_deg, 3);
    let q = random_nonzero_poly(rng, ctx, max_deg, 3);
    RatFunc::new(p, q).unwrap()
}

pub fn random_nonzero_ratfunc(rng: &mut TestRng, ctx: &Context, max_deg: u32) -> RatFunc {
    loop {
        let f = random_ratfunc(rng, ctx, max_deg);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn random_weights(rng: &mut TestRng, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-5..=5)).collect()
}

/// A triangular map on `(x, y)`: one variable goes to `a(v) u + b(v)` where
/// `v` is the other variable and `a`, `b` have degree at most one. The
/// inverse is `(u - b(v)) / a(v)`.
pub fn random_triangular_map(rng: &mut TestRng, ctx: &Context) -> BirationalMap {
    assert_eq!(ctx.nvars(), 2, "triangular maps are generated in two variables");
    let swap = rng.gen_bool(0.5);
    let (u, v) = if swap { (1, 0) } else { (0, 1) };
    let vpoly = MultiPoly::var(ctx, v);
    let linear = |rng: &mut TestRng, nonzero: bool| loop {
        let c0 = MultiPoly::constant(ctx, int(rng.gen_range(-2..=2)));
        let c1 = vpoly.scale(&int(rng.gen_range(-2..=2)));
        let p = &c0 + &c1;
        if !(nonzero && p.is_zero()) {
            return RatFunc::from_poly(p);
        }
    };
    let a = linear(rng, true);
    let b = linear(rng, false);
    let xu = RatFunc::var(ctx, u);
    let xv = RatFunc::var(ctx, v);
    let fwd_u = &(&a * &xu) + &b;
    let inv_u = &(&xu - &b) / &a;
    let mut forward = vec![xv.clone(), xv.clone()];
    let mut inverse = vec![xv.clone(), xv];
    forward[u] = fwd_u;
    inverse[u] = inv_u;
    BirationalMap::new(ctx, forward, inverse).expect("triangular maps are invertible")
}

/// A semisimple pair obtained by conjugating a diagonal action and its Euler
/// derivation by a random triangular map.
pub struct SemisimpleCase {
    pub weights: Vec<i64>,
    pub map: BirationalMap,
    pub derivation: Derivation,
    pub action: GmAction,
}

pub fn random_semisimple(rng: &mut TestRng, ctx: &Context) -> SemisimpleCase {
    let weights = random_weights(rng, ctx.nvars());
    let map = random_triangular_map(rng, ctx);
    let derivation = Derivation::euler(ctx, &weights).unwrap().conjugate(&map).unwrap();
    let action = GmAction::diagonal(ctx, &weights).unwrap().conjugate(&map).unwrap();
    SemisimpleCase { weights, map, derivation, action }
}

/// A derivation with random images of degree at most `max_deg`.
pub fn random_derivation(rng: &mut TestRng, ctx: &Context, max_deg: u32) -> Derivation {
    let images = (0..ctx.nvars()).map(|_| random_ratfunc(rng, ctx, max_deg)).collect();
    Derivation::new(ctx, images).unwrap()
}

pub fn random_series(rng: &mut TestRng, ctx: &Context, var: SeriesVar, order: usize) -> TruncSeries {
    let coeffs = (0..=order).map(|_| random_ratfunc(rng, ctx, 2)).collect();
    TruncSeries::new(var, coeffs).unwrap()
}
