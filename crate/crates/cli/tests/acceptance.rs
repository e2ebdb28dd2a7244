//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gmact_core::expr::parse_ratfunc;
use gmact_core::{
    action_from_derivation, round_trip_ad, round_trip_da, BigRational, BirationalMap, Context, Derivation,
    GmAction, RatFunc, SeriesVar, SliceResult, TruncSeries,
};
use gmact_testkit::{
    random_derivation, random_nonzero_ratfunc, random_ratfunc, random_semisimple, random_series, rng, xy,
    SemisimpleCase,
};

#[allow(dead_code)]
mod common;

type Check = Result<(), String>;

/// Name, time budget in seconds, and the check itself.
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn factorial(n: usize) -> BigRational {
    (1..=n as i64).map(int).fold(int(1), |a, b| a * b)
}

fn binomial(n: usize, k: usize) -> BigRational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn suite() -> Vec<SemisimpleCase> {
    (0..20).map(|seed| random_semisimple(&mut rng(1000 + seed), &xy())).collect()
}

fn worked_example() -> Check {
    let ctx = xy();
    let ext = GmAction::extended_context(&ctx).map_err(|e| e.to_string())?;
    let r = |s: &str| parse_ratfunc(s, &ctx).unwrap();
    let rt = |s: &str| parse_ratfunc(s, &ext).unwrap();
    let m = BirationalMap::new(&ctx, vec![r("(x-1)*(y-1)+1"), r("y")], vec![r("(x-1)/(y-1)+1"), r("y")])
        .map_err(|e| e.to_string())?;
    for (a, b) in [(2i64, 3i64), (1, 1), (-1, 4)] {
        let d = Derivation::euler(&ctx, &[a, b]).unwrap().conjugate(&m).map_err(|e| e.to_string())?;
        let want_dx = r(&format!("({a}*((x-1)*(y-1)+1) - {b}*(x-1)*y)/(y-1)"));
        ensure(d.image(0) == &want_dx && d.image(1) == &r(&format!("{b}*y")), || {
            format!("({a},{b}): derivation {d}")
        })?;
        let cert = action_from_derivation(&d, 16, 7).map_err(|e| e.to_string())?;
        let action = cert.action().ok_or_else(|| format!("({a},{b}): {cert}"))?;
        let want_x = rt(&format!("(t^({a})*((x-1)*(y-1)+1)-1)/(t^({b})*y-1) + 1"));
        let want_y = rt(&format!("t^({b})*y"));
        ensure(action.image(0) == &want_x && action.image(1) == &want_y, || {
            format!("({a},{b}): action {action}")
        })?;
        let back = action.extract_derivation().map_err(|e| e.to_string())?;
        ensure(back == d, || format!("({a},{b}): extracted {back}"))?;
    }
    Ok(())
}

fn round_trips_from_derivations(cases: &[SemisimpleCase]) -> Check {
    for (i, c) in cases.iter().enumerate() {
        let ok = round_trip_da(&c.derivation, 16, 7).map_err(|e| format!("case {i}: {e}"))?;
        ensure(ok, || format!("case {i}: {} failed", c.derivation))?;
    }
    Ok(())
}

fn round_trips_from_actions(cases: &[SemisimpleCase]) -> Check {
    for (i, c) in cases.iter().enumerate() {
        let ok = round_trip_ad(&c.action, 16, 7).map_err(|e| format!("case {i}: {e}"))?;
        ensure(ok, || format!("case {i}: {} failed", c.action))?;
    }
    Ok(())
}

fn negative_detection() -> Check {
    let ctx = Context::new(&["x"]).unwrap();
    for image in ["1", "x/2"] {
        let d = Derivation::new(&ctx, vec![parse_ratfunc(image, &ctx).unwrap()]).unwrap();
        for order in [8usize, 16, 24] {
            let cert = action_from_derivation(&d, order, (order - 2) / 2).map_err(|e| e.to_string())?;
            ensure(!cert.is_semisimple(), || format!("x -> {image} at N = {order}: {cert}"))?;
        }
    }
    Ok(())
}

fn sigma_pair() -> Check {
    let ctx = xy();
    let mut r = rng(5);
    for i in 0..50 {
        let order = [4, 8, 16][i % 3];
        let a = random_series(&mut r, &ctx, SeriesVar::Z, order);
        let back = a.sigma().and_then(|s| s.sigma_inv()).map_err(|e| e.to_string())?;
        ensure(back == a, || format!("series {i} in z at N = {order}"))?;
        let b = random_series(&mut r, &ctx, SeriesVar::TMinusOne, order);
        let back = b.sigma_inv().and_then(|s| s.sigma()).map_err(|e| e.to_string())?;
        ensure(back == b, || format!("series {i} in t-1 at N = {order}"))?;
    }
    Ok(())
}

fn exp_homomorphism() -> Check {
    let ctx = xy();
    let mut r = rng(6);
    for i in 0..50 {
        let d = random_derivation(&mut r, &ctx, 1);
        let f = random_ratfunc(&mut r, &ctx, 1);
        let g = random_ratfunc(&mut r, &ctx, 1);
        let product = d.exp_series(&f, 8).checked_mul(&d.exp_series(&g, 8)).map_err(|e| e.to_string())?;
        ensure(d.exp_series(&(&f * &g), 8) == product, || format!("triple {i}: d = {d}, f = {f}, g = {g}"))?;
    }
    Ok(())
}

fn flow(a: &GmAction, f: &RatFunc, order: usize) -> Result<TruncSeries, String> {
    a.expand_at_one(f, order).and_then(|s| s.sigma_inv()).map_err(|e| e.to_string())
}

/// The additive flow `z -> A(e^z)` composes additively in `z`, and its
/// coefficients are the scaled iterates of the extracted derivation.
fn germ_identities(cases: &[SemisimpleCase]) -> Check {
    const ORDER: usize = 8;
    let mut r = rng(7);
    for (n, c) in cases.iter().enumerate() {
        let f = random_nonzero_ratfunc(&mut r, &xy(), 1);
        let a = &c.action;
        let s = flow(a, &f, ORDER)?;
        for j in 0..=ORDER {
            let aj = s.coeff(j);
            if aj.is_zero() {
                continue;
            }
            let inner = flow(a, aj, ORDER - j)?;
            for i in 0..=ORDER - j {
                ensure(inner.coeff(i) == &s.coeff(i + j).scale(&binomial(i + j, i)), || {
                    format!("pair {n}: cocycle coefficient z^{i} w^{j}")
                })?;
            }
        }
        let d = a.extract_derivation().map_err(|e| e.to_string())?;
        for i in 0..=5 {
            ensure(d.iterate(&f, i) == s.coeff(i).scale(&factorial(i)), || format!("pair {n}: iterate {i}"))?;
        }
    }
    Ok(())
}

fn expansions_start_at_f(cases: &[SemisimpleCase]) -> Check {
    let mut r = rng(8);
    let fs: Vec<RatFunc> = (0..50).map(|_| random_nonzero_ratfunc(&mut r, &xy(), 2)).collect();
    for (n, c) in cases.iter().enumerate() {
        for f in &fs {
            let s = c.action.expand_at_one(f, 1).map_err(|e| format!("action {n}, f = {f}: {e}"))?;
            ensure(&s.ev0() == f, || format!("action {n}, f = {f}: constant term {}", s.ev0()))?;
        }
    }
    Ok(())
}

fn slices(cases: &[SemisimpleCase]) -> Check {
    let mut found = 0;
    for (n, c) in cases.iter().enumerate() {
        let cert = action_from_derivation(&c.derivation, 16, 7).map_err(|e| e.to_string())?;
        let a = cert.action().ok_or_else(|| format!("case {n} not certified"))?;
        match a.find_slice().map_err(|e| e.to_string())? {
            SliceResult::Slice(s) => {
                found += 1;
                ensure(a.weight_of(&s).map_err(|e| e.to_string())? == Some(1), || {
                    format!("case {n}: weight of {s}")
                })?;
                ensure(a.is_slice(&s).map_err(|e| e.to_string())?, || format!("case {n}: {s} rejected"))?;
                ensure(c.derivation.apply(&s) == s, || format!("case {n}: D({s}) != {s}"))?;
            }
            SliceResult::LatticeGcd { gcd, .. } => {
                let g = c.weights.iter().fold(0u64, |g, w| num_gcd(g, w.unsigned_abs()));
                ensure(g != 1 && gcd == g, || {
                    format!("case {n}: weights {:?}, lattice gcd {gcd}", c.weights)
                })?;
            }
        }
    }
    ensure(found > 0, || "no faithful action in the suite".into())?;
    let a = GmAction::diagonal(&xy(), &[2, 4]).unwrap();
    match a.find_slice().map_err(|e| e.to_string())? {
        SliceResult::LatticeGcd { gcd: 2, .. } => Ok(()),
        other => Err(format!("(t^2 x, t^4 y): {other:?}")),
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn semiinvariants(cases: &[SemisimpleCase]) -> Check {
    let ctx = xy();
    for (n, c) in cases.iter().enumerate() {
        let cert = action_from_derivation(&c.derivation, 16, 7).map_err(|e| e.to_string())?;
        let a = cert.action().ok_or_else(|| format!("case {n} not certified"))?;
        for i in 0..ctx.nvars() {
            let x = RatFunc::var(&ctx, i);
            for (s, w) in a.extract_semiinvariants(&x).map_err(|e| e.to_string())? {
                let ev = c.derivation.eigen_test(&s).map_err(|e| e.to_string())?;
                ensure(ev == Some(int(w)), || format!("case {n}: {s} has eigenvalue {ev:?}, weight {w}"))?;
            }
        }
    }
    Ok(())
}

fn golden_corpus() -> Check {
    let files = common::corpus();
    ensure(files.len() >= 10, || format!("only {} sessions", files.len()))?;
    for path in files {
        let src = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let want = fs::read_to_string(common::expected_path(&path)).map_err(|e| e.to_string())?;
        ensure(common::transcript(&src) == want, || format!("{} differs", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cases = suite();
    let criteria: Vec<Criterion> = vec![
        ("1 worked example reproduction", 5, Box::new(worked_example)),
        ("2 round trip from derivations", 60, Box::new(|| round_trips_from_derivations(&cases))),
        ("3 round trip from actions", 60, Box::new(|| round_trips_from_actions(&cases))),
        ("4 negative detection", 10, Box::new(negative_detection)),
        ("5 sigma inverse pair", 10, Box::new(sigma_pair)),
        ("6 exp is a ring homomorphism", 20, Box::new(exp_homomorphism)),
        ("7 germ cocycle and iterates", 30, Box::new(|| germ_identities(&cases))),
        ("8 expansion at t = 1", 10, Box::new(|| expansions_start_at_f(&cases))),
        ("9 slices", 10, Box::new(|| slices(&cases))),
        ("10 semi-invariant extraction", 20, Box::new(|| semiinvariants(&cases))),
        ("11 cli golden corpus", 5, Box::new(golden_corpus)),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed < Duration::from_secs(budget), || format!("over the {budget} s budget"))
        });
        let secs = elapsed.as_secs_f64();
        match result {
            Ok(()) => println!("PASS criterion {name} ({secs:.2} s, budget {budget} s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2} s, budget {budget} s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
