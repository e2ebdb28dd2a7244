//! Multivariate polynomial GCD over `Q`.
//!
//! The polynomials are viewed as univariate in a chosen main variable with
//! coefficients in the ring of the remaining variables; the primitive part of
//! the GCD comes from the subresultant remainder sequence and the content is
//! handled recursively.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::poly::MultiPoly;

/// Greatest common divisor, normalized to leading coefficient one under lex
/// order. `gcd(p, 0)` is `p` made monic; `gcd(0, 0)` is `0`.
pub fn poly_gcd(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    assert!(p.ctx() == q.ctx(), "mismatched contexts in gcd");
    if p.is_zero() {
        return q.monic();
    }
    if q.is_zero() {
        return p.monic();
    }
    let (_, p) = p.integer_primitive();
    let (_, q) = q.integer_primitive();
    gcd_rec(&p, &q).monic()
}

/// GCD up to a unit; inputs may have any rational coefficients.
fn gcd_rec(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let ctx = a.ctx();
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(ctx);
    }
    let ma = a.min_monomial();
    let mb = b.min_monomial();
    if !ma.is_one() || !mb.is_one() {
        let a2 = a.div_monomial(&ma);
        let b2 = b.div_monomial(&mb);
        return gcd_rec(&a2, &b2).mul_monomial(&ma.gcd(&mb));
    }
    if a.num_terms() == 1 || b.num_terms() == 1 {
        // a monomial with its monomial content removed is a constant
        return MultiPoly::one(ctx);
    }
    if a == b {
        return a.clone();
    }

    let n = ctx.nvars();
    // A variable present in only one argument can be eliminated by content.
    for v in 0..n {
        let (ua, ub) = (a.uses_var(v), b.uses_var(v));
        if ua && !ub {
            return gcd_rec(&content(&a.to_univariate(v)), b);
        }
        if ub && !ua {
            return gcd_rec(a, &content(&b.to_univariate(v)));
        }
    }

    // Trial division catches the common case of one argument dividing the other.
    let (small, large) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    if large.div_exact(small).is_some() {
        return small.clone();
    }

    if let Some(g) = heuristic_gcd(a, b) {
        return g;
    }

    let v = (0..n)
        .filter(|&v| a.uses_var(v))
        .min_by_key(|&v| (a.degree_in(v).max(b.degree_in(v)), a.degree_in(v) + b.degree_in(v)))
        .expect("non-constant polynomials use some variable");

    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd_rec(&ca, &cb);
    let pa: Vec<MultiPoly> = ua.iter().map(|x| exact(x, &ca)).collect();
    let pb: Vec<MultiPoly> = ub.iter().map(|x| exact(x, &cb)).collect();
    let g = subresultant_gcd(pa, pb);
    let g = MultiPoly::from_univariate(ctx, v, &g);
    &g * &c
}

/// Largest integer the heuristic may build, in bits.
const HEU_MAX_BITS: u64 = 2_000_000;

/// GCD by evaluation at a large integer `xi`: the evaluated GCD is computed
/// recursively and lifted back through its symmetric `xi`-adic expansion.
/// With `xi` above twice the smaller coefficient norm, a lifted primitive
/// candidate that divides both inputs is the GCD. Gives up after a few
/// evaluation points or when the integers grow too large.
fn heuristic_gcd(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    let (_, a) = a.integer_primitive();
    let (_, b) = b.integer_primitive();
    heu(&a, &b)
}

/// `a`, `b` nonzero with integer coefficients.
fn heu(a: &MultiPoly, b: &MultiPoly) -> Option<MultiPoly> {
    let ctx = a.ctx();
    let (ca, a) = integer_content(a);
    let (cb, b) = integer_content(b);
    let c = ca.gcd(&cb);
    let Some(v) = (0..ctx.nvars()).rev().find(|&v| a.uses_var(v) || b.uses_var(v)) else {
        return Some(MultiPoly::constant(ctx, BigRational::from_integer(c)));
    };
    let deg = a.degree_in(v).max(b.degree_in(v)) as u64 + 1;
    let mut xi = max_norm(&a).min(max_norm(&b)) * 2u32 + 29u32;
    for _ in 0..6 {
        if xi.bits() * deg > HEU_MAX_BITS {
            return None;
        }
        let at = BigRational::from_integer(xi.clone());
        let (av, bv) = (a.eval_var(v, &at), b.eval_var(v, &at));
        if !av.is_zero() && !bv.is_zero() {
            let gamma = heu(&av, &bv)?;
            let (_, g) = lift(&gamma, &xi, v).integer_primitive();
            if a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                return Some(g.scale(&BigRational::from_integer(c)));
            }
        }
        xi = xi * 73794u32 / 27011u32;
    }
    None
}

/// Positive integer content and the primitive part; coefficients must be
/// integers.
fn integer_content(p: &MultiPoly) -> (BigInt, MultiPoly) {
    let c = p.terms().iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x.numer()));
    let prim = p.scale(&BigRational::from_integer(c.clone()).recip());
    (c, prim)
}

fn max_norm(p: &MultiPoly) -> BigInt {
    p.terms().iter().map(|(_, x)| x.numer().abs()).max().unwrap_or_default()
}

/// Reads the symmetric base-`xi` digits of every coefficient of `gamma` as
/// the coefficients of `1, v, v^2, ...`.
fn lift(gamma: &MultiPoly, xi: &BigInt, v: usize) -> MultiPoly {
    let ctx = gamma.ctx();
    let half = xi >> 1u32;
    let inv = BigRational::from_integer(xi.clone()).recip();
    let mut coeffs = Vec::new();
    let mut g = gamma.clone();
    while !g.is_zero() {
        let digits = g.terms().iter().filter_map(|(m, x)| {
            let mut r = x.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (!r.is_zero()).then(|| (m.exponents().to_vec(), BigRational::from_integer(r)))
        });
        let e = MultiPoly::from_terms(ctx, digits.collect::<Vec<_>>());
        g = (&g - &e).scale(&inv);
        coeffs.push(e);
    }
    MultiPoly::from_univariate(ctx, v, &coeffs)
}

fn exact(a: &MultiPoly, d: &MultiPoly) -> MultiPoly {
    a.div_exact(d).expect("inexact division in gcd")
}

/// GCD of the coefficients of a univariate representation.
fn content(coeffs: &[MultiPoly]) -> MultiPoly {
    let mut nonzero = coeffs.iter().filter(|c| !c.is_zero());
    let first = match nonzero.next() {
        Some(c) => c.integer_primitive().1,
        None => return MultiPoly::zero(coeffs[0].ctx()),
    };
    let mut g = first;
    for c in nonzero {
        if g.is_constant() {
            break;
        }
        g = gcd_rec(&g, c);
        g = g.integer_primitive().1;
    }
    g
}

fn degree(p: &[MultiPoly]) -> usize {
    p.len() - 1
}

fn trim(mut p: Vec<MultiPoly>) -> Vec<MultiPoly> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

/// Pseudo-remainder of `a` by `b` in `R[v]`: `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let db = degree(b);
    let lcb = &b[db];
    let mut r: Vec<MultiPoly> = a.to_vec();
    let mut e = degree(a) as i64 - db as i64 + 1;
    while !(r.len() == 1 && r[0].is_zero()) && degree(&r) >= db {
        let dr = degree(&r);
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = &*x * lcb;
        }
        for (i, bi) in b.iter().enumerate() {
            let t = &lr * bi;
            r[i + shift] = &r[i + shift] - &t;
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        if r.is_empty() {
            r.push(MultiPoly::zero(lcb.ctx()));
        }
        r = trim(r);
        e -= 1;
    }
    if e > 0 {
        let f = lcb.pow(e as u32);
        for x in r.iter_mut() {
            *x = &*x * &f;
        }
    }
    r
}

fn is_zero_poly(p: &[MultiPoly]) -> bool {
    p.len() == 1 && p[0].is_zero()
}

/// Primitive GCD of two primitive polynomials in `R[v]` via the subresultant
/// remainder sequence.
fn subresultant_gcd(a: Vec<MultiPoly>, b: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let ctx = a[0].ctx().clone();
    let (mut a, mut b) = if degree(&a) >= degree(&b) { (a, b) } else { (b, a) };
    let mut g = MultiPoly::one(&ctx);
    let mut h = MultiPoly::one(&ctx);
    loop {
        let delta = (degree(&a) - degree(&b)) as u32;
        let r = prem(&a, &b);
        if is_zero_poly(&r) {
            return primitive(b);
        }
        if degree(&r) == 0 {
            return vec![MultiPoly::one(&ctx)];
        }
        let div = &g * &h.pow(delta);
        a = b;
        b = r.iter().map(|x| exact(x, &div)).collect();
        g = a[degree(&a)].clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => exact(&g.pow(d), &h.pow(d - 1)),
        };
    }
}

fn primitive(p: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let c = content(&p);
    if c.is_zero() {
        return p;
    }
    p.iter().map(|x| exact(x, &c)).collect()
}
