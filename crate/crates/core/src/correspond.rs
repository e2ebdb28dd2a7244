//! From a derivation to the action it integrates, and back.
//!
//! `exp(zD)` applied to a generator gives a power series in `z`; substituting
//! `z = log t` turns it into a power series in `t - 1`. When that series is
//! the expansion of a rational function of `t` of small degree, the extended
//! Euclidean algorithm finds it. A candidate action is only reported after it
//! passes the action axioms and reproduces the derivation exactly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::action::{expand_in_t_minus_one, GmAction};
use crate::context::Context;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::gcd::poly_gcd;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;
use crate::series::{SeriesVar, TruncSeries};

pub const DEFAULT_ORDER: usize = 16;
pub const DEFAULT_DMAX: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// A verified action. `eigenvalues[i]` is set when generator `i` is
    /// itself an eigenvector of the derivation.
    Semisimple { action: GmAction, eigenvalues: Vec<Option<i64>> },
    /// No action was found at this truncation order; this proves nothing
    /// about the derivation.
    NotCertifiedAtOrder { order: usize, generator: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub order_used: usize,
}

impl Certificate {
    pub fn action(&self) -> Option<&GmAction> {
        match &self.verdict {
            Verdict::Semisimple { action, .. } => Some(action),
            Verdict::NotCertifiedAtOrder { .. } => None,
        }
    }

    pub fn is_semisimple(&self) -> bool {
        self.action().is_some()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Semisimple { action, .. } => {
                write!(f, "SEMISIMPLE order={} {action}", self.order_used)
            }
            Verdict::NotCertifiedAtOrder { order, generator } => {
                write!(f, "NOT_CERTIFIED order={order} generator={generator}")
            }
        }
    }
}

/// Dense polynomial in `u` over `K`, lowest degree first, no trailing zeros.
type UPoly = Vec<RatFunc>;

/// The same over `Q`, for series specialized at a point.
type QPoly = Vec<BigRational>;

fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(RatFunc::is_zero) {
        p.pop();
    }
    p
}

fn qtrim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(BigRational::is_zero) {
        p.pop();
    }
    p
}

fn deg<T>(p: &[T]) -> Option<usize> {
    p.len().checked_sub(1)
}

fn qpoly_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let out = (0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect();
    qtrim(out)
}

fn qpoly_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[i + j] += x * y;
        }
    }
    qtrim(out)
}

fn qpoly_divmod(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let db = deg(b).expect("nonzero divisor");
    let lead_inv = b[db].recip();
    let mut r = a.clone();
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] * &lead_inv;
        for (j, bj) in b.iter().enumerate().filter(|(_, bj)| !bj.is_zero()) {
            r[dr - db + j] -= &c * bj;
        }
        r[dr] = BigRational::zero();
        q[dr - db] = c;
        r = qtrim(r);
    }
    (qtrim(q), r)
}

/// Walks the remainder sequence of `(u^(N+1), S)`, where `S` has order `N`,
/// and returns the first pair `(r_i, s_i)`, with `r_i = s_i S mod u^(N+1)`,
/// accepted by `accept(deg r_i, s_i)`.
fn euclid_search(series: &QPoly, accept: impl Fn(usize, &QPoly) -> bool) -> Option<(QPoly, QPoly)> {
    let n = series.len() - 1;
    let mut r0: QPoly = vec![BigRational::zero(); n + 2];
    r0[n + 1] = BigRational::one();
    let mut r1 = qtrim(series.clone());
    let mut s0: QPoly = Vec::new();
    let mut s1: QPoly = vec![BigRational::one()];
    loop {
        let d1 = deg(&r1)?;
        if accept(d1, &s1) {
            return Some((r1, s1));
        }
        let (q, mut r) = qpoly_divmod(&r0, &r1);
        let mut s = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
        // scaling a pair keeps r = s S and stops coefficient growth
        if let Some(lc) = r.last().map(BigRational::recip) {
            r.iter_mut().chain(s.iter_mut()).for_each(|c| *c *= &lc);
        }
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
}

/// `p(t - 1)` as an element of `ext`, where `t` is its last variable.
fn in_t(p: &UPoly, ext: &Context) -> Result<RatFunc> {
    let t = RatFunc::var(ext, ext.nvars() - 1);
    let u = &t - &RatFunc::one(ext);
    let mut acc = RatFunc::zero(ext);
    for c in p.iter().rev() {
        acc = &(&acc * &u) + &c.embed(ext)?;
    }
    Ok(acc)
}

/// `p / q` in `K(t)` matching `series` through its order, or `None`.
fn candidate(series: &TruncSeries, p: &UPoly, q: &UPoly) -> Result<Option<RatFunc>> {
    if q.first().is_none_or(RatFunc::is_zero) {
        return Ok(None);
    }
    let base = series.ctx();
    let ext = GmAction::extended_context(base)?;
    let f = in_t(p, &ext)?.checked_div(&in_t(q, &ext)?)?;
    let check = expand_in_t_minus_one(base, base.nvars(), &f, series.order())?;
    Ok((check == *series).then_some(f))
}

/// Evaluation points used to read off the degrees of a candidate from a
/// series over `Q`; the exact coefficients are then solved for over `K`.
fn probe_point(round: usize, nvars: usize) -> Vec<BigRational> {
    (0..nvars)
        .map(|v| {
            let num = 97 + 31 * v as i64 + 57 * round as i64;
            let den = 7 + 4 * v as i64 + 2 * round as i64;
            let sign = if (v + round).is_multiple_of(2) { 1 } else { -1 };
            BigRational::new(BigInt::from(sign * num), BigInt::from(den))
        })
        .collect()
}

const PROBE_ROUNDS: usize = 3;

fn specialize(series: &TruncSeries, point: &[BigRational]) -> Option<QPoly> {
    series
        .coeffs()
        .iter()
        .map(|c| {
            let den = c.den().eval_point(point);
            (!den.is_zero()).then(|| c.num().eval_point(point) / den)
        })
        .collect()
}

/// Degrees of `r / s` after cancelling their common factor.
fn reduced_degrees(r: &QPoly, s: &QPoly) -> (usize, usize) {
    let uctx = Context::new(&["u"]).expect("valid name");
    let to_poly = |p: &QPoly| {
        MultiPoly::from_terms(
            &uctx,
            p.iter().enumerate().map(|(i, c)| (vec![i as u32], c.clone())).collect::<Vec<_>>(),
        )
    };
    let (rp, sp) = (to_poly(r), to_poly(s));
    let g = poly_gcd(&rp, &sp).degree_in(0) as usize;
    (rp.degree_in(0) as usize - g, sp.degree_in(0) as usize - g)
}

/// Coefficients `q_0 = 1, q_1, ..., q_n` with `q S = p mod u^(N+1)` for some
/// `p` of degree at most `m`, by elimination over `K`.
fn solve_denominator(series: &TruncSeries, m: usize, n: usize) -> Option<UPoly> {
    let ctx = series.ctx();
    let s = |i: isize| -> RatFunc {
        if i < 0 {
            RatFunc::zero(ctx)
        } else {
            series.coeff(i as usize).clone()
        }
    };
    // echelon rows over columns q_1..q_n followed by the right-hand side
    let mut pivots: Vec<(usize, Vec<RatFunc>)> = Vec::new();
    for k in (m + 1)..=series.order() {
        if pivots.len() == n {
            break;
        }
        let mut row: Vec<RatFunc> = (1..=n).map(|j| s(k as isize - j as isize)).collect();
        row.push(-&s(k as isize));
        for (col, prow) in &pivots {
            if row[*col].is_zero() {
                continue;
            }
            let c = row[*col].clone();
            for (x, y) in row.iter_mut().zip(prow) {
                if !y.is_zero() {
                    *x = &*x - &(&c * y);
                }
            }
        }
        let Some(col) = (0..n).find(|&j| !row[j].is_zero()) else {
            if row[n].is_zero() {
                continue;
            }
            return None;
        };
        let inv = row[col].inv().ok()?;
        let row: Vec<RatFunc> = row.iter().map(|x| x * &inv).collect();
        pivots.push((col, row));
    }
    if pivots.len() < n {
        return None;
    }
    // each pivot row is zero in the pivot columns of the rows before it
    let mut q = vec![RatFunc::zero(ctx); n + 1];
    q[0] = RatFunc::one(ctx);
    for (col, row) in pivots.iter().rev() {
        let mut v = row[n].clone();
        for j in 0..n {
            if j != *col && !row[j].is_zero() && !q[j + 1].is_zero() {
                v = &v - &(&row[j] * &q[j + 1]);
            }
        }
        q[col + 1] = v;
    }
    Some(q)
}

/// `series * t^k` over `Q`, using `t = 1 + u` and keeping the order.
fn qtimes_t_power(series: &QPoly, k: usize) -> QPoly {
    let mut out = series.clone();
    for _ in 0..k {
        for i in (1..out.len()).rev() {
            let prev = out[i - 1].clone();
            out[i] += prev;
        }
    }
    out
}

/// `series * t^k`, using `t = 1 + u`.
fn times_t_power(series: &TruncSeries, k: usize) -> Result<TruncSeries> {
    let ctx = series.ctx();
    let n = series.order();
    let one_plus_u = TruncSeries::constant(RatFunc::one(ctx), SeriesVar::TMinusOne, n)
        .checked_add(&TruncSeries::variable(ctx, SeriesVar::TMinusOne, n))?;
    (0..k).try_fold(series.clone(), |acc, _| acc.checked_mul(&one_plus_u))
}

/// Looks for a rational `t^k * series` with `k` in `0..=max_shift` and
/// returns it divided by `t^k`.
///
/// The remainder sequence runs on specializations of the series at a few
/// rational points, which is cheap and fixes the degrees of the candidate;
/// its coefficients are then solved for over `K` and the candidate is
/// checked against the whole series. `accept` picks the remainder and
/// `admit` vets it.
fn reconstruct_with(
    series: &TruncSeries,
    max_shift: usize,
    accept: impl Fn(usize, &QPoly) -> bool,
    admit: impl Fn(&QPoly, &QPoly) -> bool,
) -> Result<Option<RatFunc>> {
    let ctx = series.ctx();
    let nvars = ctx.nvars();
    let rounds = if nvars == 0 { 1 } else { PROBE_ROUNDS };
    for round in 0..rounds {
        let Some(spec) = specialize(series, &probe_point(round, nvars)) else {
            continue;
        };
        // every shift that yields a candidate gives the same function, so
        // the smallest linear system over K goes first
        let mut shapes: Vec<(usize, usize, usize)> = (0..=max_shift)
            .filter_map(|k| {
                let (r, s) = euclid_search(&qtimes_t_power(&spec, k), &accept)?;
                admit(&r, &s).then(|| {
                    let (m, n) = reduced_degrees(&r, &s);
                    (n, m, k)
                })
            })
            .collect();
        shapes.sort_unstable();
        for (n, m, k) in shapes {
            let shifted = times_t_power(series, k)?;
            let Some(q) = solve_denominator(&shifted, m, n) else {
                continue;
            };
            let p: UPoly = (0..=m)
                .map(|i| {
                    (0..=i.min(n))
                        .map(|j| &q[j] * shifted.coeff(i - j))
                        .fold(RatFunc::zero(ctx), |acc, x| &acc + &x)
                })
                .collect();
            if let Some(f) = candidate(&shifted, &trim(p), &q)? {
                let ext = f.ctx().clone();
                let t = RatFunc::var(&ext, ext.nvars() - 1);
                return Ok(Some(f.checked_div(&t.pow(k as i64)?)?));
            }
        }
    }
    Ok(None)
}

/// Finds `p(t)/q(t)` with `deg p <= dmax_num` and `deg q <= dmax_den` whose
/// expansion at `t = 1` is `a`, taking the first remainder of the extended
/// Euclidean algorithm on `(u^(N+1), a)` of degree at most `dmax_num`. The
/// result lives in the coefficient context extended by `t`.
pub fn rational_reconstruct(a: &TruncSeries, dmax_num: usize, dmax_den: usize) -> Result<RatFunc> {
    if a.var() != SeriesVar::TMinusOne {
        return Err(Error::Context("reconstruction expects a series in t-1".into()));
    }
    if dmax_num + dmax_den >= a.order() {
        return Err(Error::Parameter(format!(
            "degree bounds ({dmax_num}, {dmax_den}) need a series of order above {}, got {}",
            dmax_num + dmax_den,
            a.order()
        )));
    }
    let found = reconstruct_with(
        a,
        0,
        |dr, _| dr <= dmax_num,
        |_, s| deg(s).is_some_and(|d| d <= dmax_den) && !s[0].is_zero(),
    )?;
    found.ok_or(Error::Reconstruction { num: dmax_num, den: dmax_den })
}

fn integer_eigenvalue(d: &Derivation, x: &RatFunc) -> Result<Option<i64>> {
    Ok(d.eigen_test(x)?.filter(|l| l.is_integer()).and_then(|l| l.to_integer().to_i64()))
}

/// Images of mixed-sign weight have a pole at `t = 0`; multiplying by a
/// power of `t` first keeps that pole from using up the degree budget.
fn reconstruct_image(series: &TruncSeries, dmax: usize) -> Result<Option<RatFunc>> {
    let budget = 2 * dmax + 1;
    reconstruct_with(series, dmax, |dr, s| dr + deg(s).unwrap_or(0) <= budget && !s[0].is_zero(), |_, _| true)
}

/// Integrates `d` to an action by summing `exp(zD)` to `order`, substituting
/// `z = log t` and reconstructing each generator image with t-degrees
/// bounded by `dmax`. Requires `order >= 2 dmax + 2`.
pub fn action_from_derivation(d: &Derivation, order: usize, dmax: usize) -> Result<Certificate> {
    if order < 2 * dmax + 2 {
        return Err(Error::Parameter(format!(
            "order {order} is too small for degree bound {dmax}; need at least {}",
            2 * dmax + 2
        )));
    }
    let base = d.ctx();
    let ext = GmAction::extended_context(base)?;
    let t = RatFunc::var(&ext, base.nvars());
    let not_certified = |i: usize| Certificate {
        verdict: Verdict::NotCertifiedAtOrder { order, generator: base.var_name(i).to_string() },
        order_used: order,
    };
    let mut images = Vec::with_capacity(base.nvars());
    let mut eigenvalues = Vec::with_capacity(base.nvars());
    for i in 0..base.nvars() {
        let x = RatFunc::var(base, i);
        let lambda = integer_eigenvalue(d, &x)?;
        eigenvalues.push(lambda);
        if let Some(l) = lambda {
            images.push(&t.pow(l)? * &x.embed(&ext)?);
            continue;
        }
        let series = d.exp_series(&x, order).sigma()?;
        match reconstruct_image(&series, dmax)? {
            Some(f) => images.push(f),
            None => return Ok(not_certified(i)),
        }
    }
    let action = GmAction::from_images_unchecked(base, images)?;
    if let Some(i) = action.identity_failure().or_else(|| action.cocycle_failure()) {
        return Ok(not_certified(i));
    }
    let back = action.extract_derivation()?;
    if let Some(i) = (0..base.nvars()).find(|&i| back.image(i) != d.image(i)) {
        return Ok(not_certified(i));
    }
    Ok(Certificate { verdict: Verdict::Semisimple { action, eigenvalues }, order_used: order })
}

/// Whether `d` integrates to a certified action whose generator is `d`.
pub fn round_trip_da(d: &Derivation, order: usize, dmax: usize) -> Result<bool> {
    let cert = action_from_derivation(d, order, dmax)?;
    match cert.action() {
        Some(a) => Ok(a.extract_derivation()? == *d),
        None => Ok(false),
    }
}

/// Whether the generator of `a` integrates back to exactly `a`.
pub fn round_trip_ad(a: &GmAction, order: usize, dmax: usize) -> Result<bool> {
    let d = a.extract_derivation()?;
    let cert = action_from_derivation(&d, order, dmax)?;
    Ok(cert.action().is_some_and(|b| b.images() == a.images()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::BirationalMap;
    use crate::expr::parse_ratfunc;

    fn ctx() -> Context {
        Context::new(&["x", "y"]).unwrap()
    }

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &ctx()).unwrap()
    }

    fn rt(s: &str) -> RatFunc {
        parse_ratfunc(s, &GmAction::extended_context(&ctx()).unwrap()).unwrap()
    }

    fn series(cs: &[&str]) -> TruncSeries {
        TruncSeries::new(SeriesVar::TMinusOne, cs.iter().map(|c| r(c)).collect()).unwrap()
    }

    #[test]
    fn reconstructs_polynomial() {
        let s = series(&["1", "2", "1", "0", "0"]);
        assert_eq!(rational_reconstruct(&s, 2, 0).unwrap(), rt("t^2"));
    }

    #[test]
    fn reconstructs_geometric_series() {
        let s = series(&["1"; 9]);
        assert_eq!(rational_reconstruct(&s, 0, 1).unwrap(), rt("1/(2 - t)"));
    }

    #[test]
    fn log_series_is_not_rational() {
        let log = TruncSeries::log_one_plus(&ctx(), SeriesVar::TMinusOne, 16);
        for (n, d) in [(7, 7), (8, 7), (7, 8), (3, 3), (15, 0), (0, 15)] {
            assert_eq!(rational_reconstruct(&log, n, d), Err(Error::Reconstruction { num: n, den: d }));
        }
        assert!(matches!(rational_reconstruct(&log, 8, 8), Err(Error::Parameter(_))));
    }

    #[test]
    fn euler_fast_path() {
        let e = Derivation::euler(&ctx(), &[2, 3]).unwrap();
        let cert = action_from_derivation(&e, 16, 7).unwrap();
        assert_eq!(cert.to_string(), "SEMISIMPLE order=16 action { x -> t^2*x; y -> t^3*y; }");
    }

    #[test]
    fn translation_is_not_certified() {
        let c = Context::new(&["x"]).unwrap();
        let d = Derivation::new(&c, vec![RatFunc::one(&c)]).unwrap();
        let cert = action_from_derivation(&d, 16, 7).unwrap();
        assert_eq!(cert.to_string(), "NOT_CERTIFIED order=16 generator=x");
        let half = Derivation::new(&c, vec![parse_ratfunc("x/2", &c).unwrap()]).unwrap();
        assert!(!action_from_derivation(&half, 16, 7).unwrap().is_semisimple());
    }

    #[test]
    fn order_must_cover_bounds() {
        let e = Derivation::euler(&ctx(), &[1, 1]).unwrap();
        assert!(matches!(action_from_derivation(&e, 15, 7), Err(Error::Parameter(_))));
    }

    #[test]
    fn conjugated_derivation_integrates_to_conjugated_action() {
        let m =
            BirationalMap::new(&ctx(), vec![r("(x-1)*(y-1)+1"), r("y")], vec![r("(x-1)/(y-1)+1"), r("y")])
                .unwrap();
        let d = Derivation::euler(&ctx(), &[2, 3]).unwrap().conjugate(&m).unwrap();
        let cert = action_from_derivation(&d, 16, 7).unwrap();
        let a = cert.action().expect("certified");
        assert_eq!(a.image(0), &rt("(t^2*((x-1)*(y-1)+1)-1)/(t^3*y-1) + 1"));
        assert_eq!(a.image(1), &rt("t^3*y"));
    }

    #[test]
    fn round_trips() {
        let zero = Derivation::zero(&ctx());
        assert!(round_trip_da(&zero, 16, 7).unwrap());
        assert!(round_trip_ad(&GmAction::trivial(&ctx()).unwrap(), 16, 7).unwrap());
        assert!(round_trip_ad(&GmAction::diagonal(&ctx(), &[-5, 4]).unwrap(), 16, 7).unwrap());
    }
}
