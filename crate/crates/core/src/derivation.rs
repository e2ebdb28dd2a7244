//! Derivations of `Q(x1, ..., xn)` and birational automorphisms.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::factored::Factored;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;
use crate::series::{SeriesVar, TruncSeries};

/// A derivation, stored as the images of the generators.
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    ctx: Context,
    images: Vec<RatFunc>,
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Derivation {
    pub fn new(ctx: &Context, images: Vec<RatFunc>) -> Result<Self> {
        if images.len() != ctx.nvars() {
            return Err(Error::Context(format!(
                "a derivation needs {} images, got {}",
                ctx.nvars(),
                images.len()
            )));
        }
        for g in &images {
            ctx.check_same(g.ctx())?;
        }
        Ok(Derivation { ctx: ctx.clone(), images })
    }

    pub fn zero(ctx: &Context) -> Self {
        Derivation { ctx: ctx.clone(), images: vec![RatFunc::zero(ctx); ctx.nvars()] }
    }

    /// `sum w_i x_i d/dx_i`.
    pub fn euler(ctx: &Context, weights: &[i64]) -> Result<Self> {
        let images = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| RatFunc::var(ctx, i).scale(&BigRational::from_integer(BigInt::from(w))))
            .collect();
        Self::new(ctx, images)
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn images(&self) -> &[RatFunc] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &RatFunc {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(RatFunc::is_zero)
    }

    /// `D(p) * L` where `L` is the common denominator `den`.
    fn apply_poly(&self, p: &MultiPoly, den: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(&self.ctx);
        for (v, g) in self.images.iter().enumerate() {
            if g.is_zero() || !p.uses_var(v) {
                continue;
            }
            let cof = den.div_exact(g.den()).expect("common denominator");
            acc = &acc + &(&(&p.partial(v) * g.num()) * &cof);
        }
        acc
    }

    /// The distinct non-constant denominators of the images.
    fn image_denominators(&self) -> Vec<MultiPoly> {
        let mut dens: Vec<MultiPoly> = Vec::new();
        for g in &self.images {
            if !g.den().is_one() && !dens.contains(g.den()) {
                dens.push(g.den().clone());
            }
        }
        dens
    }

    /// `D(p / prod c^e) = (R D(p) - p sum e D(c) R / c) / (R prod c^e)` with
    /// `R = prod c`, everything scaled by the image denominators `dens`.
    fn apply_factored(&self, f: &Factored, dens: &[MultiPoly], l: &MultiPoly) -> Factored {
        let one = MultiPoly::one(&self.ctx);
        let r = f.den.iter().fold(one, |acc, (c, _)| &acc * c);
        let mut num = &r * &self.apply_poly(&f.num, l);
        for (c, e) in &f.den {
            let dc = self.apply_poly(c, l);
            if dc.is_zero() {
                continue;
            }
            let rest = r.div_exact(c).expect("factor of the product");
            let term = (&dc * &rest).scale(&BigRational::from_integer(BigInt::from(*e)));
            num = &num - &(&f.num * &term);
        }
        let mut pieces: Vec<(MultiPoly, u32)> = f.den.iter().map(|(c, e)| (c.clone(), e + 1)).collect();
        pieces.extend(dens.iter().map(|d| (d.clone(), 1)));
        Factored::cancel(num, pieces)
    }

    /// Value of the derivation on `f`, by the Leibniz and quotient rules.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        self.iterate(f, 1)
    }

    /// `D^i(f)`.
    pub fn iterate(&self, f: &RatFunc, i: usize) -> RatFunc {
        self.iterates(f, i).last().expect("at least f itself").to_ratfunc()
    }

    /// `f, D(f), ..., D^i(f)` in factored form.
    fn iterates(&self, f: &RatFunc, i: usize) -> Vec<Factored> {
        let dens = self.image_denominators();
        let l = dens.iter().fold(MultiPoly::one(&self.ctx), |acc, d| &acc * d);
        let mut out = vec![Factored::from_ratfunc(f)];
        for _ in 0..i {
            let next = self.apply_factored(out.last().unwrap(), &dens, &l);
            out.push(next);
        }
        out
    }

    /// `sum_{i <= order} z^i D^i(f) / i!`.
    pub fn exp_series(&self, f: &RatFunc, order: usize) -> TruncSeries {
        let mut fact = BigInt::one();
        let coeffs = self
            .iterates(f, order)
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if i > 0 {
                    fact *= BigInt::from(i);
                }
                g.to_ratfunc().scale(&BigRational::new(BigInt::one(), fact.clone()))
            })
            .collect();
        TruncSeries::new(SeriesVar::Z, coeffs).expect("coefficients share a context")
    }

    /// The eigenvalue of `f`, if `D(f)` is a constant multiple of `f`.
    pub fn eigen_test(&self, f: &RatFunc) -> Result<Option<BigRational>> {
        if f.is_zero() {
            return Err(Error::Domain("eigen test of the zero function".into()));
        }
        let ratio = self.apply(f).checked_div(f)?;
        Ok(ratio.constant_value())
    }

    pub fn is_invariant(&self, f: &RatFunc) -> bool {
        self.apply(f).is_zero()
    }

    /// `m o D o m^-1`: on each generator, take its inverse image, apply `D`,
    /// then substitute the forward images.
    pub fn conjugate(&self, m: &BirationalMap) -> Result<Derivation> {
        self.ctx.check_same(m.ctx())?;
        let images =
            m.inverse_images().iter().map(|g| m.apply_forward(&self.apply(g))).collect::<Result<Vec<_>>>()?;
        Derivation::new(&self.ctx, images)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, "der", &self.ctx, &self.images)
    }
}

pub(crate) fn write_block(
    f: &mut fmt::Formatter<'_>,
    keyword: &str,
    ctx: &Context,
    images: &[RatFunc],
) -> fmt::Result {
    write!(f, "{keyword} {{")?;
    for (i, g) in images.iter().enumerate() {
        write!(f, " {} -> {g};", ctx.var_name(i))?;
    }
    f.write_str(" }")
}

/// A birational automorphism given by forward and inverse generator images.
/// Construction checks that the two compose to the identity both ways.
#[derive(Clone, PartialEq, Eq)]
pub struct BirationalMap {
    ctx: Context,
    forward: Vec<RatFunc>,
    inverse: Vec<RatFunc>,
}

impl fmt::Debug for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl BirationalMap {
    pub fn new(ctx: &Context, forward: Vec<RatFunc>, inverse: Vec<RatFunc>) -> Result<Self> {
        let n = ctx.nvars();
        if forward.len() != n || inverse.len() != n {
            return Err(Error::InvalidMap(format!("expected {n} forward and {n} inverse images")));
        }
        for g in forward.iter().chain(&inverse) {
            ctx.check_same(g.ctx())?;
        }
        let m = BirationalMap { ctx: ctx.clone(), forward, inverse };
        for (i, name) in ctx.vars().iter().enumerate() {
            let x = MultiPoly::var(ctx, i);
            let one = MultiPoly::one(ctx);
            let fail = |dir: &str| Error::InvalidMap(format!("{dir} composition does not fix {name}"));
            let (n1, d1) =
                m.forward[i].substitute_unreduced(&m.inverse).map_err(|_| fail("forward after inverse"))?;
            if !RatFunc::fractions_equal(&n1, &d1, &x, &one) {
                return Err(fail("forward after inverse"));
            }
            let (n2, d2) =
                m.inverse[i].substitute_unreduced(&m.forward).map_err(|_| fail("inverse after forward"))?;
            if !RatFunc::fractions_equal(&n2, &d2, &x, &one) {
                return Err(fail("inverse after forward"));
            }
        }
        Ok(m)
    }

    pub fn identity(ctx: &Context) -> Self {
        let ids: Vec<RatFunc> = (0..ctx.nvars()).map(|i| RatFunc::var(ctx, i)).collect();
        BirationalMap { ctx: ctx.clone(), forward: ids.clone(), inverse: ids }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn forward_images(&self) -> &[RatFunc] {
        &self.forward
    }

    pub fn inverse_images(&self) -> &[RatFunc] {
        &self.inverse
    }

    pub fn inverse(&self) -> BirationalMap {
        BirationalMap { ctx: self.ctx.clone(), forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// `f(forward(x))`.
    pub fn apply_forward(&self, f: &RatFunc) -> Result<RatFunc> {
        f.substitute(&self.forward)
    }

    /// `f(inverse(x))`.
    pub fn apply_inverse(&self, f: &RatFunc) -> Result<RatFunc> {
        f.substitute(&self.inverse)
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, "map", &self.ctx, &self.forward)?;
        f.write_str(" ")?;
        write_block(f, "inverse", &self.ctx, &self.inverse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_ratfunc;

    fn ctx() -> Context {
        Context::new(&["x", "y"]).unwrap()
    }

    fn r(s: &str) -> RatFunc {
        parse_ratfunc(s, &ctx()).unwrap()
    }

    fn der(images: &[&str]) -> Derivation {
        Derivation::new(&ctx(), images.iter().map(|s| r(s)).collect()).unwrap()
    }

    fn jonquieres() -> BirationalMap {
        BirationalMap::new(&ctx(), vec![r("(x-1)*(y-1)+1"), r("y")], vec![r("(x-1)/(y-1)+1"), r("y")])
            .unwrap()
    }

    #[test]
    fn apply_examples() {
        let e = Derivation::euler(&ctx(), &[2, 3]).unwrap();
        assert_eq!(e.apply(&r("x^2*y")), r("7*x^2*y"));
        assert!(e.apply(&r("5/3")).is_zero());
        assert_eq!(der(&["1", "0"]).apply(&r("1/(x+y)")), r("-1/(x+y)^2"));
    }

    #[test]
    fn iterate_examples() {
        let e = Derivation::euler(&ctx(), &[2, 3]).unwrap();
        assert_eq!(e.iterate(&r("x"), 3), r("8*x"));
        assert_eq!(e.iterate(&r("x+y"), 0), r("x+y"));
        assert_eq!(der(&["1", "0"]).iterate(&r("x^2"), 2), r("2"));
    }

    #[test]
    fn exp_series_of_eigenvector() {
        let d = der(&["2*x", "0"]);
        let s = d.exp_series(&r("x"), 3);
        let want: Vec<RatFunc> = ["x", "2*x", "2*x", "4/3*x"].iter().map(|c| r(c)).collect();
        assert_eq!(s.coeffs(), want.as_slice());
        let c = d.exp_series(&r("7"), 4);
        assert_eq!(c, TruncSeries::constant(r("7"), SeriesVar::Z, 4));
    }

    #[test]
    fn eigen_examples() {
        let e = Derivation::euler(&ctx(), &[2, 3]).unwrap();
        assert_eq!(e.eigen_test(&r("y/x")).unwrap(), Some(BigRational::one()));
        assert_eq!(e.eigen_test(&r("x+y")).unwrap(), None);
        assert_eq!(e.eigen_test(&r("3")).unwrap(), Some(BigRational::from_integer(0.into())));
        assert!(e.eigen_test(&RatFunc::zero(&ctx())).is_err());
        assert!(e.is_invariant(&r("x^3/y^2")));
        assert!(!e.is_invariant(&r("x")));
        assert!(e.is_invariant(&r("-2")));
    }

    #[test]
    fn conjugated_euler_derivation() {
        let e = Derivation::euler(&ctx(), &[2, 3]).unwrap();
        let d = e.conjugate(&jonquieres()).unwrap();
        assert_eq!(d, der(&["(2*((x-1)*(y-1)+1) - 3*(x-1)*y)/(y-1)", "3*y"]));
        assert_eq!(d.conjugate(&jonquieres().inverse()).unwrap(), e);
        assert_eq!(e.conjugate(&BirationalMap::identity(&ctx())).unwrap(), e);
    }

    #[test]
    fn map_validation() {
        assert!(BirationalMap::new(&ctx(), vec![r("x+1"), r("y")], vec![r("x"), r("y")]).is_err());
        assert!(BirationalMap::new(&ctx(), vec![r("x*y"), r("y")], vec![r("x/y"), r("y")]).is_ok());
        assert!(BirationalMap::new(&ctx(), vec![r("x"), r("x")], vec![r("x"), r("y")]).is_err());
    }

    #[test]
    fn display() {
        let e = Derivation::euler(&ctx(), &[2, -1]).unwrap();
        assert_eq!(e.to_string(), "der { x -> 2*x; y -> -y; }");
        assert_eq!(
            jonquieres().to_string(),
            "map { x -> x*y - x - y + 2; y -> y; } inverse { x -> (x + y - 2)/(y - 1); y -> y; }"
        );
    }
}
