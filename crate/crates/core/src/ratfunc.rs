//! Elements of `Q(x1, ..., xn)` in canonical reduced form.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::gcd::poly_gcd;
use crate::poly::MultiPoly;

/// A rational function `num / den` with `gcd(num, den) = 1` and `den` monic
/// under lex order. Zero is `0 / 1`. Equal values have equal representations.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl RatFunc {
    /// Builds and canonicalizes `num / den`.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        num.ctx().check_same(den.ctx())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero(num.ctx());
        }
        if den.is_constant() {
            return Self::normalized(num, den);
        }
        let g = poly_gcd(&num, &den);
        if g.is_one() {
            Self::normalized(num, den)
        } else {
            let n = num.div_exact(&g).expect("gcd divides numerator");
            let d = den.div_exact(&g).expect("gcd divides denominator");
            Self::normalized(n, d)
        }
    }

    /// Makes `den` monic; assumes the fraction is already reduced.
    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    /// Wraps a fraction the caller has already reduced, with `den` monic.
    pub(crate) fn from_reduced(num: MultiPoly, den: MultiPoly) -> Self {
        debug_assert!(den.leading_coeff().is_one());
        if num.is_zero() {
            return Self::zero(num.ctx());
        }
        RatFunc { num, den }
    }

    pub fn zero(ctx: &Context) -> Self {
        RatFunc { num: MultiPoly::zero(ctx), den: MultiPoly::one(ctx) }
    }

    pub fn one(ctx: &Context) -> Self {
        RatFunc { num: MultiPoly::one(ctx), den: MultiPoly::one(ctx) }
    }

    pub fn constant(ctx: &Context, c: BigRational) -> Self {
        RatFunc { num: MultiPoly::constant(ctx, c), den: MultiPoly::one(ctx) }
    }

    pub fn from_int(ctx: &Context, c: i64) -> Self {
        Self::constant(ctx, BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(ctx: &Context, i: usize) -> Self {
        RatFunc { num: MultiPoly::var(ctx, i), den: MultiPoly::one(ctx) }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let ctx = p.ctx().clone();
        RatFunc { num: p, den: MultiPoly::one(&ctx) }
    }

    pub fn ctx(&self) -> &Context {
        self.num.ctx()
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn into_parts(self) -> (MultiPoly, MultiPoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.num.uses_var(v) || self.den.uses_var(v)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ctx().check_same(other.ctx())?;
        Ok(self.add_impl(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ctx().check_same(other.ctx())?;
        Ok(self.add_impl(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ctx().check_same(other.ctx())?;
        Ok(self.mul_impl(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.ctx().check_same(other.ctx())?;
        let inv = other.inv()?;
        Ok(self.mul_impl(&inv))
    }

    // a/b + c/d with g = gcd(b, d): only the factor g can cancel.
    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let combine = |x: &MultiPoly, y: &MultiPoly| if negate { x - y } else { x + y };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        if self.den == other.den {
            let n = combine(&self.num, &other.num);
            return Self::reduce(n, self.den.clone());
        }
        if self.den.is_one() {
            let n = combine(&(&self.num * &other.den), &other.num);
            return Self::normalized(n, other.den.clone());
        }
        if other.den.is_one() {
            let n = combine(&self.num, &(&other.num * &self.den));
            return Self::normalized(n, self.den.clone());
        }
        let g = poly_gcd(&self.den, &other.den);
        if g.is_one() {
            let n = combine(&(&self.num * &other.den), &(&other.num * &self.den));
            return Self::normalized(n, &self.den * &other.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let n = combine(&(&self.num * &d1), &(&other.num * &b1));
        if n.is_zero() {
            return Self::zero(self.ctx());
        }
        let g2 = poly_gcd(&n, &g);
        let (n, g) =
            if g2.is_one() { (n, g) } else { (n.div_exact(&g2).unwrap(), g.div_exact(&g2).unwrap()) };
        Self::normalized(n, &(&b1 * &d1) * &g)
    }

    // (a/b)(c/d) = (a/g1)(c/g2) / ((b/g2)(d/g1)), g1 = gcd(a,d), g2 = gcd(c,b)
    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ctx());
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let cancel = |a: &MultiPoly, d: &MultiPoly| -> (MultiPoly, MultiPoly) {
            if d.is_constant() || a.is_constant() {
                return (a.clone(), d.clone());
            }
            let g = poly_gcd(a, d);
            if g.is_one() {
                (a.clone(), d.clone())
            } else {
                (a.div_exact(&g).unwrap(), d.div_exact(&g).unwrap())
            }
        };
        let (a, d) = cancel(&self.num, &other.den);
        let (c, b) = cancel(&other.num, &self.den);
        Self::normalized(&a * &c, &b * &d)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.ctx());
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Ok(Self::normalized(base.num.pow(k), base.den.pow(k)))
    }

    /// Partial derivative by the quotient rule.
    pub fn partial(&self, v: usize) -> Self {
        let dn = self.num.partial(v);
        if self.den.is_constant() {
            return RatFunc { num: dn, den: self.den.clone() };
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(num, self.den.pow(2))
    }

    /// Substitutes `x_i -> images[i]` for every variable of `self.ctx()`;
    /// the images live in a common target context.
    pub fn substitute(&self, images: &[RatFunc]) -> Result<Self> {
        let (n, d) = self.substitute_unreduced(images)?;
        Ok(Self::reduce(n, d))
    }

    /// Like [`substitute`](Self::substitute) but returns an unreduced
    /// numerator/denominator pair, which is enough for equality tests.
    pub fn substitute_unreduced(&self, images: &[RatFunc]) -> Result<(MultiPoly, MultiPoly)> {
        let ctx = self.ctx();
        if images.len() != ctx.nvars() {
            return Err(Error::Substitution(format!(
                "expected {} images, got {}",
                ctx.nvars(),
                images.len()
            )));
        }
        let target = match images.first() {
            Some(g) => g.ctx().clone(),
            None => ctx.clone(),
        };
        for g in images {
            target.check_same(g.ctx())?;
        }
        let nums: Vec<MultiPoly> = images.iter().map(|g| g.num.clone()).collect();
        let dens: Vec<MultiPoly> = images.iter().map(|g| g.den.clone()).collect();
        let n = ctx.nvars();
        let deg_n: Vec<u32> = (0..n).map(|i| self.num.degree_in(i)).collect();
        let deg_d: Vec<u32> = (0..n).map(|i| self.den.degree_in(i)).collect();
        let hn = homogenized(&self.num, &nums, &dens, &deg_n, &target);
        let hd = homogenized(&self.den, &nums, &dens, &deg_d, &target);
        if hd.is_zero() {
            return Err(Error::Substitution(format!("denominator {} vanishes identically", self.den)));
        }
        // f(g) = hn / prod d_i^deg_n  *  prod d_i^deg_d / hd
        let mut top = hn;
        let mut bottom = hd;
        for i in 0..n {
            if dens[i].is_one() {
                continue;
            }
            match deg_d[i].cmp(&deg_n[i]) {
                std::cmp::Ordering::Greater => top = &top * &dens[i].pow(deg_d[i] - deg_n[i]),
                std::cmp::Ordering::Less => bottom = &bottom * &dens[i].pow(deg_n[i] - deg_d[i]),
                std::cmp::Ordering::Equal => {}
            }
        }
        Ok((top, bottom))
    }

    /// Re-expresses `self` in `target`, matching variables by name.
    pub fn embed(&self, target: &Context) -> Result<Self> {
        let missing = || Error::Context(format!("{self} uses variables not declared in {target:?}"));
        let num = self.num.embed(target).ok_or_else(missing)?;
        let den = self.den.embed(target).ok_or_else(missing)?;
        Ok(Self::normalized(num, den))
    }

    /// Value at `v = c`; errors if the denominator vanishes there.
    pub fn eval_var(&self, v: usize, c: &BigRational) -> Result<Self> {
        let den = self.den.eval_var(v, c);
        if den.is_zero() {
            return Err(Error::Substitution(format!(
                "denominator {} vanishes at {} = {}",
                self.den,
                self.ctx().var_name(v),
                c
            )));
        }
        Ok(Self::reduce(self.num.eval_var(v, c), den))
    }

    /// Exact equality of `a/b` and `c/d` by cross-multiplication.
    pub fn fractions_equal(a: &MultiPoly, b: &MultiPoly, c: &MultiPoly, d: &MultiPoly) -> bool {
        &(a * d) - &(b * c) == MultiPoly::zero(a.ctx())
    }

    /// Sum of `terms` over a shared denominator.
    pub fn sum(ctx: &Context, terms: &[RatFunc]) -> Self {
        let one = BigRational::one();
        let items: Vec<(BigRational, &RatFunc)> = terms.iter().map(|f| (one.clone(), f)).collect();
        Self::linear_combination(ctx, &items)
    }

    /// `sum coeffs[i] * terms[i]` over a shared denominator, reduced once.
    pub fn linear_combination(ctx: &Context, items: &[(BigRational, &RatFunc)]) -> Self {
        // den is the product of the pieces; each piece has at most the
        // degree of one input denominator.
        let mut den = MultiPoly::one(ctx);
        let mut pieces = Vec::new();
        for (c, f) in items {
            if c.is_zero() || f.is_zero() || f.den.is_one() || f.den == den {
                continue;
            }
            if den.is_one() {
                den = f.den.clone();
                pieces.push(den.clone());
            } else if den.div_exact(&f.den).is_none() {
                let g = poly_gcd(&den, &f.den);
                let piece = f.den.div_exact(&g).unwrap();
                den = &den * &piece;
                pieces.push(piece);
            }
        }
        let mut num = MultiPoly::zero(ctx);
        for (c, f) in items {
            if c.is_zero() || f.is_zero() {
                continue;
            }
            let cof = if f.den == den { MultiPoly::one(ctx) } else { den.div_exact(&f.den).unwrap() };
            num = &num + &(&f.num * &cof).scale(c);
        }
        if num.is_zero() {
            return Self::zero(ctx);
        }
        // Any common factor of num and den divides some piece, so cancelling
        // against the small pieces one at a time yields the reduced form
        // without a gcd against the full product.
        let mut out_den = MultiPoly::one(ctx);
        for mut piece in pieces {
            loop {
                let g = poly_gcd(&num, &piece);
                if g.is_constant() {
                    break;
                }
                num = num.div_exact(&g).expect("gcd divides numerator");
                piece = piece.div_exact(&g).expect("gcd divides piece");
            }
            out_den = &out_den * &piece;
        }
        Self::normalized(num, out_den)
    }
}

/// `prod d_i^deg_i * p(n_1/d_1, ...)`, a polynomial in the target context.
fn homogenized(
    p: &MultiPoly,
    nums: &[MultiPoly],
    dens: &[MultiPoly],
    degs: &[u32],
    target: &Context,
) -> MultiPoly {
    if dens.iter().all(|d| d.is_one()) {
        return p.compose(nums, target);
    }
    let n = nums.len();
    let mut npow: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::one(target)]; n];
    let mut dpow: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::one(target)]; n];
    let pw = |cache: &mut Vec<Vec<MultiPoly>>, base: &MultiPoly, i: usize, e: usize| {
        while cache[i].len() <= e {
            let next = &cache[i][cache[i].len() - 1] * base;
            cache[i].push(next);
        }
        cache[i][e].clone()
    };
    let mut acc = MultiPoly::zero(target);
    for (m, c) in p.terms() {
        let mut term = MultiPoly::constant(target, c.clone());
        for i in 0..n {
            let e = m.exponents()[i];
            if e > 0 {
                term = &term * &pw(&mut npow, &nums[i], i, e as usize);
            }
            let rest = degs[i] - e;
            if rest > 0 && !dens[i].is_one() {
                term = &term * &pw(&mut dpow, &dens[i], i, rest as usize);
            }
        }
        acc = &acc + &term;
    }
    acc
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.checked_add(rhs).expect("rational function addition")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.checked_sub(rhs).expect("rational function subtraction")
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.checked_mul(rhs).expect("rational function multiplication")
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::checked_div`] otherwise.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.checked_div(rhs).expect("rational function division")
    }
}
