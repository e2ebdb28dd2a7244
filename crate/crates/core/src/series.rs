//! Truncated power series with coefficients in `K`.
//!
//! A series of order `N` stores the coefficients of `u^0, ..., u^N`, where
//! `u` is either `z` or `t - 1`. [`TruncSeries::sigma`] substitutes
//! `z -> log(1 + u)` and [`TruncSeries::sigma_inv`] substitutes
//! `u -> exp(z) - 1`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::factored::CoprimeBasis;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesVar {
    /// The formal variable `z`.
    Z,
    /// The local parameter `t - 1` at the identity of the group.
    TMinusOne,
}

impl SeriesVar {
    fn symbol(self) -> &'static str {
        match self {
            SeriesVar::Z => "z",
            SeriesVar::TMinusOne => "(t-1)",
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    var: SeriesVar,
    ctx: Context,
    coeffs: Vec<RatFunc>,
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl TruncSeries {
    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    pub fn new(var: SeriesVar, coeffs: Vec<RatFunc>) -> Result<Self> {
        let ctx = match coeffs.first() {
            Some(c) => c.ctx().clone(),
            None => return Err(Error::EmptyOrder),
        };
        for c in &coeffs {
            ctx.check_same(c.ctx())?;
        }
        Ok(TruncSeries { var, ctx, coeffs })
    }

    pub fn zero(ctx: &Context, var: SeriesVar, order: usize) -> Self {
        TruncSeries { var, ctx: ctx.clone(), coeffs: vec![RatFunc::zero(ctx); order + 1] }
    }

    pub fn constant(f: RatFunc, var: SeriesVar, order: usize) -> Self {
        let mut s = Self::zero(f.ctx(), var, order);
        s.coeffs[0] = f;
        s
    }

    /// The series `u` itself.
    pub fn variable(ctx: &Context, var: SeriesVar, order: usize) -> Self {
        let mut s = Self::zero(ctx, var, order);
        if order >= 1 {
            s.coeffs[1] = RatFunc::one(ctx);
        }
        s
    }

    /// `sum_{i>=1} (-1)^(i+1) u^i / i`.
    pub fn log_one_plus(ctx: &Context, var: SeriesVar, order: usize) -> Self {
        let mut s = Self::zero(ctx, var, order);
        for i in 1..=order {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            s.coeffs[i] = RatFunc::constant(ctx, rat(sign, i as i64));
        }
        s
    }

    /// `sum_{i>=1} u^i / i!`.
    pub fn exp_minus_one(ctx: &Context, var: SeriesVar, order: usize) -> Self {
        let mut s = Self::zero(ctx, var, order);
        let mut fact = BigInt::one();
        for i in 1..=order {
            fact *= BigInt::from(i);
            s.coeffs[i] = RatFunc::constant(ctx, BigRational::new(BigInt::one(), fact.clone()));
        }
        s
    }

    pub fn var(&self) -> SeriesVar {
        self.var
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &RatFunc {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFunc::is_zero)
    }

    /// The constant coefficient: evaluation at `z = 0`, or at `t = 1`.
    pub fn ev0(&self) -> RatFunc {
        self.coeffs[0].clone()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs: self.coeffs[..keep].to_vec() }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::Context(format!(
                "series in {} and {} cannot be combined",
                self.var.symbol(),
                other.var.symbol()
            )));
        }
        self.ctx.check_same(&other.ctx)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.order().min(other.order());
        let (a, b) = (&self.coeffs[..=n], &other.coeffs[..=n]);
        let mut basis = CoprimeBasis::new(a.iter().chain(b).map(RatFunc::den));
        let exps = |c: &[RatFunc]| c.iter().map(|f| basis.exponents(f.den())).collect::<Option<Vec<_>>>();
        let (Some(ea), Some(eb)) = (exps(a), exps(b)) else {
            unreachable!("every denominator factors over the basis built from it")
        };
        let zero = MultiPoly::zero(&self.ctx);
        let coeffs = (0..=n)
            .map(|k| {
                let terms: Vec<(MultiPoly, Vec<u32>)> = (0..=k)
                    .filter(|&i| !a[i].is_zero() && !b[k - i].is_zero())
                    .map(|i| {
                        let e = ea[i].iter().zip(&eb[k - i]).map(|(x, y)| x + y).collect();
                        (a[i].num() * b[k - i].num(), e)
                    })
                    .collect();
                basis.sum(&terms, zero.clone())
            })
            .collect();
        Ok(TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs })
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| -a).collect();
        TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn invert(&self) -> Result<Self> {
        Self::constant(RatFunc::one(&self.ctx), self.var, self.order()).checked_div(self)
    }

    /// `self / other`; `other` needs a nonzero constant term.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let b0 = &other.coeffs[0];
        if b0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let inv0 = b0.inv()?;
        let n = self.order().min(other.order());
        let mut out: Vec<RatFunc> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut terms = vec![self.coeffs[k].clone()];
            terms.extend(
                (1..=k)
                    .filter(|&i| !other.coeffs[i].is_zero() && !out[k - i].is_zero())
                    .map(|i| -&(&other.coeffs[i] * &out[k - i])),
            );
            out.push(&RatFunc::sum(&self.ctx, &terms) * &inv0);
        }
        Ok(TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs: out })
    }

    /// `self(inner)`. The result takes the variable of `inner` and the
    /// smaller of the two orders.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.ctx.check_same(&inner.ctx)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Composition);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        // powers[k] = inner^k; only coefficients k..=n can be nonzero
        let mut powers = vec![TruncSeries::constant(RatFunc::one(&self.ctx), inner.var, n)];
        for _ in 1..=n {
            let next = powers.last().unwrap().checked_mul(&inner)?;
            powers.push(next);
        }
        let scalar = inner.coeffs.iter().all(RatFunc::is_constant);
        let mut coeffs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            if scalar {
                let items: Vec<(BigRational, &RatFunc)> = (0..=j)
                    .filter_map(|k| {
                        let c = powers[k].coeffs[j].constant_value()?;
                        (!c.is_zero()).then_some((c, &self.coeffs[k]))
                    })
                    .collect();
                coeffs.push(RatFunc::linear_combination(&self.ctx, &items));
            } else {
                let products: Vec<RatFunc> = (0..=j)
                    .map(|k| (&self.coeffs[k], &powers[k].coeffs[j]))
                    .filter(|(a, p)| !a.is_zero() && !p.is_zero())
                    .map(|(a, p)| a * p)
                    .collect();
                coeffs.push(RatFunc::sum(&self.ctx, &products));
            }
        }
        Ok(TruncSeries { var: inner.var, ctx: self.ctx.clone(), coeffs })
    }

    /// From `K[[z]]` to `K[[t-1]]` by `z -> log(1 + (t-1))`.
    pub fn sigma(&self) -> Result<Self> {
        if self.var != SeriesVar::Z {
            return Err(Error::Context("sigma expects a series in z".into()));
        }
        let log = Self::log_one_plus(&self.ctx, SeriesVar::TMinusOne, self.order());
        self.compose(&log)
    }

    /// From `K[[t-1]]` to `K[[z]]` by `t - 1 -> exp(z) - 1`.
    pub fn sigma_inv(&self) -> Result<Self> {
        if self.var != SeriesVar::TMinusOne {
            return Err(Error::Context("sigma_inv expects a series in t-1".into()));
        }
        let e = Self::exp_minus_one(&self.ctx, SeriesVar::Z, self.order());
        self.compose(&e)
    }

    /// Formal derivative; the order drops by one.
    pub fn deriv(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::EmptyOrder);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| a.scale(&BigRational::from_integer(BigInt::from(i + 1))))
            .collect();
        Ok(TruncSeries { var: self.var, ctx: self.ctx.clone(), coeffs })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = self.var.symbol();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*{u}")?,
                _ => write!(f, "({c})*{u}^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({u}^{})", self.order() + 1)
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

    fn ser(var: SeriesVar, cs: &[&str]) -> TruncSeries {
        TruncSeries::new(var, cs.iter().map(|c| r(c)).collect()).unwrap()
    }

    use SeriesVar::{TMinusOne as T, Z};

    #[test]
    fn products() {
        let a = ser(Z, &["1", "1", "0", "0"]);
        let b = ser(Z, &["1", "-1", "0", "0"]);
        assert_eq!(a.checked_mul(&b).unwrap(), ser(Z, &["1", "0", "-1", "0"]));
        let zero = TruncSeries::zero(&ctx(), Z, 3);
        assert_eq!(a.checked_add(&zero).unwrap(), a);
        let e = ser(Z, &["1", "1", "1/2", "1/6", "1/24"]);
        let em = ser(Z, &["1", "-1", "1/2", "-1/6", "1/24"]);
        assert_eq!(e.checked_mul(&em).unwrap(), ser(Z, &["1", "0", "0", "0", "0"]));
    }

    #[test]
    fn mixed_orders_truncate_and_tags_must_match() {
        let a = ser(Z, &["1", "x", "y"]);
        let b = ser(Z, &["1", "1"]);
        assert_eq!(a.checked_mul(&b).unwrap().order(), 1);
        assert!(matches!(a.checked_add(&ser(T, &["1"])), Err(Error::Context(_))));
    }

    #[test]
    fn inverses() {
        assert_eq!(ser(T, &["1", "-1", "0", "0"]).invert().unwrap(), ser(T, &["1", "1", "1", "1"]));
        assert_eq!(ser(T, &["1"]).invert().unwrap(), ser(T, &["1"]));
        assert_eq!(ser(T, &["2", "1", "0"]).invert().unwrap(), ser(T, &["1/2", "-1/4", "1/8"]));
        assert_eq!(ser(T, &["0", "1"]).invert(), Err(Error::NotAUnit));
        let a = ser(T, &["x + 1", "y/x", "1/(x - y)", "x*y"]);
        let one = a.checked_mul(&a.invert().unwrap()).unwrap();
        assert_eq!(one, TruncSeries::constant(r("1"), T, 3));
    }

    #[test]
    fn compositions() {
        let g = ser(T, &["0", "x", "y", "1/x"]);
        assert_eq!(TruncSeries::variable(&ctx(), Z, 3).compose(&g).unwrap(), g);
        let log = TruncSeries::log_one_plus(&ctx(), T, 5);
        let exp1 = TruncSeries::exp_minus_one(&ctx(), T, 5);
        assert_eq!(log.compose(&exp1).unwrap(), TruncSeries::variable(&ctx(), T, 5));
        let sq = ser(T, &["0", "0", "1", "0"]);
        let inner = ser(T, &["0", "1", "1", "0"]);
        assert_eq!(sq.compose(&inner).unwrap(), ser(T, &["0", "0", "1", "2"]));
        assert_eq!(sq.compose(&ser(T, &["1", "1"])), Err(Error::Composition));
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(TruncSeries::variable(&ctx(), Z, 3).sigma().unwrap(), ser(T, &["0", "1", "-1/2", "1/3"]));
        assert_eq!(ser(Z, &["x", "0", "0"]).sigma().unwrap(), ser(T, &["x", "0", "0"]));
        assert_eq!(ser(Z, &["1", "1", "1/2"]).sigma().unwrap(), ser(T, &["1", "1", "0"]));
        assert_eq!(
            TruncSeries::variable(&ctx(), T, 3).sigma_inv().unwrap(),
            ser(Z, &["0", "1", "1/2", "1/6"])
        );
        assert_eq!(ser(T, &["1", "1", "0", "0"]).sigma_inv().unwrap(), ser(Z, &["1", "1", "1/2", "1/6"]));
        assert!(ser(T, &["1"]).sigma().is_err());
    }

    #[test]
    fn sigma_round_trip() {
        let a = ser(Z, &["x", "y/(x+1)", "-3", "x^2*y", "1/y", "7/5*x"]);
        assert_eq!(a.sigma().unwrap().sigma_inv().unwrap(), a);
        let b = ser(T, &["y", "0", "x - y", "1/(x*y)", "2", "-1"]);
        assert_eq!(b.sigma_inv().unwrap().sigma().unwrap(), b);
    }

    #[test]
    fn derivatives() {
        let e = ser(Z, &["1", "1", "1/2", "1/6", "1/24"]);
        assert_eq!(e.deriv().unwrap(), e.truncate(3));
        assert!(ser(Z, &["x", "0"]).deriv().unwrap().is_zero());
        assert_eq!(ser(Z, &["0", "0", "3*x/y"]).deriv().unwrap(), ser(Z, &["0", "6*x/y"]));
        assert_eq!(ser(Z, &["x"]).deriv(), Err(Error::EmptyOrder));
    }

    #[test]
    fn ev0_examples() {
        assert_eq!(ser(T, &["x", "y"]).ev0(), r("x"));
        assert!(TruncSeries::variable(&ctx(), Z, 4).sigma().unwrap().ev0().is_zero());
    }

    #[test]
    fn bivariate_exponential_identity() {
        // (E(w) + 1)(E(z) + 1) - 1 = E(w + z), with w carried in the coefficients.
        let wctx = Context::new(&["w"]).unwrap();
        let n = 8usize;
        let ew = TruncSeries::exp_minus_one(&wctx, Z, n);
        let ew_poly = ew.coeffs.iter().enumerate().fold(RatFunc::one(&wctx), |acc, (i, c)| {
            let wi = RatFunc::var(&wctx, 0).pow(i as i64).unwrap();
            &acc + &(c * &wi)
        });
        let ez = TruncSeries::exp_minus_one(&wctx, Z, n);
        let one = TruncSeries::constant(RatFunc::one(&wctx), Z, n);
        let lhs = TruncSeries::constant(ew_poly, Z, n)
            .checked_mul(&ez.checked_add(&one).unwrap())
            .unwrap()
            .checked_sub(&one)
            .unwrap();
        let mut fact = vec![BigInt::one()];
        for i in 1..=2 * n {
            fact.push(&fact[i - 1] * BigInt::from(i));
        }
        for j in 0..=n {
            // keep the part of total degree <= n
            let (num, _) = lhs.coeff(j).clone().into_parts();
            let kept: Vec<_> = num
                .terms()
                .iter()
                .filter(|(m, _)| m.degree() as usize + j <= n)
                .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
                .collect();
            let got = crate::poly::MultiPoly::from_terms(&wctx, kept);
            let mut want = crate::poly::MultiPoly::zero(&wctx);
            for m in 0..=(n - j) {
                if m + j == 0 {
                    continue;
                }
                let c = BigRational::new(BigInt::one(), &fact[m] * &fact[j]);
                let term =
                    crate::poly::MultiPoly::monomial(&wctx, crate::poly::Monomial::new(vec![m as u32]), c);
                want = &want + &term;
            }
            assert_eq!(got, want, "coefficient of z^{j}");
        }
    }

    #[test]
    fn display() {
        assert_eq!(ser(Z, &["x", "2*x", "0"]).to_string(), "x + (2*x)*z + O(z^3)");
        assert_eq!(ser(T, &["0", "1"]).to_string(), "(1)*(t-1) + O((t-1)^2)");
    }
}
