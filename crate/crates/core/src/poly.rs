//! Sparse multivariate polynomials over `Q`.
//!
//! Terms are kept in strictly decreasing lexicographic order of their
//! exponent vectors, with no zero coefficients, so structural equality is
//! mathematical equality.

use std::cmp::Ordering;
use std::collections::btree_map::{BTreeMap, Entry};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::context::Context;
use crate::error::Result;

/// Exponent vector, one entry per context variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    pub(crate) fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    ctx: Context,
    terms: Vec<(Monomial, BigRational)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

impl std::fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

fn merge_sorted(mut terms: Vec<(Monomial, BigRational)>) -> Vec<(Monomial, BigRational)> {
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let mut out: Vec<(Monomial, BigRational)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl MultiPoly {
    pub fn zero(ctx: &Context) -> Self {
        MultiPoly { ctx: ctx.clone(), terms: Vec::new() }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::constant(ctx, BigRational::one())
    }

    pub fn constant(ctx: &Context, c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(ctx);
        }
        MultiPoly { ctx: ctx.clone(), terms: vec![(Monomial::one(ctx.nvars()), c)] }
    }

    pub fn from_int(ctx: &Context, c: i64) -> Self {
        Self::constant(ctx, BigRational::from_integer(BigInt::from(c)))
    }

    /// The variable with index `i`.
    pub fn var(ctx: &Context, i: usize) -> Self {
        let mut e = vec![0; ctx.nvars()];
        e[i] = 1;
        MultiPoly { ctx: ctx.clone(), terms: vec![(Monomial(e), BigRational::one())] }
    }

    pub fn monomial(ctx: &Context, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.0.len(), ctx.nvars(), "monomial length does not match context");
        if c.is_zero() {
            return Self::zero(ctx);
        }
        MultiPoly { ctx: ctx.clone(), terms: vec![(m, c)] }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I>(ctx: &Context, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(e, c)| {
                assert_eq!(e.len(), ctx.nvars(), "monomial length does not match context");
                (Monomial(e), c)
            })
            .collect();
        MultiPoly { ctx: ctx.clone(), terms: merge_sorted(terms) }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    /// Terms in decreasing lexicographic order.
    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Coefficient of the lexicographically largest monomial (zero for the zero polynomial).
    pub fn leading_coeff(&self) -> BigRational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.0[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.0[v] > 0)
    }

    /// Monomial whose exponents are the minimum over all terms.
    pub(crate) fn min_monomial(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::one(self.ctx.nvars()),
            Some((m, _)) => it.fold(m.clone(), |acc, (m, _)| acc.gcd(m)),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        if c.is_one() {
            return self.clone();
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub(crate) fn mul_monomial(&self, m: &Monomial) -> Self {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(a, c)| (a.mul(m), c.clone())).collect(),
        }
    }

    pub(crate) fn div_monomial(&self, m: &Monomial) -> Self {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.div(m).expect("monomial does not divide"), c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        Ok(self.add_impl(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        Ok(self.add_impl(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        Ok(self.mul_impl(other))
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        MultiPoly { ctx: self.ctx.clone(), terms: out }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        if other.terms.len() == 1 && other.terms[0].0.is_one() {
            return self.scale(&other.terms[0].1);
        }
        if self.terms.len() == 1 && self.terms[0].0.is_one() {
            return other.scale(&self.terms[0].1);
        }
        // integer products, one rational normalization per output term
        let (la, ia) = self.integer_coeffs();
        let (lb, ib) = other.integer_coeffs();
        let mut raw: Vec<(Monomial, BigInt)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for ((ma, _), ca) in self.terms.iter().zip(&ia) {
            for ((mb, _), cb) in other.terms.iter().zip(&ib) {
                raw.push((ma.mul(mb), ca * cb));
            }
        }
        raw.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Monomial, BigInt)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match merged.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => merged.push((m, c)),
            }
        }
        let den = la * lb;
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, BigRational::new(c, den.clone())))
            .collect();
        MultiPoly { ctx: self.ctx.clone(), terms }
    }

    /// `(l, n_i)` with `l` the lcm of the coefficient denominators and
    /// `n_i = l * c_i`.
    fn integer_coeffs(&self) -> (BigInt, Vec<BigInt>) {
        let l = self.terms.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let ints = self.terms.iter().map(|(_, c)| c.numer() * (&l / c.denom())).collect();
        (l, ints)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(self.ctx == d.ctx, "mismatched contexts in division");
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = (&d.terms[0].0, &d.terms[0].1);
        let lc_inv = lc.recip();
        if d.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(lm)?, c * &lc_inv));
            }
            return Some(MultiPoly { ctx: self.ctx.clone(), terms });
        }
        let mut rem: BTreeMap<Monomial, BigRational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.pop_last() {
            let qm = rm.div(lm)?;
            let qc = rc * &lc_inv;
            for (dm, dc) in &d.terms[1..] {
                match rem.entry(dm.mul(&qm)) {
                    Entry::Occupied(mut e) => {
                        *e.get_mut() -= dc * &qc;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    Entry::Vacant(e) => {
                        e.insert(-(dc * &qc));
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(MultiPoly { ctx: self.ctx.clone(), terms: quot })
    }

    pub fn partial(&self, v: usize) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e > 0 {
                let mut m2 = m.clone();
                m2.0[v] -= 1;
                terms.push((m2, c * BigRational::from_integer(BigInt::from(e))));
            }
        }
        // removing one from the same exponent keeps the order strictly decreasing
        MultiPoly { ctx: self.ctx.clone(), terms }
    }

    /// Coefficients in `Q[other vars]` of the powers of variable `v`; index `k`
    /// holds the coefficient of `v^k`.
    pub fn to_univariate(&self, v: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigRational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let e = std::mem::replace(&mut m2.0[v], 0) as usize;
            buckets[e].push((m2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|terms| {
                // order within a bucket is preserved: removing v keeps lex order
                // among terms sharing the same v-exponent
                MultiPoly { ctx: self.ctx.clone(), terms }
            })
            .collect()
    }

    pub fn from_univariate(ctx: &Context, v: usize, coeffs: &[MultiPoly]) -> Self {
        let mut raw = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                let mut m2 = m.clone();
                m2.0[v] += k as u32;
                raw.push((m2, a.clone()));
            }
        }
        MultiPoly { ctx: ctx.clone(), terms: merge_sorted(raw) }
    }

    /// Evaluates the polynomial at polynomial images of its variables, producing
    /// a polynomial in `target`.
    pub fn compose(&self, images: &[MultiPoly], target: &Context) -> Self {
        assert_eq!(images.len(), self.ctx.nvars());
        let mut cache: Vec<Vec<MultiPoly>> =
            images.iter().map(|g| vec![MultiPoly::one(target), g.clone()]).collect();
        let mut acc = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while cache[i].len() <= e {
                    let next = cache[i].last().unwrap().mul_impl(&images[i]);
                    cache[i].push(next);
                }
                term = term.mul_impl(&cache[i][e]);
            }
            acc = acc.add_impl(&term, false);
        }
        acc
    }

    /// Value at `v = c`, still in the same context.
    pub fn eval_var(&self, v: usize, c: &BigRational) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len());
        let mut powers = vec![BigRational::one()];
        for (m, a) in &self.terms {
            let e = m.0[v] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * c;
                powers.push(next);
            }
            let mut m2 = m.clone();
            m2.0[v] = 0;
            raw.push((m2, a * &powers[e]));
        }
        MultiPoly { ctx: self.ctx.clone(), terms: merge_sorted(raw) }
    }

    /// Value at a point given by one rational per variable.
    pub fn eval_point(&self, point: &[BigRational]) -> BigRational {
        let mut powers: Vec<Vec<BigRational>> =
            point.iter().map(|c| vec![BigRational::one(), c.clone()]).collect();
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &point[v];
                    cache.push(next);
                }
                term *= &cache[e as usize];
            }
            acc += term;
        }
        acc
    }

    /// Re-expresses the polynomial in `target`, matching variables by name.
    /// Returns `None` if a variable in use is missing from `target`.
    pub fn embed(&self, target: &Context) -> Option<Self> {
        if self.ctx == *target {
            return Some(MultiPoly { ctx: target.clone(), terms: self.terms.clone() });
        }
        let n = self.ctx.nvars();
        let mut map = Vec::with_capacity(n);
        for i in 0..n {
            map.push(target.index_of(self.ctx.var_name(i)));
        }
        let mut raw = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]?] = k;
                }
            }
            raw.push((Monomial(e), c.clone()));
        }
        Some(MultiPoly { ctx: target.clone(), terms: merge_sorted(raw) })
    }

    /// Splits `self = factor * prim` where `prim` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub(crate) fn integer_primitive(&self) -> (BigRational, MultiPoly) {
        if self.is_zero() {
            return (BigRational::one(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let mut factor = BigRational::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            factor = -factor;
        }
        let inv = factor.recip();
        (factor, self.scale(&inv))
    }

    /// Scales to leading coefficient one.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.terms[0].1.clone();
        self.scale(&lc.recip())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}
