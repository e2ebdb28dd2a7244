//! Rational `Gm`-actions given by the comorphism on generators.
//!
//! Images live in the context `(x1, ..., xn, t)`; `t` is the group
//! parameter and is printed first inside each monomial.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::context::Context;
use crate::derivation::{write_block, BirationalMap, Derivation};
use crate::error::{Error, Result};
use crate::factored::Factored;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;
use crate::series::{SeriesVar, TruncSeries};

/// Name of the group parameter.
pub const EXT_VAR: &str = "t";

/// `t^shift * (sum a_i t^i) / (sum b_i t^i)` with `a_0 != 0` and `b_0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentNormalForm {
    pub shift: i64,
    pub num_coeffs: Vec<RatFunc>,
    pub den_coeffs: Vec<RatFunc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SliceResult {
    /// A semi-invariant of weight one.
    Slice(RatFunc),
    /// The gcd of the observed nonzero weights when it is not one, with a
    /// semi-invariant of exactly that weight. The gcd is zero, with no
    /// witness, when no generator image has a semi-invariant of nonzero
    /// weight.
    LatticeGcd { gcd: u64, witness: Option<RatFunc> },
}

#[derive(Clone, PartialEq, Eq)]
pub struct GmAction {
    base: Context,
    ext: Context,
    images: Vec<RatFunc>,
}

impl fmt::Debug for GmAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn binomial_row(j: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=j {
        let next = &row[k - 1] * BigInt::from(j - k + 1) / BigInt::from(k);
        row.push(next);
    }
    row
}

/// A variable name not already used by `ctx`.
fn fresh_name(ctx: &Context, stem: &str) -> String {
    let mut name = stem.to_string();
    while ctx.index_of(&name).is_some() {
        name.push('_');
    }
    name
}

impl GmAction {
    /// `base` extended by the group parameter.
    pub fn extended_context(base: &Context) -> Result<Context> {
        if base.index_of(EXT_VAR).is_some() {
            return Err(Error::Context(format!("`{EXT_VAR}` is reserved for the group parameter")));
        }
        base.extend(&[EXT_VAR])
    }

    /// Builds an action and checks both the identity and the cocycle axiom.
    /// Images may be given in any context whose variables are among those of
    /// `base` and `t`.
    pub fn new(base: &Context, images: Vec<RatFunc>) -> Result<Self> {
        let a = Self::from_images_unchecked(base, images)?;
        if let Some(i) = a.identity_failure() {
            return Err(Error::InvalidAction(format!(
                "the image of {} is not {0} at t = 1",
                base.var_name(i)
            )));
        }
        if let Some(i) = a.cocycle_failure() {
            return Err(Error::InvalidAction(format!(
                "the image of {} violates the cocycle identity",
                base.var_name(i)
            )));
        }
        Ok(a)
    }

    /// Builds the images without checking the action axioms.
    pub fn from_images_unchecked(base: &Context, images: Vec<RatFunc>) -> Result<Self> {
        let ext = Self::extended_context(base)?;
        if images.len() != base.nvars() {
            return Err(Error::Context(format!(
                "an action needs {} images, got {}",
                base.nvars(),
                images.len()
            )));
        }
        let images = images.iter().map(|g| g.embed(&ext)).collect::<Result<Vec<_>>>()?;
        Ok(GmAction { base: base.clone(), ext, images })
    }

    /// `x_i -> t^{w_i} x_i`.
    pub fn diagonal(base: &Context, weights: &[i64]) -> Result<Self> {
        let ext = Self::extended_context(base)?;
        let t = RatFunc::var(&ext, base.nvars());
        let images = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Ok(&t.pow(w)? * &RatFunc::var(&ext, i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, images)
    }

    pub fn trivial(base: &Context) -> Result<Self> {
        Self::diagonal(base, &vec![0; base.nvars()])
    }

    pub fn base_ctx(&self) -> &Context {
        &self.base
    }

    pub fn ext_ctx(&self) -> &Context {
        &self.ext
    }

    pub fn images(&self) -> &[RatFunc] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &RatFunc {
        &self.images[i]
    }

    fn t_index(&self) -> usize {
        self.base.nvars()
    }

    fn t(&self) -> RatFunc {
        RatFunc::var(&self.ext, self.t_index())
    }

    fn at_one(&self, g: &RatFunc) -> Result<RatFunc> {
        g.eval_var(self.t_index(), &BigRational::one())?.embed(&self.base)
    }

    pub(crate) fn identity_failure(&self) -> Option<usize> {
        (0..self.base.nvars()).find(|&i| match self.at_one(&self.images[i]) {
            Ok(v) => v != RatFunc::var(&self.base, i),
            Err(_) => true,
        })
    }

    /// Each image is defined at `t = 1` and evaluates to its generator there.
    pub fn verify_identity(&self) -> bool {
        self.identity_failure().is_none()
    }

    pub(crate) fn cocycle_failure(&self) -> Option<usize> {
        let t1 = fresh_name(&self.ext, "t1");
        let t2 = fresh_name(&self.ext, "t2");
        let two = match self.base.extend(&[t1.as_str(), t2.as_str()]) {
            Ok(c) => c,
            Err(_) => return Some(0),
        };
        let n = self.base.nvars();
        let vars: Vec<RatFunc> = (0..n).map(|i| RatFunc::var(&two, i)).collect();
        let (s1, s2) = (RatFunc::var(&two, n), RatFunc::var(&two, n + 1));
        let with_t = |t: RatFunc| {
            let mut v = vars.clone();
            v.push(t);
            v
        };
        let at_product = with_t(&s1 * &s2);
        let at_t2 = with_t(s2.clone());
        let inner: Vec<RatFunc> = match self.images.iter().map(|g| g.substitute(&at_t2)).collect() {
            Ok(v) => v,
            Err(_) => return Some(0),
        };
        let mut outer_images = inner;
        outer_images.push(s1);
        (0..n).find(|&i| {
            let g = &self.images[i];
            let lhs = g.substitute_unreduced(&at_product);
            let rhs = g.substitute_unreduced(&outer_images);
            match (lhs, rhs) {
                (Ok((a, b)), Ok((c, d))) => !RatFunc::fractions_equal(&a, &b, &c, &d),
                _ => true,
            }
        })
    }

    /// `A(x)(t1 t2) = A(x)(t1)` with `x_j -> A(x_j)(t2)`, for every generator.
    pub fn verify_cocycle(&self) -> bool {
        self.cocycle_failure().is_none()
    }

    /// `f(A(x))`, an element of `K(t)`.
    pub fn pullback(&self, f: &RatFunc) -> Result<RatFunc> {
        self.base.check_same(f.ctx())?;
        f.substitute(&self.images).map_err(|e| match e {
            Error::Substitution(m) => Error::Domain(m),
            other => other,
        })
    }

    /// Expansion of `f(A(x))` in powers of `t - 1` up to `order`, found by
    /// substituting the expansions of the generator images into `f`.
    pub fn expand_at_one(&self, f: &RatFunc, order: usize) -> Result<TruncSeries> {
        self.base.check_same(f.ctx())?;
        let (p, q) = (f.num(), f.den());
        let one = TruncSeries::constant(RatFunc::one(&self.base), SeriesVar::TMinusOne, order);
        let mut powers: Vec<Vec<TruncSeries>> = Vec::with_capacity(self.images.len());
        for (i, g) in self.images.iter().enumerate() {
            let deg = p.degree_in(i).max(q.degree_in(i));
            let mut row = vec![one.clone()];
            if deg > 0 {
                let x = expand_in_t_minus_one(&self.base, self.t_index(), g, order)?;
                for _ in 1..=deg {
                    let next = row.last().unwrap().checked_mul(&x)?;
                    row.push(next);
                }
            }
            powers.push(row);
        }
        let num = eval_at_series(p, &powers, order)?;
        let den = eval_at_series(q, &powers, order)?;
        num.checked_div(&den).map_err(|_| Error::Valuation(format!("{f} has a pole at t = 1")))
    }

    /// The infinitesimal generator `f -> d/dt f(A(x)) at t = 1`, given on
    /// generators.
    pub fn extract_derivation(&self) -> Result<Derivation> {
        let images = self
            .images
            .iter()
            .map(|g| {
                self.at_one(&g.partial(self.t_index()))
                    .map_err(|_| Error::Valuation(format!("{g} has a pole at t = 1")))
            })
            .collect::<Result<Vec<_>>>()?;
        Derivation::new(&self.base, images)
    }

    /// `k` with `f(A(x)) = t^k f`, if there is one. The `t`-adic orders of
    /// the unreduced pullback fix `k`; the identity is then checked by
    /// cross-multiplication.
    pub fn weight_of(&self, f: &RatFunc) -> Result<Option<i64>> {
        if f.is_zero() {
            return Err(Error::Domain("weight of the zero function".into()));
        }
        self.base.check_same(f.ctx())?;
        let (top, bottom) = f.substitute_unreduced(&self.images).map_err(|e| match e {
            Error::Substitution(m) => Error::Domain(m),
            other => other,
        })?;
        let t = self.t_index();
        let t_order =
            |p: &MultiPoly| p.terms().iter().map(|(m, _)| m.exponents()[t] as i64).min().expect("nonzero");
        let k = t_order(&top) - t_order(&bottom);
        let tvar = MultiPoly::var(&self.ext, t);
        let p = f.num().embed(&self.ext).expect("base embeds in the extension");
        let q = f.den().embed(&self.ext).expect("base embeds in the extension");
        let (lhs, rhs) = if k >= 0 {
            (&top * &q, &(&bottom * &p) * &tvar.pow(k as u32))
        } else {
            (&(&top * &q) * &tvar.pow((-k) as u32), &bottom * &p)
        };
        Ok((lhs == rhs).then_some(k))
    }

    pub fn laurent_normal_form(&self, f: &RatFunc) -> Result<LaurentNormalForm> {
        if f.is_zero() {
            return Err(Error::Domain("normal form of the zero function".into()));
        }
        let g = self.pullback(f)?;
        let t = self.t_index();
        let pc = g.num().to_univariate(t);
        let qc = g.den().to_univariate(t);
        let low = |c: &[MultiPoly]| c.iter().position(|x| !x.is_zero()).expect("nonzero");
        let (lp, lq) = (low(&pc), low(&qc));
        let b0 = RatFunc::from_poly(qc[lq].clone());
        let over_b0 = |c: &MultiPoly| -> Result<RatFunc> {
            RatFunc::from_poly(c.clone()).checked_div(&b0)?.embed(&self.base)
        };
        let num_coeffs = pc[lp..].iter().map(over_b0).collect::<Result<Vec<_>>>()?;
        let den_coeffs = qc[lq..].iter().map(over_b0).collect::<Result<Vec<_>>>()?;
        Ok(LaurentNormalForm { shift: lp as i64 - lq as i64, num_coeffs, den_coeffs })
    }

    /// The nonzero coefficients of the normal form of `f(A(x))` with their
    /// weights: `a_j` has weight `shift + j` and `b_j` has weight `j`. Every
    /// weight is checked with [`weight_of`](Self::weight_of).
    pub fn extract_semiinvariants(&self, f: &RatFunc) -> Result<Vec<(RatFunc, i64)>> {
        let lnf = self.laurent_normal_form(f)?;
        let mut out = Vec::new();
        for (j, a) in lnf.num_coeffs.iter().enumerate() {
            if !a.is_zero() {
                out.push((a.clone(), lnf.shift + j as i64));
            }
        }
        for (j, b) in lnf.den_coeffs.iter().enumerate().skip(1) {
            if !b.is_zero() {
                out.push((b.clone(), j as i64));
            }
        }
        for (s, w) in &out {
            let got = self.weight_of(s)?;
            if got != Some(*w) {
                return Err(Error::Inconsistency(format!(
                    "coefficient {s} should have weight {w}, found {got:?}"
                )));
            }
        }
        Ok(out)
    }

    /// Combines semi-invariants of the generator images into one of weight
    /// equal to the gcd of their weights.
    pub fn find_slice(&self) -> Result<SliceResult> {
        let mut acc: Option<(i64, RatFunc)> = None;
        for i in 0..self.base.nvars() {
            let x = RatFunc::var(&self.base, i);
            for (s, w) in self.extract_semiinvariants(&x)? {
                if w == 0 {
                    continue;
                }
                acc = Some(match acc {
                    None if w < 0 => (-w, s.inv()?),
                    None => (w, s),
                    Some((g, e)) => {
                        if w % g == 0 {
                            (g, e)
                        } else {
                            let ext = g.extended_gcd(&w);
                            let prod = &e.pow(ext.x)? * &s.pow(ext.y)?;
                            (ext.gcd, prod)
                        }
                    }
                });
            }
        }
        let Some((g, s)) = acc else {
            return Ok(SliceResult::LatticeGcd { gcd: 0, witness: None });
        };
        let got = self.weight_of(&s)?;
        if got != Some(g) {
            return Err(Error::Inconsistency(format!(
                "combined semi-invariant {s} should have weight {g}, found {got:?}"
            )));
        }
        Ok(if g == 1 {
            SliceResult::Slice(s)
        } else {
            SliceResult::LatticeGcd { gcd: g as u64, witness: Some(s) }
        })
    }

    /// Whether `s` has weight one, decided both through the action and
    /// through its infinitesimal generator.
    pub fn is_slice(&self, s: &RatFunc) -> Result<bool> {
        if s.is_zero() {
            return Err(Error::Domain("the zero function is not a slice".into()));
        }
        let by_action = self.pullback(s)? == &self.t() * &s.embed(&self.ext)?;
        let by_derivation = self.extract_derivation()?.apply(s) == *s;
        if by_action != by_derivation {
            return Err(Error::Inconsistency(format!(
                "slice test for {s} disagrees between the action ({by_action}) and its derivation ({by_derivation})"
            )));
        }
        Ok(by_action)
    }

    /// `m o A o m^-1`.
    pub fn conjugate(&self, m: &BirationalMap) -> Result<GmAction> {
        self.base.check_same(m.ctx())?;
        let mut forward =
            m.forward_images().iter().map(|g| g.embed(&self.ext)).collect::<Result<Vec<_>>>()?;
        forward.push(self.t());
        let images = m
            .inverse_images()
            .iter()
            .map(|g| self.pullback(g)?.substitute(&forward))
            .collect::<Result<Vec<_>>>()?;
        GmAction::new(&self.base, images)
    }
}

/// Coefficients of `p` as a polynomial in `u = t - 1`, up to `u^order`.
fn shift_to_one(p: &MultiPoly, base: &Context, t: usize, order: usize) -> Vec<MultiPoly> {
    let coeffs = p.to_univariate(t);
    let mut out = vec![MultiPoly::zero(p.ctx()); order + 1];
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (k, b) in binomial_row(j).iter().enumerate().take(order + 1) {
            out[k] = &out[k] + &c.scale(&BigRational::from_integer(b.clone()));
        }
    }
    out.into_iter().map(|c| c.embed(base).expect("coefficients are free of t")).collect()
}

/// `p(X_1, ..., X_n)` given `powers[i][a] = X_i^a`. Terms are grouped by
/// their exponents outside the first variable, so the inner sums have
/// scalar coefficients.
fn eval_at_series(p: &MultiPoly, powers: &[Vec<TruncSeries>], order: usize) -> Result<TruncSeries> {
    let ctx = p.ctx();
    if ctx.nvars() == 0 {
        let c = RatFunc::from_poly(p.clone());
        return Ok(TruncSeries::constant(c, SeriesVar::TMinusOne, order));
    }
    let mut groups: BTreeMap<Vec<u32>, Vec<(usize, BigRational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exponents();
        groups.entry(e[1..].to_vec()).or_default().push((e[0] as usize, c.clone()));
    }
    let mut parts: Vec<Vec<RatFunc>> = vec![Vec::new(); order + 1];
    for (rest, inner) in groups {
        let coeffs = (0..=order)
            .map(|k| {
                let items: Vec<(BigRational, &RatFunc)> =
                    inner.iter().map(|(a, c)| (c.clone(), powers[0][*a].coeff(k))).collect();
                RatFunc::linear_combination(ctx, &items)
            })
            .collect();
        let mut s = TruncSeries::new(SeriesVar::TMinusOne, coeffs)?;
        for (i, &e) in rest.iter().enumerate() {
            if e > 0 {
                s = s.checked_mul(&powers[i + 1][e as usize])?;
            }
        }
        for (k, part) in parts.iter_mut().enumerate() {
            part.push(s.coeff(k).clone());
        }
    }
    let coeffs = parts.iter().map(|v| RatFunc::sum(ctx, v)).collect();
    TruncSeries::new(SeriesVar::TMinusOne, coeffs)
}

/// `p / q` as a series, where `p` and `q` have polynomial coefficients and
/// `q[0] = prod c^e` over `pieces`.
fn series_quotient(p: &[MultiPoly], q: &[MultiPoly], pieces: &[(MultiPoly, u32)]) -> Result<TruncSeries> {
    let order = p.len() - 1;
    let q0 = &q[0];
    // r_k = R_k / q0^(k+1) with R_k = p_k q0^k - sum_{i=1..k} q_i R_{k-i} q0^(i-1)
    let mut q0_pows = vec![MultiPoly::one(q0.ctx())];
    for k in 1..=order {
        let next = &q0_pows[k - 1] * q0;
        q0_pows.push(next);
    }
    let mut big: Vec<MultiPoly> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = &p[k] * &q0_pows[k];
        for i in 1..=k {
            if q[i].is_zero() || big[k - i].is_zero() {
                continue;
            }
            acc = &acc - &(&(&q[i] * &big[k - i]) * &q0_pows[i - 1]);
        }
        big.push(acc);
    }
    let coeffs = big
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            let scaled = pieces.iter().map(|(c, e)| (c.clone(), e * (k as u32 + 1))).collect();
            Factored::cancel(r, scaled).to_ratfunc()
        })
        .collect();
    TruncSeries::new(SeriesVar::TMinusOne, coeffs)
}

/// Expansion of `g`, an element of `K(t)`, in powers of `t - 1`.
pub(crate) fn expand_in_t_minus_one(
    base: &Context,
    t: usize,
    g: &RatFunc,
    order: usize,
) -> Result<TruncSeries> {
    let p = shift_to_one(g.num(), base, t, order);
    let q = shift_to_one(g.den(), base, t, order);
    if q[0].is_zero() {
        return Err(Error::Valuation(format!("{g} has a pole at t = 1")));
    }
    let pieces = [(q[0].clone(), 1)];
    series_quotient(&p, &q, &pieces)
}

impl fmt::Display for GmAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, "action", &self.base, &self.images)
    }
}
