//! Fractions with a factored denominator.

use num_traits::One;

use crate::gcd::poly_gcd;
use crate::poly::MultiPoly;
use crate::ratfunc::RatFunc;

/// A reduced fraction whose denominator is kept as a product of monic
/// factors. Every common factor of the numerator with the product divides
/// one of the factors, so cancellation only needs gcds against them.
pub(crate) struct Factored {
    pub(crate) num: MultiPoly,
    pub(crate) den: Vec<(MultiPoly, u32)>,
}

impl Factored {
    pub(crate) fn from_ratfunc(f: &RatFunc) -> Self {
        let den = if f.den().is_one() { Vec::new() } else { vec![(f.den().clone(), 1)] };
        Factored { num: f.num().clone(), den }
    }

    pub(crate) fn to_ratfunc(&self) -> RatFunc {
        let one = MultiPoly::one(self.num.ctx());
        let den = self.den.iter().fold(one, |acc, (c, e)| &acc * &c.pow(*e));
        RatFunc::from_reduced(self.num.clone(), den)
    }

    /// Reduces `num / prod c^e`.
    pub(crate) fn cancel(mut num: MultiPoly, pieces: Vec<(MultiPoly, u32)>) -> Self {
        if num.is_zero() {
            return Factored { num, den: Vec::new() };
        }
        let mut work = Vec::with_capacity(pieces.len());
        for (c, e) in pieces {
            let lc = c.leading_coeff();
            if !lc.is_one() {
                num = num.scale(&lc.recip().pow(e as i32));
            }
            if !c.is_constant() {
                work.push((c.monic(), e));
            }
        }
        let mut kept: Vec<(MultiPoly, u32)> = Vec::new();
        while let Some((c, mut e)) = work.pop() {
            while e > 0 {
                if let Some(q) = num.div_exact(&c) {
                    num = q;
                    e -= 1;
                    continue;
                }
                let g = poly_gcd(&num, &c);
                if g.is_constant() {
                    break;
                }
                num = num.div_exact(&g).expect("gcd divides numerator");
                e -= 1;
                let rest = c.div_exact(&g).expect("gcd divides factor");
                if !rest.is_constant() {
                    work.push((rest, 1));
                }
            }
            if e > 0 {
                match kept.iter_mut().find(|(k, _)| *k == c) {
                    Some((_, ke)) => *ke += e,
                    None => kept.push((c, e)),
                }
            }
        }
        Factored { num, den: kept }
    }
}

/// Pairwise coprime monic factors of a family of denominators, so that
/// every member is a product of powers of them. Sums over the family then
/// only need gcds against the small factors.
pub(crate) struct CoprimeBasis {
    elems: Vec<MultiPoly>,
    powers: Vec<Vec<MultiPoly>>,
}

impl CoprimeBasis {
    pub(crate) fn new<'a>(polys: impl IntoIterator<Item = &'a MultiPoly>) -> Self {
        let mut elems = Vec::new();
        for p in polys {
            insert(&mut elems, p.clone());
        }
        let powers = elems.iter().map(|b| vec![MultiPoly::one(b.ctx()), b.clone()]).collect();
        CoprimeBasis { elems, powers }
    }

    /// Exponents of a monic `d` over the basis, or `None` when `d` is not a
    /// product of basis elements.
    pub(crate) fn exponents(&self, d: &MultiPoly) -> Option<Vec<u32>> {
        let mut rest = d.clone();
        let mut exps = vec![0; self.elems.len()];
        for (b, e) in self.elems.iter().zip(&mut exps) {
            while let Some(q) = rest.div_exact(b) {
                rest = q;
                *e += 1;
            }
        }
        rest.is_one().then_some(exps)
    }

    fn power(&mut self, i: usize, e: u32) -> &MultiPoly {
        let cache = &mut self.powers[i];
        while cache.len() <= e as usize {
            let next = &cache[cache.len() - 1] * &self.elems[i];
            cache.push(next);
        }
        &cache[e as usize]
    }

    /// `sum num_i / prod b^e_i`, reduced.
    pub(crate) fn sum(&mut self, terms: &[(MultiPoly, Vec<u32>)], zero: MultiPoly) -> RatFunc {
        let mut lcm = vec![0u32; self.elems.len()];
        for (_, exps) in terms {
            for (l, e) in lcm.iter_mut().zip(exps) {
                *l = (*l).max(*e);
            }
        }
        let mut num = zero;
        for (n, exps) in terms {
            let mut t = n.clone();
            for (i, (l, e)) in lcm.iter().zip(exps).enumerate() {
                if l > e {
                    t = &t * self.power(i, l - e);
                }
            }
            num = &num + &t;
        }
        let pieces =
            self.elems.iter().zip(&lcm).filter(|(_, l)| **l > 0).map(|(b, l)| (b.clone(), *l)).collect();
        Factored::cancel(num, pieces).to_ratfunc()
    }
}

fn insert(elems: &mut Vec<MultiPoly>, p: MultiPoly) {
    if p.is_constant() {
        return;
    }
    let mut p = p.monic();
    for i in 0..elems.len() {
        while let Some(q) = p.div_exact(&elems[i]) {
            p = q;
        }
        if p.is_constant() {
            return;
        }
        let g = poly_gcd(&elems[i], &p);
        if g.is_constant() {
            continue;
        }
        let b = elems.remove(i);
        let b_rest = b.div_exact(&g).expect("gcd divides basis element");
        let p_rest = p.div_exact(&g).expect("gcd divides input");
        insert(elems, g);
        insert(elems, b_rest);
        insert(elems, p_rest);
        return;
    }
    elems.push(p);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;
    use crate::expr::{parse_poly, parse_ratfunc};

    #[test]
    fn basis_splits_common_factors() {
        let ctx = Context::new(&["x", "y"]).unwrap();
        let p = |s: &str| parse_poly(s, &ctx).unwrap();
        let dens = [p("x^2*(y+1)"), p("x*(x+y)"), p("(y+1)^3*(x+y)^2")];
        let basis = CoprimeBasis::new(&dens);
        assert_eq!(basis.elems.len(), 3);
        for d in &dens {
            assert!(basis.exponents(d).is_some());
        }
        assert!(basis.exponents(&p("x - 1")).is_none());
    }

    #[test]
    fn sum_over_basis_is_reduced() {
        let ctx = Context::new(&["x", "y"]).unwrap();
        let r = |s: &str| parse_ratfunc(s, &ctx).unwrap();
        let terms = [r("1/(x*(x+y))"), r("y/(x^2*(x+y))"), r("-1/x^2")];
        let mut basis = CoprimeBasis::new(terms.iter().map(RatFunc::den));
        let items: Vec<_> =
            terms.iter().map(|f| (f.num().clone(), basis.exponents(f.den()).unwrap())).collect();
        let got = basis.sum(&items, MultiPoly::zero(&ctx));
        assert_eq!(got, RatFunc::sum(&ctx, &terms));
    }
}
