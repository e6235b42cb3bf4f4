//! Sparse multivariate polynomials with exact coefficients.

use crate::ring::RatFunc;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient arithmetic needed by [`SparsePoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn from_rational(r: &BigRational) -> Self;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Coeff for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn inverse(&self) -> Option<Self> {
        RatFunc::inverse(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        RatFunc::constant(r.clone())
    }
}

/// A power product, as `(variable, exponent)` pairs sorted by variable with
/// positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((lv, le)) if *lv == v => *le += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    /// From a dense exponent vector.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i as u32, e)).collect())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn exponent(&self, v: u32) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn remap(&self, f: impl Fn(u32) -> u32) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)).collect())
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&(v, e)| {
                let n = names.get(v as usize).cloned().unwrap_or_else(|| format!("v{v}"));
                if e == 1 {
                    n
                } else {
                    format!("{n}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format(&[]))
    }
}

/// A polynomial as a map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct SparsePoly<C> {
    terms: BTreeMap<Monomial, C>,
}

/// Polynomials over Q.
pub type Poly = SparsePoly<BigRational>;

impl<C: Coeff> Default for SparsePoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> SparsePoly<C> {
    pub fn zero() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn var(v: u32) -> Self {
        Self::monomial(Monomial::var(v), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    /// Number of monomials with nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (big, small) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    /// Size of the product without computing coefficients; an upper bound on its term count.
    pub fn product_support_bound(&self, o: &Self) -> usize {
        self.len().saturating_mul(o.len())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Renames variables; colliding monomials are merged.
    pub fn remap_vars(&self, f: impl Fn(u32) -> u32) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.remap(&f), c.clone())))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> SparsePoly<D> {
        SparsePoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Largest variable index plus one.
    pub fn var_bound(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(v, _)| v as usize + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| if m.is_one() { format!("{c}") } else { format!("{c}*{}", m.format(names)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl SparsePoly<BigRational> {
    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    /// Evaluates at a rational point (indexed by variable).
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        let mut acc = <BigRational as Zero>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.pairs() {
                for _ in 0..e {
                    t *= &point[v as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Sum of the absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).fold(<BigRational as Zero>::zero(), |a, b| a + b)
    }
}

impl<C: Coeff> fmt::Debug for SparsePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format(&[]))
    }
}

/// Parses `c*x1^2*x2 + -3/2*x3 + 5`-style sums, or one term per line.
/// Variables must appear in `names`.
pub fn parse_poly(text: &str, names: &[String]) -> Result<Poly, String> {
    let mut p = Poly::zero();
    for chunk in text.split(['+', '\n']) {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (m, c) = parse_term(chunk, names)?;
        p.add_term(m, c);
    }
    Ok(p)
}

/// Parses one term: an optional rational coefficient followed by factors,
/// separated by `*` or whitespace (`-2 x1^2*x2`, `x3`, `1/2`).
pub fn parse_term(text: &str, names: &[String]) -> Result<(Monomial, BigRational), String> {
    let mut coeff = <BigRational as One>::one();
    let mut pairs = Vec::new();
    let mut sign_only = false;
    for (k, tok) in text.split(['*', ' ', '\t']).filter(|t| !t.is_empty()).enumerate() {
        if tok == "-" && k == 0 {
            coeff = -coeff;
            sign_only = true;
            continue;
        }
        if let Some(r) = crate::circuit::text::parse_rational(tok) {
            coeff *= r;
            continue;
        }
        let (name, neg) = match tok.strip_prefix('-') {
            Some(rest) if k == 0 || sign_only => (rest, true),
            _ => (tok, false),
        };
        if neg {
            coeff = -coeff;
        }
        let (name, exp) = match name.split_once('^') {
            Some((n, e)) => (n, e.parse::<u32>().map_err(|_| format!("bad exponent in `{tok}`"))?),
            None => (name, 1),
        };
        let v = names.iter().position(|n| n == name).ok_or_else(|| format!("unknown variable `{name}`"))?;
        pairs.push((v as u32, exp));
    }
    Ok((Monomial::from_pairs(pairs), coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn binomial_square() {
        let s = Poly::var(0).add(&Poly::var(1));
        let sq = s.mul(&s);
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.coeff(&Monomial::from_pairs(vec![(0, 1), (1, 1)])), q(2));
    }

    #[test]
    fn cancellation_leaves_empty_map() {
        let p = Poly::var(0).mul(&Poly::var(0)).sub(&Poly::var(0));
        assert!(p.sub(&p).is_zero());
        assert!(p.sub(&p).terms().is_empty());
    }

    #[test]
    fn parse_and_format() {
        let names: Vec<String> = vec!["x1".into(), "x2".into()];
        let p = parse_poly("2*x1^2*x2 + -1/2*x2 + 3", &names).unwrap();
        assert_eq!(p.len(), 3);
        let back = parse_poly(&p.format(&names), &names).unwrap();
        assert_eq!(back, p);
        let neg = parse_poly("-x1", &names).unwrap();
        assert_eq!(neg, Poly::var(0).neg());
    }
}
