//! Exact expansion of circuits into sparse polynomials.

use super::poly::{Coeff, Poly, SparsePoly};
use super::PitError;
use crate::circuit::{Circuit, Gate};
use crate::ring::{RatFunc, RingTag, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use std::fmt;

/// Default cap on the number of monomials held by any single gate.
pub const DEFAULT_TERM_BUDGET: usize = 200_000;

/// An expanded output: rational coefficients for Z, Q and GF p (reduced
/// into `[0, p)`), rational functions of `y` for Q(y).
#[derive(Clone, PartialEq)]
pub enum Expanded {
    Rational(Poly),
    Function(SparsePoly<RatFunc>),
}

impl Expanded {
    pub fn is_zero(&self) -> bool {
        match self {
            Expanded::Rational(p) => p.is_zero(),
            Expanded::Function(p) => p.is_zero(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Expanded::Rational(p) => p.len(),
            Expanded::Function(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_rational(&self) -> Option<&Poly> {
        match self {
            Expanded::Rational(p) => Some(p),
            Expanded::Function(_) => None,
        }
    }

    pub fn format(&self, names: &[String]) -> String {
        match self {
            Expanded::Rational(p) => p.format(names),
            Expanded::Function(p) => p.format(names),
        }
    }
}

impl fmt::Debug for Expanded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format(&[]))
    }
}

/// The polynomials computed by the outputs of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub ring: RingTag,
    pub var_names: Vec<String>,
    pub outputs: Vec<Expanded>,
}

/// Expands every output with the default budget.
pub fn expand(c: &Circuit) -> Result<Expansion, PitError> {
    expand_with_budget(c, DEFAULT_TERM_BUDGET)
}

pub fn expand_with_budget(c: &Circuit, budget: usize) -> Result<Expansion, PitError> {
    let identity: Vec<u32> = (0..c.num_vars() as u32).collect();
    let outputs = expand_mapped(c, budget, &identity)?;
    Ok(Expansion { ring: c.ring().clone(), var_names: c.var_names().to_vec(), outputs })
}

/// Expands with variable `i` of `c` renamed to `var_map[i]`.
pub(crate) fn expand_mapped(c: &Circuit, budget: usize, var_map: &[u32]) -> Result<Vec<Expanded>, PitError> {
    match c.ring() {
        RingTag::RationalFunctionField => {
            let polys = expand_generic::<RatFunc>(c, budget, var_map, None, |s| Ok(s.to_ratfunc()))?;
            Ok(polys.into_iter().map(Expanded::Function).collect())
        }
        ring => {
            let modulus = match ring {
                RingTag::PrimeField(p) => Some(p.clone()),
                _ => None,
            };
            let polys = expand_generic::<BigRational>(c, budget, var_map, modulus.as_ref(), |s| {
                s.as_rational().ok_or_else(|| PitError::Unsupported(format!("constant {s} over {ring}")))
            })?;
            Ok(polys.into_iter().map(Expanded::Rational).collect())
        }
    }
}

/// Expands a rational-coefficient circuit into [`Poly`] values, one per output.
pub fn expand_rational(c: &Circuit, budget: usize) -> Result<Vec<Poly>, PitError> {
    let e = expand_with_budget(c, budget)?;
    e.outputs
        .into_iter()
        .map(|x| match x {
            Expanded::Rational(p) => Ok(p),
            Expanded::Function(_) => Err(PitError::Unsupported("rational-function coefficients".into())),
        })
        .collect()
}

fn reduce_mod(p: &Poly, m: &BigInt) -> Poly {
    Poly::from_terms(p.terms().iter().map(|(mono, c)| {
        let n = (c.numer() * modinv(c.denom(), m)).mod_floor(m);
        (mono.clone(), BigRational::from_integer(n))
    }))
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    a.extended_gcd(m).x.mod_floor(m)
}

fn expand_generic<C: Coeff>(
    c: &Circuit,
    budget: usize,
    var_map: &[u32],
    modulus: Option<&BigInt>,
    leaf: impl Fn(&Scalar) -> Result<C, PitError>,
) -> Result<Vec<SparsePoly<C>>, PitError>
where
    SparsePoly<C>: Reducible,
{
    let n = c.size();
    let mut last_use = vec![0usize; n];
    for (id, g) in c.gates().iter().enumerate() {
        if let Some((a, b)) = g.operands() {
            last_use[a] = id;
            last_use[b] = id;
        }
    }
    for &o in c.outputs() {
        last_use[o] = usize::MAX;
    }
    let mut vals: Vec<Option<SparsePoly<C>>> = vec![None; n];
    for (id, g) in c.gates().iter().enumerate() {
        let get = |i: usize| vals[i].as_ref().expect("operand freed before use");
        let mut v = match g {
            Gate::Var(i) => SparsePoly::var(var_map[*i]),
            Gate::Const(s) => SparsePoly::constant(leaf(s)?),
            Gate::Add(a, b) => get(*a).add(get(*b)),
            Gate::Mul(a, b) => mul_budget(get(*a), get(*b), budget)?,
            Gate::DivConst(a, b) => {
                let d = get(*b).as_constant().and_then(|k| k.inverse()).ok_or(PitError::Unsupported(
                    "division by a non-constant or zero subcircuit".into(),
                ))?;
                get(*a).scale(&d)
            }
        };
        if let Some(m) = modulus {
            v = v.reduce_mod(m);
        }
        if v.len() > budget {
            return Err(PitError::BudgetExceeded { terms: v.len(), budget });
        }
        vals[id] = Some(v);
        if let Some((a, b)) = g.operands() {
            if last_use[a] == id {
                vals[a] = None;
            }
            if last_use[b] == id {
                vals[b] = None;
            }
        }
    }
    Ok(c.outputs().iter().map(|&o| vals[o].clone().unwrap()).collect())
}

pub(crate) trait Reducible {
    fn reduce_mod(self, m: &BigInt) -> Self;
}

impl Reducible for Poly {
    fn reduce_mod(self, m: &BigInt) -> Self {
        reduce_mod(&self, m)
    }
}

impl Reducible for SparsePoly<RatFunc> {
    fn reduce_mod(self, _m: &BigInt) -> Self {
        self
    }
}

fn mul_budget<C: Coeff>(a: &SparsePoly<C>, b: &SparsePoly<C>, budget: usize) -> Result<SparsePoly<C>, PitError> {
    let (a, b) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = SparsePoly::zero();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            out.add_term(ma.mul(mb), ca.mul(cb));
        }
        if out.len() > budget.saturating_mul(4) {
            return Err(PitError::BudgetExceeded { terms: out.len(), budget });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::pit::poly::Monomial;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn square_of_sum() {
        let c = parse("ring Z\ninput x1 x2\ns = add x1 x2\nm = mul s s\noutput m").unwrap();
        let e = expand(&c).unwrap();
        let p = e.outputs[0].as_rational().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coeff(&Monomial::from_pairs(vec![(0, 2)])), q(1));
        assert_eq!(p.coeff(&Monomial::from_pairs(vec![(0, 1), (1, 1)])), q(2));
        assert_eq!(p.coeff(&Monomial::from_pairs(vec![(1, 2)])), q(1));
    }

    #[test]
    fn self_difference_is_empty() {
        let c = parse(
            "ring Z\ninput x1\nm = const -1\nsq = mul x1 x1\nnx = mul m x1\nf = add sq nx\nnf = mul m f\nd = add f nf\noutput d",
        )
        .unwrap();
        assert!(expand(&c).unwrap().outputs[0].is_empty());
    }

    #[test]
    fn bvp3_axiom() {
        let c = parse(
            "ring Z\ninput x1 x2 x3\none = const 1\ntwo = const 2\nfour = const 4\na = mul two x2\nb = mul four x3\ns1 = add x1 a\ns2 = add s1 b\ns3 = add s2 one\noutput s3",
        )
        .unwrap();
        let p = expand(&c).unwrap().outputs[0].as_rational().unwrap().clone();
        assert_eq!(p.len(), 4);
        assert_eq!(p.coeff(&Monomial::one()), q(1));
        assert_eq!(p.coeff(&Monomial::var(0)), q(1));
        assert_eq!(p.coeff(&Monomial::var(1)), q(2));
        assert_eq!(p.coeff(&Monomial::var(2)), q(4));
    }

    #[test]
    fn division_folds_into_coefficients() {
        let c = parse("ring Q\ninput x1\nt = const 3\nd = divc x1 t\noutput d").unwrap();
        let p = expand(&c).unwrap().outputs[0].as_rational().unwrap().clone();
        assert_eq!(p.coeff(&Monomial::var(0)), BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn gf_coefficients_reduce() {
        let c = parse("ring GF 5\ninput x\nt = const 7\nm = mul t x\noutput m").unwrap();
        let p = expand(&c).unwrap().outputs[0].as_rational().unwrap().clone();
        assert_eq!(p.coeff(&Monomial::var(0)), q(2));
    }

    #[test]
    fn budget_is_enforced() {
        let mut text = String::from("ring Z\ninput a b c d\ns = add a b\nt = add c d\nu = add s t\np1 = mul u u\np2 = mul p1 p1\np3 = mul p2 p2\n");
        text.push_str("output p3");
        let c = parse(&text).unwrap();
        assert!(matches!(expand_with_budget(&c, 50), Err(PitError::BudgetExceeded { .. })));
        assert!(expand_with_budget(&c, 1000).is_ok());
    }

    #[test]
    fn ratfunc_coefficients() {
        let c = parse("ring Q(y)\ninput x\ny = const y\nm = mul y x\nd = divc m y\noutput d").unwrap();
        match &expand(&c).unwrap().outputs[0] {
            Expanded::Function(p) => {
                assert_eq!(p.len(), 1);
                assert_eq!(p.coeff(&Monomial::var(0)), RatFunc::one());
            }
            _ => panic!("expected rational-function coefficients"),
        }
    }
}
