//! Dynamic semi-algebraic derivations written as sums of monomials.

use super::{CpsError, CpsProof, InequalitySystem, Provenance};
use crate::circuit::{CircuitBuilder, GateId};
use crate::pit::{poly_circuit, poly_into, Poly};
use crate::proof_ips::y_name;
use crate::ring::{RingTag, Scalar};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

/// Inequalities `h_k >= 0` as polynomials, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySystem {
    pub var_names: Vec<String>,
    pub polys: Vec<Poly>,
    pub provenance: Vec<Provenance>,
}

impl PolySystem {
    pub fn user(var_names: Vec<String>, polys: Vec<Poly>) -> Self {
        let provenance = vec![Provenance::UserIneq; polys.len()];
        PolySystem { var_names, polys, provenance }
    }

    /// Each equation as `f >= 0` and `-f >= 0`.
    pub fn push_equation(&mut self, f: Poly) {
        let g = f.neg();
        self.polys.push(f);
        self.polys.push(g);
        self.provenance.extend([Provenance::EqPos, Provenance::EqNeg]);
    }

    /// `x >= 0`, `1 - x >= 0`, `x^2 - x >= 0`, `x - x^2 >= 0` for every variable.
    pub fn push_boolean(&mut self) {
        for i in 0..self.var_names.len() {
            let x = Poly::var(i as u32);
            let sq = x.mul(&x);
            self.polys.push(x.clone());
            self.provenance.push(Provenance::BoolX);
            self.polys.push(Poly::int(1).sub(&x));
            self.provenance.push(Provenance::Bool1mX);
            self.polys.push(sq.sub(&x));
            self.provenance.push(Provenance::BoolSqPos);
            self.polys.push(x.sub(&sq));
            self.provenance.push(Provenance::BoolSqNeg);
        }
    }

    pub fn to_inequality_system(&self) -> Result<InequalitySystem, CpsError> {
        let ring = RingTag::RationalField;
        let ineqs = self.polys.iter().map(|p| poly_circuit(p, &ring, &self.var_names)).collect::<Result<Vec<_>, _>>()?;
        InequalitySystem::new(ring, self.var_names.clone(), ineqs, self.provenance.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Justification {
    Axiom(usize),
    /// `h^2` for any polynomial `h`.
    SquareAxiom(Poly),
    Sum(usize, usize),
    ScaleNonneg(usize, BigInt),
    Product(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsLine {
    pub poly: Poly,
    pub rule: Justification,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LsDerivation {
    pub lines: Vec<LsLine>,
}

impl LsDerivation {
    pub fn push(&mut self, poly: Poly, rule: Justification) -> usize {
        self.lines.push(LsLine { poly, rule });
        self.lines.len() - 1
    }

    /// Total number of monomials over all lines.
    pub fn monomial_size(&self) -> usize {
        self.lines.iter().map(|l| l.poly.len()).sum()
    }
}

fn earlier(i: usize, line: usize) -> Result<usize, CpsError> {
    if i < line {
        Ok(i)
    } else {
        Err(CpsError::RuleMismatch(line))
    }
}

/// Replays every rule with exact arithmetic and requires the last line to be `-1`.
pub fn verify_ls(d: &LsDerivation, sys: &PolySystem) -> Result<(), CpsError> {
    for (n, l) in d.lines.iter().enumerate() {
        let expect = match &l.rule {
            Justification::Axiom(k) => sys.polys.get(*k).cloned().ok_or(CpsError::RuleMismatch(n))?,
            Justification::SquareAxiom(h) => h.mul(h),
            Justification::Sum(i, j) => d.lines[earlier(*i, n)?].poly.add(&d.lines[earlier(*j, n)?].poly),
            Justification::ScaleNonneg(i, a) => {
                if a.sign() == Sign::Minus {
                    return Err(CpsError::NegativeScalar(n));
                }
                d.lines[earlier(*i, n)?].poly.scale(&BigRational::from_integer(a.clone()))
            }
            Justification::Product(i, j) => d.lines[earlier(*i, n)?].poly.mul(&d.lines[earlier(*j, n)?].poly),
        };
        if expect != l.poly {
            return Err(CpsError::RuleMismatch(n));
        }
    }
    match d.lines.last() {
        Some(l) if l.poly == Poly::int(-1) => Ok(()),
        _ => Err(CpsError::NotRefutation),
    }
}

/// Compiles a verified derivation into a CPS proof of `-1`, one subcircuit per line.
pub fn ls_to_cps(d: &LsDerivation, sys: &PolySystem) -> Result<CpsProof, CpsError> {
    verify_ls(d, sys)?;
    let ring = RingTag::RationalField;
    let system = sys.to_inequality_system()?;
    let mut b = CircuitBuilder::with_vars(ring.clone(), &sys.var_names);
    let xs: Vec<GateId> = (0..sys.var_names.len()).map(|i| b.var_at(i)).collect();
    let mut ids: Vec<GateId> = Vec::with_capacity(d.lines.len());
    for l in &d.lines {
        let g = match &l.rule {
            Justification::Axiom(k) => b.var(&y_name(*k)),
            Justification::SquareAxiom(h) => {
                let hc = poly_into(&mut b, h, &xs);
                b.square(hc)
            }
            Justification::Sum(i, j) => b.add(ids[*i], ids[*j]),
            Justification::ScaleNonneg(i, a) => {
                let k = b.constant(Scalar::from_bigint(a.clone()));
                b.mul(k, ids[*i])
            }
            Justification::Product(i, j) => b.mul(ids[*i], ids[*j]),
        };
        ids.push(g);
    }
    let out = *ids.last().expect("verified derivations are nonempty");
    let circuit = b.finish_pruned(vec![out])?;
    let target = super::constant(&ring, Scalar::int(-1));
    Ok(CpsProof { circuit, real_mode: !system.has_boolean_axioms(), system, target })
}
