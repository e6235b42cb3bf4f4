//! Positivstellensatz and sum-of-squares refutations given as monomial lists.

use super::{CpsError, CpsProof, InequalitySystem, Provenance};
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::pit::{poly_circuit, poly_into, Poly};
use crate::proof_ips::y_name;
use crate::ring::{RingTag, Scalar};
use crate::transforms::{minus_normalize, SplitMode};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Equations `f_i = 0` and inequalities `h_j >= 0` over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PsSystem {
    pub var_names: Vec<String>,
    pub equations: Vec<Poly>,
    pub inequalities: Vec<Poly>,
}

/// `(prod_{j in subset} h_j) * sum_k c_k * s_k^2` with `c_k >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeTerm {
    pub subset: Vec<usize>,
    pub squares: Vec<(BigRational, Poly)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsRefutation {
    pub ideal_cofactors: Vec<Poly>,
    pub cone_terms: Vec<ConeTerm>,
    /// Every cone term uses at most one inequality.
    pub sos_restricted: bool,
}

impl PsRefutation {
    /// Cone terms with sorted, duplicate-free subsets; terms sharing a subset
    /// are merged.
    pub fn canonical_terms(&self) -> Vec<ConeTerm> {
        let mut merged: BTreeMap<Vec<usize>, Vec<(BigRational, Poly)>> = BTreeMap::new();
        for t in &self.cone_terms {
            let mut s = t.subset.clone();
            s.sort_unstable();
            s.dedup();
            merged.entry(s).or_default().extend(t.squares.iter().cloned());
        }
        merged.into_iter().map(|(subset, squares)| ConeTerm { subset, squares }).collect()
    }

    /// Number of monomials in the cofactors plus those of each expanded
    /// weighted sum of squares.
    pub fn monomial_size(&self) -> usize {
        let ideal: usize = self.ideal_cofactors.iter().map(|p| p.len()).sum();
        let cone: usize = self.canonical_terms().iter().map(|t| sos_poly(t).len()).sum();
        ideal + cone
    }
}

fn sos_poly(t: &ConeTerm) -> Poly {
    let mut acc = Poly::zero();
    for (c, s) in &t.squares {
        acc = acc.add(&s.mul(s).scale(c));
    }
    acc
}

fn check_shape(r: &PsRefutation, sys: &PsSystem) -> Result<(), CpsError> {
    if r.ideal_cofactors.len() != sys.equations.len() {
        return Err(CpsError::ArityMismatch(format!(
            "{} cofactors for {} equations",
            r.ideal_cofactors.len(),
            sys.equations.len()
        )));
    }
    for (i, t) in r.cone_terms.iter().enumerate() {
        if let Some(&j) = t.subset.iter().find(|&&j| j >= sys.inequalities.len()) {
            return Err(CpsError::BadSubsetIndex { term: i, index: j, count: sys.inequalities.len() });
        }
        if r.sos_restricted && t.subset.len() > 1 {
            return Err(CpsError::NotSoS(i));
        }
        if t.squares.iter().any(|(c, _)| c.is_negative()) {
            return Err(CpsError::NegativeWeight(i));
        }
    }
    Ok(())
}

/// The polynomial `sum_i p_i f_i + sum_zeta (prod h_j)(sum c s^2)`.
pub fn ps_left_side(r: &PsRefutation, sys: &PsSystem) -> Result<Poly, CpsError> {
    check_shape(r, sys)?;
    let mut acc = Poly::zero();
    for (p, f) in r.ideal_cofactors.iter().zip(&sys.equations) {
        acc = acc.add(&p.mul(f));
    }
    for t in r.canonical_terms() {
        let mut prod = Poly::one();
        for &j in &t.subset {
            prod = prod.mul(&sys.inequalities[j]);
        }
        acc = acc.add(&prod.mul(&sos_poly(&t)));
    }
    Ok(acc)
}

/// Exact check that the refutation sums to `-1`.
pub fn verify_ps(r: &PsRefutation, sys: &PsSystem) -> Result<bool, CpsError> {
    Ok(ps_left_side(r, sys)? == Poly::int(-1))
}

/// Inequalities `f_i >= 0`, `-f_i >= 0` per equation, then the `h_j`.
fn ps_inequalities(sys: &PsSystem) -> Result<InequalitySystem, CpsError> {
    let ring = RingTag::RationalField;
    let mut ineqs = Vec::new();
    let mut prov = Vec::new();
    for f in &sys.equations {
        ineqs.push(poly_circuit(f, &ring, &sys.var_names)?);
        ineqs.push(poly_circuit(&f.neg(), &ring, &sys.var_names)?);
        prov.extend([Provenance::EqPos, Provenance::EqNeg]);
    }
    for h in &sys.inequalities {
        ineqs.push(poly_circuit(h, &ring, &sys.var_names)?);
        prov.push(Provenance::UserIneq);
    }
    InequalitySystem::new(ring, sys.var_names.clone(), ineqs, prov)
}

/// Compiles a refutation into a real-mode CPS proof of `-1`. Each cofactor
/// `p_i` is split as `P_i - N_i` with conic parts and contributes
/// `y(f_i >= 0) * P_i + y(-f_i >= 0) * N_i`; each cone term becomes the
/// product of its placeholders times the weighted squares.
pub fn ps_to_cps(r: &PsRefutation, sys: &PsSystem) -> Result<CpsProof, CpsError> {
    check_shape(r, sys)?;
    let ring = RingTag::RationalField;
    let system = ps_inequalities(sys)?;
    let m = sys.equations.len();
    let mut b = CircuitBuilder::with_vars(ring.clone(), &sys.var_names);
    let xs: Vec<GateId> = (0..sys.var_names.len()).map(|i| b.var_at(i)).collect();
    let mut terms = Vec::new();
    for (i, p) in r.ideal_cofactors.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let pc = poly_circuit(p, &ring, &sys.var_names)?;
        let split = minus_normalize(&pc, SplitMode::Real)?;
        let ids = b.import(&split.combined);
        let yp = b.var(&y_name(2 * i));
        let yn = b.var(&y_name(2 * i + 1));
        terms.push(b.mul(yp, ids[0]));
        terms.push(b.mul(yn, ids[1]));
    }
    for t in r.canonical_terms() {
        let ys: Vec<GateId> = t.subset.iter().map(|&j| b.var(&y_name(2 * m + j))).collect();
        let prod = b.product(&ys);
        let mut sq = Vec::new();
        for (c, s) in &t.squares {
            if c.is_zero() || s.is_zero() {
                continue;
            }
            let sc = poly_into(&mut b, s, &xs);
            let q = b.square(sc);
            sq.push(if c.is_one() {
                q
            } else {
                let k = b.constant(Scalar::Rational(c.clone()));
                b.mul(k, q)
            });
        }
        let sum = b.sum(&sq);
        terms.push(b.mul(prod, sum));
    }
    let out = b.sum(&terms);
    let circuit = b.finish_pruned(vec![out])?;
    let target = super::constant(&ring, Scalar::int(-1));
    Ok(CpsProof { circuit, system, target, real_mode: true })
}

/// The linear-size SoS refutation of `sum_i 2^(i-1) x_i + 1 = 0` from the
/// inequalities `x_i >= 0`: `-1 * (sum 2^(i-1) x_i + 1) + sum 2^(i-1) x_i * 1^2`.
pub fn bvp_sos(n: usize) -> (PsSystem, PsRefutation) {
    let var_names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut s = Poly::int(1);
    let mut ineqs = Vec::with_capacity(n);
    let mut terms = Vec::with_capacity(n);
    let mut pow = BigRational::one();
    for i in 0..n {
        let x = Poly::var(i as u32);
        s = s.add(&x.scale(&pow));
        ineqs.push(x);
        terms.push(ConeTerm { subset: vec![i], squares: vec![(pow.clone(), Poly::int(1))] });
        pow *= BigRational::from_integer(2.into());
    }
    let sys = PsSystem { var_names, equations: vec![s], inequalities: ineqs };
    let r = PsRefutation { ideal_cofactors: vec![Poly::int(-1)], cone_terms: terms, sos_restricted: true };
    (sys, r)
}

/// Circuits for the system's polynomials, for reports.
pub fn system_circuits(sys: &PsSystem) -> Result<Vec<Circuit>, CpsError> {
    Ok(ps_inequalities(sys)?.ineqs().to_vec())
}
