//! Degree-bounded Nullstellensatz certificate search by exact linear algebra.

use super::{AxiomSystem, IpsError, IpsLinCert};
use crate::circuit::Circuit;
use crate::pit::expand::expand_mapped;
use crate::pit::{poly_circuit, Expanded, Monomial, Poly, PitPolicy, DEFAULT_TERM_BUDGET};
use crate::ring::RingTag;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// Largest number of unknowns a search may set up.
pub const DEFAULT_UNKNOWN_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NsOutcome {
    Found { degree: u32, cert: IpsLinCert },
    /// No certificate with all cofactors of degree at most `degree` exists.
    NoneAtDegree(u32),
}

impl NsOutcome {
    pub fn cert(&self) -> Option<&IpsLinCert> {
        match self {
            NsOutcome::Found { cert, .. } => Some(cert),
            NsOutcome::NoneAtDegree(_) => None,
        }
    }
}

/// All monomials in `n` variables of total degree at most `d`, graded-lex.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut exps = vec![0u32; n];
        graded(&mut exps, 0, deg, &mut out);
    }
    out
}

fn graded(exps: &mut [u32], pos: usize, left: u32, out: &mut Vec<Monomial>) {
    if pos == exps.len() {
        if left == 0 {
            out.push(Monomial::from_exponents(exps));
        }
        return;
    }
    if pos + 1 == exps.len() {
        exps[pos] = left;
        graded(exps, pos + 1, 0, out);
        exps[pos] = 0;
        return;
    }
    for e in (0..=left).rev() {
        exps[pos] = e;
        graded(exps, pos + 1, left - e, out);
    }
    exps[pos] = 0;
}

/// The equations of `system` as polynomials over the system's variable indices.
pub fn equation_polys(system: &AxiomSystem) -> Result<Vec<Poly>, IpsError> {
    system.equations().iter().map(|c| to_system_poly(c, system)).collect()
}

fn to_system_poly(c: &Circuit, system: &AxiomSystem) -> Result<Poly, IpsError> {
    let map: Vec<u32> = c
        .var_names()
        .iter()
        .map(|n| system.var_names().iter().position(|m| m == n).expect("axiom variables are declared") as u32)
        .collect();
    match expand_mapped(c, DEFAULT_TERM_BUDGET, &map)?.remove(0) {
        Expanded::Rational(p) => Ok(p),
        Expanded::Function(_) => Err(IpsError::UnsupportedRing(system.ring().clone())),
    }
}

/// Row-echelon form kept with one pivot row per leading column; the last
/// entry of each row (index `rhs`) is the right-hand side.
struct Echelon {
    rhs: usize,
    pivots: BTreeMap<usize, BTreeMap<usize, BigRational>>,
}

impl Echelon {
    /// Reduces `row` and stores it. Returns false when the row becomes `0 = c` with `c != 0`.
    fn insert(&mut self, mut row: BTreeMap<usize, BigRational>) -> bool {
        let mut cursor = 0usize;
        loop {
            let next = row.range(cursor..).next().map(|(&c, _)| c);
            let Some(col) = next else { return true };
            if col == self.rhs {
                return false;
            }
            match self.pivots.get(&col) {
                Some(p) => {
                    let f = row[&col].clone();
                    for (&c, v) in p {
                        let nv = row.get(&c).cloned().unwrap_or_else(BigRational::zero) - &f * v;
                        if nv.is_zero() {
                            row.remove(&c);
                        } else {
                            row.insert(c, nv);
                        }
                    }
                    cursor = col + 1;
                }
                None => {
                    let inv = row[&col].recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(col, row);
                    return true;
                }
            }
        }
    }

    /// Back substitution with free unknowns set to zero.
    fn solve(&self) -> HashMap<usize, BigRational> {
        let mut val: HashMap<usize, BigRational> = HashMap::new();
        for (&col, row) in self.pivots.iter().rev() {
            let mut x = row.get(&self.rhs).cloned().unwrap_or_else(BigRational::zero);
            for (&c, v) in row.range(col + 1..) {
                if c == self.rhs {
                    continue;
                }
                if let Some(xc) = val.get(&c) {
                    x -= v * xc;
                }
            }
            if !x.is_zero() {
                val.insert(col, x);
            }
        }
        val
    }
}

/// Searches for cofactors of degree at most `d` with `sum_i F_i * H_i = 1`.
/// Systems over Z are searched over Q.
pub fn ns_search(system: &AxiomSystem, d: u32) -> Result<NsOutcome, IpsError> {
    ns_search_with_budget(system, d, DEFAULT_UNKNOWN_BUDGET)
}

pub fn ns_search_with_budget(system: &AxiomSystem, d: u32, budget: usize) -> Result<NsOutcome, IpsError> {
    let system = match system.ring() {
        RingTag::RationalField => system.clone(),
        RingTag::IntegerRing => system.with_ring(RingTag::RationalField)?,
        r => return Err(IpsError::UnsupportedRing(r.clone())),
    };
    let eqs = equation_polys(&system)?;
    let basis = monomials_up_to(system.var_names().len(), d);
    let unknowns = basis.len() * eqs.len();
    if unknowns > budget {
        return Err(IpsError::BudgetExceeded { unknowns });
    }
    // Column j*|basis| + k is the coefficient of basis[k] in H_j.
    let mut rows: BTreeMap<Monomial, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for (j, f) in eqs.iter().enumerate() {
        for (k, m) in basis.iter().enumerate() {
            let col = j * basis.len() + k;
            for (fm, fc) in f.terms() {
                let e = rows.entry(fm.mul(m)).or_default().entry(col).or_insert_with(BigRational::zero);
                *e += fc;
            }
        }
    }
    rows.entry(Monomial::one()).or_default().insert(unknowns, BigRational::one());
    let mut ech = Echelon { rhs: unknowns, pivots: BTreeMap::new() };
    for (_, mut row) in rows {
        row.retain(|_, v| !v.is_zero());
        if row.is_empty() {
            continue;
        }
        if !ech.insert(row) {
            return Ok(NsOutcome::NoneAtDegree(d));
        }
    }
    let val = ech.solve();
    let mut cofactors = Vec::with_capacity(eqs.len());
    for j in 0..eqs.len() {
        let mut h = Poly::zero();
        for (k, m) in basis.iter().enumerate() {
            if let Some(v) = val.get(&(j * basis.len() + k)) {
                h.add_term(m.clone(), v.clone());
            }
        }
        cofactors.push(poly_circuit(&h, system.ring(), system.var_names())?);
    }
    let cert = IpsLinCert { cofactors };
    let check = super::verify_ips_lin(&cert, &system, &PitPolicy::exact())?;
    assert!(check.equal, "solver produced a certificate that fails verification");
    Ok(NsOutcome::Found { degree: d, cert })
}

/// Tries `d = 0, 1, ..., max_d` and returns the first certificate found.
pub fn ns_sweep(system: &AxiomSystem, max_d: u32) -> Result<NsOutcome, IpsError> {
    for d in 0..=max_d {
        if let found @ NsOutcome::Found { .. } = ns_search(system, d)? {
            return Ok(found);
        }
    }
    Ok(NsOutcome::NoneAtDegree(max_d))
}
