//! Compiling IPS proofs into CPS proofs.

use super::{boolean_ineqs, factor_out, plus_minus, CpsError, CpsProof, InequalitySystem, Provenance};
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::pit::{is_zero, PitPolicy};
use crate::proof_ips::{bind_by_name, y_name, IpsProof};
use crate::ring::{RingTag, Scalar};
use crate::transforms::{minus_normalize, SplitMode};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// `c` in the bound `|ips_to_cps(p)| <= c * |p|^2`.
pub const IPS_TO_CPS_SIZE_FACTOR: usize = 2;

fn var_circuit(ring: &RingTag, name: &str) -> Circuit {
    let mut b = CircuitBuilder::new(ring.clone());
    let v = b.var(name);
    b.finish(vec![v]).expect("valid circuit")
}

/// Compiles an IPS proof into a CPS proof of the negated, rescaled target.
///
/// The proof is written as `sum_k w_k * C_k` over its placeholders, the
/// placeholders inside each `C_k` are replaced by their axioms, and each
/// `C_k` is split as `P_k - N_k`. The result is
/// `sum_k y(f_k >= 0) * P_k + y(-f_k >= 0) * N_k` with the roles of the two
/// inequalities swapped when that makes the target negative. A nonzero
/// constant target `c` becomes `-1` over Q and `-|c|` over Z.
///
/// Boolean systems are split with variables kept as they are, and every
/// variable leaf is then replaced by the placeholder of `x >= 0`. Other
/// systems are split over Q with the real-variable formulas.
pub fn ips_to_cps(p: &IpsProof, policy: &PitPolicy) -> Result<CpsProof, CpsError> {
    p.check_arity()?;
    let sys = &p.system;
    let boolean = sys.include_boolean();
    let ring = match (sys.ring(), boolean) {
        (RingTag::RationalField, _) => RingTag::RationalField,
        (RingTag::IntegerRing, true) => RingTag::IntegerRing,
        (RingTag::IntegerRing, false) => RingTag::RationalField,
        (r, _) => return Err(CpsError::UnorderedRing(r.clone())),
    };
    let promote = |c: &Circuit| -> Result<Circuit, CpsError> {
        if c.ring() == &ring {
            Ok(c.clone())
        } else {
            Ok(c.with_ring(ring.clone())?)
        }
    };

    let names = sys.placeholder_names();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let fac = factor_out(&p.circuit, &name_refs)?;
    if !is_zero(&fac.residual, policy)?.equal {
        return Err(CpsError::NotInPlaceholderIdeal);
    }
    let eqs = sys.equations();
    let axiom_map: BTreeMap<String, Circuit> = names.iter().cloned().zip(eqs.iter().cloned()).collect();

    // The inequality system: each equation as a +/- pair, then per variable
    // the four boolean inequalities.
    let mut ineqs = Vec::new();
    let mut prov = Vec::new();
    let mut pair_of = Vec::with_capacity(eqs.len());
    for f in sys.axioms() {
        let (pf, nf) = plus_minus(&promote(f)?)?;
        pair_of.push((ineqs.len(), ineqs.len() + 1));
        ineqs.extend([pf, nf]);
        prov.extend([Provenance::EqPos, Provenance::EqNeg]);
    }
    let mut x_ge_0 = Vec::new();
    if boolean {
        for v in sys.var_names() {
            let four = boolean_ineqs(&ring, v)?;
            let k = ineqs.len();
            pair_of.push((k, k + 1));
            x_ge_0.push(k + 2);
            for (c, t) in four {
                ineqs.push(c);
                prov.push(t);
            }
        }
    }
    let system = InequalitySystem::new(ring.clone(), sys.var_names().to_vec(), ineqs, prov)?;

    let (target_sign, scale) = target_normalization(&p.target, &ring);
    let mut b = CircuitBuilder::new(ring.clone());
    let mut terms: Vec<GateId> = Vec::new();
    for (k, q) in fac.quotients.iter().enumerate() {
        let mut ck = promote(&bind_by_name(q, &axiom_map)?.pruned())?;
        let mode = if boolean {
            let xs: BTreeMap<String, Circuit> = sys
                .var_names()
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), var_circuit(&ring, &y_name(x_ge_0[i]))))
                .collect();
            ck = bind_by_name(&ck, &xs)?;
            SplitMode::Boolean
        } else {
            SplitMode::Real
        };
        let split = minus_normalize(&ck, mode)?;
        let ids = b.import(&split.combined);
        let (mut pk, mut nk) = (ids[0], ids[1]);
        if target_sign > 0 {
            std::mem::swap(&mut pk, &mut nk);
        }
        let (ip, in_) = pair_of[k];
        let yp = b.var(&y_name(ip));
        let yn = b.var(&y_name(in_));
        terms.push(b.mul(yp, pk));
        terms.push(b.mul(yn, nk));
    }
    let mut out = b.sum(&terms);
    let mut target = p.target.clone();
    if let Some(s) = scale {
        let k = b.constant(Scalar::Rational(s.clone()));
        out = b.mul(k, out);
        target = super::constant(&ring, Scalar::int(-1));
    } else if target_sign > 0 {
        let mut t = CircuitBuilder::new(ring.clone());
        let o = t.import(&promote(&p.target)?)[0];
        let n = t.neg(o);
        target = t.finish_pruned(vec![n])?;
    } else {
        target = promote(&target)?;
    }
    let circuit = b.finish_pruned(vec![out])?;
    Ok(CpsProof { circuit, system, target, real_mode: !boolean })
}

/// Sign of a constant target (positive targets get negated) and, over Q, the
/// positive factor that turns it into `-1`.
fn target_normalization(t: &Circuit, ring: &RingTag) -> (i32, Option<BigRational>) {
    if t.variable_dependence()[t.output()] {
        return (0, None);
    }
    let Some(c) = t.constant_value(t.output()).ok().and_then(|s| s.as_rational()) else {
        return (0, None);
    };
    if c.is_zero() {
        return (0, None);
    }
    let sign = if c.is_positive() { 1 } else { -1 };
    let scale = match ring {
        RingTag::RationalField => Some(c.abs().recip()),
        _ => None,
    };
    (sign, scale)
}
