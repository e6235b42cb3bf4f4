//! Building IPS proofs from other IPS proofs.

use super::{bind_by_name, constant, is_placeholder_name, y_name, z_name, AxiomSystem, IpsError, IpsProof};
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::pit::{pit_equal, PitPolicy};
use crate::proof_cps::factor::factor_out;
use crate::ring::Scalar;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub enum ComposeMode {
    /// From proofs of `F - G` and `H - K`, a proof of `(F + H) - (G + K)`.
    Sum,
    /// From proofs of `F - G` and `H - K`, a proof of `F*H - G*K`. `shared`
    /// has the two outputs `[H, G]`.
    Product { shared: Circuit },
}

fn check_same_system(p1: &IpsProof, p2: &IpsProof) -> Result<(), IpsError> {
    if p1.system != p2.system {
        return Err(IpsError::SystemMismatch);
    }
    Ok(())
}

pub fn compose(p1: &IpsProof, p2: &IpsProof, mode: &ComposeMode) -> Result<IpsProof, IpsError> {
    check_same_system(p1, p2)?;
    let sys = &p1.system;
    let mut b = CircuitBuilder::with_vars(sys.ring().clone(), sys.var_names());
    let mut t = CircuitBuilder::with_vars(sys.ring().clone(), sys.var_names());
    let (c1, c2) = (b.import(&p1.circuit)[0], b.import(&p2.circuit)[0]);
    let (t1, t2) = (t.import(&p1.target)[0], t.import(&p2.target)[0]);
    let (out, tout) = match mode {
        ComposeMode::Sum => (b.add(c1, c2), t.add(t1, t2)),
        ComposeMode::Product { shared } => {
            if shared.outputs().len() != 2 {
                return Err(IpsError::OutputCount);
            }
            let hg = b.import(shared);
            let l = b.mul(c1, hg[0]);
            let r = b.mul(hg[1], c2);
            let th = t.import(shared);
            let tl = t.mul(t1, th[0]);
            let tr = t.mul(th[1], t2);
            (b.add(l, r), t.add(tl, tr))
        }
    };
    Ok(IpsProof {
        circuit: b.finish_pruned(vec![out])?,
        system: sys.clone(),
        target: t.finish_pruned(vec![tout])?,
    })
}

/// The base system extended by `H_i - alpha_i = 0`, where `alpha_i` is bit
/// `i` of `mask`. The new axioms take placeholders `y_{m+1}..y_{m+r}`.
pub fn case_system(base: &AxiomSystem, cases: &[Circuit], mask: u64) -> Result<AxiomSystem, IpsError> {
    let mut extra = Vec::with_capacity(cases.len());
    for (i, h) in cases.iter().enumerate() {
        if h.outputs().len() != 1 {
            return Err(IpsError::OutputCount);
        }
        let mut b = CircuitBuilder::with_vars(base.ring().clone(), base.var_names());
        let ho = b.import(h)[0];
        let out = if (mask >> i) & 1 == 1 {
            let m1 = b.minus_one();
            b.add(ho, m1)
        } else {
            ho
        };
        extra.push(b.finish_pruned(vec![out])?);
    }
    base.with_axioms(extra)
}

/// Placeholder name and sign `s` such that the placeholder stands for `s * (H^2 - H)`.
fn booleanity_placeholder(base: &AxiomSystem, h: &Circuit, which: usize) -> Result<(String, i64), IpsError> {
    let out = h.output();
    if let Gate::Var(i) = h.gate(out) {
        if base.include_boolean() {
            if let Some(k) = base.var_names().iter().position(|n| n == &h.var_names()[*i]) {
                return Ok((z_name(k), 1));
            }
        }
    }
    let mut b = CircuitBuilder::with_vars(base.ring().clone(), base.var_names());
    let ho = b.import(h)[0];
    let sq = b.square(ho);
    let pos = b.sub(sq, ho);
    let neg = b.sub(ho, sq);
    let both = b.finish(vec![pos, neg])?;
    let pos = both.restrict_outputs(&[both.outputs()[0]]);
    let neg = both.restrict_outputs(&[both.outputs()[1]]);
    let policy = PitPolicy::default();
    for (j, a) in base.axioms().iter().enumerate() {
        if pit_equal(a, &pos, &policy)?.equal {
            return Ok((y_name(j), 1));
        }
        if pit_equal(a, &neg, &policy)?.equal {
            return Ok((y_name(j), -1));
        }
    }
    Err(IpsError::MissingBooleanityAxiom(which))
}

/// Merges the proofs for the cases `H = 0` and `H = 1`; `w` is the placeholder
/// of the case axiom.
fn combine_pair(
    p0: &IpsProof,
    p1: &IpsProof,
    w: &str,
    h: &Circuit,
    boolean: &(String, i64),
    system: &AxiomSystem,
) -> Result<IpsProof, IpsError> {
    let f0 = factor_out(&p0.circuit, &[w]).map_err(cps_err)?;
    let f1 = factor_out(&p1.circuit, &[w]).map_err(cps_err)?;
    let ring = system.ring().clone();
    let mut b = CircuitBuilder::with_vars(ring.clone(), system.var_names());
    let ho = b.import(h)[0];
    let m1 = b.minus_one();
    let hm1 = b.add(ho, m1);
    let one = b.one();
    let neg_h = b.neg(ho);
    let one_minus_h = b.add(one, neg_h);

    let a0 = b.import(&f0.residual)[0];
    let a1 = b.import(&f1.residual)[0];
    let q0 = graft_with(&mut b, &f0.quotients[0], w, ho);
    let q1 = graft_with(&mut b, &f1.quotients[0], w, hm1);

    let l = b.mul(one_minus_h, a0);
    let r = b.mul(ho, a1);
    let diff = b.sub(q1, q0);
    let yb = b.var(&boolean.0);
    let corr = b.mul(yb, diff);
    let corr = if boolean.1 < 0 { b.neg(corr) } else { corr };
    let s = b.add(l, r);
    let out = b.add(s, corr);
    Ok(IpsProof { circuit: b.finish_pruned(vec![out])?, system: system.clone(), target: p0.target.clone() })
}

fn cps_err(e: crate::proof_cps::CpsError) -> IpsError {
    match e {
        crate::proof_cps::CpsError::Pit(p) => IpsError::Pit(p),
        crate::proof_cps::CpsError::Circuit(c) => IpsError::Circuit(c),
        _ => IpsError::OutputCount,
    }
}

/// Grafts `c` into `b` with the variable named `name` bound to gate `to`.
fn graft_with(b: &mut CircuitBuilder, c: &Circuit, name: &str, to: GateId) -> GateId {
    let mut map: Vec<Option<GateId>> = vec![None; c.num_vars()];
    if let Some(i) = c.var_index(name) {
        map[i] = Some(to);
    }
    let ids = b.graft(c, &map);
    ids[c.output()]
}

/// Combines one proof per boolean case of `cases` into a proof from `base`.
/// `proofs[mask]` must be a proof over `case_system(base, cases, mask)`, and
/// `base` must contain `H_i^2 - H_i = 0` for every case circuit (a boolean
/// axiom suffices when `H_i` is a variable).
pub fn by_cases(base: &AxiomSystem, cases: &[Circuit], proofs: &BTreeMap<u64, IpsProof>) -> Result<IpsProof, IpsError> {
    let r = cases.len();
    let booleans = cases
        .iter()
        .enumerate()
        .map(|(i, h)| booleanity_placeholder(base, h, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut level: BTreeMap<u64, IpsProof> = BTreeMap::new();
    for mask in 0..(1u64 << r) {
        let p = proofs.get(&mask).ok_or(IpsError::MissingCase(mask))?;
        if p.system != case_system(base, cases, mask)? {
            return Err(IpsError::SystemMismatch);
        }
        level.insert(mask, p.clone());
    }
    for k in (0..r).rev() {
        let w = y_name(base.axioms().len() + k);
        let mut next = BTreeMap::new();
        for mask in 0..(1u64 << k) {
            let p0 = &level[&mask];
            let p1 = &level[&(mask | (1 << k))];
            let sys_m = case_system(base, &cases[..k], mask)?;
            next.insert(mask, combine_pair(p0, p1, &w, &cases[k], &booleans[k], &sys_m)?);
        }
        level = next;
    }
    Ok(level.remove(&0).expect("mask 0 present"))
}

/// Substitutes circuits for variables (by name) in the proof, axioms and
/// target. Boolean axioms of the old variables become explicit axioms, so
/// their placeholders `z_i` are renamed to `y_{m+i}`.
pub fn substitute_proof(p: &IpsProof, bindings: &BTreeMap<String, Circuit>) -> Result<IpsProof, IpsError> {
    if bindings.is_empty() {
        return Ok(p.clone());
    }
    let sys = &p.system;
    for c in bindings.values() {
        if c.ring() != sys.ring() {
            return Err(IpsError::RingMismatch(sys.ring().clone(), c.ring().clone()));
        }
        if c.outputs().len() != 1 {
            return Err(IpsError::OutputCount);
        }
    }
    let mut names: Vec<String> = Vec::new();
    for n in sys.var_names() {
        let new: Vec<String> = match bindings.get(n) {
            Some(c) => c.var_names().to_vec(),
            None => vec![n.clone()],
        };
        for m in new {
            if is_placeholder_name(&m) {
                return Err(IpsError::NameClash(m));
            }
            if !names.contains(&m) {
                names.push(m);
            }
        }
    }
    let rebase = |c: &Circuit| -> Result<Circuit, IpsError> {
        let mut b = CircuitBuilder::with_vars(sys.ring().clone(), &names);
        let o = b.import(&c.pruned())[0];
        Ok(b.finish_pruned(vec![o])?)
    };
    let apply = |c: &Circuit| -> Result<Circuit, IpsError> { rebase(&bind_by_name(c, bindings)?) };
    let mut axioms = sys.axioms().iter().map(&apply).collect::<Result<Vec<_>, _>>()?;
    let m = axioms.len();
    let mut renames: BTreeMap<String, Circuit> = bindings.clone();
    if sys.include_boolean() {
        for i in 0..sys.var_names().len() {
            axioms.push(apply(&sys.boolean_axiom(i))?);
            let mut b = CircuitBuilder::new(sys.ring().clone());
            let v = b.var(&y_name(m + i));
            renames.insert(z_name(i), b.finish(vec![v])?);
        }
    }
    let system = AxiomSystem::new(sys.ring().clone(), names.clone(), axioms, sys.include_boolean())?;
    let circuit = rebase(&bind_by_name(&p.circuit, &renames)?)?;
    let target = apply(&p.target)?;
    Ok(IpsProof { circuit, system, target })
}

/// The trivial proof `0` of the target `0`.
pub fn zero_proof(system: &AxiomSystem) -> IpsProof {
    let z = constant(system.ring(), Scalar::int(0));
    IpsProof { circuit: z.clone(), system: system.clone(), target: z }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::proof_ips::verify_ips;
    use crate::ring::RingTag;

    fn q(s: &str) -> Circuit {
        parse(&format!("ring Q\n{s}")).unwrap()
    }

    fn policy() -> PitPolicy {
        PitPolicy::exact()
    }

    #[test]
    fn sum_and_double() {
        let sys = AxiomSystem::from_axioms(RingTag::RationalField, vec![q("input x1\noutput x1")], false).unwrap();
        let p = IpsProof { circuit: q("input y1\noutput y1"), system: sys.clone(), target: q("input x1\noutput x1") };
        let s = compose(&p, &p, &ComposeMode::Sum).unwrap();
        assert!(verify_ips(&s, &policy()).unwrap().accepted());
        assert!(s.size() <= 2 * p.size() + 1);
    }

    #[test]
    fn product_size() {
        let sys = AxiomSystem::from_axioms(
            RingTag::RationalField,
            vec![q("input x1\noutput x1"), q("input x2\noutput x2")],
            false,
        )
        .unwrap();
        let p0 = IpsProof { circuit: q("input y1\noutput y1"), system: sys.clone(), target: q("input x1\noutput x1") };
        let p1 = IpsProof { circuit: q("input y2\noutput y2"), system: sys.clone(), target: q("input x2\noutput x2") };
        let shared = q("input x1 x2\no = const 1\nh = add x2 o\ng = mul x1 x1\noutput h g");
        let c = compose(&p0, &p1, &ComposeMode::Product { shared: shared.clone() }).unwrap();
        assert!(verify_ips(&c, &policy()).unwrap().accepted());
        assert!(c.size() <= p0.size() + p1.size() + shared.size() + 5);
    }

    #[test]
    fn mismatch() {
        let s1 = AxiomSystem::from_axioms(RingTag::RationalField, vec![q("input x1\noutput x1")], false).unwrap();
        let s2 = AxiomSystem::from_axioms(RingTag::RationalField, vec![q("input x2\noutput x2")], false).unwrap();
        let p1 = zero_proof(&s1);
        let p2 = zero_proof(&s2);
        assert!(matches!(compose(&p1, &p2, &ComposeMode::Sum), Err(IpsError::SystemMismatch)));
    }

    #[test]
    fn cases_on_a_variable() {
        // Refute x1 + 1 = 0 by cases on x1: under x1 = 0 the axiom gives 1,
        // under x1 = 1 it gives 2.
        let f = q("input x1\no = const 1\ns = add x1 o\noutput s");
        let base = AxiomSystem::from_axioms(RingTag::RationalField, vec![f], true).unwrap();
        let cases = vec![q("input x1\noutput x1")];
        let one = q("o = const 1\noutput o");
        let mut proofs = BTreeMap::new();
        // case 0: axioms y1 = x1+1, y2 = x1. 1 = y1 - y2.
        let s0 = case_system(&base, &cases, 0).unwrap();
        let p0 = IpsProof { circuit: q("input y1 y2\nm = const -1\nn = mul m y2\ns = add y1 n\noutput s"), system: s0, target: one.clone() };
        assert!(verify_ips(&p0, &policy()).unwrap().accepted());
        // case 1: y2 = x1 - 1. 1 = (y1 - y2)/2.
        let s1 = case_system(&base, &cases, 1).unwrap();
        let p1 = IpsProof {
            circuit: q("input y1 y2\nm = const -1\nn = mul m y2\ns = add y1 n\nh = const 1/2\nr = mul h s\noutput r"),
            system: s1,
            target: one.clone(),
        };
        assert!(verify_ips(&p1, &policy()).unwrap().accepted());
        proofs.insert(0, p0.clone());
        proofs.insert(1, p1.clone());
        let c = by_cases(&base, &cases, &proofs).unwrap();
        assert!(verify_ips(&c, &policy()).unwrap().accepted());
        assert!(c.size() <= 8 * (p0.size() + p1.size()));
        proofs.remove(&1);
        assert!(matches!(by_cases(&base, &cases, &proofs), Err(IpsError::MissingCase(1))));
    }

    #[test]
    fn zero_cases_is_identity() {
        let base = AxiomSystem::from_axioms(RingTag::RationalField, vec![q("input x1\noutput x1")], false).unwrap();
        let p = IpsProof { circuit: q("input y1\noutput y1"), system: base.clone(), target: q("input x1\noutput x1") };
        let mut proofs = BTreeMap::new();
        proofs.insert(0, p.clone());
        assert_eq!(by_cases(&base, &[], &proofs).unwrap(), p);
    }

    #[test]
    fn missing_booleanity() {
        let base = AxiomSystem::from_axioms(RingTag::RationalField, vec![q("input x1\noutput x1")], false).unwrap();
        let cases = vec![q("input x1\no = const 1\ns = add x1 o\noutput s")];
        assert!(matches!(by_cases(&base, &cases, &BTreeMap::new()), Err(IpsError::MissingBooleanityAxiom(0))));
    }

    #[test]
    fn substitution_instance() {
        let f = q("input x1\no = const 1\ns = add x1 o\noutput s");
        let sys = AxiomSystem::from_axioms(RingTag::RationalField, vec![f.clone()], true).unwrap();
        // y1 + z1 derives x1^2 + 1.
        let p = IpsProof { circuit: q("input y1 z1\nh = add y1 z1\noutput h"), system: sys, target: q("input x1\nq = mul x1 x1\no = const 1\ns = add q o\noutput s") };
        assert!(verify_ips(&p, &policy()).unwrap().accepted());
        let mut bind = BTreeMap::new();
        bind.insert("x1".to_string(), q("input w1\no = const 1\nm = const -1\nn = mul m w1\ns = add o n\noutput s"));
        let s = substitute_proof(&p, &bind).unwrap();
        assert!(verify_ips(&s, &policy()).unwrap().accepted());
        assert_eq!(s.system.axioms().len(), 2);
        assert_eq!(substitute_proof(&p, &BTreeMap::new()).unwrap(), p);
    }
}
