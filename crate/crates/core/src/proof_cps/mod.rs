//! The Cone Proof System: conic circuits, verification, and compilers into CPS.

pub mod compile;
pub mod conic;
pub mod factor;
pub mod ls;
pub mod ps;

use crate::circuit::{Circuit, CircuitBuilder, CircuitError, GateId};
use crate::pit::{pit_equal, PitError, PitPolicy, PitVerdict};
use crate::proof_ips::{bind_by_name, is_placeholder_name, y_name, IpsError};
use crate::ring::{RingTag, Scalar};
use crate::transforms::{int_gadget, TransformError};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub use compile::ips_to_cps;
pub use conic::{conic_check, conic_check_by, ConicVerdict};
pub use factor::{factor_out, factor_placeholders, Factorization};
pub use ls::{ls_to_cps, verify_ls, Justification, LsDerivation, LsLine, PolySystem};
pub use ps::{ps_to_cps, verify_ps, ConeTerm, PsRefutation, PsSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpsError {
    #[error("expected a single output, found {0}")]
    OutputCount(usize),
    #[error("circuit does not vanish when all placeholders are zero")]
    NotInPlaceholderIdeal,
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("{0}")]
    ConicViolation(ConicVerdict),
    #[error("cone term {term} refers to inequality {index}, but only {count} exist")]
    BadSubsetIndex { term: usize, index: usize, count: usize },
    #[error("cone term {0} has more than one inequality in a sum-of-squares refutation")]
    NotSoS(usize),
    #[error("cone term {0} has a negative weight")]
    NegativeWeight(usize),
    #[error("line {0}: negative scalar")]
    NegativeScalar(usize),
    #[error("line {0}: polynomial does not match its justification")]
    RuleMismatch(usize),
    #[error("the derivation does not end in -1")]
    NotRefutation,
    #[error("boolean axiom #{0} in a real-mode system")]
    BooleanAxiomInRealMode(usize),
    #[error("inequality systems need ring Z or Q, got {0}")]
    UnorderedRing(RingTag),
    #[error("variable name {0} clashes with placeholder names")]
    NameClash(String),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Ips(#[from] IpsError),
}

/// Where an inequality of a system came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    UserIneq,
    /// `f >= 0` for an equation `f = 0`.
    EqPos,
    /// `-f >= 0` for an equation `f = 0`.
    EqNeg,
    BoolX,
    Bool1mX,
    BoolSqPos,
    BoolSqNeg,
}

impl Provenance {
    pub fn is_boolean(self) -> bool {
        matches!(self, Provenance::BoolX | Provenance::Bool1mX | Provenance::BoolSqPos | Provenance::BoolSqNeg)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Provenance::UserIneq => "ineq",
            Provenance::EqPos => "eq+",
            Provenance::EqNeg => "eq-",
            Provenance::BoolX => "bool-x",
            Provenance::Bool1mX => "bool-1mx",
            Provenance::BoolSqPos => "bool-sq+",
            Provenance::BoolSqNeg => "bool-sq-",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Some(match s {
            "ineq" => Provenance::UserIneq,
            "eq+" => Provenance::EqPos,
            "eq-" => Provenance::EqNeg,
            "bool-x" => Provenance::BoolX,
            "bool-1mx" => Provenance::Bool1mX,
            "bool-sq+" => Provenance::BoolSqPos,
            "bool-sq-" => Provenance::BoolSqNeg,
            _ => return None,
        })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Inequalities `h_k >= 0`; placeholder `y_{k+1}` stands for `h_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalitySystem {
    ring: RingTag,
    var_names: Vec<String>,
    ineqs: Vec<Circuit>,
    provenance: Vec<Provenance>,
}

impl InequalitySystem {
    pub fn new(ring: RingTag, var_names: Vec<String>, ineqs: Vec<Circuit>, provenance: Vec<Provenance>) -> Result<Self, CpsError> {
        if !ring.is_ordered() {
            return Err(CpsError::UnorderedRing(ring));
        }
        if ineqs.len() != provenance.len() {
            return Err(CpsError::ArityMismatch(format!("{} inequalities, {} provenance tags", ineqs.len(), provenance.len())));
        }
        if let Some(n) = var_names.iter().find(|n| is_placeholder_name(n)) {
            return Err(CpsError::NameClash(n.clone()));
        }
        for h in &ineqs {
            if h.ring() != &ring {
                return Err(CpsError::Circuit(CircuitError::RingMismatch(ring, h.ring().clone())));
            }
            if h.outputs().len() != 1 {
                return Err(CpsError::OutputCount(h.outputs().len()));
            }
            if let Some(n) = h.var_names().iter().find(|n| !var_names.contains(n)) {
                return Err(CpsError::ArityMismatch(format!("inequality uses undeclared variable {n}")));
            }
        }
        Ok(InequalitySystem { ring, var_names, ineqs, provenance })
    }

    /// `f >= 0` and `-f >= 0` for every equation, then, when `boolean` is set,
    /// `x^2 - x >= 0`, `x - x^2 >= 0`, `x >= 0` and `1 - x >= 0` per variable.
    pub fn from_equations(ring: RingTag, var_names: Vec<String>, eqs: &[Circuit], boolean: bool) -> Result<Self, CpsError> {
        let mut ineqs = Vec::new();
        let mut prov = Vec::new();
        for f in eqs {
            let (p, n) = plus_minus(f)?;
            ineqs.extend([p, n]);
            prov.extend([Provenance::EqPos, Provenance::EqNeg]);
        }
        if boolean {
            for v in &var_names {
                for (c, t) in boolean_ineqs(&ring, v)? {
                    ineqs.push(c);
                    prov.push(t);
                }
            }
        }
        Self::new(ring, var_names, ineqs, prov)
    }

    pub fn ring(&self) -> &RingTag {
        &self.ring
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn ineqs(&self) -> &[Circuit] {
        &self.ineqs
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.ineqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ineqs.is_empty()
    }

    pub fn placeholder_names(&self) -> Vec<String> {
        (0..self.ineqs.len()).map(y_name).collect()
    }

    pub fn has_boolean_axioms(&self) -> bool {
        self.provenance.iter().any(|p| p.is_boolean())
    }

    /// Index of the first inequality with provenance `p` whose circuit is
    /// PIT-equal to `c`.
    pub fn find(&self, p: Provenance, c: &Circuit) -> Result<Option<usize>, CpsError> {
        for (k, h) in self.ineqs.iter().enumerate() {
            if self.provenance[k] == p && pit_equal(h, c, &PitPolicy::default())?.equal {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn with_ring(&self, ring: RingTag) -> Result<Self, CpsError> {
        let ineqs = self.ineqs.iter().map(|h| h.with_ring(ring.clone())).collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, self.var_names.clone(), ineqs, self.provenance.clone())
    }
}

/// `(f, -f)` as two circuits.
pub(crate) fn plus_minus(f: &Circuit) -> Result<(Circuit, Circuit), CpsError> {
    if f.outputs().len() != 1 {
        return Err(CpsError::OutputCount(f.outputs().len()));
    }
    let mut b = CircuitBuilder::with_vars(f.ring().clone(), f.var_names());
    let o = b.import(f)[0];
    let n = b.neg(o);
    Ok((f.clone(), b.finish_pruned(vec![n])?))
}

/// The four boolean inequalities of one variable, in the order
/// `x^2 - x`, `x - x^2`, `x`, `1 - x`.
pub fn boolean_ineqs(ring: &RingTag, v: &str) -> Result<Vec<(Circuit, Provenance)>, CpsError> {
    let mut b = CircuitBuilder::new(ring.clone());
    let x = b.var(v);
    let sq = b.square(x);
    let pos = b.sub(sq, x);
    let neg = b.sub(x, sq);
    let one = b.one();
    let omx = b.sub(one, x);
    let all = b.finish(vec![pos, neg, x, omx])?;
    let tags = [Provenance::BoolSqPos, Provenance::BoolSqNeg, Provenance::BoolX, Provenance::Bool1mX];
    Ok(all.outputs().iter().zip(tags).map(|(&o, t)| (all.restrict_outputs(&[o]), t)).collect())
}

/// A CPS proof: a circuit conic in the placeholders `y1..ym` that becomes
/// `target` when each `y_k` is replaced by the `k`-th inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpsProof {
    pub circuit: Circuit,
    pub system: InequalitySystem,
    pub target: Circuit,
    /// Real CPS: no boolean axioms may be used.
    pub real_mode: bool,
}

impl CpsProof {
    pub fn size(&self) -> usize {
        self.circuit.size()
    }

    /// The circuit with placeholders replaced by their inequalities.
    pub fn substituted(&self) -> Result<Circuit, CpsError> {
        let map: BTreeMap<String, Circuit> = self.system.placeholder_names().into_iter().zip(self.system.ineqs.iter().cloned()).collect();
        Ok(bind_by_name(&self.circuit, &map)?)
    }

    pub fn conic(&self) -> ConicVerdict {
        let names = self.system.placeholder_names();
        conic_check(&self.circuit, &names)
    }
}

/// Checks arity, the conic condition, and the identity with the target.
pub fn verify_cps(p: &CpsProof, policy: &PitPolicy) -> Result<PitVerdict, CpsError> {
    if p.circuit.outputs().len() != 1 {
        return Err(CpsError::OutputCount(p.circuit.outputs().len()));
    }
    if p.real_mode {
        if let Some(k) = p.system.provenance.iter().position(|t| t.is_boolean()) {
            return Err(CpsError::BooleanAxiomInRealMode(k));
        }
    }
    let ph = p.system.placeholder_names();
    for n in p.circuit.var_names() {
        if !p.system.var_names.contains(n) && !ph.contains(n) {
            return Err(CpsError::ArityMismatch(format!(
                "proof reads {n}, which is neither a variable nor one of {} placeholders",
                ph.len()
            )));
        }
    }
    let v = p.conic();
    if !v.conic {
        return Err(CpsError::ConicViolation(v));
    }
    Ok(pit_equal(&p.substituted()?, &p.target, policy)?)
}

pub(crate) fn constant(ring: &RingTag, s: Scalar) -> Circuit {
    let mut b = CircuitBuilder::new(ring.clone());
    let g = b.constant(s);
    b.finish(vec![g]).expect("valid constant circuit")
}

/// `sum_i 2^(i-1) x_i + m` with explicit constants.
pub fn bvp_axiom(ring: &RingTag, n: usize, m: &BigInt) -> Circuit {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut b = CircuitBuilder::with_vars(ring.clone(), &names);
    let mut terms = Vec::with_capacity(n + 1);
    let mut pow = BigInt::one();
    for i in 0..n {
        let x = b.var_at(i);
        let c = b.constant(Scalar::from_bigint(pow.clone()));
        terms.push(b.mul(c, x));
        pow *= 2;
    }
    terms.push(b.constant(Scalar::from_bigint(m.clone())));
    let s = b.sum(&terms);
    b.finish(vec![s]).expect("valid circuit")
}

/// The linear-size CPS refutation of `sum_i 2^(i-1) x_i + M = 0` over 0/1
/// values. Inequalities: `x_1..x_n >= 0`, then `-S >= 0`, `S >= 0` for the
/// axiom `S`, then `1 - x_i >= 0`, `x_i^2 - x_i >= 0`, `x_i - x_i^2 >= 0`.
/// The proof is `sum_i 2^(i-1) y_i + y_{n+1}`, divided by `M` when `M > 1`.
pub fn gen_bvp_cps(n: usize, m: &BigInt) -> Result<CpsProof, CpsError> {
    if n == 0 || m < &BigInt::one() {
        return Err(CpsError::ArityMismatch(format!("need n >= 1 and M >= 1, got n = {n}, M = {m}")));
    }
    let ring = if m.is_one() { RingTag::IntegerRing } else { RingTag::RationalField };
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let s = bvp_axiom(&ring, n, m);
    let (pos, neg) = plus_minus(&s)?;
    let mut ineqs = Vec::with_capacity(4 * n + 2);
    let mut prov = Vec::with_capacity(4 * n + 2);
    let per_var: Vec<Vec<(Circuit, Provenance)>> = names.iter().map(|v| boolean_ineqs(&ring, v)).collect::<Result<_, _>>()?;
    for bv in &per_var {
        ineqs.push(bv[2].0.clone());
        prov.push(Provenance::BoolX);
    }
    ineqs.extend([neg, pos]);
    prov.extend([Provenance::EqNeg, Provenance::EqPos]);
    for k in [3usize, 0, 1] {
        for bv in &per_var {
            ineqs.push(bv[k].0.clone());
            prov.push(bv[k].1);
        }
    }
    let system = InequalitySystem::new(ring.clone(), names, ineqs, prov)?;

    let mut b = CircuitBuilder::new(ring.clone());
    let one = b.one();
    let two = b.add(one, one);
    let mut acc = b.var(&y_name(n - 1));
    for i in (0..n - 1).rev() {
        let t = b.mul(acc, two);
        let yi = b.var(&y_name(i));
        acc = b.add(t, yi);
    }
    let yl = b.var(&y_name(n));
    let mut out: GateId = b.add(acc, yl);
    if !m.is_one() {
        let mg = int_gadget(&mut b, m);
        out = b.div_const(out, mg);
    }
    let circuit = b.finish(vec![out])?;
    let target = constant(&ring, Scalar::int(-1));
    Ok(CpsProof { circuit, system, target, real_mode: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::pit::expand;

    #[test]
    fn bvp_small() {
        let p = gen_bvp_cps(1, &BigInt::one()).unwrap();
        assert_eq!(p.circuit.var_names(), ["y1", "y2"]);
        assert!(verify_cps(&p, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn bvp_eight_expands_to_minus_one() {
        let p = gen_bvp_cps(8, &BigInt::one()).unwrap();
        assert!(verify_cps(&p, &PitPolicy::exact()).unwrap().equal);
        let e = expand(&p.substituted().unwrap()).unwrap();
        assert_eq!(e.outputs[0].format(&e.var_names), "-1");
    }

    #[test]
    fn bvp_scaled() {
        let p = gen_bvp_cps(4, &BigInt::from(3)).unwrap();
        assert_eq!(p.system.ring(), &RingTag::RationalField);
        assert!(verify_cps(&p, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn swapped_leaf_violates() {
        let p = gen_bvp_cps(3, &BigInt::one()).unwrap();
        let mut bad = p.clone();
        let mut m = BTreeMap::new();
        let x1 = parse("ring Z\ninput x1\noutput x1").unwrap();
        m.insert("y2".to_string(), x1);
        bad.circuit = bind_by_name(&p.circuit, &m).unwrap();
        assert!(matches!(verify_cps(&bad, &PitPolicy::exact()), Err(CpsError::ConicViolation(_))));
    }

    #[test]
    fn real_mode_square_times_placeholder() {
        let h = parse("ring Q\ninput x1\nm = const -1\no = add x1 m\noutput o").unwrap();
        let sys = InequalitySystem::new(RingTag::RationalField, vec!["x1".into()], vec![h], vec![Provenance::UserIneq]).unwrap();
        let p = CpsProof {
            circuit: parse("ring Q\ninput x1 y1\ns = mul x1 x1\np = mul s y1\noutput p").unwrap(),
            system: sys,
            target: parse("ring Q\ninput x1\ns = mul x1 x1\nm = const -1\no = add x1 m\np = mul s o\noutput p").unwrap(),
            real_mode: true,
        };
        assert!(verify_cps(&p, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn real_mode_rejects_boolean_axioms() {
        let mut p = gen_bvp_cps(2, &BigInt::one()).unwrap();
        p.real_mode = true;
        assert!(matches!(verify_cps(&p, &PitPolicy::exact()), Err(CpsError::BooleanAxiomInRealMode(0))));
    }

    #[test]
    fn unknown_placeholder() {
        let mut p = gen_bvp_cps(1, &BigInt::one()).unwrap();
        p.circuit = parse("ring Z\ninput y99\noutput y99").unwrap();
        assert!(matches!(verify_cps(&p, &PitPolicy::exact()), Err(CpsError::ArityMismatch(_))));
    }
}
