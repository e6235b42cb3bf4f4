//! Ideal Proof System objects and their verification.

pub mod compose;
pub mod ns;

use crate::circuit::{substitute, Circuit, CircuitBuilder, CircuitError};
use crate::pit::{is_zero, pit_equal, PitError, PitPolicy, PitVerdict};
use crate::ring::{RingTag, Scalar};
use std::collections::BTreeMap;
use thiserror::Error;

pub use compose::{by_cases, case_system, compose, substitute_proof, ComposeMode};
pub use ns::{ns_search, ns_sweep, NsOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpsError {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("variable name {0} clashes with placeholder names")]
    NameClash(String),
    #[error("proofs are over different axiom systems")]
    SystemMismatch,
    #[error("no proof supplied for case {0:#b}")]
    MissingCase(u64),
    #[error("no booleanity axiom for case circuit #{0}")]
    MissingBooleanityAxiom(usize),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("expected single-output circuits")]
    OutputCount,
    #[error("certificate search exceeds the budget: {unknowns} unknowns")]
    BudgetExceeded { unknowns: usize },
    #[error("certificate search needs ring Z or Q, got {0}")]
    UnsupportedRing(RingTag),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// True for names of the form `y<digits>` or `z<digits>`.
pub fn is_placeholder_name(s: &str) -> bool {
    let mut ch = s.chars();
    matches!(ch.next(), Some('y' | 'z')) && s.len() > 1 && ch.all(|c| c.is_ascii_digit())
}

/// Placeholder for axiom `j` (0-based).
pub fn y_name(j: usize) -> String {
    format!("y{}", j + 1)
}

/// Placeholder for the boolean axiom of variable `i` (0-based).
pub fn z_name(i: usize) -> String {
    format!("z{}", i + 1)
}

/// Equations `f_j = 0`, optionally with `x_i^2 - x_i = 0` for every variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSystem {
    ring: RingTag,
    var_names: Vec<String>,
    axioms: Vec<Circuit>,
    include_boolean: bool,
}

impl AxiomSystem {
    pub fn new(ring: RingTag, var_names: Vec<String>, axioms: Vec<Circuit>, include_boolean: bool) -> Result<Self, IpsError> {
        for n in &var_names {
            if is_placeholder_name(n) {
                return Err(IpsError::NameClash(n.clone()));
            }
        }
        for a in &axioms {
            if a.ring() != &ring {
                return Err(IpsError::RingMismatch(ring, a.ring().clone()));
            }
            if a.outputs().len() != 1 {
                return Err(IpsError::OutputCount);
            }
            if let Some(n) = a.var_names().iter().find(|n| !var_names.contains(n)) {
                return Err(IpsError::ArityMismatch(format!("axiom uses undeclared variable {n}")));
            }
        }
        Ok(AxiomSystem { ring, var_names, axioms, include_boolean })
    }

    /// Variables are collected from the axioms in order of first appearance.
    pub fn from_axioms(ring: RingTag, axioms: Vec<Circuit>, include_boolean: bool) -> Result<Self, IpsError> {
        let mut names: Vec<String> = Vec::new();
        for a in &axioms {
            for n in a.var_names() {
                if !names.contains(n) {
                    names.push(n.clone());
                }
            }
        }
        Self::new(ring, names, axioms, include_boolean)
    }

    pub fn ring(&self) -> &RingTag {
        &self.ring
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn axioms(&self) -> &[Circuit] {
        &self.axioms
    }

    pub fn include_boolean(&self) -> bool {
        self.include_boolean
    }

    pub fn num_placeholders(&self) -> usize {
        self.axioms.len() + if self.include_boolean { self.var_names.len() } else { 0 }
    }

    /// `y1..ym`, then `z1..zn` when boolean axioms are included.
    pub fn placeholder_names(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..self.axioms.len()).map(y_name).collect();
        if self.include_boolean {
            v.extend((0..self.var_names.len()).map(z_name));
        }
        v
    }

    /// `x_i^2 - x_i`.
    pub fn boolean_axiom(&self, i: usize) -> Circuit {
        let mut b = CircuitBuilder::new(self.ring.clone());
        let x = b.var(&self.var_names[i]);
        let sq = b.square(x);
        let d = b.sub(sq, x);
        b.finish(vec![d]).expect("valid circuit")
    }

    /// The axioms followed by the boolean axioms, aligned with [`placeholder_names`](Self::placeholder_names).
    pub fn equations(&self) -> Vec<Circuit> {
        let mut v = self.axioms.clone();
        if self.include_boolean {
            v.extend((0..self.var_names.len()).map(|i| self.boolean_axiom(i)));
        }
        v
    }

    pub fn with_axioms(&self, extra: impl IntoIterator<Item = Circuit>) -> Result<Self, IpsError> {
        let mut axioms = self.axioms.clone();
        axioms.extend(extra);
        Self::new(self.ring.clone(), self.var_names.clone(), axioms, self.include_boolean)
    }

    /// The same system over another ring (Z embeds into Q).
    pub fn with_ring(&self, ring: RingTag) -> Result<Self, IpsError> {
        let axioms = self.axioms.iter().map(|a| a.with_ring(ring.clone())).collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, self.var_names.clone(), axioms, self.include_boolean)
    }

    pub(crate) fn placeholder_bindings(&self, zero: bool) -> BTreeMap<String, Circuit> {
        let names = self.placeholder_names();
        let eqs = if zero { Vec::new() } else { self.equations() };
        names
            .into_iter()
            .enumerate()
            .map(|(k, n)| (n, if zero { constant(&self.ring, Scalar::int(0)) } else { eqs[k].clone() }))
            .collect()
    }
}

pub(crate) fn constant(ring: &RingTag, s: Scalar) -> Circuit {
    let mut b = CircuitBuilder::new(ring.clone());
    let g = b.constant(s);
    b.finish(vec![g]).expect("valid constant circuit")
}

pub(crate) fn bind_by_name(c: &Circuit, bindings: &BTreeMap<String, Circuit>) -> Result<Circuit, CircuitError> {
    let map = c
        .var_names()
        .iter()
        .enumerate()
        .filter_map(|(i, n)| bindings.get(n).map(|b| (i, b.clone())))
        .collect();
    substitute(c, &map)
}

/// An IPS proof `C(x, y, z)` of `target` from `system`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpsProof {
    pub circuit: Circuit,
    pub system: AxiomSystem,
    pub target: Circuit,
}

impl IpsProof {
    pub fn size(&self) -> usize {
        self.circuit.size()
    }

    /// Checks that the circuit only reads system variables and placeholders.
    pub fn check_arity(&self) -> Result<(), IpsError> {
        if self.circuit.outputs().len() != 1 || self.target.outputs().len() != 1 {
            return Err(IpsError::OutputCount);
        }
        if self.circuit.ring() != self.system.ring() {
            return Err(IpsError::RingMismatch(self.system.ring().clone(), self.circuit.ring().clone()));
        }
        let ph = self.system.placeholder_names();
        for n in self.circuit.var_names() {
            if !self.system.var_names().contains(n) && !ph.contains(n) {
                return Err(IpsError::ArityMismatch(format!("proof reads {n}, which is neither a variable nor one of {} placeholders", ph.len())));
            }
        }
        Ok(())
    }

    /// The circuit with all placeholders set to zero.
    pub fn at_zero(&self) -> Result<Circuit, IpsError> {
        Ok(bind_by_name(&self.circuit, &self.system.placeholder_bindings(true))?)
    }

    /// The circuit with placeholders replaced by their axioms.
    pub fn at_axioms(&self) -> Result<Circuit, IpsError> {
        Ok(bind_by_name(&self.circuit, &self.system.placeholder_bindings(false))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpsVerdict {
    /// Condition `C(x, 0, 0) = 0`.
    pub vanishes: PitVerdict,
    /// Condition `C(x, F, x^2 - x) = target`.
    pub derives_target: PitVerdict,
    /// The target's value when it is a nonzero constant.
    pub refutes_with: Option<Scalar>,
}

impl IpsVerdict {
    pub fn accepted(&self) -> bool {
        self.vanishes.equal && self.derives_target.equal
    }
}

fn nonzero_constant(c: &Circuit) -> Option<Scalar> {
    if c.variable_dependence()[c.output()] {
        return None;
    }
    c.constant_value(c.output()).ok().filter(|s| !s.is_zero())
}

pub fn verify_ips(p: &IpsProof, policy: &PitPolicy) -> Result<IpsVerdict, IpsError> {
    p.check_arity()?;
    let vanishes = is_zero(&p.at_zero()?, policy)?;
    let derives_target = pit_equal(&p.at_axioms()?, &p.target, policy)?;
    Ok(IpsVerdict { vanishes, derives_target, refutes_with: nonzero_constant(&p.target) })
}

/// Cofactors `H_i` with `sum_i F_i * H_i = 1`, aligned with [`AxiomSystem::equations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpsLinCert {
    pub cofactors: Vec<Circuit>,
}

impl IpsLinCert {
    pub fn size(&self) -> usize {
        self.cofactors.iter().map(|c| c.size()).sum()
    }

    /// `sum_i F_i * H_i` as one circuit.
    pub fn combination(&self, system: &AxiomSystem) -> Result<Circuit, IpsError> {
        let eqs = system.equations();
        if eqs.len() != self.cofactors.len() {
            return Err(IpsError::ArityMismatch(format!("{} cofactors for {} equations", self.cofactors.len(), eqs.len())));
        }
        let mut b = CircuitBuilder::with_vars(system.ring().clone(), system.var_names());
        let mut terms = Vec::new();
        for (f, h) in eqs.iter().zip(&self.cofactors) {
            if h.ring() != system.ring() {
                return Err(IpsError::RingMismatch(system.ring().clone(), h.ring().clone()));
            }
            let fo = b.import(f)[0];
            let ho = b.import(h)[0];
            terms.push(b.mul(fo, ho));
        }
        let s = b.sum(&terms);
        Ok(b.finish(vec![s])?)
    }

    /// The IPS proof `sum_i y_i * H_i` of the target `1`.
    pub fn to_proof(&self, system: &AxiomSystem) -> Result<IpsProof, IpsError> {
        let names = system.placeholder_names();
        if names.len() != self.cofactors.len() {
            return Err(IpsError::ArityMismatch(format!("{} cofactors for {} equations", self.cofactors.len(), names.len())));
        }
        let mut b = CircuitBuilder::with_vars(system.ring().clone(), system.var_names());
        let mut terms = Vec::new();
        for (n, h) in names.iter().zip(&self.cofactors) {
            let y = b.var(n);
            let ho = b.import(h)[0];
            terms.push(b.mul(y, ho));
        }
        let s = b.sum(&terms);
        let circuit = b.finish(vec![s])?.pruned();
        Ok(IpsProof { circuit, system: system.clone(), target: constant(system.ring(), Scalar::int(1)) })
    }
}

/// Accepts iff `sum_i F_i * H_i - 1` is the zero polynomial. Over Q(y) the
/// check is always exact.
pub fn verify_ips_lin(cert: &IpsLinCert, system: &AxiomSystem, policy: &PitPolicy) -> Result<PitVerdict, IpsError> {
    let comb = cert.combination(system)?;
    let one = constant(system.ring(), Scalar::int(1));
    let policy = match (system.ring(), policy) {
        (RingTag::RationalFunctionField, PitPolicy::Randomized { .. }) => PitPolicy::exact(),
        _ => policy.clone(),
    };
    Ok(pit_equal(&comb, &one, &policy)?)
}
