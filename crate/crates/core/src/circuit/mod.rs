//! Algebraic circuits: fan-in-2 DAGs over a tagged coefficient ring.

pub mod builder;
pub mod eval;
pub mod subst;
pub mod text;

use crate::ring::{RatFuncs, Rationals, Ring, RingError, RingTag, Scalar};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::HashMap;
use thiserror::Error;

pub use builder::CircuitBuilder;
pub use eval::{evaluate, Assignment};
pub use subst::{substitute, substitute_by_name};

pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate {gate} refers to gate {operand}, which is not earlier in the list")]
    CycleOrForwardRef { gate: GateId, operand: GateId },
    #[error("gate {gate} divides by a subcircuit that depends on a variable")]
    DivByVariable { gate: GateId },
    #[error("gate {gate} divides by a subcircuit that computes zero")]
    DivByZeroConstant { gate: GateId },
    #[error("gate {gate}: division is not available over {ring}")]
    DivisionNotAllowed { gate: GateId, ring: RingTag },
    #[error("gate {gate}: constant {value} is not in {ring}")]
    ConstNotInRing { gate: GateId, value: String, ring: RingTag },
    #[error("gate {gate}: constant {value} is not allowed in a constant-free circuit")]
    ConstInConstantFree { gate: GateId, value: String },
    #[error("gate {gate} reads variable #{index}, but only {count} are declared")]
    UnknownVariable { gate: GateId, index: usize, count: usize },
    #[error("output refers to missing gate {0}")]
    BadOutput(GateId),
    #[error("duplicate variable name {0}")]
    DuplicateVariable(String),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: unknown gate reference {name}")]
    UnknownGateRef { line: usize, name: String },
    #[error("assignment has {got} values, circuit has {expected} variables")]
    AssignmentArity { expected: usize, got: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Var(usize),
    Const(Scalar),
    Add(GateId, GateId),
    Mul(GateId, GateId),
    DivConst(GateId, GateId),
}

impl Gate {
    pub fn operands(&self) -> Option<(GateId, GateId)> {
        match self {
            Gate::Var(_) | Gate::Const(_) => None,
            Gate::Add(a, b) | Gate::Mul(a, b) | Gate::DivConst(a, b) => Some((*a, *b)),
        }
    }

    pub fn is_squaring(&self) -> bool {
        matches!(self, Gate::Mul(a, b) if a == b)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Gate::Var(_) | Gate::Const(_))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub require_constant_free: bool,
}

/// An immutable, validated circuit. Gates are stored in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    ring: RingTag,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
    var_names: Vec<String>,
    constant_free: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    pub size: usize,
    pub depth: usize,
    pub syntactic_degree: BigUint,
    pub multiplicative_depth: usize,
}

impl Circuit {
    pub fn build(
        ring: RingTag,
        gates: Vec<Gate>,
        outputs: Vec<GateId>,
        var_names: Vec<String>,
    ) -> Result<Circuit, CircuitError> {
        Self::build_with(ring, gates, outputs, var_names, BuildOptions::default())
    }

    pub fn build_with(
        ring: RingTag,
        gates: Vec<Gate>,
        outputs: Vec<GateId>,
        var_names: Vec<String>,
        opts: BuildOptions,
    ) -> Result<Circuit, CircuitError> {
        let mut seen = HashMap::new();
        for n in &var_names {
            if seen.insert(n.as_str(), ()).is_some() {
                return Err(CircuitError::DuplicateVariable(n.clone()));
            }
        }
        let mut has_var = Vec::with_capacity(gates.len());
        let mut constant_free = true;
        let mut divisions = Vec::new();
        for (id, g) in gates.iter().enumerate() {
            for op in gate_operands(g) {
                if op >= id {
                    return Err(CircuitError::CycleOrForwardRef { gate: id, operand: op });
                }
            }
            let hv = match g {
                Gate::Var(i) => {
                    if *i >= var_names.len() {
                        return Err(CircuitError::UnknownVariable {
                            gate: id,
                            index: *i,
                            count: var_names.len(),
                        });
                    }
                    true
                }
                Gate::Const(s) => {
                    if !ring.admits(s) {
                        return Err(CircuitError::ConstNotInRing {
                            gate: id,
                            value: s.to_string(),
                            ring: ring.clone(),
                        });
                    }
                    if !s.is_constant_free_leaf() {
                        if opts.require_constant_free {
                            return Err(CircuitError::ConstInConstantFree {
                                gate: id,
                                value: s.to_string(),
                            });
                        }
                        constant_free = false;
                    }
                    false
                }
                Gate::Add(a, b) | Gate::Mul(a, b) => has_var[*a] || has_var[*b],
                Gate::DivConst(a, b) => {
                    if !ring.allows_division() {
                        return Err(CircuitError::DivisionNotAllowed { gate: id, ring: ring.clone() });
                    }
                    if has_var[*b] {
                        return Err(CircuitError::DivByVariable { gate: id });
                    }
                    divisions.push((id, *b));
                    has_var[*a]
                }
            };
            has_var.push(hv);
        }
        for &o in &outputs {
            if o >= gates.len() {
                return Err(CircuitError::BadOutput(o));
            }
        }
        if !divisions.is_empty() {
            let dens: Vec<GateId> = divisions.iter().map(|&(_, b)| b).collect();
            let values = constant_values(&ring, &gates, &dens)?;
            for (gate, b) in divisions {
                if values[&b].is_zero() {
                    return Err(CircuitError::DivByZeroConstant { gate });
                }
            }
        }
        Ok(Circuit { ring, gates, outputs, var_names, constant_free })
    }

    pub fn ring(&self) -> &RingTag {
        &self.ring
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id]
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn output(&self) -> GateId {
        self.outputs[0]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|n| n == name)
    }

    pub fn is_constant_free(&self) -> bool {
        self.constant_free
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// True if any gate divides.
    pub fn has_division(&self) -> bool {
        self.gates.iter().any(|g| matches!(g, Gate::DivConst(..)))
    }

    /// Per-gate flag: does the gate depend on some variable?
    pub fn variable_dependence(&self) -> Vec<bool> {
        let mut hv = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Var(_) => true,
                Gate::Const(_) => false,
                Gate::Add(a, b) | Gate::Mul(a, b) => hv[*a] || hv[*b],
                Gate::DivConst(a, _) => hv[*a],
            };
            hv.push(v);
        }
        hv
    }

    /// Exact values of the given variable-free gates.
    pub fn constant_values(&self, ids: &[GateId]) -> Result<HashMap<GateId, Scalar>, RingError> {
        constant_values(&self.ring, &self.gates, ids)
    }

    pub fn constant_value(&self, id: GateId) -> Result<Scalar, RingError> {
        Ok(self.constant_values(&[id])?.remove(&id).unwrap())
    }

    /// Gates reachable from the outputs.
    pub fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.gates.len()];
        for &o in &self.outputs {
            mark[o] = true;
        }
        for id in (0..self.gates.len()).rev() {
            if mark[id] {
                for op in gate_operands(&self.gates[id]) {
                    mark[op] = true;
                }
            }
        }
        mark
    }

    /// Copy keeping only the gates reachable from the chosen outputs.
    pub fn restrict_outputs(&self, outputs: &[GateId]) -> Circuit {
        let mut c = self.clone();
        c.outputs = outputs.to_vec();
        c.pruned()
    }

    /// Copy keeping only gates reachable from the outputs; relative order is preserved.
    pub fn pruned(&self) -> Circuit {
        let mark = self.reachable();
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (id, g) in self.gates.iter().enumerate() {
            if !mark[id] {
                continue;
            }
            remap[id] = gates.len();
            gates.push(match g {
                Gate::Add(a, b) => Gate::Add(remap[*a], remap[*b]),
                Gate::Mul(a, b) => Gate::Mul(remap[*a], remap[*b]),
                Gate::DivConst(a, b) => Gate::DivConst(remap[*a], remap[*b]),
                leaf => leaf.clone(),
            });
        }
        let constant_free = gates
            .iter()
            .all(|g| !matches!(g, Gate::Const(s) if !s.is_constant_free_leaf()));
        Circuit {
            ring: self.ring.clone(),
            outputs: self.outputs.iter().map(|&o| remap[o]).collect(),
            gates,
            var_names: self.var_names.clone(),
            constant_free,
        }
    }

    /// Same gates over another ring tag; constants and divisions are revalidated.
    pub fn with_ring(&self, ring: RingTag) -> Result<Circuit, CircuitError> {
        Circuit::build(ring, self.gates.clone(), self.outputs.clone(), self.var_names.clone())
    }

    /// Same gates with the variable list replaced; indices must stay in range.
    pub fn with_var_names(&self, names: Vec<String>) -> Result<Circuit, CircuitError> {
        Circuit::build(self.ring.clone(), self.gates.clone(), self.outputs.clone(), names)
    }

    pub fn metrics(&self) -> Metrics {
        let n = self.gates.len();
        let mut depth = vec![0usize; n];
        let mut mdepth = vec![0usize; n];
        let mut deg: Vec<BigUint> = Vec::with_capacity(n);
        for (id, g) in self.gates.iter().enumerate() {
            let d = match g {
                Gate::Var(_) => BigUint::from(1u32),
                Gate::Const(_) => BigUint::zero(),
                Gate::Add(a, b) => {
                    depth[id] = 1 + depth[*a].max(depth[*b]);
                    mdepth[id] = mdepth[*a].max(mdepth[*b]);
                    deg[*a].clone().max(deg[*b].clone())
                }
                Gate::Mul(a, b) => {
                    depth[id] = 1 + depth[*a].max(depth[*b]);
                    mdepth[id] = 1 + mdepth[*a].max(mdepth[*b]);
                    &deg[*a] + &deg[*b]
                }
                Gate::DivConst(a, b) => {
                    depth[id] = 1 + depth[*a].max(depth[*b]);
                    mdepth[id] = mdepth[*a].max(mdepth[*b]);
                    deg[*a].clone()
                }
            };
            deg.push(d);
        }
        let outs = &self.outputs;
        Metrics {
            size: n,
            depth: outs.iter().map(|&o| depth[o]).max().unwrap_or(0),
            syntactic_degree: outs.iter().map(|&o| deg[o].clone()).max().unwrap_or_default(),
            multiplicative_depth: outs.iter().map(|&o| mdepth[o]).max().unwrap_or(0),
        }
    }

    /// Syntactic degree of every gate.
    pub fn gate_degrees(&self) -> Vec<BigUint> {
        let mut deg: Vec<BigUint> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let d = match g {
                Gate::Var(_) => BigUint::from(1u32),
                Gate::Const(_) => BigUint::zero(),
                Gate::Add(a, b) => deg[*a].clone().max(deg[*b].clone()),
                Gate::Mul(a, b) => &deg[*a] + &deg[*b],
                Gate::DivConst(a, _) => deg[*a].clone(),
            };
            deg.push(d);
        }
        deg
    }
}

pub(crate) fn gate_operands(g: &Gate) -> impl Iterator<Item = GateId> {
    g.operands().into_iter().flat_map(|(a, b)| [a, b])
}

fn constant_values(
    ring: &RingTag,
    gates: &[Gate],
    ids: &[GateId],
) -> Result<HashMap<GateId, Scalar>, RingError> {
    let top = match ids.iter().max() {
        Some(&t) => t,
        None => return Ok(HashMap::new()),
    };
    let mut need = vec![false; top + 1];
    for &i in ids {
        need[i] = true;
    }
    for id in (0..=top).rev() {
        if need[id] {
            for op in gate_operands(&gates[id]) {
                need[op] = true;
            }
        }
    }
    let mut vals: HashMap<GateId, Scalar> = HashMap::new();
    match ring {
        RingTag::RationalFunctionField => {
            let r = RatFuncs;
            let mut v = HashMap::new();
            for id in (0..=top).filter(|&i| need[i]) {
                let x = eval_const_gate(&r, &gates[id], &v)?;
                v.insert(id, x);
            }
            for &i in ids {
                vals.insert(i, Scalar::Function(v[&i].clone()).normalized());
            }
        }
        _ => {
            let r = Rationals;
            let mut v = HashMap::new();
            for id in (0..=top).filter(|&i| need[i]) {
                let x = eval_const_gate(&r, &gates[id], &v)?;
                v.insert(id, x);
            }
            for &i in ids {
                let mut x = v[&i].clone();
                if let RingTag::PrimeField(p) = ring {
                    let f = crate::ring::PrimeField::new(p.clone());
                    x = num_rational::BigRational::from_integer(f.embed_scalar(&Scalar::Rational(x))?);
                }
                vals.insert(i, Scalar::Rational(x));
            }
        }
    }
    Ok(vals)
}

fn eval_const_gate<R: Ring>(
    r: &R,
    g: &Gate,
    v: &HashMap<GateId, R::Elem>,
) -> Result<R::Elem, RingError> {
    Ok(match g {
        Gate::Var(_) => unreachable!("constant evaluation reached a variable"),
        Gate::Const(s) => r.embed_scalar(s)?,
        Gate::Add(a, b) => r.add(&v[a], &v[b]),
        Gate::Mul(a, b) => r.mul(&v[a], &v[b]),
        Gate::DivConst(a, b) => r.mul(&v[a], &r.inverse(&v[b])?),
    })
}
