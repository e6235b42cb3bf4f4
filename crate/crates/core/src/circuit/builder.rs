//! Incremental circuit construction with optional hash-consing.

use super::{Circuit, CircuitError, Gate, GateId};
use crate::ring::{RingTag, Scalar};
use std::collections::HashMap;

/// Builds circuits gate by gate.
///
/// The default mode shares structurally equal gates (commutative operands are
/// keyed in sorted order) and folds `0 + a`, `0 * a` and `1 * a` onto existing
/// gates. Raw mode appends every requested gate verbatim.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    ring: RingTag,
    gates: Vec<Gate>,
    var_names: Vec<String>,
    var_lookup: HashMap<String, usize>,
    dedup: Option<HashMap<Gate, GateId>>,
}

impl CircuitBuilder {
    pub fn new(ring: RingTag) -> Self {
        CircuitBuilder {
            ring,
            gates: Vec::new(),
            var_names: Vec::new(),
            var_lookup: HashMap::new(),
            dedup: Some(HashMap::new()),
        }
    }

    pub fn raw(ring: RingTag) -> Self {
        CircuitBuilder { dedup: None, ..Self::new(ring) }
    }

    pub fn with_vars<S: AsRef<str>>(ring: RingTag, names: &[S]) -> Self {
        let mut b = Self::new(ring);
        for n in names {
            b.declare_var(n.as_ref());
        }
        b
    }

    pub fn ring(&self) -> &RingTag {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// Registers a variable name without creating a gate; returns its index.
    pub fn declare_var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.var_lookup.get(name) {
            return i;
        }
        let i = self.var_names.len();
        self.var_names.push(name.to_string());
        self.var_lookup.insert(name.to_string(), i);
        i
    }

    pub fn var_index_of(&self, name: &str) -> Option<usize> {
        self.var_lookup.get(name).copied()
    }

    fn push(&mut self, g: Gate) -> GateId {
        if let Some(map) = &self.dedup {
            if let Some(&id) = map.get(&g) {
                return id;
            }
        }
        let id = self.gates.len();
        if let Some(map) = &mut self.dedup {
            map.insert(g.clone(), id);
        }
        self.gates.push(g);
        id
    }

    pub fn var(&mut self, name: &str) -> GateId {
        let i = self.declare_var(name);
        self.push(Gate::Var(i))
    }

    pub fn var_at(&mut self, index: usize) -> GateId {
        self.push(Gate::Var(index))
    }

    pub fn constant(&mut self, s: Scalar) -> GateId {
        self.push(Gate::Const(s.normalized()))
    }

    pub fn int(&mut self, n: i64) -> GateId {
        self.constant(Scalar::int(n))
    }

    pub fn zero(&mut self) -> GateId {
        self.int(0)
    }

    pub fn one(&mut self) -> GateId {
        self.int(1)
    }

    pub fn minus_one(&mut self) -> GateId {
        self.int(-1)
    }

    fn const_at(&self, id: GateId) -> Option<&Scalar> {
        match &self.gates[id] {
            Gate::Const(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_const_zero(&self, id: GateId) -> bool {
        self.const_at(id).is_some_and(|s| s.is_zero())
    }

    pub fn is_const_one(&self, id: GateId) -> bool {
        self.const_at(id).is_some_and(|s| s.is_one())
    }

    fn folding(&self) -> bool {
        self.dedup.is_some()
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        if self.folding() {
            if self.is_const_zero(a) {
                return b;
            }
            if self.is_const_zero(b) {
                return a;
            }
            return self.push(Gate::Add(a.min(b), a.max(b)));
        }
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        if self.folding() {
            if self.is_const_zero(a) || self.is_const_one(b) {
                return a;
            }
            if self.is_const_zero(b) || self.is_const_one(a) {
                return b;
            }
            return self.push(Gate::Mul(a.min(b), a.max(b)));
        }
        self.push(Gate::Mul(a, b))
    }

    pub fn square(&mut self, a: GateId) -> GateId {
        self.push(Gate::Mul(a, a))
    }

    pub fn div_const(&mut self, a: GateId, b: GateId) -> GateId {
        if self.folding() && (self.is_const_one(b) || self.is_const_zero(a)) {
            return a;
        }
        self.push(Gate::DivConst(a, b))
    }

    /// `-a`, as `(-1) * a`.
    pub fn neg(&mut self, a: GateId) -> GateId {
        if self.folding() && self.is_const_zero(a) {
            return a;
        }
        let m = self.minus_one();
        self.mul(m, a)
    }

    /// `a - b`, as `a + (-1) * b`.
    pub fn sub(&mut self, a: GateId, b: GateId) -> GateId {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    /// Balanced binary sum; the empty sum is a zero leaf.
    pub fn sum(&mut self, ids: &[GateId]) -> GateId {
        match ids.len() {
            0 => self.zero(),
            1 => ids[0],
            n => {
                let l = self.sum(&ids[..n / 2]);
                let r = self.sum(&ids[n / 2..]);
                self.add(l, r)
            }
        }
    }

    /// Balanced binary product; the empty product is a one leaf.
    pub fn product(&mut self, ids: &[GateId]) -> GateId {
        match ids.len() {
            0 => self.one(),
            1 => ids[0],
            n => {
                let l = self.product(&ids[..n / 2]);
                let r = self.product(&ids[n / 2..]);
                self.mul(l, r)
            }
        }
    }

    /// Copies `c` into this builder. Variable `i` of `c` maps to `var_map[i]`
    /// when given, and otherwise to this builder's variable of the same name.
    /// Returns the new id of every gate of `c`.
    pub fn graft(&mut self, c: &Circuit, var_map: &[Option<GateId>]) -> Vec<GateId> {
        let mut map = Vec::with_capacity(c.size());
        for g in c.gates() {
            let id = match g {
                Gate::Var(i) => match var_map.get(*i).copied().flatten() {
                    Some(id) => id,
                    None => self.var(&c.var_names()[*i]),
                },
                Gate::Const(s) => self.constant(s.clone()),
                Gate::Add(a, b) => self.add(map[*a], map[*b]),
                Gate::Mul(a, b) if a == b => self.square(map[*a]),
                Gate::Mul(a, b) => self.mul(map[*a], map[*b]),
                Gate::DivConst(a, b) => self.div_const(map[*a], map[*b]),
            };
            map.push(id);
        }
        map
    }

    /// Grafts `c` with variables matched by name and returns its output ids.
    pub fn import(&mut self, c: &Circuit) -> Vec<GateId> {
        let map = self.graft(c, &[]);
        c.outputs().iter().map(|&o| map[o]).collect()
    }

    pub fn finish(self, outputs: Vec<GateId>) -> Result<Circuit, CircuitError> {
        Circuit::build(self.ring, self.gates, outputs, self.var_names)
    }

    /// Like [`finish`](Self::finish), then drops gates unreachable from the outputs.
    pub fn finish_pruned(self, outputs: Vec<GateId>) -> Result<Circuit, CircuitError> {
        Ok(self.finish(outputs)?.pruned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::eval::evaluate;
    use crate::circuit::Assignment;

    #[test]
    fn hash_consing_shares_commuted_gates() {
        let mut b = CircuitBuilder::new(RingTag::IntegerRing);
        let x = b.var("x");
        let y = b.var("y");
        let s1 = b.add(x, y);
        let s2 = b.add(y, x);
        assert_eq!(s1, s2);
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn folding_reuses_existing_gates() {
        let mut b = CircuitBuilder::new(RingTag::IntegerRing);
        let x = b.var("x");
        let z = b.zero();
        let o = b.one();
        assert_eq!(b.add(x, z), x);
        assert_eq!(b.mul(x, o), x);
        assert_eq!(b.mul(z, x), z);
    }

    #[test]
    fn raw_mode_keeps_duplicates() {
        let mut b = CircuitBuilder::raw(RingTag::IntegerRing);
        let x = b.var("x");
        let z = b.zero();
        let s = b.add(x, z);
        assert_ne!(s, x);
        let x2 = b.var("x");
        assert_ne!(x, x2);
    }

    #[test]
    fn balanced_sum_evaluates() {
        let mut b = CircuitBuilder::new(RingTag::IntegerRing);
        let ids: Vec<_> = (1..=7).map(|i| b.int(i)).collect();
        let s = b.sum(&ids);
        let c = b.finish(vec![s]).unwrap();
        assert_eq!(evaluate(&c, &Assignment::new(vec![])).unwrap(), vec![Scalar::int(28)]);
        assert_eq!(c.metrics().depth, 3);
    }
}
