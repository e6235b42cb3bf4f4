//! Variable substitution by grafting circuits.

use super::{Circuit, CircuitBuilder, CircuitError, GateId};
use std::collections::BTreeMap;

/// Replaces variable `i` of `c` by the (single-output) circuit `bindings[i]`.
///
/// Variables of the bound circuits are matched with those of `c` by name; new
/// names are appended after the original variables.
pub fn substitute(c: &Circuit, bindings: &BTreeMap<usize, Circuit>) -> Result<Circuit, CircuitError> {
    if bindings.is_empty() {
        return Ok(c.clone());
    }
    for b in bindings.values() {
        if b.ring() != c.ring() {
            return Err(CircuitError::RingMismatch(c.ring().clone(), b.ring().clone()));
        }
    }
    let mut b = CircuitBuilder::with_vars(c.ring().clone(), c.var_names());
    let mut var_map: Vec<Option<GateId>> = vec![None; c.num_vars()];
    for (&i, bc) in bindings {
        let out = b.import(bc);
        if i < var_map.len() {
            var_map[i] = Some(out[0]);
        }
    }
    let map = b.graft(c, &var_map);
    let outs = c.outputs().iter().map(|&o| map[o]).collect();
    b.finish(outs)
}

/// [`substitute`] keyed by variable name; unknown names are ignored.
pub fn substitute_by_name(c: &Circuit, bindings: &[(&str, &Circuit)]) -> Result<Circuit, CircuitError> {
    let mut map = BTreeMap::new();
    for (name, bc) in bindings {
        if let Some(i) = c.var_index(name) {
            map.insert(i, (*bc).clone());
        }
    }
    substitute(c, &map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{evaluate, Assignment};
    use crate::ring::{RingTag, Scalar};

    fn x_plus_one() -> Circuit {
        let mut b = CircuitBuilder::new(RingTag::RationalField);
        let x = b.var("x1");
        let o = b.one();
        let s = b.add(x, o);
        b.finish(vec![s]).unwrap()
    }

    #[test]
    fn one_minus_x_into_x_plus_one() {
        let mut b = CircuitBuilder::new(RingTag::RationalField);
        let o = b.one();
        let x = b.var("x1");
        let d = b.sub(o, x);
        let bind = b.finish(vec![d]).unwrap();
        let s = substitute_by_name(&x_plus_one(), &[("x1", &bind)]).unwrap();
        for v in -3..4 {
            assert_eq!(evaluate(&s, &Assignment::from_ints(&[v])).unwrap(), vec![Scalar::int(2 - v)]);
        }
    }

    #[test]
    fn empty_bindings_are_identity() {
        let c = x_plus_one();
        assert_eq!(substitute(&c, &BTreeMap::new()).unwrap(), c);
    }

    #[test]
    fn ring_mismatch_detected() {
        let mut b = CircuitBuilder::new(RingTag::IntegerRing);
        let x = b.var("x1");
        let bind = b.finish(vec![x]).unwrap();
        let e = substitute_by_name(&x_plus_one(), &[("x1", &bind)]).unwrap_err();
        assert!(matches!(e, CircuitError::RingMismatch(..)));
    }

    #[test]
    fn new_variables_are_appended() {
        let mut b = CircuitBuilder::new(RingTag::RationalField);
        let u = b.var("u");
        let w = b.var("w");
        let p = b.mul(u, w);
        let bind = b.finish(vec![p]).unwrap();
        let s = substitute_by_name(&x_plus_one(), &[("x1", &bind)]).unwrap();
        assert_eq!(s.var_names(), &["x1", "u", "w"]);
    }
}
