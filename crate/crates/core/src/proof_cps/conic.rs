//! Syntactic conic-circuit check.

use crate::circuit::{Circuit, Gate, GateId};
use crate::ring::Scalar;
use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

/// Result of [`conic_check`]. A rejection carries one offending leaf-to-output path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicVerdict {
    pub conic: bool,
    pub bad_path: Option<Vec<GateId>>,
}

impl fmt::Display for ConicVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bad_path {
            None => write!(f, "conic"),
            Some(p) => {
                let path: Vec<String> = p.iter().map(|g| format!("g{}", g + 1)).collect();
                write!(f, "not conic: unguarded path {}", path.join(" -> "))
            }
        }
    }
}

fn bad_const(s: &Scalar) -> bool {
    !matches!(s, Scalar::Rational(_)) || s.sign() == Some(Ordering::Less)
}

/// Accepts iff no negative constant and no unprotected variable reaches an
/// output along a path that avoids squaring gates.
pub fn conic_check_by(c: &Circuit, protected: impl Fn(usize) -> bool) -> ConicVerdict {
    let n = c.size();
    let mut parent: Vec<Option<GateId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &o in c.outputs() {
        if !seen[o] {
            seen[o] = true;
            queue.push_back(o);
        }
    }
    while let Some(g) = queue.pop_front() {
        let gate = c.gate(g);
        let bad = match gate {
            Gate::Var(i) => !protected(*i),
            Gate::Const(s) => bad_const(s),
            _ => false,
        };
        if bad {
            let mut path = vec![g];
            let mut cur = g;
            while let Some(p) = parent[cur] {
                path.push(p);
                cur = p;
            }
            return ConicVerdict { conic: false, bad_path: Some(path) };
        }
        if gate.is_squaring() {
            continue;
        }
        if let Some((a, b)) = gate.operands() {
            for op in [a, b] {
                if !seen[op] {
                    seen[op] = true;
                    parent[op] = Some(g);
                    queue.push_back(op);
                }
            }
        }
    }
    ConicVerdict { conic: true, bad_path: None }
}

/// [`conic_check_by`] with protected variables given by name.
pub fn conic_check<S: AsRef<str>>(c: &Circuit, protected: &[S]) -> ConicVerdict {
    let flags: Vec<bool> = c.var_names().iter().map(|n| protected.iter().any(|p| p.as_ref() == n)).collect();
    conic_check_by(c, |i| flags[i])
}
