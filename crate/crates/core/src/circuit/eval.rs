//! Exact gate-by-gate evaluation.

use super::{Circuit, CircuitError, Gate};
use crate::ring::{Integers, PrimeField, RatFuncs, Rationals, Ring, RingError, RingTag, Scalar};
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Values for the variables of a circuit, by variable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(pub Vec<Scalar>);

impl Assignment {
    pub fn new(values: Vec<Scalar>) -> Self {
        Assignment(values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Assignment(values.iter().map(|&v| Scalar::int(v)).collect())
    }

    /// A 0/1 assignment.
    pub fn boolean(bits: &[bool]) -> Self {
        Assignment(bits.iter().map(|&b| Scalar::int(b as i64)).collect())
    }

    /// The 0/1 assignment whose variable `i` is bit `i` of `mask`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Assignment((0..n).map(|i| Scalar::int(((mask >> i) & 1) as i64)).collect())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_boolean(&self) -> bool {
        self.0.iter().all(|v| v.is_zero() || v.is_one())
    }
}

/// Values of every gate, in order.
pub fn eval_gates<R: Ring>(c: &Circuit, r: &R, inputs: &[R::Elem]) -> Result<Vec<R::Elem>, RingError> {
    let mut vals: Vec<R::Elem> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let v = match g {
            Gate::Var(i) => inputs[*i].clone(),
            Gate::Const(s) => r.embed_scalar(s)?,
            Gate::Add(a, b) => r.add(&vals[*a], &vals[*b]),
            Gate::Mul(a, b) => r.mul(&vals[*a], &vals[*b]),
            Gate::DivConst(a, b) => r.mul(&vals[*a], &r.inverse(&vals[*b])?),
        };
        vals.push(v);
    }
    Ok(vals)
}

/// Values of the outputs.
pub fn eval_in<R: Ring>(c: &Circuit, r: &R, inputs: &[R::Elem]) -> Result<Vec<R::Elem>, RingError> {
    let vals = eval_gates(c, r, inputs)?;
    Ok(c.outputs().iter().map(|&o| vals[o].clone()).collect())
}

/// Evaluates every output over the circuit's own ring.
pub fn evaluate(c: &Circuit, a: &Assignment) -> Result<Vec<Scalar>, CircuitError> {
    if a.0.len() != c.num_vars() {
        return Err(CircuitError::AssignmentArity { expected: c.num_vars(), got: a.0.len() });
    }
    Ok(match c.ring() {
        RingTag::IntegerRing => {
            let r = Integers;
            let inputs = a.0.iter().map(|s| r.embed_scalar(s)).collect::<Result<Vec<_>, _>>()?;
            eval_in(c, &r, &inputs)?.into_iter().map(Scalar::from_bigint).collect()
        }
        RingTag::RationalField => {
            let r = Rationals;
            let inputs = a.0.iter().map(|s| r.embed_scalar(s)).collect::<Result<Vec<_>, _>>()?;
            eval_in(c, &r, &inputs)?.into_iter().map(Scalar::Rational).collect()
        }
        RingTag::PrimeField(p) => {
            let r = PrimeField::new(p.clone());
            let inputs = a.0.iter().map(|s| r.embed_scalar(s)).collect::<Result<Vec<_>, _>>()?;
            eval_in(c, &r, &inputs)?.into_iter().map(Scalar::from_bigint).collect()
        }
        RingTag::RationalFunctionField => {
            let r = RatFuncs;
            let inputs: Vec<_> = a.0.iter().map(|s| s.to_ratfunc()).collect();
            eval_in(c, &r, &inputs)?.into_iter().map(|f| Scalar::Function(f).normalized()).collect()
        }
    })
}

/// Evaluates a division-free circuit with integer constants on many points at
/// once. `inputs[v]` holds the lane values of variable `v`. Returns `None` if
/// any intermediate value overflows `i128` or the circuit is unsupported.
pub fn eval_lanes_i128(c: &Circuit, inputs: &[Vec<i128>]) -> Option<Vec<Vec<i128>>> {
    let lanes = inputs.first().map_or(1, |v| v.len());
    let n = c.size();
    let mut last_use = vec![0usize; n];
    for (id, g) in c.gates().iter().enumerate() {
        if let Some((a, b)) = g.operands() {
            last_use[a] = id;
            last_use[b] = id;
        }
    }
    for &o in c.outputs() {
        last_use[o] = usize::MAX;
    }
    let mut vals: Vec<Option<Vec<i128>>> = vec![None; n];
    for (id, g) in c.gates().iter().enumerate() {
        let v = match g {
            Gate::Var(i) => inputs[*i].clone(),
            Gate::Const(s) => {
                let r: BigRational = s.as_rational()?;
                if !r.is_integer() {
                    return None;
                }
                vec![r.to_integer().to_i128()?; lanes]
            }
            Gate::Add(a, b) => {
                let (x, y) = (vals[*a].as_ref()?, vals[*b].as_ref()?);
                x.iter().zip(y).map(|(p, q)| p.checked_add(*q)).collect::<Option<Vec<_>>>()?
            }
            Gate::Mul(a, b) => {
                let (x, y) = (vals[*a].as_ref()?, vals[*b].as_ref()?);
                x.iter().zip(y).map(|(p, q)| p.checked_mul(*q)).collect::<Option<Vec<_>>>()?
            }
            Gate::DivConst(..) => return None,
        };
        vals[id] = Some(v);
        if let Some((a, b)) = g.operands() {
            if last_use[a] == id {
                vals[a] = None;
            }
            if last_use[b] == id {
                vals[b] = None;
            }
        }
    }
    c.outputs().iter().map(|&o| vals[o].clone()).collect()
}

/// Lane inputs enumerating all of `{0,1}^n`; lane `m` sets variable `i` to bit `i` of `m`.
pub fn boolean_cube_lanes(n: usize) -> Vec<Vec<i128>> {
    let count = 1usize << n;
    (0..n).map(|i| (0..count).map(|m| ((m >> i) & 1) as i128).collect()).collect()
}
