//! Clearing denominators of constant-free circuits over Q.

use super::TransformError;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::ring::RingTag;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    /// Constant-free, division-free circuit over Z computing `m` times the input.
    pub lifted: Circuit,
    pub m: BigInt,
    /// Constant-free, variable-free circuit computing `m`.
    pub m_circuit: Circuit,
    /// Gates created in total, shared between `lifted` and `m_circuit`.
    pub combined_size: usize,
}

#[derive(Clone)]
struct Lifted {
    val: GateId,
    m: Option<(GateId, BigInt)>,
}

/// Replays the gate-by-gate construction: each gate `g` becomes a gate
/// computing `M_g * g` for an integer `M_g` that is itself built in the
/// circuit. Division-free parts are copied unchanged.
pub fn q_to_z_lift(c: &Circuit) -> Result<LiftResult, TransformError> {
    if !matches!(c.ring(), RingTag::IntegerRing | RingTag::RationalField) {
        return Err(TransformError::RingUnsupported(c.ring().clone()));
    }
    if !c.is_constant_free() {
        return Err(TransformError::NotConstantFree);
    }
    if c.outputs().len() != 1 {
        return Err(TransformError::OutputCount(c.outputs().len()));
    }
    let divisors: Vec<GateId> = c
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::DivConst(_, d) => Some(*d),
            _ => None,
        })
        .collect();
    let dvals = c.constant_values(&divisors)?;

    let mut b = CircuitBuilder::raw(RingTag::IntegerRing);
    for n in c.var_names() {
        b.declare_var(n);
    }
    let mut out: Vec<Lifted> = Vec::with_capacity(c.size());
    let combine = |b: &mut CircuitBuilder, x: &Option<(GateId, BigInt)>, y: &Option<(GateId, BigInt)>| match (x, y) {
        (None, m) | (m, None) => m.clone(),
        (Some((gx, vx)), Some((gy, vy))) => Some((b.mul(*gx, *gy), vx * vy)),
    };
    for g in c.gates() {
        let l = match g {
            Gate::Var(i) => Lifted { val: b.var_at(*i), m: None },
            Gate::Const(s) => Lifted { val: b.constant(s.clone()), m: None },
            Gate::Mul(j, k) => {
                let (lj, lk) = (out[*j].clone(), out[*k].clone());
                let val = b.mul(lj.val, lk.val);
                let m = combine(&mut b, &lj.m, &lk.m);
                Lifted { val, m }
            }
            Gate::Add(j, k) => {
                let (lj, lk) = (out[*j].clone(), out[*k].clone());
                let left = match &lk.m {
                    Some((mg, _)) => b.mul(lj.val, *mg),
                    None => lj.val,
                };
                let right = match &lj.m {
                    Some((mg, _)) => b.mul(lk.val, *mg),
                    None => lk.val,
                };
                let val = b.add(left, right);
                let m = combine(&mut b, &lj.m, &lk.m);
                Lifted { val, m }
            }
            Gate::DivConst(j, k) => {
                // g = g_j / g_k with lifted values M_j g_j and M_k g_k:
                // M_k (M_j g_j) = (M_j * M_k g_k) * g
                let (lj, lk) = (out[*j].clone(), out[*k].clone());
                let val = match &lk.m {
                    Some((mg, _)) => b.mul(lj.val, *mg),
                    None => lj.val,
                };
                let dk = dvals[k].as_rational().expect("rational divisor");
                let mk = lk.m.as_ref().map_or_else(BigInt::one, |(_, v)| v.clone());
                let lifted_divisor = dk * mk.clone();
                debug_assert!(lifted_divisor.is_integer());
                let ldv = lifted_divisor.to_integer();
                let m = match &lj.m {
                    Some((mg, mv)) => (b.mul(*mg, lk.val), mv * &ldv),
                    None => (lk.val, ldv),
                };
                Lifted { val, m: Some(m) }
            }
        };
        out.push(l);
    }
    let root = out[c.output()].clone();
    let combined_size = b.len();
    let (m, m_gate) = match &root.m {
        Some((g, v)) => (v.clone(), Some(*g)),
        None => (BigInt::one(), None),
    };
    debug_assert!(!m.is_zero());
    let all = b.finish(match m_gate {
        Some(g) => vec![root.val, g],
        None => vec![root.val],
    })?;
    let lifted = all.restrict_outputs(&[all.outputs()[0]]);
    let m_circuit = match m_gate {
        Some(_) => all.restrict_outputs(&[all.outputs()[1]]).with_var_names(Vec::new())?,
        None => {
            let mut ob = CircuitBuilder::new(RingTag::IntegerRing);
            let one = ob.one();
            ob.finish(vec![one])?
        }
    };
    Ok(LiftResult { lifted, m, m_circuit, combined_size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::circuit::{evaluate, Assignment};
    use crate::ring::Scalar;

    #[test]
    fn halving_lifts_to_identity() {
        let c = parse("ring Q\ninput x1\no = const 1\nt = add o o\nd = divc x1 t\noutput d").unwrap();
        let r = q_to_z_lift(&c).unwrap();
        assert_eq!(r.m, BigInt::from(2));
        assert_eq!(evaluate(&r.lifted, &Assignment::from_ints(&[7])).unwrap(), vec![Scalar::int(7)]);
        assert_eq!(evaluate(&r.m_circuit, &Assignment::new(vec![])).unwrap(), vec![Scalar::int(2)]);
    }

    #[test]
    fn two_fractions() {
        let c = parse(
            "ring Q\ninput x1 x2\no = const 1\nt = add o o\nh = add t o\na = divc x1 t\nb = divc x2 h\ns = add a b\noutput s",
        )
        .unwrap();
        let r = q_to_z_lift(&c).unwrap();
        assert_eq!(r.m, BigInt::from(6));
        for (u, v) in [(1, 0), (0, 1), (3, -5)] {
            let got = evaluate(&r.lifted, &Assignment::from_ints(&[u, v])).unwrap();
            assert_eq!(got, vec![Scalar::int(3 * u + 2 * v)]);
        }
        assert!(r.combined_size <= 4 * c.size());
    }

    #[test]
    fn division_free_is_copied() {
        let c = parse("ring Z\ninput x\nm = const -1\np = mul x m\nq = mul p p\noutput q").unwrap();
        let r = q_to_z_lift(&c).unwrap();
        assert_eq!(r.m, BigInt::one());
        assert_eq!(r.lifted.gates(), c.gates());
    }

    #[test]
    fn nested_division() {
        let c = parse("ring Q\ninput x\no = const 1\nt = add o o\nh = divc o t\nd = divc x h\nq = divc d t\noutput q").unwrap();
        let r = q_to_z_lift(&c).unwrap();
        let m = Scalar::from_bigint(r.m.clone());
        let lifted = evaluate(&r.lifted, &Assignment::from_ints(&[5])).unwrap()[0].clone();
        let orig = evaluate(&c, &Assignment::from_ints(&[5])).unwrap()[0].clone();
        assert_eq!(lifted.as_rational().unwrap(), m.as_rational().unwrap() * orig.as_rational().unwrap());
    }
}
