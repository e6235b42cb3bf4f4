//! Splitting a circuit into a difference of two conic circuits.

use super::TransformError;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::ring::{RingTag, Scalar};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// How variable leaves are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// `x = (x^2 + 1)/2 - (x - 1)^2/2`; needs ring Q.
    Real,
    /// `x = x - 0`, sound when variables range over nonnegative values.
    Boolean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub pos: Circuit,
    pub neg: Circuit,
    /// Both parts as outputs `[pos, neg]` of one circuit with shared nodes.
    pub combined: Circuit,
}

impl SplitResult {
    /// Size of the shared two-output circuit divided by the input size.
    pub fn size_ratio(&self, input: &Circuit) -> f64 {
        self.combined.size() as f64 / input.size().max(1) as f64
    }
}

/// Splits each gate `g` into `(g_P, g_N)` with `g = g_P - g_N`, where neither
/// part has a negative constant outside a square.
pub fn minus_normalize(c: &Circuit, mode: SplitMode) -> Result<SplitResult, TransformError> {
    match (c.ring(), mode) {
        (RingTag::RationalField, _) | (RingTag::IntegerRing, SplitMode::Boolean) => {}
        (r, _) => return Err(TransformError::RingUnsupported(r.clone())),
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

    let mut b = CircuitBuilder::with_vars(c.ring().clone(), c.var_names());
    let zero = b.zero();
    let mut parts: Vec<(GateId, GateId)> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let pn = match g {
            Gate::Var(i) => {
                let x = b.var_at(*i);
                match mode {
                    SplitMode::Boolean => (x, zero),
                    SplitMode::Real => {
                        let half = b.constant(Scalar::ratio(1, 2));
                        let one = b.one();
                        let m1 = b.minus_one();
                        let sq = b.square(x);
                        let sp = b.add(sq, one);
                        let p = b.mul(half, sp);
                        let xm = b.add(x, m1);
                        let sm = b.square(xm);
                        let n = b.mul(half, sm);
                        (p, n)
                    }
                }
            }
            Gate::Const(s) => {
                let r = s.as_rational().expect("rational constant");
                if r.is_negative() {
                    (zero, b.constant(Scalar::Rational(-r)))
                } else {
                    (b.constant(s.clone()), zero)
                }
            }
            Gate::Add(x, y) => {
                let ((xp, xn), (yp, yn)) = (parts[*x], parts[*y]);
                (b.add(xp, yp), b.add(xn, yn))
            }
            Gate::Mul(x, y) => {
                let ((xp, xn), (yp, yn)) = (parts[*x], parts[*y]);
                let pp = b.mul(xp, yp);
                let nn = b.mul(xn, yn);
                let pn = b.mul(xp, yn);
                let np = b.mul(xn, yp);
                (b.add(pp, nn), b.add(pn, np))
            }
            Gate::DivConst(x, d) => {
                let v: BigRational = dvals[d].as_rational().expect("rational divisor");
                debug_assert!(!v.is_zero());
                let k = b.constant(Scalar::Rational(v.abs().recip()));
                let (xp, xn) = parts[*x];
                let (p, n) = (b.mul(k, xp), b.mul(k, xn));
                if v.is_negative() {
                    (n, p)
                } else {
                    (p, n)
                }
            }
        };
        parts.push(pn);
    }
    let mut outs = Vec::new();
    for &o in c.outputs() {
        outs.push(parts[o].0);
        outs.push(parts[o].1);
    }
    let all = b.finish(outs)?;
    let pos_ids: Vec<GateId> = all.outputs().iter().step_by(2).copied().collect();
    let neg_ids: Vec<GateId> = all.outputs().iter().skip(1).step_by(2).copied().collect();
    let pos = all.restrict_outputs(&pos_ids);
    let neg = all.restrict_outputs(&neg_ids);
    Ok(SplitResult { pos, neg, combined: all.pruned() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::circuit::{evaluate, Assignment};
    use crate::proof_cps::conic::conic_check;

    fn value(c: &Circuit, xs: &[i64]) -> Scalar {
        evaluate(c, &Assignment::from_ints(xs)).unwrap()[0].clone()
    }

    #[test]
    fn variable_real_split() {
        let c = parse("ring Q\ninput x1\noutput x1").unwrap();
        let s = minus_normalize(&c, SplitMode::Real).unwrap();
        for x in -3..4 {
            assert_eq!(value(&s.pos, &[x]), Scalar::ratio(x * x + 1, 2));
            assert_eq!(value(&s.neg, &[x]), Scalar::ratio((x - 1) * (x - 1), 2));
        }
        assert!(conic_check::<&str>(&s.pos, &[]).conic);
        assert!(conic_check::<&str>(&s.neg, &[]).conic);
    }

    #[test]
    fn negative_constant() {
        let c = parse("ring Q\ng = const -5\noutput g").unwrap();
        let s = minus_normalize(&c, SplitMode::Real).unwrap();
        assert_eq!(value(&s.pos, &[]), Scalar::int(0));
        assert_eq!(value(&s.neg, &[]), Scalar::int(5));
    }

    #[test]
    fn boolean_product() {
        let c = parse("ring Z\ninput x1 x2\np = mul x1 x2\noutput p").unwrap();
        let s = minus_normalize(&c, SplitMode::Boolean).unwrap();
        assert_eq!(value(&s.pos, &[1, 1]), Scalar::int(1));
        assert_eq!(s.neg.gates(), &[Gate::Const(Scalar::int(0))]);
        assert!(conic_check(&s.pos, &["x1", "x2"]).conic);
    }

    #[test]
    fn real_mode_needs_rationals() {
        let c = parse("ring Z\ninput x\noutput x").unwrap();
        assert!(matches!(minus_normalize(&c, SplitMode::Real), Err(TransformError::RingUnsupported(_))));
    }

    #[test]
    fn negative_divisor_swaps() {
        let c = parse("ring Q\ninput x\nm = const -1\nt = const 2\nn = mul m t\nd = divc x n\noutput d").unwrap();
        let s = minus_normalize(&c, SplitMode::Real).unwrap();
        for x in -2..3 {
            let diff = value(&s.pos, &[x]).as_rational().unwrap() - value(&s.neg, &[x]).as_rational().unwrap();
            assert_eq!(diff, BigRational::new((-x).into(), 2.into()));
        }
        assert!(conic_check::<&str>(&s.pos, &[]).conic);
        assert!(conic_check::<&str>(&s.neg, &[]).conic);
    }
}
