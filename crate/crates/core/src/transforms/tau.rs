//! Constant-free circuits for specific integers.

use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::ring::RingTag;
use num_bigint::{BigInt, Sign};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauKind {
    /// The integer `m`, by its binary expansion.
    Int(BigInt),
    /// `2^n`.
    Pow2(u64),
    /// `m^(2^k)`.
    Pow { base: BigInt, k: u32 },
}

/// Builds `m` in `b` from the leaf `1` by Horner's rule over the bits of `|m|`;
/// negative values are multiplied by `-1`.
pub fn int_gadget(b: &mut CircuitBuilder, m: &BigInt) -> GateId {
    if m.is_zero() {
        return b.zero();
    }
    let (sign, mag) = (m.sign(), m.magnitude());
    let one = b.one();
    let mut acc = one;
    for i in (0..mag.bits() - 1).rev() {
        acc = b.add(acc, acc);
        if mag.bit(i) {
            acc = b.add(acc, one);
        }
    }
    if sign == Sign::Minus {
        b.neg(acc)
    } else {
        acc
    }
}

/// `2^n` as `1 + 1` followed by squarings (and doublings for the set bits of `n`
/// below its leading one).
pub fn pow2_gadget(b: &mut CircuitBuilder, n: u64) -> GateId {
    if n == 0 {
        return b.one();
    }
    let one = b.one();
    let two = b.add(one, one);
    let mut acc = two;
    for i in (0..63 - n.leading_zeros()).rev() {
        acc = b.square(acc);
        if (n >> i) & 1 == 1 {
            acc = b.add(acc, acc);
        }
    }
    acc
}

/// `base^(2^k)` by `k` squarings.
pub fn pow_gadget(b: &mut CircuitBuilder, base: GateId, k: u32) -> GateId {
    let mut acc = base;
    for _ in 0..k {
        acc = b.square(acc);
    }
    acc
}

/// A standalone constant-free, variable-free circuit over Z.
pub fn tau_gadget(kind: &TauKind) -> Circuit {
    let mut b = CircuitBuilder::new(RingTag::IntegerRing);
    let out = match kind {
        TauKind::Int(m) => int_gadget(&mut b, m),
        TauKind::Pow2(n) => pow2_gadget(&mut b, *n),
        TauKind::Pow { base, k } => {
            let g = int_gadget(&mut b, base);
            pow_gadget(&mut b, g, *k)
        }
    };
    b.finish(vec![out]).expect("gadget circuits are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{evaluate, Assignment};
    use crate::ring::Scalar;

    fn value(c: &Circuit) -> Scalar {
        evaluate(c, &Assignment::new(vec![])).unwrap()[0].clone()
    }

    #[test]
    fn five() {
        let c = tau_gadget(&TauKind::Int(5.into()));
        assert_eq!(value(&c), Scalar::int(5));
        assert!(c.size() <= 2 * 3 + 1);
        assert!(c.is_constant_free());
    }

    #[test]
    fn negative_and_small() {
        for m in [-7i64, -1, 0, 1, 2, 3] {
            assert_eq!(value(&tau_gadget(&TauKind::Int(m.into()))), Scalar::int(m));
        }
    }

    #[test]
    fn pow2_sixteen() {
        let c = tau_gadget(&TauKind::Pow2(16));
        assert_eq!(value(&c), Scalar::int(65536));
        assert_eq!(c.gates().iter().filter(|g| g.is_squaring()).count(), 4);
        assert_eq!(value(&tau_gadget(&TauKind::Pow2(5))), Scalar::int(32));
    }

    #[test]
    fn three_to_the_eighth() {
        let c = tau_gadget(&TauKind::Pow { base: 3.into(), k: 3 });
        assert_eq!(value(&c), Scalar::int(6561));
    }
}
