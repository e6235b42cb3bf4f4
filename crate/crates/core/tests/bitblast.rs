mod common;

use algproof::bitblast::{build_abs, build_add, build_bits, build_prd, literal_bits, value_of, BitVec, BitblastError};
use algproof::circuit::{evaluate, Assignment};
use algproof::ring::RingTag;
use common::{cube_values, names, random_circuit, rng, Shape};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Value of a variable-free bit vector, with each bit checked to be 0 or 1.
fn read(v: &BitVec) -> BigInt {
    let vals = evaluate(&v.circuit, &Assignment::new(vec![])).unwrap();
    let bits: Vec<bool> = vals
        .iter()
        .map(|s| {
            assert!(s.is_zero() || s.is_one(), "non-boolean bit {s}");
            s.is_one()
        })
        .collect();
    value_of(&bits)
}

/// Smallest two's-complement width (at least 2) holding `a`.
fn width(a: i64) -> usize {
    (2..64).find(|&t| -(1i64 << (t - 1)) <= a && a < (1i64 << (t - 1))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn literals_are_minimal(a in -5000i64..5000) {
        let bits = literal_bits(&a.into());
        prop_assert_eq!(bits.len(), width(a));
        prop_assert_eq!(value_of(&bits), BigInt::from(a));
    }

    #[test]
    fn adder(a in -3000i64..3000, b in -3000i64..3000) {
        let (x, y) = (BitVec::from_int(&a.into()), BitVec::from_int(&b.into()));
        let s = build_add(&x, &y);
        prop_assert_eq!(s.len(), x.len().max(y.len()) + 1);
        prop_assert_eq!(read(&s), BigInt::from(a + b));
    }

    #[test]
    fn absolute_value(a in -3000i64..3000) {
        let x = BitVec::from_int(&a.into());
        let v = build_abs(&x);
        prop_assert_eq!(v.len(), x.len() + 1);
        prop_assert_eq!(read(&v), BigInt::from(a.abs()));
    }

    #[test]
    fn multiplier(a in -300i64..300, b in -300i64..300) {
        let (x, y) = (BitVec::from_int(&a.into()), BitVec::from_int(&b.into()));
        let p = build_prd(&x, &y);
        prop_assert_eq!(p.len(), 2 * x.len().max(y.len()) + 3);
        prop_assert_eq!(read(&p), BigInt::from(a * b));
    }

    #[test]
    fn sign_extension_preserves_value(a in -100i64..100, extra in 0usize..4) {
        let bits = literal_bits(&a.into());
        let mut longer = bits.clone();
        longer.extend(std::iter::repeat_n(*bits.last().unwrap(), extra));
        prop_assert_eq!(value_of(&longer), BigInt::from(a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bits_are_boolean_and_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = Shape { consts: vec![1, -1, 3], ..Shape::new(RingTag::IntegerRing, 4, 6) };
        let f = random_circuit(&mut r, &s);
        let bb = match build_bits(&f, 64) {
            Ok(bb) => bb,
            Err(BitblastError::LengthBudgetExceeded { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let vars = names(4);
        let bits = cube_values(&bb.circuit, &vars).unwrap();
        prop_assert!(bits.iter().flatten().all(|&v| v == 0 || v == 1));
        let want = cube_values(&f, &vars).unwrap();
        for m in 0..16 {
            let col: Vec<bool> = bits.iter().map(|b| b[m] == 1).collect();
            prop_assert_eq!(value_of(&col), BigInt::from(want[0][m]));
        }
    }
}

#[test]
fn budget_is_enforced() {
    let c = algproof::circuit::text::parse("ring Z\ninput x1\ng1 = mul x1 x1\ng2 = mul g1 g1\ng3 = mul g2 g2\noutput g3\n").unwrap();
    assert!(matches!(build_bits(&c, 16), Err(BitblastError::LengthBudgetExceeded { length: 17, budget: 16, .. })));
    assert!(build_bits(&c, 64).is_ok());
}

#[test]
fn rational_circuits_are_refused() {
    let c = algproof::circuit::text::parse("ring Q\ninput x1\noutput x1\n").unwrap();
    assert!(matches!(build_bits(&c, 64), Err(BitblastError::RingUnsupported(_))));
}
