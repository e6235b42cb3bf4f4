mod common;

use algproof::circuit::text::{parse, serialize};
use algproof::circuit::{evaluate, substitute_by_name, Assignment, Circuit, Gate};
use algproof::ring::{RingTag, Scalar};
use common::{random_circuit, rng, Shape};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::collections::BTreeMap;

/// Direct recursive interpreter over Q, without memoization.
fn interp(c: &Circuit, g: usize, point: &BTreeMap<String, BigRational>) -> BigRational {
    match c.gate(g) {
        Gate::Var(i) => point[&c.var_names()[*i]].clone(),
        Gate::Const(s) => s.as_rational().expect("rational constant"),
        Gate::Add(a, b) => interp(c, *a, point) + interp(c, *b, point),
        Gate::Mul(a, b) => interp(c, *a, point) * interp(c, *b, point),
        Gate::DivConst(a, b) => interp(c, *a, point) / interp(c, *b, point),
    }
}

fn assignment(c: &Circuit, point: &BTreeMap<String, BigRational>) -> Assignment {
    Assignment::new(c.var_names().iter().map(|n| Scalar::Rational(point[n].clone())).collect())
}

fn point(vals: &[i64]) -> BTreeMap<String, BigRational> {
    common::names(vals.len()).into_iter().zip(vals.iter().map(|&v| BigRational::from_integer(v.into()))).collect()
}

fn shape(ring: RingTag, div: f64) -> Shape {
    Shape { consts: vec![1, -1, 2, -3], div, ..Shape::new(ring, 4, 10) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluate_matches_recursive_interpreter(seed in any::<u64>(), vals in prop::collection::vec(-6i64..6, 4)) {
        let c = random_circuit(&mut rng(seed), &shape(RingTag::RationalField, 0.15));
        let p = point(&vals);
        let got = evaluate(&c, &assignment(&c, &p)).unwrap();
        prop_assert_eq!(got[0].as_rational().unwrap(), interp(&c, c.output(), &p));
    }

    #[test]
    fn substitution_commutes_with_evaluation(seed in any::<u64>(), vals in prop::collection::vec(-5i64..5, 4)) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, &shape(RingTag::IntegerRing, 0.0));
        let bound: Vec<Circuit> = (0..4).map(|_| random_circuit(&mut r, &Shape::new(RingTag::IntegerRing, 4, 4))).collect();
        let names = common::names(4);
        let pairs: Vec<(&str, &Circuit)> = names.iter().map(|n| n.as_str()).zip(bound.iter()).collect();
        let s = substitute_by_name(&c, &pairs).unwrap();
        let p = point(&vals);
        let inner: BTreeMap<String, BigRational> =
            names.iter().zip(&bound).map(|(n, b)| (n.clone(), interp(b, b.output(), &p))).collect();
        let lhs = evaluate(&s, &assignment(&s, &p)).unwrap()[0].as_rational().unwrap();
        prop_assert_eq!(lhs, interp(&c, c.output(), &inner));
    }

    #[test]
    fn parse_inverts_serialize(seed in any::<u64>(), ring in 0..3u8) {
        let ring = match ring {
            0 => RingTag::IntegerRing,
            1 => RingTag::RationalField,
            _ => RingTag::prime_field(BigInt::from(101)).unwrap(),
        };
        let div = if ring == RingTag::RationalField { 0.15 } else { 0.0 };
        let c = random_circuit(&mut rng(seed), &shape(ring, div));
        let text = serialize(&c);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(serialize(&back), text);
    }

    #[test]
    fn constant_free_means_unit_leaves(seed in any::<u64>()) {
        let s = Shape { consts: vec![1, -1, 0, 2], ..Shape::new(RingTag::IntegerRing, 3, 8) };
        let c = random_circuit(&mut rng(seed), &s);
        let units = c.gates().iter().all(|g| match g {
            Gate::Const(s) => s.is_zero() || s.is_one() || s.is_minus_one(),
            _ => true,
        });
        prop_assert_eq!(c.is_constant_free(), units);
    }
}

#[test]
fn ratconst_round_trip() {
    let text = "ring Q(y)\ninput x1\ng1 = ratconst [1,2]/[0,1]\ng2 = mul g1 x1\ng3 = const y\ng4 = add g2 g3\noutput g4\n";
    let c = parse(text).unwrap();
    assert_eq!(parse(&serialize(&c)).unwrap(), c);
    assert!(!c.is_constant_free());
}
