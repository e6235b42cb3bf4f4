#![allow(dead_code)]

use algproof::circuit::eval::{boolean_cube_lanes, eval_lanes_i128};
use algproof::circuit::{Circuit, CircuitBuilder, GateId};
use algproof::ring::RingTag;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Shape of a random circuit.
#[derive(Clone, Debug)]
pub struct Shape {
    pub ring: RingTag,
    pub vars: usize,
    pub ops: usize,
    /// Integer leaves available besides the variables.
    pub consts: Vec<i64>,
    /// Probability that an operation is a division by a small positive constant subcircuit.
    pub div: f64,
    /// Probability that a multiplication is a squaring.
    pub square: f64,
}

impl Shape {
    pub fn new(ring: RingTag, vars: usize, ops: usize) -> Self {
        Shape { ring, vars, ops, consts: vec![1, -1], div: 0.0, square: 0.1 }
    }
}

/// Builds a positive integer `k` as a sum of ones.
fn ones(b: &mut CircuitBuilder, k: u32) -> GateId {
    let one = b.one();
    let mut acc = one;
    for _ in 1..k {
        acc = b.add(acc, one);
    }
    acc
}

/// A random single-output circuit; the output is the last operation.
pub fn random_circuit(r: &mut impl Rng, s: &Shape) -> Circuit {
    let mut b = CircuitBuilder::with_vars(s.ring.clone(), &names(s.vars));
    let mut pool: Vec<GateId> = (0..s.vars).map(|i| b.var_at(i)).collect();
    for &c in &s.consts {
        pool.push(b.int(c));
    }
    let mut last = pool[r.gen_range(0..pool.len())];
    for _ in 0..s.ops {
        // Prefer recent gates so that depth grows.
        let pick = |r: &mut dyn rand::RngCore, pool: &[GateId]| {
            let n = pool.len();
            if r.gen_bool(0.5) {
                pool[n - 1 - r.gen_range(0..n.min(3))]
            } else {
                pool[r.gen_range(0..n)]
            }
        };
        let a = pick(r, &pool);
        let g = if s.div > 0.0 && r.gen_bool(s.div) {
            let d = ones(&mut b, r.gen_range(2..=3));
            b.div_const(a, d)
        } else if r.gen_bool(0.5) {
            let c = pick(r, &pool);
            b.add(a, c)
        } else if r.gen_bool(s.square) {
            b.mul(a, a)
        } else {
            let c = pick(r, &pool);
            b.mul(a, c)
        };
        pool.push(g);
        last = g;
    }
    b.finish_pruned(vec![last]).expect("valid circuit")
}

/// Values of every output on all of `{0,1}^n`, with variables matched to
/// `vars` by name. Variables missing from `vars` are an error.
pub fn cube_values(c: &Circuit, vars: &[String]) -> Option<Vec<Vec<i128>>> {
    let cube = boolean_cube_lanes(vars.len());
    let inputs: Vec<Vec<i128>> =
        c.var_names().iter().map(|n| cube[vars.iter().position(|v| v == n).expect("known variable")].clone()).collect();
    if inputs.is_empty() {
        let lanes = 1usize << vars.len();
        return eval_lanes_i128(c, &[]).map(|o| o.into_iter().map(|v| vec![v[0]; lanes]).collect());
    }
    eval_lanes_i128(c, &inputs)
}
