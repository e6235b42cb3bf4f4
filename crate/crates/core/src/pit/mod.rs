//! Polynomial identity testing: exact expansion and randomized evaluation.

pub mod expand;
pub mod poly;
pub mod random;

use crate::circuit::{Circuit, CircuitBuilder, CircuitError, GateId};
use crate::ring::{RingError, RingTag, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub use expand::{expand, expand_rational, expand_with_budget, Expanded, Expansion, DEFAULT_TERM_BUDGET};
pub use poly::{parse_poly, Coeff, Monomial, Poly, SparsePoly};
pub use random::check_witness;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PitError {
    #[error("expansion exceeded the budget: {terms} monomials (budget {budget})")]
    BudgetExceeded { terms: usize, budget: usize },
    #[error("degree bound {degree} is not below the field size {field}")]
    DegreeBoundOverflow { degree: String, field: String },
    #[error("randomized testing is not available over {0}")]
    RandomizedUnsupported(RingTag),
    #[error("circuits have {0} and {1} outputs")]
    OutputCountMismatch(usize, usize),
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// How identities are decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PitPolicy {
    /// Full expansion; fails with `BudgetExceeded` on large instances.
    Exact { budget: usize },
    /// Random evaluation. `trials: None` picks enough trials for a 2^-64 bound.
    Randomized { trials: Option<u32>, seed: u64, prime_bits: u32 },
    /// Exact when within budget, randomized otherwise (where the ring allows it).
    Auto { budget: usize, seed: u64 },
}

impl Default for PitPolicy {
    fn default() -> Self {
        PitPolicy::Auto { budget: DEFAULT_TERM_BUDGET, seed: 0 }
    }
}

impl PitPolicy {
    pub fn exact() -> Self {
        PitPolicy::Exact { budget: DEFAULT_TERM_BUDGET }
    }

    pub fn randomized(seed: u64) -> Self {
        PitPolicy::Randomized { trials: None, seed, prime_bits: random::DEFAULT_PRIME_BITS }
    }

    pub fn randomized_trials(trials: u32, seed: u64) -> Self {
        PitPolicy::Randomized { trials: Some(trials), seed, prime_bits: random::DEFAULT_PRIME_BITS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PitMode {
    Exact,
    /// `field_size` is the modulus used (the smallest one, when several primes were drawn).
    Randomized { trials: u32, field_size: BigInt, error_bound: BigRational },
}

/// A point where two circuits differ modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub output: usize,
    pub modulus: BigInt,
    pub point: Vec<(String, BigInt)>,
    pub left: BigInt,
    pub right: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitVerdict {
    pub equal: bool,
    pub mode: PitMode,
    pub witness: Option<Witness>,
}

impl PitVerdict {
    pub fn error_bound(&self) -> BigRational {
        match &self.mode {
            PitMode::Exact => BigRational::from_integer(0.into()),
            PitMode::Randomized { error_bound, .. } => error_bound.clone(),
        }
    }

    /// Combines verdicts for a conjunction of identities.
    pub fn and(self, other: PitVerdict) -> PitVerdict {
        if !self.equal {
            return self;
        }
        if !other.equal {
            return other;
        }
        let mode = match (self.mode, other.mode) {
            (PitMode::Exact, m) | (m, PitMode::Exact) => m,
            (
                PitMode::Randomized { trials: t1, field_size: f1, error_bound: e1 },
                PitMode::Randomized { trials: t2, field_size: f2, error_bound: e2 },
            ) => PitMode::Randomized { trials: t1.max(t2), field_size: f1.min(f2), error_bound: e1 + e2 },
        };
        PitVerdict { equal: true, mode, witness: None }
    }
}

impl fmt::Display for PitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.equal { "equal" } else { "unequal" };
        match &self.mode {
            PitMode::Exact => write!(f, "{word} (exact)"),
            PitMode::Randomized { trials, field_size, error_bound } => {
                write!(f, "{word} (randomized: {trials} trials, field {field_size}, error <= {error_bound})")
            }
        }
    }
}

fn align<'a>(a: &'a Circuit, b: &'a Circuit) -> random::Aligned<'a> {
    let mut names: Vec<String> = a.var_names().to_vec();
    let mut index: HashMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    for n in b.var_names() {
        if !index.contains_key(n) {
            index.insert(n.clone(), names.len());
            names.push(n.clone());
        }
    }
    let map_a = a.var_names().iter().map(|n| index[n]).collect();
    let map_b = b.var_names().iter().map(|n| index[n]).collect();
    random::Aligned { a, b, names, map_a, map_b }
}

fn exact(al: &random::Aligned<'_>, budget: usize) -> Result<PitVerdict, PitError> {
    let to_u32 = |m: &[usize]| m.iter().map(|&i| i as u32).collect::<Vec<_>>();
    let ea = expand::expand_mapped(al.a, budget, &to_u32(&al.map_a))?;
    let eb = expand::expand_mapped(al.b, budget, &to_u32(&al.map_b))?;
    Ok(PitVerdict { equal: ea == eb, mode: PitMode::Exact, witness: None })
}

fn randomized(al: &random::Aligned<'_>, trials: Option<u32>, seed: u64, bits: u32) -> Result<PitVerdict, PitError> {
    match al.a.ring() {
        RingTag::IntegerRing | RingTag::RationalField => random::randomized_rational(al, trials, seed, bits),
        RingTag::PrimeField(q) => random::randomized_prime_field(al, q, trials, seed),
        r @ RingTag::RationalFunctionField => Err(PitError::RandomizedUnsupported(r.clone())),
    }
}

/// Decides whether corresponding outputs of `a` and `b` compute the same
/// polynomial. Variables are matched by name.
pub fn pit_equal(a: &Circuit, b: &Circuit, policy: &PitPolicy) -> Result<PitVerdict, PitError> {
    if a.ring() != b.ring() {
        return Err(PitError::RingMismatch(a.ring().clone(), b.ring().clone()));
    }
    if a.outputs().len() != b.outputs().len() {
        return Err(PitError::OutputCountMismatch(a.outputs().len(), b.outputs().len()));
    }
    let al = align(a, b);
    match policy {
        PitPolicy::Exact { budget } => exact(&al, *budget),
        PitPolicy::Randomized { trials, seed, prime_bits } => randomized(&al, *trials, *seed, *prime_bits),
        PitPolicy::Auto { budget, seed } => match exact(&al, *budget) {
            Err(PitError::BudgetExceeded { .. }) if !matches!(a.ring(), RingTag::RationalFunctionField) => {
                randomized(&al, None, *seed, random::DEFAULT_PRIME_BITS)
            }
            r => r,
        },
    }
}

/// A circuit over `ring` with `outputs` zero outputs and no variables.
pub fn zero_circuit(ring: &RingTag, outputs: usize) -> Circuit {
    let mut b = CircuitBuilder::new(ring.clone());
    let z = b.zero();
    b.finish(vec![z; outputs]).expect("zero circuit is valid")
}

/// Decides whether every output of `c` is the zero polynomial.
pub fn is_zero(c: &Circuit, policy: &PitPolicy) -> Result<PitVerdict, PitError> {
    pit_equal(c, &zero_circuit(c.ring(), c.outputs().len()), policy)
}

/// Adds `p` to `b` as a balanced sum of monomials; `vars[v]` is the gate of
/// variable `v`. Powers are built by repeated squaring.
pub fn poly_into(b: &mut CircuitBuilder, p: &Poly, vars: &[GateId]) -> GateId {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        for &(v, e) in m.pairs() {
            factors.push(power(b, vars[v as usize], e));
        }
        let mono = b.product(&factors);
        let t = if c.is_one() {
            mono
        } else {
            let k = b.constant(Scalar::Rational(c.clone()));
            b.mul(k, mono)
        };
        terms.push(t);
    }
    b.sum(&terms)
}

fn power(b: &mut CircuitBuilder, x: GateId, e: u32) -> GateId {
    if e == 1 {
        return x;
    }
    let half = power(b, x, e / 2);
    let sq = b.square(half);
    if e % 2 == 1 {
        b.mul(sq, x)
    } else {
        sq
    }
}

/// `p` as a single-output circuit over `ring` with variables `names`.
pub fn poly_circuit(p: &Poly, ring: &RingTag, names: &[String]) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::with_vars(ring.clone(), names);
    let vars: Vec<GateId> = (0..names.len()).map(|i| b.var_at(i)).collect();
    let out = poly_into(&mut b, p, &vars);
    b.finish_pruned(vec![out])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;

    fn c(text: &str) -> Circuit {
        parse(text).unwrap()
    }

    #[test]
    fn binomial_identity_exact() {
        let a = c("ring Z\ninput x\no = const 1\ns = add x o\nm = mul s s\noutput m");
        let b = c("ring Z\ninput x\no = const 1\nt = const 2\nsq = mul x x\ntx = mul t x\ns = add sq tx\nr = add s o\noutput r");
        let v = pit_equal(&a, &b, &PitPolicy::exact()).unwrap();
        assert!(v.equal);
        assert_eq!(v.mode, PitMode::Exact);
        assert!(pit_equal(&a, &b, &PitPolicy::randomized(1)).unwrap().equal);
    }

    #[test]
    fn cube_vs_square_randomized() {
        let a = c("ring Z\ninput x\ns = mul x x\nq = mul s x\noutput q");
        let b = c("ring Z\ninput x\ns = mul x x\noutput s");
        let v = pit_equal(&a, &b, &PitPolicy::randomized_trials(20, 7)).unwrap();
        assert!(!v.equal);
        let w = v.witness.unwrap();
        assert!(check_witness(&a, &b, &w));
    }

    #[test]
    fn is_zero_examples() {
        let z = c("ring Z\ninput x1\no = const 1\nm = const -1\nn = mul m x1\nd = add o n\np = mul x1 d\nz = const 0\nq = mul p z\noutput q");
        assert!(is_zero(&z, &PitPolicy::exact()).unwrap().equal);
        let nz = c("ring Z\ninput x1\nm = const -1\nsq = mul x1 x1\nn = mul m x1\nr = add sq n\noutput r");
        assert!(!is_zero(&nz, &PitPolicy::exact()).unwrap().equal);
        assert!(!is_zero(&nz, &PitPolicy::randomized(3)).unwrap().equal);
    }

    #[test]
    fn variables_align_by_name() {
        let a = c("ring Q\ninput u v\ns = add u v\noutput s");
        let b = c("ring Q\ninput v u\ns = add v u\noutput s");
        assert!(pit_equal(&a, &b, &PitPolicy::exact()).unwrap().equal);
        let e = c("ring Q\ninput w\noutput w");
        assert!(!pit_equal(&a, &e, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn rational_division_randomized() {
        let a = c("ring Q\ninput x\nt = const 3\nd = divc x t\ns = add d d\nr = add s d\noutput r");
        let b = c("ring Q\ninput x\noutput x");
        let v = pit_equal(&a, &b, &PitPolicy::randomized(11)).unwrap();
        assert!(v.equal);
        assert!(v.error_bound() <= BigRational::new(1.into(), BigInt::from(1) << 64));
    }

    #[test]
    fn ratfunc_refuses_randomized() {
        let a = c("ring Q(y)\ninput x\ny = const y\nm = mul y x\noutput m");
        let e = pit_equal(&a, &a, &PitPolicy::randomized(0)).unwrap_err();
        assert!(matches!(e, PitError::RandomizedUnsupported(_)));
        assert!(pit_equal(&a, &a, &PitPolicy::exact()).unwrap().equal);
    }

    #[test]
    fn gf_degree_overflow() {
        let a = c("ring GF 3\ninput x\ns = mul x x\nq = mul s s\noutput q");
        let b = c("ring GF 3\ninput x\noutput x");
        assert!(matches!(pit_equal(&a, &b, &PitPolicy::randomized(0)), Err(PitError::DegreeBoundOverflow { .. })));
        assert!(!pit_equal(&a, &b, &PitPolicy::exact()).unwrap().equal);
    }
}
