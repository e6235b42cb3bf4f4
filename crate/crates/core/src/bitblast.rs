//! Two's-complement bit-vector circuits for integer circuits.
//!
//! Every bit is an arithmetized boolean formula over the input variables:
//! `A and B = AB`, `A or B = 1 - (1-A)(1-B)`, `A xor B = A + B - 2AB`,
//! `not A = 1 - A`. Constant operands are folded away.

use crate::circuit::{Circuit, CircuitBuilder, CircuitError, Gate, GateId};
use crate::ring::{RingTag, Scalar};
use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

/// Default bound on syntactic lengths.
pub const DEFAULT_LENGTH_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitblastError {
    #[error("bit-blasting needs ring Z, got {0}")]
    RingUnsupported(RingTag),
    #[error("gate {gate} has syntactic length {length}, above the budget {budget}")]
    LengthBudgetExceeded { gate: GateId, length: usize, budget: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// A bit during construction: a known constant or a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
    Gate(GateId),
}

impl Bit {
    fn of(v: bool) -> Bit {
        if v {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

/// Bit-level operations over a shared builder.
pub struct Blaster {
    pub b: CircuitBuilder,
}

impl Blaster {
    pub fn new(b: CircuitBuilder) -> Self {
        Blaster { b }
    }

    pub fn gate(&mut self, x: Bit) -> GateId {
        match x {
            Bit::Zero => self.b.zero(),
            Bit::One => self.b.one(),
            Bit::Gate(g) => g,
        }
    }

    /// Reads constant 0/1 gates back as constant bits.
    pub fn bit_of(&self, g: GateId) -> Bit {
        match self.b.gate(g) {
            Gate::Const(s) if s.is_zero() => Bit::Zero,
            Gate::Const(s) if s.is_one() => Bit::One,
            _ => Bit::Gate(g),
        }
    }

    pub fn not(&mut self, x: Bit) -> Bit {
        match x {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
            Bit::Gate(g) => {
                let one = self.b.one();
                Bit::Gate(self.b.sub(one, g))
            }
        }
    }

    pub fn and(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::Zero, _) | (_, Bit::Zero) => Bit::Zero,
            (Bit::One, z) | (z, Bit::One) => z,
            (Bit::Gate(a), Bit::Gate(c)) => Bit::Gate(self.b.mul(a, c)),
        }
    }

    pub fn or(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::One, _) | (_, Bit::One) => Bit::One,
            (Bit::Zero, z) | (z, Bit::Zero) => z,
            (Bit::Gate(_), Bit::Gate(_)) => {
                let nx = self.not(x);
                let ny = self.not(y);
                let both = self.and(nx, ny);
                self.not(both)
            }
        }
    }

    pub fn xor(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::Zero, z) | (z, Bit::Zero) => z,
            (Bit::One, z) | (z, Bit::One) => self.not(z),
            (Bit::Gate(a), Bit::Gate(c)) => {
                let s = self.b.add(a, c);
                let p = self.b.mul(a, c);
                let pp = self.b.add(p, p);
                Bit::Gate(self.b.sub(s, pp))
            }
        }
    }

    /// Carries `CAR_0 = 0`, `CAR_{i+1} = (y_i and z_i) or ((y_i or z_i) and CAR_i)`.
    pub fn carries(&mut self, y: &[Bit], z: &[Bit]) -> Vec<Bit> {
        let mut car = Vec::with_capacity(y.len() + 1);
        car.push(Bit::Zero);
        for i in 0..y.len() {
            let g = self.and(y[i], z[i]);
            let p = self.or(y[i], z[i]);
            let c = self.and(p, car[i]);
            car.push(self.or(g, c));
        }
        car
    }

    /// The low `len` bits of the sum of the sign-extended operands.
    pub fn add_fixed(&mut self, y: &[Bit], z: &[Bit], len: usize) -> Vec<Bit> {
        let y = pad(y, len);
        let z = pad(z, len);
        let car = self.carries(&y, &z);
        (0..len)
            .map(|i| {
                let s = self.xor(y[i], z[i]);
                self.xor(s, car[i])
            })
            .collect()
    }

    /// Pads both operands to a common length `t` and adds with one extra bit.
    pub fn add(&mut self, y: &[Bit], z: &[Bit]) -> Vec<Bit> {
        let t = y.len().max(z.len());
        self.add_fixed(y, z, t + 1)
    }

    /// `ADD(x, m) xor m` on `t + 1` bits, where `m` repeats the sign bit.
    pub fn abs(&mut self, x: &[Bit]) -> Vec<Bit> {
        let len = x.len() + 1;
        let sign = *x.last().expect("nonempty bit vector");
        let m = vec![sign; len];
        let s = self.add_fixed(x, &m, len);
        s.into_iter().map(|b| self.xor(b, sign)).collect()
    }

    /// Product of two nonnegative vectors of equal length `l` (sign bits
    /// included) by sequential addition of the shifted partial products, on
    /// `2l` bits.
    pub fn prd_pos(&mut self, u: &[Bit], v: &[Bit]) -> Vec<Bit> {
        let len = 2 * u.len();
        let mut acc = vec![Bit::Zero; len];
        for (i, &vi) in v.iter().enumerate() {
            let mut part = vec![Bit::Zero; i];
            for &uj in u {
                part.push(self.and(uj, vi));
            }
            acc = self.add_fixed(&acc, &part, len);
        }
        acc
    }

    /// Signed product on `2t + 3` bits: the product of absolute values, xor
    /// with the sign mask, plus the sign.
    pub fn prd(&mut self, y: &[Bit], z: &[Bit]) -> Vec<Bit> {
        let t = y.len().max(z.len());
        let (y, z) = (pad(y, t), pad(z, t));
        let u = self.abs(&y);
        let v = self.abs(&z);
        let p = self.prd_pos(&u, &v);
        let len = 2 * t + 3;
        let s = self.xor(y[t - 1], z[t - 1]);
        let p = pad(&p, len);
        let w: Vec<Bit> = p.into_iter().map(|b| self.xor(b, s)).collect();
        self.add_fixed(&w, &[s, Bit::Zero], len)
    }
}

/// Sign extension to `len` bits.
pub fn pad(v: &[Bit], len: usize) -> Vec<Bit> {
    let mut out = v.to_vec();
    let s = *v.last().unwrap_or(&Bit::Zero);
    while out.len() < len {
        out.push(s);
    }
    out
}

/// Two's-complement bits of `a`, at least two of them.
pub fn literal_bits(a: &BigInt) -> Vec<bool> {
    let mut t = 2usize;
    loop {
        let half = BigInt::one() << (t - 1);
        if -&half <= *a && *a < half {
            break;
        }
        t += 1;
    }
    let m = if a.sign() == Sign::Minus { a + (BigInt::one() << t) } else { a.clone() };
    (0..t).map(|i| m.bit(i as u64)).collect()
}

/// A boolean formula over numbered variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Var(usize),
    Const(bool),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Xor(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn eval(&self, a: &[bool]) -> bool {
        match self {
            BoolExpr::Var(i) => a[*i],
            BoolExpr::Const(v) => *v,
            BoolExpr::Not(x) => !x.eval(a),
            BoolExpr::And(x, y) => x.eval(a) && y.eval(a),
            BoolExpr::Or(x, y) => x.eval(a) || y.eval(a),
            BoolExpr::Xor(x, y) => x.eval(a) ^ y.eval(a),
        }
    }
}

fn arith(bl: &mut Blaster, e: &BoolExpr) -> Bit {
    match e {
        BoolExpr::Var(i) => Bit::Gate(bl.b.var_at(*i)),
        BoolExpr::Const(v) => Bit::of(*v),
        BoolExpr::Not(x) => {
            let x = arith(bl, x);
            bl.not(x)
        }
        BoolExpr::And(x, y) => {
            let (x, y) = (arith(bl, x), arith(bl, y));
            bl.and(x, y)
        }
        BoolExpr::Or(x, y) => {
            let (x, y) = (arith(bl, x), arith(bl, y));
            bl.or(x, y)
        }
        BoolExpr::Xor(x, y) => {
            let (x, y) = (arith(bl, x), arith(bl, y));
            bl.xor(x, y)
        }
    }
}

/// The arithmetization of `e` as a constant-free circuit over Z.
pub fn arithmetize<S: AsRef<str>>(e: &BoolExpr, var_names: &[S]) -> Circuit {
    let mut bl = Blaster::new(CircuitBuilder::with_vars(RingTag::IntegerRing, var_names));
    let out = arith(&mut bl, e);
    let g = bl.gate(out);
    bl.b.finish_pruned(vec![g]).expect("valid circuit")
}

/// A bit vector as one circuit whose outputs are the bits, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    pub circuit: Circuit,
}

impl BitVec {
    pub fn len(&self) -> usize {
        self.circuit.outputs().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn constant(bits: &[bool]) -> BitVec {
        let mut b = CircuitBuilder::new(RingTag::IntegerRing);
        let outs = bits.iter().map(|&v| if v { b.one() } else { b.zero() }).collect();
        BitVec { circuit: b.finish(outs).expect("valid circuit") }
    }

    pub fn from_int(a: &BigInt) -> BitVec {
        Self::constant(&literal_bits(a))
    }

    /// Bit `i` as a single-output circuit.
    pub fn bit(&self, i: usize) -> Circuit {
        self.circuit.restrict_outputs(&[self.circuit.outputs()[i]])
    }

    pub fn sign_bit(&self) -> Circuit {
        self.bit(self.len() - 1)
    }
}

fn load(bl: &mut Blaster, v: &BitVec) -> Vec<Bit> {
    let ids = bl.b.import(&v.circuit);
    ids.into_iter().map(|g| bl.bit_of(g)).collect()
}

fn store(mut bl: Blaster, bits: &[Bit]) -> BitVec {
    let outs = bits.iter().map(|&x| bl.gate(x)).collect();
    BitVec { circuit: bl.b.finish_pruned(outs).expect("valid circuit") }
}

fn binary(a: &BitVec, c: &BitVec, f: impl Fn(&mut Blaster, &[Bit], &[Bit]) -> Vec<Bit>) -> BitVec {
    let mut bl = Blaster::new(CircuitBuilder::new(RingTag::IntegerRing));
    let x = load(&mut bl, a);
    let y = load(&mut bl, c);
    let r = f(&mut bl, &x, &y);
    store(bl, &r)
}

pub fn build_add(a: &BitVec, c: &BitVec) -> BitVec {
    binary(a, c, |bl, x, y| bl.add(x, y))
}

pub fn build_abs(a: &BitVec) -> BitVec {
    let mut bl = Blaster::new(CircuitBuilder::new(RingTag::IntegerRing));
    let x = load(&mut bl, a);
    let r = bl.abs(&x);
    store(bl, &r)
}

pub fn build_prd(a: &BitVec, c: &BitVec) -> BitVec {
    binary(a, c, |bl, x, y| bl.prd(x, y))
}

/// `sum_{i < k-1} 2^i w_i - 2^(k-1) w_{k-1}`, as a balanced sum.
pub fn build_val(v: &BitVec) -> Circuit {
    let mut b = CircuitBuilder::new(RingTag::IntegerRing);
    let ids = b.import(&v.circuit);
    let k = ids.len();
    let mut terms = Vec::with_capacity(k);
    for (i, &g) in ids.iter().enumerate() {
        let mut w = BigInt::one() << i;
        if i + 1 == k {
            w = -w;
        }
        let c = b.constant(Scalar::from_bigint(w));
        terms.push(b.mul(c, g));
    }
    let s = b.sum(&terms);
    b.finish_pruned(vec![s]).expect("valid circuit")
}

/// Bits of every output of a circuit together with per-gate syntactic lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlast {
    /// Bits of all outputs, each output least significant bit first, concatenated.
    pub circuit: Circuit,
    pub widths: Vec<usize>,
    pub lengths: Vec<usize>,
}

impl BitBlast {
    pub fn output_bits(&self, out: usize) -> BitVec {
        let start: usize = self.widths[..out].iter().sum();
        let ids = &self.circuit.outputs()[start..start + self.widths[out]];
        BitVec { circuit: self.circuit.restrict_outputs(ids) }
    }

    pub fn sign_bit(&self, out: usize) -> Circuit {
        self.output_bits(out).sign_bit()
    }

    /// Largest syntactic length over all gates.
    pub fn max_length(&self) -> usize {
        self.lengths.iter().copied().max().unwrap_or(0)
    }
}

/// Builds the bits of every gate of `f` bottom-up: a variable is `[x, 0]`, a
/// constant its literal bits, and sums and products go through the adder and
/// multiplier. Shorter operands are sign-extended.
pub fn build_bits(f: &Circuit, budget: usize) -> Result<BitBlast, BitblastError> {
    if f.ring() != &RingTag::IntegerRing {
        return Err(BitblastError::RingUnsupported(f.ring().clone()));
    }
    let mut bl = Blaster::new(CircuitBuilder::with_vars(RingTag::IntegerRing, f.var_names()));
    let live = f.reachable();
    let mut bits: Vec<Vec<Bit>> = Vec::with_capacity(f.size());
    let mut lengths = Vec::with_capacity(f.size());
    for (id, g) in f.gates().iter().enumerate() {
        if !live[id] {
            bits.push(Vec::new());
            lengths.push(0);
            continue;
        }
        let v = match g {
            Gate::Var(i) => vec![Bit::Gate(bl.b.var_at(*i)), Bit::Zero],
            Gate::Const(s) => {
                let a = s.as_rational().expect("integer constant").to_integer();
                literal_bits(&a).into_iter().map(Bit::of).collect()
            }
            Gate::Add(a, c) => {
                check(id, bits[*a].len().max(bits[*c].len()) + 1, budget)?;
                let (x, y) = (bits[*a].clone(), bits[*c].clone());
                bl.add(&x, &y)
            }
            Gate::Mul(a, c) => {
                check(id, 2 * bits[*a].len().max(bits[*c].len()) + 3, budget)?;
                let (x, y) = (bits[*a].clone(), bits[*c].clone());
                bl.prd(&x, &y)
            }
            Gate::DivConst(..) => unreachable!("division gates do not occur over Z"),
        };
        lengths.push(v.len());
        bits.push(v);
    }
    let mut outs = Vec::new();
    let mut widths = Vec::new();
    for &o in f.outputs() {
        widths.push(bits[o].len());
        for &x in &bits[o].clone() {
            outs.push(bl.gate(x));
        }
    }
    let circuit = bl.b.finish_pruned(outs)?;
    Ok(BitBlast { circuit, widths, lengths })
}

fn check(gate: GateId, length: usize, budget: usize) -> Result<(), BitblastError> {
    if length > budget {
        Err(BitblastError::LengthBudgetExceeded { gate, length, budget })
    } else {
        Ok(())
    }
}

/// The most significant bit of the first output of `f`.
pub fn sign_bit(f: &Circuit, budget: usize) -> Result<Circuit, BitblastError> {
    Ok(build_bits(f, budget)?.sign_bit(0))
}

/// `VAL(BITS(f))` for every output of `f`, as one circuit.
pub fn val_of_bits(bb: &BitBlast) -> Circuit {
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, bb.circuit.var_names());
    let mut outs = Vec::new();
    for o in 0..bb.widths.len() {
        let v = build_val(&bb.output_bits(o));
        outs.push(b.import(&v)[0]);
    }
    b.finish_pruned(outs).expect("valid circuit")
}

/// Value of an evaluated bit vector.
pub fn value_of(bits: &[bool]) -> BigInt {
    let mut v = BigInt::zero();
    for (i, &b) in bits.iter().enumerate() {
        if b {
            let w = BigInt::one() << i;
            if i + 1 == bits.len() {
                v -= w;
            } else {
                v += w;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;
    use crate::circuit::{evaluate, Assignment};

    fn eval_bits(v: &BitVec, a: &[i64]) -> Vec<bool> {
        let vals = evaluate(&v.circuit, &Assignment::from_ints(a)).unwrap();
        vals.iter()
            .map(|s| {
                assert!(s.is_zero() || s.is_one(), "bit value {s}");
                s.is_one()
            })
            .collect()
    }

    fn int(n: i64) -> BitVec {
        BitVec::from_int(&n.into())
    }

    #[test]
    fn gate_semantics() {
        let x = BoolExpr::Var(0);
        let y = BoolExpr::Var(1);
        let xor = arithmetize(&BoolExpr::Xor(Box::new(x.clone()), Box::new(y.clone())), &["x", "y"]);
        assert_eq!(evaluate(&xor, &Assignment::from_ints(&[1, 1])).unwrap()[0], Scalar::int(0));
        let and1 = arithmetize(&BoolExpr::And(Box::new(BoolExpr::Const(true)), Box::new(x.clone())), &["x"]);
        assert_eq!(and1.size(), 1);
        let or = arithmetize(&BoolExpr::Or(Box::new(x), Box::new(y)), &["x", "y"]);
        assert!(or.is_constant_free());
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let v = evaluate(&or, &Assignment::from_ints(&[a, b])).unwrap()[0].clone();
            assert_eq!(v, Scalar::int(a | b));
        }
    }

    #[test]
    fn literals() {
        assert_eq!(literal_bits(&(-1).into()), [true, true]);
        assert_eq!(literal_bits(&1.into()), [true, false]);
        assert_eq!(literal_bits(&0.into()), [false, false]);
        assert_eq!(literal_bits(&(-4).into()), [false, false, true]);
        assert_eq!(value_of(&[false, false, true]), BigInt::from(-4));
    }

    #[test]
    fn adder() {
        let s = build_add(&int(1), &int(1));
        assert_eq!(eval_bits(&s, &[]), [false, true, false]);
        let z = build_add(&int(-1), &int(1));
        assert_eq!(value_of(&eval_bits(&z, &[])), BigInt::zero());
    }

    #[test]
    fn abs_edge() {
        for t in 2..6u32 {
            let m = -(1i64 << (t - 1));
            let a = build_abs(&BitVec::constant(&literal_bits(&m.into())));
            let bits = eval_bits(&a, &[]);
            assert_eq!(value_of(&bits), BigInt::from(-m));
            assert!(!bits.last().unwrap());
        }
        assert_eq!(value_of(&eval_bits(&build_abs(&int(3)), &[])), BigInt::from(3));
    }

    #[test]
    fn four_bit_products() {
        for a in -8i64..8 {
            for b in -8i64..8 {
                let x = BitVec::constant(&pad_bool(&literal_bits(&a.into()), 4));
                let y = BitVec::constant(&pad_bool(&literal_bits(&b.into()), 4));
                let p = build_prd(&x, &y);
                assert_eq!(p.len(), 11);
                assert_eq!(value_of(&eval_bits(&p, &[])), BigInt::from(a * b), "{a}*{b}");
            }
        }
    }

    fn pad_bool(v: &[bool], len: usize) -> Vec<bool> {
        let mut out = v.to_vec();
        while out.len() < len {
            out.push(*v.last().unwrap());
        }
        out
    }

    #[test]
    fn variable_and_constant_bits() {
        let f = parse("ring Z\ninput x1\noutput x1").unwrap();
        let bb = build_bits(&f, DEFAULT_LENGTH_BUDGET).unwrap();
        assert_eq!(bb.widths, [2]);
        let s = sign_bit(&f, DEFAULT_LENGTH_BUDGET).unwrap();
        assert_eq!(s.gates(), &[Gate::Const(Scalar::int(0))]);
        let m = parse("ring Z\ng = const -1\noutput g").unwrap();
        let s = sign_bit(&m, DEFAULT_LENGTH_BUDGET).unwrap();
        assert_eq!(s.gates(), &[Gate::Const(Scalar::int(1))]);
    }

    #[test]
    fn val_of_bits_is_faithful() {
        let f = parse("ring Z\ninput x1 x2\np = mul x1 x2\no = const 1\nt = add o o\nh = add t o\ns = add p h\noutput s").unwrap();
        let bb = build_bits(&f, DEFAULT_LENGTH_BUDGET).unwrap();
        let v = val_of_bits(&bb);
        for a in 0..4i64 {
            let pt = [a & 1, a >> 1];
            assert_eq!(
                evaluate(&v, &Assignment::from_ints(&pt)).unwrap(),
                evaluate(&f, &Assignment::from_ints(&pt)).unwrap()
            );
        }
    }

    #[test]
    fn budget_exceeded() {
        let f = parse("ring Z\ninput x\na = mul x x\nb = mul a a\nc = mul b b\noutput c").unwrap();
        assert!(matches!(build_bits(&f, 16), Err(BitblastError::LengthBudgetExceeded { .. })));
    }
}
