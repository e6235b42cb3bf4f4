//! Linear certificates over Q(y) for `y + sum a_i x_i = 0` with boolean axioms,
//! their specializations, and the integer-denominator bookkeeping behind the
//! root census.

use crate::circuit::{evaluate, Assignment, Circuit, CircuitBuilder, CircuitError, Gate, GateId};
use crate::pit::{expand_rational, pit_equal, PitError, PitPolicy, PitVerdict, DEFAULT_TERM_BUDGET};
use crate::proof_ips::{verify_ips_lin, AxiomSystem, IpsError, IpsLinCert};
use crate::ring::{RatFunc, RingTag, Scalar, UniPoly};
use crate::transforms::int_gadget;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Default bound on `sum a_i`.
pub const DEFAULT_COEFF_BUDGET: u64 = 1 << 12;

#[derive(Debug, Error)]
pub enum QyError {
    #[error("coefficient a{0} must be a positive integer")]
    BadCoefficient(usize),
    #[error("coefficient sum {sum} exceeds budget {budget}")]
    BudgetExceeded { sum: u64, budget: u64 },
    #[error("{at} is a root of the denominator {denominator}")]
    DenominatorRoot { at: BigRational, denominator: UniPoly },
    #[error("Q(y) does not vanish at y = {0}")]
    MissingRoot(BigInt),
    #[error("gate {0} divides by a value that depends on x")]
    DivisorDependsOnX(GateId),
    #[error("variable name `y` is reserved for the field parameter")]
    NameClash,
    #[error(transparent)]
    Ips(#[from] IpsError),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn x_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// `F_0 = y + sum a_i x_i` over Q(y) with boolean axioms on `x1..xn`.
pub fn qy_system(a: &[BigInt]) -> Result<AxiomSystem, QyError> {
    let ring = RingTag::RationalFunctionField;
    let names = x_names(a.len());
    let mut b = CircuitBuilder::with_vars(ring.clone(), &names);
    let mut terms = vec![b.constant(Scalar::y())];
    for (i, ai) in a.iter().enumerate() {
        let k = int_gadget(&mut b, ai);
        let x = b.var_at(i);
        terms.push(b.mul(k, x));
    }
    let s = b.sum(&terms);
    let f0 = b.finish_pruned(vec![s])?;
    Ok(AxiomSystem::new(ring, names, vec![f0], true)?)
}

/// Cofactors `H_0..H_n` for [`qy_system`] of the coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QyCert {
    pub coefficients: Vec<BigInt>,
    pub system: AxiomSystem,
    pub cofactors: Vec<Circuit>,
}

impl QyCert {
    pub fn to_lin(&self) -> IpsLinCert {
        IpsLinCert { cofactors: self.cofactors.clone() }
    }

    pub fn size(&self) -> usize {
        self.cofactors.iter().map(|c| c.size()).sum()
    }

    /// Distinct divisor values and constant-leaf denominators of all cofactors.
    pub fn denominators(&self) -> Vec<UniPoly> {
        let mut out: Vec<UniPoly> = Vec::new();
        let mut push = |p: UniPoly| {
            if p.degree().unwrap_or(0) > 0 && !out.contains(&p) {
                out.push(p);
            }
        };
        for c in &self.cofactors {
            for g in c.gates() {
                match g {
                    Gate::Const(Scalar::Function(f)) => push(f.denominator().clone()),
                    Gate::DivConst(_, d) => {
                        if let Ok(v) = c.constant_value(*d) {
                            let f = v.to_ratfunc();
                            push(f.numerator().monic());
                            push(f.denominator().clone());
                        }
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

struct Gen<'a> {
    b: CircuitBuilder,
    a: &'a [BigInt],
    consts: Vec<GateId>,
    memo: HashMap<(usize, usize, BigInt), GateId>,
}

impl Gen<'_> {
    /// `H_{k,i,t}`: the cofactor of axiom `i` refuting `y + t + a_1 x_1 + ... + a_k x_k`.
    fn h(&mut self, k: usize, i: usize, t: &BigInt) -> GateId {
        if i > k {
            return self.b.zero();
        }
        let key = (k, i, t.clone());
        if let Some(&g) = self.memo.get(&key) {
            return g;
        }
        let g = if k == 0 {
            let y = self.b.constant(Scalar::y());
            let den = if t.is_zero() {
                y
            } else {
                let tc = int_gadget(&mut self.b, t);
                self.b.add(y, tc)
            };
            let one = self.b.one();
            self.b.div_const(one, den)
        } else {
            let ak = &self.a[k - 1];
            let shifted = t + ak;
            if i == k {
                let lo = self.h(k - 1, 0, t);
                let hi = self.h(k - 1, 0, &shifted);
                let d = self.b.sub(lo, hi);
                self.b.mul(self.consts[k - 1], d)
            } else {
                let hi = self.h(k - 1, i, &shifted);
                let lo = self.h(k - 1, i, t);
                let x = self.b.var_at(k - 1);
                let one = self.b.one();
                let nx = self.b.sub(one, x);
                let l = self.b.mul(x, hi);
                let r = self.b.mul(nx, lo);
                self.b.add(l, r)
            }
        };
        self.memo.insert(key, g);
        g
    }
}

/// Builds the certificate by splitting on `x_k = 0` and `x_k = 1` for
/// `k = n, ..., 1`, memoized over `(k, i, t)`.
pub fn gen_cert(a: &[u64], budget: u64) -> Result<QyCert, QyError> {
    if let Some(i) = a.iter().position(|&v| v == 0) {
        return Err(QyError::BadCoefficient(i + 1));
    }
    let sum = a.iter().try_fold(0u64, |s, &v| s.checked_add(v)).unwrap_or(u64::MAX);
    if sum > budget {
        return Err(QyError::BudgetExceeded { sum, budget });
    }
    let coefficients: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
    let system = qy_system(&coefficients)?;
    let n = a.len();
    let mut b = CircuitBuilder::with_vars(RingTag::RationalFunctionField, &x_names(n));
    let consts = coefficients.iter().map(|ai| int_gadget(&mut b, ai)).collect();
    let mut gen = Gen { b, a: &coefficients, consts, memo: HashMap::new() };
    let outs: Vec<GateId> = (0..=n).map(|i| gen.h(n, i, &BigInt::zero())).collect();
    let all = gen.b.finish(outs.clone())?;
    let cofactors = outs.iter().map(|&o| all.restrict_outputs(&[o])).collect();
    Ok(QyCert { coefficients, system, cofactors })
}

/// Exact check of `sum F_i H_i = 1`.
pub fn verify_qy(cert: &QyCert) -> Result<PitVerdict, QyError> {
    Ok(verify_ips_lin(&cert.to_lin(), &cert.system, &PitPolicy::exact())?)
}

fn eval_at(f: &RatFunc, at: &BigRational) -> Result<BigRational, QyError> {
    f.eval(at).ok_or_else(|| QyError::DenominatorRoot { at: at.clone(), denominator: f.denominator().clone() })
}

/// Rewrites a Q(y) circuit over Q with `y = at`.
pub fn specialize_circuit(c: &Circuit, at: &BigRational) -> Result<Circuit, QyError> {
    let mut b = CircuitBuilder::with_vars(RingTag::RationalField, c.var_names());
    let mut map = Vec::with_capacity(c.size());
    for (id, g) in c.gates().iter().enumerate() {
        let v = match g {
            Gate::Var(i) => b.var_at(*i),
            Gate::Const(s) => {
                let r = eval_at(&s.to_ratfunc(), at)?;
                b.constant(Scalar::Rational(r))
            }
            Gate::Add(x, y) => b.add(map[*x], map[*y]),
            Gate::Mul(x, y) if x == y => b.square(map[*x]),
            Gate::Mul(x, y) => b.mul(map[*x], map[*y]),
            Gate::DivConst(x, y) => {
                let d = c.constant_value(*y).map_err(|_| QyError::DivisorDependsOnX(id))?.to_ratfunc();
                if eval_at(&d, at)?.is_zero() {
                    return Err(QyError::DenominatorRoot { at: at.clone(), denominator: d.numerator().monic() });
                }
                b.div_const(map[*x], map[*y])
            }
        };
        map.push(v);
    }
    let outs = c.outputs().iter().map(|&o| map[o]).collect();
    Ok(b.finish_pruned(outs)?)
}

/// The certificate with `y = at`, refuting `at + sum a_i x_i = 0` over Q.
pub fn specialize(cert: &QyCert, at: &BigRational) -> Result<(AxiomSystem, IpsLinCert), QyError> {
    let axioms = cert.system.axioms().iter().map(|f| specialize_circuit(f, at)).collect::<Result<Vec<_>, _>>()?;
    let system = AxiomSystem::new(RingTag::RationalField, cert.system.var_names().to_vec(), axioms, true)?;
    let cofactors = cert.cofactors.iter().map(|h| specialize_circuit(h, at)).collect::<Result<Vec<_>, _>>()?;
    Ok((system, IpsLinCert { cofactors }))
}

/// `f = P / Q` with `P` over `Z[y, x]` and `Q` over `Z[y]`, both constant-free
/// when `f` is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QyDecomposition {
    /// Variables `y` followed by those of the input.
    pub p: Circuit,
    /// Uses only `y`.
    pub q: Circuit,
}

impl QyDecomposition {
    /// Exact check of `P - f * Q = 0` over Q(y).
    pub fn check(&self, f: &Circuit) -> Result<bool, QyError> {
        let mut b = CircuitBuilder::with_vars(RingTag::RationalFunctionField, f.var_names());
        let y = b.constant(Scalar::y());
        let lift = |b: &mut CircuitBuilder, c: &Circuit| -> Vec<GateId> {
            let map: Vec<Option<GateId>> = c.var_names().iter().map(|n| (n == "y").then_some(y)).collect();
            let ids = b.graft(c, &map);
            c.outputs().iter().map(|&o| ids[o]).collect()
        };
        let p = lift(&mut b, &self.p)[0];
        let q = lift(&mut b, &self.q)[0];
        let fo = b.import(f)[0];
        let fq = b.mul(fo, q);
        let both = b.finish_pruned(vec![p, fq])?;
        let l = both.restrict_outputs(&[both.outputs()[0]]);
        let r = both.restrict_outputs(&[both.outputs()[1]]);
        Ok(pit_equal(&l, &r, &PitPolicy::exact())?.equal)
    }
}

/// Integer polynomial in `y` by Horner's rule with constant-free coefficients.
fn int_poly(b: &mut CircuitBuilder, y: GateId, coeffs: &[BigInt]) -> GateId {
    let mut acc = b.zero();
    for c in coeffs.iter().rev() {
        acc = b.mul(acc, y);
        let k = int_gadget(b, c);
        acc = b.add(acc, k);
    }
    acc
}

fn leaf(b: &mut CircuitBuilder, y: GateId, f: &RatFunc) -> (GateId, GateId) {
    if f.is_y() {
        let one = b.one();
        return (y, one);
    }
    let (n, ln) = f.numerator().to_integer_coeffs();
    let (d, ld) = f.denominator().to_integer_coeffs();
    // num/den = (n/ln) / (d/ld) = (n*ld) / (d*ln)
    let n: Vec<BigInt> = n.iter().map(|c| c * &ld).collect();
    let d: Vec<BigInt> = d.iter().map(|c| c * &ln).collect();
    (int_poly(b, y, &n), int_poly(b, y, &d))
}

/// Gate-by-gate numerator/denominator bookkeeping. Sums over a shared
/// denominator keep it.
pub fn qy_decompose(c: &Circuit) -> Result<QyDecomposition, QyError> {
    if c.var_index("y").is_some() {
        return Err(QyError::NameClash);
    }
    let mut names = vec!["y".to_string()];
    names.extend(c.var_names().iter().cloned());
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, &names);
    let y = b.var_at(0);
    let dep = c.variable_dependence();
    let mut pq: Vec<(GateId, GateId)> = Vec::with_capacity(c.size());
    for (id, g) in c.gates().iter().enumerate() {
        let v = match g {
            Gate::Var(i) => {
                let x = b.var_at(i + 1);
                (x, b.one())
            }
            Gate::Const(s) => leaf(&mut b, y, &s.to_ratfunc()),
            Gate::Mul(l, r) if l == r => {
                let (p, q) = pq[*l];
                (b.square(p), b.square(q))
            }
            Gate::Mul(l, r) => {
                let ((pl, ql), (pr, qr)) = (pq[*l], pq[*r]);
                (b.mul(pl, pr), b.mul(ql, qr))
            }
            Gate::Add(l, r) => {
                let ((pl, ql), (pr, qr)) = (pq[*l], pq[*r]);
                if ql == qr {
                    (b.add(pl, pr), ql)
                } else {
                    let u = b.mul(pl, qr);
                    let v = b.mul(pr, ql);
                    (b.add(u, v), b.mul(ql, qr))
                }
            }
            Gate::DivConst(l, r) => {
                if dep[*r] {
                    return Err(QyError::DivisorDependsOnX(id));
                }
                let ((pl, ql), (pr, qr)) = (pq[*l], pq[*r]);
                (b.mul(pl, qr), b.mul(ql, pr))
            }
        };
        pq.push(v);
    }
    let (p, q) = pq[c.output()];
    let all = b.finish(vec![p, q])?;
    Ok(QyDecomposition { p: all.restrict_outputs(&[p]), q: all.restrict_outputs(&[q]) })
}

/// Outcome of [`denominator_root_census`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCensus {
    /// `Q(y)`, the product of the cofactor denominators.
    pub q: Circuit,
    pub degree: u64,
    /// Integers `r` with `Q(r) = 0` confirmed, ascending.
    pub roots: Vec<BigInt>,
    /// Sizes of the `P_j` and `Q_j` circuits.
    pub decomposition_sizes: Vec<(usize, usize)>,
}

/// Decomposes each cofactor as `P_j / Q_j` and confirms `Q(-k) = 0` for every
/// value `k = sum a_i b_i` of a boolean point `b`: there both sides of
/// `F_0 P_0 prod_{j != 0} Q_j + sum_i F_i P_i prod_{j != i} Q_j = prod_j Q_j`
/// are evaluated and the left side vanishes.
pub fn denominator_root_census(cert: &QyCert) -> Result<RootCensus, QyError> {
    let n = cert.coefficients.len();
    let decs = cert.cofactors.iter().map(qy_decompose).collect::<Result<Vec<_>, _>>()?;
    let mut b = CircuitBuilder::with_vars(RingTag::IntegerRing, &["y"]);
    let qs: Vec<GateId> = decs.iter().map(|d| b.import(&d.q)[0]).collect();
    let qo = b.product(&qs);
    let q = b.finish_pruned(vec![qo])?;
    let degree = expand_rational(&q, DEFAULT_TERM_BUDGET)?[0].total_degree();

    let mut roots = BTreeSet::new();
    for mask in 0..(1u64 << n) {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let k: BigInt = cert.coefficients.iter().zip(&bits).filter(|(_, &b)| b).map(|(a, _)| a).sum();
        let y = -k.clone();
        let mut point = vec![Scalar::from_bigint(y.clone())];
        point.extend(bits.iter().map(|&v| Scalar::int(v as i64)));
        let pt = Assignment::new(point);
        let mut ps = Vec::with_capacity(decs.len());
        let mut qv = Vec::with_capacity(decs.len());
        for d in &decs {
            ps.push(evaluate(&d.p, &pt)?[0].as_rational().expect("integer value"));
            qv.push(evaluate(&d.q, &pt)?[0].as_rational().expect("integer value"));
        }
        let mut f = vec![BigRational::from_integer(y.clone())
            + cert.coefficients.iter().zip(&bits).filter(|(_, &v)| v).map(|(a, _)| BigRational::from_integer(a.clone())).sum::<BigRational>()];
        f.extend(bits.iter().map(|_| BigRational::zero()));
        let mut lhs = BigRational::zero();
        for j in 0..decs.len() {
            let mut t = &f[j] * &ps[j];
            for (l, ql) in qv.iter().enumerate() {
                if l != j {
                    t *= ql;
                }
            }
            lhs += t;
        }
        let rhs: BigRational = qv.iter().fold(BigRational::one(), |acc, v| acc * v);
        debug_assert!(lhs.is_zero());
        if !rhs.is_zero() || !lhs.is_zero() {
            return Err(QyError::MissingRoot(y));
        }
        roots.insert(y);
    }
    let decomposition_sizes = decs.iter().map(|d| (d.p.pruned().size(), d.q.pruned().size())).collect();
    Ok(RootCensus { q, degree, roots: roots.into_iter().collect(), decomposition_sizes })
}

/// Whether `at` avoids every root of the certificate's denominators.
pub fn is_regular_point(cert: &QyCert, at: &BigRational) -> bool {
    cert.denominators().iter().all(|d| !d.eval(at).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::text::parse;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_variable() {
        let c = gen_cert(&[1], DEFAULT_COEFF_BUDGET).unwrap();
        assert_eq!(c.cofactors.len(), 2);
        assert!(verify_qy(&c).unwrap().equal);
    }

    #[test]
    fn bvp3_denominators() {
        let c = gen_cert(&[1, 2, 4], DEFAULT_COEFF_BUDGET).unwrap();
        assert!(verify_qy(&c).unwrap().equal);
        let mut ts: Vec<BigRational> = c
            .denominators()
            .iter()
            .map(|d| {
                assert_eq!(d.degree(), Some(1));
                d.coeffs()[0].clone()
            })
            .collect();
        ts.sort();
        assert_eq!(ts, (0..8).map(|t| r(t, 1)).collect::<Vec<_>>());
    }

    #[test]
    fn specializations() {
        let c = gen_cert(&[1, 2], DEFAULT_COEFF_BUDGET).unwrap();
        for at in [r(5, 1), r(1, 2)] {
            let (sys, lin) = specialize(&c, &at).unwrap();
            assert!(verify_ips_lin(&lin, &sys, &PitPolicy::exact()).unwrap().equal);
        }
        assert!(matches!(specialize(&c, &r(-1, 1)), Err(QyError::DenominatorRoot { .. })));
        assert!(!is_regular_point(&c, &r(-3, 1)));
    }

    #[test]
    fn decompose_examples() {
        let f = parse("ring Q(y)\ny = const y\no = const 1\nd = add y o\nh = divc o d\noutput h").unwrap();
        let d = qy_decompose(&f).unwrap();
        assert!(d.check(&f).unwrap());
        let f = parse("ring Q(y)\ninput x1 x2\ny = const y\no = const 1\nd = add y o\na = divc x1 y\nb = divc x2 d\ns = add a b\noutput s").unwrap();
        let d = qy_decompose(&f).unwrap();
        assert!(d.check(&f).unwrap());
        assert!(d.p.pruned().size() < 3 * f.size());
        let g = parse("ring Q(y)\ninput x1\ny = const y\np = mul x1 y\noutput p").unwrap();
        let d = qy_decompose(&g).unwrap();
        assert_eq!(d.q.pruned().gates(), &[Gate::Const(Scalar::int(1))]);
    }

    #[test]
    fn divisor_on_x_is_not_a_circuit() {
        assert!(parse("ring Q(y)\ninput x1\no = const 1\nh = divc o x1\noutput h").is_err());
    }

    #[test]
    fn census_small() {
        let c = gen_cert(&[1, 2], DEFAULT_COEFF_BUDGET).unwrap();
        let rc = denominator_root_census(&c).unwrap();
        assert_eq!(rc.roots, (0..4).map(|k| BigInt::from(-k)).rev().collect::<Vec<_>>());
        let c1 = gen_cert(&[1], DEFAULT_COEFF_BUDGET).unwrap();
        assert_eq!(denominator_root_census(&c1).unwrap().roots.len(), 2);
    }

    #[test]
    fn census_rejects_polynomial_cofactors() {
        let mut c = gen_cert(&[1, 2], DEFAULT_COEFF_BUDGET).unwrap();
        let one = parse("ring Q(y)\ninput x1 x2\no = const 1\noutput o").unwrap();
        for h in &mut c.cofactors {
            *h = one.clone();
        }
        assert!(matches!(denominator_root_census(&c), Err(QyError::MissingRoot(_))));
    }

    #[test]
    fn bad_params() {
        assert!(matches!(gen_cert(&[1, 0], 10), Err(QyError::BadCoefficient(2))));
        assert!(matches!(gen_cert(&[8, 8], 10), Err(QyError::BudgetExceeded { .. })));
    }
}
