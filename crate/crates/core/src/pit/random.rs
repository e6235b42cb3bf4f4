//! Schwartz–Zippel testing over random prime fields.

use super::{PitError, PitMode, PitVerdict, Witness};
use crate::circuit::eval::eval_in;
use crate::circuit::{Circuit, Gate};
use crate::ring::primes::{prime_count_lower_bound, random_prime};
use crate::ring::{Fp64, PrimeField, RingError, RingTag};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Target overall error bound when the trial count is left open: 2^-64.
pub const DEFAULT_CONFIDENCE_BITS: u32 = 64;
pub const DEFAULT_PRIME_BITS: u32 = 62;
const MAX_AUTO_TRIALS: u32 = 256;
const MAX_PRIME_RESAMPLES: u32 = 10_000;

/// Shared inputs for one randomized comparison.
pub(crate) struct Aligned<'a> {
    pub a: &'a Circuit,
    pub b: &'a Circuit,
    pub names: Vec<String>,
    pub map_a: Vec<usize>,
    pub map_b: Vec<usize>,
}

/// Per-gate `(n, l)`: the gate computes `F / L` with `F` integral,
/// `log2 ||F||_1 <= n` and `log2 |L| <= l`.
fn bit_bounds(c: &Circuit) -> Result<Vec<(u64, u64)>, PitError> {
    let divisors: Vec<usize> = c
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::DivConst(_, d) => Some(*d),
            _ => None,
        })
        .collect();
    let values = c.constant_values(&divisors)?;
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(c.size());
    for g in c.gates() {
        let v = match g {
            Gate::Var(_) => (0, 0),
            Gate::Const(s) => {
                let r = s.as_rational().ok_or_else(|| PitError::RandomizedUnsupported(c.ring().clone()))?;
                (r.numer().bits(), r.denom().bits())
            }
            Gate::Add(a, b) => {
                let ((na, la), (nb, lb)) = (out[*a], out[*b]);
                (na.saturating_add(lb).max(nb.saturating_add(la)).saturating_add(1), la.saturating_add(lb))
            }
            Gate::Mul(a, b) => {
                let ((na, la), (nb, lb)) = (out[*a], out[*b]);
                (na.saturating_add(nb), la.saturating_add(lb))
            }
            Gate::DivConst(a, d) => {
                let r = values[d].as_rational().expect("rational divisor");
                let (na, la) = out[*a];
                (na.saturating_add(r.denom().bits()), la.saturating_add(r.numer().bits()))
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// Bits of the product of all constant denominators and divisor numerators;
/// a prime outside this product can evaluate the circuit.
fn excluded_bits(c: &Circuit) -> Result<u64, PitError> {
    let divisors: Vec<usize> = c
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::DivConst(_, d) => Some(*d),
            _ => None,
        })
        .collect();
    let values = c.constant_values(&divisors)?;
    let mut total = 0u64;
    for g in c.gates() {
        match g {
            Gate::Const(s) => total += s.as_rational().map_or(0, |r| r.denom().bits()),
            Gate::DivConst(_, d) => total += values[d].as_rational().map_or(0, |r| r.numer().bits()),
            _ => {}
        }
    }
    Ok(total)
}

fn pow_rational(r: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

fn trials_for(per_trial: &BigRational, requested: Option<u32>) -> u32 {
    if let Some(t) = requested {
        return t.max(1);
    }
    if *per_trial >= BigRational::one() {
        return 1;
    }
    let target = BigRational::new(BigInt::one(), BigInt::one() << DEFAULT_CONFIDENCE_BITS);
    let mut t = 1;
    let mut acc = per_trial.clone();
    while acc > target && t < MAX_AUTO_TRIALS {
        acc *= per_trial;
        t += 1;
    }
    t
}

fn cap_one(r: BigRational) -> BigRational {
    if r > BigRational::one() {
        BigRational::one()
    } else {
        r
    }
}

fn output_degrees(c: &Circuit) -> Vec<BigUint> {
    let deg = c.gate_degrees();
    c.outputs().iter().map(|&o| deg[o].clone()).collect()
}

/// Compares circuits over Z or Q by evaluating at random points modulo
/// random `prime_bits`-bit primes.
pub(crate) fn randomized_rational(
    al: &Aligned<'_>,
    trials: Option<u32>,
    seed: u64,
    prime_bits: u32,
) -> Result<PitVerdict, PitError> {
    if !(8..=63).contains(&prime_bits) {
        return Err(PitError::Unsupported(format!("prime width {prime_bits} (must be 8..=63)")));
    }
    let (a, b) = (al.a, al.b);
    let (ba, bb) = (bit_bounds(a)?, bit_bounds(b)?);
    let (da, db) = (output_degrees(a), output_degrees(b));
    let half = BigInt::one() << (prime_bits - 1);

    let mut per_trial = BigRational::zero();
    let excluded = excluded_bits(a)? + excluded_bits(b)?;
    let step = (prime_bits - 1) as u64;
    let n_eff = BigInt::from(prime_count_lower_bound(prime_bits)) - BigInt::from(excluded.div_ceil(step));
    for (k, (&oa, &ob)) in a.outputs().iter().zip(b.outputs()).enumerate() {
        let d = BigInt::from(da[k].clone().max(db[k].clone()));
        if d >= half {
            return Err(PitError::DegreeBoundOverflow { degree: d.to_string(), field: half.to_string() });
        }
        let ((na, la), (nb, lb)) = (ba[oa], bb[ob]);
        let n = na.saturating_add(lb).max(nb.saturating_add(la)).saturating_add(1);
        let content = if n_eff.is_positive() {
            BigRational::new(BigInt::from(n.div_ceil(step)), n_eff.clone())
        } else {
            BigRational::one()
        };
        let bound = cap_one(BigRational::new(d, half.clone()) + content);
        if bound > per_trial {
            per_trial = bound;
        }
    }
    let t = trials_for(&per_trial, trials);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut smallest: Option<u64> = None;
    for _ in 0..t {
        let mut resamples = 0;
        loop {
            let p = random_prime(&mut rng, prime_bits);
            let f = Fp64::new(p);
            let point: Vec<u64> = (0..al.names.len()).map(|_| rng.gen_range(0..p)).collect();
            let ia: Vec<u64> = al.map_a.iter().map(|&i| point[i]).collect();
            let ib: Vec<u64> = al.map_b.iter().map(|&i| point[i]).collect();
            let (va, vb) = match (eval_in(a, &f, &ia), eval_in(b, &f, &ib)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(RingError::DivisionByZero), _) | (_, Err(RingError::DivisionByZero)) => {
                    resamples += 1;
                    if resamples > MAX_PRIME_RESAMPLES {
                        return Err(PitError::Unsupported("no usable prime found".into()));
                    }
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            smallest = Some(smallest.map_or(p, |s| s.min(p)));
            if let Some(k) = (0..va.len()).find(|&k| va[k] != vb[k]) {
                return Ok(PitVerdict {
                    equal: false,
                    mode: PitMode::Randomized {
                        trials: t,
                        field_size: BigInt::from(p),
                        error_bound: BigRational::zero(),
                    },
                    witness: Some(Witness {
                        output: k,
                        modulus: BigInt::from(p),
                        point: al.names.iter().cloned().zip(point.iter().map(|&v| BigInt::from(v))).collect(),
                        left: BigInt::from(va[k]),
                        right: BigInt::from(vb[k]),
                    }),
                });
            }
            break;
        }
    }
    Ok(PitVerdict {
        equal: true,
        mode: PitMode::Randomized {
            trials: t,
            field_size: BigInt::from(smallest.unwrap_or(0)),
            error_bound: pow_rational(&per_trial, t),
        },
        witness: None,
    })
}

fn random_below<R: Rng>(rng: &mut R, q: &BigInt) -> BigInt {
    if let Some(q64) = q.to_u64() {
        return BigInt::from(rng.gen_range(0..q64));
    }
    let bits = q.bits();
    let words = bits.div_ceil(32) as usize;
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
        let extra = (words as u64) * 32 - bits;
        if extra > 0 {
            let last = digits.last_mut().unwrap();
            *last >>= extra;
        }
        let v = BigInt::from(BigUint::new(digits));
        if &v < q {
            return v;
        }
    }
}

/// Compares circuits over a fixed prime field by evaluation at uniform points.
pub(crate) fn randomized_prime_field(al: &Aligned<'_>, q: &BigInt, trials: Option<u32>, seed: u64) -> Result<PitVerdict, PitError> {
    let (a, b) = (al.a, al.b);
    let (da, db) = (output_degrees(a), output_degrees(b));
    let d = da.iter().chain(&db).max().cloned().unwrap_or_default();
    let d = BigInt::from(d);
    if &d >= q {
        return Err(PitError::DegreeBoundOverflow { degree: d.to_string(), field: q.to_string() });
    }
    let per_trial = BigRational::new(d, q.clone());
    let t = trials_for(&per_trial, trials);
    let f = PrimeField::new(q.clone());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..t {
        let point: Vec<BigInt> = (0..al.names.len()).map(|_| random_below(&mut rng, q)).collect();
        let ia: Vec<BigInt> = al.map_a.iter().map(|&i| point[i].clone()).collect();
        let ib: Vec<BigInt> = al.map_b.iter().map(|&i| point[i].clone()).collect();
        let va = eval_in(a, &f, &ia)?;
        let vb = eval_in(b, &f, &ib)?;
        if let Some(k) = (0..va.len()).find(|&k| va[k] != vb[k]) {
            return Ok(PitVerdict {
                equal: false,
                mode: PitMode::Randomized { trials: t, field_size: q.clone(), error_bound: BigRational::zero() },
                witness: Some(Witness {
                    output: k,
                    modulus: q.clone(),
                    point: al.names.iter().cloned().zip(point).collect(),
                    left: va[k].clone(),
                    right: vb[k].clone(),
                }),
            });
        }
    }
    Ok(PitVerdict {
        equal: true,
        mode: PitMode::Randomized { trials: t, field_size: q.clone(), error_bound: pow_rational(&per_trial, t) },
        witness: None,
    })
}

/// Re-evaluates both circuits at a witness point and confirms they differ.
pub fn check_witness(a: &Circuit, b: &Circuit, w: &Witness) -> bool {
    let lookup = |c: &Circuit| -> Option<Vec<BigInt>> {
        c.var_names()
            .iter()
            .map(|n| w.point.iter().find(|(m, _)| m == n).map(|(_, v)| v.clone()))
            .collect()
    };
    let (Some(ia), Some(ib)) = (lookup(a), lookup(b)) else {
        return false;
    };
    if matches!(a.ring(), RingTag::RationalFunctionField) {
        return false;
    }
    let f = PrimeField::new(w.modulus.clone());
    match (eval_in(a, &f, &ia), eval_in(b, &f, &ib)) {
        (Ok(va), Ok(vb)) => va.get(w.output).is_some_and(|x| Some(x) != vb.get(w.output)),
        _ => false,
    }
}
