//! Coefficient rings: Z, Q, GF(p) and Q(y).

pub mod primes;
pub mod ratfunc;
pub mod unipoly;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

pub use ratfunc::RatFunc;
pub use unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("constant {0} is not an element of the ring")]
    NotInRing(String),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("{0} is not prime")]
    NotPrime(BigInt),
}

/// The coefficient ring a circuit computes over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingTag {
    IntegerRing,
    RationalField,
    PrimeField(BigInt),
    RationalFunctionField,
}

impl RingTag {
    pub fn prime_field(p: BigInt) -> Result<Self, RingError> {
        if primes::is_prime(&p) {
            Ok(RingTag::PrimeField(p))
        } else {
            Err(RingError::NotPrime(p))
        }
    }

    pub fn allows_division(&self) -> bool {
        matches!(self, RingTag::RationalField | RingTag::RationalFunctionField)
    }

    /// Z and Q carry an order, so only they host inequality systems.
    pub fn is_ordered(&self) -> bool {
        matches!(self, RingTag::IntegerRing | RingTag::RationalField)
    }

    /// Checks that a constant belongs to the ring.
    pub fn admits(&self, s: &Scalar) -> bool {
        match (self, s) {
            (RingTag::RationalFunctionField, _) => true,
            (RingTag::RationalField, Scalar::Rational(_)) => true,
            (RingTag::IntegerRing | RingTag::PrimeField(_), Scalar::Rational(r)) => r.is_integer(),
            _ => false,
        }
    }
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::IntegerRing => write!(f, "Z"),
            RingTag::RationalField => write!(f, "Q"),
            RingTag::PrimeField(p) => write!(f, "GF {p}"),
            RingTag::RationalFunctionField => write!(f, "Q(y)"),
        }
    }
}

/// A constant or value: an exact rational, or a rational function of `y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Function(RatFunc),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(BigRational::from_integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn y() -> Self {
        Scalar::Function(RatFunc::y())
    }

    /// Collapses constant rational functions to rationals.
    pub fn normalized(self) -> Self {
        match self {
            Scalar::Function(f) => match f.as_constant() {
                Some(c) => Scalar::Rational(c),
                None => Scalar::Function(f),
            },
            r => r,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(r) => Some(r.clone()),
            Scalar::Function(f) => f.as_constant(),
        }
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        match self {
            Scalar::Rational(r) => RatFunc::constant(r.clone()),
            Scalar::Function(f) => f.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Function(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    pub fn is_minus_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r == -BigRational::one())
    }

    pub fn is_y(&self) -> bool {
        matches!(self, Scalar::Function(f) if f.is_y())
    }

    /// Constants allowed in constant-free circuits: -1, 0, 1 and `y`.
    pub fn is_constant_free_leaf(&self) -> bool {
        self.is_zero() || self.is_one() || self.is_minus_one() || self.is_y()
    }

    /// Sign of a rational constant; `None` for non-constant functions.
    pub fn sign(&self) -> Option<Ordering> {
        self.as_rational().map(|r| r.cmp(&BigRational::zero()))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Function(g) => write!(f, "{g}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

/// Arithmetic used by the generic circuit evaluator.
pub trait Ring {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn embed_scalar(&self, s: &Scalar) -> Result<Self::Elem, RingError>;
    fn inverse(&self, a: &Self::Elem) -> Result<Self::Elem, RingError>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn embed_scalar(&self, s: &Scalar) -> Result<BigInt, RingError> {
        match s.as_rational() {
            Some(r) if r.is_integer() => Ok(r.to_integer()),
            _ => Err(RingError::NotInRing(s.to_string())),
        }
    }
    fn inverse(&self, a: &BigInt) -> Result<BigInt, RingError> {
        if a.is_zero() {
            Err(RingError::DivisionByZero)
        } else if a.abs().is_one() {
            Ok(a.clone())
        } else {
            Err(RingError::NotInvertible(a.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn embed_scalar(&self, s: &Scalar) -> Result<BigRational, RingError> {
        s.as_rational().ok_or_else(|| RingError::NotInRing(s.to_string()))
    }
    fn inverse(&self, a: &BigRational) -> Result<BigRational, RingError> {
        if a.is_zero() {
            Err(RingError::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
}

/// `GF(p)` for an arbitrary-precision prime `p`; elements live in `[0, p)`.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: BigInt,
}

impl PrimeField {
    pub fn new(p: BigInt) -> Self {
        PrimeField { p }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.p
    }

    pub fn reduce(&self, a: &BigInt) -> BigInt {
        a.mod_floor(&self.p)
    }

    fn inv_raw(&self, a: &BigInt) -> Result<BigInt, RingError> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        let e = a.extended_gcd(&self.p);
        Ok(self.reduce(&e.x))
    }
}

impl Ring for PrimeField {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a + b))
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        self.reduce(&(a * b))
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        self.reduce(&-a)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn embed_scalar(&self, s: &Scalar) -> Result<BigInt, RingError> {
        let r = s.as_rational().ok_or_else(|| RingError::NotInRing(s.to_string()))?;
        let d = self.inv_raw(r.denom())?;
        Ok(self.reduce(&(r.numer() * d)))
    }
    fn inverse(&self, a: &BigInt) -> Result<BigInt, RingError> {
        self.inv_raw(a)
    }
}

/// `GF(p)` for a word-sized prime, used by randomized identity testing.
#[derive(Debug, Clone, Copy)]
pub struct Fp64 {
    p: u64,
}

impl Fp64 {
    pub fn new(p: u64) -> Self {
        Fp64 { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn reduce_big(&self, a: &BigInt) -> u64 {
        a.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
}

impl Ring for Fp64 {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn embed_scalar(&self, s: &Scalar) -> Result<u64, RingError> {
        let r = s.as_rational().ok_or_else(|| RingError::NotInRing(s.to_string()))?;
        let n = self.reduce_big(r.numer());
        let d = self.reduce_big(r.denom());
        let dinv = self.inverse(&d)?;
        Ok(self.mul(&n, &dinv))
    }
    fn inverse(&self, a: &u64) -> Result<u64, RingError> {
        if (*a).is_multiple_of(self.p) {
            Err(RingError::DivisionByZero)
        } else {
            Ok(self.pow(*a, self.p - 2))
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RatFuncs;

impl Ring for RatFuncs {
    type Elem = RatFunc;
    fn zero(&self) -> RatFunc {
        RatFunc::zero()
    }
    fn one(&self) -> RatFunc {
        RatFunc::one()
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(b)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(b)
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        a.neg()
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
    fn embed_scalar(&self, s: &Scalar) -> Result<RatFunc, RingError> {
        Ok(s.to_ratfunc())
    }
    fn inverse(&self, a: &RatFunc) -> Result<RatFunc, RingError> {
        a.inverse().ok_or(RingError::DivisionByZero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7.into());
        let three = BigInt::from(3);
        let inv = f.inverse(&three).unwrap();
        assert_eq!(f.mul(&three, &inv), BigInt::one());
        assert_eq!(f.embed_scalar(&Scalar::ratio(1, 2)).unwrap(), BigInt::from(4));
    }

    #[test]
    fn fp64_matches_prime_field() {
        let p = 1_000_000_007u64;
        let small = Fp64::new(p);
        let big = PrimeField::new(p.into());
        let a = 123_456_789u64;
        let b = 987_654_321u64;
        assert_eq!(
            BigInt::from(small.mul(&a, &b)),
            big.mul(&BigInt::from(a), &BigInt::from(b))
        );
        assert_eq!(small.mul(&a, &small.inverse(&a).unwrap()), 1);
    }

    #[test]
    fn admits_by_ring() {
        assert!(RingTag::IntegerRing.admits(&Scalar::int(-4)));
        assert!(!RingTag::IntegerRing.admits(&Scalar::ratio(1, 2)));
        assert!(!RingTag::RationalField.admits(&Scalar::y()));
        assert!(RingTag::RationalFunctionField.admits(&Scalar::y()));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(RingTag::prime_field(9.into()).is_err());
        assert!(RingTag::prime_field(7.into()).is_ok());
    }
}
