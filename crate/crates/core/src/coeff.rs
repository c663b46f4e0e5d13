//! Exact coefficient rings: the rationals, prime fields and the
//! localization of the integers at a prime.
//!
//! A [`Scalar`] always carries its [`Ring`]. Mixing rings inside one
//! operation is a logic error: the checked `try_*` methods report it as
//! [`CoeffError::RingMismatch`], the operator impls panic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default bound used by [`unit_range`] callers when no order exists.
pub const DEFAULT_PROBE_LIMIT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("{value} is not a unit in {ring}")]
    NonUnit { ring: Ring, value: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {text:?} as an element of {ring}: {reason}")]
    Parse {
        ring: Ring,
        text: String,
        reason: String,
    },
}

/// Ground ring of every module, map and structure in the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Rationals,
    PrimeField(u64),
    /// Rationals whose denominator is coprime to `p`.
    LocalIntegers(u64),
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring, CoeffError> {
        if is_prime(p) {
            Ok(Ring::PrimeField(p))
        } else {
            Err(CoeffError::NotPrime(p))
        }
    }

    pub fn local_integers(p: u64) -> Result<Ring, CoeffError> {
        if is_prime(p) {
            Ok(Ring::LocalIntegers(p))
        } else {
            Err(CoeffError::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Ring::Rationals => None,
            Ring::PrimeField(p) | Ring::LocalIntegers(p) => Some(*p),
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::LocalIntegers(_))
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_int(self, 0)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_int(self, 1)
    }

    /// Short tag used by the input format: `Q`, `Fp` or `Zloc`.
    pub fn kind_tag(&self) -> &'static str {
        match self {
            Ring::Rationals => "Q",
            Ring::PrimeField(_) => "Fp",
            Ring::LocalIntegers(_) => "Zloc",
        }
    }

    pub fn from_tag(kind: &str, p: Option<u64>) -> Result<Ring, String> {
        match (kind, p) {
            ("Q", _) => Ok(Ring::Rationals),
            ("Fp", Some(p)) => Ring::prime_field(p).map_err(|e| e.to_string()),
            ("Zloc", Some(p)) => Ring::local_integers(p).map_err(|e| e.to_string()),
            ("Fp" | "Zloc", None) => Err(format!("ring kind {kind} requires a prime p")),
            (other, _) => Err(format!("unknown ring kind {other:?} (expected Q, Fp or Zloc)")),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F_{p}"),
            Ring::LocalIntegers(p) => write!(f, "Z_({p})"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Frac(BigRational),
    Residue(u64),
}

/// An exact element of a [`Ring`], kept in canonical form (reduced
/// fractions with positive denominator, residues in `[0, p)`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    ring: Ring,
    value: Value,
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

impl Scalar {
    pub fn from_int(ring: Ring, n: i64) -> Scalar {
        match ring {
            Ring::PrimeField(p) => {
                let r = (n as i128).rem_euclid(p as i128) as u64;
                Scalar {
                    ring,
                    value: Value::Residue(r),
                }
            }
            _ => Scalar {
                ring,
                value: Value::Frac(BigRational::from_integer(BigInt::from(n))),
            },
        }
    }

    /// `num/den` interpreted in `ring`; fails when `den` is not invertible.
    pub fn from_fraction(ring: Ring, num: i64, den: i64) -> Result<Scalar, CoeffError> {
        let d = Scalar::from_int(ring, den);
        Ok(&Scalar::from_int(ring, num) * &d.inv()?)
    }

    fn from_big(ring: Ring, q: BigRational) -> Result<Scalar, CoeffError> {
        match ring {
            Ring::Rationals => Ok(Scalar {
                ring,
                value: Value::Frac(q),
            }),
            Ring::LocalIntegers(p) => {
                if bigint_mod(q.denom(), p) == 0 {
                    Err(CoeffError::NonUnit {
                        ring,
                        value: format!("{}", q.denom()),
                    })
                } else {
                    Ok(Scalar {
                        ring,
                        value: Value::Frac(q),
                    })
                }
            }
            Ring::PrimeField(p) => {
                let den = bigint_mod(q.denom(), p);
                if den == 0 {
                    return Err(CoeffError::NonUnit {
                        ring,
                        value: format!("{}", q.denom()),
                    });
                }
                let num = bigint_mod(q.numer(), p);
                let r = ((num as u128 * mod_pow(den, p - 2, p) as u128) % p as u128) as u64;
                Ok(Scalar {
                    ring,
                    value: Value::Residue(r),
                })
            }
        }
    }

    /// Parses `"a"`, `"-a"` or `"a/b"`.
    pub fn parse(ring: Ring, text: &str) -> Result<Scalar, CoeffError> {
        let err = |reason: &str| CoeffError::Parse {
            ring,
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Scalar::from_big(ring, BigRational::new(num, den))
            .map_err(|_| err("denominator is not invertible in this ring"))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Frac(q) => q.is_zero(),
            Value::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Frac(q) => q.is_one(),
            Value::Residue(r) => *r == 1,
        }
    }

    /// p-adic valuation (of the numerator); `None` for zero or over Q.
    pub fn valuation(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        match (&self.value, self.ring) {
            (Value::Frac(q), Ring::LocalIntegers(p)) => {
                let p = BigInt::from(p);
                let mut n = q.numer().abs();
                let mut v = 0;
                while (&n % &p).is_zero() {
                    n /= &p;
                    v += 1;
                }
                Some(v)
            }
            _ => Some(0),
        }
    }

    /// Ordering key for pivot selection: smaller is a better pivot.
    /// Zero sorts last; every unit has key 0.
    pub fn pivot_rank(&self) -> u32 {
        self.valuation().unwrap_or(u32::MAX)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Residue class modulo p (only for the two p-adic style rings).
    pub fn residue(&self) -> Option<u64> {
        match (&self.value, self.ring) {
            (Value::Residue(r), _) => Some(*r),
            (Value::Frac(q), Ring::LocalIntegers(p)) => {
                let den = bigint_mod(q.denom(), p);
                let num = bigint_mod(q.numer(), p);
                Some(((num as u128 * mod_pow(den, p - 2, p) as u128) % p as u128) as u64)
            }
            _ => None,
        }
    }

    pub fn inv(&self) -> Result<Scalar, CoeffError> {
        if !self.is_unit() {
            return Err(CoeffError::NonUnit {
                ring: self.ring,
                value: self.to_string(),
            });
        }
        Ok(match (&self.value, self.ring) {
            (Value::Residue(r), Ring::PrimeField(p)) => Scalar {
                ring: self.ring,
                value: Value::Residue(mod_pow(*r, p - 2, p)),
            },
            (Value::Frac(q), _) => Scalar {
                ring: self.ring,
                value: Value::Frac(q.recip()),
            },
            _ => unreachable!("residues only occur in prime fields"),
        })
    }

    /// Integer power; negative exponents require a unit.
    pub fn pow(&self, exp: i64) -> Result<Scalar, CoeffError> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.ring.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Exact quotient; fails unless `other` divides `self` inside the ring.
    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        if other.is_zero() {
            return Err(CoeffError::NonUnit {
                ring: self.ring,
                value: other.to_string(),
            });
        }
        match (&self.value, &other.value) {
            (Value::Frac(a), Value::Frac(b)) => Scalar::from_big(self.ring, a / b),
            _ => Ok(self * &other.inv()?),
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), CoeffError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(CoeffError::RingMismatch(self.ring, other.ring))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.combine(other, |a, b| a + b, |a, b, p| (a + b) % p))
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.combine(other, |a, b| a - b, |a, b, p| (a + p - b) % p))
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, CoeffError> {
        self.check(other)?;
        Ok(self.combine(other, |a, b| a * b, |a, b, p| {
            ((a as u128 * b as u128) % p as u128) as u64
        }))
    }

    fn combine(
        &self,
        other: &Scalar,
        frac: impl Fn(&BigRational, &BigRational) -> BigRational,
        residue: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        let value = match (&self.value, &other.value, self.ring) {
            (Value::Frac(a), Value::Frac(b), _) => Value::Frac(frac(a, b)),
            (Value::Residue(a), Value::Residue(b), Ring::PrimeField(p)) => {
                Value::Residue(residue(*a, *b, p))
            }
            _ => unreachable!("representation always follows the ring"),
        };
        Scalar {
            ring: self.ring,
            value,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Residue(r) => write!(f, "{r}"),
            Value::Frac(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Value::Frac(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        &self.ring.zero() - self
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Outcome of [`unit_range`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitRange {
    /// `alpha^k - 1` is a unit exactly for `1 <= k <= n`.
    Finite(u32),
    /// Every probed `k <= limit` gave a unit.
    UnboundedUpToProbe(u32),
}

/// Largest `n <= probe_limit` with `alpha^k - 1` a unit for all `1 <= k <= n`,
/// found by probing each `k` in turn.
pub fn unit_range(alpha: &Scalar, probe_limit: u32) -> Result<UnitRange, CoeffError> {
    if !alpha.is_unit() {
        return Err(CoeffError::NonUnit {
            ring: alpha.ring(),
            value: alpha.to_string(),
        });
    }
    let one = alpha.ring().one();
    let mut power = one.clone();
    for k in 1..=probe_limit {
        power = &power * alpha;
        if !(&power - &one).is_unit() {
            return Ok(UnitRange::Finite(k - 1));
        }
    }
    Ok(UnitRange::UnboundedUpToProbe(probe_limit))
}

/// Closed form for the p-adic style rings: `ord_p(alpha mod p) - 1`.
/// Returns `None` over Q, where no finite order exists for `alpha != ±1`.
pub fn exact_unit_range(alpha: &Scalar) -> Result<Option<u32>, CoeffError> {
    if !alpha.is_unit() {
        return Err(CoeffError::NonUnit {
            ring: alpha.ring(),
            value: alpha.to_string(),
        });
    }
    let (Some(p), Some(r)) = (alpha.ring().prime(), alpha.residue()) else {
        return Ok(None);
    };
    let mut order = 1u32;
    let mut acc = r % p;
    while acc != 1 {
        acc = ((acc as u128 * r as u128) % p as u128) as u64;
        order += 1;
    }
    Ok(Some(order - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> Scalar {
        Scalar::from_fraction(Ring::Rationals, a, b).unwrap()
    }

    #[test]
    fn rational_addition() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(q(5, 6).to_string(), "5/6");
        assert_eq!(q(-4, 2).to_string(), "-2");
    }

    #[test]
    fn prime_field_product() {
        let f5 = Ring::prime_field(5).unwrap();
        let a = Scalar::from_int(f5, 3);
        let b = Scalar::from_int(f5, 4);
        assert_eq!(&a * &b, Scalar::from_int(f5, 2));
        assert_eq!(Scalar::from_int(f5, -1).to_string(), "4");
    }

    #[test]
    fn local_identity() {
        let z7 = Ring::local_integers(7).unwrap();
        let a = Scalar::from_fraction(z7, 3, 2).unwrap();
        let b = Scalar::from_fraction(z7, 2, 3).unwrap();
        assert!((&a * &b).is_one());
    }

    #[test]
    fn unit_detection() {
        assert!(!Ring::Rationals.zero().is_unit());
        let z5 = Ring::local_integers(5).unwrap();
        assert!(Scalar::from_fraction(z5, 3, 2).unwrap().is_unit());
        assert!(!Scalar::from_fraction(z5, 10, 3).unwrap().is_unit());
        assert_eq!(Scalar::from_fraction(z5, 50, 3).unwrap().valuation(), Some(2));
    }

    #[test]
    fn inverses() {
        let f5 = Ring::prime_field(5).unwrap();
        assert_eq!(Scalar::from_int(f5, 2).inv().unwrap(), Scalar::from_int(f5, 3));
        assert_eq!(q(2, 3).inv().unwrap(), q(3, 2));
        let z7 = Ring::local_integers(7).unwrap();
        assert!(matches!(
            Scalar::from_int(z7, 7).inv(),
            Err(CoeffError::NonUnit { .. })
        ));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let f5 = Ring::prime_field(5).unwrap();
        let err = q(1, 2).try_add(&Scalar::from_int(f5, 1)).unwrap_err();
        assert_eq!(err, CoeffError::RingMismatch(Ring::Rationals, f5));
    }

    #[test]
    fn local_denominator_must_be_prime_to_p() {
        let z7 = Ring::local_integers(7).unwrap();
        assert!(Scalar::parse(z7, "1/14").is_err());
        assert_eq!(Scalar::parse(z7, "6/4").unwrap().to_string(), "3/2");
        assert!(Ring::prime_field(6).is_err());
    }

    #[test]
    fn unit_range_examples() {
        let f5 = Ring::prime_field(5).unwrap();
        let two = Scalar::from_int(f5, 2);
        assert_eq!(unit_range(&two, 64).unwrap(), UnitRange::Finite(3));
        assert_eq!(exact_unit_range(&two).unwrap(), Some(3));

        let z7 = Ring::local_integers(7).unwrap();
        let three = Scalar::from_int(z7, 3);
        assert_eq!(unit_range(&three, 64).unwrap(), UnitRange::Finite(5));
        assert_eq!(exact_unit_range(&three).unwrap(), Some(5));

        let two_q = Scalar::from_int(Ring::Rationals, 2);
        assert_eq!(
            unit_range(&two_q, 64).unwrap(),
            UnitRange::UnboundedUpToProbe(64)
        );
        assert!(unit_range(&Scalar::from_int(z7, 14), 64).is_err());
    }

    #[test]
    fn closed_form_matches_probing_for_small_primes() {
        for p in (2..=31).filter(|&p| is_prime(p)) {
            for ring in [Ring::PrimeField(p), Ring::LocalIntegers(p)] {
                for a in 1..p as i64 {
                    for lift in [0, p as i64, -(p as i64)] {
                        let alpha = Scalar::from_int(ring, a + lift);
                        let exact = exact_unit_range(&alpha).unwrap().unwrap();
                        assert_eq!(
                            unit_range(&alpha, 64).unwrap(),
                            UnitRange::Finite(exact),
                            "{ring} alpha={alpha}"
                        );
                    }
                }
            }
        }
    }

    fn ring_strategy() -> impl Strategy<Value = Ring> {
        prop_oneof![
            Just(Ring::Rationals),
            Just(Ring::PrimeField(5)),
            Just(Ring::PrimeField(31)),
            Just(Ring::LocalIntegers(3)),
            Just(Ring::LocalIntegers(7)),
        ]
    }

    fn scalar_strategy() -> impl Strategy<Value = Scalar> {
        (ring_strategy(), -60i64..60, 1i64..40).prop_filter_map("denominator", |(r, a, b)| {
            Scalar::from_fraction(r, a, b).ok()
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(a in scalar_strategy()) {
            if a.is_unit() {
                let b = a.inv().unwrap();
                prop_assert!((&a * &b).is_one());
                prop_assert!((&b * &a).is_one());
            } else {
                prop_assert!(a.inv().is_err());
            }
        }

        #[test]
        fn local_units_are_nonzero_residues(a in -200i64..200, b in 1i64..50) {
            let z7 = Ring::LocalIntegers(7);
            if let Ok(s) = Scalar::from_fraction(z7, a, b) {
                prop_assert_eq!(s.is_unit(), s.residue().unwrap() != 0);
            }
        }

        #[test]
        fn display_parse_roundtrip(a in scalar_strategy()) {
            let back = Scalar::parse(a.ring(), &a.to_string()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
