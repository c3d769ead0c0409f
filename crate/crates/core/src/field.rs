//! Arithmetic in the prime field F_d.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut i = 5u64;
    while i * i <= n {
        if n.is_multiple_of(i) || n.is_multiple_of(i + 2) {
            return false;
        }
        i += 6;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// The first `count` primes.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 2;
    while out.len() < count {
        if is_prime(p) {
            out.push(p);
        }
        p += 1;
    }
    out
}

/// Checks that `d` can serve as a field modulus.
pub fn check_prime_modulus(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::ModulusTooSmall(d));
    }
    if !is_prime(d) {
        return Err(Error::CompositeModulus(d));
    }
    Ok(())
}

/// An element of F_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    value: u64,
    modulus: u64,
}

impl FieldElem {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        check_prime_modulus(modulus)?;
        if value >= modulus {
            return Err(Error::FieldValueOutOfRange { value, modulus });
        }
        Ok(Self { value, modulus })
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(value: i64, modulus: u64) -> Result<Self> {
        check_prime_modulus(modulus)?;
        Ok(Self::from_reduced(value.rem_euclid(modulus as i64) as u64, modulus))
    }

    /// Constructor for callers that already hold a reduced value and a checked modulus.
    pub(crate) fn from_reduced(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        Self { value, modulus }
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Result<Self> {
        Self::new(1, modulus)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(Self::from_reduced(inv_mod(self.value, self.modulus), self.modulus))
    }

    fn same_field(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "field elements from different fields");
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self::from_reduced((self.value + rhs.value) % self.modulus, self.modulus)
    }
}

impl Sub for FieldElem {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self::from_reduced((self.value + self.modulus - rhs.value) % self.modulus, self.modulus)
    }
}

impl Mul for FieldElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.same_field(rhs);
        Self::from_reduced(mul_mod(self.value, rhs.value, self.modulus), self.modulus)
    }
}

impl Neg for FieldElem {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_reduced((self.modulus - self.value) % self.modulus, self.modulus)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat's little theorem; `m` must be prime and `a` nonzero mod `m`.
pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_003));
        assert!(is_prime(10_007));
        assert_eq!(next_prime(1_000_000), 1_000_003);
        assert_eq!(primes(25).last(), Some(&97));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(FieldElem::new(1, 4), Err(Error::CompositeModulus(4)));
        assert_eq!(FieldElem::new(0, 1), Err(Error::ModulusTooSmall(1)));
        assert!(matches!(
            FieldElem::new(5, 5),
            Err(Error::FieldValueOutOfRange { .. })
        ));
    }

    #[test]
    fn arithmetic_mod_five() {
        let a = FieldElem::new(3, 5).unwrap();
        let b = FieldElem::new(4, 5).unwrap();
        assert_eq!((a + b).value(), 2);
        assert_eq!((a - b).value(), 4);
        assert_eq!((a * b).value(), 2);
        assert_eq!((-a).value(), 2);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
        assert_eq!(FieldElem::zero(5).unwrap().inv(), Err(Error::ZeroInverse));
        assert_eq!(FieldElem::reduce(-7, 5).unwrap().value(), 3);
    }

    #[test]
    fn every_nonzero_element_inverts() {
        for d in [2u64, 3, 5, 7, 11, 13] {
            for v in 1..d {
                let x = FieldElem::new(v, d).unwrap();
                assert_eq!((x * x.inv().unwrap()).value(), 1);
            }
        }
    }
}
