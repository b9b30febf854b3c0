//! Valuations, square classes and Legendre symbols over Q and Q_p, plus the
//! Hensel criterion every solubility decision rests on.
//!
//! All p-adic quantities are exact residues modulo an explicit `p^k`; nothing
//! here approximates a p-adic number by a float.

pub mod arith;
mod hensel;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Int, Rational};

pub use hensel::{hensel_liftable, newton_lift, MultiPoly};

/// A place of Q: the real place or a finite prime. Serialized as `"inf"` or
/// the prime as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    /// A finite place; fails unless `p` is prime.
    pub fn finite(p: u64) -> Result<Self> {
        if arith::is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }

    /// Parses `inf`, `real`, `oo` or a prime.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "real" | "oo" | "∞" => Ok(Place::Real),
            t => {
                let p: u64 = t
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad place {t:?}")))?;
                Place::finite(p)
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn as_int<T: Int>(p: u64) -> T {
    T::from_u64(p).expect("prime fits the integer type")
}

/// `v_p(n)` for a nonzero integer, `None` for zero.
pub fn int_valuation<T: Int>(n: &T, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let pt: T = as_int(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pt);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Splits `n = p^v * u` with `p ∤ u`. `n` must be nonzero.
pub fn split_prime<T: Int>(n: &T, p: u64) -> (u32, T) {
    let pt: T = as_int(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pt);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// `v_p(x)`; `None` stands for `+infinity` (i.e. `x = 0`).
pub fn valuation<T: Int>(x: &Rational<T>, p: u64) -> Option<i64> {
    let vn = int_valuation(x.numer(), p)?;
    let vd = int_valuation(x.denom(), p).expect("denominator is nonzero");
    Some(vn as i64 - vd as i64)
}

/// Writes a nonzero rational as `p^v * u` and returns `(v, u mod p^k)`.
pub fn unit_residue<T: Int>(x: &Rational<T>, p: u64, k: u32) -> Result<(i64, u64)> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    let m = arith::checked_pow(p, k).ok_or(Error::PrecisionOverflow { p, level: k })?;
    let (vn, un) = split_prime(x.numer(), p);
    let (vd, ud) = split_prime(x.denom(), p);
    let inv = arith::inv_mod(ud.rem_u64(m), m).expect("unit is invertible");
    Ok((vn as i64 - vd as i64, arith::mul_mod(un.rem_u64(m), inv, m)))
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre_symbol<T: Int>(a: &T, p: u64) -> Result<i8> {
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(legendre_u64(a.rem_u64(p), p))
}

/// Legendre symbol of a residue `a mod p`, `p` an odd prime (unchecked).
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if arith::pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Is the unit `u` (odd for `p = 2`) a square in `Z_p`?
pub fn unit_is_square(u: u64, p: u64) -> bool {
    if p == 2 {
        u % 8 == 1
    } else {
        legendre_u64(u, p) == 1
    }
}

/// Whether the nonzero rational `x` is a square in `Q_v`.
pub fn is_square_in_qv<T: Int>(x: &Rational<T>, v: &Place) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    match *v {
        Place::Real => Ok(x.numer().is_positive() == x.denom().is_positive()),
        Place::Finite(p) => {
            let k = if p == 2 { 3 } else { 1 };
            let (val, u) = unit_residue(x, p, k)?;
            Ok(val % 2 == 0 && unit_is_square(u, p))
        }
    }
}

/// Distinct primes dividing a nonzero integer, by trial division.
pub fn prime_divisors<T: Int>(n: &T) -> Vec<u64> {
    if let Some(m) = n.abs().to_u64() {
        return arith::factor_u64(m).into_iter().map(|(p, _)| p).collect();
    }
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    loop {
        let pt: T = as_int(p);
        if pt.clone() * pt.clone() > n {
            break;
        }
        if (n.clone() % pt.clone()).is_zero() {
            out.push(p);
            while (n.clone() % pt.clone()).is_zero() {
                n = n / pt.clone();
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > T::one() {
        if let Some(m) = n.to_u64() {
            out.push(m);
        }
    }
    out
}

/// An element `p^v * u` of Q_p known to relative precision `p^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicResidue {
    pub p: u64,
    pub level: u32,
    pub valuation: i64,
    pub unit: u64,
}

impl PadicResidue {
    pub fn new(p: u64, level: u32, valuation: i64, unit: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be >= 1".into()));
        }
        let m = arith::checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
        if unit % p == 0 {
            return Err(Error::InvalidArgument(format!("{unit} is not a {p}-adic unit")));
        }
        Ok(Self { p, level, valuation, unit: unit % m })
    }

    pub fn from_rational<T: Int>(x: &Rational<T>, p: u64, level: u32) -> Result<Self> {
        let (valuation, unit) = unit_residue(x, p, level)?;
        Self::new(p, level, valuation, unit)
    }

    /// Square test; needs level >= 3 at p = 2.
    pub fn is_square(&self) -> Result<bool> {
        if self.p == 2 && self.level < 3 {
            return Err(Error::InsufficientPrecision { level: self.level });
        }
        Ok(self.valuation % 2 == 0 && unit_is_square(self.unit, self.p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type Q = Rational<BigInt>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&q(17, 4), 2), Some(-2));
        assert_eq!(valuation(&q(0, 1), 5), None);
        assert_eq!(valuation(&q(34, 1), 17), Some(1));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(&2i64, 17), Ok(1));
        // squares mod 17: {1, 2, 4, 8, 9, 13, 15, 16}
        let squares: Vec<u64> = (1..17u64).map(|x| x * x % 17).collect();
        assert!(!squares.contains(&3));
        assert_eq!(legendre_symbol(&3i64, 17), Ok(-1));
        assert_eq!(legendre_symbol(&17i64, 17), Ok(0));
        assert_eq!(legendre_symbol(&3i64, 2), Err(Error::EvenPrime(2)));
        assert_eq!(legendre_symbol(&3i64, 15), Err(Error::NotPrime(15)));
    }

    #[test]
    fn square_examples() {
        assert!(is_square_in_qv(&q(17, 1), &Place::Finite(2)).unwrap());
        assert!(is_square_in_qv(&q(17, 1), &Place::Real).unwrap());
        assert!(!is_square_in_qv(&q(17, 1), &Place::Finite(5)).unwrap());
        assert_eq!(is_square_in_qv(&q(0, 1), &Place::Real), Err(Error::Zero));
    }

    #[test]
    fn place_construction() {
        assert!(Place::finite(91).is_err());
        assert_eq!(Place::parse("inf").unwrap(), Place::Real);
        assert_eq!(Place::parse("17").unwrap(), Place::Finite(17));
    }

    /// Brute force: search y with y^2 ≡ x to precision p^8 in the correct
    /// valuation window.
    fn square_oracle(n: i64, d: i64, v: Place) -> bool {
        match v {
            Place::Real => (n > 0) == (d > 0),
            Place::Finite(p) => {
                // x is a square iff x*d^2 = n*d is, and n*d is an integer.
                let m = n * d;
                let (val, u) = split_prime(&m, p);
                if val % 2 == 1 {
                    return false;
                }
                let mut modulus = p;
                for _ in 1..8 {
                    if modulus * p > 1 << 20 {
                        break;
                    }
                    modulus *= p;
                }
                let target = u.rem_euclid(modulus as i64) as u64;
                (0..modulus).any(|y| arith::mul_mod(y, y, modulus) == target)
            }
        }
    }

    #[test]
    fn square_test_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(17)] {
            // The oracle caps p^k at 2^20 (p^4 for 17), still far beyond the
            // precision that decides squareness.
            let count = if v == Place::Finite(17) { 40 } else { 500 };
            for _ in 0..count {
                let n: i64 = loop {
                    let n = rng.gen_range(-400i64..=400);
                    if n != 0 {
                        break n;
                    }
                };
                let d: i64 = rng.gen_range(1..=60);
                let got = is_square_in_qv(&q(n, d), &v).unwrap();
                assert_eq!(got, square_oracle(n, d, v), "{n}/{d} at {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in -5000i64..5000, b in 1i64..5000, c in -5000i64..5000, d in 1i64..5000,
                                 p in prop::sample::select(vec![2u64, 3, 5, 7, 17])) {
            prop_assume!(a != 0 && c != 0);
            let x = q(a, b);
            let y = q(c, d);
            prop_assert_eq!(valuation(&(x.clone() * y.clone()), p).unwrap(),
                            valuation(&x, p).unwrap() + valuation(&y, p).unwrap());
        }

        #[test]
        fn squares_are_squares(n in -3000i64..3000, d in 1i64..300,
                               v in prop::sample::select(vec![Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(17)])) {
            prop_assume!(n != 0);
            let x = q(n, d);
            prop_assert!(is_square_in_qv(&(x.clone() * x), &v).unwrap());
        }

        #[test]
        fn legendre_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000,
                                      p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 101])) {
            let lab = legendre_symbol(&(a * b), p).unwrap();
            prop_assert_eq!(lab, legendre_symbol(&a, p).unwrap() * legendre_symbol(&b, p).unwrap());
        }
    }
}
