//! Scalar abstractions.
//!
//! Exact arithmetic is generic over [`Int`], implemented for machine integers
//! and [`num_bigint::BigInt`]; rationals are [`num_rational::Ratio`] over any
//! such integer. Floating-point routines (zeta values, fits, Monte Carlo
//! intervals) are generic over [`Real`].

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive};

/// An exact signed integer type usable as the base of the rationals.
pub trait Int:
    Integer + Signed + Clone + FromPrimitive + ToPrimitive + Debug + Display + Hash + Send + Sync
{
    /// Residue of `self` modulo `m`, in `[0, m)`.
    fn rem_u64(&self, m: u64) -> u64 {
        let r = self.mod_floor(&Self::from_u64(m).expect("modulus fits the integer type"));
        r.to_u64().expect("residue fits in u64")
    }
}

impl<T> Int for T where
    T: Integer + Signed + Clone + FromPrimitive + ToPrimitive + Debug + Display + Hash + Send + Sync
{
}

/// Exact rationals over an [`Int`].
pub type Rational<T> = Ratio<T>;

/// A floating-point scalar (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync {}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync {}
