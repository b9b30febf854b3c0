//! Local-global tools over Q: p-adic arithmetic, Hilbert symbols and Hasse
//! invariants, local solubility of diagonal forms, quaternion classes on
//! curves, and point-count statistics for families of diagonal forms.

pub mod brauer;
pub mod error;
pub mod families;
pub mod padic;
pub mod scalar;
pub mod solubility;
pub mod symbols;

pub use error::{Error, Result};
pub use families::{CensusReport, Family, ProjPointQ};
pub use padic::Place;
pub use symbols::{BrauerInvariant, SymbolPair};

/// Exact rationals with arbitrary-precision integers.
pub type RationalQ = scalar::Rational<num_bigint::BigInt>;

/// Quaternion symbols over exact rationals.
pub type SymbolPairQ = SymbolPair<num_bigint::BigInt>;

/// Quaternion symbols over machine-size rationals.
pub type SymbolPairI64 = SymbolPair<i64>;

/// Schanuel constants in double precision.
pub type SchanuelConstantsF64 = families::SchanuelConstantsQ<f64>;

/// Decay fits in double precision.
pub type DecayFitF64 = families::DecayFit<f64>;
