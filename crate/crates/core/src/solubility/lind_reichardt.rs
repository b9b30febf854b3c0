//! The genus-one curve `2y² = x⁴ − 17z⁴` in `P(1,2,1)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::padic::arith::{pow_mod, primes_up_to};
use crate::padic::{legendre_u64, MultiPoly, Place};
use crate::symbols::residue_tree_search_from;

use super::{Outcome, SolubilityVerdict, Witness};

/// `2y² − x⁴ + 17z⁴` in the variables `(x, y, z)`.
pub fn lind_reichardt_poly() -> MultiPoly {
    MultiPoly::new(3, vec![(2, vec![0, 2, 0]), (-1, vec![4, 0, 0]), (17, vec![0, 0, 4])])
}

/// Level-1 roots of the two charts covering weighted-primitive points:
/// `x = 1` (y, z free) and `x ≡ 0, z = 1` (y free). If `p | x` and `p | z`
/// then `p² | y`, so such points are not primitive.
pub(crate) fn chart_roots(p: u64) -> Vec<(usize, Vec<u64>)> {
    let mut roots = Vec::new();
    for y in 0..p {
        for z in 0..p {
            roots.push((0, vec![1, y, z]));
        }
    }
    for y in 0..p {
        roots.push((2, vec![0, y, 1]));
    }
    roots
}

/// Decides `C(Q_v) ≠ ∅` for the Lind-Reichardt curve.
pub fn lind_reichardt_local(v: &Place, max_level: u32) -> Result<SolubilityVerdict> {
    let verdict = |outcome, witness, searched_level| SolubilityVerdict { place: *v, outcome, witness, searched_level };
    let p = match v {
        // x = 2, z = 0: 2y² = 16.
        Place::Real => return Ok(verdict(Outcome::Soluble, Some(Witness::RealSigns(vec![1, 1, 0])), 0)),
        Place::Finite(p) => *p,
    };
    Place::finite(p)?;
    match residue_tree_search_from(&lind_reichardt_poly(), p, max_level, chart_roots(p)) {
        Ok(Some((point, level))) => Ok(verdict(Outcome::Soluble, Some(Witness::Residue { point, level }), level)),
        Ok(None) => Ok(verdict(Outcome::Insoluble, None, max_level)),
        Err(crate::error::Error::Undecided(_)) => Ok(verdict(Outcome::Undecided, None, max_level)),
        Err(e) => Err(e),
    }
}

/// The finite checks behind the absence of rational points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LindReichardtCertificate {
    /// `{j⁴ mod 17 : j ≠ 0}`.
    pub fourth_powers_mod_17: Vec<u64>,
    /// `s` with `s² ≡ 2 mod 17`.
    pub sqrt_two: u64,
    /// `s` with `s² ≡ −1 mod 17`.
    pub sqrt_minus_one: u64,
    pub q_check: u64,
    /// Odd primes `q ≤ q_check` with `(17/q) = 1`; each also has `(q/17) = 1`.
    pub reciprocity_instances: Vec<u64>,
    pub two_is_fourth_power: bool,
}

impl LindReichardtCertificate {
    pub fn assemble(q_check: u64) -> Self {
        let mut fourth_powers_mod_17: Vec<u64> = (1..17).map(|j| pow_mod(j, 4, 17)).collect();
        fourth_powers_mod_17.sort_unstable();
        fourth_powers_mod_17.dedup();
        let sqrt_of = |t: u64| (1..17).find(|&s| s * s % 17 == t).unwrap_or(0);
        let reciprocity_instances = primes_up_to(q_check)
            .into_iter()
            .filter(|&q| q != 2 && q != 17 && legendre_u64(17 % q, q) == 1)
            .collect();
        Self {
            two_is_fourth_power: fourth_powers_mod_17.contains(&2),
            fourth_powers_mod_17,
            sqrt_two: sqrt_of(2),
            sqrt_minus_one: sqrt_of(16),
            q_check,
            reciprocity_instances,
        }
    }

    /// All checks pass: 2 and −1 are squares, each instance satisfies
    /// reciprocity, and 2 is not a fourth power mod 17.
    pub fn holds(&self) -> bool {
        self.sqrt_two != 0
            && self.sqrt_minus_one != 0
            && self.reciprocity_instances.iter().all(|&q| legendre_u64(q % 17, 17) == 1)
            && !self.two_is_fourth_power
    }
}

/// Assembles the certificate with `q ≤ 1000` and reports whether it holds.
pub fn lind_reichardt_global_insoluble() -> bool {
    LindReichardtCertificate::assemble(1000).holds()
}
