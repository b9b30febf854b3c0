//! Local densities `c_v`: the Haar measure of the coefficient vectors in
//! `Z_p^m` whose fibre has a `Q_p`-point.
//!
//! Solubility at p depends only on `v_p(a_i) mod d` and the class of the unit
//! part of `a_i` in `Z_p^× / (Z_p^×)^d`, which is read off modulo `p^r`.
//! The measure of each such state is explicit, so the density is a finite sum.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::delta::delta_invariant;
use super::Family;
use crate::error::{Error, Result};
use crate::padic::arith::{checked_pow, pow_mod, primes_up_to};
use crate::padic::Place;
use crate::solubility::{default_level, power_class_precision, solve_padic, DiagonalForm, Outcome};
use crate::RationalQ;

/// Default cap on the number of residue states an exhaustive run may visit.
pub const DEFAULT_WORK_BUDGET: u64 = 10_000_000;

/// Unit classes modulo d-th powers, read off modulo `p^r`.
#[derive(Debug, Clone)]
pub(crate) struct PowerClasses {
    pub modulus: u64,
    /// Class of each residue mod `p^r` (`u32::MAX` for non-units).
    pub index_of: Vec<u32>,
    /// Smallest positive residue in each class.
    pub reps: Vec<u64>,
}

impl PowerClasses {
    pub fn new(p: u64, d: u32) -> Result<Self> {
        let r = power_class_precision(p, d);
        let modulus = checked_pow(p, r).ok_or(Error::PrecisionOverflow { p, level: r })?;
        if modulus > 1 << 26 {
            return Err(Error::Unsupported(format!("unit class table for p = {p} is too large")));
        }
        let units: Vec<u64> = (1..modulus).filter(|u| u % p != 0).collect();
        let mut powers: Vec<u64> = units.iter().map(|&u| pow_mod(u, d as u64, modulus)).collect();
        powers.sort_unstable();
        powers.dedup();
        let mut index_of = vec![u32::MAX; modulus as usize];
        let mut reps = Vec::new();
        for &u in &units {
            if index_of[u as usize] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(u);
            for &w in &powers {
                index_of[((u as u128 * w as u128) % modulus as u128) as usize] = c;
            }
        }
        Ok(Self { modulus, index_of, reps })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, unit: u64) -> u32 {
        self.index_of[(unit % self.modulus) as usize]
    }
}

/// Memoised `Q_p`-solubility keyed by `(v mod d, class)` per coefficient.
#[derive(Debug)]
pub(crate) struct LocalSolver {
    pub p: u64,
    pub degree: u32,
    pub classes: PowerClasses,
    memo: HashMap<Vec<(u32, u32)>, bool>,
}

impl LocalSolver {
    pub fn new(p: u64, degree: u32) -> Result<Self> {
        Ok(Self { p, degree, classes: PowerClasses::new(p, degree)?, memo: HashMap::new() })
    }

    /// Solubility of `Σ p^{e_i} rep(c_i) x_i^d`.
    pub fn soluble(&mut self, key: &[(u32, u32)]) -> Result<bool> {
        let mut sorted = key.to_vec();
        sorted.sort_unstable();
        if let Some(&b) = self.memo.get(&sorted) {
            return Ok(b);
        }
        let mut coeffs = Vec::with_capacity(sorted.len());
        for &(e, c) in &sorted {
            let a = checked_pow(self.p, e)
                .and_then(|pe| pe.checked_mul(self.classes.reps[c as usize]))
                .and_then(|a| i64::try_from(a).ok())
                .ok_or(Error::PrecisionOverflow { p: self.p, level: e })?;
            coeffs.push(a);
        }
        let form = DiagonalForm::new(self.degree, coeffs.clone())?;
        let verdict = solve_padic(&form, self.p, default_level(&form, self.p))?;
        let b = match verdict.outcome {
            Outcome::Soluble => true,
            Outcome::Insoluble => false,
            Outcome::Undecided => {
                return Err(Error::Undecided(format!(
                    "fibre with coefficients {coeffs:?} at p = {} (level {})",
                    self.p, verdict.searched_level
                )))
            }
        };
        self.memo.insert(sorted, b);
        Ok(b)
    }
}

/// How a finite-place density is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    /// Exact sum over residue states; `level` must reach the unit-class precision.
    Exhaustive { level: u32 },
    /// Monte Carlo over Haar-random coefficient vectors.
    Sample { count: u64, level: u32, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityValue {
    Exact(RationalQ),
    /// Mean with a 95% normal-approximation half-width.
    Estimate { mean: f64, half_width: f64 },
}

impl DensityValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            DensityValue::Exact(q) => ratio_to_f64(q),
            DensityValue::Estimate { mean, .. } => *mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDensity {
    pub place: Place,
    pub value: DensityValue,
    /// `sign_patterns`, `exhaustive` or `sample`.
    pub method: String,
    pub level: u32,
}

pub(crate) fn ratio_to_f64(q: &RationalQ) -> f64 {
    // Scale so both sides fit an f64 mantissa comfortably.
    let shift = q.denom().bits().saturating_sub(60).max(q.numer().bits().saturating_sub(60));
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `c_v` with the default work budget.
pub fn local_density(family: &Family, v: &Place, method: DensityMethod) -> Result<LocalDensity> {
    local_density_with_budget(family, v, method, DEFAULT_WORK_BUDGET)
}

pub fn local_density_with_budget(
    family: &Family,
    v: &Place,
    method: DensityMethod,
    budget: u64,
) -> Result<LocalDensity> {
    family.check_census()?;
    let p = match v {
        Place::Real => {
            // Sign orthants have equal measure; only the two constant-sign
            // orthants fail, and only in even degree.
            let m = family.nvars() as u32;
            let value = if family.degree() % 2 == 0 {
                RationalQ::one() - RationalQ::new(BigInt::one(), BigInt::from(2u32).pow(m - 1))
            } else {
                RationalQ::one()
            };
            return Ok(LocalDensity {
                place: *v,
                value: DensityValue::Exact(value),
                method: "sign_patterns".into(),
                level: 0,
            });
        }
        Place::Finite(p) => *p,
    };
    let mut solver = LocalSolver::new(p, family.degree())?;
    match method {
        DensityMethod::Exhaustive { level } => {
            let r = power_class_precision(p, family.degree());
            if level < r {
                return Err(Error::InsufficientPrecision { level });
            }
            let value = exhaustive(family, &mut solver, budget)?;
            Ok(LocalDensity { place: *v, value: DensityValue::Exact(value), method: "exhaustive".into(), level })
        }
        DensityMethod::Sample { count, level, seed } => {
            if count == 0 || level == 0 {
                return Err(Error::InvalidArgument("sampling needs count >= 1 and level >= 1".into()));
            }
            let (mean, half_width) = sample(family, &mut solver, count, level, seed)?;
            Ok(LocalDensity {
                place: *v,
                value: DensityValue::Estimate { mean, half_width },
                method: "sample".into(),
                level,
            })
        }
    }
}

/// `Σ_states S(state)·∏ μ(e_i, c_i)` where a coordinate has
/// `P(v ≡ e mod d, class c) = (p-1)p^{d-1-e} / ((p^d - 1)·K)`.
fn exhaustive(family: &Family, solver: &mut LocalSolver, budget: u64) -> Result<RationalQ> {
    let d = family.degree();
    let m = family.nvars();
    let k = solver.classes.len();
    let radix = d as u64 * k as u64;
    let states = radix.checked_pow(m as u32).unwrap_or(u64::MAX);
    if states > budget {
        return Err(Error::BudgetExceeded { needed: states, budget });
    }
    let p = BigInt::from(solver.p);
    let weight: Vec<BigInt> = (0..d).map(|e| (&p - 1u32) * p.pow(d - 1 - e)).collect();
    let mut total = BigInt::zero();
    let mut key = vec![(0u32, 0u32); m];
    for idx in 0..states {
        let mut rest = idx;
        let mut w = BigInt::one();
        for slot in key.iter_mut() {
            let digit = rest % radix;
            rest /= radix;
            let e = (digit / k as u64) as u32;
            *slot = (e, (digit % k as u64) as u32);
            w *= &weight[e as usize];
        }
        if solver.soluble(&key)? {
            total += w;
        }
    }
    let denom = (p.pow(d) - 1u32).pow(m as u32) * BigInt::from(k).pow(m as u32);
    Ok(RationalQ::new(total, denom))
}

/// One Haar-random coordinate as `(v mod d, class)`, drawing `level` digits
/// at a time.
fn draw_coordinate(rng: &mut ChaCha8Rng, solver: &LocalSolver, block: u64, level: u32) -> (u32, u32, bool) {
    let p = solver.p;
    let mut v = 0u32;
    let mut x = rng.gen_range(0..block);
    while x == 0 {
        v += level;
        x = rng.gen_range(0..block);
    }
    let mut known = level;
    while x % p == 0 {
        x /= p;
        v += 1;
        known -= 1;
    }
    let modulus = solver.classes.modulus;
    let mut have = 1u64;
    for _ in 0..known {
        have = have.saturating_mul(p);
        if have >= modulus {
            break;
        }
    }
    if have < modulus {
        // Too few known digits for the unit class: draw the missing ones.
        x = x % have + have * rng.gen_range(0..modulus / have);
    }
    (v % solver.degree, solver.classes.class_of(x), v > 0)
}

fn sample(family: &Family, solver: &mut LocalSolver, count: u64, level: u32, seed: u64) -> Result<(f64, f64)> {
    let p = solver.p;
    let block = checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = family.nvars();
    let mut key = vec![(0u32, 0u32); m];
    let mut hits = 0u64;
    let mut accepted = 0u64;
    while accepted < count {
        let mut all_divisible = true;
        for slot in key.iter_mut() {
            let (e, c, divisible) = draw_coordinate(&mut rng, solver, block, level);
            *slot = (e, c);
            all_divisible &= divisible;
        }
        if all_divisible {
            continue;
        }
        accepted += 1;
        if solver.soluble(&key)? {
            hits += 1;
        }
    }
    let n = count as f64;
    let mean = hits as f64 / n;
    let half_width = 1.96 * (mean * (1.0 - mean) / n).sqrt();
    Ok((mean, half_width))
}

/// `c_∞·∏_{p <= bound} c_p` with a lower envelope for the omitted primes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProduct {
    pub family: Family,
    pub prime_bound: u64,
    pub value: f64,
    /// Present when every factor was exact.
    pub exact: Option<RationalQ>,
    pub factors: Vec<LocalDensity>,
    /// `∏_{p > bound} (1 - C(m,2)/p^2)`.
    pub tail_factor: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Truncated Euler product of local densities. Families with `Δ(π) ≠ 0`
/// have density zero and are rejected.
pub fn density_product(family: &Family, prime_bound: u64) -> Result<DensityProduct> {
    density_product_with_budget(family, prime_bound, DEFAULT_WORK_BUDGET)
}

/// As [`density_product`]; primes whose exact sum would exceed `budget`
/// states are sampled instead.
pub fn density_product_with_budget(family: &Family, prime_bound: u64, budget: u64) -> Result<DensityProduct> {
    family.check_census()?;
    let delta = delta_invariant(family)?;
    if !delta.total.is_zero() {
        return Err(Error::InvalidFamily(format!(
            "Δ(π) = {} ≠ 0 for {family}: the proportion of everywhere locally soluble fibres tends to 0",
            delta.total
        )));
    }
    let mut factors = vec![local_density(family, &Place::Real, DensityMethod::Exhaustive { level: 1 })?];
    for p in primes_up_to(prime_bound) {
        let level = power_class_precision(p, family.degree());
        let place = Place::Finite(p);
        let c = match local_density_with_budget(family, &place, DensityMethod::Exhaustive { level }, budget) {
            Err(Error::BudgetExceeded { .. }) => local_density(
                family,
                &place,
                DensityMethod::Sample { count: 100_000, level: level.max(2), seed: p },
            )?,
            other => other?,
        };
        factors.push(c);
    }
    let mut exact = Some(RationalQ::one());
    let mut value = 1.0;
    for f in &factors {
        value *= f.value.to_f64();
        exact = match (&exact, &f.value) {
            (Some(acc), DensityValue::Exact(q)) => Some(acc * q),
            _ => None,
        };
    }
    if let Some(q) = &exact {
        value = ratio_to_f64(q);
    }
    let m = family.nvars() as f64;
    let tail_factor = tail_envelope(m * (m - 1.0) / 2.0, prime_bound);
    Ok(DensityProduct {
        family: *family,
        prime_bound,
        value,
        exact,
        factors,
        tail_factor,
        lower: value * tail_factor,
        upper: value,
    })
}

/// `∏_{p > bound} (1 - k/p^2)`, explicit up to `LIMIT` and bounded beyond it
/// by `exp(-2k·Σ_{n > LIMIT} 1/n^2) >= exp(-2k/LIMIT)`.
fn tail_envelope(k: f64, bound: u64) -> f64 {
    const LIMIT: u64 = 2_000_000;
    let mut log = 0.0;
    for p in primes_up_to(LIMIT) {
        if p > bound {
            let x = k / (p as f64 * p as f64);
            if x >= 1.0 {
                return 0.0;
            }
            log += (-x).ln_1p();
        }
    }
    (log - 2.0 * k / LIMIT as f64).exp()
}
