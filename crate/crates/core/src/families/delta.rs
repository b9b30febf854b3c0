//! Split-fibre invariants `δ_D`, `Δ(π)` and the decay-exponent fit.

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{CensusReport, Family};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorDelta {
    pub divisor: usize,
    pub variables: usize,
    pub degree: u32,
    pub delta: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub family: Family,
    pub per_divisor: Vec<DivisorDelta>,
    /// `Δ(π) = Σ (1 - δ_D)`.
    pub total: Ratio<i64>,
}

/// Fraction of the affine maps `j ↦ s·j + t` of `Z/d` (`s` a unit) that fix
/// some point, by enumeration.
pub fn affine_fixed_point_fraction(d: u32) -> Ratio<i64> {
    let d = d as i64;
    let units: Vec<i64> = (1..=d).filter(|&s| gcd(s % d, d) == 1).collect();
    let mut fixing = 0i64;
    for &s in &units {
        for t in 0..d {
            if (0..d).any(|j| (s * j + t - j).rem_euclid(d) == 0) {
                fixing += 1;
            }
        }
    }
    Ratio::new(fixing, d * units.len() as i64)
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// `δ_D` for each coordinate divisor and their defect sum.
///
/// Over `{a_i = 0}` the fibre is the diagonal form in the remaining
/// variables. With three or more it is a geometrically integral cone, so
/// `δ = 1`. With two it is `d` lines `x = ζ^j·α·y`, permuted by the affine
/// group of `Z/d` (Kummer translations, cyclotomic scalings). With one it is
/// a multiple point and `δ = 0`.
pub fn delta_invariant(family: &Family) -> Result<DeltaReport> {
    let mut per_divisor = Vec::new();
    let mut total = Ratio::zero();
    for desc in family.divisors() {
        let delta = match desc.variables {
            0 => return Err(Error::InvalidFamily("empty residual fibre".into())),
            1 => Ratio::zero(),
            2 => affine_fixed_point_fraction(desc.degree),
            _ => Ratio::from_integer(1),
        };
        total += Ratio::from_integer(1) - delta;
        per_divisor.push(DivisorDelta {
            divisor: desc.divisor,
            variables: desc.variables,
            degree: desc.degree,
            delta,
        });
    }
    Ok(DeltaReport { family: *family, per_divisor, total })
}

/// Least-squares fit of `log(N_loc/B^{n+1}) = c - x·log log B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit<R> {
    pub exponent: R,
    pub intercept: R,
    /// Root-mean-square residual of the fit.
    pub residual: R,
    pub points: usize,
}

pub fn decay_exponent_fit<R: Real>(reports: &[CensusReport]) -> Result<DecayFit<R>> {
    if reports.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 reports, got {}", reports.len())));
    }
    let family = reports[0].family;
    if reports.iter().any(|r| r.family != family) {
        return Err(Error::InvalidArgument("reports come from different families".into()));
    }
    if reports.windows(2).any(|w| w[1].bound <= w[0].bound) {
        return Err(Error::InvalidArgument("bounds must be strictly increasing".into()));
    }
    let r = |x: f64| R::from_f64(x).expect("representable");
    let k = family.nvars() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for rep in reports {
        if rep.n_loc == 0 || rep.bound < 3 {
            return Err(Error::InvalidArgument(format!("report at B = {} cannot be fitted", rep.bound)));
        }
        let b = rep.bound as f64;
        xs.push(r(b.ln().ln()));
        ys.push(r((rep.n_loc as f64).ln() - k * b.ln()));
    }
    let n = r(xs.len() as f64);
    let mx = xs.iter().fold(R::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(R::zero(), |a, &y| a + y) / n;
    let mut sxx = R::zero();
    let mut sxy = R::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = xs.iter().zip(&ys).fold(R::zero(), |a, (&x, &y)| {
        let e = y - (intercept + slope * x);
        a + e * e
    });
    Ok(DecayFit { exponent: -slope, intercept, residual: (sse / n).sqrt(), points: xs.len() })
}
