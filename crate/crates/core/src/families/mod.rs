//! Point counts for diagonal families `Σ a_i x_i^d = 0` parametrised by
//! `(a_0 : … : a_{m-1}) ∈ P^{m-1}(Q)`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

mod census;
mod delta;
mod density;

pub use census::{census, census_ladder, census_naive, CensusEngine, CensusReport, HeightTally};
pub use delta::{
    affine_fixed_point_fraction, decay_exponent_fit, delta_invariant, DecayFit, DeltaReport, DivisorDelta,
};
pub use density::{
    density_product, density_product_with_budget, local_density, local_density_with_budget, DensityMethod, DensityProduct, DensityValue,
    LocalDensity, DEFAULT_WORK_BUDGET,
};

/// The family of diagonal forms of degree `d` in `m` variables over `P^{m-1}`.
/// Serialized by name, as accepted by [`FromStr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Family {
    degree: u32,
    nvars: usize,
}

/// What remains of the fibre over the divisor `{a_i = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreDescriptor {
    pub divisor: usize,
    pub variables: usize,
    pub degree: u32,
}

impl Family {
    pub fn new(degree: u32, nvars: usize) -> Result<Self> {
        if degree < 2 || nvars < 2 {
            return Err(Error::InvalidFamily(format!("need d >= 2 and m >= 2, got d = {degree}, m = {nvars}")));
        }
        if nvars > 8 {
            return Err(Error::InvalidFamily(format!("at most 8 variables supported, got {nvars}")));
        }
        Ok(Self { degree, nvars })
    }

    /// Conics `a_0 x^2 + a_1 y^2 + a_2 z^2`.
    pub fn conic() -> Self {
        Self { degree: 2, nvars: 3 }
    }

    /// Diagonal cubic surfaces.
    pub fn cubic4() -> Self {
        Self { degree: 3, nvars: 4 }
    }

    /// Diagonal plane cubics.
    pub fn cubic3() -> Self {
        Self { degree: 3, nvars: 3 }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Dimension of the base.
    pub fn base_dim(&self) -> usize {
        self.nvars - 1
    }

    pub fn divisors(&self) -> Vec<FibreDescriptor> {
        (0..self.nvars)
            .map(|i| FibreDescriptor { divisor: i, variables: self.nvars - 1, degree: self.degree })
            .collect()
    }

    /// Census and density operations rely on `d < m`.
    pub fn check_census(&self) -> Result<()> {
        if (self.degree as usize) < self.nvars {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!(
                "{self} has d = {} >= m = {}; local solubility is only decided for d < m",
                self.degree, self.nvars
            )))
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.degree, self.nvars) {
            (2, 3) => write!(f, "conic"),
            (3, 4) => write!(f, "cubic4"),
            (3, 3) => write!(f, "cubic3"),
            (d, m) => write!(f, "diag:{d}:{m}"),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `conic`, `cubic4`, `cubic3` or `diag:<d>:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conic" => Ok(Self::conic()),
            "cubic4" | "cubic" => Ok(Self::cubic4()),
            "cubic3" => Ok(Self::cubic3()),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() == 3 && parts[0] == "diag" {
                    let d = parts[1].parse().map_err(|_| Error::InvalidFamily(s.to_string()))?;
                    let m = parts[2].parse().map_err(|_| Error::InvalidFamily(s.to_string()))?;
                    Self::new(d, m)
                } else {
                    Err(Error::InvalidFamily(format!("unknown family {s:?}")))
                }
            }
        }
    }
}

/// A point of `P^n(Q)` as coprime integers with first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPointQ {
    coordinates: Vec<i64>,
}

impl ProjPointQ {
    /// Rescales to the canonical representative.
    pub fn new(mut coordinates: Vec<i64>) -> Result<Self> {
        let g = coordinates.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(Error::Zero);
        }
        let lead = coordinates.iter().find(|&&c| c != 0).copied().unwrap_or(1);
        let g = if lead < 0 { -g } else { g };
        for c in &mut coordinates {
            *c /= g;
        }
        Ok(Self { coordinates })
    }

    pub fn coordinates(&self) -> &[i64] {
        &self.coordinates
    }

    pub fn height(&self) -> u64 {
        self.coordinates.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for ProjPointQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coordinates.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

/// Points of `P^n(Q)` of height at most `B`, in lexicographic order of their
/// canonical representatives. Partition `k` of `parts` keeps the points whose
/// leading coordinate is `≡ k mod parts`.
#[derive(Debug, Clone)]
pub struct PointEnumerator {
    n: usize,
    bound: i64,
    partition: u64,
    parts: u64,
    current: Vec<i64>,
    lead: usize,
    done: bool,
}

/// Enumerates `P^n(Q)` up to height `B`.
pub fn enumerate_points(n: usize, bound: u64) -> Result<PointEnumerator> {
    if n < 1 || bound < 1 {
        return Err(Error::InvalidArgument(format!("need n >= 1 and B >= 1, got n = {n}, B = {bound}")));
    }
    let bound = i64::try_from(bound).map_err(|_| Error::InvalidArgument("B too large".into()))?;
    Ok(PointEnumerator::new(n, bound, 0, 1))
}

impl PointEnumerator {
    fn new(n: usize, bound: i64, partition: u64, parts: u64) -> Self {
        // Start one step before (1, -B, ..., -B) with the leading 1 in slot 0.
        let mut current = vec![-bound; n + 1];
        current[0] = 1;
        let mut it = Self { n, bound, partition, parts, current, lead: 0, done: false };
        it.current[n] -= 1;
        it
    }

    /// Restricts to one of `parts` disjoint slices.
    pub fn partition(self, partition: u64, parts: u64) -> Result<Self> {
        if parts == 0 || partition >= parts {
            return Err(Error::InvalidArgument(format!("partition {partition} of {parts}")));
        }
        Ok(Self::new(self.n, self.bound, partition, parts))
    }

    /// Advances the odometer; false once exhausted.
    fn step(&mut self) -> bool {
        let n = self.n;
        let mut i = n;
        loop {
            if i == self.lead {
                // Leading coordinate: 1..=B, then move the lead right.
                if self.current[i] < self.bound {
                    self.current[i] += 1;
                } else {
                    if self.lead == n {
                        return false;
                    }
                    self.current[self.lead] = 0;
                    self.lead += 1;
                    self.current[self.lead] = 1;
                }
                for c in &mut self.current[self.lead + 1..] {
                    *c = -self.bound;
                }
                return true;
            }
            if self.current[i] < self.bound {
                self.current[i] += 1;
                return true;
            }
            self.current[i] = -self.bound;
            i -= 1;
        }
    }
}

impl Iterator for PointEnumerator {
    type Item = ProjPointQ;

    fn next(&mut self) -> Option<ProjPointQ> {
        while !self.done {
            if !self.step() {
                self.done = true;
                break;
            }
            let lead = self.current[self.lead];
            if (lead as u64) % self.parts != self.partition {
                // Skip the whole block under this leading value.
                let tail = self.lead + 1;
                for c in &mut self.current[tail..] {
                    *c = self.bound;
                }
                continue;
            }
            let g = self.current[self.lead..].iter().fold(0i64, |g, &c| g.gcd(&c));
            if g == 1 {
                return Some(ProjPointQ { coordinates: self.current.clone() });
            }
        }
        None
    }
}

/// Möbius function on `0..=n`.
fn mobius_table(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    if n >= 1 {
        mu[0] = 0;
    }
    for i in 2..=n {
        if !composite[i] {
            let mut j = i;
            while j <= n {
                if j > i {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
                j += i;
            }
            let sq = i * i;
            let mut j = sq;
            while j <= n {
                mu[j] = 0;
                j += sq;
            }
        }
    }
    mu
}

/// `#{P ∈ P^n(Q) : H(P) <= B}` by Möbius inversion over the content.
pub fn count_points(n: usize, bound: u64) -> u128 {
    let mu = mobius_table(bound as usize);
    let mut total: i128 = 0;
    for k in 1..=bound {
        let mk = mu[k as usize];
        if mk == 0 {
            continue;
        }
        let side = 2 * (bound / k) as i128 + 1;
        total += mk as i128 * (side.pow(n as u32 + 1) - 1);
    }
    (total / 2) as u128
}

/// Constants of the point-count asymptotic `N(B) ~ C·B^{n+1}` over `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchanuelConstantsQ<R> {
    pub n: usize,
    pub class_number: u32,
    pub real_places: u32,
    pub complex_places: u32,
    pub unit_rank: u32,
    pub regulator: u32,
    pub discriminant: u32,
    pub roots_of_unity: u32,
    pub zeta: R,
    pub coefficient: R,
}

/// `ζ(s)` for integer `s >= 2` by Euler–Maclaurin with cut-off `N` and
/// `terms` Bernoulli corrections.
pub fn zeta<R: Real>(s: u32, cutoff: u32, terms: usize) -> R {
    assert!(s >= 2, "zeta needs s >= 2");
    // B_2, B_4, ..., B_20
    const BERNOULLI: [(f64, f64); 10] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
    ];
    let r = |x: f64| R::from_f64(x).expect("representable");
    let n = r(cutoff as f64);
    let sr = r(s as f64);
    let mut sum = R::zero();
    for k in 1..cutoff {
        sum = sum + r(k as f64).powf(-sr);
    }
    sum = sum + n.powf(R::one() - sr) / (sr - R::one()) + n.powf(-sr) / r(2.0);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j-2) · N^{-s-2j+1}
    let mut rising = sr; // s(s+1)...(s+2j-2), starting at j = 1
    let mut fact = r(2.0); // (2j)!
    for (j, &(num, den)) in BERNOULLI.iter().enumerate().take(terms) {
        let j = j + 1;
        if j > 1 {
            let a = (2 * j - 3) as f64;
            let b = (2 * j - 2) as f64;
            rising = rising * (sr + r(a)) * (sr + r(b));
            fact = fact * r((2 * j - 1) as f64) * r((2 * j) as f64);
        }
        let power = n.powf(-sr - r((2 * j - 1) as f64));
        sum = sum + r(num / den) / fact * rising * power;
    }
    sum
}

/// Leading coefficient `2^{n+1} / (2·ζ(n+1))` of `N(B)/B^{n+1}` over `Q`.
pub fn schanuel_prediction<R: Real>(n: usize) -> Result<SchanuelConstantsQ<R>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let z: R = zeta(n as u32 + 1, 12, 10);
    let two = R::from_f64(2.0).expect("representable");
    let coefficient = two.powi(n as i32 + 1) / (two * z);
    Ok(SchanuelConstantsQ {
        n,
        class_number: 1,
        real_places: 1,
        complex_places: 0,
        unit_rank: 0,
        regulator: 1,
        discriminant: 1,
        roots_of_unity: 2,
        zeta: z,
        coefficient,
    })
}
