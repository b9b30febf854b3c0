//! Counting base points of bounded height whose fibre is everywhere locally
//! soluble.
//!
//! Points are processed as orbits under coordinate permutations and sign
//! changes: one sorted tuple `0 <= t_0 <= … <= t_{m-1}` stands for every
//! signed permutation of it. Solubility at p is a table lookup on the
//! valuation and unit class of each coordinate, returning a bitmask over the
//! `2^m` sign vectors, so each orbit costs a handful of lookups.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::density::LocalSolver;
use super::{enumerate_points, Family};
use crate::error::{Error, Result};
use crate::padic::arith::{factor_u64, primes_up_to, smallest_prime_factors};
use crate::padic::Place;
use crate::solubility::{everywhere_locally_soluble, DiagonalForm, Outcome};

/// Counts for one height bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub family: Family,
    #[serde(rename = "B")]
    pub bound: u64,
    #[serde(rename = "N_tot")]
    pub n_tot: u64,
    #[serde(rename = "N_loc")]
    pub n_loc: u64,
    /// Points with a zero coordinate; counted in `N_tot` only.
    pub degenerate_count: u64,
    /// Number of nondegenerate points whose fibre fails at each place.
    pub per_place_failures: BTreeMap<Place, u64>,
    /// Orbits (or points, for the naive census) examined.
    pub work_units: u64,
}

impl CensusReport {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.n_loc, self.n_tot.max(1))
    }

    pub fn ratio_f64(&self) -> f64 {
        self.n_loc as f64 / self.n_tot.max(1) as f64
    }
}

/// Per-prime lookup: coordinate key `(v mod d)·K + class` in mixed radix,
/// value a mask over sign vectors (bit `s` set iff the fibre with coordinate
/// `i` negated for each bit `i` of `s` is soluble).
#[derive(Debug, Clone)]
struct LocalTable {
    modulus: u64,
    index_of: Vec<u32>,
    classes: u64,
    radix: u64,
    masks: Vec<u64>,
}

/// Census tables for one family up to a maximal height.
#[derive(Debug, Clone)]
pub struct CensusEngine {
    family: Family,
    bmax: u64,
    spf: Vec<u32>,
    tables: Vec<Option<LocalTable>>,
    /// Primes checked for every point: 2 and the divisors of d.
    fixed: Vec<u64>,
    /// Failure slot of each place: 0 is the real place.
    slot: Vec<usize>,
    places: Vec<Place>,
    real_mask: u64,
    full: u64,
}

/// Counts bucketed by the height of the point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightTally {
    family: Family,
    n_tot: Vec<u64>,
    n_loc: Vec<u64>,
    degenerate: Vec<u64>,
    work: Vec<u64>,
    /// `failures[slot][height]`.
    failures: Vec<Vec<u64>>,
    places: Vec<Place>,
}

impl CensusEngine {
    pub fn new(family: &Family, bmax: u64) -> Result<Self> {
        family.check_census()?;
        let m = family.nvars();
        if m > 6 {
            return Err(Error::InvalidFamily(format!("census supports at most 6 variables, got {m}")));
        }
        if bmax < 1 || bmax > 1 << 24 {
            return Err(Error::InvalidArgument(format!("height bound {bmax} out of range")));
        }
        let d = family.degree();
        let mut fixed: Vec<u64> = factor_u64(d as u64).into_iter().map(|(p, _)| p).collect();
        if !fixed.contains(&2) {
            fixed.insert(0, 2);
        }
        let mut primes = primes_up_to(bmax);
        primes.extend(fixed.iter().filter(|&&p| p > bmax));
        let top = *primes.iter().max().expect("2 is always present") as usize;
        let full = if m == 6 { u64::MAX } else { (1u64 << (1 << m)) - 1 };
        let mut tables = vec![None; top + 1];
        let mut slot = vec![0; top + 1];
        let mut places = vec![Place::Real];
        for &p in &primes {
            tables[p as usize] = Some(build_table(family, p)?);
            slot[p as usize] = places.len();
            places.push(Place::Finite(p));
        }
        let real_mask = if d % 2 == 0 {
            // Sign vectors 0 and 2^m - 1 are the constant-sign ones.
            full & !1 & !(1u64 << ((1u64 << m) - 1))
        } else {
            full
        };
        Ok(Self {
            family: *family,
            bmax,
            spf: smallest_prime_factors(bmax as usize),
            tables,
            fixed,
            slot,
            places,
            real_mask,
            full,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn max_height(&self) -> u64 {
        self.bmax
    }

    fn empty_tally(&self) -> HeightTally {
        let len = self.bmax as usize + 1;
        HeightTally {
            family: self.family,
            n_tot: vec![0; len],
            n_loc: vec![0; len],
            degenerate: vec![0; len],
            work: vec![0; len],
            failures: vec![vec![0; len]; self.places.len()],
            places: self.places.clone(),
        }
    }

    /// Orbits whose largest coordinate is `≡ partition mod parts`.
    pub fn run_partition(&self, partition: u64, parts: u64) -> Result<HeightTally> {
        if parts == 0 || partition >= parts {
            return Err(Error::InvalidArgument(format!("partition {partition} of {parts}")));
        }
        let mut tally = self.empty_tally();
        let m = self.family.nvars();
        let mut t = vec![0u64; m];
        let mut c = if partition == 0 { parts } else { partition };
        while c <= self.bmax {
            t[m - 1] = c;
            self.fill(&mut t, m - 1, c, &mut tally);
            c += parts;
        }
        Ok(tally)
    }

    /// Chooses `t[j-1] <= t[j]` for `j` down to 1; `g` is the gcd of `t[j..]`.
    fn fill(&self, t: &mut [u64], j: usize, g: u64, tally: &mut HeightTally) {
        if j == 0 {
            if g == 1 {
                self.visit(t, tally);
            }
            return;
        }
        let top = t[j];
        for x in 0..=top {
            t[j - 1] = x;
            let g2 = if g == 1 { 1 } else { gcd(g, x) };
            self.fill(t, j - 1, g2, tally);
        }
    }

    fn visit(&self, t: &[u64], tally: &mut HeightTally) {
        let m = t.len();
        let h = t[m - 1] as usize;
        tally.work[h] += 1;
        // Distinct permutations: m! / ∏ run!.
        let mut perms = FACTORIAL[m];
        let mut run = 1;
        for i in 1..m {
            if t[i] == t[i - 1] {
                run += 1;
                perms /= run;
            } else {
                run = 1;
            }
        }
        let zeros = t.iter().take_while(|&&x| x == 0).count() as u32;
        if zeros > 0 {
            let n = perms << (m as u32 - zeros - 1);
            tally.n_tot[h] += n;
            tally.degenerate[h] += n;
            return;
        }
        tally.n_tot[h] += perms << (m - 1);

        let mut bad = [0u64; 48];
        let mut nbad = 0;
        let push = |p: u64, bad: &mut [u64; 48], nbad: &mut usize| {
            if !bad[..*nbad].contains(&p) {
                bad[*nbad] = p;
                *nbad += 1;
            }
        };
        for &p in &self.fixed {
            push(p, &mut bad, &mut nbad);
        }
        for &x in t {
            let mut y = x as usize;
            while y > 1 {
                let p = self.spf[y] as usize;
                push(p as u64, &mut bad, &mut nbad);
                while y % p == 0 {
                    y /= p;
                }
            }
        }

        let mut mask = self.real_mask;
        if mask != self.full {
            tally.failures[0][h] += perms * (self.full & !mask).count_ones() as u64 / 2;
        }
        let d = self.family.degree() as u64;
        for &p in &bad[..nbad] {
            let table = self.tables[p as usize].as_ref().expect("table for every prime up to the bound");
            let mut idx = 0u64;
            for &x in t {
                let mut y = x;
                let mut v = 0;
                while y % p == 0 {
                    y /= p;
                    v += 1;
                }
                let class = table.index_of[(y % table.modulus) as usize] as u64;
                idx = idx * table.radix + (v % d) * table.classes + class;
            }
            let mp = table.masks[idx as usize];
            if mp != self.full {
                tally.failures[self.slot[p as usize]][h] += perms * (self.full & !mp).count_ones() as u64 / 2;
            }
            mask &= mp;
        }
        tally.n_loc[h] += perms * mask.count_ones() as u64 / 2;
    }

    /// All partitions, sequentially, merged.
    pub fn run(&self, parts: u64) -> Result<HeightTally> {
        let mut total = self.empty_tally();
        for k in 0..parts {
            total.merge(&self.run_partition(k, parts)?)?;
        }
        Ok(total)
    }
}

const FACTORIAL: [u64; 7] = [1, 1, 2, 6, 24, 120, 720];

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn build_table(family: &Family, p: u64) -> Result<LocalTable> {
    let d = family.degree();
    let m = family.nvars();
    let mut solver = LocalSolver::new(p, d)?;
    let classes = solver.classes.len() as u64;
    let radix = d as u64 * classes;
    let size = radix.pow(m as u32);
    if size > super::DEFAULT_WORK_BUDGET {
        return Err(Error::BudgetExceeded { needed: size, budget: super::DEFAULT_WORK_BUDGET });
    }
    let modulus = solver.classes.modulus;
    let mut masks = vec![0u64; size as usize];
    let mut digits = vec![(0u32, 0u64); m];
    let mut key = vec![(0u32, 0u32); m];
    for (idx, slot) in masks.iter_mut().enumerate() {
        let mut rest = idx as u64;
        // Most significant digit is coordinate 0.
        for i in (0..m).rev() {
            let digit = rest % radix;
            rest /= radix;
            let e = (digit / classes) as u32;
            digits[i] = (e, solver.classes.reps[(digit % classes) as usize]);
        }
        let mut mask = 0u64;
        for s in 0..(1u64 << m) {
            for (i, &(e, rep)) in digits.iter().enumerate() {
                let unit = if s >> i & 1 == 1 { modulus - rep } else { rep };
                key[i] = (e, solver.classes.class_of(unit));
            }
            if solver.soluble(&key)? {
                mask |= 1 << s;
            }
        }
        *slot = mask;
    }
    Ok(LocalTable { modulus, index_of: solver.classes.index_of.clone(), classes, radix, masks })
}

impl HeightTally {
    /// Adds another tally over a disjoint set of points.
    pub fn merge(&mut self, other: &HeightTally) -> Result<()> {
        if self.family != other.family || self.n_tot.len() != other.n_tot.len() || self.places != other.places {
            return Err(Error::InvalidArgument("tallies from different engines".into()));
        }
        let add = |a: &mut Vec<u64>, b: &Vec<u64>| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.n_tot, &other.n_tot);
        add(&mut self.n_loc, &other.n_loc);
        add(&mut self.degenerate, &other.degenerate);
        add(&mut self.work, &other.work);
        for (a, b) in self.failures.iter_mut().zip(&other.failures) {
            add(a, b);
        }
        Ok(())
    }

    /// Cumulative counts at each bound of the ladder.
    pub fn reports(&self, ladder: &[u64]) -> Result<Vec<CensusReport>> {
        let top = self.n_tot.len() as u64 - 1;
        ladder
            .iter()
            .map(|&b| {
                if b < 1 || b > top {
                    return Err(Error::InvalidArgument(format!("bound {b} outside 1..={top}")));
                }
                let upto = b as usize + 1;
                let sum = |v: &Vec<u64>| v[..upto].iter().sum::<u64>();
                let per_place_failures = self
                    .places
                    .iter()
                    .zip(&self.failures)
                    .filter_map(|(pl, f)| {
                        let n = sum(f);
                        (n > 0).then_some((*pl, n))
                    })
                    .collect();
                Ok(CensusReport {
                    family: self.family,
                    bound: b,
                    n_tot: sum(&self.n_tot),
                    n_loc: sum(&self.n_loc),
                    degenerate_count: sum(&self.degenerate),
                    per_place_failures,
                    work_units: sum(&self.work),
                })
            })
            .collect()
    }
}

/// Census at one height bound.
pub fn census(family: &Family, bound: u64) -> Result<CensusReport> {
    let mut r = census_ladder(family, &[bound], 1)?;
    Ok(r.pop().expect("one bound"))
}

/// Census at every bound of a ladder from a single pass, over `parts`
/// partitions run one after another.
pub fn census_ladder(family: &Family, ladder: &[u64], parts: u64) -> Result<Vec<CensusReport>> {
    let bmax = *ladder.iter().max().ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
    let engine = CensusEngine::new(family, bmax)?;
    engine.run(parts)?.reports(ladder)
}

/// Reference census deciding every point separately.
pub fn census_naive(family: &Family, bound: u64) -> Result<CensusReport> {
    family.check_census()?;
    let mut report = CensusReport {
        family: *family,
        bound,
        n_tot: 0,
        n_loc: 0,
        degenerate_count: 0,
        per_place_failures: BTreeMap::new(),
        work_units: 0,
    };
    for pt in enumerate_points(family.base_dim(), bound)? {
        report.n_tot += 1;
        report.work_units += 1;
        if pt.coordinates().contains(&0) {
            report.degenerate_count += 1;
            continue;
        }
        let form = DiagonalForm::new(family.degree(), pt.coordinates().to_vec())?;
        let local = everywhere_locally_soluble(&form)?;
        match local.outcome {
            Outcome::Soluble => report.n_loc += 1,
            Outcome::Insoluble => {
                for pl in local.failing_places() {
                    *report.per_place_failures.entry(pl).or_insert(0) += 1;
                }
            }
            Outcome::Undecided => return Err(Error::Undecided(format!("fibre over {pt}"))),
        }
    }
    Ok(report)
}
