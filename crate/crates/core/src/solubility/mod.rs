//! Decision procedures for `X(Q_v) ≠ ∅`: real and p-adic solubility of
//! diagonal forms, the conic criterion, everywhere-local solubility, and the
//! Lind-Reichardt curve in weighted projective space.

pub(crate) mod lind_reichardt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::arith::{checked_pow, pow_mod};
use crate::padic::{hensel_liftable, int_valuation, newton_lift, split_prime, MultiPoly, Place};
use crate::symbols::{hilbert_symbol, SymbolPair};

pub use lind_reichardt::{
    lind_reichardt_global_insoluble, lind_reichardt_local, lind_reichardt_poly, LindReichardtCertificate,
};

/// `Σ a_i x_i^d = 0` with nonzero, content-reduced integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalForm {
    degree: u32,
    coefficients: Vec<i64>,
}

impl DiagonalForm {
    /// Builds the form, dividing out the content of the coefficients.
    pub fn new(degree: u32, coefficients: Vec<i64>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidForm(format!("degree {degree} < 2")));
        }
        if coefficients.len() < 2 {
            return Err(Error::InvalidForm("need at least two variables".into()));
        }
        if coefficients.contains(&0) {
            return Err(Error::InvalidForm("coefficients must be nonzero".into()));
        }
        let g = coefficients.iter().fold(0i64, |g, &c| g.gcd(&c));
        let coefficients = coefficients.into_iter().map(|c| c / g).collect();
        Ok(Self { degree, coefficients })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn nvars(&self) -> usize {
        self.coefficients.len()
    }

    pub fn poly(&self) -> MultiPoly {
        MultiPoly::diagonal(&self.coefficients, self.degree)
    }

    /// Primes dividing `d · ∏ a_i`.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = crate::padic::arith::factor_u64(self.degree as u64)
            .into_iter()
            .map(|(p, _)| p)
            .collect();
        for &c in &self.coefficients {
            ps.extend(crate::padic::prime_divisors(&c));
        }
        ps.sort_unstable();
        ps.dedup();
        ps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Soluble,
    Insoluble,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// Residues modulo `p^level` satisfying the strong Hensel criterion.
    Residue { point: Vec<u64>, level: u32 },
    /// Signs of the coordinates of a real zero.
    RealSigns(Vec<i8>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolubilityVerdict {
    pub place: Place,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Deepest level the search reached (exhaustion level for `Insoluble`).
    pub searched_level: u32,
}

impl SolubilityVerdict {
    pub fn is_soluble(&self) -> bool {
        self.outcome == Outcome::Soluble
    }
}

/// Real solubility: odd degree always, even degree iff the signs are mixed.
pub fn solve_real(form: &DiagonalForm) -> SolubilityVerdict {
    let c = form.coefficients();
    let mut signs = vec![0i8; c.len()];
    let outcome = if form.degree() % 2 == 1 {
        // a_0 x_0^d + a_1 x_1^d = 0 has x_1 of sign -sign(a_0 a_1).
        signs[0] = 1;
        signs[1] = if (c[0] > 0) == (c[1] > 0) { -1 } else { 1 };
        Outcome::Soluble
    } else {
        match (c.iter().position(|&a| a > 0), c.iter().position(|&a| a < 0)) {
            (Some(i), Some(j)) => {
                signs[i] = 1;
                signs[j] = 1;
                Outcome::Soluble
            }
            _ => Outcome::Insoluble,
        }
    };
    let witness = (outcome == Outcome::Soluble).then_some(Witness::RealSigns(signs));
    SolubilityVerdict { place: Place::Real, outcome, witness, searched_level: 0 }
}

/// `2·v_p(d²·∏a_i) + 3`, the default search depth.
pub fn default_level(form: &DiagonalForm, p: u64) -> u32 {
    let d = form.degree() as i64;
    let mut v = 2 * int_valuation(&d, p).unwrap_or(0);
    for c in form.coefficients() {
        v += int_valuation(c, p).unwrap_or(0);
    }
    2 * v + 3
}

/// The form after the substitutions `x_i ↦ p^{s_i} x_i` and division by the
/// smallest power of p: `Σ p^{e_i} u_i y_i^d` with `0 <= e_i < d`, `min e_i = 0`.
#[derive(Debug, Clone)]
struct Normalised {
    /// `s_i`, so that a solution `y` of the normalised form gives
    /// `x_i = p^{S - s_i} y_i` for the original, `S = max s_i`.
    shifts: Vec<u32>,
    exponents: Vec<u32>,
    /// `u_i` as signed integers (not reduced).
    units: Vec<i64>,
}

impl Normalised {
    fn new(form: &DiagonalForm, p: u64) -> Self {
        let d = form.degree();
        let mut shifts = Vec::new();
        let mut exponents = Vec::new();
        let mut units = Vec::new();
        for c in form.coefficients() {
            let (v, u) = split_prime(c, p);
            shifts.push(v / d);
            exponents.push(v % d);
            units.push(u);
        }
        let m = *exponents.iter().min().expect("nonempty");
        for e in &mut exponents {
            *e -= m;
        }
        Self { shifts, exponents, units }
    }

    /// The form after substituting `y_i ↦ p y_i` for every coordinate with
    /// `e_i < class` and dividing by `p^class`. Shifts only matter up to a
    /// common offset, so the unsubstituted coordinates move up by one instead
    /// of the substituted ones moving down.
    fn rotate(&self, class: u32, d: u32) -> Self {
        let mut out = self.clone();
        for i in 0..self.exponents.len() {
            if self.exponents[i] < class {
                out.exponents[i] = self.exponents[i] + d - class;
            } else {
                out.shifts[i] += 1;
                out.exponents[i] = self.exponents[i] - class;
            }
        }
        out
    }

    /// The normalised form; `|p^{e_i} u_i| <= |a_i|` so the coefficients are exact.
    fn poly(&self, p: u64, d: u32) -> MultiPoly {
        let coeffs: Vec<i64> = self
            .exponents
            .iter()
            .zip(&self.units)
            .map(|(&e, &u)| p.pow(e) as i64 * u)
            .collect();
        MultiPoly::diagonal(&coeffs, d)
    }
}

/// Residue search for a primitive zero of the form over `Q_p`.
///
/// Coefficient valuations are first reduced below `d` by the substitution
/// `x_i ↦ p x_i`. For `p ∤ d` the search collapses: a level-1 survivor with a
/// unit coordinate in the unit-coefficient block is already Hensel-certified,
/// and a survivor with that block `≡ 0` is handled by substituting again,
/// which rotates the valuation classes. For `p | d` the same rotation runs
/// with residues mod `p^{2v_p(d)+1}`. Returns `Undecided` when `max_level`
/// is below the level a class needs.
pub fn solve_padic(form: &DiagonalForm, p: u64, max_level: u32) -> Result<SolubilityVerdict> {
    Place::finite(p)?;
    let d = form.degree();
    let norm = Normalised::new(form, p);
    let verdict = |outcome, witness, searched_level| SolubilityVerdict {
        place: Place::Finite(p),
        outcome,
        witness,
        searched_level,
    };

    let (y, level, lifter, lifter_level, frame) = if (d as u64) % p != 0 {
        let mut found = None;
        for class in 0..d {
            if class + 1 > max_level {
                return Ok(verdict(Outcome::Undecided, None, max_level));
            }
            let members: Vec<usize> = (0..form.nvars()).filter(|&i| norm.exponents[i] == class).collect();
            let units: Vec<u64> = members.iter().map(|&i| norm.units[i].rem_euclid(p as i64) as u64).collect();
            if let Some(zero) = diagonal_zero_mod_p(&units, d, p) {
                let mut y = vec![0u64; form.nvars()];
                let mut block = vec![0i64; form.nvars()];
                for (&i, z) in members.iter().zip(zero) {
                    y[i] = z;
                    block[i] = norm.units[i];
                }
                // The unit block alone is nonsingular mod p, so it lifts.
                found = Some((y, class + 1, MultiPoly::diagonal(&block, d), 1, norm.clone()));
                break;
            }
        }
        match found {
            Some(f) => f,
            None => return Ok(verdict(Outcome::Insoluble, None, d)),
        }
    } else {
        // A zero with a unit coordinate in the unit block has that partial
        // derivative of valuation t = v_p(d), so it is certified mod p^{2t+1}
        // and every such residue zero lifts. Otherwise the whole block is
        // divisible by p and we rotate as in the tame case.
        let t = int_valuation(&(d as i64), p).expect("p | d");
        let level = 2 * t + 1;
        if level > max_level {
            return Ok(verdict(Outcome::Undecided, None, max_level));
        }
        let modulus = checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
        let mut found = None;
        for class in 0..d {
            let rot = norm.rotate(class, d);
            let block: Vec<bool> = rot.exponents.iter().map(|&e| e == 0).collect();
            if !block.contains(&true) {
                continue;
            }
            let coeffs: Vec<u64> = rot
                .exponents
                .iter()
                .zip(&rot.units)
                .map(|(&e, &u)| {
                    let pe = p.pow(e) as i128;
                    (pe * u as i128).rem_euclid(modulus as i128) as u64
                })
                .collect();
            if let Some(y) = power_sum_zero(&coeffs, &block, d, modulus) {
                let g = rot.poly(p, d);
                found = Some((y, level, g, level, rot));
                break;
            }
        }
        match found {
            Some(f) => f,
            None => return Ok(verdict(Outcome::Insoluble, None, level)),
        }
    };
    let witness = lift_witness(form, &frame, p, &y, &lifter, lifter_level)?;
    Ok(verdict(Outcome::Soluble, Some(witness), level))
}

/// Residues `y` mod `modulus` with `Σ c_i y_i^d ≡ 0` and `y_i` a unit for
/// some `i` in `block`, by dynamic programming over the partial sums.
fn power_sum_zero(coeffs: &[u64], block: &[bool], d: u32, modulus: u64) -> Option<Vec<u64>> {
    let m = modulus as usize;
    // For each d-th power residue: some root, and some unit root.
    let mut any_root = vec![None; m];
    let mut unit_root = vec![None; m];
    for x in 0..modulus {
        let w = pow_mod(x, d as u64, modulus) as usize;
        any_root[w].get_or_insert(x);
        if x.gcd(&modulus) == 1 {
            unit_root[w].get_or_insert(x);
        }
    }
    // back[i][state] = (previous state, chosen y_i); state = 2·sum + flag.
    let mut back: Vec<Vec<Option<(usize, u64)>>> = Vec::with_capacity(coeffs.len());
    let mut reach = vec![false; 2 * m];
    reach[0] = true;
    for (i, &c) in coeffs.iter().enumerate() {
        let mut next = vec![false; 2 * m];
        let mut step = vec![None; 2 * m];
        for state in (0..2 * m).filter(|&s| reach[s]) {
            let (sum, flag) = (state / 2, state % 2);
            for w in 0..m {
                let choices = [(any_root[w], flag), (unit_root[w].filter(|_| block[i]), 1)];
                for (root, f) in choices {
                    let Some(y) = root else { continue };
                    let s2 = 2 * ((sum as u128 + c as u128 * w as u128) % m as u128) as usize + f;
                    if !next[s2] {
                        next[s2] = true;
                        step[s2] = Some((state, y));
                    }
                }
            }
        }
        back.push(step);
        reach = next;
    }
    if !reach[1] {
        return None;
    }
    let mut y = vec![0u64; coeffs.len()];
    let mut state = 1;
    for i in (0..coeffs.len()).rev() {
        let (prev, yi) = back[i][state].expect("reachable state has a predecessor");
        y[i] = yi;
        state = prev;
    }
    Some(y)
}

/// A nontrivial zero of `Σ u_i y_i^d` over `F_p`, scanning projectively
/// normalised vectors (first nonzero coordinate 1) in lexicographic order.
fn diagonal_zero_mod_p(units: &[u64], d: u32, p: u64) -> Option<Vec<u64>> {
    let n = units.len();
    if n < 2 {
        return None;
    }
    let powers: Vec<u64> = (0..p).map(|x| pow_mod(x, d as u64, p)).collect();
    if n == 2 {
        // u_0 + u_1 y^d = 0.
        let target = (p - units[0] % p) % p;
        return (1..p)
            .find(|&y| units[1] * powers[y as usize] % p == target)
            .map(|y| vec![1, y]);
    }
    for lead in 0..n {
        let free = n - lead - 1;
        let count = p.checked_pow(free as u32)?;
        let mut y = vec![0u64; n];
        y[lead] = 1;
        for idx in 0..count {
            let mut r = idx;
            let mut acc = units[lead] % p;
            for i in lead + 1..n {
                y[i] = r % p;
                r /= p;
                acc = (acc + units[i] * powers[y[i] as usize]) % p;
            }
            if acc == 0 {
                return Some(y);
            }
        }
    }
    None
}

/// Turns a zero `y` of the normalised form, certified for `lifter` at
/// `lifter_level`, into residues for the original form that satisfy the
/// strong Hensel criterion there.
fn lift_witness(
    form: &DiagonalForm,
    norm: &Normalised,
    p: u64,
    y: &[u64],
    lifter: &MultiPoly,
    lifter_level: u32,
) -> Result<Witness> {
    let big_s = *norm.shifts.iter().max().expect("nonempty");
    let f = form.poly();
    let mut target = 2;
    loop {
        // x_i = p^(k - s_i) y_i with k chosen to make x primitive.
        let precision = target + big_s;
        let lifted = newton_lift(lifter, y, p, lifter_level, precision.max(lifter_level))?;
        let mp = checked_pow(p, precision).ok_or(Error::PrecisionOverflow { p, level: precision })?;
        let m = checked_pow(p, target).expect("smaller than mp");
        let vals: Vec<Option<u32>> = lifted.iter().map(|&yi| int_valuation(&((yi % mp) as i64), p)).collect();
        let k = vals
            .iter()
            .zip(&norm.shifts)
            .filter_map(|(v, &s)| v.map(|v| s as i64 - v as i64))
            .max()
            .expect("witness is nonzero");
        let x: Vec<u64> = lifted
            .iter()
            .zip(&norm.shifts)
            .zip(&vals)
            .map(|((&yi, &s), v)| {
                if v.is_none() {
                    return 0;
                }
                let e = k - s as i64;
                let yi = yi % mp;
                if e >= 0 {
                    let scale = checked_pow(p, e as u32).map_or(0, |c| c % m);
                    ((yi % m) as u128 * scale as u128 % m as u128) as u64
                } else {
                    (yi / p.pow((-e) as u32)) % m
                }
            })
            .collect();
        match hensel_liftable(&f, &x, p, target) {
            Ok(true) => return Ok(Witness::Residue { point: x, level: target }),
            Ok(false) | Err(Error::InsufficientPrecision { .. }) => target += 1,
            Err(e) => return Err(e),
        }
    }
}

/// `a_0 x^2 + a_1 y^2 + a_2 z^2 = 0` has a nontrivial `Q_v`-point iff
/// `inv_v(-a_0 a_1, -a_0 a_2) = 0`.
pub fn conic_soluble(a0: i64, a1: i64, a2: i64, v: &Place) -> Result<bool> {
    if a0 == 0 || a1 == 0 || a2 == 0 {
        return Err(Error::Zero);
    }
    let (a0, a1, a2) = (a0 as i128, a1 as i128, a2 as i128);
    let pair = SymbolPair::<i128>::new((-a0 * a1).into(), (-a0 * a2).into())?;
    Ok(hilbert_symbol(&pair, v).is_zero())
}

/// Everywhere-local solubility of a diagonal form with `d < m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalReport {
    pub outcome: Outcome,
    pub bad_places: Vec<Place>,
    pub per_place: Vec<SolubilityVerdict>,
}

impl LocalReport {
    pub fn failing_places(&self) -> Vec<Place> {
        self.per_place
            .iter()
            .filter(|v| v.outcome == Outcome::Insoluble)
            .map(|v| v.place)
            .collect()
    }
}

/// Decides `X(A_Q) ≠ ∅` for a diagonal form with more variables than its degree. Outside `{∞, 2} ∪ {p | d·∏a_i}` the reduction
/// has a nonsingular F_p-point by Chevalley-Warning, so only those places are
/// searched. Any insoluble place makes the answer `Insoluble`; otherwise an
/// undecided place makes it `Undecided`.
pub fn everywhere_locally_soluble(form: &DiagonalForm) -> Result<LocalReport> {
    if form.degree() as usize >= form.nvars() {
        return Err(Error::InvalidForm(format!(
            "everywhere-local test needs degree < variables (got d = {}, m = {})",
            form.degree(),
            form.nvars()
        )));
    }
    let mut primes = form.bad_primes();
    if !primes.contains(&2) {
        primes.insert(0, 2);
    }
    let mut per_place = vec![solve_real(form)];
    for &p in &primes {
        per_place.push(solve_padic(form, p, default_level(form, p))?);
    }
    let outcome = if per_place.iter().any(|v| v.outcome == Outcome::Insoluble) {
        Outcome::Insoluble
    } else if per_place.iter().any(|v| v.outcome == Outcome::Undecided) {
        Outcome::Undecided
    } else {
        Outcome::Soluble
    };
    let bad_places = std::iter::once(Place::Real).chain(primes.into_iter().map(Place::Finite)).collect();
    Ok(LocalReport { outcome, bad_places, per_place })
}

/// Precision `r` such that every unit `≡ 1 mod p^r` is a d-th power in `Z_p`.
pub fn power_class_precision(p: u64, d: u32) -> u32 {
    let v = int_valuation(&(d as i64), p).unwrap_or(0);
    match (p, v) {
        (_, 0) => 1,
        (2, v) => v + 2,
        (_, v) => v + 1,
    }
}

#[cfg(test)]
mod tests;
