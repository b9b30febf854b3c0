//! Hilbert symbols over R and Q_p, Hasse invariants in Q/Z, a brute-force
//! norm oracle, and the product formula.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::arith::checked_pow;
use crate::padic::{self, hensel_liftable, legendre_u64, prime_divisors, unit_residue, MultiPoly, Place};
use crate::scalar::{Int, Rational};

/// An element `r/n` of Q/Z in lowest terms with `0 <= r < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrauerInvariant {
    num: u64,
    den: u64,
}

impl BrauerInvariant {
    pub const ZERO: Self = Self { num: 0, den: 1 };
    pub const HALF: Self = Self { num: 1, den: 2 };

    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let r = num.rem_euclid(den as i64) as u64;
        let g = r.gcd(&den);
        Self { num: r / g, den: den / g }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `1/2` for a nontrivial quaternion symbol, `0` otherwise.
    pub fn from_sign(nontrivial: bool) -> Self {
        if nontrivial {
            Self::HALF
        } else {
            Self::ZERO
        }
    }
}

impl Add for BrauerInvariant {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let den = self.den.lcm(&rhs.den);
        let num = self.num * (den / self.den) + rhs.num * (den / rhs.den);
        Self::new(num as i64, den)
    }
}

impl Neg for BrauerInvariant {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }
}

impl Sub for BrauerInvariant {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl std::iter::Sum for BrauerInvariant {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for BrauerInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            f.write_str("0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for BrauerInvariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad invariant {s:?}"));
        match s.split_once('/') {
            None => Ok(Self::new(s.trim().parse().map_err(|_| bad())?, 1)),
            Some((n, d)) => {
                let d: u64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Self::new(n.trim().parse().map_err(|_| bad())?, d))
            }
        }
    }
}

impl Serialize for BrauerInvariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BrauerInvariant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The quaternion algebra `(a, b)` over Q, `a, b` nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolPair<T: Int> {
    a: Rational<T>,
    b: Rational<T>,
}

impl<T: Int> SymbolPair<T> {
    pub fn new(a: Rational<T>, b: Rational<T>) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::Zero);
        }
        Ok(Self { a, b })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        let conv = |x: i64| Rational::from_integer(T::from_i64(x).expect("fits"));
        Self::new(conv(a), conv(b))
    }

    pub fn a(&self) -> &Rational<T> {
        &self.a
    }

    pub fn b(&self) -> &Rational<T> {
        &self.b
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b.clone(), b: self.a.clone() }
    }

    /// `{∞} ∪ {p : p | 2·num(a)·den(a)·num(b)·den(b)}`, the only places where
    /// the symbol can be nontrivial.
    pub fn support(&self) -> Vec<Place> {
        let mut primes = vec![2u64];
        for n in [self.a.numer(), self.a.denom(), self.b.numer(), self.b.denom()] {
            primes.extend(prime_divisors(n));
        }
        primes.sort_unstable();
        primes.dedup();
        std::iter::once(Place::Real).chain(primes.into_iter().map(Place::Finite)).collect()
    }
}

/// The tame Hilbert symbol at an odd prime from valuation/unit data; `true`
/// means nontrivial. Units are residues mod p.
pub fn hilbert_odd(p: u64, alpha: i64, u: u64, beta: i64, v: u64) -> bool {
    let mut sign = 1i8;
    if alpha.rem_euclid(2) == 1 && beta.rem_euclid(2) == 1 && p % 4 == 3 {
        sign = -sign;
    }
    if beta.rem_euclid(2) == 1 {
        sign *= legendre_u64(u, p);
    }
    if alpha.rem_euclid(2) == 1 {
        sign *= legendre_u64(v, p);
    }
    sign == -1
}

/// The 2-adic Hilbert symbol from valuation/unit data (units mod 8); `true`
/// means nontrivial.
pub fn hilbert_two(alpha: i64, u: u64, beta: i64, v: u64) -> bool {
    let eps = |x: u64| ((x % 8 + 7) / 2) % 2 == 1; // (x-1)/2 mod 2
    let omega = |x: u64| matches!(x % 8, 3 | 5); // (x^2-1)/8 mod 2
    let mut e = eps(u) && eps(v);
    if alpha.rem_euclid(2) == 1 && omega(v) {
        e = !e;
    }
    if beta.rem_euclid(2) == 1 && omega(u) {
        e = !e;
    }
    e
}

/// `inv_v (a, b)`: zero iff `b` is a norm from `Q_v(√a)`.
pub fn hilbert_symbol<T: Int>(pair: &SymbolPair<T>, v: &Place) -> BrauerInvariant {
    let nontrivial = match *v {
        Place::Real => pair.a.is_negative() && pair.b.is_negative(),
        Place::Finite(p) => {
            let k = if p == 2 { 3 } else { 1 };
            let (alpha, u) = unit_residue(&pair.a, p, k).expect("nonzero");
            let (beta, w) = unit_residue(&pair.b, p, k).expect("nonzero");
            if p == 2 {
                hilbert_two(alpha, u, beta, w)
            } else {
                hilbert_odd(p, alpha, u, beta, w)
            }
        }
    };
    BrauerInvariant::from_sign(nontrivial)
}

/// Local invariants at every place of the finite support.
pub fn local_invariants<T: Int>(pair: &SymbolPair<T>) -> Vec<(Place, BrauerInvariant)> {
    pair.support().into_iter().map(|v| (v, hilbert_symbol(pair, &v))).collect()
}

/// `Σ_v inv_v (a, b)` over the finite support. Reciprocity makes this zero.
pub fn invariant_sum<T: Int>(pair: &SymbolPair<T>) -> BrauerInvariant {
    local_invariants(pair).into_iter().map(|(_, i)| i).sum()
}

/// Brute-force decision of whether `b` is a norm from `Q_v(√a)`, by searching
/// the residue tree of `z^2 = a x^2 + b y^2` for a Hensel-certified primitive
/// point. Independent of the closed formulas in [`hilbert_symbol`].
///
/// Returns [`Error::Undecided`] when the tree is still alive at `level`.
pub fn norm_oracle<T: Int>(pair: &SymbolPair<T>, v: &Place, level: u32) -> Result<bool> {
    let p = match *v {
        Place::Real => return Ok(pair.a.is_positive() || pair.b.is_positive()),
        Place::Finite(p) => p,
    };
    if level < 4 {
        return Err(Error::InvalidArgument("norm_oracle needs level >= 4".into()));
    }
    let m = checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
    // Clear denominators with squares and strip even powers of p; then only the
    // residues modulo p^level matter.
    let coefficient = |x: &Rational<T>| -> i64 {
        let n = x.numer().clone() * x.denom().clone();
        let (val, unit) = padic::split_prime(&n, p);
        let pe = if val % 2 == 1 { p } else { 1 };
        let r = unit.rem_u64(m);
        ((r as u128 * pe as u128) % m as u128) as i64
    };
    let f = MultiPoly::diagonal(&[1, -coefficient(&pair.a), -coefficient(&pair.b)], 2);
    residue_tree_search(&f, p, level).map(|found| found.is_some())
}

/// Breadth-first search over primitive residue vectors of a form, normalised
/// so the first unit coordinate is 1. Returns `Ok(Some(point, level))` at the
/// first Hensel-certified node, `Ok(None)` if the tree dies out, and
/// `Err(Undecided)` if it survives to `max_level`.
pub(crate) fn residue_tree_search(f: &MultiPoly, p: u64, max_level: u32) -> Result<Option<(Vec<u64>, u32)>> {
    let n = f.nvars();
    // Level-1 roots: (0,..,0,1,*,..,*) mod p.
    let mut roots: Vec<(usize, Vec<u64>)> = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        for idx in 0..p.pow(free as u32) {
            let mut x = vec![0u64; n];
            x[lead] = 1;
            let mut r = idx;
            for slot in x.iter_mut().skip(lead + 1) {
                *slot = r % p;
                r /= p;
            }
            roots.push((lead, x));
        }
    }
    residue_tree_search_from(f, p, max_level, roots)
}

/// As [`residue_tree_search`], from explicit level-1 roots `(fixed, point)`:
/// coordinate `fixed` never changes, every other coordinate gains one p-adic
/// digit per level.
pub(crate) fn residue_tree_search_from(
    f: &MultiPoly,
    p: u64,
    max_level: u32,
    roots: Vec<(usize, Vec<u64>)>,
) -> Result<Option<(Vec<u64>, u32)>> {
    let n = f.nvars();
    let mut nodes = roots;
    let mut modulus = p;
    for level in 1..=max_level {
        let mut survivors = Vec::new();
        for (fixed, x) in nodes {
            if f.eval_mod(&x, modulus) != 0 {
                continue;
            }
            match hensel_liftable(f, &x, p, level) {
                Ok(true) => return Ok(Some((x, level))),
                Ok(false) | Err(Error::InsufficientPrecision { .. }) => survivors.push((fixed, x)),
                Err(e) => return Err(e),
            }
        }
        if survivors.is_empty() {
            return Ok(None);
        }
        if level == max_level {
            break;
        }
        checked_pow(p, level + 1).ok_or(Error::PrecisionOverflow { p, level: level + 1 })?;
        let mut children = Vec::with_capacity(survivors.len() * p as usize);
        for (fixed, x) in survivors {
            let slots: Vec<usize> = (0..n).filter(|&i| i != fixed).collect();
            for idx in 0..p.pow(slots.len() as u32) {
                let mut y = x.clone();
                let mut r = idx;
                for &i in &slots {
                    y[i] += (r % p) * modulus;
                    r /= p;
                }
                children.push((fixed, y));
            }
        }
        nodes = children;
        modulus *= p;
    }
    Err(Error::Undecided(format!("residue tree still alive at level {max_level} (p = {p})")))
}

/// Checks quadratic reciprocity for odd primes `p ≠ q` twice: directly via
/// Legendre symbols, and by isolating the local terms of the product formula
/// for `(p, q)` at `p`, `q`, `2` and `∞`.
pub fn reciprocity_check(p: u64, q: u64) -> Result<bool> {
    for r in [p, q] {
        if r == 2 {
            return Err(Error::EvenPrime(r));
        }
        Place::finite(r)?;
    }
    if p == q {
        return Err(Error::InvalidArgument("p and q must differ".into()));
    }
    let lhs = legendre_u64(p, q) * legendre_u64(q, p);
    let rhs = if ((p - 1) / 2) % 2 == 1 && ((q - 1) / 2) % 2 == 1 { -1 } else { 1 };
    let direct = lhs == rhs;

    let pair = SymbolPair::<i64>::from_ints(p as i64, q as i64)?;
    let terms: Vec<_> = local_invariants(&pair);
    let total: BrauerInvariant = terms.iter().map(|(_, i)| *i).sum();
    let at = |v: Place| hilbert_symbol(&pair, &v);
    // inv_p = (q/p), inv_q = (p/q), inv_2 = (-1)^{ε(p)ε(q)}, inv_∞ = 0.
    let sign = |i: BrauerInvariant| if i.is_zero() { 1i8 } else { -1 };
    let via_symbols = total.is_zero()
        && sign(at(Place::Finite(p))) == legendre_u64(q, p)
        && sign(at(Place::Finite(q))) == legendre_u64(p, q)
        && sign(at(Place::Finite(2))) == rhs
        && at(Place::Real).is_zero()
        && terms.len() == 4;
    Ok(direct && via_symbols)
}
