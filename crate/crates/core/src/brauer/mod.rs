//! Quaternion classes `(a, f)` on the Lind-Reichardt curve and on the
//! projective line over Q(t): evaluation at local points, invariant profiles,
//! the Brauer-Manin test over a finite set of places, tame residues, and the
//! prolific test for a single order-2 class.

mod poly;
mod residue;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::arith::{checked_pow, inv_mod, mul_mod, pow_mod, primes_up_to};
use crate::padic::{hensel_liftable, is_square_in_qv, unit_residue, MultiPoly, Place};
use crate::solubility::{lind_reichardt_local, lind_reichardt_poly, Outcome};
use crate::symbols::{hilbert_odd, hilbert_symbol, hilbert_two, BrauerInvariant, SymbolPair};
use crate::RationalQ;

pub use poly::{is_rational_square, is_square_in_field, QPoly, RatFunc};
pub use residue::{ramification_locus, reduction_residue, residue_tame, ClassRep, Divisor, ResidueField, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseVariety {
    /// `2Y² = X⁴ − 17Z⁴` in `P(1,2,1)`.
    LindReichardtCurve,
    /// `P¹` with coordinates `(t0 : t1)`, `t = t0/t1`.
    ProjectiveLineQt,
}

/// `c · X^i Y^j Z^k / X^i' Y^j' Z^k'`, of weighted degree zero for the
/// weights `(1, 2, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialRatio {
    coefficient: RationalQ,
    numerator: [u32; 3],
    denominator: [u32; 3],
}

impl MonomialRatio {
    pub fn new(coefficient: RationalQ, numerator: [u32; 3], denominator: [u32; 3]) -> Result<Self> {
        if coefficient.is_zero() {
            return Err(Error::Zero);
        }
        let w = |e: &[u32; 3]| e[0] + 2 * e[1] + e[2];
        if w(&numerator) != w(&denominator) {
            return Err(Error::InvalidArgument(format!(
                "weighted degree {} over {} is not a function on the curve",
                w(&numerator),
                w(&denominator)
            )));
        }
        Ok(Self { coefficient, numerator, denominator })
    }

    /// `Y/X²`.
    pub fn y_over_x2() -> Self {
        Self::new(RationalQ::one(), [0, 1, 0], [2, 0, 0]).expect("degree zero")
    }

    /// `Y/Z²`.
    pub fn y_over_z2() -> Self {
        Self::new(RationalQ::one(), [0, 1, 0], [0, 0, 2]).expect("degree zero")
    }

    fn exponents(&self) -> [i64; 3] {
        std::array::from_fn(|i| self.numerator[i] as i64 - self.denominator[i] as i64)
    }
}

impl fmt::Display for MonomialRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mono = |e: &[u32; 3]| {
            let parts: Vec<String> = ["X", "Y", "Z"]
                .iter()
                .zip(e)
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect();
            if parts.is_empty() {
                "1".to_string()
            } else {
                parts.join("*")
            }
        };
        if !self.coefficient.is_one() {
            write!(f, "{}*", self.coefficient)?;
        }
        write!(f, "{}", mono(&self.numerator))?;
        if self.denominator.iter().any(|&k| k > 0) {
            write!(f, "/{}", mono(&self.denominator))?;
        }
        Ok(())
    }
}

/// The second argument of a quaternion symbol, as a function on the base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Presentation {
    Monomial(MonomialRatio),
    Function(RatFunc),
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Presentation::Monomial(m) => write!(f, "{m}"),
            Presentation::Function(r) => write!(f, "{r}"),
        }
    }
}

/// A class `(a, f)` with several presentations `f` of the same class, tried in
/// order when evaluating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionSymbolClass {
    base: BaseVariety,
    a: RationalQ,
    presentations: Vec<Presentation>,
}

impl QuaternionSymbolClass {
    pub fn on_curve(a: RationalQ, presentations: Vec<MonomialRatio>) -> Result<Self> {
        Self::build(BaseVariety::LindReichardtCurve, a, presentations.into_iter().map(Presentation::Monomial).collect())
    }

    pub fn on_line(a: RationalQ, presentations: Vec<RatFunc>) -> Result<Self> {
        Self::build(BaseVariety::ProjectiveLineQt, a, presentations.into_iter().map(Presentation::Function).collect())
    }

    fn build(base: BaseVariety, a: RationalQ, presentations: Vec<Presentation>) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Zero);
        }
        if presentations.is_empty() {
            return Err(Error::InvalidArgument("a class needs at least one presentation".into()));
        }
        Ok(Self { base, a, presentations })
    }

    /// `(17, Y/X²) = (17, Y/Z²)` on the Lind-Reichardt curve.
    pub fn lind_reichardt() -> Self {
        Self::on_curve(
            RationalQ::from_integer(BigInt::from(17)),
            vec![MonomialRatio::y_over_x2(), MonomialRatio::y_over_z2()],
        )
        .expect("valid class")
    }

    pub fn base(&self) -> BaseVariety {
        self.base
    }

    pub fn a(&self) -> &RationalQ {
        &self.a
    }

    pub fn presentations(&self) -> &[Presentation] {
        &self.presentations
    }

    fn nvars(&self) -> usize {
        match self.base {
            BaseVariety::LindReichardtCurve => 3,
            BaseVariety::ProjectiveLineQt => 2,
        }
    }

    fn equation(&self) -> Option<MultiPoly> {
        match self.base {
            BaseVariety::LindReichardtCurve => Some(lind_reichardt_poly()),
            BaseVariety::ProjectiveLineQt => None,
        }
    }
}

impl fmt::Display for QuaternionSymbolClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.presentations.iter().map(|p| p.to_string()).collect();
        write!(f, "({}, {{{}}})", self.a, ps.join(", "))
    }
}

/// A point of the base over `Q_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LocalPoint {
    /// A rational point.
    Exact(Vec<RationalQ>),
    /// Residues modulo `p^level`; `p` comes from the place.
    Residue { coords: Vec<u64>, level: u32 },
    /// A real point in floating point.
    Real(Vec<f64>),
}

/// Homogenised integer data of `f = c·N/D`: `(c, N, D)` with `N`, `D`
/// primitive integer coefficient lists.
fn integer_data(r: &RatFunc) -> (RationalQ, Vec<BigInt>, Vec<BigInt>) {
    let n = r.num().primitive_integer();
    let d = r.den().primitive_integer();
    let lead = |poly: &QPoly, ints: &[BigInt]| poly.lead() / RationalQ::from_integer(ints.last().unwrap().clone());
    (lead(r.num(), &n) / lead(r.den(), &d), n, d)
}

fn bigint_mod(x: &BigInt, m: u64) -> u64 {
    let r = x % BigInt::from(m);
    let r = if r.is_negative() { r + BigInt::from(m) } else { r };
    r.to_u64().expect("below modulus")
}

/// `Σ c_i t0^i t1^(deg-i)` modulo `m`.
fn homogeneous_mod(c: &[BigInt], t0: u64, t1: u64, m: u64) -> u64 {
    let deg = c.len() - 1;
    let mut acc = 0u64;
    for (i, ci) in c.iter().enumerate() {
        let term = mul_mod(pow_mod(t0, i as u64, m), pow_mod(t1, (deg - i) as u64, m), m);
        acc = ((acc as u128 + mul_mod(bigint_mod(ci, m), term, m) as u128) % m as u128) as u64;
    }
    acc
}

fn homogeneous_q(c: &[RationalQ], t0: &RationalQ, t1: &RationalQ) -> RationalQ {
    let deg = c.len() - 1;
    c.iter().enumerate().map(|(i, ci)| ci * pow_q(t0, i) * pow_q(t1, deg - i)).sum()
}

fn pow_q(x: &RationalQ, e: usize) -> RationalQ {
    (0..e).fold(RationalQ::one(), |acc, _| acc * x)
}

impl Presentation {
    /// `f(point)` as a rational, `None` if zero or a pole.
    fn value_exact(&self, x: &[RationalQ]) -> Option<RationalQ> {
        match self {
            Presentation::Monomial(m) => {
                let mut v = m.coefficient.clone();
                for (xi, e) in x.iter().zip(m.exponents()) {
                    if e == 0 {
                        continue;
                    }
                    if xi.is_zero() {
                        return None;
                    }
                    let p = pow_q(xi, e.unsigned_abs() as usize);
                    v = if e > 0 { v * p } else { v / p };
                }
                Some(v)
            }
            Presentation::Function(r) => {
                let n = homogeneous_q(r.num().coeffs(), &x[0], &x[1]);
                let d = homogeneous_q(r.den().coeffs(), &x[0], &x[1]);
                let shift = r.den().degree().unwrap_or(0) as i64 - r.num().degree().unwrap_or(0) as i64;
                if n.is_zero() || d.is_zero() || (shift != 0 && x[1].is_zero()) {
                    return None;
                }
                let s = pow_q(&x[1], shift.unsigned_abs() as usize);
                Some(if shift >= 0 { n / d * s } else { n / d / s })
            }
        }
    }

    fn value_real(&self, x: &[f64]) -> Option<f64> {
        let v = match self {
            Presentation::Monomial(m) => {
                let mut v = m.coefficient.to_f64()?;
                for (xi, e) in x.iter().zip(m.exponents()) {
                    v *= xi.powi(e as i32);
                }
                v
            }
            Presentation::Function(r) => {
                let h = |c: &[RationalQ]| -> f64 {
                    let deg = c.len() - 1;
                    c.iter()
                        .enumerate()
                        .map(|(i, ci)| ci.to_f64().unwrap_or(f64::NAN) * x[0].powi(i as i32) * x[1].powi((deg - i) as i32))
                        .sum()
                };
                let shift = r.den().degree().unwrap_or(0) as i32 - r.num().degree().unwrap_or(0) as i32;
                h(r.num().coeffs()) / h(r.den().coeffs()) * x[1].powi(shift)
            }
        };
        (v.is_finite() && v.abs() > 1e-9).then_some(v)
    }

    /// Valuation and unit (mod `p^need`) of `f(point)` from residues modulo
    /// `p^level`, or `None` if they are not determined.
    fn value_residue(&self, x: &[u64], p: u64, level: u32, need: u32) -> Result<Option<(i64, u64)>> {
        let m = checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
        let (c, factors): (RationalQ, Vec<(u64, i64)>) = match self {
            Presentation::Monomial(mr) => (
                mr.coefficient.clone(),
                x.iter().zip(mr.exponents()).filter(|(_, e)| *e != 0).map(|(&xi, e)| (xi % m, e)).collect(),
            ),
            Presentation::Function(r) => {
                let (c, n, d) = integer_data(r);
                let shift = d.len() as i64 - n.len() as i64;
                let mut f = vec![(homogeneous_mod(&n, x[0], x[1], m), 1), (homogeneous_mod(&d, x[0], x[1], m), -1)];
                if shift != 0 {
                    f.push((x[1] % m, shift));
                }
                (c, f)
            }
        };
        let pn = p.pow(need);
        let (mut val, mut unit) = unit_residue(&c, p, need)?;
        for (r, e) in factors {
            if r == 0 {
                return Ok(None);
            }
            let mut v = 0u32;
            let mut u = r;
            while u % p == 0 {
                u /= p;
                v += 1;
            }
            if level - v < need {
                return Ok(None);
            }
            let u = u % pn;
            let u = if e > 0 { u } else { inv_mod(u, pn).expect("unit") };
            val += e * v as i64;
            unit = mul_mod(unit, pow_mod(u, e.unsigned_abs(), pn), pn);
        }
        Ok(Some((val, unit)))
    }
}

fn check_point(class: &QuaternionSymbolClass, point: &LocalPoint, v: &Place) -> Result<()> {
    let n = class.nvars();
    let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
    match point {
        LocalPoint::Exact(x) => {
            if x.len() != n || x.iter().all(|c| c.is_zero()) {
                return bad("point has the wrong number of coordinates or is zero");
            }
            if class.base == BaseVariety::LindReichardtCurve {
                let two = RationalQ::from_integer(BigInt::from(2));
                let seventeen = RationalQ::from_integer(BigInt::from(17));
                let f = two * &x[1] * &x[1] - pow_q(&x[0], 4) + seventeen * pow_q(&x[2], 4);
                if !f.is_zero() {
                    return bad("point is not on the curve");
                }
            }
        }
        LocalPoint::Residue { coords, level } => {
            let Place::Finite(p) = *v else { return bad("residue points live at finite places") };
            if coords.len() != n || *level == 0 {
                return bad("residue point has the wrong shape");
            }
            let m = checked_pow(p, *level).ok_or(Error::PrecisionOverflow { p, level: *level })?;
            let primitive = match class.base {
                BaseVariety::LindReichardtCurve => {
                    coords[0] % p != 0 || coords[2] % p != 0 || (*level >= 2 && coords[1] % (p * p) != 0)
                }
                BaseVariety::ProjectiveLineQt => coords.iter().any(|c| c % p != 0),
            };
            if !primitive {
                return bad("residue point is not primitive");
            }
            if let Some(eq) = class.equation() {
                if eq.eval_mod(coords, m) != 0 {
                    return bad("residue point is not on the curve");
                }
            }
        }
        LocalPoint::Real(x) => {
            if *v != Place::Real || x.len() != n {
                return bad("real points live at the real place");
            }
        }
    }
    Ok(())
}

/// `inv_v (a, f(point))` through presentation `index`, or `None` when that
/// presentation is not decidable at the point.
pub fn evaluate_presentation(
    class: &QuaternionSymbolClass,
    index: usize,
    point: &LocalPoint,
    v: &Place,
) -> Result<Option<BrauerInvariant>> {
    let pres = class
        .presentations
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("no presentation {index}")))?;
    match (point, v) {
        (LocalPoint::Exact(x), _) => {
            let Some(val) = pres.value_exact(x) else { return Ok(None) };
            let pair = SymbolPair::new(class.a.clone(), val)?;
            Ok(Some(hilbert_symbol(&pair, v)))
        }
        (LocalPoint::Real(x), Place::Real) => {
            Ok(pres.value_real(x).map(|val| BrauerInvariant::from_sign(class.a.is_negative() && val < 0.0)))
        }
        (LocalPoint::Residue { coords, level }, Place::Finite(p)) => {
            let p = *p;
            let need = if p == 2 { 3 } else { 1 };
            let Some((beta, w)) = pres.value_residue(coords, p, *level, need)? else { return Ok(None) };
            let (alpha, u) = unit_residue(&class.a, p, need)?;
            let nontrivial = if p == 2 { hilbert_two(alpha, u, beta, w) } else { hilbert_odd(p, alpha, u, beta, w) };
            Ok(Some(BrauerInvariant::from_sign(nontrivial)))
        }
        _ => Err(Error::InvalidArgument("point type does not match the place".into())),
    }
}

/// `inv_v A(P)` through the first presentation decidable at the point.
pub fn evaluate_at(class: &QuaternionSymbolClass, point: &LocalPoint, v: &Place) -> Result<BrauerInvariant> {
    check_point(class, point, v)?;
    for i in 0..class.presentations.len() {
        if let Some(inv) = evaluate_presentation(class, i, point, v)? {
            return Ok(inv);
        }
    }
    Err(Error::NoEvaluablePresentation)
}

/// Whether every presentation decidable at the point gives the same value.
pub fn presentations_agree(class: &QuaternionSymbolClass, point: &LocalPoint, v: &Place) -> Result<bool> {
    check_point(class, point, v)?;
    let mut seen = BTreeSet::new();
    for i in 0..class.presentations.len() {
        if let Some(inv) = evaluate_presentation(class, i, point, v)? {
            seen.insert(inv);
        }
    }
    Ok(seen.len() <= 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Hensel-certified residue points were enumerated.
    Enumeration,
    /// `a` is a square in `Q_v`, so every local invariant vanishes.
    SquareShortcut,
    /// Real points sampled along the real locus.
    RealSampling,
    /// The base has no `Q_v`-points.
    NoLocalPoints,
}

/// The values of `P ↦ inv_v A(P)` seen on the local points at a given level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub place: Place,
    pub level: u32,
    pub attained: BTreeSet<BrauerInvariant>,
    /// Number of residue classes (or real samples) that were evaluated.
    pub samples: usize,
    pub method: Certification,
}

/// Level-1 chart roots `(fixed coordinate, residues)` covering primitive points.
fn chart_roots(class: &QuaternionSymbolClass, p: u64) -> Vec<(usize, Vec<u64>)> {
    match class.base {
        BaseVariety::LindReichardtCurve => crate::solubility::lind_reichardt::chart_roots(p),
        BaseVariety::ProjectiveLineQt => {
            let mut roots: Vec<(usize, Vec<u64>)> = (0..p).map(|t| (1, vec![t, 1])).collect();
            roots.push((0, vec![1, 0]));
            roots
        }
    }
}

fn first_value(class: &QuaternionSymbolClass, point: &LocalPoint, v: &Place) -> Result<Option<BrauerInvariant>> {
    for i in 0..class.presentations.len() {
        if let Some(inv) = evaluate_presentation(class, i, point, v)? {
            return Ok(Some(inv));
        }
    }
    Ok(None)
}

/// Evaluates the class on every Hensel-certified local point at `level`.
///
/// A residue class that is certified and evaluable at a coarser level has the
/// same invariant on all of its lifts, so it is not subdivided further. Classes
/// that stay undecided are refined up to `level + 4`; only a class at `level`
/// none of whose lifts can be evaluated makes the profile `Undecided`.
pub fn invariant_profile(class: &QuaternionSymbolClass, v: &Place, level: u32) -> Result<InvariantProfile> {
    let p = match v {
        Place::Real => return real_profile(class),
        Place::Finite(p) => *p,
    };
    Place::finite(p)?;
    if level == 0 {
        return Err(Error::InvalidArgument("level must be >= 1".into()));
    }
    let eq = class.equation();
    let n = class.nvars();
    let max_level = level + 4;
    // (fixed coordinate, residues, ancestor at depth `level`)
    let mut nodes: Vec<(usize, Vec<u64>, Option<usize>)> =
        chart_roots(class, p).into_iter().map(|(f, x)| (f, x, None)).collect();
    let mut attained = BTreeSet::new();
    let mut samples = 0;
    let mut ancestors_resolved: Vec<bool> = Vec::new();
    let mut unresolved: Vec<usize> = Vec::new();
    for l in 1..=max_level {
        let m = checked_pow(p, l).ok_or(Error::PrecisionOverflow { p, level: l })?;
        let mut next = Vec::new();
        for (fixed, x, mut anc) in nodes {
            if let Some(eq) = &eq {
                if eq.eval_mod(&x, m) != 0 {
                    continue;
                }
            }
            if l == level {
                anc = Some(ancestors_resolved.len());
                ancestors_resolved.push(false);
            }
            let certified = match &eq {
                Some(eq) => hensel_liftable(eq, &x, p, l) == Ok(true),
                None => true,
            };
            if certified {
                let pt = LocalPoint::Residue { coords: x.clone(), level: l };
                if let Some(inv) = first_value(class, &pt, v)? {
                    attained.insert(inv);
                    samples += 1;
                    if let Some(a) = anc {
                        ancestors_resolved[a] = true;
                    }
                    continue;
                }
            }
            if l == max_level {
                unresolved.extend(anc);
                continue;
            }
            let slots: Vec<usize> = (0..n).filter(|&i| i != fixed).collect();
            for idx in 0..p.pow(slots.len() as u32) {
                let mut y = x.clone();
                let mut r = idx;
                for &i in &slots {
                    y[i] += (r % p) * m;
                    r /= p;
                }
                next.push((fixed, y, anc));
            }
        }
        nodes = next;
        checked_pow(p, l + 1).ok_or(Error::PrecisionOverflow { p, level: l + 1 })?;
    }
    if unresolved.iter().any(|&a| !ancestors_resolved[a]) {
        return Err(Error::Undecided(format!(
            "no evaluable presentation on some residue class at {p}-adic level {level} (searched to {max_level})"
        )));
    }
    Ok(InvariantProfile { place: *v, level, attained, samples, method: Certification::Enumeration })
}

fn real_profile(class: &QuaternionSymbolClass) -> Result<InvariantProfile> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    const N: usize = 64;
    match class.base {
        BaseVariety::LindReichardtCurve => {
            // Every real point has x ≠ 0, so the chart x = 1 covers the locus.
            let zmax = 17f64.powf(-0.25);
            for i in 0..=N {
                let z = zmax * (2.0 * i as f64 / N as f64 - 1.0) * 0.999;
                let y = ((1.0 - 17.0 * z.powi(4)) / 2.0).sqrt();
                points.push(vec![1.0, y, z]);
                points.push(vec![1.0, -y, z]);
            }
        }
        BaseVariety::ProjectiveLineQt => {
            for i in 0..=N {
                points.push(vec![-8.0 + 16.0 * i as f64 / N as f64 + 1e-3, 1.0]);
            }
            points.push(vec![1.0, 0.0]);
        }
    }
    let mut attained = BTreeSet::new();
    let mut samples = 0;
    for x in points {
        if let Some(inv) = first_value(class, &LocalPoint::Real(x), &Place::Real)? {
            attained.insert(inv);
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(Error::Undecided("no real sample point could be evaluated".into()));
    }
    Ok(InvariantProfile { place: Place::Real, level: 0, attained, samples, method: Certification::RealSampling })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionVerdict {
    /// Every adelic point on the certified places has invariant sum 1/2.
    Obstructed,
    NotObstructed,
    /// Some place has no local points.
    NoAdelicPoints,
}

/// Result of the Brauer-Manin test over `∞` and the primes up to a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub class: String,
    pub prime_bound: u64,
    pub level: u32,
    pub places: Vec<InvariantProfile>,
    /// Attainable values of `Σ_v inv_v A(P_v)` over the listed places.
    pub sum_set: BTreeSet<BrauerInvariant>,
    pub verdict: ObstructionVerdict,
    /// What is assumed, not computed, about places beyond the bound.
    pub tail: String,
}

/// Computes invariant profiles at `∞` and every `p <= prime_bound` and the set
/// of possible invariant sums. Where `a` is a square in `Q_v` the profile is
/// `{0}` without enumeration (after checking `C(Q_v) ≠ ∅`).
pub fn adelic_obstruction_test(
    class: &QuaternionSymbolClass,
    prime_bound: u64,
    level: u32,
) -> Result<ObstructionReport> {
    if prime_bound < 17 {
        return Err(Error::InvalidArgument(format!("prime bound {prime_bound} < 17")));
    }
    let places: Vec<Place> =
        std::iter::once(Place::Real).chain(primes_up_to(prime_bound).into_iter().map(Place::Finite)).collect();
    let mut profiles = Vec::new();
    for v in places {
        let soluble = match class.base {
            BaseVariety::LindReichardtCurve => match lind_reichardt_local(&v, level + 12)?.outcome {
                Outcome::Soluble => true,
                Outcome::Insoluble => false,
                Outcome::Undecided => return Err(Error::Undecided(format!("local solubility at {v}"))),
            },
            BaseVariety::ProjectiveLineQt => true,
        };
        let profile = if !soluble {
            InvariantProfile {
                place: v,
                level,
                attained: BTreeSet::new(),
                samples: 0,
                method: Certification::NoLocalPoints,
            }
        } else if is_square_in_qv(&class.a, &v)? {
            InvariantProfile {
                place: v,
                level,
                attained: BTreeSet::from([BrauerInvariant::ZERO]),
                samples: 0,
                method: Certification::SquareShortcut,
            }
        } else {
            invariant_profile(class, &v, level)?
        };
        profiles.push(profile);
    }
    let mut sum_set = BTreeSet::from([BrauerInvariant::ZERO]);
    for prof in &profiles {
        sum_set = sum_set.iter().flat_map(|&s| prof.attained.iter().map(move |&x| s + x)).collect();
    }
    let verdict = if profiles.iter().any(|p| p.attained.is_empty()) {
        ObstructionVerdict::NoAdelicPoints
    } else if !sum_set.contains(&BrauerInvariant::ZERO) {
        ObstructionVerdict::Obstructed
    } else {
        ObstructionVerdict::NotObstructed
    };
    let tail = format!(
        "primes > {prime_bound} are not enumerated: inv_p = 0 there is certified only where {} is a square in Q_p and assumed elsewhere",
        class.a
    );
    Ok(ObstructionReport { class: class.to_string(), prime_bound, level, places: profiles, sum_set, verdict, tail })
}

/// Whether `P ↦ inv_v A(P) − inv_v A(P_0)` hits both 0 and 1/2 on the points
/// seen at `level`. `false` means "not observed", not a proof.
pub fn is_prolific(class: &QuaternionSymbolClass, v: &Place, level: u32) -> Result<bool> {
    let profile = invariant_profile(class, v, level)?;
    let Some(&base) = profile.attained.iter().next() else {
        return Err(Error::InvalidArgument(format!("the base has no points at {v}")));
    };
    let shifted: BTreeSet<BrauerInvariant> = profile.attained.iter().map(|&x| x - base).collect();
    Ok(shifted == BTreeSet::from([BrauerInvariant::ZERO, BrauerInvariant::HALF]))
}

/// All primitive residue points of the base modulo `p^level` (for the curve,
/// those with `f ≡ 0 mod p^level`), without Hensel certification.
pub fn residue_points(class: &QuaternionSymbolClass, p: u64, level: u32) -> Result<Vec<Vec<u64>>> {
    Place::finite(p)?;
    let eq = class.equation();
    let n = class.nvars();
    let mut nodes = chart_roots(class, p);
    let mut modulus = p;
    for l in 1..=level {
        nodes.retain(|(_, x)| eq.as_ref().map_or(true, |e| e.eval_mod(x, modulus) == 0));
        if l == level {
            break;
        }
        let mut next = Vec::new();
        for (fixed, x) in nodes {
            let slots: Vec<usize> = (0..n).filter(|&i| i != fixed).collect();
            for idx in 0..p.pow(slots.len() as u32) {
                let mut y = x.clone();
                let mut r = idx;
                for &i in &slots {
                    y[i] += (r % p) * modulus;
                    r /= p;
                }
                next.push((fixed, y));
            }
        }
        nodes = next;
        modulus = checked_pow(p, l + 1).ok_or(Error::PrecisionOverflow { p, level: l + 1 })?;
    }
    Ok(nodes.into_iter().map(|(_, x)| x).collect())
}
