//! Univariate polynomials over Q and their factorization into irreducibles,
//! as far as the residue computations need it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::arith::factor_u64;
use crate::RationalQ;

/// A polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QPoly {
    coeffs: Vec<RationalQ>,
}

fn q(n: i64) -> RationalQ {
    RationalQ::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<RationalQ>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn constant(c: RationalQ) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_ints(&[1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[RationalQ] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RationalQ {
        self.coeffs.get(i).cloned().unwrap_or_else(RationalQ::zero)
    }

    pub fn lead(&self) -> RationalQ {
        self.coeffs.last().cloned().unwrap_or_else(RationalQ::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &RationalQ) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![RationalQ::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.coeffs.clone();
        let mut quot = vec![RationalQ::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() * &lead_inv;
            for (i, x) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * x;
            }
            quot[k] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Self::new(quot), Self::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    pub fn eval(&self, x: &RationalQ) -> RationalQ {
        self.coeffs.iter().rev().fold(RationalQ::zero(), |acc, c| acc * x + c)
    }

    /// Multiplicity of the irreducible `pi` as a factor.
    pub fn multiplicity(&self, pi: &Self) -> u32 {
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (qt, r) = f.div_rem(pi);
            if !r.is_zero() || f.is_zero() {
                return k;
            }
            f = qt;
            k += 1;
        }
    }

    /// Primitive integer polynomial proportional to `self` (positive leading
    /// coefficient).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let l = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if ints.last().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Rational roots, each once.
    pub fn rational_roots(&self) -> Result<Vec<RationalQ>> {
        let mut roots = Vec::new();
        let mut f = self.clone();
        if f.degree().unwrap_or(0) == 0 {
            return Ok(roots);
        }
        if f.coeff(0).is_zero() {
            roots.push(RationalQ::zero());
            while f.coeff(0).is_zero() {
                f = f.div_rem(&Self::t()).0;
            }
        }
        if f.degree().unwrap_or(0) == 0 {
            return Ok(roots);
        }
        let ints = f.primitive_integer();
        let num_divs = divisors(&ints[0])?;
        let den_divs = divisors(ints.last().unwrap())?;
        for n in &num_divs {
            for d in &den_divs {
                for s in [1i64, -1] {
                    let x = RationalQ::new(BigInt::from(*n) * s, BigInt::from(*d));
                    if f.eval(&x).is_zero() && !roots.contains(&x) {
                        roots.push(x);
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }

    /// Factorization into monic factors with multiplicities, ignoring the
    /// leading constant. Factors of degree <= 3 are always found, so the result
    /// is complete up to degree 7; a remaining factor of degree >= 8 is kept
    /// whole and treated as irreducible.
    pub fn factor(&self) -> Result<Vec<(QPoly, u32)>> {
        let mut out = Vec::new();
        for (part, mult) in self.squarefree_decomposition() {
            for g in split_squarefree(&part)? {
                out.push((g, mult));
            }
        }
        out.sort_by(|a, b| (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs)));
        Ok(out)
    }

    /// Yun's algorithm: monic squarefree `s_i` with `self ~ Π s_i^i`.
    fn squarefree_decomposition(&self) -> Vec<(QPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }
}

fn divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Unsupported(format!("coefficient {n} too large for root search")))?;
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let cur = divs.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            divs.extend(cur.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

fn split_squarefree(f: &QPoly) -> Result<Vec<QPoly>> {
    let mut out = Vec::new();
    let mut rest = f.monic();
    for r in rest.rational_roots()? {
        let lin = QPoly::new(vec![-r, RationalQ::one()]);
        rest = rest.div_rem(&lin).0;
        out.push(lin);
    }
    let mut k = 2;
    while k <= MAX_FACTOR_SEARCH && 2 * k <= rest.degree().unwrap_or(0) {
        match find_factor(&rest, k)? {
            Some(g) => {
                rest = rest.div_rem(&g).0;
                out.push(g);
            }
            None => k += 1,
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push(rest);
    }
    Ok(out)
}

/// Factors of degree up to this are searched for, so every polynomial of
/// degree <= 7 is split completely.
const MAX_FACTOR_SEARCH: usize = 3;

/// A monic factor of degree exactly `k` by Kronecker's method: an integer
/// factor `g` of the primitive integer form of `f` has `g(x_i) | f(x_i)`, and
/// `k + 1` such values determine `g`.
fn find_factor(f: &QPoly, k: usize) -> Result<Option<QPoly>> {
    let ints = f.primitive_integer();
    let eval = |x: i64| -> BigInt { ints.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c) };
    let nodes: Vec<i64> = [0i64, 1, -1, 2, -2, 3, -3].into_iter().take(k + 1).collect();
    let mut choices: Vec<Vec<i128>> = Vec::new();
    for (i, &x) in nodes.iter().enumerate() {
        let v = eval(x);
        if v.is_zero() {
            return Ok(None);
        }
        let divs = divisors(&v)?;
        let mut c: Vec<i128> = divs.iter().map(|&d| d as i128).collect();
        // The overall sign of g is free; fix it at the first node.
        if i > 0 {
            c.extend(divs.iter().map(|&d| -(d as i128)));
        }
        choices.push(c);
    }
    let mut idx = vec![0usize; k + 1];
    loop {
        let values: Vec<i128> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        if let Some(g) = newton_interpolate(&nodes, &values, k) {
            if f.div_rem(&g).1.is_zero() {
                return Ok(Some(g.monic()));
            }
        }
        let mut pos = 0;
        loop {
            if pos > k {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The integer polynomial of degree exactly `k` through `(x_i, y_i)`, if the
/// divided differences are all integers.
fn newton_interpolate(xs: &[i64], ys: &[i128], k: usize) -> Option<QPoly> {
    let mut dd: Vec<i128> = ys.to_vec();
    let mut coef = vec![dd[0]];
    for level in 1..=k {
        for i in (level..=k).rev() {
            let num = dd[i] - dd[i - 1];
            let den = (xs[i] - xs[i - level]) as i128;
            if num % den != 0 {
                return None;
            }
            dd[i] = num / den;
        }
        coef.push(dd[level]);
    }
    if coef[k] == 0 {
        return None;
    }
    // Σ coef_j Π_{i<j} (t − x_i)
    let mut g = QPoly::zero();
    let mut basis = QPoly::one();
    for (j, c) in coef.iter().enumerate() {
        g = g.add(&basis.scale(&RationalQ::from_integer(BigInt::from(*c))));
        basis = basis.mul(&QPoly::from_ints(&[-xs[j], 1]));
    }
    Some(g)
}

/// Whether a rational is a square in Q.
pub fn is_rational_square(x: &RationalQ) -> bool {
    if x.is_zero() {
        return true;
    }
    if x.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &r * &r == *n
    };
    is_sq(x.numer()) && is_sq(x.denom())
}

/// Whether the nonzero rational `a` is a square in `Q[t]/(pi)`, `pi` monic
/// irreducible.
pub fn is_square_in_field(a: &RationalQ, pi: &QPoly) -> Result<bool> {
    if is_rational_square(a) {
        return Ok(true);
    }
    let n = pi.degree().unwrap_or(0);
    match n {
        0 | 1 => Ok(false),
        // a = x² gives a^n = N(x)², and n odd makes a a square in Q.
        _ if n % 2 == 1 => Ok(false),
        2 => {
            let disc = pi.coeff(1) * pi.coeff(1) - q(4) * pi.coeff(0);
            Ok(is_rational_square(&(a * disc)))
        }
        4 => quartic_contains_sqrt(a, pi),
        _ => Err(Error::Unsupported(format!("square classes in a residue field of degree {n}"))),
    }
}

/// `√a ∈ Q[t]/(pi)` for a monic irreducible quartic `pi`: this happens iff
/// `pi = A² − a·B²` with `A = t² + b0 t + c0` and `B = b1 t + c1 ≠ 0`.
fn quartic_contains_sqrt(a: &RationalQ, pi: &QPoly) -> Result<bool> {
    let (p0, p1, p2, p3) = (pi.coeff(0), pi.coeff(1), pi.coeff(2), pi.coeff(3));
    let two = q(2);
    let b0 = &p3 / &two;
    // b1 = 0.
    let c0 = (&p2 - &b0 * &b0) / &two;
    if &two * &b0 * &c0 == p1 {
        let c1_sq = (&c0 * &c0 - &p0) / a;
        if !c1_sq.is_zero() && is_rational_square(&c1_sq) {
            return Ok(true);
        }
    }
    // b1 ≠ 0, w = b1²: 4aw·c0(w)² − (2 b0 c0(w) − p1)² − 4aw·p0 = 0.
    let c0w = QPoly::new(vec![(&p2 - &b0 * &b0) / &two, a / &two]);
    let w = QPoly::t();
    let aw4 = w.scale(&(a * q(4)));
    let lin = c0w.scale(&(&two * &b0)).sub(&QPoly::constant(p1));
    let e = aw4.mul(&c0w).mul(&c0w).sub(&lin.mul(&lin)).sub(&aw4.scale(&p0));
    Ok(e.rational_roots()?.iter().any(|r| r.is_positive() && is_rational_square(r)))
}

/// A nonzero rational function `num/den` in `Q(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if num.is_zero() {
            return Err(Error::Zero);
        }
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn poly(num: QPoly) -> Result<Self> {
        Self::new(num, QPoly::one())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    /// Order of vanishing along the irreducible `pi`.
    pub fn valuation_at(&self, pi: &QPoly) -> i64 {
        self.num.multiplicity(pi) as i64 - self.den.multiplicity(pi) as i64
    }

    /// Order of vanishing at infinity, `deg den − deg num`.
    pub fn valuation_at_infinity(&self) -> i64 {
        self.den.degree().unwrap_or(0) as i64 - self.num.degree().unwrap_or(0) as i64
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == QPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = abs.is_one();
            match i {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !unit {
                        write!(f, "{abs}*")?;
                    }
                    f.write_str("t")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    fn product(factors: &[(QPoly, u32)]) -> QPoly {
        factors.iter().fold(QPoly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
    }

    #[test]
    fn arithmetic() {
        let f = p(&[-1, 0, 1]);
        let (qt, r) = f.div_rem(&p(&[-1, 1]));
        assert_eq!(qt, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&p(&[1, 2, 1])), p(&[1, 1]));
        assert_eq!(f.to_string(), "t^2 - 1");
        assert_eq!(p(&[3, -2, 0, 5]).to_string(), "5*t^3 - 2*t + 3");
    }

    #[test]
    fn factorizations() {
        let cases: Vec<(Vec<i64>, usize)> = vec![
            (vec![-1, 0, 1], 2),
            (vec![0, 0, 1], 1),
            (vec![1, 0, 1], 1),
            (vec![4, 0, 0, 0, 1], 2),   // (t²+2t+2)(t²−2t+2)
            (vec![-2, 0, 0, 0, 1], 1),  // irreducible
            (vec![6, 0, -5, 0, 1], 2),  // (t²−2)(t²−3)
            (vec![-6, 11, -6, 1], 3),
        ];
        for (c, n) in cases {
            let f = p(&c);
            let fac = f.factor().unwrap();
            assert_eq!(fac.len(), n, "{f}");
            assert_eq!(product(&fac), f.monic(), "{f}");
        }
        // Degree 6 and 7 products of irreducible quadratics, cubics and a quartic.
        let f = p(&[2, 0, 0, 0, 1]).mul(&p(&[1, 1, 1]));
        assert_eq!(f.factor().unwrap().len(), 2);
        let f = p(&[-2, 0, 0, 1]).mul(&p(&[3, 0, 0, 0, 1]));
        assert_eq!(f.factor().unwrap(), vec![(p(&[-2, 0, 0, 1]), 1), (p(&[3, 0, 0, 0, 1]), 1)]);
        let f = p(&[1, 0, 1]).mul(&p(&[2, 0, 1])).mul(&p(&[3, 0, 1]));
        assert_eq!(f.factor().unwrap().len(), 3);
        let f = p(&[1, 1]).pow(3).mul(&p(&[2, 0, 1])).mul(&p(&[0, 3]));
        let fac = f.factor().unwrap();
        assert_eq!(fac, vec![(p(&[0, 1]), 1), (p(&[1, 1]), 3), (p(&[2, 0, 1]), 1)]);
    }

    #[test]
    fn squares_in_fields() {
        let half = RationalQ::new(BigInt::from(1), BigInt::from(2));
        assert!(is_rational_square(&RationalQ::new(BigInt::from(4), BigInt::from(9))));
        assert!(!is_rational_square(&half));
        // Q(i): −1 square, 2 not, −4 square.
        let i = p(&[1, 0, 1]);
        assert!(is_square_in_field(&q(-1), &i).unwrap());
        assert!(!is_square_in_field(&q(2), &i).unwrap());
        // Q(ζ8) = Q[t]/(t⁴+1) contains √2, √−1, √−2 but not √3.
        let z8 = p(&[1, 0, 0, 0, 1]);
        for a in [2, -1, -2] {
            assert!(is_square_in_field(&q(a), &z8).unwrap(), "{a}");
        }
        assert!(!is_square_in_field(&q(3), &z8).unwrap());
        // Q(2^(1/4)) contains √2 only.
        let r4 = p(&[-2, 0, 0, 0, 1]);
        assert!(is_square_in_field(&q(2), &r4).unwrap());
        assert!(!is_square_in_field(&q(-2), &r4).unwrap());
        assert!(!is_square_in_field(&q(3), &r4).unwrap());
        // Cubic field: squares come from Q.
        assert!(!is_square_in_field(&q(2), &p(&[-2, 0, 0, 1])).unwrap());
        assert!(is_square_in_field(&q(2), &p(&[-2, 0, 0, 0, 0, 0, 1])).is_err());
    }
}
