//! Residues of quaternion symbols `(a, f)` over `Q(t)` along divisors of the
//! projective line, and along the special fibre of the reduction mod p.
//! Residues of 2-torsion classes are square classes in the residue field.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{is_rational_square, is_square_in_field, QPoly, RatFunc};
use crate::error::{Error, Result};
use crate::padic::arith::{inv_mod, pow_mod};
use crate::padic::{valuation, Place};
use crate::RationalQ;

/// A prime divisor of the projective line over Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Divisor {
    /// The zero locus of a monic irreducible polynomial.
    Finite(QPoly),
    Infinity,
}

impl Divisor {
    /// Checks that `pi` is monic and irreducible (as far as factoring can tell).
    pub fn finite(pi: QPoly) -> Result<Self> {
        if pi.degree().unwrap_or(0) == 0 || !pi.lead().is_one() {
            return Err(Error::InvalidArgument(format!("{pi} is not a monic nonconstant polynomial")));
        }
        let fac = pi.factor()?;
        if fac.len() != 1 || fac[0].1 != 1 {
            return Err(Error::InvalidArgument(format!("{pi} is not irreducible")));
        }
        Ok(Self::Finite(pi))
    }

    pub fn residue_field(&self) -> ResidueField {
        match self {
            Divisor::Finite(pi) if pi.degree() == Some(1) => ResidueField::Rationals,
            Divisor::Finite(pi) => ResidueField::NumberField(pi.clone()),
            Divisor::Infinity => ResidueField::Rationals,
        }
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divisor::Finite(pi) => write!(f, "{pi}"),
            Divisor::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ResidueField {
    Rationals,
    /// `Q[t]/(pi)`.
    NumberField(QPoly),
    /// `F_p(t)`.
    FpFunctionField(u64),
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Rationals => f.write_str("Q"),
            ResidueField::NumberField(pi) => write!(f, "Q[t]/({pi})"),
            ResidueField::FpFunctionField(p) => write!(f, "F_{p}(t)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassRep {
    Rational(RationalQ),
    /// `num/den` with coefficients mod p, lowest degree first.
    FpRational { num: Vec<u64>, den: Vec<u64> },
}

/// An element of `F*/F*²` for a residue field `F`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquareClass {
    field: ResidueField,
    representative: ClassRep,
    trivial: bool,
}

impl SquareClass {
    fn rational(field: ResidueField, r: RationalQ) -> Result<Self> {
        let trivial = match &field {
            ResidueField::Rationals => is_rational_square(&r),
            ResidueField::NumberField(pi) => is_square_in_field(&r, pi)?,
            ResidueField::FpFunctionField(_) => unreachable!("rational representative over F_p(t)"),
        };
        Ok(Self { field, representative: ClassRep::Rational(r), trivial })
    }

    fn fp(p: u64, num: Vec<u64>, den: Vec<u64>) -> Self {
        let h = fp_mul(&num, &den, p);
        let trivial = fp_is_square(&h, p);
        Self { field: ResidueField::FpFunctionField(p), representative: ClassRep::FpRational { num, den }, trivial }
    }

    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn representative(&self) -> &ClassRep {
        &self.representative
    }

    /// Whether the class is the identity, i.e. the symbol is unramified there.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Product in `F*/F*²`; both classes must live in the same field.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::InvalidArgument(format!("square classes over {} and {}", self.field, other.field)));
        }
        match (&self.representative, &other.representative) {
            (ClassRep::Rational(a), ClassRep::Rational(b)) => Self::rational(self.field.clone(), a * b),
            (ClassRep::FpRational { num: n1, den: d1 }, ClassRep::FpRational { num: n2, den: d2 }) => {
                let ResidueField::FpFunctionField(p) = self.field else { unreachable!() };
                Ok(Self::fp(p, fp_mul(n1, n2, p), fp_mul(d1, d2, p)))
            }
            _ => unreachable!("representative kind follows the field"),
        }
    }

    /// Same class modulo squares.
    pub fn same_class(&self, other: &Self) -> Result<bool> {
        Ok(self.mul(other)?.is_trivial())
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.trivial { "trivial" } else { "nontrivial" };
        match &self.representative {
            ClassRep::Rational(r) => write!(f, "[{r}] in {} ({status})", self.field),
            ClassRep::FpRational { num, den } => {
                write!(f, "[{}", fp_display(num))?;
                if den.as_slice() != [1] {
                    write!(f, " / {}", fp_display(den))?;
                }
                write!(f, "] in {} ({status})", self.field)
            }
        }
    }
}

/// Residue of `(a, f)` along `divisor` by the tame symbol: with `a` constant
/// it is the class of `a^{v_D(f)}` in the residue field of `D`.
pub fn residue_tame(a: &RationalQ, f: &RatFunc, divisor: &Divisor) -> Result<SquareClass> {
    if a.is_zero() {
        return Err(Error::Zero);
    }
    let v = match divisor {
        Divisor::Finite(pi) => f.valuation_at(pi),
        Divisor::Infinity => f.valuation_at_infinity(),
    };
    // a^v and a^(v mod 2) have the same class.
    let rep = if v.rem_euclid(2) == 1 { a.clone() } else { RationalQ::one() };
    SquareClass::rational(divisor.residue_field(), rep)
}

/// Divisors along which `(a, f)` has a nontrivial residue. Candidates are the
/// irreducible factors of the numerator and denominator of `f`, and infinity.
pub fn ramification_locus(a: &RationalQ, f: &RatFunc) -> Result<Vec<(Divisor, SquareClass)>> {
    let mut candidates: Vec<QPoly> = Vec::new();
    for part in [f.num(), f.den()] {
        for (g, _) in part.factor()? {
            if !candidates.contains(&g) {
                candidates.push(g);
            }
        }
    }
    let mut out = Vec::new();
    for d in candidates.into_iter().map(Divisor::Finite).chain(std::iter::once(Divisor::Infinity)) {
        let class = residue_tame(a, f, &d)?;
        if !class.is_trivial() {
            out.push((d, class));
        }
    }
    Ok(out)
}

/// Residue of `(p, f)` along the special fibre of the reduction mod `p`: the
/// class of the reduction `f̄` in `F_p(t)`. Only tame (odd) `p`.
pub fn reduction_residue(p: u64, f: &RatFunc) -> Result<SquareClass> {
    Place::finite(p)?;
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    // f = c · N/D with N, D primitive integer polynomials.
    let n = f.num().primitive_integer();
    let d = f.den().primitive_integer();
    let lead = |poly: &QPoly, ints: &[BigInt]| poly.lead() / RationalQ::from_integer(ints.last().unwrap().clone());
    let c = lead(f.num(), &n) / lead(f.den(), &d);
    match valuation(&c, p) {
        Some(0) => {}
        _ => {
            return Err(Error::InvalidArgument(format!("{f} has no well-defined nonzero reduction mod {p}")));
        }
    }
    let reduce = |x: &BigInt| -> u64 {
        let r = x % BigInt::from(p);
        let r = if r.is_negative() { r + BigInt::from(p) } else { r };
        r.to_u64().expect("residue below p")
    };
    let c_mod = reduce(c.numer()) * inv_mod(reduce(c.denom()), p).expect("unit") % p;
    let num = fp_trim(n.iter().map(|x| reduce(x) * c_mod % p).collect());
    let den = fp_trim(d.iter().map(reduce).collect());
    Ok(SquareClass::fp(p, num, den))
}

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

/// Square test in `F_p[t]`, p odd: a square leading coefficient and a monic
/// square root found coefficient by coefficient from the top.
fn fp_is_square(h: &[u64], p: u64) -> bool {
    let h = fp_trim(h.to_vec());
    let deg = h.len() - 1;
    if deg % 2 == 1 {
        return false;
    }
    let lead = h[deg];
    if pow_mod(lead, (p - 1) / 2, p) != 1 {
        return false;
    }
    let inv = inv_mod(lead, p).expect("nonzero");
    let monic: Vec<u64> = h.iter().map(|c| c * inv % p).collect();
    let m = deg / 2;
    let inv2 = (p + 1) / 2;
    let mut g = vec![0u64; m + 1];
    g[m] = 1;
    for k in 1..=m {
        // Coefficient of t^(2m-k) in g² is 2 g_m g_{m-k} + Σ over known pairs.
        let mut known = 0u64;
        for i in (m - k + 1)..=m {
            let j = 2 * m - k - i;
            if j > m - k && j <= m {
                known = (known + g[i] * g[j]) % p;
            }
        }
        g[m - k] = (monic[2 * m - k] + p - known) % p * inv2 % p;
    }
    fp_mul(&g, &g, p) == fp_trim(monic)
}

fn fp_display(c: &[u64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &x)| x != 0)
        .map(|(i, x)| match i {
            0 => format!("{x}"),
            1 if *x == 1 => "t".to_string(),
            1 => format!("{x}*t"),
            _ if *x == 1 => format!("t^{i}"),
            _ => format!("{x}*t^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
