//! Integer polynomials evaluated modulo `p^k`, the strong Hensel criterion and
//! Newton lifting.

use crate::error::{Error, Result};

use super::arith::{checked_pow, inv_mod, mul_mod};

/// A multivariate polynomial with `i64` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<(i64, Vec<u32>)>,
}

impl MultiPoly {
    pub fn new(nvars: usize, terms: Vec<(i64, Vec<u32>)>) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == nvars), "exponent arity mismatch");
        let terms = terms.into_iter().filter(|(c, _)| *c != 0).collect();
        Self { nvars, terms }
    }

    /// `Σ c_i x_i^d`.
    pub fn diagonal(coefficients: &[i64], degree: u32) -> Self {
        let n = coefficients.len();
        let terms = coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = degree;
                (c, e)
            })
            .collect();
        Self::new(n, terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[var] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (c * e[var] as i64, e2)
            })
            .collect();
        Self::new(self.nvars, terms)
    }

    /// Value at `point` reduced into `[0, m)`.
    pub fn eval_mod(&self, point: &[u64], m: u64) -> u64 {
        let mut acc = 0u64;
        for (c, e) in &self.terms {
            let mut t = (*c as i128).rem_euclid(m as i128) as u64;
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = mul_mod(t, x % m, m);
                }
            }
            acc = ((acc as u128 + t as u128) % m as u128) as u64;
        }
        acc
    }
}

/// Valuation of a residue modulo `p^k`; `None` when it is `0 mod p^k`.
fn residue_valuation(mut r: u64, p: u64, k: u32) -> Option<u32> {
    if r == 0 {
        return None;
    }
    let mut v = 0;
    while r % p == 0 {
        r /= p;
        v += 1;
    }
    debug_assert!(v < k);
    Some(v)
}

/// Strong Hensel criterion `v_p(f(x)) > 2 min_i v_p(∂_i f(x))`, decided from
/// the residues of `point` modulo `p^level`.
///
/// Returns [`Error::InsufficientPrecision`] when the residues do not decide it.
pub fn hensel_liftable(f: &MultiPoly, point: &[u64], p: u64, level: u32) -> Result<bool> {
    let m = checked_pow(p, level).ok_or(Error::PrecisionOverflow { p, level })?;
    let vf = residue_valuation(f.eval_mod(point, m), p, level);
    let delta = (0..f.nvars())
        .filter_map(|i| residue_valuation(f.derivative(i).eval_mod(point, m), p, level))
        .min();
    match (vf, delta) {
        // v(f) < level is exact; every known derivative valuation is exact and
        // unknown ones are >= level > v(f).
        (Some(vf), Some(d)) => Ok(vf > 2 * d),
        (Some(_), None) => Ok(false),
        (None, Some(d)) if level > 2 * d => Ok(true),
        _ => Err(Error::InsufficientPrecision { level }),
    }
}

/// Newton iteration from a Hensel-certified `point` to a residue vector `y`
/// modulo `p^target` with `f(y) ≡ 0 mod p^target` and `y ≡ point` modulo
/// `p^(min(v(f(point)), level) - δ)`, `δ` the minimal derivative valuation.
pub fn newton_lift(f: &MultiPoly, point: &[u64], p: u64, level: u32, target: u32) -> Result<Vec<u64>> {
    if !hensel_liftable(f, point, p, level)? {
        return Err(Error::InvalidArgument("point does not satisfy the Hensel criterion".into()));
    }
    let m0 = checked_pow(p, level).expect("checked above");
    let (var, delta) = (0..f.nvars())
        .filter_map(|i| residue_valuation(f.derivative(i).eval_mod(point, m0), p, level).map(|d| (i, d)))
        .min_by_key(|&(_, d)| d)
        .expect("criterion holds so some derivative is nonzero");
    // Work with enough room to divide by p^δ and still see p^target.
    let work = target.max(level) + delta + 1;
    let m = checked_pow(p, work).ok_or(Error::PrecisionOverflow { p, level: work })?;
    let pd = p.pow(delta);
    let df = f.derivative(var);
    let mut y: Vec<u64> = point.to_vec();
    for _ in 0..128 {
        let fy = f.eval_mod(&y, m);
        if fy % (m / p) == 0 {
            break;
        }
        let dy = df.eval_mod(&y, m);
        debug_assert_eq!(residue_valuation(dy, p, work), Some(delta));
        let m_red = m / pd;
        let unit_inv = inv_mod((dy / pd) % m_red, m_red).expect("unit");
        debug_assert_eq!(fy % pd, 0);
        let step = mul_mod((fy / pd) % m_red, unit_inv, m_red);
        y[var] = (y[var] + m - step % m) % m;
    }
    let mt = checked_pow(p, target).unwrap();
    let out: Vec<u64> = y.iter().map(|v| v % mt).collect();
    if f.eval_mod(&out, mt) != 0 {
        return Err(Error::Undecided("Newton iteration did not converge".into()));
    }
    Ok(out)
}
