//! Argument parsers for rationals, bound ladders and rational functions of `t`.

use hasse_core::brauer::{QPoly, RatFunc};
use hasse_core::RationalQ;
use num_bigint::BigInt;

pub fn rational(s: &str) -> Result<RationalQ, String> {
    let s = s.trim();
    let q = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if d == BigInt::from(0) {
                return Err(format!("zero denominator in {s:?}"));
            }
            RationalQ::new(n, d)
        }
        None => RationalQ::from_integer(s.parse().map_err(|_| format!("not a rational number: {s:?}"))?),
    };
    Ok(q)
}

pub fn ladder(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let b: u64 = part.trim().parse().map_err(|_| format!("bad bound {part:?}"))?;
        if b == 0 {
            return Err("bounds must be positive".into());
        }
        out.push(b);
    }
    if out.is_empty() {
        return Err("empty ladder".into());
    }
    Ok(out)
}

/// A polynomial such as `t^2 - 3t + 1` or `2*t^3-1` with integer coefficients.
pub fn poly(s: &str) -> Result<QPoly, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(&compact);
    if compact.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        if (c == '+' || c == '-') && i > 0 && !compact[..i].ends_with('^') {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1, &term[1..]),
            Some(b'+') => (1, &term[1..]),
            _ => (1, term),
        };
        let (coef, deg) = match body.find('t') {
            None => (body.parse::<i64>().map_err(|_| format!("bad term {term:?}"))?, 0usize),
            Some(pos) => {
                let head = body[..pos].trim_end_matches('*');
                let coef = if head.is_empty() { 1 } else { head.parse().map_err(|_| format!("bad term {term:?}"))? };
                let tail = &body[pos + 1..];
                let deg = match tail.strip_prefix('^') {
                    Some(e) => e.parse().map_err(|_| format!("bad exponent in {term:?}"))?,
                    None if tail.is_empty() => 1,
                    None => return Err(format!("bad term {term:?}")),
                };
                (coef, deg)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += sign * coef;
    }
    Ok(QPoly::from_ints(&coeffs))
}

/// `num` or `num/den`, where a top-level `/` separates two polynomials.
pub fn ratfunc(s: &str) -> Result<RatFunc, String> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    let (num, den) = match split {
        Some(i) => (poly(&s[..i])?, poly(&s[i + 1..])?),
        None => (poly(s)?, QPoly::one()),
    };
    RatFunc::new(num, den).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(rational("-3/6").unwrap(), RationalQ::new((-1).into(), 2.into()));
        assert_eq!(rational("17").unwrap(), RationalQ::from_integer(17.into()));
        assert!(rational("1/0").is_err());
        assert!(rational("x").is_err());
    }

    #[test]
    fn polynomials() {
        assert_eq!(poly("t^2 - 3t + 1").unwrap(), QPoly::from_ints(&[1, -3, 1]));
        assert_eq!(poly("-t").unwrap(), QPoly::from_ints(&[0, -1]));
        assert_eq!(poly("2*t^3-1").unwrap(), QPoly::from_ints(&[-1, 0, 0, 2]));
        assert!(poly("t^").is_err());
        let f = ratfunc("(t-1)/(t+1)").unwrap();
        assert_eq!(f.num(), &QPoly::from_ints(&[-1, 1]));
    }

    #[test]
    fn ladders() {
        assert_eq!(ladder("100, 200,400").unwrap(), vec![100, 200, 400]);
        assert!(ladder("").is_err());
        assert!(ladder("0").is_err());
    }
}
