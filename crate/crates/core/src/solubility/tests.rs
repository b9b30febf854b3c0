use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::arith::checked_pow;

fn form(d: u32, c: &[i64]) -> DiagonalForm {
    DiagonalForm::new(d, c.to_vec()).unwrap()
}

/// Independent brute force: `Some(true)` if some primitive residue vector mod
/// `p^k` satisfies the strong Hensel criterion, `Some(false)` if no primitive
/// vector is even a zero mod `p^k`, `None` otherwise.
fn brute(f: &DiagonalForm, p: u64, k: u32) -> Option<bool> {
    let m = checked_pow(p, k).unwrap();
    let n = f.nvars();
    let poly = f.poly();
    let total = m.pow(n as u32);
    let mut any_zero = false;
    for idx in 0..total {
        let mut r = idx;
        let x: Vec<u64> = (0..n)
            .map(|_| {
                let v = r % m;
                r /= m;
                v
            })
            .collect();
        if x.iter().all(|v| v % p == 0) || poly.eval_mod(&x, m) != 0 {
            continue;
        }
        any_zero = true;
        if hensel_liftable(&poly, &x, p, k) == Ok(true) {
            return Some(true);
        }
    }
    if any_zero {
        None
    } else {
        Some(false)
    }
}

#[test]
fn real_examples() {
    assert_eq!(solve_real(&form(2, &[1, 1, 1])).outcome, Outcome::Insoluble);
    assert_eq!(solve_real(&form(2, &[1, 1, -1])).outcome, Outcome::Soluble);
    assert_eq!(solve_real(&form(3, &[2, 3, 5, 7])).outcome, Outcome::Soluble);
}

#[test]
fn padic_examples() {
    let f = form(2, &[1, 1, 1]);
    assert_eq!(solve_padic(&f, 3, default_level(&f, 3)).unwrap().outcome, Outcome::Soluble);
    assert_eq!(solve_padic(&f, 2, default_level(&f, 2)).unwrap().outcome, Outcome::Insoluble);
    let g = form(3, &[1, 1, 1, 1]);
    assert_eq!(solve_padic(&g, 7, default_level(&g, 7)).unwrap().outcome, Outcome::Soluble);
    assert_eq!(brute(&f, 2, 4), Some(false));
    assert_eq!(brute(&f, 3, 1), Some(true));
}

#[test]
fn content_is_reduced() {
    assert_eq!(form(2, &[2, 4, -6]).coefficients(), &[1, 2, -3]);
    assert!(DiagonalForm::new(2, vec![1, 0, 1]).is_err());
    assert!(DiagonalForm::new(1, vec![1, 1]).is_err());
    assert!(DiagonalForm::new(2, vec![1]).is_err());
}

#[test]
fn default_levels() {
    assert_eq!(default_level(&form(2, &[1, 1, 1]), 2), 7);
    assert_eq!(default_level(&form(2, &[1, 1, 1]), 3), 3);
    assert_eq!(default_level(&form(3, &[1, 2, 4, 9]), 3), 2 * 4 + 3);
}

#[test]
fn conic_examples() {
    assert!(!conic_soluble(1, 1, 1, &Place::Real).unwrap());
    assert!(conic_soluble(1, 1, -2, &Place::Finite(2)).unwrap());
    assert!(conic_soluble(5, 1, -1, &Place::Finite(5)).unwrap());
    // y² + z² = 0 has the unit solution (1, 2) mod 5 since −1 ≡ 2².
    assert!(conic_soluble(5, 1, 1, &Place::Finite(5)).unwrap());
    assert_eq!(brute(&form(2, &[5, 1, 1]), 5, 1), Some(true));
    assert!(!conic_soluble(5, 1, 2, &Place::Finite(5)).unwrap());
    assert_eq!(brute(&form(2, &[5, 1, 2]), 5, 3), Some(false));
}

#[test]
fn local_examples() {
    let r = everywhere_locally_soluble(&form(2, &[1, 1, 1])).unwrap();
    assert_eq!(r.outcome, Outcome::Insoluble);
    assert_eq!(r.failing_places(), vec![Place::Real, Place::Finite(2)]);
    assert_eq!(everywhere_locally_soluble(&form(2, &[1, 1, -1])).unwrap().outcome, Outcome::Soluble);
    assert_eq!(everywhere_locally_soluble(&form(3, &[1, 1, 1, 1])).unwrap().outcome, Outcome::Soluble);
    assert!(everywhere_locally_soluble(&form(3, &[1, 2, 3])).is_err());
    let r = everywhere_locally_soluble(&form(2, &[3, 5, -7])).unwrap();
    assert_eq!(r.bad_places, vec![Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7)]);
}

fn check_witness(f: &DiagonalForm, v: &SolubilityVerdict) {
    let p = v.place.prime().unwrap();
    match &v.witness {
        Some(Witness::Residue { point, level }) => {
            assert!(point.iter().any(|x| x % p != 0), "witness not primitive: {point:?}");
            assert_eq!(hensel_liftable(&f.poly(), point, p, *level), Ok(true));
            assert_eq!(hensel_liftable(&f.poly(), point, p, level + 2), Ok(true));
        }
        other => panic!("soluble verdict without residue witness: {other:?}"),
    }
}

#[test]
fn conic_cross_validation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = 0;
    while seen < 500 {
        let a: Vec<i64> = (0..3).map(|_| rng.gen_range(-50..=50)).collect();
        if a.contains(&0) {
            continue;
        }
        seen += 1;
        let f = form(2, &a);
        let c = f.coefficients();
        let expect = conic_soluble(c[0], c[1], c[2], &Place::Real).unwrap();
        assert_eq!(solve_real(&f).is_soluble(), expect, "{a:?} at inf");
        for p in [2u64, 3, 5, 17] {
            let v = solve_padic(&f, p, default_level(&f, p)).unwrap();
            assert_ne!(v.outcome, Outcome::Undecided, "{a:?} at {p}");
            let expect = conic_soluble(c[0], c[1], c[2], &Place::Finite(p)).unwrap();
            assert_eq!(v.is_soluble(), expect, "{a:?} at {p}");
            if v.is_soluble() {
                check_witness(&f, &v);
            }
        }
    }
}

#[test]
fn cubic_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut decided = 0;
    for _ in 0..60 {
        let a: Vec<i64> = (0..4).map(|_| rng.gen_range(1..=30) * if rng.gen() { 1 } else { -1 }).collect();
        let f = form(3, &a);
        for (p, k) in [(2u64, 4u32), (3, 3), (7, 2)] {
            let v = solve_padic(&f, p, default_level(&f, p)).unwrap();
            assert_ne!(v.outcome, Outcome::Undecided);
            if v.is_soluble() {
                check_witness(&f, &v);
            }
            if let Some(b) = brute(&f, p, k) {
                decided += 1;
                assert_eq!(v.is_soluble(), b, "{:?} at {p}", f.coefficients());
            }
        }
    }
    assert!(decided > 100);
}

#[test]
fn ternary_cubics_against_brute_force() {
    // d = m = 3: valuation classes can be singletons, so insolubility occurs.
    let mut insoluble = 0;
    for a in [[1i64, 2, 4], [1, 7, 49], [1, 3, 9], [2, 3, 5], [1, 1, 7], [1, 2, 7], [1, 1, 1]] {
        let f = form(3, &a);
        for (p, k) in [(2u64, 5u32), (3, 4), (7, 3)] {
            let v = solve_padic(&f, p, default_level(&f, p)).unwrap();
            if let Some(b) = brute(&f, p, k) {
                assert_eq!(v.is_soluble(), b, "{a:?} at {p}");
            }
            if v.outcome == Outcome::Insoluble {
                insoluble += 1;
            }
        }
    }
    assert!(insoluble > 0);
}

#[test]
fn monotone_in_level() {
    for a in [[1i64, 1, 1], [1, 2, -3], [4, 9, -5], [3, 5, 7], [1, 1, -2]] {
        let f = form(2, &a);
        for p in [2u64, 3, 5, 7] {
            let base = solve_padic(&f, p, default_level(&f, p)).unwrap().outcome;
            for extra in 1..4 {
                let o = solve_padic(&f, p, default_level(&f, p) + extra).unwrap().outcome;
                assert_eq!(o, base, "{a:?} at {p}");
            }
        }
    }
}

#[test]
fn lind_reichardt_places() {
    let real = lind_reichardt_local(&Place::Real, 0).unwrap();
    assert_eq!(real.outcome, Outcome::Soluble);
    let v17 = lind_reichardt_local(&Place::Finite(17), 4).unwrap();
    assert_eq!(v17.witness, Some(Witness::Residue { point: vec![1, 3, 0], level: 1 }));
    let f = lind_reichardt_poly();
    for p in crate::padic::arith::primes_up_to(100) {
        let v = lind_reichardt_local(&Place::Finite(p), 12).unwrap();
        assert_eq!(v.outcome, Outcome::Soluble, "p = {p}");
        let Some(Witness::Residue { point, level }) = v.witness else { panic!() };
        assert_eq!(hensel_liftable(&f, &point, p, level), Ok(true));
        assert_eq!(hensel_liftable(&f, &point, p, level + 2), Ok(true));
    }
}

#[test]
fn lind_reichardt_certificate() {
    let c = LindReichardtCertificate::assemble(1000);
    assert_eq!(c.fourth_powers_mod_17, vec![1, 4, 13, 16]);
    assert_eq!(c.sqrt_two * c.sqrt_two % 17, 2);
    assert_eq!(c.sqrt_minus_one * c.sqrt_minus_one % 17, 16);
    assert!(!c.two_is_fourth_power);
    assert!(c.reciprocity_instances.contains(&13));
    assert!(c.holds());
    assert!(lind_reichardt_global_insoluble());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_invariance(
        a in proptest::collection::vec((1i64..40).prop_flat_map(|x| prop_oneof![Just(x), Just(-x)]), 3),
        i in 0usize..3,
        p in prop_oneof![Just(2u64), Just(3), Just(5)],
        unit in prop_oneof![Just(1i64), Just(-1), Just(7), Just(11)],
    ) {
        prop_assume!(unit % p as i64 != 0);
        let f = form(2, &a);
        let mut b = a.clone();
        b[i] *= (p * p) as i64;
        let c: Vec<i64> = b.iter().map(|x| x * unit).collect();
        let g = form(2, &b);
        let h = form(2, &c);
        let lf = default_level(&f, p).max(default_level(&g, p));
        let vf = solve_padic(&f, p, lf).unwrap().outcome;
        prop_assert_eq!(vf, solve_padic(&g, p, lf).unwrap().outcome);
        prop_assert_eq!(vf, solve_padic(&h, p, lf).unwrap().outcome);
    }
}
