use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use weilsum::arith::{self, gcd};
use weilsum::cyclo::*;

fn cyc(n: u32, gr: &[i64]) -> CycInt {
    CycInt::from_group_ring(n, gr.to_vec())
}

/// `ζ_5 - ζ_5^2 - ζ_5^3 + ζ_5^4`, the quadratic Gauss sum over F_5.
fn sqrt5() -> CycInt {
    cyc(5, &[0, 1, -1, -1, 1])
}

#[test]
fn cyclotomic_polynomials() {
    assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
    assert_eq!(*cyclotomic_poly(7), vec![1; 7]);
    assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
    assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    for n in 1..=60u32 {
        let phi = cyclotomic_poly(n);
        assert_eq!(phi.len() as u64 - 1, arith::euler_phi(n as u64), "n={n}");
        if arith::is_prime(n as u64) {
            assert!(phi.iter().all(|&c| c == 1));
        }
    }
    // Φ_105 is the first with a coefficient of absolute value 2
    assert!(cyclotomic_poly(105).contains(&-2));
}

#[test]
fn ring_examples() {
    assert!(cyc(3, &[1, 1, 1]).is_zero());
    assert_eq!(
        &CycInt::<i64>::zeta_pow(5, 1) * &CycInt::zeta_pow(5, 4),
        CycInt::one(5)
    );
    assert_eq!(&sqrt5() * &sqrt5(), CycInt::from_int(5, 5));
    for n in [4u32, 6, 8, 12, 15] {
        assert!(cyc(n, &vec![1; n as usize]).is_zero());
    }
    // ζ_6 = -ζ_6^4
    let z6 = CycInt::<i64>::zeta_pow(6, 1);
    let minus_z64 = -&CycInt::zeta_pow(6, 4);
    assert!(z6.equals(&minus_z64).unwrap());
    assert_eq!(
        CycInt::<i64>::one(3).try_add(&CycInt::one(5)),
        Err(CycError::OrderMismatch(3, 5))
    );
}

#[test]
fn rational_detection() {
    assert_eq!(CycInt::<i64>::zero(5).as_rational_integer(), Some(0));
    let s = cyc(5, &[-1, -1, -1, -1, -1]);
    assert_eq!(s.as_rational_integer(), Some(0));
    assert_eq!(sqrt5().as_rational_integer(), None);
    assert_eq!(
        cyc(12, &[3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).as_rational_integer(),
        Some(3)
    );
    // 1 + ζ_4^2 = 0
    assert_eq!(cyc(4, &[1, 0, 1, 0]).as_rational_integer(), Some(0));
}

#[test]
fn galois_examples() {
    let x = cyc(7, &[3, -1, 4, 1, -5, 9, 2]);
    assert_eq!(x.galois_apply(1).unwrap(), x);
    assert_eq!(sqrt5().galois_apply(4).unwrap(), sqrt5());
    assert_eq!(sqrt5().conj(), sqrt5());
    assert_eq!(sqrt5().galois_apply(2).unwrap(), -&sqrt5());
    assert_eq!(x.conj().conj(), x);
    assert!(matches!(x.galois_apply(7), Err(CycError::NotAUnit { .. })));
    assert!(matches!(
        cyc(12, &[1; 12]).galois_apply(4),
        Err(CycError::NotAUnit { .. })
    ));
}

#[test]
fn valuation_examples() {
    for p in [2u32, 3, 5, 7, 11] {
        let pp = p as u64;
        assert_eq!(
            CycInt::<i64>::zero(p).p_adic_valuation().unwrap(),
            Valuation::Infinite
        );
        let pi = &CycInt::<i64>::one(p) - &CycInt::zeta_pow(p, 1);
        assert_eq!(pi.p_adic_valuation().unwrap(), Valuation::from_units(1, pp));
        let pv = CycInt::<i64>::from_int(p, p as i64);
        assert_eq!(pv.p_adic_valuation().unwrap(), Valuation::integer(1));
        assert_eq!(
            CycInt::<i64>::from_int(p, (p * p * 3 + p * p) as i64 * 7)
                .p_adic_valuation()
                .unwrap(),
            integer_valuation((p * p * 3 + p * p) as i64 * 7, pp)
        );
    }
    assert_eq!(
        sqrt5().p_adic_valuation().unwrap(),
        Valuation::Finite(Ratio::new(1, 2))
    );
    assert_eq!(
        cyc(6, &[1, 0, 0, 0, 0, 0]).p_adic_valuation(),
        Err(CycError::OrderNotPrime(6))
    );
    let nine = CycInt::<i64>::from_int(3, 9);
    assert_eq!(nine.p_adic_valuation_capped(3).unwrap(), None);
    assert_eq!(
        nine.p_adic_valuation_capped(5).unwrap(),
        Some(Valuation::integer(2))
    );
}

#[test]
fn integer_divisibility() {
    assert!(cyc(3, &[2, 2, 0]).divisible_by_integer(2));
    assert!(!CycInt::<i64>::one(3).divisible_by_integer(2));
    // 2 + 2ζ_6 + (1 + ζ_6^2 + ζ_6^4) = 2 + 2ζ_6 in Z[ζ_6]
    assert!(cyc(6, &[3, 2, 1, 0, 1, 0]).divisible_by_integer(2));
}

#[test]
fn lift_and_text() {
    let x = cyc(5, &[0, 1, 0, 0, 0]);
    let l = x.lift(20).unwrap();
    assert_eq!(l, CycInt::zeta_pow(20, 4));
    assert!(x.lift(12).is_err());
    assert_eq!(sqrt5().to_string(), "5:[-1,0,-2,-2]");
    assert_eq!(sqrt5().value_text(), "5:[-1,0,-2,-2]");
    assert_eq!(CycInt::<i64>::from_int(5, -4).value_text(), "-4");
    let back: CycInt = "5:[-1,0,-2,-2]".parse().unwrap();
    assert_eq!(back, sqrt5());
    let gr: CycInt = "5:[0,1,-1,-1,1]".parse().unwrap();
    assert_eq!(gr, sqrt5());
    assert!("5:[1,2".parse::<CycInt>().is_err());
}

#[test]
fn bigint_coefficients() {
    let big = CycInt::<i64>::from_int(3, i64::MAX);
    assert_eq!(big.try_add(&CycInt::one(3)), Err(CycError::Overflow));
    let b = big.to_big();
    let s = b.try_add(&CycInt::one(3)).unwrap();
    assert_eq!(s.as_rational_integer().unwrap(), BigInt::from(i64::MAX) + 1);
    assert!(s.to_small().is_none());
}

#[test]
fn real_signs() {
    assert_eq!(sqrt5().real_sign(), Ordering::Greater);
    assert_eq!((-&sqrt5()).real_sign(), Ordering::Less);
    assert_eq!(CycInt::<i64>::zero(7).real_sign(), Ordering::Equal);
    // ζ + ζ^4 = (√5 - 1)/2 > 0, ζ^2 + ζ^3 = (-√5 - 1)/2 < 0
    assert_eq!(cyc(5, &[0, 1, 0, 0, 1]).real_sign(), Ordering::Greater);
    assert_eq!(cyc(5, &[0, 0, 1, 1, 0]).real_sign(), Ordering::Less);
    // 2cos(2π/7) + 2cos(4π/7) + 2cos(6π/7) = -1
    assert_eq!(cyc(7, &[1, 1, 1, 1, 1, 1, 1]).real_sign(), Ordering::Equal);
    assert_eq!(cyc(7, &[0, 1, 1, 1, 1, 1, 1]).real_sign(), Ordering::Less);
    // ζ_12 + ζ_12^11 = √3
    let r3 = cyc(12, &[-1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
    assert_eq!(r3.real_sign(), Ordering::Greater);
    // 2 - √3 > 0 but tiny compared to its parts
    let d = &CycInt::from_int(12, 2) - &cyc(12, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
    assert_eq!(d.real_sign(), Ordering::Greater);
}

/// `2cos(2πt/n)` scaled by `k` against the float value, away from integers.
#[test]
fn real_parts_agree_with_floats() {
    for n in [5u32, 7, 8, 12, 13, 40, 97] {
        for t in 0..n as i64 {
            let x = &CycInt::<i64>::zeta_pow(n, t) + &CycInt::zeta_pow(n, -t);
            for k in [1i64, 1000, 1 << 30] {
                let want =
                    k as f64 * 2.0 * (2.0 * std::f64::consts::PI * t as f64 / n as f64).cos();
                let m = want.floor();
                if want - m < 1e-6 || m + 1.0 - want < 1e-6 {
                    continue;
                }
                let kx = x.try_scale(&k).unwrap();
                assert_eq!(
                    kx.real_cmp_int(m as i64),
                    Ordering::Greater,
                    "n={n} t={t} k={k}"
                );
                assert_eq!(
                    kx.real_cmp_int(m as i64 + 1),
                    Ordering::Less,
                    "n={n} t={t} k={k}"
                );
                assert!(kx.real_abs_below(want.abs().ceil() as i64));
            }
        }
    }
}

fn arb_elem(n: u32) -> impl Strategy<Value = CycInt> {
    prop::collection::vec(-20i64..20, n as usize).prop_map(move |v| CycInt::from_group_ring(n, v))
}

fn arb_order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 4, 5, 7, 8, 12, 26])
}

proptest! {
    #[test]
    fn ring_axioms(
        (x, y, z) in arb_order().prop_flat_map(|n| (arb_elem(n), arb_elem(n), arb_elem(n)))
    ) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn galois_is_an_action_preserving_rationality(
        (x, j, k) in arb_order().prop_flat_map(|n| {
            let units: Vec<u64> = (1..n as u64).filter(|&u| gcd(u, n as u64) == 1).collect();
            (arb_elem(n), prop::sample::select(units.clone()), prop::sample::select(units))
        })
    ) {
        let n = x.n() as u64;
        let lhs = x.galois_apply(j).unwrap().galois_apply(k).unwrap();
        prop_assert_eq!(lhs, x.galois_apply(j * k % n).unwrap());
        let gx = x.galois_apply(j).unwrap();
        prop_assert_eq!(gx.is_zero(), x.is_zero());
        prop_assert_eq!(gx.as_rational_integer(), x.as_rational_integer());
        let prod = &x * &x.conj();
        prop_assert_eq!(prod.conj(), prod);
    }

    #[test]
    fn valuation_is_additive_and_ultrametric(
        (x, y) in prop::sample::select(vec![3u32, 5, 7]).prop_flat_map(|p| (arb_elem(p), arb_elem(p)))
    ) {
        prop_assume!(!x.is_zero() && !y.is_zero());
        let vx = x.p_adic_valuation().unwrap();
        let vy = y.p_adic_valuation().unwrap();
        prop_assert_eq!((&x * &y).p_adic_valuation().unwrap(), vx.plus(&vy));
        let vs = (&x + &y).p_adic_valuation().unwrap();
        prop_assert!(vs >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }
}
