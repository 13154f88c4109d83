use weilsum::arith;
use weilsum::ffield::*;

/// Remainder of `a` modulo the monic `m` over `F_p`, coefficients low first.
fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let n = m.len() - 1;
    while r.len() > n {
        let c = r.pop().unwrap() % p;
        let shift = r.len() - n;
        for (k, &mk) in m[..n].iter().enumerate() {
            r[shift + k] = (r[shift + k] + (p - c) * mk) % p;
        }
    }
    r
}

/// Product through coefficient vectors and schoolbook multiplication.
fn mul_by_coeffs(ctx: &FieldCtx, x: FieldElem, y: FieldElem) -> FieldElem {
    let p = ctx.p();
    let (a, b) = (ctx.coeffs(x), ctx.coeffs(y));
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    ctx.from_coeffs(&rem(&prod, ctx.modulus(), p)).unwrap()
}

/// Irreducibility by trial division against every monic polynomial of
/// degree at most half the target degree.
fn irreducible_by_trial(m: &[u64], p: u64) -> bool {
    let n = m.len() - 1;
    for deg in 1..=n / 2 {
        for idx in 0..p.pow(deg as u32) {
            let mut v = idx;
            let mut f: Vec<u64> = (0..deg)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect();
            f.push(1);
            if rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[test]
fn rabin_agrees_with_trial_division() {
    for (p, e) in [
        (2u64, 2u32),
        (2, 3),
        (2, 4),
        (2, 6),
        (3, 2),
        (3, 3),
        (3, 4),
        (5, 2),
        (5, 3),
    ] {
        for idx in 0..p.pow(e) {
            let mut v = idx;
            let mut m: Vec<u64> = (0..e)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect();
            m.push(1);
            assert_eq!(
                make_field(p, e, Some(&m)).is_ok(),
                irreducible_by_trial(&m, p),
                "p={p} m={m:?}"
            );
        }
    }
}

#[test]
fn make_field_examples() {
    let f2 = make_field(2, 1, None).unwrap();
    assert_eq!(f2.q(), 2);
    assert_eq!(f2.generator(), f2.one());

    let f8 = make_field(2, 3, None).unwrap();
    assert_eq!(f8.modulus(), &[1, 1, 0, 1]);

    assert_eq!(make_field(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
    assert_eq!(
        make_field(2, 3, Some(&[1, 0, 0, 1])).unwrap_err(),
        FieldError::ReducibleModulus
    );
    assert!(matches!(
        make_field(2, 3, Some(&[1, 1, 1])),
        Err(FieldError::DegreeMismatch { .. })
    ));
    assert!(matches!(
        make_field(2, 21, None),
        Err(FieldError::TooLarge { .. })
    ));
}

#[test]
fn default_modulus_is_first_irreducible_in_scan_order() {
    for (p, e) in [(2u64, 2u32), (2, 4), (3, 2), (3, 3), (5, 2)] {
        let ctx = make_field(p, e, None).unwrap();
        let key = |m: &[u64]| m.iter().rev().skip(1).fold(0u64, |acc, &c| acc * p + c);
        let chosen = key(ctx.modulus());
        for idx in 0..chosen {
            let mut v = idx;
            let mut m: Vec<u64> = (0..e)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect();
            m.push(1);
            assert!(!irreducible_by_trial(&m, p));
        }
    }
}

#[test]
fn generator_has_full_order_and_is_smallest() {
    for (p, e) in [(2u64, 4u32), (3, 2), (5, 1), (7, 2), (2, 6)] {
        let ctx = make_field(p, e, None).unwrap();
        let order = |x: FieldElem| {
            let mut y = x;
            let mut k = 1u64;
            while y != ctx.one() {
                y = ctx.mul(y, x);
                k += 1;
            }
            k
        };
        assert_eq!(order(ctx.generator()), ctx.q() - 1);
        for x in 1..ctx.generator().index() {
            assert!(order(ctx.element(x).unwrap()) < ctx.q() - 1);
        }
    }
}

#[test]
fn arithmetic_examples() {
    let f8 = make_field(2, 3, None).unwrap();
    for x in f8.units() {
        assert_eq!(f8.pow(x, 7).unwrap(), f8.one());
    }
    let f5 = make_field(5, 1, None).unwrap();
    assert_eq!(f5.mul(f5.from_int(2), f5.from_int(3)), f5.one());
    // t * t^2 = t^3 = t + 1 modulo x^3 + x + 1
    let t = f8.from_coeffs(&[0, 1]).unwrap();
    let t2 = f8.from_coeffs(&[0, 0, 1]).unwrap();
    assert_eq!(f8.mul(t, t2), f8.from_coeffs(&[1, 1]).unwrap());
    assert_eq!(f8.pow(f8.zero(), -1), Err(FieldError::ZeroInverse));
    assert_eq!(f8.pow(f8.zero(), 0).unwrap(), f8.one());
    for x in f8.units() {
        assert_eq!(f8.mul(x, f8.inv(x).unwrap()), f8.one());
        assert_eq!(
            f8.pow(x, -3).unwrap(),
            f8.inv(f8.pow(x, 3).unwrap()).unwrap()
        );
    }
}

#[test]
fn multiplication_matches_polynomial_reduction() {
    for (p, e) in [(3u64, 3u32), (5, 2), (2, 5), (7, 2)] {
        let ctx = make_field(p, e, None).unwrap();
        for x in ctx.elements() {
            for y in ctx.elements().step_by(3) {
                assert_eq!(ctx.mul(x, y), mul_by_coeffs(&ctx, x, y), "{x:?} * {y:?}");
            }
        }
    }
}

#[test]
fn trace_examples() {
    let f4 = make_field(2, 2, None).unwrap();
    assert_eq!(f4.modulus(), &[1, 1, 1]);
    let t = f4.from_coeffs(&[0, 1]).unwrap();
    assert_eq!(f4.trace_abs(t), 1);
    for (p, e) in [(3u64, 4u32), (5, 3), (2, 7)] {
        let ctx = make_field(p, e, None).unwrap();
        assert_eq!(ctx.trace_abs(ctx.zero()), 0);
        for c in 0..p {
            let x = ctx.from_int(c as i64);
            assert_eq!(ctx.trace_abs(x), (e as u64 * c) % p);
        }
    }
}

#[test]
fn trace_is_linear_frobenius_invariant_and_balanced() {
    for (p, e) in [(2u64, 8u32), (3, 5), (5, 3), (13, 2)] {
        let ctx = make_field(p, e, None).unwrap();
        let mut fibers = vec![0u64; p as usize];
        for x in ctx.elements() {
            // independent route: Σ x^(p^j) computed with field operations
            let mut sum = ctx.zero();
            let mut y = x;
            for _ in 0..e {
                sum = ctx.add(sum, y);
                y = ctx.pow_u(y, p);
            }
            assert_eq!(sum.index(), ctx.trace_abs(x));
            assert_eq!(ctx.trace_abs(ctx.frobenius(x, 1)), ctx.trace_abs(x));
            fibers[ctx.trace_abs(x) as usize] += 1;
        }
        assert!(fibers.iter().all(|&n| n == ctx.q() / p));
        for x in ctx.elements().step_by(7) {
            for y in ctx.elements().step_by(11) {
                let lhs = ctx.trace_abs(ctx.add(x, y));
                assert_eq!(lhs, (ctx.trace_abs(x) + ctx.trace_abs(y)) % p);
            }
        }
    }
}

#[test]
fn relative_trace_and_norm() {
    let f9 = make_field(3, 2, None).unwrap();
    let f3 = make_field(3, 1, None).unwrap();
    let emb = Embedding::new(&f3, &f9).unwrap();
    for x in f9.elements() {
        assert_eq!(f9.trace_rel(2, x).unwrap(), x);
        assert_eq!(f9.norm_rel(2, x).unwrap(), x);
        let sq = f9.mul(x, x);
        if f9.in_subfield(1, sq).unwrap() && !f9.in_subfield(1, x).unwrap() {
            assert_eq!(f9.trace_rel(1, x).unwrap(), f9.zero());
        }
        let n = f9.norm_rel(1, x).unwrap();
        assert_eq!(n, f9.pow_u(x, 4));
        assert!(emb.preimage(n).is_some());
    }
    let ng = f9.norm_rel(1, f9.generator()).unwrap();
    assert_ne!(ng, f9.one());
    assert_eq!(f9.mul(ng, ng), f9.one());
    assert!(f9.trace_rel(3, f9.one()).is_err());

    let f16 = make_field(2, 4, None).unwrap();
    for x in f16.elements() {
        let t = f16.trace_rel(2, x).unwrap();
        assert!(f16.in_subfield(2, t).unwrap());
        // F_4 -> F_2 trace of t, computed inside F_16 as t + t^2
        let inner = f16.add(t, f16.frobenius(t, 1));
        assert_eq!(inner.index(), f16.trace_abs(x));
    }
}

#[test]
fn embedding_is_a_ring_homomorphism() {
    for (p, k, l) in [
        (2u64, 2u32, 4u32),
        (2, 1, 3),
        (3, 1, 2),
        (2, 3, 6),
        (3, 2, 4),
        (5, 1, 2),
    ] {
        let sub = make_field(p, k, None).unwrap();
        let sup = make_field(p, l, None).unwrap();
        let emb = Embedding::new(&sub, &sup).unwrap();
        assert_eq!(emb.apply(sub.zero()), sup.zero());
        assert_eq!(emb.apply(sub.one()), sup.one());
        for x in sub.elements() {
            let ex = emb.apply(x);
            assert!(sup.in_subfield(k, ex).unwrap());
            assert_eq!(emb.preimage(ex), Some(x));
            for y in sub.elements() {
                let ey = emb.apply(y);
                assert_eq!(emb.apply(sub.mul(x, y)), sup.mul(ex, ey));
                assert_eq!(emb.apply(sub.add(x, y)), sup.add(ex, ey));
            }
        }
    }
    let f3 = make_field(3, 1, None).unwrap();
    let f9 = make_field(3, 2, None).unwrap();
    assert_eq!(embed(&f3, &f9, f3.from_int(2)).unwrap(), f9.from_int(2));
    assert!(Embedding::new(&f9, &make_field(3, 3, None).unwrap()).is_err());
}

#[test]
fn exponent_class_examples() {
    let f8 = make_field(2, 3, None).unwrap();
    let classes = exponent_classes(&f8);
    let orbits: Vec<Vec<u64>> = classes.iter().map(|c| c.orbit.clone()).collect();
    assert_eq!(orbits, vec![vec![1, 2, 4], vec![3, 5, 6]]);
    assert!(classes[0].degenerate && !classes[1].degenerate);

    let f5 = make_field(5, 1, None).unwrap();
    let classes = exponent_classes(&f5);
    assert_eq!(classes.len(), 2);
    assert_eq!(classes[0].orbit, vec![1]);
    assert_eq!(classes[1].orbit, vec![3]);
    assert!(classes[0].degenerate);
}

#[test]
fn classes_partition_the_units() {
    for (p, e) in [(2u64, 6u32), (3, 4), (5, 2), (7, 2), (2, 8), (17, 1)] {
        let ctx = make_field(p, e, None).unwrap();
        let classes = exponent_classes(&ctx);
        let total: usize = classes.iter().map(|c| c.orbit.len()).sum();
        assert_eq!(total as u64, arith::euler_phi(ctx.q() - 1));
        assert!(classes[0].degenerate && classes[0].d == 1);
        for c in &classes {
            assert_eq!(c.d, c.orbit[0]);
            if c.degenerate {
                assert_eq!(c.d % (p - 1).max(1), 1 % (p - 1).max(1));
            }
        }
    }
}

#[test]
fn degeneracy_and_niho() {
    let f8 = make_field(2, 3, None).unwrap();
    assert!(is_degenerate(&f8, 2).unwrap());
    assert!(!is_degenerate(&f8, 3).unwrap());
    assert!(matches!(
        is_degenerate(&f8, 7),
        Err(FieldError::NotCoprime { .. })
    ));
    let f9 = make_field(3, 2, None).unwrap();
    assert!(!is_degenerate(&f9, 5).unwrap());
    let f3 = make_field(3, 1, None).unwrap();
    assert!(is_degenerate(&f3, 5).unwrap());
    for c in exponent_classes(&f9) {
        assert_eq!(is_niho(&f9, c.d), Ok(true));
    }
    let f16 = make_field(2, 4, None).unwrap();
    assert!(is_niho(&f16, 7).unwrap());
    let f64 = make_field(2, 6, None).unwrap();
    assert!(is_niho(&f64, 11).unwrap());
    assert_eq!(is_niho(&f8, 3), Err(FieldError::OddDegree(3)));
}

#[test]
fn descriptor_round_trip() {
    let d: FieldDescriptor = "2^3/1,1,0,1".parse().unwrap();
    assert_eq!(d.p, 2);
    assert_eq!(d.e, 3);
    assert_eq!(d.to_string(), "2^3/1,1,0,1");
    let ctx = d.build().unwrap();
    assert_eq!(ctx.descriptor(), "2^3/1,1,0,1");
    assert_eq!(parse_field("2^3").unwrap(), ctx);
    assert_eq!(parse_field("5").unwrap().q(), 5);
    assert!("2^x".parse::<FieldDescriptor>().is_err());
    assert!(parse_field("2^3/1,0,0,1").is_err());
    let other = parse_field("2^3/1,0,1,1").unwrap();
    assert_eq!(parse_field(&other.descriptor()).unwrap(), other);
}
