use weilsum::arith::*;

#[test]
fn inverse_and_pow() {
    assert_eq!(mod_inverse(3, 7), Some(5));
    assert_eq!(mod_inverse(2, 4), None);
    assert_eq!(mod_inverse(5, 1), Some(0));
    assert_eq!(mod_pow(3, 6, 7), 1);
    assert_eq!(mod_pow(2, 10, 1000), 24);
}

#[test]
fn factorisation_helpers() {
    assert_eq!(prime_factors(4095), vec![3, 5, 7, 13]);
    assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    assert_eq!(euler_phi(63), 36);
    assert_eq!(euler_phi(1), 1);
    assert!(is_prime(1021) && !is_prime(1023) && !is_prime(1));
    assert_eq!(primitive_root(7), 3);
    assert_eq!(primitive_root(41), 6);
    assert_eq!(primitive_root(2), 1);
}

#[test]
fn digits_and_logs() {
    assert_eq!(digit_sum(2, 2, 2), 1);
    assert_eq!(digit_sum(25, 3, 3), 5); // 25 = 2*9 + 2*3 + 1
    assert_eq!(exact_log(243, 3), Some(5));
    assert_eq!(exact_log(18, 3), None);
    assert_eq!(isqrt(80), 8);
    assert_eq!(isqrt(81), 9);
}
