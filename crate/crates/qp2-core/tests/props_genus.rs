//! Exhaustive divisibility and equivalence checks for the genus layer.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qp2_core::bernoulli::BernoulliCtx;
use qp2_core::genus::{
    a_coeffs, check_theorem31, e_class_bruteforce, e_classes, hattori_stong_full_check, l_coeffs,
    m_value,
};

#[test]
fn alternating_power_sums_are_divisible_by_their_order() {
    for l in 1..=64u64 {
        for k in 1..=64u64 {
            let m = m_value(l, k);
            assert!((m % BigInt::from(l)).is_zero(), "l={l} k={k}");
        }
    }
}

/// The sharpened Lipschitz-Sylvester integrality: `a^(2k-1) (a^(2k) - 1)
/// |B_2k|/2k` is an integer for every `a` once `k >= 2`.  At `k = 1` the
/// 2-adic condition `2k - 1 >= v2(2k) + 1` fails, and the product misses
/// integrality exactly for `a = 2 (mod 4)` — both directions are asserted.
#[test]
fn scaled_divided_bernoulli_values_are_integral() {
    let mut ctx = BernoulliCtx::new();
    for k in 1..=40u64 {
        let b = ctx.divided_bernoulli(2 * k).unwrap();
        for a in 1..=10u64 {
            let big = BigUint::from(a);
            let scale = big.pow(2 * k as u32 - 1) * (big.pow(2 * k as u32) - BigUint::one());
            let integral = (scale * &b.numerator % &b.denominator).is_zero();
            let expected = k >= 2 || a % 4 != 2;
            assert_eq!(integral, expected, "a={a} k={k}");
        }
    }
}

#[test]
fn signature_and_roof_coefficients_stay_linked() {
    // s_2k = -2^(4k+1) (2^(4k-1) - 1) a_2k, checked well past the unit range.
    let mut ctx = BernoulliCtx::new();
    for k in 1..=40u64 {
        let lc = l_coeffs(k, &mut ctx).unwrap();
        let ac = a_coeffs(k, &mut ctx).unwrap();
        let two = BigInt::from(2);
        let factor = -two.pow(4 * k as u32 + 1) * (two.pow(4 * k as u32 - 1) - BigInt::one());
        assert_eq!(lc.s_2k, BigRational::from_integer(factor) * ac.a_2k, "k={k}");
    }
}

#[test]
fn quadratic_coefficients_follow_from_the_linear_ones() {
    let mut ctx = BernoulliCtx::new();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for k in 1..=40u64 {
        let lc = l_coeffs(k, &mut ctx).unwrap();
        let ac = a_coeffs(k, &mut ctx).unwrap();
        assert_eq!(lc.s_kk, (&lc.s_k * &lc.s_k - &lc.s_2k) * &half, "k={k}");
        assert_eq!(ac.a_kk, (&ac.a_k * &ac.a_k - &ac.a_2k) * &half, "k={k}");
    }
}

#[test]
fn series_oracle_matches_the_closed_forms() {
    for k in 1..=4u64 {
        let es = e_classes(2 * k, k).unwrap();
        for l in 1..=2 * k {
            let oracle = e_class_bruteforce(l, k).unwrap();
            assert_eq!(es[(l - 1) as usize], oracle, "k={k} l={l}");
        }
    }
}

#[test]
fn compressed_check_equals_the_full_lattice_check() {
    let mut ctx = BernoulliCtx::new();
    for k in 1..=2u64 {
        for x in -20i64..=20 {
            for y in -200i64..=200 {
                let x = BigInt::from(x);
                let y = BigInt::from(y);
                let fast = check_theorem31(k, &x, &y, &mut ctx).unwrap().passed();
                let full = hattori_stong_full_check(k, &x, &y, &mut ctx).unwrap();
                assert_eq!(fast, full, "k={k} x={x} y={y}");
            }
        }
    }
}

proptest! {
    #[test]
    fn order_divisibility_holds_at_random_points(l in 1u64..=100, k in 1u64..=100) {
        let m = m_value(l, k);
        prop_assert!((m % BigInt::from(l)).is_zero());
    }

    #[test]
    fn checks_agree_at_random_points(k in 1u64..=2, x in -500i64..=500, y in -5000i64..=5000) {
        let mut ctx = BernoulliCtx::new();
        let x = BigInt::from(x);
        let y = BigInt::from(y);
        let fast = check_theorem31(k, &x, &y, &mut ctx).unwrap().passed();
        let full = hattori_stong_full_check(k, &x, &y, &mut ctx).unwrap();
        prop_assert_eq!(fast, full);
    }
}
