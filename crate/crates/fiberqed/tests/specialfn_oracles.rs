//! Special-function values checked against independent integral
//! representations, and the frozen reference points.

mod common;

use common::{bessel_j_oracle, bessel_k_oracle};
use fiberqed::specialfn::{bessel_j, bessel_k};
use proptest::prelude::*;

#[test]
fn first_j0_root_from_bisection_oracle() {
    // locate the first root of J0 with the integral-representation oracle
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    assert!(bessel_j_oracle(0, lo) > 0.0 && bessel_j_oracle(0, hi) < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bessel_j_oracle(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    assert!(
        (root - 2.404_825_557_695_773).abs() < 1e-12,
        "oracle root {root:.15}"
    );
    // the implementation vanishes at the frozen root value
    assert!(bessel_j(0, 2.404_825_557_695_773).unwrap().abs() < 1e-12);
}

#[test]
fn k1_at_10_against_integral_oracle() {
    let oracle = bessel_k_oracle(1, 10.0);
    let ours = bessel_k(1, 10.0).unwrap();
    let rel = (ours - oracle).abs() / oracle;
    assert!(
        rel < 1e-10,
        "K1(10): {ours:.15e} vs {oracle:.15e} (rel {rel:.2e})"
    );
}

#[test]
fn j_values_against_integral_oracle() {
    for &(m, x) in &[
        (0, 0.37),
        (1, 2.9),
        (2, 7.3),
        (5, 14.0),
        (9, 3.3),
        (17, 21.5),
        (31, 40.0),
        (60, 45.0),
    ] {
        let oracle = bessel_j_oracle(m, x);
        let ours = bessel_j(m, x).unwrap();
        assert!(
            (ours - oracle).abs() < 1e-12 * oracle.abs().max(1.0),
            "J_{m}({x}): {ours:.15e} vs {oracle:.15e}"
        );
    }
}

#[test]
fn k_values_against_integral_oracle() {
    for &(m, x) in &[(0, 0.8), (1, 1.3), (2, 4.0), (3, 11.0), (6, 2.2)] {
        let oracle = bessel_k_oracle(m, x);
        let ours = bessel_k(m, x).unwrap();
        let rel = (ours - oracle).abs() / oracle;
        assert!(rel < 1e-9, "K_{m}({x}): rel {rel:.2e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // J'_m(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2 across random orders and
    // arguments (machine-level identity of the evaluation scheme).
    #[test]
    fn derivative_recurrence(m in 1i32..40, x in 0.05f64..60.0) {
        let lhs = fiberqed::specialfn::bessel_j_prime(m, x).unwrap();
        let rhs = 0.5 * (bessel_j(m - 1, x).unwrap() - bessel_j(m + 1, x).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    // K_m is positive and decreasing in x for all orders.
    #[test]
    fn k_positive_decreasing(m in 0i32..12, x in 0.05f64..30.0) {
        let k1 = bessel_k(m, x).unwrap();
        let k2 = bessel_k(m, x * 1.1).unwrap();
        prop_assert!(k1 > 0.0 && k2 > 0.0 && k2 < k1);
    }
}
