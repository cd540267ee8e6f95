//! Closed-form bounds against an exact rational evaluation of the term-by-term sums.

use heralded_swap::analytics::{
    false_negative_bound, false_positive_bound, normalized_false_negative_bound,
    normalized_false_positive_bound,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// `prefactor · Σ_{l<L} ratio^l` evaluated term by term.
fn series(prefactor: &BigRational, ratio: &BigRational, rounds: u32) -> f64 {
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for _ in 0..rounds {
        sum += &term;
        term *= ratio;
    }
    (prefactor * sum).to_f64().unwrap()
}

fn one() -> BigRational {
    BigRational::from_integer(BigInt::from(1))
}

fn fn_oracle(p_abs: f64, p_qnd: f64, l: u32) -> f64 {
    let (pa, pq) = (exact(p_abs), exact(p_qnd));
    series(&pa, &((one() - &pa) * &pq), l)
}

fn fp_oracle(p_abs: f64, p_dark: f64, l: u32) -> f64 {
    let (qa, qd) = (one() - exact(p_abs), one() - exact(p_dark));
    series(&qa, &(&qa * qd), l)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
}

#[test]
fn tabulated_rows_match_rational_sums() {
    for (p_abs, l) in [(0.01, 40), (0.1, 20), (0.25, 20), (0.5, 16), (0.9, 4)] {
        assert!(close(
            normalized_false_negative_bound(p_abs, 0.99, l).unwrap(),
            fn_oracle(p_abs, 0.99, l)
        ));
        assert!(close(
            normalized_false_positive_bound(p_abs, 2e-4, l).unwrap(),
            fp_oracle(p_abs, 2e-4, l)
        ));
    }
}

proptest! {
    #[test]
    fn closed_form_equals_series(p_abs in 0.0..=1.0f64, p in 0.0..=1.0f64, l in 1u32..80) {
        prop_assert!(close(normalized_false_negative_bound(p_abs, p, l).unwrap(), fn_oracle(p_abs, p, l)));
        prop_assert!(close(normalized_false_positive_bound(p_abs, p, l).unwrap(), fp_oracle(p_abs, p, l)));
    }

    #[test]
    fn monotonicity(p_abs in 0.0..0.99f64, dp in 0.0..0.01f64, l in 1u32..60) {
        let fn_l = false_negative_bound(p_abs, 0.99, l).unwrap();
        prop_assert!(false_negative_bound(p_abs, 0.99, l + 1).unwrap() >= fn_l);
        prop_assert!(false_negative_bound(p_abs + dp, 0.99, l).unwrap() >= fn_l - 1e-15);
        let fp_l = false_positive_bound(p_abs, 2e-4, l).unwrap();
        prop_assert!(false_positive_bound(p_abs, 2e-4, l + 1).unwrap() >= fp_l);
        prop_assert!(false_positive_bound(p_abs + dp, 2e-4, l).unwrap() <= fp_l + 1e-18);
    }

    // q_abs^L must be small for the bound to approach q_qnd; at p_abs = 0.5
    // that takes L >= 8 (at L = 4 the ratio is only 0.93).
    #[test]
    fn high_absorption_regime(p_abs in 0.5..=1.0f64, l in 8u32..64) {
        let v = normalized_false_negative_bound(p_abs, 0.99, l).unwrap();
        prop_assert!((0.95..=1.0).contains(&v), "{v}");
    }
}
