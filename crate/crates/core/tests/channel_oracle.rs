mod common;

use common::*;
use heralded_swap::channels::{
    a2_relaxation_channel, absorption_channel, dephasing_channel, flip_channel,
    photon_loss_channel, qnd_povm, Spin,
};
use heralded_swap::{make_initial_state, FlipKind, JointState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(seed: u64) -> JointState {
    random_state(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn assert_matches(lib: &JointState, oracle: &Mat, tol: f64) {
    let d = max_diff(&lib.unnormalized(), oracle);
    assert!(d < tol, "library and oracle differ by {d:e}");
}

const TOL: f64 = 1e-13;

#[test]
fn initial_state_matches_oracle() {
    assert_matches(&make_initial_state(), &initial_rho(), 1e-15);
}

#[test]
fn flips_match_kronecker_operators() {
    for kind in [
        FlipKind::None,
        FlipKind::Phase,
        FlipKind::Polarisation,
        FlipKind::Both,
    ] {
        for seed in 0..5 {
            let s = state(seed);
            let expected = sandwich(&flip_unitary(kind), &s.unnormalized());
            assert_matches(&flip_channel(&s, kind), &expected, TOL);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn absorption_matches(seed in any::<u64>(), p in 0.0..=1.0f64, r in 0.0..=1.0f64) {
        let s = state(seed);
        assert_matches(&absorption_channel(&s, p, r).unwrap(), &absorption(&s.unnormalized(), p, r), TOL);
    }

    #[test]
    fn qnd_matches(seed in any::<u64>(), pq in 0.0..=1.0f64, pd in 0.0..=1.0f64) {
        let s = state(seed);
        let (click, no_click) = qnd(&s.unnormalized(), pq, pd);
        let out = qnd_povm(&s, pq, pd).unwrap();
        match out.click {
            Some(c) => assert_matches(&c, &click, TOL),
            None => prop_assert!(click.trace().re.abs() < TOL),
        }
        match out.no_click {
            Some(c) => assert_matches(&c, &no_click, TOL),
            None => prop_assert!(no_click.trace().re.abs() < TOL),
        }
        prop_assert!((out.p_click * s.weight() - click.trace().re).abs() < TOL);
    }

    #[test]
    fn loss_matches(seed in any::<u64>(), p in 0.0..=1.0f64) {
        let s = state(seed);
        assert_matches(&photon_loss_channel(&s, p).unwrap(), &loss(&s.unnormalized(), p), TOL);
    }

    #[test]
    fn dephasing_matches(seed in any::<u64>(), eta in 0.0..=1.0f64) {
        let s = state(seed);
        assert_matches(&dephasing_channel(&s, eta, &Spin::ALL).unwrap(), &dephase(&s.unnormalized(), eta), TOL);
    }

    #[test]
    fn relaxation_matches(seed in any::<u64>()) {
        let s = state(seed);
        assert_matches(&a2_relaxation_channel(&s).unwrap(), &relax(&s.unnormalized()), TOL);
    }

    #[test]
    fn loss_commutes_with_flips(seed in any::<u64>(), p in 0.0..=1.0f64, k in 0usize..4) {
        let kind = [FlipKind::None, FlipKind::Phase, FlipKind::Polarisation, FlipKind::Both][k];
        let s = state(seed);
        let a = flip_channel(&photon_loss_channel(&s, p).unwrap(), kind);
        let b = photon_loss_channel(&flip_channel(&s, kind), p).unwrap();
        // only the lost branch commutes; compare the photon-gone blocks
        let gone = |m: &Mat| Mat::from_fn(32, 32, |i, j| if i % 8 >= 4 && j % 8 >= 4 { m[(i, j)] } else { c(0.0) });
        prop_assert!(max_diff(&gone(&a.unnormalized()), &gone(&b.unnormalized())) < 1e-12);
    }
}
