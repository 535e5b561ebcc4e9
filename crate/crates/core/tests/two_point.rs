mod common;

use common::{c, model, random_point, random_spectrum};
use num_complex::Complex64;
use quartic_core::oracles::one_matrix_closed_form;
use quartic_core::{rel_diff, Error, PlanarModel, Representation, Spectrum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_four(m: &PlanarModel, z: Complex64, w: Complex64) -> [Complex64; 4] {
    [
        m.g0_rational(z, w).unwrap().value,
        m.g0_branch(z, w).unwrap().value,
        m.g0_product(z, w).unwrap().value,
        m.g0_rfe(z, w).unwrap().value,
    ]
}

#[test]
fn free_propagator_at_zero_coupling() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let m = model(&s, 0.0);
    let (z, w) = (c(0.7, 0.3), c(1.9, -0.4));
    for v in all_four(&m, z, w) {
        assert!((v - 1.0 / (z + w)).norm() < 1e-15);
    }
    assert!(m.dse_residual(z, w).unwrap() < 1e-15);
    assert!(m.jzz_residual(z).unwrap() < 1e-15);
}

#[test]
fn continuity_at_tiny_coupling() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let m = model(&s, 1e-12);
    let (z, w) = (c(0.7, 0.3), c(1.9, -0.4));
    for v in all_four(&m, z, w) {
        assert!(rel_diff(v, 1.0 / (z + w)) < 1e-9);
    }
    let m = model(&s, 1e-10);
    let e = s.eigenvalues();
    for a in 0..3 {
        for b in 0..3 {
            assert!((m.g0_matrix().entries[a][b] - 1.0 / (e[a] + e[b])).abs() <= 1e-6);
        }
    }
}

#[test]
fn one_matrix_values() {
    let s = Spectrum::one_matrix(2.0, 9).unwrap();
    let m = model(&s, 0.25);
    let cf = one_matrix_closed_form(2.0, 0.25).unwrap();
    let e1 = c(m.curve().epsilons()[0], 0.0);
    for v in all_four(&m, e1, e1) {
        assert!((v - cf.g11).norm() <= 1e-9);
    }
    assert!((m.g0_matrix().entries[0][0] - cf.g11).abs() <= 1e-9);
    let hat = cf.epsilon1_hat;
    assert!((-2.0 * hat / (cf.epsilon1 - hat).powi(2) - m.g0_branch(e1, e1).unwrap().value.re).abs() <= 1e-9);

    // the one-level rational fraction expansion in closed form
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..10 {
        let (z, w) = (random_point(&mut rng), random_point(&mut rng));
        let want = (1.0 - (cf.epsilon1 + hat).powi(2) / ((z - hat) * (w - hat))) / (z + w);
        assert!(rel_diff(m.g0_rfe(z, w).unwrap().value, want) <= 1e-9);
        assert!(rel_diff(m.g0_rational(z, w).unwrap().value, want) <= 1e-9);
    }
    assert!(m.dse_residual(e1, e1).unwrap() <= 1e-10);
    assert!(m.jzz_residual(e1 * 2.0).unwrap() <= 1e-10);
}

#[test]
fn representations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for d in 1..=4 {
        for lambda in [-0.05, -0.01, 0.01, 0.05, 0.1] {
            let s = random_spectrum(&mut rng, d);
            let m = model(&s, lambda);
            for _ in 0..50 {
                let (z, w) = (random_point(&mut rng), random_point(&mut rng));
                let v = all_four(&m, z, w);
                for a in 0..4 {
                    for b in a + 1..4 {
                        assert!(rel_diff(v[a], v[b]) <= 1e-8, "d={d} lambda={lambda}: {v:?}");
                    }
                }
                let swapped = m.g0_rational(w, z).unwrap().value;
                assert!(rel_diff(v[0], swapped) <= 1e-10);
                assert!(rel_diff(m.g0_branch(w, z).unwrap().value, v[1]) <= 1e-9);
            }
        }
    }
}

#[test]
fn matrix_forms_agree_and_are_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = random_spectrum(&mut rng, 3);
    let m = model(&s, 0.1);
    let g = m.g0_matrix();
    assert!(g.form_discrepancy <= 1e-10);
    for a in 0..3 {
        for b in 0..3 {
            assert!(g.entries[a][b] > 0.0);
            assert!((g.entries[a][b] - g.entries[b][a]).abs() <= 1e-10 * g.entries[a][b]);
            let z = c(m.curve().epsilons()[a], 0.0);
            let w = c(m.curve().epsilons()[b], 0.0);
            assert!((m.g0_rational(z, w).unwrap().value.re - g.entries[a][b]).abs() <= 1e-10);
        }
    }
}

#[test]
fn residuals_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in 1..=4 {
        let s = random_spectrum(&mut rng, d);
        let m = model(&s, 0.1);
        for _ in 0..100 {
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            let amp = m.g0_rational_checked(z, w).unwrap();
            assert_eq!(amp.representation, Representation::RationalThm1);
            assert!(amp.diagnostics.unwrap() <= 1e-8 * (1.0 + amp.value.norm()));
            assert!(m.jzz_residual(z).unwrap() <= 1e-9 * (1.0 + z.norm()));
        }
    }
}

#[test]
fn regular_at_reflected_preimages() {
    let s = Spectrum::new(vec![0.6, 1.4], vec![2, 1]).unwrap();
    let m = model(&s, 0.1);
    let z = c(0.8, 0.0);
    for w in [0.5, 1.3] {
        let w = c(w, 0.0);
        let hats = m.curve().preimages(w).unwrap().roots;
        for h in hats {
            let far = m.g0_rational(z, -h + 1e-4).unwrap().value;
            let near = m.g0_rational(z, -h + 1e-6).unwrap().value;
            assert!(near.norm() <= 10.0 * (1.0 + far.norm()));
            // in the first argument as well
            let near_z = m.g0_rational(-h + 1e-6, w).unwrap().value;
            let far_z = m.g0_rational(-h + 1e-4, w).unwrap().value;
            assert!(near_z.norm() <= 10.0 * (1.0 + far_z.norm()));
        }
    }
}

#[test]
fn pole_set_refused() {
    let s = Spectrum::new(vec![0.6, 1.4], vec![2, 1]).unwrap();
    let m = model(&s, 0.1);
    let w = c(0.9, 0.2);
    assert!(matches!(m.g0_rational(-w, w), Err(Error::PoleProximity(_))));
    let hat = m.eps_hat(1)[0];
    assert!(matches!(m.g0_rational(hat, w), Err(Error::PoleProximity(_))));
    assert!(matches!(m.g0_rfe(w, hat), Err(Error::PoleProximity(_))));
}
