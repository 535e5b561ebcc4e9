mod common;

use common::{model, random_spectrum};
use proptest::prelude::*;
use quartic_core::oracles::*;
use quartic_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn curve(s: &Spectrum, lambda: f64) -> RationalJ {
    model(s, lambda).curve().clone()
}

#[test]
fn series_order_zero_is_free_propagator() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let series = perturbative_series(&s, 3).unwrap();
    let e = s.eigenvalues();
    for a in 0..3 {
        for b in 0..3 {
            assert!((series.orders[0][a][b] - 1.0 / (e[a] + e[b])).abs() < 1e-15);
        }
    }
    assert!(series.orders.iter().flatten().flatten().all(|x| x.is_finite()));
}

#[test]
fn series_first_order_matches_closed_form_slope() {
    let mu_sq = 2.0;
    let h = 1e-5;
    let slope = (one_matrix_closed_form(mu_sq, h).unwrap().g11 - one_matrix_closed_form(mu_sq, -h).unwrap().g11) / (2.0 * h);
    let s = Spectrum::one_matrix(mu_sq, 10).unwrap();
    let series = perturbative_series(&s, 1).unwrap();
    assert!((series.orders[1][0][0] - slope).abs() <= 1e-8, "{} vs {slope}", series.orders[1][0][0]);
}

#[test]
fn series_order_is_capped() {
    let s = Spectrum::new(vec![1.0], vec![1]).unwrap();
    assert!(perturbative_series(&s, 7).is_err());
}

#[test]
fn resummed_series_matches_planar_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 1..=3 {
        let s = random_spectrum(&mut rng, d);
        let series = perturbative_series(&s, 6).unwrap();
        let g = model(&s, 0.01).g0_matrix().clone();
        let resummed = series.resum(0.01, 6);
        for a in 0..d {
            for b in 0..d {
                assert!((resummed[a][b] - g.entries[a][b]).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn truncation_error_scales_with_fifth_power() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let series = perturbative_series(&s, 4).unwrap();
    let constants: Vec<f64> = [0.01, 0.02, 0.04]
        .iter()
        .map(|&l| {
            let g = model(&s, l).g0_matrix().clone();
            let r = series.resum(l, 4);
            (g.entries[0][0] - r[0][0]).abs() / l.powi(5)
        })
        .collect();
    let (lo, hi) = constants.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    assert!(hi / lo <= 1.5, "{constants:?}");
}

#[test]
fn quadrature_at_tiny_coupling() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let j = curve(&s, 1e-8);
    let e = s.eigenvalues();
    for (a, b) in [(0, 0), (0, 2), (1, 2)] {
        let q = quadrature_g(&j, a, b, &QuadratureOptions::default()).unwrap();
        assert!((q.value - 1.0 / (e[a] + e[b])).abs() <= 1e-6);
    }
}

#[test]
fn quadrature_matches_one_matrix_closed_form() {
    let s = Spectrum::one_matrix(2.0, 10).unwrap();
    let q = quadrature_g(&curve(&s, 0.25), 0, 0, &QuadratureOptions::default()).unwrap();
    let want = one_matrix_closed_form(2.0, 0.25).unwrap().g11;
    assert!((q.value - want).abs() <= 1e-6, "{} vs {want}", q.value);
    assert!(q.imaginary_part.abs() <= 1e-6);
}

#[test]
fn quadrature_matches_planar_matrix() {
    let s = Spectrum::new(vec![0.5, 1.0, 2.5], vec![1, 2, 1]).unwrap();
    let m = model(&s, 0.05);
    for (a, b) in [(0, 0), (0, 1), (1, 2), (2, 2)] {
        let q = quadrature_g(m.curve(), a, b, &QuadratureOptions::default()).unwrap();
        assert!((q.value - m.g0_matrix().entries[a][b]).abs() <= 1e-6);
    }
}

#[test]
fn lambert_fixed_values() {
    assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
    assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() <= 1e-15);
    assert!(lambert_w0(-0.5).is_err());
}

#[test]
fn inverse_of_log_deformed_map() {
    let lambda = 0.1;
    for a in [0.0, 1.0, 10.0] {
        let z = j2_inverse(a, lambda).unwrap();
        let back = z + lambda * (1.0 + z).ln();
        assert!((back - a).abs() <= 1e-10, "a = {a}: {back}");
    }
}

#[test]
fn pade_differences_shrink() {
    let g: Vec<f64> = (2..=5).map(|d| lambert_pade_check(d, 0.1, 0.5, 1.0).unwrap().g_approx).collect();
    let diffs: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

fn mc_options() -> MCOptions {
    MCOptions {
        thermalization: 1000,
        ..MCOptions::default()
    }
}

#[test]
fn monte_carlo_gaussian_point() {
    let s = Spectrum::new(vec![1.0, 2.0], vec![8, 8]).unwrap();
    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
        let est = monte_carlo_moment(&s, 0.0, a, b, 10_000, 17, &mc_options()).unwrap();
        let e = s.eigenvalues();
        let want = 1.0 / (e[a] + e[b]);
        assert!((est.mean - want).abs() <= 3.0 * est.std_error, "({a},{b}): {} ± {} vs {want}", est.mean, est.std_error);
        assert!(est.std_error > 0.0);
        assert!((0.2..=0.8).contains(&est.acceptance_rate));
    }
}

#[test]
fn monte_carlo_seeds_agree() {
    let s = Spectrum::new(vec![1.0, 2.0], vec![6, 6]).unwrap();
    let x = monte_carlo_moment(&s, 0.1, 0, 1, 10_000, 1, &mc_options()).unwrap();
    let y = monte_carlo_moment(&s, 0.1, 0, 1, 10_000, 2, &mc_options()).unwrap();
    let sigma = (x.std_error.powi(2) + y.std_error.powi(2)).sqrt();
    assert!((x.mean - y.mean).abs() <= 3.0 * sigma);
}

#[test]
fn monte_carlo_is_reproducible() {
    let s = Spectrum::new(vec![1.0], vec![6]).unwrap();
    let x = monte_carlo_moment(&s, 0.1, 0, 0, 10_000, 9, &mc_options()).unwrap();
    let y = monte_carlo_moment(&s, 0.1, 0, 0, 10_000, 9, &mc_options()).unwrap();
    assert_eq!(x, y);
}

#[test]
fn monte_carlo_near_planar_value_at_moderate_coupling() {
    let s = Spectrum::one_matrix(2.0, 16).unwrap();
    let est = monte_carlo_moment(&s, 0.1, 0, 0, 10_000, 4, &mc_options()).unwrap();
    let want = one_matrix_closed_form(2.0, 0.1).unwrap().g11;
    let tol = (3.0 * est.std_error).max(5.0 / 16.0);
    assert!((est.mean - want).abs() <= tol, "{} vs {want}", est.mean);
}

proptest! {
    #[test]
    fn lambert_defining_equation(u in -6.0f64..6.0) {
        // spans [-1/e + 1e-6, 1e6]
        let x = -(-1.0f64).exp() + 10f64.powf(u);
        let w = lambert_w0(x).unwrap();
        prop_assert!((w * w.exp() - x).abs() <= 1e-13 * x.abs());
    }

    #[test]
    fn quadrature_agrees_on_random_spectra(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spectrum(&mut rng, 2);
        let m = model(&s, 0.03);
        let q = quadrature_g(m.curve(), 0, 1, &QuadratureOptions::default()).unwrap();
        prop_assert!((q.value - m.g0_matrix().entries[0][1]).abs() <= 1e-6);
    }
}
