mod common;

use common::{c, random_spectrum};
use proptest::prelude::*;
use quartic_core::oracles::one_matrix_closed_form;
use quartic_core::{
    continuation_path, deformation_residual, solve_deformation, Coupling, DeformedSpectrum, Error, RationalJ,
    SolverOptions, Spectrum,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Damped fixed-point iteration of the deformation equations, started at `(E, r)`.
fn fixed_point(s: &Spectrum, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let e = s.eigenvalues();
    let r: Vec<f64> = s.multiplicities().iter().map(|&m| m as f64).collect();
    let c = lambda / s.matrix_size() as f64;
    let (mut eps, mut rho) = (e.to_vec(), r.clone());
    for _ in 0..10_000 {
        let d = e.len();
        let mut ne = vec![0.0; d];
        let mut nr = vec![0.0; d];
        for l in 0..d {
            let s1: f64 = (0..d).map(|k| rho[k] / (eps[k] + eps[l])).sum();
            let s2: f64 = (0..d).map(|k| rho[k] / (eps[k] + eps[l]).powi(2)).sum();
            ne[l] = 0.5 * eps[l] + 0.5 * (e[l] + c * s1);
            nr[l] = 0.5 * rho[l] + 0.5 * r[l] / (1.0 + c * s2);
        }
        let moved = ne.iter().zip(&eps).chain(nr.iter().zip(&rho)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eps = ne;
        rho = nr;
        if moved < 1e-15 {
            break;
        }
    }
    (eps, rho)
}

#[test]
fn free_point_is_exact() {
    for n in [1, 7] {
        let s = Spectrum::one_matrix(2.0, n).unwrap();
        let def = solve_deformation(&s, Coupling(0.0), &SolverOptions::default()).unwrap();
        assert_eq!(def.epsilons, vec![1.0]);
        assert_eq!(def.rhos, vec![n as f64]);
        let res = deformation_residual(&s, Coupling(0.0), &DeformedSpectrum::undeformed(&s)).unwrap();
        assert!(res.iter().all(|&x| x == 0.0));
    }
}

#[test]
fn one_matrix_matches_closed_form() {
    let s = Spectrum::one_matrix(2.0, 6).unwrap();
    let def = solve_deformation(&s, Coupling(0.25), &SolverOptions::default()).unwrap();
    let cf = one_matrix_closed_form(2.0, 0.25).unwrap();
    assert!((def.epsilons[0] - cf.epsilon1).abs() < 1e-12);
    assert!((def.rhos[0] / 6.0 - cf.rho1_over_n).abs() < 1e-12);

    let closed = DeformedSpectrum {
        epsilons: vec![cf.epsilon1],
        rhos: vec![6.0 * cf.rho1_over_n],
        residual_norm: 0.0,
        lambda: 0.25,
    };
    let res = deformation_residual(&s, Coupling(0.25), &closed).unwrap();
    assert!(res.iter().all(|x| x.abs() <= 1e-12), "{res:?}");
}

#[test]
fn two_level_matches_fixed_point_iteration() {
    let s = Spectrum::new(vec![1.0, 2.0], vec![1, 1]).unwrap();
    let def = solve_deformation(&s, Coupling(0.1), &SolverOptions::default()).unwrap();
    let (eps, rho) = fixed_point(&s, 0.1);
    for k in 0..2 {
        assert!((def.epsilons[k] - eps[k]).abs() <= 1e-8);
        assert!((def.rhos[k] - rho[k]).abs() <= 1e-8);
    }
}

#[test]
fn continuation_path_examples() {
    let s = Spectrum::new(vec![0.5, 1.5], vec![2, 1]).unwrap();
    let path = continuation_path(&s, 0.0, 1, &SolverOptions::default()).unwrap();
    assert_eq!(path, vec![DeformedSpectrum::undeformed(&s)]);

    let one = Spectrum::one_matrix(2.0, 3).unwrap();
    let path = continuation_path(&one, 0.25, 4, &SolverOptions::default()).unwrap();
    assert_eq!(path.len(), 4);
    let cf = one_matrix_closed_form(2.0, 0.25).unwrap();
    assert!((path[3].epsilons[0] - cf.epsilon1).abs() <= 1e-10);
    for (j, p) in path.iter().enumerate() {
        assert!((p.lambda - 0.25 * (j + 1) as f64 / 4.0).abs() < 1e-15);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let three = random_spectrum(&mut rng, 3);
    let path = continuation_path(&three, 0.05, 5, &SolverOptions::default()).unwrap();
    let last = path.last().unwrap();
    let res = deformation_residual(&three, Coupling(0.05), last).unwrap();
    assert!(res.iter().all(|x| x.abs() <= 1e-10));
}

#[test]
fn principal_branch_limit() {
    let s = Spectrum::new(vec![0.3, 1.1, 2.7], vec![3, 1, 2]).unwrap();
    let def = solve_deformation(&s, Coupling(1e-6), &SolverOptions::default()).unwrap();
    let scale = 2.7f64.max(3.0);
    for k in 0..3 {
        assert!((def.epsilons[k] - s.eigenvalues()[k]).abs() <= 1e-4 * scale);
        assert!((def.rhos[k] - s.multiplicities()[k] as f64).abs() <= 1e-4 * scale);
    }
}

#[test]
fn unreachable_coupling_reports_last_solved() {
    let s = Spectrum::one_matrix(2.0, 1).unwrap();
    match solve_deformation(&s, Coupling(-1.0), &SolverOptions::default()) {
        Err(Error::NonConvergence { lambda, reached }) => {
            assert!(lambda < reached && lambda >= -1.0);
            assert!(reached < 0.0 && reached > -1.0 / 3.0 - 1e-6, "reached {reached}");
        }
        other => panic!("expected NonConvergence, got {other:?}"),
    }
}

#[test]
fn invalid_spectra_rejected() {
    assert!(matches!(Spectrum::new(vec![2.0, 1.0], vec![1, 1]), Err(Error::InvalidSpectrum(_))));
    assert!(matches!(Spectrum::new(vec![1.0, 2.0], vec![0, 1]), Err(Error::InvalidSpectrum(_))));
    assert!(matches!(Spectrum::new(vec![-1.0, 2.0], vec![1, 1]), Err(Error::InvalidSpectrum(_))));
    assert!(matches!(Spectrum::new(vec![1.0, 1.0 + 1e-14], vec![1, 1]), Err(Error::InvalidSpectrum(_))));
}

fn spectrum_strategy() -> impl Strategy<Value = Spectrum> {
    (1usize..=4)
        .prop_flat_map(|d| (prop::collection::vec(0.15f64..1.0, d), prop::collection::vec(1u32..=5, d), 0.3f64..1.0))
        .prop_map(|(gaps, mult, start)| {
            let mut e = Vec::new();
            let mut x = start;
            for g in gaps {
                e.push(x);
                x += g;
            }
            Spectrum::new(e, mult).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solved_deformations_satisfy_invariants(s in spectrum_strategy(), lambda in -0.02f64..0.15) {
        let opts = SolverOptions::default();
        let def = solve_deformation(&s, Coupling(lambda), &opts).unwrap();
        let res = deformation_residual(&s, Coupling(lambda), &def).unwrap();
        prop_assert!(res.iter().all(|x| x.abs() <= opts.tolerance));
        prop_assert!(def.residual_norm <= opts.tolerance);
        prop_assert!(def.epsilons.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(def.epsilons[0] > 0.0 && def.rhos.iter().all(|&r| r > 0.0));
        // ϱ_k J'(ε_k) = r_k
        let j = RationalJ::new(&s, &def).unwrap();
        for k in 0..s.dim() {
            let jp = j.eval_prime(c(def.epsilons[k], 0.0)).unwrap().re;
            let r = s.multiplicities()[k] as f64;
            prop_assert!((def.rhos[k] * jp - r).abs() <= 1e-9 * r);
        }
    }
}
