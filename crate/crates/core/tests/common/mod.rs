#![allow(dead_code)]

use num_complex::Complex64;
use quartic_core::{solve_deformation, Coupling, PlanarModel, RationalJ, SolverOptions, Spectrum};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn model(spectrum: &Spectrum, lambda: f64) -> PlanarModel {
    let def = solve_deformation(spectrum, Coupling(lambda), &SolverOptions::default()).unwrap();
    PlanarModel::new(RationalJ::new(spectrum, &def).unwrap()).unwrap()
}

/// Increasing eigenvalues in `[0.4, 3.5]` with spacing at least 0.15, multiplicities 1..=4.
pub fn random_spectrum(rng: &mut ChaCha8Rng, d: usize) -> Spectrum {
    loop {
        let mut e: Vec<f64> = (0..d).map(|_| rng.gen_range(0.4..3.5)).collect();
        e.sort_by(f64::total_cmp);
        if e.windows(2).all(|w| w[1] - w[0] >= 0.15) {
            let r = (0..d).map(|_| rng.gen_range(1..=4)).collect();
            return Spectrum::new(e, r).unwrap();
        }
    }
}

/// A point in the right half-plane region where the closed forms are tested.
pub fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(0.05..3.0), rng.gen_range(-1.0..1.0))
}

/// Least-squares slope of `log err` against `log λ`.
pub fn loglog_slope(lambdas: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
