//! Shared fixtures for the benchmarks.

use quartic_core::{solve_deformation, Coupling, PlanarModel, RationalJ, SolverOptions, Spectrum};

/// `d` equally spaced eigenvalues in `[0.5, 3]`, multiplicities cycling 1..=3.
pub fn spectrum(d: usize) -> Spectrum {
    let step = if d > 1 { 2.5 / (d - 1) as f64 } else { 0.0 };
    let e = (0..d).map(|k| 0.5 + step * k as f64).collect();
    let r = (0..d).map(|k| 1 + (k % 3) as u32).collect();
    Spectrum::new(e, r).expect("fixture spectrum is valid")
}

pub fn model(d: usize, lambda: f64) -> PlanarModel {
    let s = spectrum(d);
    let def = solve_deformation(&s, Coupling(lambda), &SolverOptions::default()).expect("fixture solves");
    PlanarModel::new(RationalJ::new(&s, &def).expect("fixture curve")).expect("fixture model")
}
