//! Closed forms of the one-matrix case `E = (μ²/2)·1`, `d = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneMatrixClosedForm {
    pub epsilon1: f64,
    pub rho1_over_n: f64,
    /// The other root of `J(z) = J(ε₁)`.
    pub epsilon1_hat: f64,
    pub g11: f64,
}

pub fn one_matrix_closed_form(mu_sq: f64, lambda: f64) -> Result<OneMatrixClosedForm> {
    let disc = mu_sq * mu_sq + 12.0 * lambda;
    if !(disc >= 0.0) || !mu_sq.is_finite() {
        return Err(Error::DomainError(format!("mu^4 + 12 lambda = {disc} < 0")));
    }
    let s = disc.sqrt();
    let epsilon1 = (2.0 * mu_sq + s) / 6.0;
    // (μ² s - μ⁴ + 12λ)/(18λ) with the λ → 0 cancellation removed
    let rho1_over_n = 2.0 * (2.0 * mu_sq + s) / (3.0 * (mu_sq + s));
    let epsilon1_hat = -(mu_sq + 2.0 * s) / 6.0;
    let g11 = 4.0 / 3.0 * (mu_sq + 2.0 * s) / ((mu_sq + s) * (mu_sq + s));
    Ok(OneMatrixClosedForm {
        epsilon1,
        rho1_over_n,
        epsilon1_hat,
        g11,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_limit() {
        let cf = one_matrix_closed_form(2.0, 0.0).unwrap();
        assert_eq!(cf.epsilon1, 1.0);
        assert_eq!(cf.rho1_over_n, 1.0);
        assert_eq!(cf.g11, 0.5);
    }

    #[test]
    fn reference_point() {
        let cf = one_matrix_closed_form(2.0, 0.25).unwrap();
        // √7 written out
        let s = 2.645_751_311_064_590_6;
        assert!((cf.epsilon1 - (4.0 + s) / 6.0).abs() < 1e-15);
        assert!((cf.epsilon1 - 1.107_625_218_5).abs() < 1e-10);
        assert!((cf.rho1_over_n - 0.953_667_249_4).abs() < 1e-10);
        assert!((cf.epsilon1_hat + 1.215_250_437_0).abs() < 1e-10);
        assert!((cf.g11 - 0.450_447_163_7).abs() < 1e-10);
    }

    #[test]
    fn alternative_forms_agree() {
        for (mu_sq, lambda) in [(2.0, 0.25), (1.0, 0.7), (3.0, -0.1), (0.5, 0.01)] {
            let cf = one_matrix_closed_form(mu_sq, lambda).unwrap();
            let s = f64::sqrt(mu_sq * mu_sq + 12.0 * lambda);
            let literal = (mu_sq * s - mu_sq * mu_sq + 12.0 * lambda) / (18.0 * lambda);
            assert!((literal - cf.rho1_over_n).abs() < 1e-12);
            assert!((cf.epsilon1_hat - (mu_sq / 2.0 - 2.0 * cf.epsilon1)).abs() < 1e-14);
            let via_hat = -2.0 * cf.epsilon1_hat / (cf.epsilon1 - cf.epsilon1_hat).powi(2);
            assert!((via_hat - cf.g11).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_discriminant() {
        assert!(matches!(one_matrix_closed_form(1.0, -0.1), Err(Error::DomainError(_))));
    }
}
