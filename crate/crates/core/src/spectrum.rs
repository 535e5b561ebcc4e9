//! Spectral data of the external matrix `E` and its deformation at coupling λ.
//!
//! The deformed eigenvalues `ε_k` and multiplicities `ϱ_k` solve the 2d
//! equations
//!
//! ```text
//! E_l = ε_l - (λ/N) Σ_k ϱ_k / (ε_k + ε_l)
//! 1   = r_l/ϱ_l - (λ/N) Σ_k ϱ_k / (ε_k + ε_l)^2
//! ```
//!
//! on the branch that reduces to `(E_k, r_k)` at λ = 0. That branch is
//! followed by Newton continuation in λ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues `0 < E_1 < ... < E_d` of the external matrix and their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    multiplicities: Vec<u32>,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>, multiplicities: Vec<u32>) -> Result<Self> {
        let s = Self {
            eigenvalues,
            multiplicities,
        };
        s.validate()?;
        Ok(s)
    }

    /// `E = (μ²/2)·1` on an `n × n` matrix.
    pub fn one_matrix(mu_sq: f64, n: u32) -> Result<Self> {
        Self::new(vec![mu_sq / 2.0], vec![n])
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.eigenvalues;
        if e.is_empty() {
            return Err(Error::InvalidSpectrum("no eigenvalues".into()));
        }
        if e.len() != self.multiplicities.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} eigenvalues but {} multiplicities",
                e.len(),
                self.multiplicities.len()
            )));
        }
        if e.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum("eigenvalues not finite".into()));
        }
        if e[0] <= 0.0 {
            return Err(Error::InvalidSpectrum("eigenvalues not positive".into()));
        }
        if e.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpectrum("eigenvalues not increasing".into()));
        }
        let top = e[e.len() - 1];
        if e.windows(2).any(|w| w[1] - w[0] < 1e-12 * top) {
            return Err(Error::InvalidSpectrum(
                "eigenvalue spacing below 1e-12 * E_d; merge multiplicities".into(),
            ));
        }
        if self.multiplicities.iter().any(|&r| r < 1) {
            return Err(Error::InvalidSpectrum("multiplicity < 1".into()));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `N = Σ r_k`.
    pub fn matrix_size(&self) -> u32 {
        self.multiplicities.iter().sum()
    }

    pub(crate) fn weights(&self) -> Vec<f64> {
        self.multiplicities.iter().map(|&r| r as f64).collect()
    }
}

/// Coupling constant λ of the quartic interaction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Coupling(pub f64);

impl Coupling {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling {lambda} is not finite")));
        }
        Ok(Self(lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for Coupling {
    fn from(lambda: f64) -> Self {
        Self(lambda)
    }
}

/// Solution `(ε_k, ϱ_k)` of the deformation equations at a given coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedSpectrum {
    pub epsilons: Vec<f64>,
    pub rhos: Vec<f64>,
    pub residual_norm: f64,
    pub lambda: f64,
}

impl DeformedSpectrum {
    /// The undeformed point `(E, r)` at λ = 0.
    pub fn undeformed(spectrum: &Spectrum) -> Self {
        Self {
            epsilons: spectrum.eigenvalues().to_vec(),
            rhos: spectrum.weights(),
            residual_norm: 0.0,
            lambda: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.epsilons.len()
    }

    fn is_admissible(&self) -> bool {
        self.epsilons.iter().all(|e| e.is_finite() && *e > 0.0)
            && self.rhos.iter().all(|r| r.is_finite() && *r > 0.0)
            && self.epsilons.windows(2).all(|w| w[1] > w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Max-norm bound on the deformation residual.
    pub tolerance: f64,
    pub max_newton_iters: usize,
    /// Number of equidistant continuation targets between 0 and λ.
    pub max_continuation_steps: usize,
    /// Smallest continuation step, as a fraction of `|λ_target|`.
    pub min_step_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_newton_iters: 50,
            max_continuation_steps: 8,
            min_step_fraction: 2f64.powi(-20),
        }
    }
}

impl SolverOptions {
    fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_continuation_steps < 1 {
            return Err(Error::InvalidArgument("max_continuation_steps must be >= 1".into()));
        }
        if self.max_newton_iters < 1 {
            return Err(Error::InvalidArgument("max_newton_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Residuals of both deformation equations, `E`-equations first, then the
/// multiplicity equations.
pub fn deformation_residual(
    spectrum: &Spectrum,
    coupling: Coupling,
    candidate: &DeformedSpectrum,
) -> Result<Vec<f64>> {
    let d = spectrum.dim();
    if candidate.epsilons.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: candidate.epsilons.len(),
        });
    }
    if candidate.rhos.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: candidate.rhos.len(),
        });
    }
    Ok(residual_raw(spectrum, coupling.0, &candidate.epsilons, &candidate.rhos))
}

fn residual_raw(spectrum: &Spectrum, lambda: f64, eps: &[f64], rho: &[f64]) -> Vec<f64> {
    let d = eps.len();
    let c = lambda / spectrum.matrix_size() as f64;
    let e = spectrum.eigenvalues();
    let r = spectrum.multiplicities();
    let mut out = vec![0.0; 2 * d];
    for l in 0..d {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for k in 0..d {
            let t = rho[k] / (eps[k] + eps[l]);
            s1 += t;
            s2 += t / (eps[k] + eps[l]);
        }
        out[l] = e[l] - (eps[l] - c * s1);
        out[d + l] = 1.0 - (r[l] as f64 / rho[l] - c * s2);
    }
    out
}

fn jacobian(spectrum: &Spectrum, lambda: f64, eps: &[f64], rho: &[f64]) -> DMatrix<f64> {
    let d = eps.len();
    let c = lambda / spectrum.matrix_size() as f64;
    let r = spectrum.multiplicities();
    let mut jac = DMatrix::zeros(2 * d, 2 * d);
    for l in 0..d {
        let mut s2 = 0.0;
        let mut s3 = 0.0;
        for k in 0..d {
            let sum = eps[k] + eps[l];
            s2 += rho[k] / (sum * sum);
            s3 += rho[k] / (sum * sum * sum);
        }
        for m in 0..d {
            let sum = eps[m] + eps[l];
            let delta = if m == l { 1.0 } else { 0.0 };
            // row l: residual E_l - ε_l + c Σ ϱ_k/(ε_k+ε_l)
            jac[(l, m)] = -delta - c * (rho[m] / (sum * sum) + delta * s2);
            jac[(l, d + m)] = c / sum;
            // row d+l: 1 - r_l/ϱ_l + c Σ ϱ_k/(ε_k+ε_l)^2
            jac[(d + l, m)] = -2.0 * c * (rho[m] / (sum * sum * sum) + delta * s3);
            jac[(d + l, d + m)] = delta * r[l] as f64 / (rho[l] * rho[l]) + c / (sum * sum);
        }
    }
    jac
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton at fixed λ from a warm start. `None` when it stalls or
/// leaves the admissible region.
fn newton(
    spectrum: &Spectrum,
    lambda: f64,
    start: &DeformedSpectrum,
    opts: &SolverOptions,
) -> Option<DeformedSpectrum> {
    let d = spectrum.dim();
    let mut eps = start.epsilons.clone();
    let mut rho = start.rhos.clone();
    let mut res = residual_raw(spectrum, lambda, &eps, &rho);
    let mut norm = max_norm(&res);
    for _ in 0..opts.max_newton_iters {
        if norm <= opts.tolerance {
            break;
        }
        let jac = jacobian(spectrum, lambda, &eps, &rho);
        let rhs = DVector::from_iterator(2 * d, res.iter().map(|x| -x));
        let step = jac.lu().solve(&rhs)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = DeformedSpectrum {
                epsilons: (0..d).map(|i| eps[i] + t * step[i]).collect(),
                rhos: (0..d).map(|i| rho[i] + t * step[d + i]).collect(),
                residual_norm: 0.0,
                lambda,
            };
            if trial.is_admissible() {
                let trial_res = residual_raw(spectrum, lambda, &trial.epsilons, &trial.rhos);
                let trial_norm = max_norm(&trial_res);
                // accept near-roundoff plateaus so the loop can terminate
                if trial_norm < norm || trial_norm <= opts.tolerance {
                    eps = trial.epsilons;
                    rho = trial.rhos;
                    res = trial_res;
                    norm = trial_norm;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (norm <= opts.tolerance).then(|| DeformedSpectrum {
        epsilons: eps,
        rhos: rho,
        residual_norm: norm,
        lambda,
    })
}

/// Advance a solved point from `from.lambda` to `target` with adaptive step halving.
fn advance(
    spectrum: &Spectrum,
    from: &DeformedSpectrum,
    target: f64,
    min_step: f64,
    opts: &SolverOptions,
) -> Result<DeformedSpectrum> {
    let mut current = from.clone();
    let mut previous: Option<DeformedSpectrum> = None;
    let mut h = target - current.lambda;
    while current.lambda != target {
        let remaining = target - current.lambda;
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        let next_lambda = if h == remaining { target } else { current.lambda + h };
        // secant predictor along λ once two points are known
        let guess = match &previous {
            Some(prev) if prev.lambda != current.lambda => {
                let s = (next_lambda - current.lambda) / (current.lambda - prev.lambda);
                let extrapolate = |a: &[f64], b: &[f64]| -> Vec<f64> {
                    a.iter().zip(b).map(|(x, y)| x + s * (x - y)).collect()
                };
                let g = DeformedSpectrum {
                    epsilons: extrapolate(&current.epsilons, &prev.epsilons),
                    rhos: extrapolate(&current.rhos, &prev.rhos),
                    residual_norm: 0.0,
                    lambda: next_lambda,
                };
                if g.is_admissible() {
                    g
                } else {
                    current.clone()
                }
            }
            _ => current.clone(),
        };
        match newton(spectrum, next_lambda, &guess, opts) {
            Some(sol) => {
                previous = Some(std::mem::replace(&mut current, sol));
                h *= 2.0;
            }
            None => {
                h *= 0.5;
                if h.abs() < min_step {
                    return Err(Error::NonConvergence {
                        lambda: next_lambda,
                        reached: current.lambda,
                    });
                }
            }
        }
    }
    Ok(current)
}

/// Solved deformations at `λ_j = j·λ_target/steps`, `j = 1..=steps`
/// (a single undeformed entry when `λ_target = 0`).
pub fn continuation_path(
    spectrum: &Spectrum,
    lambda_target: f64,
    steps: usize,
    opts: &SolverOptions,
) -> Result<Vec<DeformedSpectrum>> {
    spectrum.validate()?;
    opts.check()?;
    if steps < 1 {
        return Err(Error::InvalidArgument("steps must be >= 1".into()));
    }
    if !lambda_target.is_finite() {
        return Err(Error::InvalidArgument("lambda not finite".into()));
    }
    let start = DeformedSpectrum::undeformed(spectrum);
    if lambda_target == 0.0 {
        return Ok(vec![start]);
    }
    let min_step = opts.min_step_fraction * lambda_target.abs();
    let mut path = Vec::with_capacity(steps);
    let mut current = start;
    for j in 1..=steps {
        let target = if j == steps {
            lambda_target
        } else {
            lambda_target * j as f64 / steps as f64
        };
        current = advance(spectrum, &current, target, min_step, opts)?;
        path.push(current.clone());
    }
    Ok(path)
}

/// Principal-branch solution of the deformation equations at `coupling`.
pub fn solve_deformation(
    spectrum: &Spectrum,
    coupling: Coupling,
    opts: &SolverOptions,
) -> Result<DeformedSpectrum> {
    let path = continuation_path(spectrum, coupling.0, opts.max_continuation_steps, opts)?;
    Ok(path.into_iter().last().expect("continuation path is never empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_spectra() {
        assert!(matches!(
            Spectrum::new(vec![2.0, 1.0], vec![1, 1]),
            Err(Error::InvalidSpectrum(m)) if m.contains("not increasing")
        ));
        assert!(matches!(
            Spectrum::new(vec![1.0, 2.0], vec![0, 1]),
            Err(Error::InvalidSpectrum(m)) if m.contains("multiplicity < 1")
        ));
        assert!(Spectrum::new(vec![-1.0], vec![1]).is_err());
        assert!(Spectrum::new(vec![1.0, 1.0 + 1e-14], vec![1, 1]).is_err());
        assert!(Spectrum::new(vec![1.0], vec![1, 2]).is_err());
    }

    #[test]
    fn zero_coupling_is_exact() {
        let s = Spectrum::new(vec![1.0, 2.5, 4.0], vec![2, 1, 3]).unwrap();
        let sol = solve_deformation(&s, Coupling(0.0), &SolverOptions::default()).unwrap();
        assert_eq!(sol.epsilons, vec![1.0, 2.5, 4.0]);
        assert_eq!(sol.rhos, vec![2.0, 1.0, 3.0]);
        let res = deformation_residual(&s, Coupling(0.0), &sol).unwrap();
        assert!(res.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let s = Spectrum::new(vec![0.7, 1.3, 2.9], vec![3, 1, 2]).unwrap();
        let eps = [0.8, 1.35, 3.0];
        let rho = [2.7, 1.1, 1.9];
        let lambda = 0.3;
        let jac = jacobian(&s, lambda, &eps, &rho);
        let h = 1e-6;
        for m in 0..6 {
            let (mut ep, mut rp) = (eps.to_vec(), rho.to_vec());
            let (mut em, mut rm) = (eps.to_vec(), rho.to_vec());
            if m < 3 {
                ep[m] += h;
                em[m] -= h;
            } else {
                rp[m - 3] += h;
                rm[m - 3] -= h;
            }
            let fp = residual_raw(&s, lambda, &ep, &rp);
            let fm = residual_raw(&s, lambda, &em, &rm);
            for row in 0..6 {
                let fd = (fp[row] - fm[row]) / (2.0 * h);
                assert!((fd - jac[(row, m)]).abs() < 1e-7, "J[{row},{m}] = {} vs {fd}", jac[(row, m)]);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = Spectrum::new(vec![1.0, 2.0], vec![1, 1]).unwrap();
        let bad = DeformedSpectrum {
            epsilons: vec![1.0],
            rhos: vec![1.0],
            residual_norm: 0.0,
            lambda: 0.0,
        };
        assert!(matches!(
            deformation_residual(&s, Coupling(0.1), &bad),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn strongly_negative_coupling_fails_cleanly() {
        let s = Spectrum::one_matrix(2.0, 4).unwrap();
        // μ⁴ + 12λ < 0: no real principal branch
        let err = solve_deformation(&s, Coupling(-1.0), &SolverOptions::default()).unwrap_err();
        match err {
            Error::NonConvergence { reached, .. } => assert!(reached > -1.0 / 3.0 - 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn options_are_validated() {
        let s = Spectrum::one_matrix(2.0, 4).unwrap();
        let opts = SolverOptions {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            solve_deformation(&s, Coupling(0.1), &opts),
            Err(Error::InvalidArgument(_))
        ));
    }
}
