//! Planar cylinder amplitude `G⁽⁰⁾(z|w)`.
//!
//! `G⁽⁰⁾(z|w)` is a ratio with denominator `J(z) - J(-z)`, which vanishes at
//! `z = 0` and at the ramification points `±α_k`. Requiring the numerator to
//! vanish at `z = α_k` gives a `d×d` affine system for the boundary values
//! `G⁽⁰⁾(ε_l|w)`:
//!
//! ```text
//! (1/N) Σ_l r_l G⁽⁰⁾(ε_l|w) / (J(α_k) - E_l) = (G⁽⁰⁾(α_k,w) - G⁽⁰⁾(w,w)) / (J(α_k) - J(w))
//! ```
//!
//! The matrix does not depend on `w`, so its LU factors are computed once.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::RamificationPoints;
use crate::error::{Error, Result};
use crate::two_point::PlanarModel;

const MAX_CONDITION: f64 = 1e12;
/// Probe points on the circle used to evaluate removable singularities.
const LIMIT_PROBES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderBoundaryValues {
    pub w: Complex64,
    /// `G⁽⁰⁾(ε_l|w)`, `l = 1..d`.
    pub values: Vec<Complex64>,
    /// Max-norm residual of the affine system after the solve.
    pub residual: f64,
}

/// Which sign of the ramification points fixes the boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Positive,
    Negative,
}

#[derive(Debug, Clone)]
pub struct CylinderSolver<'a> {
    model: &'a PlanarModel,
    alphas: Vec<f64>,
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl<'a> CylinderSolver<'a> {
    pub fn new(model: &'a PlanarModel, alphas: &RamificationPoints) -> Result<Self> {
        let j = model.curve();
        let d = j.dim();
        if alphas.alphas.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: alphas.alphas.len(),
            });
        }
        let n_inv = 1.0 / j.matrix_size();
        let energies = j.energies();
        let weights = j.weights();
        let mut matrix = DMatrix::<f64>::zeros(d, d);
        for (k, &a) in alphas.alphas.iter().enumerate() {
            let ja = j.eval(Complex64::new(a, 0.0))?.re;
            for l in 0..d {
                let gap = ja - energies[l];
                if gap == 0.0 {
                    return Err(Error::SingularSystem {
                        condition: f64::INFINITY,
                    });
                }
                matrix[(k, l)] = weights[l] * n_inv / gap;
            }
        }
        let lu = matrix.clone().lu();
        let inverse = lu.try_inverse().ok_or(Error::SingularSystem {
            condition: f64::INFINITY,
        })?;
        let condition = one_norm(&matrix) * one_norm(&inverse);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularSystem { condition });
        }
        Ok(Self {
            model,
            alphas: alphas.alphas.clone(),
            matrix,
            lu,
            condition,
        })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// 1-norm condition number of the boundary-value matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn boundary_values(&self, w: Complex64) -> Result<CylinderBoundaryValues> {
        self.boundary_values_on(w, Branch::Positive)
    }

    /// Boundary values from the conditions at `+α_k` or at `-α_k`.
    pub fn boundary_values_on(&self, w: Complex64, branch: Branch) -> Result<CylinderBoundaryValues> {
        let j = self.model.curve();
        let d = j.dim();
        let jw = j.eval(w)?;
        let gww = self.model.g0_rational(w, w)?.value;
        let sign = match branch {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        };
        let mut rhs = vec![Complex64::new(0.0, 0.0); d];
        for (k, &a) in self.alphas.iter().enumerate() {
            let z = Complex64::new(sign * a, 0.0);
            let gap = j.difference(z, w)?;
            if gap.norm() <= 1e-12 * (1.0 + jw.norm()) {
                return Err(Error::PoleProximity(format!("J(w) = J(alpha_{k})")));
            }
            rhs[k] = (self.model.g0_rational(z, w)?.value - gww) / gap;
        }
        let re_part = self
            .lu
            .solve(&DVector::from_iterator(d, rhs.iter().map(|c| c.re)))
            .ok_or(Error::SingularSystem {
                condition: self.condition,
            })?;
        let im_part = self
            .lu
            .solve(&DVector::from_iterator(d, rhs.iter().map(|c| c.im)))
            .ok_or(Error::SingularSystem {
                condition: self.condition,
            })?;
        let values: Vec<Complex64> = (0..d).map(|l| Complex64::new(re_part[l], im_part[l])).collect();
        let mut residual = 0.0f64;
        for k in 0..d {
            let lhs: Complex64 = (0..d).map(|l| values[l] * self.matrix[(k, l)]).sum();
            residual = residual.max((lhs - rhs[k]).norm());
        }
        Ok(CylinderBoundaryValues { w, values, residual })
    }

    /// `G⁽⁰⁾(z|w)` from solved boundary values.
    pub fn evaluate(&self, z: Complex64, bv: &CylinderBoundaryValues) -> Result<Complex64> {
        let j = self.model.curve();
        let scale = j.scale();
        if z.norm() <= 1e-8 * scale {
            return Err(Error::PoleProximity(format!("z = {z} at the zero of J(z) - J(-z)")));
        }
        let near = self
            .alphas
            .iter()
            .flat_map(|&a| [a, -a])
            .find(|&a| (z - a).norm() <= 1e-6 * scale);
        let Some(center) = near else {
            let (num, den, _) = self.parts(z, bv)?;
            return Ok(num / den);
        };
        let center = Complex64::new(center, 0.0);
        let (num, _, magnitude) = self.parts(center, bv)?;
        if num.norm() > 1e-7 * (1.0 + magnitude) {
            return Err(Error::PoleProximity(format!(
                "numerator {:e} does not vanish at the ramification point {center}",
                num.norm()
            )));
        }
        // analytic there: the mean over a small circle is the value
        let radius = (1e-5 * scale).min(0.01 * self.singular_distance(center, bv.w));
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..LIMIT_PROBES {
            let phase = Complex64::from_polar(radius, std::f64::consts::TAU * (p as f64 + 0.5) / LIMIT_PROBES as f64);
            let (num, den, _) = self.parts(center + phase, bv)?;
            sum += num / den;
        }
        Ok(sum / LIMIT_PROBES as f64)
    }

    /// Numerator, denominator and the magnitude of the numerator's terms.
    fn parts(&self, z: Complex64, bv: &CylinderBoundaryValues) -> Result<(Complex64, Complex64, f64)> {
        let j = self.model.curve();
        let lambda = j.lambda();
        let w = bv.w;
        let jz = j.eval(z)?;
        let mut num = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        let c = j.coupling_over_n();
        for (k, &ek) in j.energies().iter().enumerate() {
            let t = bv.values[k] * (c * j.weights()[k]) / (ek - jz);
            num += t;
            magnitude += t.norm();
        }
        let gap = j.difference(z, w)?;
        if gap.norm() <= 1e-14 * (1.0 + jz.norm()) {
            return Err(Error::PoleProximity(format!("J(z) = J(w) at z = {z}")));
        }
        let t = (self.model.g0_rational(z, w)?.value - self.model.g0_rational(w, w)?.value) * lambda / gap;
        num += t;
        magnitude += t.norm();
        let den = j.difference(z, -z)?;
        Ok((num, den, magnitude))
    }

    /// Distance from `z` to the nearest genuine singularity of the numerator terms.
    fn singular_distance(&self, z: Complex64, w: Complex64) -> f64 {
        let j = self.model.curve();
        let mut points = vec![-w, w];
        for k in 0..j.dim() {
            let e = j.epsilons()[k];
            points.push(Complex64::new(e, 0.0));
            points.push(Complex64::new(-e, 0.0));
            points.extend_from_slice(self.model.eps_hat(k));
        }
        if let Ok(p) = j.preimages(w) {
            points.extend(p.roots);
        }
        points
            .iter()
            .map(|p| (z - p).norm())
            .filter(|&r| r > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve the boundary values for one `w`.
pub fn cylinder_boundary_values(
    model: &PlanarModel,
    alphas: &RamificationPoints,
    w: Complex64,
) -> Result<CylinderBoundaryValues> {
    CylinderSolver::new(model, alphas)?.boundary_values(w)
}

/// `G⁽⁰⁾(z|w)`; builds a solver on each call, prefer [`CylinderSolver`] in loops.
pub fn g0_cylinder(model: &PlanarModel, z: Complex64, w: Complex64) -> Result<Complex64> {
    if model.curve().lambda() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let alphas = model.curve().ramification_points()?;
    let solver = CylinderSolver::new(model, &alphas)?;
    let bv = solver.boundary_values(w)?;
    solver.evaluate(z, &bv)
}
