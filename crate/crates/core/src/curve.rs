//! The rational function `J(z) = z - (λ/N) Σ_k ϱ_k/(ε_k + z)` and the
//! algebraic data derived from it: level-set preimages `v̂^k` with
//! `J(v̂^k) = J(v)` and the ramification points `α_k` with `J(α) = J(-α)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{shifted_product, Poly};
use crate::spectrum::{DeformedSpectrum, Spectrum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `J(z)` for a solved deformation, together with the bare data it reproduces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalJ {
    epsilons: Vec<f64>,
    rhos: Vec<f64>,
    lambda: f64,
    matrix_size: f64,
    /// `E_k = J(ε_k)`.
    energies: Vec<f64>,
    /// `r_k = ϱ_k J'(ε_k)`; integers for a matrix model, real for rational test models.
    weights: Vec<f64>,
}

impl RationalJ {
    /// Build from a spectrum and its solved deformation.
    pub fn new(spectrum: &Spectrum, deformed: &DeformedSpectrum) -> Result<Self> {
        let d = spectrum.dim();
        if deformed.dim() != d || deformed.rhos.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: deformed.dim(),
            });
        }
        Ok(Self {
            epsilons: deformed.epsilons.clone(),
            rhos: deformed.rhos.clone(),
            lambda: deformed.lambda,
            matrix_size: spectrum.matrix_size() as f64,
            energies: spectrum.eigenvalues().to_vec(),
            weights: spectrum.weights(),
        })
    }

    /// Build directly from poles `-ε_k` and weights `ϱ_k`. The bare data
    /// `E_k = J(ε_k)` and `r_k = ϱ_k J'(ε_k)` are derived, so `r_k` need not
    /// be integer.
    pub fn from_poles(epsilons: Vec<f64>, rhos: Vec<f64>, lambda: f64, matrix_size: f64) -> Result<Self> {
        if epsilons.len() != rhos.len() {
            return Err(Error::DimensionMismatch {
                expected: epsilons.len(),
                got: rhos.len(),
            });
        }
        if epsilons.is_empty() || epsilons.windows(2).any(|w| w[1] <= w[0]) || epsilons[0] <= 0.0 {
            return Err(Error::InvalidSpectrum("poles must satisfy 0 < ε_1 < ... < ε_d".into()));
        }
        if !(matrix_size > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument("matrix size must be positive and λ finite".into()));
        }
        let mut j = Self {
            epsilons,
            rhos,
            lambda,
            matrix_size,
            energies: Vec::new(),
            weights: Vec::new(),
        };
        let (energies, weights) = (0..j.dim())
            .map(|k| {
                let e = j.epsilons[k];
                let z = Complex64::new(e, 0.0);
                (j.eval_unchecked(z).re, j.rhos[k] * j.eval_prime_unchecked(z).re)
            })
            .unzip();
        j.energies = energies;
        j.weights = weights;
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.epsilons.len()
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn matrix_size(&self) -> f64 {
        self.matrix_size
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `λ/N`.
    pub fn coupling_over_n(&self) -> f64 {
        self.lambda / self.matrix_size
    }

    /// Length scale used for relative tolerances: `1 + max ε_k`.
    pub fn scale(&self) -> f64 {
        1.0 + self.epsilons.iter().fold(0.0f64, |m, &e| m.max(e.abs()))
    }

    fn pole_radius(&self) -> f64 {
        1e-13 * self.scale()
    }

    /// Index of the pole `-ε_k` within the exclusion radius of `z`, if any.
    pub fn nearby_pole(&self, z: Complex64) -> Option<usize> {
        if self.lambda == 0.0 {
            return None;
        }
        let radius = self.pole_radius();
        self.epsilons
            .iter()
            .position(|&e| (z + e).norm() <= radius)
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        match self.nearby_pole(z) {
            Some(_) => Err(Error::PoleHit { re: z.re, im: z.im }),
            None => Ok(()),
        }
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        if self.lambda == 0.0 {
            return z;
        }
        let s: Complex64 = self
            .epsilons
            .iter()
            .zip(&self.rhos)
            .map(|(&e, &r)| r / (z + e))
            .sum();
        z - self.coupling_over_n() * s
    }

    pub(crate) fn eval_prime_unchecked(&self, z: Complex64) -> Complex64 {
        if self.lambda == 0.0 {
            return ONE;
        }
        let s: Complex64 = self
            .epsilons
            .iter()
            .zip(&self.rhos)
            .map(|(&e, &r)| {
                let t = z + e;
                r / (t * t)
            })
            .sum();
        ONE + self.coupling_over_n() * s
    }

    /// `J(a) - J(b)` in factored form `(a-b)(1 + (λ/N) Σ ϱ_k/((ε_k+a)(ε_k+b)))`,
    /// free of cancellation when `a ≈ b`.
    pub(crate) fn diff_unchecked(&self, a: Complex64, b: Complex64) -> Complex64 {
        if self.lambda == 0.0 {
            return a - b;
        }
        let s: Complex64 = self
            .epsilons
            .iter()
            .zip(&self.rhos)
            .map(|(&e, &r)| r / ((a + e) * (b + e)))
            .sum();
        (a - b) * (ONE + self.coupling_over_n() * s)
    }

    /// Nearest pole `-ε_n` of `z` and `t = z + ε_n`, refined by Newton on
    /// `J(-ε_n + t) = jv` in the shifted variable.
    pub(crate) fn pole_offset(&self, z: Complex64, jv: Complex64) -> (usize, Complex64) {
        let n = (0..self.dim())
            .min_by(|&a, &b| (z + self.epsilons[a]).norm().total_cmp(&(z + self.epsilons[b]).norm()))
            .expect("J has at least one pole");
        let mut t = z + self.epsilons[n];
        if self.lambda == 0.0 || t.norm() > 0.1 * self.epsilons[n] {
            return (n, t);
        }
        let mut f = self.eval_offset((n, t)) - jv;
        if !f.is_finite() {
            // root rounded onto the pole: restart from the dominant balance
            t = -self.coupling_over_n() * self.rhos[n] / (jv + self.epsilons[n]);
            f = self.eval_offset((n, t)) - jv;
        }
        for _ in 0..8 {
            let fp = self.eval_prime_offset((n, t));
            let next = t - f / fp;
            let fn_ = self.eval_offset((n, next)) - jv;
            if !(fn_.norm() < f.norm()) {
                break;
            }
            t = next;
            f = fn_;
        }
        (n, t)
    }

    /// `J(-ε_n + t)` with the singular term taken from `t` directly.
    pub(crate) fn eval_offset(&self, (n, t): (usize, Complex64)) -> Complex64 {
        if self.lambda == 0.0 {
            return t - self.epsilons[n];
        }
        let en = self.epsilons[n];
        let s: Complex64 = (0..self.dim())
            .map(|j| {
                let gap = if j == n { t } else { t + (self.epsilons[j] - en) };
                self.rhos[j] / gap
            })
            .sum();
        t - en - self.coupling_over_n() * s
    }

    /// `J'(-ε_n + t)`.
    pub(crate) fn eval_prime_offset(&self, (n, t): (usize, Complex64)) -> Complex64 {
        if self.lambda == 0.0 {
            return ONE;
        }
        let en = self.epsilons[n];
        let s: Complex64 = (0..self.dim())
            .map(|j| {
                let gap = if j == n { t } else { t + (self.epsilons[j] - en) };
                self.rhos[j] / (gap * gap)
            })
            .sum();
        ONE + self.coupling_over_n() * s
    }

    /// `J(ε_a) - J(-r)` for a preimage `r = -ε_n + t`, exact in the cancelling factor `ε_a + r`.
    pub(crate) fn reflected_diff(&self, a: usize, r: Complex64, (n, t): (usize, Complex64)) -> Complex64 {
        let ea = self.epsilons[a];
        let gap = if n == a { t } else { t + (ea - self.epsilons[n]) };
        if self.lambda == 0.0 {
            return gap;
        }
        let s: Complex64 = self
            .epsilons
            .iter()
            .zip(&self.rhos)
            .map(|(&e, &rho)| rho / ((e + ea) * (e - r)))
            .sum();
        gap * (ONE + self.coupling_over_n() * s)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub fn eval_prime(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.eval_prime_unchecked(z))
    }

    /// `J(a) - J(b)`, evaluated without cancellation.
    pub fn difference(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        self.check_pole(a)?;
        self.check_pole(b)?;
        Ok(self.diff_unchecked(a, b))
    }

    /// Ascending coefficients of `(J(z) - J(v)) ∏_k (z + ε_k)`, monic of degree d+1.
    pub fn numerator_polynomial(&self, v: Complex64) -> Result<Poly> {
        self.check_pole(v)?;
        let jv = self.eval_unchecked(v);
        let full = shifted_product(&self.epsilons);
        let mut p = full.mul_linear(-jv);
        let c = self.coupling_over_n();
        if c != 0.0 {
            for k in 0..self.dim() {
                let others: Vec<f64> = self
                    .epsilons
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &e)| e)
                    .collect();
                let term = shifted_product(&others).scale(Complex64::new(-c * self.rhos[k], 0.0));
                p = p.add(&term);
            }
        }
        Ok(p)
    }

    /// The d further roots of `J(z) = J(v)` besides `z = v`.
    pub fn preimages(&self, v: Complex64) -> Result<PreimageSet> {
        self.check_pole(v)?;
        let jv = self.eval_unchecked(v);
        if self.lambda == 0.0 {
            // numerator factorises as (z - v) ∏ (z + E_k)
            let roots = self.epsilons.iter().map(|&e| Complex64::new(-e, 0.0)).collect();
            return Ok(PreimageSet {
                base_point: v,
                roots,
                pole_offsets: (0..self.dim()).map(|k| (k, ZERO)).collect(),
                max_defect: 0.0,
            });
        }
        let numerator = self.numerator_polynomial(v)?;
        let (deflated, _) = numerator.deflate(v);
        let mut roots = deflated.roots();
        for root in roots.iter_mut() {
            *root = self.polish_level_root(*root, v);
        }
        let real_input = v.im == 0.0;
        let real_tol = 1e-9 * self.scale();
        if real_input {
            // real data: roots come in conjugate pairs; snap round-off imaginary parts
            for r in roots.iter_mut() {
                if r.im.abs() <= real_tol {
                    r.im = 0.0;
                }
            }
        }
        sort_roots(&mut roots);
        let mut max_defect = 0.0f64;
        let mut pole_offsets = Vec::with_capacity(roots.len());
        for &r in &roots {
            let offset = self.pole_offset(r, jv);
            max_defect = max_defect.max((self.eval_offset(offset) - jv).norm());
            pole_offsets.push(offset);
        }
        let limit = 1e-6 * (1.0 + jv.norm());
        if !(max_defect <= limit) {
            // weak coupling: companion roots lose the poles' resolution, seed one root per pole
            if let Some((seeded, offsets, defect)) = self.pole_seeded_preimages(jv, limit) {
                roots = seeded;
                pole_offsets = offsets;
                max_defect = defect;
            }
        }
        if !(max_defect <= limit) {
            return Err(Error::RootDefect {
                defect: max_defect,
                limit,
            });
        }
        Ok(PreimageSet {
            base_point: v,
            roots,
            pole_offsets,
            max_defect,
        })
    }

    /// One root per pole, from the dominant balance `t ≈ -cϱ_n / (J(v) + ε_n)`.
    fn pole_seeded_preimages(
        &self,
        jv: Complex64,
        limit: f64,
    ) -> Option<(Vec<Complex64>, Vec<(usize, Complex64)>, f64)> {
        let c = self.coupling_over_n();
        let mut roots = Vec::with_capacity(self.dim());
        let mut offsets = Vec::with_capacity(self.dim());
        let mut max_defect = 0.0f64;
        for n in 0..self.dim() {
            let en = self.epsilons[n];
            let t0 = -c * self.rhos[n] / (jv + en);
            let (m, mut t) = self.pole_offset(t0 - en, jv);
            if m != n {
                return None;
            }
            if jv.im == 0.0 && t.im.abs() <= 1e-9 * t.norm() {
                t.im = 0.0;
            }
            max_defect = max_defect.max((self.eval_offset((n, t)) - jv).norm());
            roots.push(t - en);
            offsets.push((n, t));
        }
        if !(max_defect <= limit) {
            return None;
        }
        let mut order: Vec<usize> = (0..roots.len()).collect();
        order.sort_by(|&a, &b| root_order(roots[a], roots[b]));
        Some((
            order.iter().map(|&i| roots[i]).collect(),
            order.iter().map(|&i| offsets[i]).collect(),
            max_defect,
        ))
    }

    /// At most five Newton steps on `J(z) - J(v)`, kept only while they reduce the defect.
    fn polish_level_root(&self, mut z: Complex64, v: Complex64) -> Complex64 {
        let mut f = self.diff_unchecked(z, v);
        for _ in 0..5 {
            let fp = self.eval_prime_unchecked(z);
            if fp.norm() == 0.0 || !fp.is_finite() {
                break;
            }
            let next = z - f / fp;
            let fn_ = self.diff_unchecked(next, v);
            if !(fn_.norm() < f.norm()) {
                break;
            }
            z = next;
            f = fn_;
            if f.norm() == 0.0 {
                break;
            }
        }
        z
    }

    /// Positive solutions of `J(z) = J(-z)`, ascending.
    pub fn ramification_points(&self) -> Result<RamificationPoints> {
        let d = self.dim();
        let squares: Vec<f64> = self.epsilons.iter().map(|e| e * e).collect();
        if self.lambda == 0.0 {
            // J(z) - J(-z) = 2z; the cleared denominator alone supplies the roots
            return Ok(RamificationPoints {
                alphas: self.epsilons.clone(),
            });
        }
        // (J(z) - J(-z)) ∏(ε_k² - z²) / (2z) as a polynomial in s = z²
        let neg = |vals: &[f64]| -> Poly {
            vals.iter().fold(Poly::constant(ONE), |p, &e2| {
                p.mul_linear(Complex64::new(-e2, 0.0)).scale(Complex64::new(-1.0, 0.0))
            })
        };
        let mut p = neg(&squares);
        let c = self.coupling_over_n();
        for k in 0..d {
            let others: Vec<f64> = squares
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &e)| e)
                .collect();
            p = p.add(&neg(&others).scale(Complex64::new(c * self.rhos[k], 0.0)));
        }
        let mut alphas = Vec::with_capacity(d);
        for s in p.roots() {
            if s.im.abs() > 1e-9 * (1.0 + s.norm()) || s.re <= 0.0 {
                return Err(Error::DomainError(format!(
                    "ramification equation has a root z² = {s} off the positive axis"
                )));
            }
            alphas.push(self.polish_ramification(s.re.sqrt()));
        }
        alphas.sort_by(|a, b| a.total_cmp(b));
        for a in alphas.iter_mut() {
            let k = self.nearest_epsilon(*a);
            let (tau, defect) = self.ramification_offset(k, *a - self.epsilons[k]);
            let limit = 1e-9 * (1.0 + (self.epsilons[k] + tau).abs());
            if !(defect <= limit) {
                return Err(Error::RootDefect { defect, limit });
            }
            *a = self.epsilons[k] + tau;
        }
        Ok(RamificationPoints { alphas })
    }

    fn nearest_epsilon(&self, x: f64) -> usize {
        (0..self.dim())
            .min_by(|&a, &b| (x - self.epsilons[a]).abs().total_cmp(&(x - self.epsilons[b]).abs()))
            .expect("J has at least one pole")
    }

    /// `J(ε_k + τ) - J(-ε_k - τ)` and its τ-derivative, singular term taken from `τ` directly.
    fn ramification_gap(&self, k: usize, tau: f64) -> (f64, f64) {
        let ek = self.epsilons[k];
        let c = self.coupling_over_n();
        let (mut f, mut fp) = (2.0 * (ek + tau), 2.0);
        for (j, (&e, &rho)) in self.epsilons.iter().zip(&self.rhos).enumerate() {
            let plus = e + ek + tau;
            // ε_j - z
            let minus = if j == k { -tau } else { (e - ek) - tau };
            f -= c * rho * (1.0 / plus - 1.0 / minus);
            fp += c * rho * (1.0 / (plus * plus) + 1.0 / (minus * minus));
        }
        (f, fp)
    }

    /// Newton in the offset `τ = α - ε_k`, returning `τ` and the final `|J(α) - J(-α)|`.
    fn ramification_offset(&self, k: usize, mut tau: f64) -> (f64, f64) {
        if !(tau > 0.0) {
            // dominant balance 2ε_k ≈ cϱ_k / τ
            tau = self.coupling_over_n() * self.rhos[k] / (2.0 * self.epsilons[k]);
        }
        let (mut f, _) = self.ramification_gap(k, tau);
        for _ in 0..8 {
            let (_, fp) = self.ramification_gap(k, tau);
            let next = tau - f / fp;
            let (fn_, _) = self.ramification_gap(k, next);
            if !(fn_.abs() < f.abs()) {
                break;
            }
            tau = next;
            f = fn_;
        }
        (tau, f.abs())
    }

    fn polish_ramification(&self, mut a: f64) -> f64 {
        let h = |x: f64| {
            let z = Complex64::new(x, 0.0);
            (self.eval_unchecked(z) - self.eval_unchecked(-z)).re
        };
        let mut f = h(a);
        for _ in 0..5 {
            let z = Complex64::new(a, 0.0);
            let fp = (self.eval_prime_unchecked(z) + self.eval_prime_unchecked(-z)).re;
            if fp == 0.0 {
                break;
            }
            let next = a - f / fp;
            let fn_ = h(next);
            if !(fn_.abs() < f.abs()) {
                break;
            }
            a = next;
            f = fn_;
        }
        a
    }
}

/// Real roots first in descending order, then the rest by argument.
fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| root_order(*a, *b));
}

fn root_order(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    match (a.im == 0.0, b.im == 0.0) {
        (true, true) => b.re.total_cmp(&a.re),
        (true, false) => std::cmp::Ordering::Less,
        (false, true) => std::cmp::Ordering::Greater,
        (false, false) => a.arg().total_cmp(&b.arg()),
    }
}

/// Roots `v̂^1..v̂^d` of `J(z) = J(v)` other than `v` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageSet {
    pub base_point: Complex64,
    pub roots: Vec<Complex64>,
    /// Per root: the nearest pole `-ε_n` and the offset `v̂ + ε_n`, accurate
    /// to full relative precision even when the root crowds the pole.
    pub pole_offsets: Vec<(usize, Complex64)>,
    /// `max_k |J(v̂^k) - J(v)|`, with `J` evaluated through the offsets.
    pub max_defect: f64,
}

/// Positive solutions `α_k` of `J(z) = J(-z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamificationPoints {
    pub alphas: Vec<f64>,
}

/// `Σ_j ∏_k (x_j - c_k) / ∏_{k≠j} (x_j - x_k)` for `d+1` nodes `x` and `d`
/// values `c`; identically 1 when the nodes are pairwise distinct.
pub fn basic_lemma_sum(nodes: &[Complex64], shifts: &[Complex64]) -> Result<Complex64> {
    if nodes.len() != shifts.len() + 1 {
        return Err(Error::DimensionMismatch {
            expected: shifts.len() + 1,
            got: nodes.len(),
        });
    }
    let mut total = ZERO;
    for (j, &xj) in nodes.iter().enumerate() {
        let num: Complex64 = shifts.iter().map(|&c| xj - c).product();
        let den: Complex64 = nodes
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &xk)| xj - xk)
            .product();
        if den.norm() == 0.0 {
            return Err(Error::InvalidArgument("nodes must be pairwise distinct".into()));
        }
        total += num / den;
    }
    Ok(total)
}
