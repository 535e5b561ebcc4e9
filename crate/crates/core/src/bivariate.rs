//! Dense real bivariate polynomials and the spectral-curve resultant.
//!
//! The curve `E(x, y) = 0` is the resultant in `z` of
//!
//! ```text
//! P₁ = (x - z) Π_k (ε_k + z) + (λ/N) Σ_k ϱ_k Π_{j≠k} (ε_j + z)
//! P₂ = (y - z) Π_k (ε_k - z) - (λ/N) Σ_k ϱ_k Π_{j≠k} (ε_j - z)
//! ```
//!
//! whose common roots pair `x = J(z)` with `y = -J(-z)`. The Sylvester
//! determinant is taken by Bareiss fraction-free elimination, so every
//! division is exact up to rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::RationalJ;
use crate::error::{Error, Result};

/// Coefficients below this fraction of the largest are treated as zero.
pub const TRUNCATION: f64 = 1e-12;

/// `Σ c[i][j] xⁱ yʲ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    pub coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self { coeffs: vec![vec![0.0]] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![vec![c]] }
    }

    /// `a + b x + c y`.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        Self {
            coeffs: vec![vec![a, c], vec![b, 0.0]],
        }
    }

    fn dims(&self) -> (usize, usize) {
        (self.coeffs.len(), self.coeffs.iter().map(Vec::len).max().unwrap_or(0))
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, s: f64) -> Self {
        let (a1, b1) = self.dims();
        let (a2, b2) = other.dims();
        let (ni, nj) = (a1.max(a2), b1.max(b2));
        let coeffs = (0..ni)
            .map(|i| (0..nj).map(|j| self.get(i, j) + s * other.get(i, j)).collect())
            .collect();
        Self { coeffs }.trimmed()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|r| r.iter().map(|c| c * s).collect()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a1, b1) = self.dims();
        let (a2, b2) = other.dims();
        let mut out = vec![vec![0.0; b1 + b2 - 1]; a1 + a2 - 1];
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, &c1) in r1.iter().enumerate() {
                if c1 == 0.0 {
                    continue;
                }
                for (i2, r2) in other.coeffs.iter().enumerate() {
                    for (j2, &c2) in r2.iter().enumerate() {
                        out[i1 + i2][j1 + j2] += c1 * c2;
                    }
                }
            }
        }
        Self { coeffs: out }.trimmed()
    }

    /// Drop trailing zero rows and columns.
    fn trimmed(mut self) -> Self {
        for r in &mut self.coeffs {
            while r.len() > 1 && r.last() == Some(&0.0) {
                r.pop();
            }
        }
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|r| r.iter().all(|&c| c == 0.0)) {
            self.coeffs.pop();
        }
        self
    }

    /// Zero every coefficient below `rel · max|c|`.
    pub fn truncated(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs();
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|&c| if c.abs() <= cut { 0.0 } else { c }).collect())
                .collect(),
        }
        .trimmed()
    }

    /// Lex-leading term `(i, j)` among coefficients above `cut`, `x` before `y`.
    fn leading(&self, cut: f64) -> Option<(usize, usize)> {
        for i in (0..self.coeffs.len()).rev() {
            for j in (0..self.coeffs[i].len()).rev() {
                if self.coeffs[i][j].abs() > cut {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Quotient of a division known to be exact, ignoring rounding noise.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let dcut = TRUNCATION * divisor.max_abs();
        let (li, lj) = divisor.leading(dcut).ok_or(Error::DegenerateResultant)?;
        let lead = divisor.coeffs[li][lj];
        let mut rem = self.clone();
        let cut = TRUNCATION * self.max_abs().max(f64::MIN_POSITIVE);
        let (a, b) = self.dims();
        let mut quotient = vec![vec![0.0; b]; a];
        while let Some((i, j)) = rem.leading(cut) {
            if i < li || j < lj {
                // remainder above noise level: not exact within tolerance, drop the noise
                rem.coeffs[i][j] = 0.0;
                continue;
            }
            let q = rem.coeffs[i][j] / lead;
            quotient[i - li][j - lj] += q;
            for (di, row) in divisor.coeffs.iter().enumerate() {
                for (dj, &c) in row.iter().enumerate() {
                    if c != 0.0 {
                        rem.coeffs[i - li + di][j - lj + dj] -= q * c;
                    }
                }
            }
            rem.coeffs[i][j] = 0.0;
        }
        Ok(Self { coeffs: quotient }.trimmed())
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
            acc * x + row.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * y + c)
        })
    }

    /// `Σ |c_ij| |x|ⁱ |y|ʲ`, the scale against which a value counts as zero.
    pub fn magnitude(&self, x: Complex64, y: Complex64) -> f64 {
        let (ax, ay) = (x.norm(), y.norm());
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, c)| c.abs() * ax.powi(i as i32) * ay.powi(j as i32))
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|r| r.iter().any(|&c| c != 0.0))
            .unwrap_or(0)
    }

    pub fn degree_y(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|r| r.iter().rposition(|&c| c != 0.0))
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.iter().rposition(|&c| c != 0.0).map(|j| i + j))
            .max()
            .unwrap_or(0)
    }
}

/// Determinant of a square matrix of bivariate polynomials (Bareiss).
pub fn bareiss_determinant(mut m: Vec<Vec<BivariatePoly>>) -> Result<BivariatePoly> {
    let n = m.len();
    if n == 0 {
        return Ok(BivariatePoly::constant(1.0));
    }
    let mut sign = 1.0;
    let mut prev = BivariatePoly::constant(1.0);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(BivariatePoly::zero());
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(m[n - 1][n - 1].scale(sign))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurvePoly {
    /// Normalized so the largest coefficient has modulus 1, truncated at [`TRUNCATION`].
    pub poly: BivariatePoly,
    pub total_degree: usize,
    pub degree_x: usize,
    pub degree_y: usize,
}

impl SpectralCurvePoly {
    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.poly.eval(x, y)
    }

    /// `|E(J(z), -J(-z))|` relative to the size of its terms.
    pub fn defining_residual(&self, j: &RationalJ, z: Complex64) -> Result<f64> {
        let x = j.eval(z)?;
        let y = -j.eval(-z)?;
        let mag = self.poly.magnitude(x, y);
        Ok(self.eval(x, y).norm() / mag.max(f64::MIN_POSITIVE))
    }
}

/// Coefficients in `z` of `∏(ε_k + s z)` and `Σ ϱ_k ∏_{j≠k}(ε_j + s z)`.
fn products(eps: &[f64], rhos: &[f64], s: f64) -> (Vec<f64>, Vec<f64>) {
    let mul = |p: &[f64], e: f64| {
        let mut out = vec![0.0; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            out[i] += c * e;
            out[i + 1] += c * s;
        }
        out
    };
    let full = eps.iter().fold(vec![1.0], |p, &e| mul(&p, e));
    let mut partial = vec![0.0; eps.len()];
    for k in 0..eps.len() {
        let p = eps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .fold(vec![1.0], |p, (_, &e)| mul(&p, e));
        for (i, c) in p.iter().enumerate() {
            partial[i] += rhos[k] * c;
        }
    }
    (full, partial)
}

/// `E(x, y)` as the resultant in `z` of the two coverings.
pub fn spectral_curve(j: &RationalJ) -> Result<SpectralCurvePoly> {
    let eps = j.epsilons();
    let d = eps.len();
    let c = j.coupling_over_n();
    // P₁ = x A(z) - z A(z) + c B(z), P₂ = y A(-z) - z A(-z) - c B(-z)
    let p1 = {
        let (a, b) = products(eps, j.rhos(), 1.0);
        (0..=d + 1)
            .map(|i| {
                let ai = a.get(i).copied().unwrap_or(0.0);
                let shifted = if i > 0 { a[i - 1] } else { 0.0 };
                let bi = b.get(i).copied().unwrap_or(0.0);
                BivariatePoly::linear(-shifted + c * bi, ai, 0.0)
            })
            .collect::<Vec<_>>()
    };
    let p2 = {
        let (a, b) = products(eps, j.rhos(), -1.0);
        (0..=d + 1)
            .map(|i| {
                let ai = a.get(i).copied().unwrap_or(0.0);
                let shifted = if i > 0 { a[i - 1] } else { 0.0 };
                let bi = b.get(i).copied().unwrap_or(0.0);
                BivariatePoly::linear(-shifted - c * bi, 0.0, ai)
            })
            .collect::<Vec<_>>()
    };
    let n = 2 * (d + 1);
    // Sylvester rows hold coefficients from the top degree down
    let mut m = vec![vec![BivariatePoly::zero(); n]; n];
    for r in 0..d + 1 {
        for (i, coeff) in p1.iter().enumerate() {
            m[r][r + (d + 1 - i)] = coeff.clone();
        }
        for (i, coeff) in p2.iter().enumerate() {
            m[d + 1 + r][r + (d + 1 - i)] = coeff.clone();
        }
    }
    let det = bareiss_determinant(m)?;
    let norm = det.max_abs();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::DegenerateResultant);
    }
    let poly = det.scale(1.0 / norm).truncated(TRUNCATION);
    Ok(SpectralCurvePoly {
        total_degree: poly.total_degree(),
        degree_x: poly.degree_x(),
        degree_y: poly.degree_y(),
        poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_exact_division() {
        let p = BivariatePoly::linear(1.0, 2.0, -1.0);
        let q = BivariatePoly::linear(-3.0, 0.5, 4.0);
        let pq = p.mul(&q);
        let back = pq.div_exact(&q).unwrap();
        assert!(back.sub(&p).max_abs() < 1e-14);
        let (x, y) = (Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.1));
        assert!((pq.eval(x, y) - p.eval(x, y) * q.eval(x, y)).norm() < 1e-13);
        assert_eq!((pq.degree_x(), pq.degree_y(), pq.total_degree()), (2, 2, 2));
    }

    #[test]
    fn bareiss_matches_numeric_determinant() {
        let m: Vec<Vec<BivariatePoly>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| BivariatePoly::linear((i * 4 + j) as f64 * 0.37 % 1.3, ((i + 2 * j) % 3) as f64, (i == j) as u8 as f64))
                    .collect()
            })
            .collect();
        let det = bareiss_determinant(m.clone()).unwrap();
        let (x, y) = (Complex64::new(0.7, -0.2), Complex64::new(1.1, 0.4));
        let num = nalgebra::DMatrix::<Complex64>::from_fn(4, 4, |i, j| m[i][j].eval(x, y)).determinant();
        assert!((det.eval(x, y) - num).norm() < 1e-12 * (1.0 + num.norm()));
    }

    #[test]
    fn free_curve_contains_diagonal() {
        let j = RationalJ::from_poles(vec![1.0], vec![1.0], 0.0, 1.0).unwrap();
        let curve = spectral_curve(&j).unwrap();
        for t in [0.3, -2.0, 5.5] {
            let z = Complex64::new(t, 0.0);
            assert!(curve.eval(z, z).norm() < 1e-13);
        }
    }
}
