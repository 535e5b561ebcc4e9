//! Dense univariate polynomials in the monomial basis, ascending degree.
//!
//! Only what the rational-curve code needs: products of linear factors,
//! Horner evaluation, synthetic deflation and companion-matrix roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients `c[0] + c[1] z + ... + c[n] z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    /// `prod_k (z - roots[k])`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Self::constant(Complex64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul_linear(-r);
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Multiply by `(z + a)`.
    pub fn mul_linear(&self, a: Complex64) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c * a;
            out[i + 1] += c;
        }
        Self { coeffs: out }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(zero) + other.coeffs.get(i).copied().unwrap_or(zero)
            })
            .collect();
        Self { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Divide by `(z - root)`, returning quotient and remainder.
    pub fn deflate(&self, root: Complex64) -> (Self, Complex64) {
        let n = self.coeffs.len();
        if n < 2 {
            return (Self::constant(Complex64::new(0.0, 0.0)), self.coeffs.first().copied().unwrap_or_default());
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut carry = self.coeffs[n - 1];
        for i in (0..n - 1).rev() {
            q[i] = carry;
            carry = self.coeffs[i] + carry * root;
        }
        (Self { coeffs: q }, carry)
    }

    /// All roots as eigenvalues of the companion matrix.
    ///
    /// Leading coefficient must be nonzero.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        if n == 1 {
            return vec![-self.coeffs[0] / lead];
        }
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        // complex Schur form is upper triangular: eigenvalues on the diagonal
        let (_, t) = m.schur().unpack();
        (0..n).map(|i| t[(i, i)]).collect()
    }
}

/// Coefficients of `prod_k (z + shifts[k])`, real shifts.
pub fn shifted_product(shifts: &[f64]) -> Poly {
    shifts
        .iter()
        .fold(Poly::constant(Complex64::new(1.0, 0.0)), |p, &s| p.mul_linear(Complex64::new(s, 0.0)))
}
