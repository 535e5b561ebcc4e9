//! The planar two-point function `G⁽⁰⁾(z,w)` in four closed-form
//! representations, plus the residuals of the equations it must solve.
//!
//! All representations are built on one [`PlanarModel`], which caches the
//! preimage sets `ε̂_k^m` (roots of `J(z) = J(ε_k)`), the matrix
//! `G⁽⁰⁾(ε_a,ε_b)` and the coefficients of the rational fraction expansion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::RationalJ;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// Circle points for the removable singularity of the residual at `z = ε_k`.
const DSE_PROBES: usize = 8;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Which closed form produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Rational in both variables, built from the preimages of all `ε_k`.
    RationalThm1,
    /// Rational in `u`, uses the preimages of `v`.
    BranchProduct,
    /// Double product over the preimages of both arguments.
    SymmetricProduct,
    /// Value at deformed eigenvalues via the corollary formula.
    MatrixCorollary,
    /// Partial-fraction expansion over the poles `ε̂_k^m`.
    Rfe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarAmplitude {
    pub value: Complex64,
    pub representation: Representation,
    /// `|LHS - RHS|` of the extended Dyson–Schwinger equation at the same point, when requested.
    pub diagnostics: Option<f64>,
}

impl PlanarAmplitude {
    fn new(value: Complex64, representation: Representation) -> Self {
        Self {
            value,
            representation,
            diagnostics: None,
        }
    }
}

/// `G⁽⁰⁾(ε_a, ε_b)` for all pairs of deformed eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointMatrix {
    pub entries: Vec<Vec<f64>>,
    /// Largest relative disagreement between the two orderings of the corollary formula.
    pub form_discrepancy: f64,
}

/// `|a - b| / (1 + max(|a|, |b|))`.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + a.norm().max(b.norm()))
}

/// Planar sector of a solved model; immutable after construction.
#[derive(Debug, Clone)]
pub struct PlanarModel {
    curve: RationalJ,
    /// `eps_hat[k][m] = ε̂_k^m`.
    eps_hat: Vec<Vec<Complex64>>,
    /// Nearest-pole offsets of `ε̂_k^m`, see [`crate::PreimageSet::pole_offsets`].
    hat_offsets: Vec<Vec<(usize, Complex64)>>,
    matrix: TwoPointMatrix,
    /// `rfe[k][l][m][n] = C_{k,l}^{m,n}`.
    rfe: Vec<Vec<Vec<Vec<Complex64>>>>,
}

impl PlanarModel {
    pub fn new(curve: RationalJ) -> Result<Self> {
        let d = curve.dim();
        let sets = (0..d)
            .map(|k| curve.preimages(re(curve.epsilons()[k])))
            .collect::<Result<Vec<_>>>()?;
        let (eps_hat, hat_offsets) = sets.into_iter().map(|p| (p.roots, p.pole_offsets)).unzip();
        let mut model = Self {
            curve,
            eps_hat,
            hat_offsets,
            matrix: TwoPointMatrix {
                entries: Vec::new(),
                form_discrepancy: 0.0,
            },
            rfe: Vec::new(),
        };
        model.matrix = model.compute_matrix()?;
        model.rfe = model.compute_rfe()?;
        Ok(model)
    }

    pub fn curve(&self) -> &RationalJ {
        &self.curve
    }

    /// Cached `ε̂_k^1..ε̂_k^d`.
    pub fn eps_hat(&self, k: usize) -> &[Complex64] {
        &self.eps_hat[k]
    }

    fn d(&self) -> usize {
        self.curve.dim()
    }

    fn c(&self) -> f64 {
        self.curve.coupling_over_n()
    }

    fn eps(&self, k: usize) -> Complex64 {
        re(self.curve.epsilons()[k])
    }

    fn diff(&self, a: Complex64, b: Complex64) -> Complex64 {
        self.curve.diff_unchecked(a, b)
    }

    fn exclusion(&self) -> f64 {
        1e-10 * self.curve.scale()
    }

    /// Index `a` with `z ≈ ε_a`, where the closed forms have removable singularities.
    fn deformed_index(&self, z: Complex64) -> Option<usize> {
        let tol = 1e-12 * self.curve.scale();
        (0..self.d()).find(|&a| (z - self.eps(a)).norm() <= tol)
    }

    fn check_pole_set(&self, z: Complex64, w: Complex64) -> Result<()> {
        let tol = self.exclusion();
        if (z + w).norm() <= tol {
            return Err(Error::PoleProximity(format!("z + w = {}", z + w)));
        }
        for (name, p) in [("z", z), ("w", w)] {
            if self.curve.nearby_pole(p).is_some() || self.curve.nearby_pole(-p).is_some() {
                if self.deformed_index(p).is_none() {
                    return Err(Error::PoleProximity(format!("{name} = {p} sits on a pole of J(±·)")));
                }
            }
            for hats in &self.eps_hat {
                if let Some(h) = hats.iter().find(|h| (p - *h).norm() <= tol) {
                    return Err(Error::PoleProximity(format!("{name} = {p} is within {tol:e} of ε̂ = {h}")));
                }
            }
        }
        Ok(())
    }

    /// `G⁽⁰⁾(ε_a, v)` from the preimages of `v` (corollary of the branch formula).
    pub fn g0_deformed(&self, a: usize, v: Complex64) -> Result<Complex64> {
        let lambda = self.curve.lambda();
        if lambda == 0.0 {
            return Ok(ONE / (self.eps(a) + v));
        }
        if let Some(b) = self.deformed_index(v) {
            return Ok(re(self.matrix.entries[a][b]));
        }
        let set = self.curve.preimages(v)?;
        Ok(self.corollary(a, &set.roots, &set.pole_offsets))
    }

    fn corollary(&self, a: usize, hats: &[Complex64], offsets: &[(usize, Complex64)]) -> Complex64 {
        let ea = self.eps(a);
        let num: Complex64 = hats
            .iter()
            .zip(offsets)
            .map(|(&h, &o)| self.curve.reflected_diff(a, h, o))
            .product();
        let den: Complex64 = (0..self.d())
            .filter(|&j| j != a)
            .map(|j| self.diff(ea, self.eps(j)))
            .product();
        let prefactor = -1.0 / (self.c() * self.curve.weights()[a]);
        num / den * prefactor
    }

    fn compute_matrix(&self) -> Result<TwoPointMatrix> {
        let d = self.d();
        let mut entries = vec![vec![0.0; d]; d];
        let mut discrepancy = 0.0f64;
        let energies = self.curve.energies();
        for a in 0..d {
            for b in 0..d {
                if self.curve.lambda() == 0.0 {
                    entries[a][b] = 1.0 / (energies[a] + energies[b]);
                    continue;
                }
                let ab = self.corollary(a, &self.eps_hat[b], &self.hat_offsets[b]);
                let ba = self.corollary(b, &self.eps_hat[a], &self.hat_offsets[a]);
                discrepancy = discrepancy.max(rel_diff(ab, ba));
                if !ab.is_finite() {
                    return Err(Error::RootDefect {
                        defect: f64::INFINITY,
                        limit: 0.0,
                    });
                }
                entries[a][b] = ab.re;
            }
        }
        Ok(TwoPointMatrix {
            entries,
            form_discrepancy: discrepancy,
        })
    }

    fn compute_rfe(&self) -> Result<Vec<Vec<Vec<Vec<Complex64>>>>> {
        let d = self.d();
        let w = self.curve.weights();
        let mut out = vec![vec![vec![vec![Complex64::new(0.0, 0.0); d]; d]; d]; d];
        if self.curve.lambda() == 0.0 {
            return Ok(out);
        }
        for k in 0..d {
            for l in 0..d {
                let g = self.matrix.entries[k][l];
                for m in 0..d {
                    let hk = self.eps_hat[k][m];
                    let ok = self.hat_offsets[k][m];
                    let jpk = self.curve.eval_prime_offset(ok);
                    for n in 0..d {
                        let hl = self.eps_hat[l][n];
                        let ol = self.hat_offsets[l][n];
                        let jpl = self.curve.eval_prime_offset(ol);
                        let den = jpk
                            * jpl
                            * self.curve.reflected_diff(l, hk, ok)
                            * self.curve.reflected_diff(k, hl, ol);
                        out[k][l][m][n] = (hk + hl) * (w[k] * w[l] * g) / den;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Two-variable rational formula in terms of `J` and the cached `ε̂_k^j`.
    pub fn g0_rational(&self, z: Complex64, w: Complex64) -> Result<PlanarAmplitude> {
        self.check_pole_set(z, w)?;
        // removable points of the formula: fall back on the corollary limit
        if let Some(a) = self.deformed_index(z) {
            return Ok(PlanarAmplitude::new(self.g0_deformed(a, w)?, Representation::RationalThm1));
        }
        if let Some(b) = self.deformed_index(w) {
            return Ok(PlanarAmplitude::new(self.g0_deformed(b, z)?, Representation::RationalThm1));
        }
        let d = self.d();
        let w_r = self.curve.weights();
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let ek = self.eps(k);
            let prod: Complex64 = (0..d)
                .map(|j| self.diff(w, -self.eps_hat[k][j]) / self.diff(w, self.eps(j)))
                .product();
            sum += w_r[k] / (self.diff(ek, -w) * self.diff(z, ek)) * prod;
        }
        let value = (ONE - self.c() * sum) / self.diff(w, -z);
        Ok(PlanarAmplitude::new(value, Representation::RationalThm1))
    }

    /// [`Self::g0_rational`] with the Dyson–Schwinger residual attached.
    pub fn g0_rational_checked(&self, z: Complex64, w: Complex64) -> Result<PlanarAmplitude> {
        let mut amp = self.g0_rational(z, w)?;
        amp.diagnostics = Some(self.dse_residual(z, w)?);
        Ok(amp)
    }

    /// Product over the preimages of `v`; rational in `u`.
    pub fn g0_branch(&self, u: Complex64, v: Complex64) -> Result<PlanarAmplitude> {
        self.check_pole_set(u, v)?;
        if let Some(a) = self.deformed_index(u) {
            return Ok(PlanarAmplitude::new(self.g0_deformed(a, v)?, Representation::BranchProduct));
        }
        let hats = self.curve.preimages(v)?.roots;
        let prod: Complex64 = (0..self.d())
            .map(|k| self.diff(u, -hats[k]) / self.diff(u, self.eps(k)))
            .product();
        Ok(PlanarAmplitude::new(
            prod / self.diff(v, -u),
            Representation::BranchProduct,
        ))
    }

    /// Double product over the preimages of both arguments; manifestly symmetric.
    pub fn g0_product(&self, u: Complex64, v: Complex64) -> Result<PlanarAmplitude> {
        self.check_pole_set(u, v)?;
        let uh = self.curve.preimages(u)?.roots;
        let vh = self.curve.preimages(v)?.roots;
        let d = self.d();
        let mut value = ONE / (u + v);
        for k in 0..d {
            let ek = self.eps(k);
            for l in 0..d {
                let el = self.eps(l);
                value *= (ek + el) * (-uh[l] - vh[k]) / ((ek - uh[l]) * (el - vh[k]));
            }
        }
        Ok(PlanarAmplitude::new(value, Representation::SymmetricProduct))
    }

    pub fn g0_matrix(&self) -> &TwoPointMatrix {
        &self.matrix
    }

    /// Rational fraction expansion over the poles `ε̂_k^m`.
    pub fn g0_rfe(&self, z: Complex64, w: Complex64) -> Result<PlanarAmplitude> {
        self.check_pole_set(z, w)?;
        let d = self.d();
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    let zk = z - self.eps_hat[k][m];
                    for n in 0..d {
                        sum += self.rfe[k][l][m][n] / (zk * (w - self.eps_hat[l][n]));
                    }
                }
            }
        }
        let c = self.c();
        Ok(PlanarAmplitude::new(
            (ONE + c * c * sum) / (z + w),
            Representation::Rfe,
        ))
    }

    fn jzz_terms(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let c = self.c();
        let w = self.curve.weights();
        let mut g_sum = Complex64::new(0.0, 0.0);
        let mut pole_sum = Complex64::new(0.0, 0.0);
        for k in 0..self.d() {
            g_sum += w[k] * self.g0_deformed(k, z)?;
            pole_sum += w[k] / self.diff(self.eps(k), z);
        }
        Ok((c * g_sum, c * pole_sum))
    }

    /// `|LHS - RHS|` of the Dyson–Schwinger equation extended to complex `(z, w)`.
    ///
    /// At `z = ε_k` two terms have cancelling poles; there the residual is
    /// taken as its mean over a small circle around `z`.
    pub fn dse_residual(&self, z: Complex64, w: Complex64) -> Result<f64> {
        self.check_pole_set(z, w)?;
        if self.deformed_index(z).is_none() {
            return Ok(self.dse_defect(z, w)?.norm());
        }
        let radius = 1e-3 * self.curve.scale();
        let mut sum = Complex64::new(0.0, 0.0);
        for p in 0..DSE_PROBES {
            let t = std::f64::consts::TAU * (p as f64 + 0.5) / DSE_PROBES as f64;
            sum += self.dse_defect(z + Complex64::from_polar(radius, t), w)?;
        }
        Ok((sum / DSE_PROBES as f64).norm())
    }

    fn dse_defect(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.check_pole_set(z, w)?;
        let jz = self.curve.eval(z)?;
        let jw = self.curve.eval(w)?;
        let (g_sum, pole_sum) = self.jzz_terms(z)?;
        let g = self.g0_rational(z, w)?.value;
        let lhs = (jz + jw + g_sum + pole_sum) * g;
        let c = self.c();
        let wts = self.curve.weights();
        let mut rhs = ONE;
        for k in 0..self.d() {
            rhs += c * wts[k] * self.g0_deformed(k, w)? / self.diff(self.eps(k), z);
        }
        Ok(lhs - rhs)
    }

    /// `|J(z) + (λ/N)Σ r_k G(z,ε_k) + (λ/N)Σ r_k/(J(ε_k)-J(z)) + J(-z)|`.
    pub fn jzz_residual(&self, z: Complex64) -> Result<f64> {
        if self.deformed_index(z).is_some() || self.deformed_index(-z).is_some() {
            return Err(Error::PoleProximity("identity is singular at z = ±ε_k".into()));
        }
        let tol = self.exclusion();
        if self.eps_hat.iter().flatten().any(|h| (z - h).norm() <= tol) {
            return Err(Error::PoleProximity(format!("z = {z} is on an ε̂")));
        }
        let jz = self.curve.eval(z)?;
        let jmz = self.curve.eval(-z)?;
        let (g_sum, pole_sum) = self.jzz_terms(z)?;
        Ok((jz + g_sum + pole_sum + jmz).norm())
    }
}
