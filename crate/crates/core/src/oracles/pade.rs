//! Rational (Padé) approximation of the `D = 2` kinetic function
//! `J₂(z) = z + λ ln(1 + z)`.
//!
//! The continued fraction
//! `ln(1+z) = z/(1 + 1²z/(2 + 1²z/(3 + 2²z/(4 + 2²z/(5 + ...)))))`
//! truncated after `2d` fractions is the `[d/d]` Padé approximant. Written as
//! `c - Σ_k ω_k/(z + t_k)` with `t_k > 1`, `ω_k > 0`, it is a rational `J`
//! with deformed eigenvalues `t_k` and weights `ω_k`. The constant `c` only
//! shifts `J`, so it enters through the inverse map alone.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::curve::RationalJ;
use crate::error::{Error, Result};
use crate::oracles::lambert::lambert_w0_exp;
use crate::poly::Poly;
use crate::two_point::PlanarModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeLog {
    pub poles: Vec<f64>,
    pub weights: Vec<f64>,
    pub constant: f64,
}

impl PadeLog {
    pub fn eval(&self, z: f64) -> f64 {
        self.constant
            - self
                .poles
                .iter()
                .zip(&self.weights)
                .map(|(t, w)| w / (z + t))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeCheck {
    pub degree: usize,
    /// `G_d(J_d⁻¹(a), J_d⁻¹(b))`.
    pub g_approx: f64,
    pub j_inverse_approx: (f64, f64),
    pub j2_inverse_exact: (f64, f64),
}

fn real_poly(c: &[f64]) -> Poly {
    Poly::from_real(c)
}

fn poly_add_scaled(p: &[f64], q: &[f64], qs: &[f64]) -> Vec<f64> {
    // p + q * (polynomial qs)
    let n = p.len().max(q.len() + qs.len() - 1);
    let mut out = vec![0.0; n];
    for (i, &c) in p.iter().enumerate() {
        out[i] += c;
    }
    for (i, &a) in q.iter().enumerate() {
        for (j, &b) in qs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `[d/d]` Padé approximant of `ln(1+z)` in pole form.
pub fn pade_log(d: usize) -> Result<PadeLog> {
    if d == 0 {
        return Err(Error::InvalidArgument("Pade degree must be >= 1".into()));
    }
    // A_n = b_n A_{n-1} + a_n(z) A_{n-2}, same for B
    let (mut a_prev, mut a_cur) = (vec![1.0], vec![0.0]);
    let (mut b_prev, mut b_cur) = (vec![0.0], vec![1.0]);
    for n in 1..=2 * d {
        let an = if n == 1 { 1.0 } else { ((n / 2) * (n / 2)) as f64 };
        let bn = n as f64;
        let a_next = poly_add_scaled(&a_cur.iter().map(|c| c * bn).collect::<Vec<_>>(), &a_prev, &[0.0, an]);
        let b_next = poly_add_scaled(&b_cur.iter().map(|c| c * bn).collect::<Vec<_>>(), &b_prev, &[0.0, an]);
        a_prev = std::mem::replace(&mut a_cur, a_next);
        b_prev = std::mem::replace(&mut b_cur, b_next);
    }
    while a_cur.len() > d + 1 && a_cur.last() == Some(&0.0) {
        a_cur.pop();
    }
    while b_cur.len() > d + 1 && b_cur.last() == Some(&0.0) {
        b_cur.pop();
    }
    if a_cur.len() != d + 1 || b_cur.len() != d + 1 {
        return Err(Error::PadeDegenerate(format!(
            "unexpected degrees {}/{}",
            a_cur.len() - 1,
            b_cur.len() - 1
        )));
    }
    let num = real_poly(&a_cur);
    let den = real_poly(&b_cur);
    let dden: Vec<f64> = b_cur.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let dden = real_poly(&dden);
    let mut poles = Vec::with_capacity(d);
    let mut weights = Vec::with_capacity(d);
    for r in den.roots() {
        if r.im.abs() > 1e-8 * (1.0 + r.norm()) {
            return Err(Error::PadeDegenerate(format!("complex pole {r}")));
        }
        let z = Complex64::new(r.re, 0.0);
        let residue = (num.eval(z) / dden.eval(z)).re;
        let t = -r.re;
        if !(t > 0.0) || !(residue < 0.0) {
            return Err(Error::PadeDegenerate(format!("pole {t} with residue {residue}")));
        }
        poles.push(t);
        weights.push(-residue);
    }
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| poles[i].total_cmp(&poles[j]));
    let poles: Vec<f64> = idx.iter().map(|&i| poles[i]).collect();
    let weights: Vec<f64> = idx.iter().map(|&i| weights[i]).collect();
    for w in poles.windows(2) {
        if w[1] - w[0] <= 1e-10 * w[1] {
            return Err(Error::PadeDegenerate("coincident poles".into()));
        }
    }
    Ok(PadeLog {
        poles,
        weights,
        constant: a_cur[d] / b_cur[d],
    })
}

/// Exact inverse of `J₂(z) = z + λ ln(1+z)` on `z > -1`, `λ > 0`.
pub fn j2_inverse(a: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::DomainError(format!("lambda = {lambda} must be positive")));
    }
    Ok(lambda * lambert_w0_exp((1.0 + a) / lambda - lambda.ln())? - 1.0)
}

/// Largest real solution of `J(z) = target` with `J` increasing on `(-ε_1, ∞)`.
fn principal_inverse(j: &RationalJ, target: f64) -> Result<f64> {
    let e1 = j.epsilons()[0];
    let f = |z: f64| j.eval_unchecked(Complex64::new(z, 0.0)).re - target;
    let mut lo = -e1;
    let mut hi = target.abs() + 1.0 + e1;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut step = 1.0;
    while f(lo + step) > 0.0 {
        step *= 0.5;
        if step < 1e-300 {
            return Err(Error::DomainError("inverse bracket failed".into()));
        }
    }
    lo += step;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..3 {
        let dz = f(z) / j.eval_prime_unchecked(Complex64::new(z, 0.0)).re;
        z -= dz;
    }
    Ok(z)
}

/// Rational-`J` model approximating `J₂`, together with its constant shift.
pub fn pade_model(d: usize, lambda: f64) -> Result<(RationalJ, f64)> {
    let p = pade_log(d)?;
    let j = RationalJ::from_poles(p.poles.clone(), p.weights.clone(), lambda, 1.0)?;
    Ok((j, lambda * p.constant))
}

/// Planar `g(a, b)` of the `D = 2` model approximated at Padé degree `d`.
pub fn lambert_pade_check(d: usize, lambda: f64, a: f64, b: f64) -> Result<PadeCheck> {
    if !(lambda > 0.0) {
        return Err(Error::DomainError(format!("lambda = {lambda} must be positive")));
    }
    let (j, shift) = pade_model(d, lambda)?;
    let za = principal_inverse(&j, a - shift)?;
    let zb = principal_inverse(&j, b - shift)?;
    let model = PlanarModel::new(j)?;
    let g = model.g0_rational(Complex64::new(za, 0.0), Complex64::new(zb, 0.0))?;
    Ok(PadeCheck {
        degree: d,
        g_approx: g.value.re,
        j_inverse_approx: (za, zb),
        j2_inverse_exact: (j2_inverse(a, lambda)?, j2_inverse(b, lambda)?),
    })
}
