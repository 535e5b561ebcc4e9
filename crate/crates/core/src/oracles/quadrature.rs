//! Independent contour-integral evaluation of `G⁽⁰⁾(ε_a, ε_b)`.
//!
//! With `u = ε_a`, `v = ε_b`:
//!
//! ```text
//! G⁽⁰⁾(u,v) = exp(I) / (J(u) + v),
//! I = (1/2πi) ∮ J'(z) log[(J(u) - J(-z)) / (z + J(u))] / (J(z) - J(v)) dz
//! ```
//!
//! The logarithm is principal. Its cuts on the positive axis are the
//! intervals between each `ε_k` and the matching `-û^k`. The contour is the
//! rectangle `[x0, T] × [-δ, δ]` traversed clockwise, which encloses every
//! cut, so no tail truncation is needed.
//!
//! Integration uses adaptive 7/15-point Gauss–Kronrod on each edge.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::RationalJ;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Half-height of the rectangle.
    pub delta: f64,
    /// Absolute tolerance per edge.
    pub tolerance: f64,
    pub max_subdivisions: usize,
    /// Samples per horizontal edge used to detect crossings of the log cut.
    pub crossing_samples: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            tolerance: 1e-13,
            max_subdivisions: 5000,
            crossing_samples: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Imaginary part of the computed value, zero up to rounding.
    pub imaginary_part: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    ((kron * h), ((kron - gauss) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss–Kronrod of a complex-valued function over `[a, b]`.
///
/// Returns the integral, the error estimate and the number of evaluations.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    breakpoints: &[f64],
    tolerance: f64,
    max_subdivisions: usize,
) -> Result<(Complex64, f64, usize)> {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut evals = 15 * heap.len();
    let mut splits = 0;
    loop {
        if !err.is_finite() || !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureNonConvergence("integrand not finite".into()));
        }
        if err <= tolerance {
            break;
        }
        if splits >= max_subdivisions {
            return Err(Error::QuadratureNonConvergence(format!(
                "error estimate {err:e} after {splits} subdivisions"
            )));
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureNonConvergence(format!(
                "interval exhausted near {mid}, error estimate {err:e}"
            )));
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        splits += 1;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed the drift of the running updates
    let total: Complex64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.error).sum();
    Ok((total, err, evals))
}

/// `G⁽⁰⁾(ε_a, ε_b)` from the contour integral.
pub fn quadrature_g(j: &RationalJ, a: usize, b: usize, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    let d = j.dim();
    if a >= d || b >= d {
        return Err(Error::InvalidArgument(format!("index out of range 0..{d}")));
    }
    if !(opts.delta > 0.0) || !(opts.tolerance > 0.0) || opts.crossing_samples < 2 {
        return Err(Error::InvalidArgument("bad quadrature options".into()));
    }
    let eps = j.epsilons();
    let u = Complex64::new(eps[a], 0.0);
    let v = Complex64::new(eps[b], 0.0);
    let ju = j.eval_unchecked(u);

    let mut ends: Vec<f64> = eps.to_vec();
    if j.lambda() != 0.0 {
        for r in j.preimages(u)?.roots {
            if r.im != 0.0 || -r.re <= 0.0 {
                return Err(Error::DomainError(format!(
                    "preimage {r} of J(eps_{a}) does not give a positive real branch point"
                )));
            }
            ends.push(-r.re);
        }
    }
    let lo = ends.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ends.iter().copied().fold(0.0, f64::max);
    let x0 = 0.5 * lo;
    let x1 = 2.0 * hi + 1.0;
    let delta = opts.delta;

    let log_arg = |z: Complex64| (ju - j.eval_unchecked(-z)) / (z + ju);
    let integrand = |z: Complex64| j.eval_prime_unchecked(z) * log_arg(z).ln() / j.diff_unchecked(z, v);

    // the principal log jumps where Im A changes sign with Re A < 0
    for y in [delta, -delta] {
        let n = opts.crossing_samples;
        let mut prev = log_arg(Complex64::new(x0, y));
        for i in 1..=n {
            let z = Complex64::new(x0 + (x1 - x0) * i as f64 / n as f64, y);
            let cur = log_arg(z);
            if cur.re < 0.0 && prev.re < 0.0 && cur.im.signum() != prev.im.signum() {
                return Err(Error::BranchCrossing { re: z.re, im: z.im });
            }
            prev = cur;
        }
    }

    let mut xs: Vec<f64> = ends.clone();
    xs.push(x0);
    xs.push(x1);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let tol = opts.tolerance;
    let max = opts.max_subdivisions;

    // clockwise: top edge left to right, right edge down, bottom right to left, left edge up
    let (top, e1, n1) = integrate(|x| integrand(Complex64::new(x, delta)), &xs, tol, max)?;
    let (bottom, e2, n2) = integrate(|x| integrand(Complex64::new(x, -delta)), &xs, tol, max)?;
    let (right, e3, n3) = integrate(
        |y| integrand(Complex64::new(x1, y)) * Complex64::new(0.0, 1.0),
        &[-delta, delta],
        tol,
        max,
    )?;
    let (left, e4, n4) = integrate(
        |y| integrand(Complex64::new(x0, y)) * Complex64::new(0.0, 1.0),
        &[-delta, delta],
        tol,
        max,
    )?;
    let contour = top - bottom - right + left;
    let i_val = contour / Complex64::new(0.0, 2.0 * PI);
    let g = i_val.exp() / (ju + v);
    let err = (e1 + e2 + e3 + e4) / (2.0 * PI) * g.norm();
    Ok(QuadratureResult {
        value: g.re,
        imaginary_part: g.im,
        error_estimate: err,
        evaluations: n1 + n2 + n3 + n4,
    })
}
