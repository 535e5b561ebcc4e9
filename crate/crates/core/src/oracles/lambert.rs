//! Principal branch `W₀` of the Lambert W function, by Halley iteration.

use crate::error::{Error, Result};

const MAX_ITERS: usize = 64;
const INV_E: f64 = 0.367_879_441_171_442_33;

/// `W₀(x)` for `x ≥ -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E {
        return Err(Error::DomainError(format!("W0 undefined at {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > 3.0 {
        return lambert_w0_exp(x.ln());
    }
    let mut w = if x < -0.25 {
        // series around the branch point
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p() * (1.0 - x.ln_1p().ln_1p() / (2.0 + x.ln_1p()))
    };
    if w <= -1.0 {
        return Ok(-1.0);
    }
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 || f == 0.0 {
            return Ok(w);
        }
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            return Err(Error::WNonConvergence(x));
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        // near the branch point the flat residual leaves Halley jittering at round-off level
        if step.abs() >= last_step && f.abs() <= 8.0 * f64::EPSILON * x.abs() {
            return Ok(w);
        }
        last_step = step.abs();
        w = next.max(-1.0);
    }
    Err(Error::WNonConvergence(x))
}

/// `W₀(e^y)`, usable when `e^y` overflows; solves `w + ln w = y`.
pub fn lambert_w0_exp(y: f64) -> Result<f64> {
    if y.is_nan() {
        return Err(Error::DomainError("W0(exp(NaN))".into()));
    }
    if y < 1.0 {
        return lambert_w0(y.exp());
    }
    let l2 = y.ln();
    let mut w = y - l2 + l2 / y;
    for _ in 0..MAX_ITERS {
        let g = w + w.ln() - y;
        let g1 = 1.0 + 1.0 / w;
        let g2 = -1.0 / (w * w);
        let step = 2.0 * g * g1 / (2.0 * g1 * g1 - g * g2);
        let next = w - step;
        if !next.is_finite() || next <= 0.0 {
            return Err(Error::WNonConvergence(y));
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next {
            return Ok(next);
        }
        w = next;
    }
    Err(Error::WNonConvergence(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        // Ω constant
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn exp_variant_matches_and_extends() {
        for y in [1.0, 5.0, 30.0, 700.0] {
            let a = lambert_w0_exp(y).unwrap();
            if y < 700.0 {
                assert!((a - lambert_w0(y.exp()).unwrap()).abs() <= 1e-14 * a);
            }
            assert!((a + a.ln() - y).abs() <= 1e-14 * y);
        }
        assert!(lambert_w0_exp(1e5).unwrap().is_finite());
    }

    #[test]
    fn domain() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::DomainError(_))));
    }
}
