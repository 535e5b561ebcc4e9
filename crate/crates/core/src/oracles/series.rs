//! Weak-coupling expansion of `G_ab` from the closed large-N equation.
//!
//! Writing `G(x, E_b) = Σ_n λⁿ g_n(x, E_b)` with `x` continuous, matching
//! powers of λ gives
//!
//! ```text
//! (x + E_b) g_n(x,E_b) = δ_{n0}
//!     - (1/N) Σ_k r_k Σ_{m<n} g_m(x,E_k) g_{n-1-m}(x,E_b)
//!     + (1/N) Σ_k r_k (g_{n-1}(E_k,E_b) - g_{n-1}(x,E_b)) / (E_k - x)
//! ```
//!
//! The `k = a` difference quotient at `x = E_a` is a derivative, so each
//! `g_n(·, E_b)` is carried as a truncated Taylor jet around every `E_a`.
//! One jet degree is consumed per order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

pub const MAX_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    /// `orders[n][a][b]` is the coefficient of λⁿ in `G_ab`.
    pub orders: Vec<Vec<Vec<f64>>>,
}

impl SeriesCoefficients {
    /// `Σ_{n ≤ upto} cₙ λⁿ`.
    pub fn resum(&self, lambda: f64, upto: usize) -> Vec<Vec<f64>> {
        let d = self.orders[0].len();
        let mut out = vec![vec![0.0; d]; d];
        for (n, c) in self.orders.iter().enumerate().take(upto + 1) {
            let p = lambda.powi(n as i32);
            for a in 0..d {
                for b in 0..d {
                    out[a][b] += c[a][b] * p;
                }
            }
        }
        out
    }
}

type Jet = Vec<f64>;

fn jet_mul(p: &[f64], q: &[f64], len: usize) -> Jet {
    let mut out = vec![0.0; len];
    for (i, &a) in p.iter().enumerate().take(len) {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in q.iter().enumerate().take(len - i) {
            out[i + j] += a * b;
        }
    }
    out
}

/// Jet of `1/(c0 + c1 t)`.
fn jet_inv_linear(c0: f64, c1: f64, len: usize) -> Jet {
    let ratio = -c1 / c0;
    let mut out = Vec::with_capacity(len);
    let mut term = 1.0 / c0;
    for _ in 0..len {
        out.push(term);
        term *= ratio;
    }
    out
}

pub fn perturbative_series(spectrum: &Spectrum, order: usize) -> Result<SeriesCoefficients> {
    spectrum.validate()?;
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "series order {order} exceeds {MAX_ORDER}"
        )));
    }
    let e = spectrum.eigenvalues();
    let r = spectrum.weights();
    let n_inv = 1.0 / spectrum.matrix_size() as f64;
    let d = e.len();
    let len = order + 1;
    // jets[n][a][b]: Taylor coefficients of g_n(E_a + t, E_b) in t
    let mut jets: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(len);
    for n in 0..=order {
        let mut level = vec![vec![Vec::new(); d]; d];
        for a in 0..d {
            for b in 0..d {
                let mut rhs = vec![0.0; len];
                if n == 0 {
                    rhs[0] = 1.0;
                } else {
                    for k in 0..d {
                        let w = r[k] * n_inv;
                        for m in 0..n {
                            let prod = jet_mul(&jets[m][a][k], &jets[n - 1 - m][a][b], len);
                            for i in 0..len {
                                rhs[i] -= w * prod[i];
                            }
                        }
                        let prev = &jets[n - 1][a][b];
                        if k == a {
                            // (g(x) - g(E_a)) / (x - E_a): shift the jet down
                            for i in 0..len - 1 {
                                rhs[i] += w * prev[i + 1];
                            }
                        } else {
                            let mut num: Jet = prev.iter().map(|x| -x).collect();
                            num[0] += jets[n - 1][k][b][0];
                            let q = jet_mul(&num, &jet_inv_linear(e[k] - e[a], -1.0, len), len);
                            for i in 0..len {
                                rhs[i] += w * q[i];
                            }
                        }
                    }
                }
                level[a][b] = jet_mul(&rhs, &jet_inv_linear(e[a] + e[b], 1.0, len), len);
            }
        }
        jets.push(level);
    }
    let orders = jets
        .iter()
        .map(|lvl| lvl.iter().map(|row| row.iter().map(|j| j[0]).collect()).collect())
        .collect();
    Ok(SeriesCoefficients { orders })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_is_free_propagator() {
        let s = Spectrum::new(vec![0.5, 1.5, 2.0], vec![1, 2, 3]).unwrap();
        let c = perturbative_series(&s, 0).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let e = s.eigenvalues();
                assert_eq!(c.orders[0][a][b], 1.0 / (e[a] + e[b]));
            }
        }
    }

    #[test]
    fn one_matrix_first_order() {
        // G₁₁ = (1/μ²)(1 - 2λ/μ⁴ + ...) from expanding the closed form
        let mu_sq = 2.0;
        let s = Spectrum::one_matrix(mu_sq, 7).unwrap();
        let c = perturbative_series(&s, 2).unwrap();
        assert!((c.orders[1][0][0] + 2.0 / mu_sq.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_in_a_b() {
        let s = Spectrum::new(vec![0.5, 1.1, 2.0], vec![2, 1, 1]).unwrap();
        let c = perturbative_series(&s, 4).unwrap();
        for n in 0..=4 {
            for a in 0..3 {
                for b in 0..3 {
                    let (x, y) = (c.orders[n][a][b], c.orders[n][b][a]);
                    assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "order {n}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn order_limit() {
        let s = Spectrum::one_matrix(2.0, 3).unwrap();
        assert!(perturbative_series(&s, 7).is_err());
    }
}
