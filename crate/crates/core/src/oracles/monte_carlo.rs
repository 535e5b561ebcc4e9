//! Metropolis sampling of the Hermitian matrix measure
//! `exp(-N Tr(E Φ² + (λ/4) Φ⁴))` with single-entry updates.
//!
//! `M = Φ²` is kept up to date so a proposal costs `O(N)`; it is rebuilt
//! periodically to stop rounding drift. The estimator is
//! `N ⟨|Φ_pq|²⟩` averaged over all index pairs in the eigenspaces of
//! `E_a` and `E_b` (off-diagonal pairs only when `a = b` and the
//! multiplicity allows it). Errors come from a jackknife over blocks.
//! Random numbers: ChaCha8 seeded from a `u64`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

pub const MAX_MATRIX_SIZE: u32 = 64;
pub const MIN_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCOptions {
    /// Sweeps discarded before measuring; step size is tuned during these.
    pub thermalization: usize,
    pub blocks: usize,
    pub target_acceptance: f64,
    /// Sweeps between full rebuilds of `Φ²`.
    pub rebuild_interval: usize,
}

impl Default for MCOptions {
    fn default() -> Self {
        Self {
            thermalization: 2_000,
            blocks: 20,
            target_acceptance: 0.5,
            rebuild_interval: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    /// `N ⟨Φ_ab Φ_ba⟩`, comparable to the planar `G_ab`.
    pub mean: f64,
    pub std_error: f64,
    /// `⟨Φ_ab Φ_ba⟩` without the factor `N`.
    pub raw_mean: f64,
    pub raw_std_error: f64,
    pub samples: usize,
    pub acceptance_rate: f64,
}

struct Chain {
    n: usize,
    e: Vec<f64>,
    lambda: f64,
    phi: Vec<Complex64>,
    m: Vec<Complex64>,
}

impl Chain {
    fn new(e: Vec<f64>, lambda: f64) -> Self {
        let n = e.len();
        Self {
            n,
            e,
            lambda,
            phi: vec![Complex64::new(0.0, 0.0); n * n],
            m: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    fn rebuild(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.phi[i * n + k] * self.phi[k * n + j];
                }
                self.m[i * n + j] = s;
            }
        }
    }

    /// New rows `i` and `j` of `Φ²` after `Φ_ij += δ` (and the conjugate entry).
    fn new_rows(&self, i: usize, j: usize, delta: Complex64, ri: &mut [Complex64], rj: &mut [Complex64]) {
        let n = self.n;
        let phi = &self.phi;
        if i == j {
            for q in 0..n {
                ri[q] = self.m[i * n + q] + delta * phi[i * n + q];
            }
            ri[i] += delta * phi[i * n + i] + delta * delta;
            return;
        }
        let dc = delta.conj();
        let d2 = delta.norm_sqr();
        for q in 0..n {
            ri[q] = self.m[i * n + q] + delta * phi[j * n + q];
            rj[q] = self.m[j * n + q] + dc * phi[i * n + q];
        }
        ri[j] += phi[i * n + i] * delta;
        ri[i] += phi[i * n + j] * dc + d2;
        rj[j] += phi[j * n + i] * delta + d2;
        rj[i] += phi[j * n + j] * dc;
    }

    /// `Tr M'² - Tr M²` for the rows produced by [`Self::new_rows`].
    fn trace_sq_change(&self, i: usize, j: usize, ri: &[Complex64], rj: &[Complex64]) -> f64 {
        let n = self.n;
        let row = |p: usize, r: &[Complex64]| -> f64 {
            (0..n).map(|q| r[q].norm_sqr() - self.m[p * n + q].norm_sqr()).sum()
        };
        if i == j {
            return 2.0 * row(i, ri) - (ri[i].norm_sqr() - self.m[i * n + i].norm_sqr());
        }
        let block = ri[i].norm_sqr() - self.m[i * n + i].norm_sqr() + ri[j].norm_sqr()
            - self.m[i * n + j].norm_sqr()
            + rj[i].norm_sqr()
            - self.m[j * n + i].norm_sqr()
            + rj[j].norm_sqr()
            - self.m[j * n + j].norm_sqr();
        2.0 * (row(i, ri) + row(j, rj)) - block
    }

    fn commit(&mut self, i: usize, j: usize, delta: Complex64, ri: &[Complex64], rj: &[Complex64]) {
        let n = self.n;
        if i == j {
            self.phi[i * n + i] += delta;
            for q in 0..n {
                self.m[i * n + q] = ri[q];
                self.m[q * n + i] = ri[q].conj();
            }
            return;
        }
        self.phi[i * n + j] += delta;
        self.phi[j * n + i] += delta.conj();
        for q in 0..n {
            self.m[i * n + q] = ri[q];
            self.m[q * n + i] = ri[q].conj();
        }
        for q in 0..n {
            self.m[j * n + q] = rj[q];
            self.m[q * n + j] = rj[q].conj();
        }
        // the (i,j) and (j,i) entries belong to both rows; keep them Hermitian
        self.m[j * n + i] = rj[i];
        self.m[i * n + j] = ri[j];
    }

    /// One sweep over the upper triangle. Returns accepted proposals.
    fn sweep(&mut self, rng: &mut ChaCha8Rng, step: f64, ri: &mut [Complex64], rj: &mut [Complex64]) -> usize {
        let n = self.n;
        let nf = n as f64;
        let mut accepted = 0;
        for i in 0..n {
            for j in i..n {
                let width = step / (nf * (self.e[i] + self.e[j])).sqrt();
                let delta = if i == j {
                    Complex64::new(width * rng.gen_range(-1.0..1.0), 0.0)
                } else {
                    Complex64::new(width * rng.gen_range(-1.0..1.0), width * rng.gen_range(-1.0..1.0))
                };
                let old = self.phi[i * n + j];
                let new = old + delta;
                let kinetic = if i == j {
                    self.e[i] * (new.re * new.re - old.re * old.re)
                } else {
                    (self.e[i] + self.e[j]) * (new.norm_sqr() - old.norm_sqr())
                };
                let mut ds = nf * kinetic;
                if self.lambda != 0.0 {
                    self.new_rows(i, j, delta, ri, rj);
                    ds += nf * self.lambda / 4.0 * self.trace_sq_change(i, j, ri, rj);
                }
                if ds <= 0.0 || rng.gen::<f64>() < (-ds).exp() {
                    accepted += 1;
                    if self.lambda != 0.0 {
                        self.commit(i, j, delta, ri, rj);
                    } else {
                        self.phi[i * n + j] = new;
                        self.phi[j * n + i] = new.conj();
                    }
                }
            }
        }
        accepted
    }
}

fn index_pairs(spectrum: &Spectrum, a: usize, b: usize) -> Vec<(usize, usize)> {
    let mult = spectrum.multiplicities();
    let start = |k: usize| mult[..k].iter().map(|&m| m as usize).sum::<usize>();
    let ra = start(a)..start(a) + mult[a] as usize;
    let rb = start(b)..start(b) + mult[b] as usize;
    let mut pairs = Vec::new();
    for p in ra.clone() {
        for q in rb.clone() {
            if a != b || p != q || mult[a] == 1 {
                pairs.push((p, q));
            }
        }
    }
    pairs
}

/// Estimate `N ⟨Φ_ab Φ_ba⟩` by Metropolis sampling.
pub fn monte_carlo_moment(
    spectrum: &Spectrum,
    lambda: f64,
    a: usize,
    b: usize,
    sweeps: usize,
    seed: u64,
    opts: &MCOptions,
) -> Result<MCEstimate> {
    spectrum.validate()?;
    let size = spectrum.matrix_size();
    if size > MAX_MATRIX_SIZE {
        return Err(Error::InvalidArgument(format!("matrix size {size} exceeds {MAX_MATRIX_SIZE}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("Monte Carlo needs lambda >= 0, got {lambda}")));
    }
    if sweeps < MIN_SWEEPS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SWEEPS} sweeps, got {sweeps}")));
    }
    let d = spectrum.dim();
    if a >= d || b >= d {
        return Err(Error::InvalidArgument(format!("index out of range 0..{d}")));
    }
    if opts.blocks < 2 || sweeps < opts.blocks || opts.rebuild_interval == 0 {
        return Err(Error::InvalidArgument("bad Monte Carlo options".into()));
    }

    let energies: Vec<f64> = spectrum
        .eigenvalues()
        .iter()
        .zip(spectrum.multiplicities())
        .flat_map(|(&e, &m)| std::iter::repeat(e).take(m as usize))
        .collect();
    let n = energies.len();
    let nf = n as f64;
    let proposals_per_sweep = n * (n + 1) / 2;
    let mut chain = Chain::new(energies, lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ri = vec![Complex64::new(0.0, 0.0); n];
    let mut rj = vec![Complex64::new(0.0, 0.0); n];
    let pairs = index_pairs(spectrum, a, b);

    let mut step = 1.0;
    for s in 0..opts.thermalization {
        let acc = chain.sweep(&mut rng, step, &mut ri, &mut rj) as f64 / proposals_per_sweep as f64;
        step *= if acc > opts.target_acceptance { 1.02 } else { 1.0 / 1.02 };
        if (s + 1) % opts.rebuild_interval == 0 {
            chain.rebuild();
        }
    }

    let mut series = Vec::with_capacity(sweeps);
    let mut accepted = 0usize;
    for s in 0..sweeps {
        accepted += chain.sweep(&mut rng, step, &mut ri, &mut rj);
        if (s + 1) % opts.rebuild_interval == 0 {
            chain.rebuild();
        }
        let obs: f64 = pairs.iter().map(|&(p, q)| chain.phi[p * n + q].norm_sqr()).sum::<f64>() / pairs.len() as f64;
        series.push(obs);
    }

    let per_block = sweeps / opts.blocks;
    let used = per_block * opts.blocks;
    let block_means: Vec<f64> = series[..used]
        .chunks(per_block)
        .map(|c| c.iter().sum::<f64>() / per_block as f64)
        .collect();
    let total: f64 = block_means.iter().sum();
    let nb = opts.blocks as f64;
    let jack: Vec<f64> = block_means.iter().map(|m| (total - m) / (nb - 1.0)).collect();
    let raw_mean = total / nb;
    let jmean = jack.iter().sum::<f64>() / nb;
    let var = (nb - 1.0) / nb * jack.iter().map(|x| (x - jmean).powi(2)).sum::<f64>();
    let raw_err = var.sqrt();

    Ok(MCEstimate {
        mean: nf * raw_mean,
        std_error: nf * raw_err,
        raw_mean,
        raw_std_error: raw_err,
        samples: sweeps,
        acceptance_rate: accepted as f64 / (sweeps * proposals_per_sweep) as f64,
    })
}
