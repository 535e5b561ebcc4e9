//! Subcommand dispatch.

use num_complex::Complex64;
use quartic_core::oracles::{
    monte_carlo_moment, one_matrix_closed_form, perturbative_series, quadrature_g, MCOptions, QuadratureOptions,
};
use quartic_core::{
    basic_lemma_sum, rel_diff, solve_deformation, spectral_curve, Branch, Coupling, CylinderSolver,
    DeformedSpectrum, Error as CoreError, PlanarModel, RationalJ,
};

use crate::config::ModelConfig;
use crate::document::{Amplitude, Check, ResultDocument};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Deform,
    TwoPoint,
    Cylinder,
    Curve,
    Series,
    Verify,
    McCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Deform => "deform",
            Command::TwoPoint => "two-point",
            Command::Cylinder => "cylinder",
            Command::Curve => "curve",
            Command::Series => "series",
            Command::Verify => "verify",
            Command::McCheck => "mc-check",
        }
    }
}

/// Command-specific arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArgs {
    pub z: Option<Complex64>,
    pub w: Option<Complex64>,
    pub order: usize,
    pub sweeps: usize,
    pub seed: u64,
    /// Overrides every tolerance of `verify` and `mc-check` when set.
    pub tolerance: Option<f64>,
    /// Matrix indices `(a, b)` for `mc-check`.
    pub indices: (usize, usize),
}

impl Default for RunArgs {
    fn default() -> Self {
        Self {
            z: None,
            w: None,
            order: 4,
            sweeps: 10_000,
            seed: 1,
            tolerance: None,
            indices: (0, 0),
        }
    }
}

impl RunArgs {
    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

/// `"re,im"` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected 're,im', got '{s}'")),
    };
    if !z.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(z)
}

struct Solved {
    deformed: DeformedSpectrum,
    model: PlanarModel,
}

fn solve(config: &ModelConfig, lambda: f64) -> Result<Solved, CliError> {
    let deformed = solve_deformation(&config.spectrum, Coupling::new(lambda)?, &config.solver)?;
    let model = PlanarModel::new(RationalJ::new(&config.spectrum, &deformed)?)?;
    Ok(Solved { deformed, model })
}

pub fn run_subcommand(config: &ModelConfig, command: Command, args: &RunArgs) -> Result<ResultDocument, CliError> {
    let mut doc = ResultDocument::new(command.name(), config);
    match command {
        Command::Deform => deform(config, &mut doc)?,
        Command::TwoPoint => two_point(config, args, &mut doc)?,
        Command::Cylinder => cylinder(config, args, &mut doc)?,
        Command::Curve => curve(config, &mut doc)?,
        Command::Series => series(config, args, &mut doc)?,
        Command::Verify => verify(config, args, &mut doc)?,
        Command::McCheck => mc_check(config, args, &mut doc)?,
    }
    Ok(doc)
}

fn deform(config: &ModelConfig, doc: &mut ResultDocument) -> Result<(), CliError> {
    let s = solve(config, config.lambda)?;
    doc.scalars.insert("residual_norm".into(), s.deformed.residual_norm);
    doc.deformed = Some(s.deformed);
    Ok(())
}

fn two_point(config: &ModelConfig, args: &RunArgs, doc: &mut ResultDocument) -> Result<(), CliError> {
    let s = solve(config, config.lambda)?;
    let g = s.model.g0_matrix();
    doc.matrices.insert("g0".into(), g.entries.clone());
    doc.scalars.insert("form_discrepancy".into(), g.form_discrepancy);
    match (args.z, args.w) {
        (Some(z), Some(w)) => {
            let main = s.model.g0_rational_checked(z, w)?;
            let mut amp = Amplitude::new("rational", Some(z), Some(w), main.value);
            amp.residual = main.diagnostics;
            doc.amplitudes.push(amp);
            let others = [
                ("branch_product", s.model.g0_branch(z, w)),
                ("symmetric_product", s.model.g0_product(z, w)),
                ("partial_fractions", s.model.g0_rfe(z, w)),
            ];
            let mut spread = 0.0f64;
            for (name, result) in others {
                match result {
                    Ok(a) => {
                        spread = spread.max(rel_diff(a.value, main.value));
                        doc.amplitudes.push(Amplitude::new(name, Some(z), Some(w), a.value));
                    }
                    Err(e) => doc.notes.push(format!("{name} unavailable: {e}")),
                }
            }
            doc.scalars.insert("max_representation_spread".into(), spread);
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("two-point needs both --z and --w, or neither".into())),
    }
    doc.deformed = Some(s.deformed);
    Ok(())
}

fn cylinder(config: &ModelConfig, args: &RunArgs, doc: &mut ResultDocument) -> Result<(), CliError> {
    let w = args.w.ok_or_else(|| CliError::Usage("cylinder needs --w".into()))?;
    let s = solve(config, config.lambda)?;
    let alphas = s.model.curve().ramification_points()?;
    for (k, a) in alphas.alphas.iter().enumerate() {
        doc.scalars.insert(format!("alpha[{k}]"), *a);
    }
    if config.lambda == 0.0 {
        doc.notes.push("cylinder amplitude vanishes identically at lambda = 0".into());
        if let Some(z) = args.z {
            doc.amplitudes.push(Amplitude::new("g0_cylinder", Some(z), Some(w), Complex64::new(0.0, 0.0)));
        }
        doc.deformed = Some(s.deformed);
        return Ok(());
    }
    let solver = CylinderSolver::new(&s.model, &alphas)?;
    let bv = solver.boundary_values(w)?;
    doc.scalars.insert("condition".into(), solver.condition());
    doc.scalars.insert("system_residual".into(), bv.residual);
    let eps = s.model.curve().epsilons().to_vec();
    for (l, v) in bv.values.iter().enumerate() {
        doc.amplitudes.push(Amplitude::new(
            format!("boundary[{l}]"),
            Some(Complex64::new(eps[l], 0.0)),
            Some(w),
            *v,
        ));
    }
    if let Some(z) = args.z {
        doc.amplitudes.push(Amplitude::new("g0_cylinder", Some(z), Some(w), solver.evaluate(z, &bv)?));
    }
    doc.deformed = Some(s.deformed);
    Ok(())
}

/// Fixed probe points for the curve residual; deterministic so documents reproduce.
fn curve_probes(count: usize) -> impl Iterator<Item = Complex64> {
    (0..count).map(move |k| {
        let t = k as f64 / count as f64;
        Complex64::from_polar(0.3 + 2.7 * t, std::f64::consts::TAU * 0.618_033_988_75 * k as f64)
    })
}

fn max_curve_residual(j: &RationalJ, poly: &quartic_core::SpectralCurvePoly) -> Result<f64, CoreError> {
    let mut worst = 0.0f64;
    for z in curve_probes(50) {
        if j.nearby_pole(z).is_some() || j.nearby_pole(-z).is_some() {
            continue;
        }
        worst = worst.max(poly.defining_residual(j, z)?);
    }
    Ok(worst)
}

fn curve(config: &ModelConfig, doc: &mut ResultDocument) -> Result<(), CliError> {
    let s = solve(config, config.lambda)?;
    let j = s.model.curve();
    let poly = spectral_curve(j)?;
    doc.scalars.insert("total_degree".into(), poly.total_degree as f64);
    doc.scalars.insert("degree_x".into(), poly.degree_x as f64);
    doc.scalars.insert("degree_y".into(), poly.degree_y as f64);
    doc.scalars.insert("max_defining_residual".into(), max_curve_residual(j, &poly)?);
    doc.notes.push("coefficients[i][k] multiplies x^i y^k".into());
    doc.matrices.insert("coefficients".into(), poly.poly.coeffs.clone());
    doc.deformed = Some(s.deformed);
    Ok(())
}

fn series(config: &ModelConfig, args: &RunArgs, doc: &mut ResultDocument) -> Result<(), CliError> {
    let coeffs = perturbative_series(&config.spectrum, args.order)?;
    for (n, m) in coeffs.orders.iter().enumerate() {
        doc.matrices.insert(format!("order_{n}"), m.clone());
    }
    let resummed = coeffs.resum(config.lambda, args.order);
    let s = solve(config, config.lambda)?;
    let g = &s.model.g0_matrix().entries;
    let gap = resummed
        .iter()
        .flatten()
        .zip(g.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    doc.scalars.insert("max_truncation_error".into(), gap);
    doc.matrices.insert("resummed".into(), resummed);
    doc.matrices.insert("g0".into(), g.clone());
    doc.deformed = Some(s.deformed);
    Ok(())
}

fn mc_check(config: &ModelConfig, args: &RunArgs, doc: &mut ResultDocument) -> Result<(), CliError> {
    let (a, b) = args.indices;
    let d = config.spectrum.dim();
    if a >= d || b >= d {
        return Err(CliError::Usage(format!("indices ({a}, {b}) out of range for d = {d}")));
    }
    let est = monte_carlo_moment(&config.spectrum, config.lambda, a, b, args.sweeps, args.seed, &MCOptions::default())?;
    let s = solve(config, config.lambda)?;
    let planar = s.model.g0_matrix().entries[a][b];
    let n = config.spectrum.matrix_size() as f64;
    for (k, v) in [
        ("mean", est.mean),
        ("std_error", est.std_error),
        ("raw_mean", est.raw_mean),
        ("raw_std_error", est.raw_std_error),
        ("acceptance_rate", est.acceptance_rate),
        ("samples", est.samples as f64),
        ("planar", planar),
    ] {
        doc.scalars.insert(k.into(), v);
    }
    let tol = args.tol((3.0 * est.std_error).max(5.0 / n));
    doc.checks.push(Check::bound(
        "mc_vs_planar",
        (est.mean - planar).abs(),
        tol,
        format!("G[{a}][{b}], max(3 sigma, 5/N)"),
    ));
    doc.deformed = Some(s.deformed);
    Ok(())
}

/// Sample points of the verification battery.
const Z_SAMPLES: [(f64, f64); 3] = [(0.6, 0.25), (1.3, -0.4), (2.1, 0.1)];
const W_SAMPLES: [(f64, f64); 2] = [(0.9, -0.3), (1.7, 0.5)];

fn sample_pairs(args: &RunArgs) -> Vec<(Complex64, Complex64)> {
    let mut pairs: Vec<(Complex64, Complex64)> = Z_SAMPLES
        .iter()
        .flat_map(|&(zr, zi)| W_SAMPLES.iter().map(move |&(wr, wi)| (Complex64::new(zr, zi), Complex64::new(wr, wi))))
        .collect();
    if let (Some(z), Some(w)) = (args.z, args.w) {
        pairs.push((z, w));
    }
    pairs
}

/// Records `f`'s value as a bound check, or a failed check if it errors.
fn bound_check(
    doc: &mut ResultDocument,
    name: &str,
    tolerance: f64,
    detail: &str,
    f: impl FnOnce() -> Result<f64, CoreError>,
) {
    doc.checks.push(match f() {
        Ok(v) => Check::bound(name, v, tolerance, detail),
        Err(e) => Check::failed(name, tolerance, format!("{detail}: {e}")),
    });
}

fn verify(config: &ModelConfig, args: &RunArgs, doc: &mut ResultDocument) -> Result<(), CliError> {
    let s = solve(config, config.lambda)?;
    let m = &s.model;
    let j = m.curve();
    let d = j.dim();
    let pairs = sample_pairs(args);
    let tight = args.tol(1e-10);

    doc.checks.push(Check::bound(
        "deformation_residual",
        s.deformed.residual_norm,
        args.tol(1e-10),
        "max-norm of the deformation equations",
    ));

    bound_check(doc, "preimage_defect", args.tol(1e-8), "max |J(v^k) - J(v)| / (1 + |J(v)|)", || {
        let mut worst = 0.0f64;
        for &(_, w) in &pairs {
            let set = j.preimages(w)?;
            worst = worst.max(set.max_defect / (1.0 + j.eval(w)?.norm()));
        }
        Ok(worst)
    });

    bound_check(doc, "basic_lemma", args.tol(1e-9), "|sum - 1| over preimage nodes", || {
        let shifts: Vec<Complex64> = j.epsilons().iter().map(|&e| Complex64::new(-e, 0.0)).collect();
        let mut worst = 0.0f64;
        for &(_, w) in &pairs {
            let mut nodes = vec![w];
            nodes.extend(j.preimages(w)?.roots);
            worst = worst.max((basic_lemma_sum(&nodes, &shifts)? - 1.0).norm());
        }
        Ok(worst)
    });

    let g = m.g0_matrix();
    let asym = (0..d)
        .flat_map(|a| (0..d).map(move |b| (a, b)))
        .map(|(a, b)| (g.entries[a][b] - g.entries[b][a]).abs() / (1.0 + g.entries[a][b].abs()))
        .fold(g.form_discrepancy, f64::max);
    doc.checks.push(Check::bound("matrix_symmetry", asym, tight, "G(e_a, e_b) against G(e_b, e_a)"));

    bound_check(doc, "representation_agreement", tight, "rational, branch, product and partial-fraction forms", || {
        let mut worst = 0.0f64;
        for &(z, w) in &pairs {
            let vals = [
                m.g0_rational(z, w)?.value,
                m.g0_branch(z, w)?.value,
                m.g0_product(z, w)?.value,
                m.g0_rfe(z, w)?.value,
            ];
            for x in &vals {
                for y in &vals {
                    worst = worst.max(rel_diff(*x, *y));
                }
            }
        }
        Ok(worst)
    });

    bound_check(doc, "two_point_symmetry", tight, "G(z, w) against G(w, z)", || {
        let mut worst = 0.0f64;
        for &(z, w) in &pairs {
            worst = worst.max(rel_diff(m.g0_rational(z, w)?.value, m.g0_rational(w, z)?.value));
        }
        Ok(worst)
    });

    bound_check(doc, "dyson_schwinger_residual", tight, "extended Dyson-Schwinger equation", || {
        let mut worst = 0.0f64;
        for &(z, w) in &pairs {
            worst = worst.max(m.dse_residual(z, w)?);
        }
        Ok(worst)
    });

    bound_check(doc, "reflection_residual", tight, "J(z) + J(-z) identity", || {
        let mut worst = 0.0f64;
        for &(z, _) in &pairs {
            worst = worst.max(m.jzz_residual(z)?);
        }
        Ok(worst)
    });

    if config.lambda == 0.0 {
        doc.notes.push("cylinder checks skipped: the amplitude vanishes at lambda = 0".into());
    } else {
        let e = config.spectrum.eigenvalues();
        let ws = [Complex64::new(0.5 * e[0] + 0.3, 0.0), Complex64::new(e[d - 1] + 0.5, 0.0)];
        let mut branch_gap = Ok(0.0f64);
        let mut residual = Ok(0.0f64);
        match j.ramification_points().and_then(|alphas| CylinderSolver::new(m, &alphas)) {
            Ok(solver) => {
                for w in ws {
                    match (
                        solver.boundary_values_on(w, Branch::Positive),
                        solver.boundary_values_on(w, Branch::Negative),
                    ) {
                        (Ok(p), Ok(q)) => {
                            let gap = p.values.iter().zip(&q.values).map(|(x, y)| rel_diff(*x, *y)).fold(0.0, f64::max);
                            branch_gap = branch_gap.map(|g| g.max(gap));
                            residual = residual.map(|r| r.max(p.residual).max(q.residual));
                        }
                        (Err(err), _) | (_, Err(err)) => {
                            branch_gap = Err(err.clone());
                            residual = Err(err);
                        }
                    }
                }
            }
            Err(err) => {
                branch_gap = Err(err.clone());
                residual = Err(err);
            }
        }
        bound_check(doc, "cylinder_branch_agreement", args.tol(1e-9), "boundary values from +alpha and -alpha", || branch_gap);
        bound_check(doc, "cylinder_system_residual", tight, "affine boundary-value system", || residual);
    }

    match spectral_curve(j) {
        Ok(poly) => {
            let want = 2 * d + 1;
            doc.checks.push(Check {
                name: "spectral_curve_total_degree".into(),
                passed: poly.total_degree == want,
                value: Some(poly.total_degree as f64),
                tolerance: 0.0,
                detail: format!("expected {want}"),
            });
            bound_check(doc, "spectral_curve_residual", args.tol(1e-7), "E(J(z), -J(-z)) on 50 probes", || {
                max_curve_residual(j, &poly)
            });
        }
        Err(e) => doc.checks.push(Check::failed("spectral_curve_total_degree", 0.0, e.to_string())),
    }

    // independent of the configured coupling: the series must match the solver at small λ
    let small = 0.01;
    bound_check(doc, "series_consistency", args.tol(1e-8), "order-6 series against the solver at lambda = 0.01", || {
        let coeffs = perturbative_series(&config.spectrum, 6)?;
        let resummed = coeffs.resum(small, 6);
        let model = solve(config, small).map_err(|e| match e {
            CliError::Compute(c) => c,
            other => CoreError::InvalidArgument(other.to_string()),
        })?;
        Ok(resummed
            .iter()
            .flatten()
            .zip(model.model.g0_matrix().entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    });

    if config.lambda > 0.0 {
        match quadrature_g(j, 0, d - 1, &QuadratureOptions::default()) {
            Ok(q) => doc.checks.push(Check::bound(
                "quadrature_agreement",
                (q.value - g.entries[0][d - 1]).abs(),
                args.tol(1e-6),
                "contour integral for G(e_1, e_d)",
            )),
            Err(e @ CoreError::BranchCrossing { .. }) => {
                doc.notes.push(format!("quadrature check skipped, coupling outside its domain: {e}"))
            }
            Err(e) => doc.checks.push(Check::failed("quadrature_agreement", args.tol(1e-6), e.to_string())),
        }
    }

    if d == 1 {
        let mu_sq = 2.0 * config.spectrum.eigenvalues()[0];
        match one_matrix_closed_form(mu_sq, config.lambda) {
            Ok(cf) => {
                let rho_over_n = s.deformed.rhos[0] / config.spectrum.matrix_size() as f64;
                let gap = (cf.epsilon1 - s.deformed.epsilons[0])
                    .abs()
                    .max((cf.rho1_over_n - rho_over_n).abs())
                    .max((cf.g11 - g.entries[0][0]).abs());
                doc.checks.push(Check::bound("closed_form", gap, args.tol(1e-9), "one-eigenvalue closed form"));
            }
            Err(e) => doc.checks.push(Check::failed("closed_form", args.tol(1e-9), e.to_string())),
        }
    }

    doc.notes.push("Monte Carlo is not part of verify; run mc-check".into());
    doc.deformed = Some(s.deformed);
    Ok(())
}
