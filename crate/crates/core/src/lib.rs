//! Planar sector of the quartic Kontsevich-type matrix model
//! `exp(-N Tr(E Φ² + (λ/4) Φ⁴))` with a finite spectrum `E`.
//!
//! The pipeline: [`solve_deformation`] turns the spectrum into the data of a
//! rational function [`RationalJ`]; [`PlanarModel`] evaluates the planar
//! two-point function from it; [`CylinderSolver`] and [`spectral_curve`]
//! give the cylinder amplitude and the algebraic curve. [`oracles`] holds
//! independent checks.

pub mod bivariate;
pub mod curve;
pub mod cylinder;
pub mod error;
pub mod oracles;
pub mod poly;
pub mod spectrum;
pub mod two_point;

pub use bivariate::{spectral_curve, BivariatePoly, SpectralCurvePoly};
pub use curve::{basic_lemma_sum, PreimageSet, RamificationPoints, RationalJ};
pub use cylinder::{cylinder_boundary_values, g0_cylinder, Branch, CylinderBoundaryValues, CylinderSolver};
pub use error::{Error, Result};
pub use spectrum::{
    continuation_path, deformation_residual, solve_deformation, Coupling, DeformedSpectrum, SolverOptions, Spectrum,
};
pub use two_point::{rel_diff, PlanarAmplitude, PlanarModel, Representation, TwoPointMatrix};
