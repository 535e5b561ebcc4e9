//! Independent checks of the planar solution: closed forms, perturbation
//! theory, contour quadrature, the Lambert-W limit and Monte Carlo.

pub mod closed_form;
pub mod lambert;
pub mod monte_carlo;
pub mod pade;
pub mod quadrature;
pub mod series;

pub use closed_form::{one_matrix_closed_form, OneMatrixClosedForm};
pub use lambert::{lambert_w0, lambert_w0_exp};
pub use monte_carlo::{monte_carlo_moment, MCEstimate, MCOptions};
pub use pade::{j2_inverse, lambert_pade_check, pade_log, PadeCheck, PadeLog};
pub use quadrature::{quadrature_g, QuadratureOptions, QuadratureResult};
pub use series::{perturbative_series, SeriesCoefficients};
