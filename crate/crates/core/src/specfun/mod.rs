//! Special functions: complex gamma, Mittag-Leffler, Wright, generalized
//! Wright and Fox H.
//!
//! Every series evaluator carries an explicit convergence guard. Values
//! that cannot be delivered to the advertised accuracy are reported as
//! errors instead of being silently truncated.

mod foxh;
mod gamma;
mod mittag_leffler;
pub(crate) mod series;
mod wright;

use thiserror::Error;

pub use foxh::{
    fox_h_contour, fox_h_contour_tol, fox_h_residues, fox_h_residues_detailed, FoxHSpec,
    ResidueDomain, ResidueSum,
};
pub use gamma::{
    cospi, digamma, gamma, gamma_complex, gamma_ln, ln_gamma, ln_gamma_signed, nonpositive_integer,
    rgamma, rgamma_complex, sinpi, POLE_SNAP,
};
pub use mittag_leffler::mittag_leffler;
pub use series::SeriesValue;
pub use wright::{gen_wright, gen_wright_detailed, wright, GenWrightSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("gamma function pole at {at}")]
    Pole { at: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("divergent generalized Wright spec: delta = {delta} < -1")]
    DivergentSpec { delta: f64 },
    #[error("argument |z| = {abs_z} outside the radius of convergence {radius} (delta = -1)")]
    OutsideRadius { abs_z: f64, radius: f64 },
    #[error("series did not converge: {0}")]
    NonConvergent(String),
    #[error("precision loss: error bound {bound:e} exceeds tolerance for value {value:e}")]
    PrecisionLoss { value: f64, bound: f64 },
    #[error("Mellin-Barnes integral diverges: rho = {rho} <= 0")]
    ConvergenceViolation { rho: f64 },
    #[error("contour quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("coincident poles in the residue sum near s = {at}")]
    RepeatedPoles { at: f64 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

/// Drops a negligible imaginary part (`|Im| <= 1e-12 |Re|`).
pub fn real_part_if_real(z: num_complex::Complex64) -> Option<f64> {
    if z.im.abs() <= 1e-12 * z.re.abs() || z.im == 0.0 {
        Some(z.re)
    } else {
        None
    }
}
