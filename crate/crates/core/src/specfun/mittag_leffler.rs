//! Two-parameter Mittag-Leffler function E_{α,β}(z).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::foxh::{fox_h_contour_tol, FoxHSpec};
use super::gamma::rgamma;
use super::series::{gamma_ratio_term, peak_index, sum_terms, PowerOf};
use super::wright::accept_or_fail;
use super::SpecFunError;
use crate::quad::exp_sinh;

/// Largest |z| served; beyond it the series strategy is not trusted.
pub const MAX_ABS_Z: f64 = 50.0;

/// E_{α,β}(z) = Σ z^k / Γ(αk + β) for α > 0.
///
/// The compensated power series is tried first. When its rounding bound
/// exceeds 1e-13 relative, two integral representations take over: the
/// real-line integral valid for 0 < α < 1 and |arg z| > απ, and the
/// Mellin–Barnes integral on the negative real axis for α < 2.
pub fn mittag_leffler(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if !(alpha > 0.0 && alpha.is_finite()) || !beta.is_finite() {
        return Err(SpecFunError::InvalidParameter(format!(
            "Mittag-Leffler needs alpha > 0 and finite beta, got ({alpha}, {beta})"
        )));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecFunError::InvalidParameter(format!("non-finite argument {z}")));
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(rgamma(beta), 0.0));
    }
    if z.norm() > MAX_ABS_Z {
        return Err(SpecFunError::NonConvergent(format!(
            "|z| = {} exceeds the supported range {MAX_ABS_Z}",
            z.norm()
        )));
    }
    let zp = PowerOf::new(z);
    let lower = [(beta, alpha)];
    let m = (-alpha * alpha.ln()).exp();
    let s = sum_terms(
        |k| gamma_ratio_term(&[], &lower, false, &zp, k),
        peak_index(z.norm(), m, alpha - 1.0),
    )?;
    if s.is_precise(1e-13) {
        return Ok(s.value);
    }
    if alpha < 1.0 && z.arg().abs() > alpha * PI + 1e-3 {
        if let Ok(v) = line_integral(alpha, beta, z) {
            return Ok(v);
        }
    }
    if z.im == 0.0 && z.re < 0.0 && alpha < 2.0 {
        let h = FoxHSpec::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 1.0), (1.0 - beta, alpha)])?;
        if let Ok(v) = fox_h_contour_tol(&h, -z.re, 1e-13) {
            return Ok(Complex64::new(v, 0.0));
        }
    }
    accept_or_fail(s)
}

/// Real-line integral representation for 0 < α < 1, |arg z| > απ.
///
/// For β ≥ 1 + α the recurrence E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α))/z
/// first lowers β into the admissible range.
fn line_integral(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if beta >= 1.0 + alpha {
        let inner = line_integral(alpha, beta - alpha, z)?;
        return Ok((inner - rgamma(beta - alpha)) / z);
    }
    let s1 = (PI * (1.0 - beta)).sin();
    let s2 = (PI * (1.0 - beta + alpha)).sin();
    let ca = (alpha * PI).cos();
    let p = (1.0 - beta) / alpha;
    let inv = 1.0 / alpha;
    let pref = 1.0 / (alpha * PI);
    let k = |chi: f64| -> Complex64 {
        let w = chi.powf(p) * (-chi.powf(inv)).exp();
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let num = chi * s1 - z * s2;
        let den = chi * chi - 2.0 * chi * z * ca + z * z;
        num / den * (pref * w)
    };
    exp_sinh(k, 1e-14).map_err(|e| SpecFunError::QuadratureFailure(e.to_string()))
}
