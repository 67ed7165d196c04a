//! Wright and generalized Wright functions.

use num_complex::Complex64;

use super::foxh::{fox_h_contour_tol, FoxHSpec};
use super::series::{gamma_ratio_term, peak_index, sum_terms, PowerOf, SeriesValue};
use super::SpecFunError;

/// Parameter block of a generalized Wright function pΨq.
#[derive(Debug, Clone, PartialEq)]
pub struct GenWrightSpec {
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    /// Σβ_j − Σα_i
    pub delta: f64,
    /// Radius of convergence (infinite when Δ > −1).
    pub radius: f64,
}

const DELTA_SNAP: f64 = 1e-12;

impl GenWrightSpec {
    pub fn new(upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> Result<Self, SpecFunError> {
        for &(a, al) in upper.iter().chain(lower.iter()) {
            if !(a.is_finite() && al.is_finite()) || al == 0.0 {
                return Err(SpecFunError::InvalidSpec(format!(
                    "parameter pair ({a}, {al}) needs finite entries and a nonzero scale"
                )));
            }
        }
        let delta = lower.iter().map(|x| x.1).sum::<f64>() - upper.iter().map(|x| x.1).sum::<f64>();
        if delta < -1.0 - DELTA_SNAP {
            return Err(SpecFunError::DivergentSpec { delta });
        }
        let radius = if (delta + 1.0).abs() <= DELTA_SNAP {
            (-ln_ratio_constant(&upper, &lower)).exp()
        } else {
            f64::INFINITY
        };
        Ok(Self {
            upper,
            lower,
            delta,
            radius,
        })
    }

    fn is_boundary(&self) -> bool {
        (self.delta + 1.0).abs() <= DELTA_SNAP
    }

    /// Fox H form of z ↦ pΨq(−z), where it exists with ρ > 0.
    fn negative_axis_h(&self) -> Option<FoxHSpec> {
        let mut up = Vec::new();
        for &(a, al) in &self.upper {
            if al <= 0.0 || a <= 0.0 {
                return None;
            }
            up.push((1.0 - a, al));
        }
        let l = up.len();
        let mut low = vec![(0.0, 1.0)];
        for &(b, be) in &self.lower {
            if be < 0.0 {
                up.push((b, -be));
            } else {
                low.push((1.0 - b, be));
            }
        }
        let spec = FoxHSpec::new(1, l, up, low).ok()?;
        (spec.rho > 0.0).then_some(spec)
    }
}

/// ln(Π|α_i|^{α_i} / Π|β_j|^{β_j}): asymptotic term-ratio constant.
fn ln_ratio_constant(upper: &[(f64, f64)], lower: &[(f64, f64)]) -> f64 {
    upper.iter().map(|&(_, a)| a * a.abs().ln()).sum::<f64>()
        - lower.iter().map(|&(_, b)| b * b.abs().ln()).sum::<f64>()
}

fn check_radius(spec: &GenWrightSpec, z: Complex64) -> Result<(), SpecFunError> {
    if spec.is_boundary() && z.norm() >= spec.radius {
        return Err(SpecFunError::OutsideRadius {
            abs_z: z.norm(),
            radius: spec.radius,
        });
    }
    Ok(())
}

/// Raw compensated series of pΨq at z with its rounding diagnostics.
pub fn gen_wright_detailed(spec: &GenWrightSpec, z: Complex64) -> Result<SeriesValue, SpecFunError> {
    check_radius(spec, z)?;
    let zp = PowerOf::new(z);
    let m = ln_ratio_constant(&spec.upper, &spec.lower).exp();
    let min_k = peak_index(z.norm(), m, spec.delta);
    sum_terms(
        |k| gamma_ratio_term(&spec.upper, &spec.lower, true, &zp, k),
        min_k,
    )
}

/// Generalized Wright function pΨq at z.
///
/// The compensated series is used when its rounding bound is below 1e-13
/// relative. On the negative real axis a cancelling series is replaced by
/// the equivalent Mellin–Barnes integral.
pub fn gen_wright(spec: &GenWrightSpec, z: Complex64) -> Result<Complex64, SpecFunError> {
    let s = gen_wright_detailed(spec, z);
    if let Ok(s) = &s {
        if s.is_precise(1e-13) {
            return Ok(s.value);
        }
    }
    if z.im == 0.0 && z.re < 0.0 {
        if let Some(h) = spec.negative_axis_h() {
            if let Ok(v) = fox_h_contour_tol(&h, -z.re, 1e-13) {
                return Ok(Complex64::new(v, 0.0));
            }
        }
    }
    accept_or_fail(s?)
}

pub(crate) fn accept_or_fail(s: SeriesValue) -> Result<Complex64, SpecFunError> {
    if s.is_precise(1e-10) || s.cancellation_benign() {
        Ok(s.value)
    } else {
        Err(SpecFunError::PrecisionLoss {
            value: s.value.norm(),
            bound: s.error_bound,
        })
    }
}

/// Whether Ψ(−x; a, b), −1 < a < 0, is below the smallest subnormal.
///
/// Ψ(−x; −ν, b) ~ C x^κ exp(−σ x^{1/(1−ν)}) with σ = (1−ν)ν^{ν/(1−ν)};
/// the cutoff leaves a wide margin for C x^κ.
fn underflows_negative_axis(x: f64, a: f64, b: f64) -> bool {
    let nu = -a;
    let e = 1.0 / (1.0 - nu);
    let sigma = (1.0 - nu) * nu.powf(nu * e);
    let decay = sigma * x.powf(e);
    let algebraic = (1.0 + b.abs()) * e * x.ln().abs() + 50.0;
    decay > 745.0 + algebraic
}

/// Wright function Ψ(z; a, b) = Σ z^k / (Γ(b + a k) k!), defined for a > −1.
pub fn wright(z: Complex64, a: f64, b: f64) -> Result<Complex64, SpecFunError> {
    if !(a > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(SpecFunError::InvalidParameter(format!(
            "Wright function needs a > -1 and finite b, got a = {a}, b = {b}"
        )));
    }
    if z.im == 0.0 && z.re < 0.0 && a < 0.0 && underflows_negative_axis(-z.re, a, b) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let zp = PowerOf::new(z);
    let lower = [(b, a)];
    let m = if a == 0.0 { 1.0 } else { (-a * a.abs().ln()).exp() };
    let s = sum_terms(
        |k| gamma_ratio_term(&[], &lower, true, &zp, k),
        peak_index(z.norm(), m, a),
    );
    if let Ok(s) = &s {
        if s.is_precise(1e-13) {
            return Ok(s.value);
        }
    }
    if z.im == 0.0 && z.re < 0.0 && a != 0.0 {
        let h = if a < 0.0 {
            FoxHSpec::new(1, 0, vec![(b, -a)], vec![(0.0, 1.0)])
        } else {
            FoxHSpec::new(1, 0, vec![], vec![(0.0, 1.0), (1.0 - b, a)])
        };
        if let Ok(h) = h {
            if h.rho > 0.0 {
                if let Ok(v) = fox_h_contour_tol(&h, -z.re, 1e-13) {
                    return Ok(Complex64::new(v, 0.0));
                }
            }
        }
    }
    accept_or_fail(s?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn delta_and_radius() {
        let s = GenWrightSpec::new(vec![(1.0, 1.0), (1.0, 1.0)], vec![(1.0, 1.0)]).unwrap();
        assert_eq!(s.delta, -1.0);
        assert!((s.radius - 1.0).abs() < 1e-15);
        let s = GenWrightSpec::new(vec![(1.0, 2.0)], vec![(1.0, 1.0)]).unwrap();
        assert!((s.radius - 0.25).abs() < 1e-15);
        assert!(matches!(
            GenWrightSpec::new(vec![(1.0, 1.0), (1.0, 1.5)], vec![(1.0, 1.0)]),
            Err(SpecFunError::DivergentSpec { .. })
        ));
        assert!(GenWrightSpec::new(vec![], vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn exponential_from_one_psi_one() {
        let s = GenWrightSpec::new(vec![(1.0, 1.0)], vec![(1.0, 1.0)]).unwrap();
        let v = gen_wright(&s, c(1.0)).unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn boundary_spec_radius_guard() {
        let s = GenWrightSpec::new(vec![(1.0, 1.0), (1.0, 1.0)], vec![(1.0, 1.0)]).unwrap();
        assert!(matches!(
            gen_wright(&s, c(1.0)),
            Err(SpecFunError::OutsideRadius { .. })
        ));
        // Σ k! z^k / k! = 1/(1−z)
        let v = gen_wright(&s, c(0.25)).unwrap();
        assert!((v.re - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn wright_leading_term_and_bessel() {
        let v = wright(c(0.0), 0.7, 2.5).unwrap();
        assert!((v.re - 1.0 / super::super::gamma(2.5)).abs() < 1e-15);
        let v = wright(c(1.0), 1.0, 1.0).unwrap();
        assert!((v.re - 2.279_585_302_336_067).abs() < 1e-14);
        assert!(wright(c(1.0), -1.0, 1.0).is_err());
    }

    #[test]
    fn m_wright_profile_on_the_negative_axis() {
        // Ψ(−x; −1/2, 1) = erfc(x/2)
        // reference values from a 30-digit evaluation of erfc
        let cases = [
            (0.5, 0.723_673_609_831_763_1),
            (2.0, 0.157_299_207_050_285_13),
            (6.0, 2.209_049_699_858_544e-5),
            (12.0, 2.151_973_671_249_891_3e-17),
        ];
        for &(x, e) in &cases {
            let v = wright(c(-x), -0.5, 1.0).unwrap().re;
            assert!((v - e).abs() <= 1e-12 * e.max(1e-300) + 1e-15, "x={x}: {v} vs {e}");
        }
    }
}
