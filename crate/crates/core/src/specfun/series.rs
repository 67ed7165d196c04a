//! Compensated summation of gamma-weighted power series.

use num_complex::Complex64;

use super::gamma::ln_gamma_signed;
use super::SpecFunError;

/// Result of a series summation together with its rounding diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Bound on the accumulated rounding error (absolute).
    pub error_bound: f64,
    /// Largest term magnitude encountered.
    pub max_term: f64,
    /// Magnitude of the first nonzero term.
    pub first_term: f64,
    pub terms: usize,
}

impl SeriesValue {
    pub fn is_precise(&self, rel: f64) -> bool {
        self.error_bound <= rel * self.value.norm()
    }

    /// Cancellation that is explained by a zero crossing of the sum rather
    /// than by large intermediate terms.
    pub fn cancellation_benign(&self) -> bool {
        self.max_term <= 1e4 * self.value.norm().max(self.first_term)
    }
}

/// Neumaier compensated sum for complex values.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Compensated {
    pub(crate) fn add(&mut self, x: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, x.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// A single series term together with its relative rounding error.
pub(crate) struct Term {
    pub value: Complex64,
    pub rel_err: f64,
}

pub(crate) const MAX_TERMS: usize = 100_000;
const STOP_REL: f64 = 1e-17;

/// Sums `term(k)` for k = 0, 1, ... until three consecutive terms are
/// negligible against the running sum, but never before `min_k`.
///
/// `term` returns `None` for terms that vanish identically (reciprocal
/// gamma at a pole).
pub(crate) fn sum_terms<F>(mut term: F, min_k: usize) -> Result<SeriesValue, SpecFunError>
where
    F: FnMut(usize) -> Result<Option<Term>, SpecFunError>,
{
    let mut acc = Compensated::default();
    let mut err = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut max_term = 0.0f64;
    let mut first_term = 0.0f64;
    let mut small_run = 0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let t = term(k)?;
        let mag = match t {
            Some(Term { value, rel_err }) => {
                if !(value.re.is_finite() && value.im.is_finite()) {
                    return Err(SpecFunError::NonConvergent(format!(
                        "term {k} is not finite"
                    )));
                }
                acc.add(value);
                let m = value.norm();
                err += m * rel_err;
                abs_sum += m;
                m
            }
            None => 0.0,
        };
        if first_term == 0.0 {
            first_term = mag;
        }
        max_term = max_term.max(mag);
        let s = acc.value().norm();
        let negligible = (mag <= STOP_REL * s && mag <= prev) || (mag == 0.0 && s == 0.0);
        if negligible {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if mag > 0.0 {
            prev = mag;
        }
        if small_run >= 3 && k >= min_k {
            return Ok(SeriesValue {
                value: acc.value(),
                error_bound: err + 2.0 * f64::EPSILON * abs_sum,
                max_term,
                first_term,
                terms: k + 1,
            });
        }
    }
    Err(SpecFunError::NonConvergent(format!(
        "no convergence after {MAX_TERMS} terms"
    )))
}

/// z^k with exact signs on the real axis; `ln|z|` and `arg z` precomputed.
pub(crate) struct PowerOf {
    z: Complex64,
    ln_abs: f64,
    arg: f64,
}

impl PowerOf {
    pub(crate) fn new(z: Complex64) -> Self {
        Self {
            z,
            ln_abs: z.norm().ln(),
            arg: z.arg(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.z.re == 0.0 && self.z.im == 0.0
    }

    pub(crate) fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    /// Unit phase of z^k.
    pub(crate) fn phase(&self, k: usize) -> Complex64 {
        if self.z.im == 0.0 {
            if self.z.re < 0.0 && k % 2 == 1 {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            let th = self.arg * k as f64;
            Complex64::new(th.cos(), th.sin())
        }
    }
}

/// Term k of Σ Π Γ(a_i + α_i k) / Π Γ(b_j + β_j k) · z^k / k!.
///
/// Returns `None` when a lower gamma is at a pole. A pole in an upper gamma
/// is an error.
pub(crate) fn gamma_ratio_term(
    upper: &[(f64, f64)],
    lower: &[(f64, f64)],
    with_factorial: bool,
    zp: &PowerOf,
    k: usize,
) -> Result<Option<Term>, SpecFunError> {
    if k > 0 && zp.is_zero() {
        return Ok(None);
    }
    let kf = k as f64;
    let mut ln_mag = 0.0;
    let mut sign = 1.0;
    let mut ln_budget = 4.0;
    for &(a, al) in upper {
        let (l, s) = ln_gamma_signed(a + al * kf)?;
        ln_mag += l;
        sign *= s;
        ln_budget += l.abs();
    }
    for &(b, be) in lower {
        match ln_gamma_signed(b + be * kf) {
            Ok((l, s)) => {
                ln_mag -= l;
                sign *= s;
                ln_budget += l.abs();
            }
            Err(SpecFunError::Pole { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    if with_factorial {
        let l = ln_gamma_signed(kf + 1.0)?.0;
        ln_mag -= l;
        ln_budget += l;
    }
    if k > 0 {
        ln_mag += kf * zp.ln_abs();
        ln_budget += (kf * zp.ln_abs()).abs();
    }
    if ln_mag > 709.0 {
        return Err(SpecFunError::NonConvergent(format!(
            "term {k} overflows (log magnitude {ln_mag:.1})"
        )));
    }
    let value = zp.phase(k) * (sign * ln_mag.exp());
    Ok(Some(Term {
        value,
        rel_err: f64::EPSILON * ln_budget,
    }))
}

/// Index beyond which the terms of a series with growth index `delta` and
/// ratio constant `m` decrease at |z|.
pub(crate) fn peak_index(abs_z: f64, m: f64, delta: f64) -> usize {
    if delta <= -1.0 || abs_z == 0.0 {
        return 0;
    }
    let k = (abs_z * m).powf(1.0 / (1.0 + delta));
    if k.is_finite() {
        (k.ceil() as usize).saturating_add(2).min(MAX_TERMS / 2)
    } else {
        MAX_TERMS / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_addends() {
        let mut c = Compensated::default();
        c.add(Complex64::new(1.0, 0.0));
        for _ in 0..10 {
            c.add(Complex64::new(1e-17, 0.0));
        }
        c.add(Complex64::new(-1.0, 0.0));
        assert!((c.value().re - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn exponential_series() {
        let zp = PowerOf::new(Complex64::new(1.0, 0.0));
        let s = sum_terms(|k| gamma_ratio_term(&[], &[], true, &zp, k), 0).unwrap();
        assert!((s.value.re - std::f64::consts::E).abs() < 1e-15);
        assert!(s.is_precise(1e-14));
    }

    #[test]
    fn alternating_cancellation_is_flagged() {
        // e^{-30}: terms up to ~1e12, value ~1e-13
        let zp = PowerOf::new(Complex64::new(-30.0, 0.0));
        let s = sum_terms(|k| gamma_ratio_term(&[], &[], true, &zp, k), 30).unwrap();
        assert!(!s.is_precise(1e-10));
        assert!(!s.cancellation_benign());
    }

    #[test]
    fn zero_argument_stops_quickly() {
        let zp = PowerOf::new(Complex64::new(0.0, 0.0));
        let s = sum_terms(|k| gamma_ratio_term(&[], &[(2.0, 1.0)], false, &zp, k), 0).unwrap();
        assert_eq!(s.value.re, 1.0);
        assert!(s.terms <= 4);
    }
}
