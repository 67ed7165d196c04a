//! Fox H-function on the positive real axis.
//!
//! Convention:
//!
//! ```text
//! H^{m,l}_{p,q}[z] = 1/(2πi) ∫_L  Π_{j≤m} Γ(b_j − β_j s) Π_{i≤l} Γ(1 − a_i + α_i s)
//!                               / (Π_{i>l} Γ(a_i − α_i s) Π_{j>m} Γ(1 − b_j + β_j s)) · z^s ds
//! ```
//!
//! Two independent evaluators are provided: quadrature along a vertical
//! line ([`fox_h_contour`]) and the sum of residues at the poles of the
//! first gamma group ([`fox_h_residues`]).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{digamma, gamma_ln, ln_gamma_signed, nonpositive_integer};
use super::series::Compensated;
use super::SpecFunError;

#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    pub m: usize,
    pub l: usize,
    pub p: usize,
    pub q: usize,
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    pub rho: f64,
    pub nu: f64,
    pub delta_growth: f64,
    pub mu_growth: f64,
    /// Default contour abscissa, strictly between the two pole families.
    pub gamma_line: f64,
}

impl FoxHSpec {
    pub fn new(
        m: usize,
        l: usize,
        upper: Vec<(f64, f64)>,
        lower: Vec<(f64, f64)>,
    ) -> Result<Self, SpecFunError> {
        let p = upper.len();
        let q = lower.len();
        if m > q || l > p {
            return Err(SpecFunError::InvalidSpec(format!(
                "need m <= q and l <= p, got m={m}, q={q}, l={l}, p={p}"
            )));
        }
        if m == 0 && l == 0 {
            return Err(SpecFunError::InvalidSpec("(m, l) = (0, 0)".into()));
        }
        for &(a, al) in upper.iter().chain(lower.iter()) {
            if !(a.is_finite() && al.is_finite() && al > 0.0) {
                return Err(SpecFunError::InvalidSpec(format!(
                    "parameter pair ({a}, {al}) needs a finite shift and positive scale"
                )));
            }
        }
        let rho = upper[..l].iter().map(|x| x.1).sum::<f64>()
            - upper[l..].iter().map(|x| x.1).sum::<f64>()
            + lower[..m].iter().map(|x| x.1).sum::<f64>()
            - lower[m..].iter().map(|x| x.1).sum::<f64>();
        let nu = lower.iter().map(|x| x.1).sum::<f64>() - upper.iter().map(|x| x.1).sum::<f64>();
        let delta_growth = lower.iter().map(|x| x.0).sum::<f64>()
            - upper.iter().map(|x| x.0).sum::<f64>()
            + (p as f64 - q as f64) / 2.0;
        let ln_mu = upper.iter().map(|&(_, a)| a * a.ln()).sum::<f64>()
            - lower.iter().map(|&(_, b)| b * b.ln()).sum::<f64>();
        let right = lower[..m]
            .iter()
            .map(|&(b, be)| b / be)
            .fold(f64::INFINITY, f64::min);
        let left = upper[..l]
            .iter()
            .map(|&(a, al)| (a - 1.0) / al)
            .fold(f64::NEG_INFINITY, f64::max);
        if left >= right {
            return Err(SpecFunError::InvalidSpec(format!(
                "pole families overlap: left poles reach {left}, right poles start at {right}"
            )));
        }
        let gamma_line = if l == 0 {
            right - 0.5
        } else if m == 0 {
            left + 0.5
        } else if right - left >= 0.75 {
            right - 0.5
        } else {
            0.5 * (left + right)
        };
        Ok(Self {
            m,
            l,
            p,
            q,
            upper,
            lower,
            rho,
            nu,
            delta_growth,
            mu_growth: ln_mu.exp(),
            gamma_line,
        })
    }

    /// ln of the integrand at s; `None` where a reciprocal gamma vanishes.
    fn ln_integrand(&self, s: Complex64, ln_z: f64) -> Result<Option<Complex64>, SpecFunError> {
        let one = Complex64::new(1.0, 0.0);
        let mut acc = s * ln_z;
        for &(b, be) in &self.lower[..self.m] {
            acc += gamma_ln(b - be * s)?;
        }
        for &(a, al) in &self.upper[..self.l] {
            acc += gamma_ln(one - a + al * s)?;
        }
        for &(a, al) in &self.upper[self.l..] {
            match gamma_ln(a - al * s) {
                Ok(g) => acc -= g,
                Err(SpecFunError::Pole { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        for &(b, be) in &self.lower[self.m..] {
            match gamma_ln(one - b + be * s) {
                Ok(g) => acc -= g,
                Err(SpecFunError::Pole { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(acc))
    }

    /// d/dσ ln|integrand| on the real axis, for the l = 0, q = m layout.
    fn ln_slope(&self, sigma: f64, ln_z: f64) -> f64 {
        let mut d = ln_z;
        for &(b, be) in &self.lower {
            d -= be * digamma(b - be * sigma);
        }
        for &(a, al) in &self.upper {
            d += al * digamma(a - al * sigma);
        }
        d
    }

    /// Contour abscissa used at argument z.
    ///
    /// With l = 0 and no reciprocal gammas of the second lower group, the
    /// line is moved left to the real saddle point of the integrand when
    /// that lies left of [`FoxHSpec::gamma_line`]. This keeps exponentially
    /// small values (large z) free of cancellation.
    pub fn contour_abscissa(&self, z: f64) -> f64 {
        let g0 = self.gamma_line;
        if self.l != 0 || self.q != self.m || self.nu <= 0.0 {
            return g0;
        }
        // zeros of 1/Γ(a_i − α_i σ) sit at σ >= a_i/α_i
        let zero_free = self.upper.iter().all(|&(a, al)| a / al >= g0 + 0.25);
        if !zero_free {
            return g0;
        }
        let ln_z = z.ln();
        if self.ln_slope(g0, ln_z) <= 0.0 {
            return g0;
        }
        let mut hi = g0;
        let mut width = 1.0;
        let mut lo = g0 - width;
        let mut guard = 0;
        while self.ln_slope(lo, ln_z) > 0.0 {
            hi = lo;
            width *= 2.0;
            lo = g0 - width;
            guard += 1;
            if guard > 60 {
                return g0;
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.ln_slope(mid, ln_z) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

const DEFAULT_TOL: f64 = 1e-12;

/// Contour evaluation of H at z > 0 with relative tolerance 1e-12.
pub fn fox_h_contour(spec: &FoxHSpec, z: f64) -> Result<f64, SpecFunError> {
    fox_h_contour_tol(spec, z, DEFAULT_TOL)
}

/// Contour evaluation of H at z > 0 with a caller-chosen relative tolerance.
pub fn fox_h_contour_tol(spec: &FoxHSpec, z: f64, tol: f64) -> Result<f64, SpecFunError> {
    if spec.rho <= 0.0 {
        return Err(SpecFunError::ConvergenceViolation { rho: spec.rho });
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(SpecFunError::InvalidParameter(format!(
            "Fox H evaluation needs a positive finite argument, got {z}"
        )));
    }
    let ln_z = z.ln();
    let gamma = spec.contour_abscissa(z);
    // scale everything by the modulus at y = 0
    let ln_scale = match spec.ln_integrand(Complex64::new(gamma, 0.0), ln_z)? {
        Some(l) => l.re,
        None => spec
            .ln_integrand(Complex64::new(gamma, 1e-3), ln_z)?
            .map(|l| l.re)
            .unwrap_or(0.0),
    };
    let f = |y: f64| -> Result<f64, SpecFunError> {
        Ok(match spec.ln_integrand(Complex64::new(gamma, y), ln_z)? {
            Some(l) => (l - ln_scale).exp().re,
            None => 0.0,
        })
    };
    let fabs = |y: f64| -> Result<f64, SpecFunError> {
        Ok(match spec.ln_integrand(Complex64::new(gamma, y), ln_z)? {
            Some(l) => (l.re - ln_scale).exp(),
            None => 0.0,
        })
    };
    let decay = PI * spec.rho / 2.0;
    let tail_bound = |y: f64| -> Result<f64, SpecFunError> { Ok(fabs(y)? / decay) };

    // truncation point: tail below 1e-3·tol of the largest sampled modulus
    let mut t_max = 4.0f64;
    let mut peak = fabs(0.0)?.max(f64::MIN_POSITIVE);
    loop {
        let probe = fabs(0.5 * t_max)?;
        peak = peak.max(probe);
        if tail_bound(t_max)? <= 1e-3 * tol * peak {
            break;
        }
        t_max *= 2.0;
        if t_max > 1.0e5 {
            return Err(SpecFunError::QuadratureFailure(format!(
                "integrand tail not below tolerance at |Im s| = {t_max}"
            )));
        }
    }
    // |H| <= peak·t_max·e^{ln_scale}/π plus the tail: below the smallest subnormal
    if ln_scale + (2.0 * peak * t_max / PI).ln() < -746.0 {
        return Ok(0.0);
    }

    loop {
        let (value, mass) = trapezoid(&f, t_max, tol)?;
        // a value much smaller than the sampled peak needs a longer line
        if tail_bound(t_max)? <= 1e-3 * tol * value.abs() || tail_bound(t_max)? <= 1e-18 * mass {
            let out = value / PI * ln_scale.exp();
            if !out.is_finite() {
                return Err(SpecFunError::QuadratureFailure(format!(
                    "non-finite result (log scale {ln_scale})"
                )));
            }
            return Ok(out);
        }
        t_max *= 2.0;
        if t_max > 1.0e5 {
            return Err(SpecFunError::QuadratureFailure(format!(
                "tail control not achieved up to |Im s| = {t_max}"
            )));
        }
    }
}

/// Trapezoid rule for ∫_0^T f(y) dy of an even integrand, halving the step
/// until successive levels agree to `tol`. Returns (value, ∫|f|).
fn trapezoid<F>(f: &F, t_max: f64, tol: f64) -> Result<(f64, f64), SpecFunError>
where
    F: Fn(f64) -> Result<f64, SpecFunError>,
{
    let mut h = 0.25f64;
    let n = (t_max / h).ceil() as usize;
    let h0 = t_max / n as f64;
    h = h0;
    let mut sum = Compensated::default();
    let mut abs = 0.0;
    let f0 = f(0.0)?;
    sum.add(Complex64::new(0.5 * f0, 0.0));
    abs += 0.5 * f0.abs();
    for k in 1..=n {
        let v = f(k as f64 * h)?;
        let w = if k == n { 0.5 } else { 1.0 };
        sum.add(Complex64::new(w * v, 0.0));
        abs += w * v.abs();
    }
    let mut estimate = sum.value().re * h;
    let mut count = n;
    for _ in 0..14 {
        for k in 0..count {
            let v = f((k as f64 + 0.5) * h)?;
            sum.add(Complex64::new(v, 0.0));
            abs += v.abs();
        }
        count *= 2;
        h *= 0.5;
        let next = sum.value().re * h;
        let mass = abs * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * next.abs() || diff <= 64.0 * f64::EPSILON * mass {
            return Ok((estimate, mass));
        }
    }
    Err(SpecFunError::QuadratureFailure(format!(
        "trapezoid rule did not settle at step {h:e}"
    )))
}

/// Convergence domain of the residue series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidueDomain {
    /// ν > 0: convergent for every z > 0.
    Entire,
    /// ν = 0: convergent for z < radius.
    Disk { radius: f64 },
    /// ν < 0: the residue series is only asymptotic.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueSum {
    pub value: f64,
    pub error_bound: f64,
    pub max_term: f64,
    pub poles: usize,
    pub domain: ResidueDomain,
}

/// Laurent data of one gamma factor around a pole location of the sum.
struct Factor {
    order: i32,
    ln_abs: f64,
    sign: f64,
    /// first-order coefficient divided by the leading one
    ratio: f64,
    ln_budget: f64,
}

/// Γ(x0 + c δ) (numerator) or 1/Γ(x0 + c δ) (denominator) expanded in δ.
fn laurent(x0: f64, c: f64, numerator: bool) -> Result<Factor, SpecFunError> {
    if let Some(n) = nonpositive_integer(x0) {
        let nf = n as f64;
        let ln_fact = ln_gamma_signed(nf + 1.0)?.0;
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let psi = digamma(nf + 1.0);
        if numerator {
            Ok(Factor {
                order: -1,
                ln_abs: -ln_fact - c.abs().ln(),
                sign: parity * c.signum(),
                ratio: c * psi,
                ln_budget: ln_fact,
            })
        } else {
            Ok(Factor {
                order: 1,
                ln_abs: ln_fact + c.abs().ln(),
                sign: parity * c.signum(),
                ratio: -c * psi,
                ln_budget: ln_fact,
            })
        }
    } else {
        let (l, s) = ln_gamma_signed(x0)?;
        let psi = digamma(x0);
        if numerator {
            Ok(Factor {
                order: 0,
                ln_abs: l,
                sign: s,
                ratio: c * psi,
                ln_budget: l.abs(),
            })
        } else {
            Ok(Factor {
                order: 0,
                ln_abs: -l,
                sign: s,
                ratio: -c * psi,
                ln_budget: l.abs(),
            })
        }
    }
}

/// Residue-series value of H at z > 0; errors when rounding swamps it.
pub fn fox_h_residues(spec: &FoxHSpec, z: f64) -> Result<f64, SpecFunError> {
    let r = fox_h_residues_detailed(spec, z)?;
    if r.error_bound > 1e-6 * r.value.abs() && r.error_bound > 1e-300 {
        return Err(SpecFunError::PrecisionLoss {
            value: r.value,
            bound: r.error_bound,
        });
    }
    Ok(r.value)
}

/// Sum of residues at the poles of Γ(b_j − β_j s), j ≤ m, with diagnostics.
///
/// Simple and double poles are supported; a double pole arises when two
/// first-group gammas share a pole without sharing their parameters.
pub fn fox_h_residues_detailed(spec: &FoxHSpec, z: f64) -> Result<ResidueSum, SpecFunError> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(SpecFunError::InvalidParameter(format!(
            "residue evaluation needs a positive finite argument, got {z}"
        )));
    }
    if spec.m == 0 {
        return Err(SpecFunError::InvalidSpec(
            "residue sum needs at least one first-group gamma (m >= 1)".into(),
        ));
    }
    let first = &spec.lower[..spec.m];
    for (i, x) in first.iter().enumerate() {
        for y in &first[i + 1..] {
            if (x.0 - y.0).abs() <= 1e-12 * x.0.abs().max(1.0)
                && (x.1 - y.1).abs() <= 1e-12 * x.1
            {
                return Err(SpecFunError::RepeatedPoles { at: x.0 / x.1 });
            }
        }
    }
    let domain = if spec.nu > 0.0 {
        ResidueDomain::Entire
    } else if spec.nu == 0.0 {
        ResidueDomain::Disk {
            radius: 1.0 / spec.mu_growth,
        }
    } else {
        ResidueDomain::Asymptotic
    };
    match domain {
        ResidueDomain::Asymptotic => {
            return Err(SpecFunError::NonConvergent(format!(
                "residue series diverges for nu = {} < 0",
                spec.nu
            )))
        }
        ResidueDomain::Disk { radius } if z >= radius => {
            return Err(SpecFunError::NonConvergent(format!(
                "z = {z} outside the residue-series disk of radius {radius}"
            )))
        }
        _ => {}
    }

    let ln_z = z.ln();
    let mut poles = PoleCursor::new(first);
    let mut acc = Compensated::default();
    let mut err = 0.0;
    let mut max_term = 0.0f64;
    let mut small_run = 0;
    let mut prev = f64::INFINITY;
    let mut count = 0;
    while count < 20_000 {
        let s0 = poles.next_location();
        count += 1;
        let mut factors = Vec::with_capacity(spec.p + spec.q);
        for &(b, be) in first {
            factors.push(laurent(b - be * s0, -be, true)?);
        }
        for &(a, al) in &spec.upper[..spec.l] {
            let f = laurent(1.0 - a + al * s0, al, true)?;
            if f.order != 0 {
                return Err(SpecFunError::InvalidSpec(format!(
                    "second pole family meets the first at s = {s0}"
                )));
            }
            factors.push(f);
        }
        for &(a, al) in &spec.upper[spec.l..] {
            factors.push(laurent(a - al * s0, -al, false)?);
        }
        for &(b, be) in &spec.lower[spec.m..] {
            factors.push(laurent(1.0 - b + be * s0, be, false)?);
        }
        let order: i32 = factors.iter().map(|f| f.order).sum();
        let mag = if order >= 0 {
            0.0
        } else if order < -2 {
            return Err(SpecFunError::RepeatedPoles { at: s0 });
        } else {
            let ln_abs = factors.iter().map(|f| f.ln_abs).sum::<f64>() + s0 * ln_z;
            let sign: f64 = factors.iter().map(|f| f.sign).product();
            let budget = 4.0 + (s0 * ln_z).abs() + factors.iter().map(|f| f.ln_budget).sum::<f64>();
            if ln_abs > 709.0 {
                return Err(SpecFunError::NonConvergent(format!(
                    "residue at s = {s0} overflows"
                )));
            }
            let mut residue = sign * ln_abs.exp();
            let mut rel = budget * f64::EPSILON;
            if order == -2 {
                let ratio_sum: f64 = factors.iter().map(|f| f.ratio).sum::<f64>() + ln_z;
                let ratio_abs: f64 =
                    factors.iter().map(|f| f.ratio.abs()).sum::<f64>() + ln_z.abs();
                residue *= ratio_sum;
                rel += 8.0 * f64::EPSILON * ratio_abs / ratio_sum.abs().max(f64::MIN_POSITIVE);
            }
            // closing to the right runs clockwise
            acc.add(Complex64::new(-residue, 0.0));
            err += residue.abs() * rel;
            residue.abs()
        };
        max_term = max_term.max(mag);
        let s = acc.value().re.abs();
        let negligible = (mag <= 1e-16 * s && mag <= prev) || (mag == 0.0 && s == 0.0 && count > 8);
        if negligible {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if mag > 0.0 {
            prev = mag;
        }
        if small_run >= 3 {
            return Ok(ResidueSum {
                value: acc.value().re,
                error_bound: err,
                max_term,
                poles: count,
                domain,
            });
        }
    }
    Err(SpecFunError::NonConvergent(
        "residue terms did not decay within 20000 poles".into(),
    ))
}

/// Walks the merged, ascending pole locations (b_j + k)/β_j.
struct PoleCursor<'a> {
    groups: &'a [(f64, f64)],
    next_k: Vec<u64>,
}

impl<'a> PoleCursor<'a> {
    fn new(groups: &'a [(f64, f64)]) -> Self {
        Self {
            groups,
            next_k: vec![0; groups.len()],
        }
    }

    fn location(&self, j: usize) -> f64 {
        let (b, be) = self.groups[j];
        (b + self.next_k[j] as f64) / be
    }

    /// Smallest pending location; advances every family sitting on it.
    fn next_location(&mut self) -> f64 {
        let s0 = (0..self.groups.len())
            .map(|j| self.location(j))
            .fold(f64::INFINITY, f64::min);
        let snap = 1e-10 * s0.abs().max(1.0);
        for j in 0..self.groups.len() {
            if (self.location(j) - s0).abs() <= snap {
                self.next_k[j] += 1;
            }
        }
        s0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_spec() -> FoxHSpec {
        FoxHSpec::new(1, 0, vec![], vec![(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn derived_indices() {
        let s = FoxHSpec::new(2, 0, vec![(1.0, 0.8)], vec![(0.5, 1.0), (-0.5, 1.0)]).unwrap();
        assert_eq!(s.p, 1);
        assert_eq!(s.q, 2);
        assert!((s.rho - 1.2).abs() < 1e-15);
        assert!((s.nu - 1.2).abs() < 1e-15);
        assert!((s.delta_growth - (0.0 - 1.0 - 0.5)).abs() < 1e-15);
        assert!((s.gamma_line + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(FoxHSpec::new(0, 0, vec![], vec![(0.0, 1.0)]).is_err());
        assert!(FoxHSpec::new(2, 0, vec![], vec![(0.0, 1.0)]).is_err());
        assert!(FoxHSpec::new(1, 0, vec![], vec![(0.0, -1.0)]).is_err());
        // l-poles at s <= 0 would overlap m-poles at s >= -1
        assert!(FoxHSpec::new(1, 1, vec![(2.0, 1.0)], vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn exponential_by_both_methods() {
        let s = exp_spec();
        for &z in &[0.1, 1.0, 2.0, 5.0] {
            let c = fox_h_contour(&s, z).unwrap();
            let r = fox_h_residues_detailed(&s, z).unwrap();
            let e = (-z).exp();
            assert!((c - e).abs() <= 1e-11 * e, "contour z={z}: {c} vs {e}");
            // alternating terms: accuracy limited by the reported rounding bound
            assert!(
                (r.value - e).abs() <= 1e-13 * e + r.error_bound,
                "residues z={z}: {} vs {e}",
                r.value
            );
        }
    }

    #[test]
    fn large_argument_keeps_relative_accuracy() {
        let s = exp_spec();
        for &z in &[20.0, 100.0, 400.0] {
            let c = fox_h_contour(&s, z).unwrap();
            let e = (-z).exp();
            assert!((c - e).abs() <= 1e-10 * e, "z={z}: {c} vs {e}");
        }
    }

    #[test]
    fn rho_nonpositive_is_rejected() {
        // ρ = 1 − 2 < 0
        let s = FoxHSpec::new(1, 0, vec![(1.0, 2.0)], vec![(0.0, 1.0)]).unwrap();
        assert!(matches!(
            fox_h_contour(&s, 1.0),
            Err(SpecFunError::ConvergenceViolation { .. })
        ));
    }

    #[test]
    fn coincident_parameters_are_rejected() {
        let s = FoxHSpec::new(2, 0, vec![], vec![(0.5, 1.0), (0.5, 1.0)]).unwrap();
        assert!(matches!(
            fox_h_residues(&s, 1.0),
            Err(SpecFunError::RepeatedPoles { .. })
        ));
    }

    #[test]
    fn double_poles_match_the_contour() {
        // H^{20}_{02}[z | (0,1),(1,1)]: poles at 1,2,... are double
        let s = FoxHSpec::new(2, 0, vec![], vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
        for &z in &[0.3, 1.0, 3.0] {
            let c = fox_h_contour(&s, z).unwrap();
            let r = fox_h_residues(&s, z).unwrap();
            // closed form: 2 z^{1/2} K_1(2 √z)
            assert!((c - r).abs() <= 1e-9 * c.abs(), "z={z}: {c} vs {r}");
        }
    }
}
