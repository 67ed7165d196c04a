//! Building blocks of the reduced functions φ, ψ.
//!
//! A block is `weight · var^shift · F(arg · var^power)` with F a
//! Mittag-Leffler or generalized Wright function; its power series in `var`
//! is exact termwise.

use std::sync::Arc;

use crate::specfun::{
    fox_h_contour, fox_h_residues_detailed, gen_wright, ln_gamma, ln_gamma_signed,
    mittag_leffler, nonpositive_integer, real_part_if_real, FoxHSpec, GenWrightSpec,
    SpecFunError,
};
use crate::Complex64;

#[derive(Debug, Clone)]
pub(crate) enum Kernel {
    MittagLeffler { alpha: f64, beta: f64 },
    Wright(Arc<GenWrightSpec>),
}

#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub weight: f64,
    pub shift: f64,
    pub arg: f64,
    pub power: f64,
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    kernel: Kernel,
}

fn real(z: Complex64) -> Result<f64, SpecFunError> {
    real_part_if_real(z).ok_or_else(|| {
        SpecFunError::InvalidParameter(format!("complex value {z} for a real argument"))
    })
}

impl Block {
    /// weight · var^shift · E_{a,b}(arg · var^power)
    pub fn ml(weight: f64, shift: f64, a: f64, b: f64, arg: f64, power: f64) -> Self {
        Self {
            weight,
            shift,
            arg,
            power,
            upper: vec![(1.0, 1.0)],
            lower: vec![(b, a)],
            kernel: Kernel::MittagLeffler { alpha: a, beta: b },
        }
    }

    /// weight · var^shift · pΨq(arg · var^power)
    pub fn wright(
        weight: f64,
        shift: f64,
        upper: Vec<(f64, f64)>,
        lower: Vec<(f64, f64)>,
        arg: f64,
        power: f64,
    ) -> Result<Self, SpecFunError> {
        let spec = GenWrightSpec::new(upper.clone(), lower.clone())?;
        Ok(Self {
            weight,
            shift,
            arg,
            power,
            upper,
            lower,
            kernel: Kernel::Wright(Arc::new(spec)),
        })
    }

    pub fn eval(&self, var: f64) -> Result<f64, SpecFunError> {
        if self.weight == 0.0 {
            return Ok(0.0);
        }
        let w = Complex64::new(self.arg * var.powf(self.power), 0.0);
        let f = match &self.kernel {
            Kernel::MittagLeffler { alpha, beta } => real(mittag_leffler(*alpha, *beta, w)?)?,
            Kernel::Wright(spec) => real(gen_wright(spec, w)?)?,
        };
        Ok(self.weight * var.powf(self.shift) * f)
    }

    /// Coefficient of var^{shift + power·m}.
    pub fn coefficient(&self, m: usize) -> Result<f64, SpecFunError> {
        if self.weight == 0.0 || (m > 0 && self.arg == 0.0) {
            return Ok(0.0);
        }
        let mf = m as f64;
        let mut ln = self.weight.abs().ln();
        let mut sign = self.weight.signum();
        if m > 0 {
            ln += mf * self.arg.abs().ln();
            if self.arg < 0.0 && m % 2 == 1 {
                sign = -sign;
            }
        }
        // Γ(1 + m)/m! = 1 exactly
        let mut skip_factorial = false;
        for &(a, al) in &self.upper {
            if !skip_factorial && a == 1.0 && al == 1.0 {
                skip_factorial = true;
                continue;
            }
            let x = a + al * mf;
            if nonpositive_integer(x).is_some() {
                return Err(SpecFunError::Pole { at: x });
            }
            let (l, s) = ln_gamma_signed(x)?;
            ln += l;
            sign *= s;
        }
        for &(b, be) in &self.lower {
            let x = b + be * mf;
            if nonpositive_integer(x).is_some() {
                return Ok(0.0);
            }
            let (l, s) = ln_gamma_signed(x)?;
            ln -= l;
            sign *= s;
        }
        if !skip_factorial {
            ln -= ln_gamma(mf + 1.0);
        }
        let v = sign * ln.exp();
        if !v.is_finite() {
            return Err(SpecFunError::NonConvergent(format!(
                "series coefficient {m} overflows"
            )));
        }
        Ok(v)
    }

    /// First `terms` (coefficient, exponent) pairs and the first omitted
    /// exponent. The expansion stops early at a coefficient below
    /// [`COEFF_FLOOR`], where f64 no longer resolves it relatively.
    pub fn expand(&self, terms: usize) -> Result<(Vec<(f64, f64)>, f64), SpecFunError> {
        let mut out = Vec::with_capacity(terms);
        for m in 0..terms {
            let c = self.coefficient(m)?;
            let g = self.shift + self.power * m as f64;
            if c != 0.0 && c.abs() < COEFF_FLOOR {
                return Ok((out, g));
            }
            out.push((c, g));
        }
        Ok((out, self.shift + self.power * terms as f64))
    }
}

/// Smallest series coefficient kept by [`Block::expand`]; far enough above
/// the subnormal range that products with gamma ratios stay normal.
pub const COEFF_FLOOR: f64 = 1e-280;

pub(crate) fn eval_blocks(blocks: &[Block], var: f64) -> Result<f64, SpecFunError> {
    let mut s = 0.0;
    for b in blocks {
        s += b.eval(var)?;
    }
    Ok(s)
}

/// weight · H(var^{−2α}/4) for the H²⁰₁₂ kernels of the small-α Case 1 family.
#[derive(Debug, Clone)]
pub(crate) struct FoxBlock {
    pub weight: f64,
    pub spec: FoxHSpec,
    pub alpha: f64,
}

/// Arguments up to this size try the residue series first.
const RESIDUE_ARG_MAX: f64 = 8.0;

impl FoxBlock {
    pub fn eval(&self, z: f64) -> Result<f64, SpecFunError> {
        if self.weight == 0.0 {
            return Ok(0.0);
        }
        if !(z > 0.0) {
            return Err(SpecFunError::InvalidParameter(format!(
                "Fox H solutions are defined for z > 0, got {z}"
            )));
        }
        let w = z.powf(-2.0 * self.alpha) / 4.0;
        Ok(self.weight * fox_h_value(&self.spec, w)?)
    }
}

/// Residue series when it is accurate, contour quadrature otherwise.
pub(crate) fn fox_h_value(spec: &FoxHSpec, w: f64) -> Result<f64, SpecFunError> {
    if w <= RESIDUE_ARG_MAX {
        if let Ok(r) = fox_h_residues_detailed(spec, w) {
            if r.error_bound <= 1e-12 * r.value.abs() {
                return Ok(r.value);
            }
        }
    }
    fox_h_contour(spec, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ml_block_series_matches_value() {
        let b = Block::ml(2.0, -0.5, 1.0, 0.5, 1.5, 1.0);
        let (terms, next) = b.expand(40).unwrap();
        assert_eq!(next, 39.5);
        let z: f64 = 0.7;
        let s: f64 = terms.iter().map(|(c, e)| c * z.powf(*e)).sum();
        assert!((s - b.eval(z).unwrap()).abs() < 1e-13 * s.abs());
    }

    #[test]
    fn expansion_stops_before_underflow() {
        // 1/Γ(6m + 1) drops below the floor near m = 28
        let b = Block::ml(1.0, 0.0, 6.0, 1.0, 1.0, 6.0);
        let (terms, next) = b.expand(60).unwrap();
        assert!(terms.len() < 60);
        assert_eq!(next, 6.0 * terms.len() as f64);
        assert!(terms.iter().all(|t| t.0.abs() >= COEFF_FLOOR));
    }

    #[test]
    fn wright_block_series_matches_value() {
        let b = Block::wright(
            -1.5,
            0.3,
            vec![(0.4, 1.0), (0.9, 1.0), (1.0, 1.0)],
            vec![(1.3, 3.0)],
            4.0,
            3.0,
        )
        .unwrap();
        let (terms, _) = b.expand(40).unwrap();
        let z: f64 = 0.6;
        let s: f64 = terms.iter().map(|(c, e)| c * z.powf(*e)).sum();
        assert!((s - b.eval(z).unwrap()).abs() < 1e-13 * s.abs());
    }

    #[test]
    fn lower_pole_gives_zero_and_upper_pole_errors() {
        let b = Block::ml(1.0, -0.5, 0.5, 0.5, 1.0, 0.5);
        // 1/Γ(0.5 + 0.5·m) never vanishes; shift the lower parameter onto a pole
        assert!(b.coefficient(3).unwrap() != 0.0);
        let b = Block::ml(1.0, 0.0, 1.0, 0.0, 1.0, 1.0);
        assert_eq!(b.coefficient(0).unwrap(), 0.0);
        let b = Block::wright(1.0, 0.0, vec![(0.0, 1.0)], vec![(1.0, 1.0)], 1.0, 1.0).unwrap();
        assert!(matches!(b.coefficient(0), Err(SpecFunError::Pole { .. })));
    }
}
