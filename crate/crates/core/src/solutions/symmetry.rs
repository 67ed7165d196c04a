//! One-parameter symmetry groups acting on solutions, and the canonical
//! coordinates y = ω, ũ = √f u.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{Field, SolutionError};
use crate::coeffs::{ClassTag, CoeffExpr, CoefficientProfile};
use crate::fraccalc::FracOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// (y, t) → (e^ε y, e^{ε/α} t); CaseII and CaseIV
    Scaling,
    /// y → y + ε; CaseIII and CaseIV
    Translation,
    /// (ũ, v) → (ũ cosh ε + v sinh ε, ũ sinh ε + v cosh ε); CaseIV
    Rotation,
}

impl Generator {
    pub fn admits(self, class: ClassTag) -> bool {
        matches!(
            (self, class),
            (Generator::Scaling, ClassTag::CaseII | ClassTag::CaseIV)
                | (Generator::Translation, ClassTag::CaseIII | ClassTag::CaseIV)
                | (Generator::Rotation, ClassTag::CaseIV)
        )
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Scaling => "scaling",
            Generator::Translation => "translation",
            Generator::Rotation => "rotation",
        })
    }
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scaling" => Ok(Generator::Scaling),
            "translation" => Ok(Generator::Translation),
            "rotation" => Ok(Generator::Rotation),
            _ => Err(format!(
                "unknown generator '{s}' (expected scaling, translation or rotation)"
            )),
        }
    }
}

/// Image of a solution under exp(ε·generator).
#[derive(Clone)]
pub struct SymmetryImage {
    base: Arc<dyn Field>,
    generator: Generator,
    epsilon: f64,
}

impl fmt::Debug for SymmetryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetryImage")
            .field("generator", &self.generator)
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

/// Acts on `field` with the group element exp(ε·generator).
pub fn apply_symmetry(
    field: Arc<dyn Field>,
    generator: Generator,
    epsilon: f64,
) -> Result<SymmetryImage, SolutionError> {
    let class = field.profile().class_tag;
    if !generator.admits(class) {
        return Err(SolutionError::Unsupported(format!(
            "{generator} is not a symmetry of {class} profiles"
        )));
    }
    if !epsilon.is_finite() {
        return Err(SolutionError::InvalidParameter(format!("epsilon = {epsilon}")));
    }
    Ok(SymmetryImage {
        base: field,
        generator,
        epsilon,
    })
}

impl SymmetryImage {
    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Preimage point x′ for x, or x itself for rotations.
    fn source_point(&self, x: f64) -> Result<f64, SolutionError> {
        let p = self.base.profile();
        let lambda1 = if p.class_tag == ClassTag::CaseII {
            p.lambda1
        } else {
            0.0
        };
        let y = p.omega0(x)? + lambda1;
        let y_src = match self.generator {
            Generator::Scaling => (-self.epsilon).exp() * y,
            Generator::Translation => y - self.epsilon,
            Generator::Rotation => return Ok(x),
        };
        Ok(p.omega0_inverse(y_src - lambda1)?)
    }
}

impl Field for SymmetryImage {
    fn order(&self) -> FracOrder {
        self.base.order()
    }

    fn profile(&self) -> &CoefficientProfile {
        self.base.profile()
    }

    fn eval_along(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        let p = self.base.profile();
        p.check_x(x)?;
        let eps = self.epsilon;
        match self.generator {
            Generator::Rotation => {
                let sf = p.f_d(x)?.0.sqrt();
                let (ch, sh) = (eps.cosh(), eps.sinh());
                Ok(self
                    .base
                    .eval_along(x, ts)?
                    .into_iter()
                    .map(|(u, v)| {
                        let ut = sf * u;
                        ((ut * ch + v * sh) / sf, ut * sh + v * ch)
                    })
                    .collect())
            }
            Generator::Scaling | Generator::Translation => {
                let xs = self.source_point(x)?;
                let ratio = (p.f_d(xs)?.0 / p.f_d(x)?.0).sqrt();
                let k = if self.generator == Generator::Scaling {
                    (-eps / self.base.order().alpha()).exp()
                } else {
                    1.0
                };
                let src: Vec<f64> = ts.iter().map(|t| k * t).collect();
                Ok(self
                    .base
                    .eval_along(xs, &src)?
                    .into_iter()
                    .map(|(u, v)| (ratio * u, v))
                    .collect())
            }
        }
    }

    fn leading_powers(&self) -> (f64, f64) {
        let (a, b) = self.base.leading_powers();
        match self.generator {
            Generator::Rotation => (a.min(b), a.min(b)),
            _ => (a, b),
        }
    }
}

/// A CaseIV solution in canonical coordinates: y = ω₀(x), ũ = √f u, with
/// the profile f ≡ 1 on [ω₀(lo), ω₀(hi)].
#[derive(Clone)]
pub struct CanonicalField {
    base: Arc<dyn Field>,
    profile: CoefficientProfile,
}

impl fmt::Debug for CanonicalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CanonicalField")
            .field("profile", &self.profile)
            .finish_non_exhaustive()
    }
}

/// Rewrites a CaseIV solution in canonical coordinates, where the system
/// becomes D^α ũ = v_y, D^α v = ũ_y.
pub fn canonical_reduction(field: Arc<dyn Field>) -> Result<CanonicalField, SolutionError> {
    let p = field.profile();
    if p.class_tag != ClassTag::CaseIV {
        return Err(SolutionError::Unsupported(format!(
            "canonical reduction needs a case-iv profile, got {}",
            p.class_tag
        )));
    }
    let (lo, hi) = p.domain;
    let (ylo, yhi) = (p.omega0(lo)?, p.omega0(hi)?);
    let profile = CoefficientProfile::new(
        CoeffExpr::constant(1.0),
        0.0f64.clamp(ylo, yhi),
        0.0,
        0.0,
        (ylo, yhi),
        ClassTag::CaseIV,
    )?;
    Ok(CanonicalField {
        base: field,
        profile,
    })
}

impl CanonicalField {
    /// x with ω₀(x) = y.
    pub fn x_of(&self, y: f64) -> Result<f64, SolutionError> {
        Ok(self.base.profile().omega0_inverse(y)?)
    }

    /// ω₀(x).
    pub fn y_of(&self, x: f64) -> Result<f64, SolutionError> {
        Ok(self.base.profile().omega0(x)?)
    }
}

impl Field for CanonicalField {
    fn order(&self) -> FracOrder {
        self.base.order()
    }

    fn profile(&self) -> &CoefficientProfile {
        &self.profile
    }

    fn eval_along(&self, y: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        self.profile.check_x(y)?;
        let x = self.x_of(y)?;
        let sf = self.base.profile().f_d(x)?.0.sqrt();
        Ok(self
            .base
            .eval_along(x, ts)?
            .into_iter()
            .map(|(u, v)| (sf * u, v))
            .collect())
    }

    fn leading_powers(&self) -> (f64, f64) {
        self.base.leading_powers()
    }
}

#[cfg(test)]
mod tests {
    use super::super::InvariantSolution;
    use super::*;
    use crate::coeffs::parse;

    fn ord(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn w5(f: &str, beta: f64, dom: (f64, f64)) -> Arc<dyn Field> {
        let p = CoefficientProfile::new(parse(f).unwrap(), beta, 0.0, 0.0, dom, ClassTag::CaseIV).unwrap();
        Arc::new(InvariantSolution::case3_w5(ord(0.5), &p, 1.0, 0.3, &[1.0], &[0.5]).unwrap())
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let f = w5("1+x^2", 0.5, (0.0, 2.0));
        for g in [Generator::Scaling, Generator::Translation, Generator::Rotation] {
            let img = apply_symmetry(f.clone(), g, 0.0).unwrap();
            for &(x, t) in &[(0.3, 0.2), (1.1, 0.7), (1.9, 1.3)] {
                let (a, b) = f.eval(x, t).unwrap();
                let (c, d) = img.eval(x, t).unwrap();
                assert!((a - c).abs() <= 1e-12 * a.abs() && (b - d).abs() <= 1e-12 * b.abs(), "{g}");
            }
        }
    }

    #[test]
    fn class_restrictions() {
        let p = CoefficientProfile::new(parse("1").unwrap(), 0.0, 0.0, 1.0, (0.0, 1.0), ClassTag::CaseIII).unwrap();
        let s: Arc<dyn Field> =
            Arc::new(InvariantSolution::case2(ord(0.5), &p, 1.0, &[1.0], &[0.0]).unwrap());
        assert!(apply_symmetry(s.clone(), Generator::Translation, 0.1).is_ok());
        assert!(apply_symmetry(s.clone(), Generator::Scaling, 0.1).is_err());
        assert!(apply_symmetry(s, Generator::Rotation, 0.1).is_err());
    }

    #[test]
    fn translation_outside_range_errors() {
        let f = w5("1", 0.0, (0.0, 1.0));
        let img = apply_symmetry(f, Generator::Translation, 0.5).unwrap();
        assert!(img.eval(0.8, 0.5).is_ok());
        assert!(matches!(img.eval(0.2, 0.5), Err(SolutionError::Coeff(_))));
    }

    #[test]
    fn canonical_identity_for_unit_f() {
        let f = w5("1", 0.0, (0.0, 2.0));
        let c = canonical_reduction(f.clone()).unwrap();
        for &x in &[0.0, 0.7, 2.0] {
            assert_eq!(c.eval(x, 0.4).unwrap(), f.eval(x, 0.4).unwrap());
        }
    }

    #[test]
    fn canonical_log_chart() {
        // f = x², β = 1: y = ln x, ũ = x u
        let f = w5("x^2", 1.0, (1.0, 3.0));
        let c = canonical_reduction(f.clone()).unwrap();
        for &x in &[1.0f64, 1.4, 2.0, 2.5, 3.0] {
            let y = c.y_of(x).unwrap();
            assert!((y - x.ln()).abs() < 1e-13);
            let (u, v) = f.eval(x, 0.6).unwrap();
            let (ut, vt) = c.eval(y, 0.6).unwrap();
            assert!((ut - x * u).abs() <= 1e-12 * ut.abs());
            assert!((vt - v).abs() <= 1e-12 * v.abs());
        }
    }
}
