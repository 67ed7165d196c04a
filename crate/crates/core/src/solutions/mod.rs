//! Invariant solutions of D_t^α u = v_x, D_t^α v = f u_x + g u.
//!
//! Each family pairs a similarity transform with reduced functions φ, ψ:
//!
//! | family            | class    | α       | u, v                                   |
//! |-------------------|----------|---------|----------------------------------------|
//! | `Case1SmallAlpha` | CaseII   | (0, 1)  | c ω^a H²⁰₁₂(z^{−2α}/4)/√f, z = ω^{−1/α}t |
//! | `Case1LargeAlpha` | CaseII   | ≥ 1     | ω^a φ(z)/√f with ₃Ψ₁ blocks            |
//! | `Case2`           | CaseIII  | > 0     | e^{aω₀} φ(t)/√f with E_{2α,·} blocks   |
//! | `Case3W4Small`    | CaseIV   | (0, 1)  | c t^{(a₁−a₂)α} Ψ(−ω₀/t^α; −α, ·)/√f     |
//! | `Case3W4Large`    | CaseIV   | ≥ 1     | ω₀^{a₁±a₂} blocks with ₂Ψ₁             |
//! | `Case3W5`         | CaseIV   | > 0     | e^{(a₁±a₂)ω₀} blocks with E_{α,·}      |

mod blocks;
mod residual;
mod symmetry;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::coeffs::{ClassTag, CoeffError, CoefficientProfile};
use crate::fraccalc::{FracError, FracOrder};
use crate::specfun::{wright, FoxHSpec, SpecFunError};
use crate::Complex64;

use blocks::{eval_blocks, Block, FoxBlock};

pub use residual::{
    pde_residual_at, pde_residual_numeric, reduced_residual_numeric, reduced_residual_termwise,
    PointResidual, ReducedForm,
    ReducedSeries, ResidualMethod, ResidualReport, DEFAULT_SERIES_TERMS,
};
pub use symmetry::{apply_symmetry, canonical_reduction, CanonicalField, Generator, SymmetryImage};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("{family} needs a {needed} profile, got {got}")]
    WrongClass {
        family: Family,
        needed: ClassTag,
        got: ClassTag,
    },
    #[error("{family} needs {need}, got alpha = {alpha}")]
    AlphaRange {
        family: Family,
        alpha: f64,
        need: &'static str,
    },
    #[error("constant lists must have length n = {n}, got {c1} and {c2}")]
    ListLength { n: usize, c1: usize, c2: usize },
    #[error("inadmissible (a1, a2) = ({a1}, {a2}); allowed are (±1, a), (0, ±1), (0, 0)")]
    Inadmissible { a1: f64, a2: f64 },
    #[error("omega = {omega} at x = {x}; real powers of omega need omega > 0")]
    OmegaNonPositive { x: f64, omega: f64 },
    #[error("{0} is not series-backed")]
    NotSeriesBacked(Family),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Case1SmallAlpha,
    Case1LargeAlpha,
    Case2,
    Case3W4Small,
    Case3W4Large,
    Case3W5,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Case1SmallAlpha,
        Family::Case1LargeAlpha,
        Family::Case2,
        Family::Case3W4Small,
        Family::Case3W4Large,
        Family::Case3W5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Case1SmallAlpha => "case1-small",
            Family::Case1LargeAlpha => "case1-large",
            Family::Case2 => "case2",
            Family::Case3W4Small => "case3-w4-small",
            Family::Case3W4Large => "case3-w4-large",
            Family::Case3W5 => "case3-w5",
        }
    }

    pub fn class(self) -> ClassTag {
        match self {
            Family::Case1SmallAlpha | Family::Case1LargeAlpha => ClassTag::CaseII,
            Family::Case2 => ClassTag::CaseIII,
            _ => ClassTag::CaseIV,
        }
    }

    pub fn is_series_backed(self) -> bool {
        !matches!(self, Family::Case1SmallAlpha | Family::Case3W4Small)
    }

    /// Whether the family takes (a₁, a₂) rather than a single a.
    pub fn uses_pair(self) -> bool {
        matches!(
            self,
            Family::Case3W4Small | Family::Case3W4Large | Family::Case3W5
        )
    }

    /// Whether the family takes one constant c rather than lists.
    pub fn uses_single_constant(self) -> bool {
        matches!(self, Family::Case1SmallAlpha | Family::Case3W4Small)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                format!("unknown family '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    A(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constants {
    Single(f64),
    Lists(Vec<f64>, Vec<f64>),
}

/// Assembly of (u, v) from reduced functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// u = ω^a φ(z)/√f, v = ω^a ψ(z), ω = ω_{λ₁}, z = ω^{−1/α} t
    PowerOmega { a: f64 },
    /// u = e^{aω₀} φ(t)/√f, v = e^{aω₀} ψ(t)
    ExpOmega { a: f64 },
    /// u = (ω₀^p φ(z) + ω₀^q ψ(z))/√f, v = ω₀^p φ(z) − ω₀^q ψ(z), z = ω₀^{−1/α} t
    PowerPair { p: f64, q: f64 },
    /// u = (e^{pω₀} φ(t) + e^{qω₀} ψ(t))/√f, v = e^{pω₀} φ(t) − e^{qω₀} ψ(t)
    ExpPair { p: f64, q: f64 },
}

impl Transform {
    pub fn for_family(family: Family, params: Params) -> Result<Self, SolutionError> {
        match (family, params) {
            (Family::Case1SmallAlpha | Family::Case1LargeAlpha, Params::A(a)) => {
                Ok(Transform::PowerOmega { a })
            }
            (Family::Case2, Params::A(a)) => Ok(Transform::ExpOmega { a }),
            (Family::Case3W4Small | Family::Case3W4Large, Params::Pair(a1, a2)) => {
                Ok(Transform::PowerPair {
                    p: a1 + a2,
                    q: a1 - a2,
                })
            }
            (Family::Case3W5, Params::Pair(a1, a2)) => Ok(Transform::ExpPair {
                p: a1 + a2,
                q: a1 - a2,
            }),
            (f, p) => Err(SolutionError::InvalidParameter(format!(
                "{f} does not take parameters {p:?}"
            ))),
        }
    }

    fn uses_lambda1(self) -> bool {
        matches!(self, Transform::PowerOmega { .. })
    }

    fn needs_positive_omega(self) -> bool {
        matches!(
            self,
            Transform::PowerOmega { .. } | Transform::PowerPair { .. }
        )
    }
}

/// A pair of fields (u, v) on the (x, t) domain of a coefficient profile.
pub trait Field: Send + Sync {
    fn order(&self) -> FracOrder;

    fn profile(&self) -> &CoefficientProfile;

    /// (u, v) at fixed x for every t in `ts`.
    fn eval_along(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError>;

    fn eval(&self, x: f64, t: f64) -> Result<(f64, f64), SolutionError> {
        Ok(self.eval_along(x, &[t])?[0])
    }

    /// Exponents (γ_u, γ_v) of the leading behaviour t^γ as t → 0⁺,
    /// declared to the numeric RL scheme.
    fn leading_powers(&self) -> (f64, f64);
}

#[derive(Debug, Clone)]
enum Reduced {
    Series { phi: Vec<Block>, psi: Vec<Block> },
    Fox { phi: FoxBlock, psi: FoxBlock },
    /// ψ(z) = c z^{qα} Ψ(−z^{−α}; −α, 1 + qα), φ ≡ 0
    WrightW4 { c: f64, q: f64 },
}

/// One member of an invariant-solution family.
#[derive(Debug, Clone)]
pub struct InvariantSolution {
    family: Family,
    order: FracOrder,
    profile: Arc<CoefficientProfile>,
    params: Params,
    constants: Constants,
    transform: Transform,
    reduced: Reduced,
    leading: (f64, f64),
}

fn check_class(family: Family, profile: &CoefficientProfile) -> Result<(), SolutionError> {
    let needed = family.class();
    if profile.class_tag != needed {
        return Err(SolutionError::WrongClass {
            family,
            needed,
            got: profile.class_tag,
        });
    }
    Ok(())
}

fn check_lists(order: FracOrder, c1: &[f64], c2: &[f64]) -> Result<(), SolutionError> {
    let n = order.n() as usize;
    if c1.len() != n || c2.len() != n {
        return Err(SolutionError::ListLength {
            n,
            c1: c1.len(),
            c2: c2.len(),
        });
    }
    if c1.iter().chain(c2).any(|c| !c.is_finite()) {
        return Err(SolutionError::InvalidParameter("non-finite constant".into()));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<(), SolutionError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SolutionError::InvalidParameter(format!(
            "parameters must be finite, got {values:?}"
        )));
    }
    Ok(())
}

/// Smallest exponent among blocks that are present, or 0.
fn leading_of(blocks: &[Block]) -> f64 {
    let m = blocks
        .iter()
        .filter(|b| b.weight != 0.0)
        .map(|b| b.shift)
        .fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        m
    } else {
        0.0
    }
}

/// Whether (a₁, a₂) belongs to {(±1, a), (0, ±1), (0, 0)}.
pub fn w5_admissible(a1: f64, a2: f64) -> bool {
    a1 == 1.0 || a1 == -1.0 || (a1 == 0.0 && (a2 == 1.0 || a2 == -1.0 || a2 == 0.0))
}

impl InvariantSolution {
    /// Case2: φ, ψ are the E_{2α,·}(a(a+λ₂)t^{2α}) sums.
    pub fn case2(
        order: FracOrder,
        profile: &CoefficientProfile,
        a: f64,
        c1: &[f64],
        c2: &[f64],
    ) -> Result<Self, SolutionError> {
        check_class(Family::Case2, profile)?;
        check_lists(order, c1, c2)?;
        check_finite(&[a])?;
        let al = order.alpha();
        let b = a + profile.lambda2;
        let arg = a * b;
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for k in 1..=order.n() as usize {
            let kf = k as f64;
            let (c1k, c2k) = (c1[k - 1], c2[k - 1]);
            let p = |w: f64| Block::ml(w, al - kf, 2.0 * al, 1.0 + al - kf, arg, 2.0 * al);
            let q = |w: f64| Block::ml(w, 2.0 * al - kf, 2.0 * al, 1.0 + 2.0 * al - kf, arg, 2.0 * al);
            phi.push(p(c1k));
            phi.push(q(a * c2k));
            psi.push(q(b * c1k));
            psi.push(p(c2k));
        }
        Self::from_series(
            Family::Case2,
            order,
            profile,
            Params::A(a),
            Constants::Lists(c1.to_vec(), c2.to_vec()),
            phi,
            psi,
        )
    }

    /// Case1, 0 < α < 1: φ, ψ are H²⁰₁₂ functions of z^{−2α}/4, u carries c, v carries −c.
    pub fn case1_small_alpha(
        order: FracOrder,
        profile: &CoefficientProfile,
        a: f64,
        c: f64,
    ) -> Result<Self, SolutionError> {
        let family = Family::Case1SmallAlpha;
        check_class(family, profile)?;
        let al = order.alpha();
        if !(al < 1.0) {
            return Err(SolutionError::AlphaRange {
                family,
                alpha: al,
                need: "0 < alpha < 1",
            });
        }
        check_finite(&[a, c])?;
        let b = a + profile.lambda2;
        let phi_spec = FoxHSpec::new(
            2,
            0,
            vec![(1.0, 2.0 * al)],
            vec![(0.5 - a / 2.0, 1.0), (-b / 2.0, 1.0)],
        )?;
        let psi_spec = FoxHSpec::new(
            2,
            0,
            vec![(1.0, 2.0 * al)],
            vec![(-a / 2.0, 1.0), (0.5 - b / 2.0, 1.0)],
        )?;
        let reduced = Reduced::Fox {
            phi: FoxBlock {
                weight: c,
                spec: phi_spec,
                alpha: al,
            },
            psi: FoxBlock {
                weight: -c,
                spec: psi_spec,
                alpha: al,
            },
        };
        Ok(Self {
            family,
            order,
            profile: Arc::new(profile.clone()),
            params: Params::A(a),
            constants: Constants::Single(c),
            transform: Transform::PowerOmega { a },
            reduced,
            leading: (0.0, 0.0),
        })
    }

    /// Case1, α ≥ 1: four ₃Ψ₁[4z^{2α}] block sums.
    pub fn case1_large_alpha(
        order: FracOrder,
        profile: &CoefficientProfile,
        a: f64,
        c1: &[f64],
        c2: &[f64],
    ) -> Result<Self, SolutionError> {
        let family = Family::Case1LargeAlpha;
        check_class(family, profile)?;
        let al = order.alpha();
        if !(al >= 1.0) {
            return Err(SolutionError::AlphaRange {
                family,
                alpha: al,
                need: "alpha >= 1",
            });
        }
        check_lists(order, c1, c2)?;
        check_finite(&[a])?;
        let b = a + profile.lambda2;
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for k in 1..=order.n() as usize {
            let kf = k as f64;
            let kap = kf / (2.0 * al);
            let (c1k, c2k) = (c1[k - 1], c2[k - 1]);
            let block = |w: f64, shift: f64, u1: f64, u2: f64, low: f64| {
                Block::wright(
                    w,
                    shift,
                    vec![(u1, 1.0), (u2, 1.0), (1.0, 1.0)],
                    vec![(low, 2.0 * al)],
                    4.0,
                    2.0 * al,
                )
            };
            phi.push(block(
                c1k,
                al - kf,
                1.0 - a / 2.0 - kap,
                0.5 - b / 2.0 - kap,
                1.0 + al - kf,
            )?);
            phi.push(block(
                -2.0 * c2k,
                2.0 * al - kf,
                1.5 - a / 2.0 - kap,
                1.0 - b / 2.0 - kap,
                1.0 + 2.0 * al - kf,
            )?);
            psi.push(block(
                -2.0 * c1k,
                2.0 * al - kf,
                1.0 - a / 2.0 - kap,
                1.5 - b / 2.0 - kap,
                1.0 + 2.0 * al - kf,
            )?);
            psi.push(block(
                c2k,
                al - kf,
                0.5 - a / 2.0 - kap,
                1.0 - b / 2.0 - kap,
                1.0 + al - kf,
            )?);
        }
        Self::from_series(
            family,
            order,
            profile,
            Params::A(a),
            Constants::Lists(c1.to_vec(), c2.to_vec()),
            phi,
            psi,
        )
    }

    /// W4, 0 < α < 1: the Wright-function solution.
    pub fn case3_w4_small(
        order: FracOrder,
        profile: &CoefficientProfile,
        a1: f64,
        a2: f64,
        c: f64,
    ) -> Result<Self, SolutionError> {
        let family = Family::Case3W4Small;
        check_class(family, profile)?;
        let al = order.alpha();
        if !(al < 1.0) {
            return Err(SolutionError::AlphaRange {
                family,
                alpha: al,
                need: "0 < alpha < 1",
            });
        }
        check_finite(&[a1, a2, c])?;
        Ok(Self {
            family,
            order,
            profile: Arc::new(profile.clone()),
            params: Params::Pair(a1, a2),
            constants: Constants::Single(c),
            transform: Transform::PowerPair {
                p: a1 + a2,
                q: a1 - a2,
            },
            reduced: Reduced::WrightW4 { c, q: a1 - a2 },
            leading: (0.0, 0.0),
        })
    }

    /// W4, α ≥ 1: ₂Ψ₁ blocks φ_k(−z^α), ψ_k(z^α).
    pub fn case3_w4_large(
        order: FracOrder,
        profile: &CoefficientProfile,
        a1: f64,
        a2: f64,
        c1: &[f64],
        c2: &[f64],
    ) -> Result<Self, SolutionError> {
        let family = Family::Case3W4Large;
        check_class(family, profile)?;
        let al = order.alpha();
        if !(al >= 1.0) {
            return Err(SolutionError::AlphaRange {
                family,
                alpha: al,
                need: "alpha >= 1",
            });
        }
        check_lists(order, c1, c2)?;
        check_finite(&[a1, a2])?;
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for k in 1..=order.n() as usize {
            let kf = k as f64;
            let low = vec![(1.0 + al - kf, al)];
            phi.push(Block::wright(
                c1[k - 1],
                al - kf,
                vec![(-a1 - a2 - kf / al + 1.0, 1.0), (1.0, 1.0)],
                low.clone(),
                -1.0,
                al,
            )?);
            psi.push(Block::wright(
                c2[k - 1],
                al - kf,
                vec![(-a1 + a2 - kf / al + 1.0, 1.0), (1.0, 1.0)],
                low,
                1.0,
                al,
            )?);
        }
        Self::from_series(
            family,
            order,
            profile,
            Params::Pair(a1, a2),
            Constants::Lists(c1.to_vec(), c2.to_vec()),
            phi,
            psi,
        )
    }

    /// W5: E_{α,1+α−k}((a₁ ± a₂)-type arguments) blocks.
    pub fn case3_w5(
        order: FracOrder,
        profile: &CoefficientProfile,
        a1: f64,
        a2: f64,
        c1: &[f64],
        c2: &[f64],
    ) -> Result<Self, SolutionError> {
        let family = Family::Case3W5;
        check_class(family, profile)?;
        if !w5_admissible(a1, a2) {
            return Err(SolutionError::Inadmissible { a1, a2 });
        }
        check_lists(order, c1, c2)?;
        check_finite(&[a2])?;
        let al = order.alpha();
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for k in 1..=order.n() as usize {
            let kf = k as f64;
            phi.push(Block::ml(c1[k - 1], al - kf, al, 1.0 + al - kf, a1 + a2, al));
            psi.push(Block::ml(c2[k - 1], al - kf, al, 1.0 + al - kf, a2 - a1, al));
        }
        Self::from_series(
            family,
            order,
            profile,
            Params::Pair(a1, a2),
            Constants::Lists(c1.to_vec(), c2.to_vec()),
            phi,
            psi,
        )
    }

    /// Dispatches on the family.
    pub fn build(
        family: Family,
        order: FracOrder,
        profile: &CoefficientProfile,
        params: Params,
        constants: &Constants,
    ) -> Result<Self, SolutionError> {
        let bad = || {
            SolutionError::InvalidParameter(format!(
                "{family} does not take {params:?} with {constants:?}"
            ))
        };
        match (family, params, constants) {
            (Family::Case1SmallAlpha, Params::A(a), Constants::Single(c)) => {
                Self::case1_small_alpha(order, profile, a, *c)
            }
            (Family::Case1LargeAlpha, Params::A(a), Constants::Lists(c1, c2)) => {
                Self::case1_large_alpha(order, profile, a, c1, c2)
            }
            (Family::Case2, Params::A(a), Constants::Lists(c1, c2)) => {
                Self::case2(order, profile, a, c1, c2)
            }
            (Family::Case3W4Small, Params::Pair(a1, a2), Constants::Single(c)) => {
                Self::case3_w4_small(order, profile, a1, a2, *c)
            }
            (Family::Case3W4Large, Params::Pair(a1, a2), Constants::Lists(c1, c2)) => {
                Self::case3_w4_large(order, profile, a1, a2, c1, c2)
            }
            (Family::Case3W5, Params::Pair(a1, a2), Constants::Lists(c1, c2)) => {
                Self::case3_w5(order, profile, a1, a2, c1, c2)
            }
            _ => Err(bad()),
        }
    }

    fn from_series(
        family: Family,
        order: FracOrder,
        profile: &CoefficientProfile,
        params: Params,
        constants: Constants,
        phi: Vec<Block>,
        psi: Vec<Block>,
    ) -> Result<Self, SolutionError> {
        let transform = Transform::for_family(family, params)?;
        let (lp, lq) = (leading_of(&phi), leading_of(&psi));
        // u and v mix φ and ψ for the paired transforms
        let leading = match transform {
            Transform::PowerOmega { .. } | Transform::ExpOmega { .. } => (lp, lq),
            _ => (lp.min(lq), lp.min(lq)),
        };
        Ok(Self {
            family,
            order,
            profile: Arc::new(profile.clone()),
            params,
            constants,
            transform,
            reduced: Reduced::Series { phi, psi },
            leading,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    /// Reduced function φ of the similarity variable.
    pub fn phi(&self, z: f64) -> Result<f64, SolutionError> {
        match &self.reduced {
            Reduced::Series { phi, .. } => Ok(eval_blocks(phi, z)?),
            Reduced::Fox { phi, .. } => Ok(phi.eval(z)?),
            Reduced::WrightW4 { .. } => Ok(0.0),
        }
    }

    /// Reduced function ψ of the similarity variable.
    pub fn psi(&self, z: f64) -> Result<f64, SolutionError> {
        match &self.reduced {
            Reduced::Series { psi, .. } => Ok(eval_blocks(psi, z)?),
            Reduced::Fox { psi, .. } => Ok(psi.eval(z)?),
            Reduced::WrightW4 { c, q } => {
                if *c == 0.0 {
                    return Ok(0.0);
                }
                let al = self.order.alpha();
                let w = wright(Complex64::new(-z.powf(-al), 0.0), -al, 1.0 + q * al)?;
                Ok(c * z.powf(q * al) * w.re)
            }
        }
    }

    /// Leading exponents (φ, ψ) of the reduced functions at 0.
    pub fn reduced_leading_powers(&self) -> (f64, f64) {
        match &self.reduced {
            Reduced::Series { phi, psi } => (leading_of(phi), leading_of(psi)),
            _ => (0.0, 0.0),
        }
    }

    pub(crate) fn reduced_blocks(&self) -> Option<(&[Block], &[Block])> {
        match &self.reduced {
            Reduced::Series { phi, psi } => Some((phi, psi)),
            _ => None,
        }
    }

    /// (u, v) by the direct Wright formula, valid for any sign of ω₀.
    fn eval_w4_small(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        let Reduced::WrightW4 { c, q } = self.reduced else {
            unreachable!("only called for the Wright family")
        };
        let p = &*self.profile;
        let (f, _) = p.f_d(x)?;
        let sf = f.sqrt();
        let y = p.omega0(x)?;
        let al = self.order.alpha();
        ts.iter()
            .map(|&t| {
                if c == 0.0 {
                    return Ok((0.0, 0.0));
                }
                check_time(t)?;
                let w = wright(Complex64::new(-y / t.powf(al), 0.0), -al, 1.0 + q * al)?;
                let ut = c * t.powf(q * al) * w.re;
                Ok((ut / sf, -ut))
            })
            .collect()
    }
}

fn check_time(t: f64) -> Result<(), SolutionError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SolutionError::InvalidGrid(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Evaluates a transform at fixed x for several t.
pub(crate) fn assemble(
    transform: Transform,
    profile: &CoefficientProfile,
    order: FracOrder,
    x: f64,
    ts: &[f64],
    phi: &dyn Fn(f64) -> Result<f64, SolutionError>,
    psi: &dyn Fn(f64) -> Result<f64, SolutionError>,
) -> Result<Vec<(f64, f64)>, SolutionError> {
    let (f, _) = profile.f_d(x)?;
    let sf = f.sqrt();
    let w = if transform.uses_lambda1() {
        profile.omega(x)?
    } else {
        profile.omega0(x)?
    };
    if transform.needs_positive_omega() && !(w > 0.0) {
        return Err(SolutionError::OmegaNonPositive { x, omega: w });
    }
    let al = order.alpha();
    ts.iter()
        .map(|&t| {
            check_time(t)?;
            let (u, v) = match transform {
                Transform::PowerOmega { a } => {
                    let z = w.powf(-1.0 / al) * t;
                    let s = w.powf(a);
                    (s * phi(z)?, s * psi(z)?)
                }
                Transform::ExpOmega { a } => {
                    let s = (a * w).exp();
                    (s * phi(t)?, s * psi(t)?)
                }
                Transform::PowerPair { p, q } => {
                    let z = w.powf(-1.0 / al) * t;
                    let (sp, sq) = (w.powf(p), w.powf(q));
                    let (a, b) = (sp * phi(z)?, sq * psi(z)?);
                    (a + b, a - b)
                }
                Transform::ExpPair { p, q } => {
                    let (a, b) = ((p * w).exp() * phi(t)?, (q * w).exp() * psi(t)?);
                    (a + b, a - b)
                }
            };
            Ok((u / sf, v))
        })
        .collect()
}

impl Field for InvariantSolution {
    fn order(&self) -> FracOrder {
        self.order
    }

    fn profile(&self) -> &CoefficientProfile {
        &self.profile
    }

    fn eval_along(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        self.profile.check_x(x)?;
        if self.family == Family::Case3W4Small {
            return self.eval_w4_small(x, ts);
        }
        assemble(
            self.transform,
            &self.profile,
            self.order,
            x,
            ts,
            &|z| self.phi(z),
            &|z| self.psi(z),
        )
    }

    fn leading_powers(&self) -> (f64, f64) {
        self.leading
    }
}

/// Reduced function supplied by the caller.
pub type ReducedFn = Arc<dyn Fn(f64) -> Result<f64, SolutionError> + Send + Sync>;

/// (u, v) assembled from caller-supplied φ, ψ by a family's transform.
pub struct AssembledField {
    transform: Transform,
    profile: Arc<CoefficientProfile>,
    order: FracOrder,
    phi: ReducedFn,
    psi: ReducedFn,
    leading: (f64, f64),
}

impl fmt::Debug for AssembledField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AssembledField")
            .field("transform", &self.transform)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl AssembledField {
    /// Declares the leading exponents used by the numeric residual.
    pub fn with_leading_powers(mut self, gamma_u: f64, gamma_v: f64) -> Self {
        self.leading = (gamma_u, gamma_v);
        self
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }
}

impl Field for AssembledField {
    fn order(&self) -> FracOrder {
        self.order
    }

    fn profile(&self) -> &CoefficientProfile {
        &self.profile
    }

    fn eval_along(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        self.profile.check_x(x)?;
        assemble(
            self.transform,
            &self.profile,
            self.order,
            x,
            ts,
            &*self.phi,
            &*self.psi,
        )
    }

    fn leading_powers(&self) -> (f64, f64) {
        self.leading
    }
}

/// Assembles (u, v) from φ, ψ with the similarity transform of `family`.
pub fn similarity_transform(
    family: Family,
    profile: &CoefficientProfile,
    order: FracOrder,
    params: Params,
    phi: ReducedFn,
    psi: ReducedFn,
) -> Result<AssembledField, SolutionError> {
    check_class(family, profile)?;
    Ok(AssembledField {
        transform: Transform::for_family(family, params)?,
        profile: Arc::new(profile.clone()),
        order,
        phi,
        psi,
        leading: (0.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::parse;

    fn profile(f: &str, beta: f64, l1: f64, l2: f64, dom: (f64, f64), c: ClassTag) -> CoefficientProfile {
        CoefficientProfile::new(parse(f).unwrap(), beta, l1, l2, dom, c).unwrap()
    }

    fn ord(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn zero_constants_give_zero_fields() {
        let p3 = profile("x^2", 1.0, 0.0, 1.0, (1.0, 3.0), ClassTag::CaseIII);
        let s = InvariantSolution::case2(ord(0.5), &p3, 1.0, &[0.0], &[0.0]).unwrap();
        assert_eq!(s.eval(2.0, 0.5).unwrap(), (0.0, 0.0));
        let p2 = profile("1", 0.0, 1.0, 1.0, (0.0, 2.0), ClassTag::CaseII);
        let s = InvariantSolution::case1_small_alpha(ord(0.4), &p2, 0.0, 0.0).unwrap();
        assert_eq!(s.eval(1.0, 0.5).unwrap(), (0.0, 0.0));
        let s = InvariantSolution::case1_large_alpha(ord(1.5), &p2, 0.0, &[0.0; 2], &[0.0; 2]).unwrap();
        assert_eq!(s.eval(1.0, 0.5).unwrap(), (0.0, 0.0));
        let p4 = profile("1", 0.0, 0.0, 0.0, (0.0, 2.0), ClassTag::CaseIV);
        let s = InvariantSolution::case3_w4_small(ord(0.5), &p4, 0.2, 0.1, 0.0).unwrap();
        assert_eq!(s.eval(1.0, 0.5).unwrap(), (0.0, 0.0));
        let s = InvariantSolution::case3_w4_large(ord(2.0), &p4, 0.0, 0.0, &[0.0; 2], &[0.0; 2]).unwrap();
        assert_eq!(s.eval(1.0, 0.5).unwrap(), (0.0, 0.0));
        let s = InvariantSolution::case3_w5(ord(0.5), &p4, 1.0, 0.3, &[0.0], &[0.0]).unwrap();
        assert_eq!(s.eval(1.0, 0.5).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn construction_errors() {
        let p4 = profile("1", 0.0, 0.0, 0.0, (0.0, 2.0), ClassTag::CaseIV);
        let p3 = profile("1", 0.0, 0.0, 1.0, (0.0, 2.0), ClassTag::CaseIII);
        assert!(matches!(
            InvariantSolution::case2(ord(0.5), &p4, 1.0, &[1.0], &[0.0]),
            Err(SolutionError::WrongClass { .. })
        ));
        assert!(matches!(
            InvariantSolution::case2(ord(1.5), &p3, 1.0, &[1.0], &[0.0]),
            Err(SolutionError::ListLength { n: 2, .. })
        ));
        assert!(matches!(
            InvariantSolution::case3_w5(ord(0.5), &p4, 2.0, 0.0, &[1.0], &[0.0]),
            Err(SolutionError::Inadmissible { .. })
        ));
        assert!(matches!(
            InvariantSolution::case3_w4_small(ord(1.5), &p4, 0.0, 0.0, 1.0),
            Err(SolutionError::AlphaRange { .. })
        ));
        assert!(matches!(
            InvariantSolution::case3_w4_large(ord(0.5), &p4, 0.0, 0.0, &[1.0], &[0.0]),
            Err(SolutionError::AlphaRange { .. })
        ));
        for (a1, a2) in [(1.0, 0.3), (-1.0, -7.0), (0.0, 1.0), (0.0, -1.0), (0.0, 0.0)] {
            assert!(w5_admissible(a1, a2));
        }
        assert!(!w5_admissible(0.0, 0.5));
    }

    #[test]
    fn case2_degenerate_coupling() {
        // α = 1, a = 0: φ = c₁,₁ E₂,₁(0) = c₁,₁
        let p3 = profile("1", 0.0, 0.0, 1.0, (0.0, 2.0), ClassTag::CaseIII);
        let s = InvariantSolution::case2(ord(1.0), &p3, 0.0, &[2.5], &[0.0]).unwrap();
        for &t in &[0.1, 1.0, 3.0] {
            assert!((s.phi(t).unwrap() - 2.5).abs() < 1e-15);
        }
    }

    #[test]
    fn case2_structure() {
        // α = ½, a = 1, λ₂ = 1: φ(t) = t^{−1/2} E_{1,1/2}(2t)
        let p3 = profile("1", 0.0, 0.0, 1.0, (0.0, 2.0), ClassTag::CaseIII);
        let s = InvariantSolution::case2(ord(0.5), &p3, 1.0, &[1.0], &[0.0]).unwrap();
        let t: f64 = 0.6;
        let e = crate::specfun::mittag_leffler(1.0, 0.5, Complex64::new(2.0 * t, 0.0)).unwrap();
        assert!((s.phi(t).unwrap() - e.re / t.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn similarity_transform_examples() {
        let one: ReducedFn = Arc::new(|_| Ok(1.0));
        let zero: ReducedFn = Arc::new(|_| Ok(0.0));
        let p3 = profile("1", 0.0, 0.0, 1.0, (0.0, 2.0), ClassTag::CaseIII);
        let f = similarity_transform(Family::Case2, &p3, ord(0.5), Params::A(0.0), one.clone(), one.clone())
            .unwrap();
        for &x in &[0.0, 0.5, 2.0] {
            assert_eq!(f.eval(x, 0.3).unwrap(), (1.0, 1.0));
        }
        // Case1 with f ≡ 1, λ₁ = 0, β = 0: z = x^{−1/α} t
        let p2 = profile("1", 0.0, 0.0, 1.0, (0.0, 3.0), ClassTag::CaseII);
        let ident: ReducedFn = Arc::new(Ok);
        let f = similarity_transform(Family::Case1SmallAlpha, &p2, ord(0.5), Params::A(0.0), ident, zero.clone())
            .unwrap();
        let (u, _) = f.eval(2.0, 0.7).unwrap();
        assert!((u - 0.7 / 4.0).abs() < 1e-15);
        // W4 transform, φ ≡ 1, ψ ≡ 0, a₁ = a₂ = ½: u = v = ω₀
        let p4 = profile("1", 0.0, 0.0, 0.0, (0.0, 3.0), ClassTag::CaseIV);
        let f = similarity_transform(Family::Case3W4Large, &p4, ord(1.5), Params::Pair(0.5, 0.5), one, zero)
            .unwrap();
        for &x in &[0.5, 1.0, 1.5, 2.0, 2.5] {
            let (u, v) = f.eval(x, 0.4).unwrap();
            assert!((u - x).abs() < 1e-14 && (v - x).abs() < 1e-14);
        }
        assert!(matches!(f.eval(0.0, 0.4), Err(SolutionError::OmegaNonPositive { .. })));
    }

    #[test]
    fn c3_matches_display_form() {
        // u = ω₀^{a₁+a₂−1} c ω₀^{k/α} t^{α−k} φ_k(ω₀^{−1/α} t)/√f, k = 1
        let p4 = profile("1+x^2", 0.0, 0.0, 0.0, (0.0, 3.0), ClassTag::CaseIV);
        let (al, a1, a2) = (1.5, 0.2, -0.1);
        let s = InvariantSolution::case3_w4_large(ord(al), &p4, a1, a2, &[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let spec = crate::specfun::GenWrightSpec::new(
            vec![(-a1 - a2 - 1.0 / al + 1.0, 1.0), (1.0, 1.0)],
            vec![(al, al)],
        )
        .unwrap();
        let (x, t): (f64, f64) = (1.2, 0.5);
        let w = p4.omega0(x).unwrap();
        let z = w.powf(-1.0 / al) * t;
        let phik = crate::specfun::gen_wright(&spec, Complex64::new(-z.powf(al), 0.0))
            .unwrap()
            .re;
        let u = w.powf(a1 + a2 - 1.0) * w.powf(1.0 / al) * t.powf(al - 1.0) * phik
            / (1.0 + x * x).sqrt();
        let (su, sv) = s.eval(x, t).unwrap();
        assert!((su - u).abs() < 1e-13 * u.abs());
        assert!((sv - u * (1.0 + x * x).sqrt()).abs() < 1e-13 * sv.abs());
    }

    #[test]
    fn case1_large_radius_guard() {
        // α = 1: the ₃Ψ₁ blocks converge for |4z²| < 4
        let p2 = profile("1", 0.0, 1.0, 1.0, (0.0, 3.0), ClassTag::CaseII);
        let s = InvariantSolution::case1_large_alpha(ord(1.0), &p2, 0.0, &[1.0], &[0.0]).unwrap();
        assert!(s.phi(0.9).is_ok());
        assert!(matches!(
            s.phi(1.0),
            Err(SolutionError::SpecFun(SpecFunError::OutsideRadius { .. }))
        ));
    }

    #[test]
    fn w4_small_large_time_limit() {
        // argument → 0: u → c t^{(a₁−a₂)α}/Γ(1 + (a₁−a₂)α)/√f
        let p4 = profile("1", 0.0, 0.0, 0.0, (0.0, 3.0), ClassTag::CaseIV);
        let (a1, a2, c) = (0.6, 0.2, 1.3);
        let s = InvariantSolution::case3_w4_small(ord(0.5), &p4, a1, a2, c).unwrap();
        let t: f64 = 1e8;
        let q = (a1 - a2) * 0.5;
        let lim = c * t.powf(q) * crate::specfun::rgamma(1.0 + q);
        let (u, v) = s.eval(0.3, t).unwrap();
        assert!((u - lim).abs() < 1e-3 * lim);
        assert_eq!(v, -u);
    }
}
