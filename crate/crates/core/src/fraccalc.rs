//! Riemann–Liouville fractional derivative
//!
//! ```text
//! D^α f(t) = 1/Γ(n−α) · dⁿ/dtⁿ ∫_0^t (t−s)^{n−α−1} f(s) ds,   n−1 < α ≤ n
//! ```
//!
//! applied exactly to power functions ([`rl_power_rule`]), termwise to
//! finite fractional power series ([`rl_series`]) and numerically by product
//! integration on a graded mesh ([`rl_numeric`]).

use thiserror::Error;

use num_complex::Complex64;

use crate::specfun::series::Compensated;
use crate::specfun::{gamma, ln_gamma_signed, nonpositive_integer};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("fractional order must be positive and finite, got {0}")]
    InvalidOrder(f64),
    #[error("exponent {0} is not above -1; the kernel integral diverges")]
    ExponentTooLow(f64),
    #[error("non-finite series term ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("numeric scheme supports 0 < alpha < 1 only, got {0}")]
    UnsupportedOrder(f64),
    #[error("evaluation point must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("step must lie in (0, 1], got {0}")]
    InvalidStep(f64),
    #[error("sample function returned a non-finite value at s = {0}")]
    BadSample(f64),
}

/// Order α > 0 with its ceiling index n, n − 1 < α ≤ n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    n: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(FracError::InvalidOrder(alpha));
        }
        let n = alpha.ceil() as u32;
        debug_assert!((n as f64) - 1.0 < alpha && alpha <= n as f64);
        Ok(Self { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// D^α t^μ = Γ(μ+1)/Γ(μ+1−α) · t^{μ−α}; returns (coefficient, exponent).
///
/// The coefficient is exactly 0 when μ + 1 − α is a nonpositive integer.
pub fn rl_power_rule(order: FracOrder, mu: f64) -> Result<(f64, f64), FracError> {
    if !(mu > -1.0) || !mu.is_finite() {
        return Err(FracError::ExponentTooLow(mu));
    }
    let alpha = order.alpha;
    let exponent = mu - alpha;
    if alpha == order.n as f64 {
        let c = (0..order.n).map(|j| mu - j as f64).product();
        return Ok((c, exponent));
    }
    if nonpositive_integer(mu + 1.0 - alpha).is_some() {
        return Ok((0.0, exponent));
    }
    let (l1, s1) = ln_gamma_signed(mu + 1.0).map_err(|_| FracError::ExponentTooLow(mu))?;
    let (l2, s2) = ln_gamma_signed(mu + 1.0 - alpha).map_err(|_| FracError::ExponentTooLow(mu))?;
    Ok((s1 * s2 * (l1 - l2).exp(), exponent))
}

/// Exponents closer than this (relative, floor 1) are the same power.
pub const EXPONENT_SNAP: f64 = 1e-12;

fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXPONENT_SNAP * a.abs().max(1.0)
}

/// Finite sum Σ c_m z^{γ_m} with strictly increasing exponents.
///
/// A series built from a truncated infinite expansion carries a horizon:
/// every power below it is complete, powers at or above it are not.
#[derive(Debug, Clone, PartialEq)]
pub struct FracPowerSeries {
    terms: Vec<(f64, f64)>,
    horizon: f64,
}

impl Default for FracPowerSeries {
    fn default() -> Self {
        Self::zero()
    }
}

impl FracPowerSeries {
    pub fn zero() -> Self {
        Self {
            terms: Vec::new(),
            horizon: f64::INFINITY,
        }
    }

    /// Builds a series from (coefficient, exponent) pairs. Equal exponents
    /// are merged and zero coefficients dropped; every exponent must exceed −1.
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self, FracError> {
        for &(c, g) in &terms {
            if !(c.is_finite() && g.is_finite()) {
                return Err(FracError::NonFinite(c, g));
            }
            if c != 0.0 && g <= -1.0 {
                return Err(FracError::ExponentTooLow(g));
            }
        }
        Ok(Self::normalized(terms, f64::INFINITY))
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Result<Self, FracError> {
        Self::new(vec![(coeff, exponent)])
    }

    fn normalized(mut terms: Vec<(f64, f64)>, horizon: f64) -> Self {
        terms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(terms.len());
        for (c, g) in terms {
            match out.last_mut() {
                Some(last) if same_exponent(last.1, g) => last.0 += c,
                _ => out.push((c, g)),
            }
        }
        out.retain(|&(c, g)| c != 0.0 && g < horizon);
        Self {
            terms: out,
            horizon,
        }
    }

    /// Declares every power at or above `h` incomplete and drops those terms.
    pub fn with_horizon(self, h: f64) -> Self {
        let h = h.min(self.horizon);
        Self::normalized(self.terms, h)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// (coefficient, exponent) pairs in increasing exponent order.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Self::normalized(t, self.horizon.min(other.horizon))
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self {
                terms: Vec::new(),
                horizon: self.horizon,
            };
        }
        Self {
            terms: self.terms.iter().map(|&(a, g)| (a * c, g)).collect(),
            horizon: self.horizon,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Multiplies by c·z^γ.
    pub fn mul_monomial(&self, c: f64, gamma: f64) -> Self {
        let terms = self.terms.iter().map(|&(a, g)| (a * c, g + gamma)).collect();
        Self::normalized(terms, self.horizon + gamma)
    }

    /// Euler operator z·d/dz: z^γ ↦ γ z^γ.
    pub fn euler(&self) -> Self {
        let terms = self.terms.iter().map(|&(a, g)| (a * g, g)).collect();
        Self::normalized(terms, self.horizon)
    }

    /// Value at z > 0.
    pub fn eval(&self, z: f64) -> f64 {
        self.terms.iter().map(|&(c, g)| c * z.powf(g)).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    /// Copy with the i-th stored term multiplied by `factor`.
    pub fn with_term_scaled(&self, i: usize, factor: f64) -> Self {
        let mut out = self.clone();
        if let Some(t) = out.terms.get_mut(i) {
            t.0 *= factor;
        }
        out
    }

    /// Coefficient of z^γ (0 if absent).
    pub fn coeff(&self, gamma: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| same_exponent(t.1, gamma))
            .map(|t| t.0)
            .unwrap_or(0.0)
    }
}

/// Termwise D^α; terms whose coefficient vanishes by a gamma pole are dropped.
pub fn rl_series(order: FracOrder, s: &FracPowerSeries) -> Result<FracPowerSeries, FracError> {
    let mut out = Vec::with_capacity(s.terms.len());
    for &(c, g) in &s.terms {
        let (k, e) = rl_power_rule(order, g)?;
        if k != 0.0 {
            out.push((c * k, e));
        }
    }
    Ok(FracPowerSeries::normalized(out, s.horizon - order.alpha))
}

/// Weighted sum of series that should cancel, with per-power bookkeeping
/// of the largest contribution.
#[derive(Debug, Clone)]
pub struct Cancellation {
    /// (exponent, residual coefficient, largest |contribution|)
    pub powers: Vec<(f64, f64, f64)>,
    pub horizon: f64,
}

impl Cancellation {
    pub fn new(parts: &[(f64, &FracPowerSeries)]) -> Self {
        let horizon = parts
            .iter()
            .map(|p| p.1.horizon)
            .fold(f64::INFINITY, f64::min);
        // exponents at the horizon up to rounding are not checked
        let cutoff = if horizon.is_finite() {
            horizon - EXPONENT_SNAP * (1.0 + horizon.abs())
        } else {
            horizon
        };
        let mut all: Vec<(f64, f64)> = Vec::new();
        for &(w, s) in parts {
            for &(c, g) in &s.terms {
                if g < cutoff {
                    all.push((g, w * c));
                }
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut powers: Vec<(f64, f64, f64)> = Vec::new();
        let mut sums: Vec<Compensated> = Vec::new();
        for (g, v) in all {
            match powers.last_mut() {
                Some(last) if same_exponent(last.0, g) => {
                    last.2 = last.2.max(v.abs());
                    sums.last_mut().expect("paired").add(Complex64::new(v, 0.0));
                }
                _ => {
                    powers.push((g, 0.0, v.abs()));
                    let mut s = Compensated::default();
                    s.add(Complex64::new(v, 0.0));
                    sums.push(s);
                }
            }
        }
        for (p, s) in powers.iter_mut().zip(sums) {
            p.1 = s.value().re;
        }
        Self { powers, horizon }
    }

    /// Largest |residual coefficient|.
    pub fn max_abs(&self) -> f64 {
        self.powers.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
    }

    /// Largest |contribution| over all powers.
    pub fn scale(&self) -> f64 {
        self.powers.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    /// Largest residual relative to the biggest contribution at its own power.
    pub fn max_rel(&self) -> f64 {
        self.powers
            .iter()
            .filter(|p| p.2 > 0.0)
            .map(|p| p.1.abs() / p.2)
            .fold(0.0, f64::max)
    }

    pub fn powers_checked(&self) -> usize {
        self.powers.len()
    }
}

/// Numeric D^α f(t) for 0 < α < 1 by product integration.
///
/// N = round(1/h) cells, see [`graded_mesh`]. The power law c s^γ through
/// (s_1, f(s_1)), with γ = `leading_power` declared by the caller, stands in
/// for f on the first cell and is differentiated exactly. The remainder
/// f − c s^γ is interpolated linearly on the other cells and its derivative
/// is integrated exactly against the kernel.
pub fn rl_numeric<F>(
    order: FracOrder,
    samples: F,
    t: f64,
    h: f64,
    leading_power: f64,
) -> Result<f64, FracError>
where
    F: Fn(f64) -> f64,
{
    let nodes = rl_mesh(order, t, h)?;
    let values: Vec<f64> = nodes[1..].iter().map(|&s| samples(s)).collect();
    rl_from_samples(order, &nodes, &values, leading_power)
}

/// Mesh used by [`rl_numeric`] for step h at the point t.
pub fn rl_mesh(order: FracOrder, t: f64, h: f64) -> Result<Vec<f64>, FracError> {
    let alpha = order.alpha;
    if order.n != 1 || alpha >= 1.0 {
        return Err(FracError::UnsupportedOrder(alpha));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(FracError::NonPositiveTime(t));
    }
    if !(h > 0.0 && h <= 1.0) {
        return Err(FracError::InvalidStep(h));
    }
    let n = (1.0 / h).round().max(2.0) as usize;
    Ok(graded_mesh(t, n, 2.0 / alpha))
}

/// The product-integration step of [`rl_numeric`] on precomputed samples:
/// `values[j]` is f at `nodes[j + 1]`, and D^α f is taken at the last node.
pub fn rl_from_samples(
    order: FracOrder,
    nodes: &[f64],
    values: &[f64],
    leading_power: f64,
) -> Result<f64, FracError> {
    let alpha = order.alpha;
    if order.n != 1 || alpha >= 1.0 {
        return Err(FracError::UnsupportedOrder(alpha));
    }
    if !(leading_power > -1.0) {
        return Err(FracError::ExponentTooLow(leading_power));
    }
    let n = nodes.len() - 1;
    if n < 2 || values.len() != n {
        return Err(FracError::InvalidStep(1.0 / n.max(1) as f64));
    }
    let t = nodes[n];
    if !(t > 0.0 && t.is_finite()) {
        return Err(FracError::NonPositiveTime(t));
    }
    if let Some(j) = values.iter().position(|v| !v.is_finite()) {
        return Err(FracError::BadSample(nodes[j + 1]));
    }
    let s1 = nodes[1];
    let c = values[0] / s1.powf(leading_power);
    let (k, _) = rl_power_rule(order, leading_power)?;
    let fit = |s: f64| c * s.powf(leading_power);

    // the remainder f − c s^γ vanishes at 0 and s_1 and is linear in between
    let e = 1.0 - alpha;
    let mut lin = Compensated::default();
    for j in 1..n {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let ga = values[j - 1] - fit(a);
        let gb = values[j] - fit(b);
        // (t−a)^e − (t−b)^e without cancellation on tiny cells
        let w = -(t - a).powf(e) * (e * (-(b - a) / (t - a)).ln_1p()).exp_m1();
        lin.add(Complex64::new((gb - ga) / (b - a) * w, 0.0));
    }
    Ok(c * k * t.powf(leading_power - alpha) + lin.value().re / gamma(2.0 - alpha))
}

/// Nodes 0 = s_0 < … < s_n = t, graded as (j/n)^r toward 0 over the first
/// half of [0, t] and quadratically toward t over the second half.
pub fn graded_mesh(t: f64, n: usize, r: f64) -> Vec<f64> {
    let half = n / 2;
    let m = n - half;
    let mut nodes = Vec::with_capacity(n + 1);
    for j in 0..=half {
        nodes.push(0.5 * t * (j as f64 / half as f64).powf(r));
    }
    for j in (0..m).rev() {
        let x = j as f64 / m as f64;
        nodes.push(t - 0.5 * t * x * x);
    }
    nodes
}
