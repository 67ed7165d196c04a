//! Termwise and numeric residuals of invariant solutions.

use std::fmt;

use rayon::prelude::*;

use super::{Family, Field, InvariantSolution, SolutionError};
use crate::coeffs::g_for_class;
use crate::fraccalc::{
    rl_from_samples, rl_mesh, rl_series, Cancellation, FracOrder, FracPowerSeries,
};

/// Series terms per block when none is requested.
pub const DEFAULT_SERIES_TERMS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMethod {
    Termwise,
    Numeric,
}

impl fmt::Display for ResidualMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualMethod::Termwise => "termwise",
            ResidualMethod::Numeric => "numeric",
        })
    }
}

/// Maxima of the two residuals over a grid or over the checked powers.
///
/// Termwise: `max_res_*` is the largest residual coefficient, `rel_*` the
/// largest residual divided by the biggest contribution at the same power,
/// `scale` the largest contribution overall.
/// Numeric: `max_res_*` is the largest pointwise residual, `scale` is
/// max(|u|, |v|) over the grid and `rel_* = max_res_* / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub method: ResidualMethod,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub max_res_eq1: f64,
    pub max_res_eq2: f64,
    pub rel_eq1: f64,
    pub rel_eq2: f64,
    pub scale: f64,
    pub powers_checked: usize,
}

impl ResidualReport {
    pub fn max_rel(&self) -> f64 {
        self.rel_eq1.max(self.rel_eq2)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_res_eq1.max(self.max_res_eq2)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel() <= tol
    }
}

/// Reduced system satisfied by (φ, ψ) in the similarity variable z:
///
/// `Coupled`: D^αφ = a₁ψ + (b₁/α) zψ′, D^αψ = a₂φ + (b₂/α) zφ′.
/// `Split`:   D^αφ = a_φ φ + (b_φ/α) zφ′, D^αψ = a_ψ ψ + (b_ψ/α) zψ′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReducedForm {
    Coupled { a1: f64, b1: f64, a2: f64, b2: f64 },
    Split { a_phi: f64, b_phi: f64, a_psi: f64, b_psi: f64 },
}

/// φ, ψ expanded to fractional power series, with their reduced system.
#[derive(Debug, Clone)]
pub struct ReducedSeries {
    pub phi: FracPowerSeries,
    pub psi: FracPowerSeries,
    pub form: ReducedForm,
    pub order: FracOrder,
}

impl ReducedSeries {
    /// Per-power cancellation of both equations.
    pub fn residual(&self) -> Result<(Cancellation, Cancellation), SolutionError> {
        let al = self.order.alpha();
        let dphi = rl_series(self.order, &self.phi)?;
        let dpsi = rl_series(self.order, &self.psi)?;
        let ephi = self.phi.euler();
        let epsi = self.psi.euler();
        Ok(match self.form {
            ReducedForm::Coupled { a1, b1, a2, b2 } => (
                Cancellation::new(&[(1.0, &dphi), (-a1, &self.psi), (-b1 / al, &epsi)]),
                Cancellation::new(&[(1.0, &dpsi), (-a2, &self.phi), (-b2 / al, &ephi)]),
            ),
            ReducedForm::Split {
                a_phi,
                b_phi,
                a_psi,
                b_psi,
            } => (
                Cancellation::new(&[(1.0, &dphi), (-a_phi, &self.phi), (-b_phi / al, &ephi)]),
                Cancellation::new(&[(1.0, &dpsi), (-a_psi, &self.psi), (-b_psi / al, &epsi)]),
            ),
        })
    }

    /// Termwise report of [`ReducedSeries::residual`].
    pub fn report(&self) -> Result<ResidualReport, SolutionError> {
        let (e1, e2) = self.residual()?;
        Ok(ResidualReport {
            method: ResidualMethod::Termwise,
            xs: Vec::new(),
            ts: Vec::new(),
            max_res_eq1: e1.max_abs(),
            max_res_eq2: e2.max_abs(),
            rel_eq1: e1.max_rel(),
            rel_eq2: e2.max_rel(),
            scale: e1.scale().max(e2.scale()),
            powers_checked: e1.powers_checked() + e2.powers_checked(),
        })
    }

    /// Copy with the i-th term of φ multiplied by `factor`.
    pub fn perturb_phi(&self, i: usize, factor: f64) -> Self {
        Self {
            phi: self.phi.with_term_scaled(i, factor),
            ..self.clone()
        }
    }

    /// Copy with the i-th term of ψ multiplied by `factor`.
    pub fn perturb_psi(&self, i: usize, factor: f64) -> Self {
        Self {
            psi: self.psi.with_term_scaled(i, factor),
            ..self.clone()
        }
    }
}

fn expand(
    blocks: &[super::blocks::Block],
    terms: usize,
) -> Result<FracPowerSeries, SolutionError> {
    let mut all = Vec::new();
    let mut horizon = f64::INFINITY;
    for b in blocks {
        if b.weight == 0.0 {
            continue;
        }
        let (t, next) = b.expand(terms)?;
        all.extend(t);
        horizon = horizon.min(next);
    }
    Ok(FracPowerSeries::new(all)?.with_horizon(horizon))
}

impl InvariantSolution {
    /// The reduced system (φ, ψ) satisfy.
    pub fn reduced_form(&self) -> ReducedForm {
        let lambda2 = self.profile.lambda2;
        match (self.family, self.params) {
            (Family::Case2, super::Params::A(a)) => ReducedForm::Coupled {
                a1: a,
                b1: 0.0,
                a2: a + lambda2,
                b2: 0.0,
            },
            (Family::Case1SmallAlpha | Family::Case1LargeAlpha, super::Params::A(a)) => {
                ReducedForm::Coupled {
                    a1: a,
                    b1: -1.0,
                    a2: a + lambda2,
                    b2: -1.0,
                }
            }
            (Family::Case3W4Small | Family::Case3W4Large, super::Params::Pair(a1, a2)) => {
                ReducedForm::Split {
                    a_phi: a1 + a2,
                    b_phi: -1.0,
                    a_psi: a2 - a1,
                    b_psi: 1.0,
                }
            }
            (Family::Case3W5, super::Params::Pair(a1, a2)) => ReducedForm::Split {
                a_phi: a1 + a2,
                b_phi: 0.0,
                a_psi: a2 - a1,
                b_psi: 0.0,
            },
            _ => unreachable!("parameters are checked at construction"),
        }
    }

    /// φ, ψ truncated to `terms` terms per block.
    pub fn reduced_series(&self, terms: usize) -> Result<ReducedSeries, SolutionError> {
        let (phi, psi) = self
            .reduced_blocks()
            .ok_or(SolutionError::NotSeriesBacked(self.family))?;
        Ok(ReducedSeries {
            phi: expand(phi, terms)?,
            psi: expand(psi, terms)?,
            form: self.reduced_form(),
            order: self.order,
        })
    }
}

/// Termwise residual of the reduced system through [`DEFAULT_SERIES_TERMS`] terms.
pub fn reduced_residual_termwise(sol: &InvariantSolution) -> Result<ResidualReport, SolutionError> {
    sol.reduced_series(DEFAULT_SERIES_TERMS)?.report()
}

fn check_alpha(order: FracOrder) -> Result<(), SolutionError> {
    let al = order.alpha();
    if !(al < 1.0) {
        return Err(SolutionError::Unsupported(format!(
            "numeric residuals need 0 < alpha < 1, got {al}; use the termwise check"
        )));
    }
    Ok(())
}

fn check_grid(ts: &[f64]) -> Result<(), SolutionError> {
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(SolutionError::InvalidGrid(format!(
            "time grid must exclude t = 0, found {t}"
        )));
    }
    Ok(())
}

/// d/dx by five-point stencils, central where the points fit in [lo, hi].
fn derivative5(
    f: &dyn Fn(f64) -> Result<f64, SolutionError>,
    x: f64,
    hx: f64,
    lo: f64,
    hi: f64,
) -> Result<f64, SolutionError> {
    if x - 2.0 * hx >= lo && x + 2.0 * hx <= hi {
        let (m2, m1, p1, p2) = (f(x - 2.0 * hx)?, f(x - hx)?, f(x + hx)?, f(x + 2.0 * hx)?);
        return Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * hx));
    }
    let s = if x - 2.0 * hx < lo { hx } else { -hx };
    let v: Vec<f64> = (0..5)
        .map(|k| f(x + k as f64 * s))
        .collect::<Result<_, _>>()?;
    Ok((-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * s))
}

/// Residuals and field values at one (x, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResidual {
    /// D^α u − v_x
    pub eq1: f64,
    /// D^α v − f u_x − g u
    pub eq2: f64,
    pub u: f64,
    pub v: f64,
}

/// Step of the x-differences: 5·10⁻⁴ of the domain width.
fn x_step(field: &dyn Field) -> f64 {
    let (lo, hi) = field.profile().domain;
    5e-4 * (hi - lo)
}

/// Pointwise residuals of D^α u = v_x, D^α v = f u_x + g u with RL step h.
pub fn pde_residual_at(
    field: &dyn Field,
    x: f64,
    t: f64,
    h: f64,
) -> Result<PointResidual, SolutionError> {
    let order = field.order();
    check_alpha(order)?;
    check_grid(&[t])?;
    let profile = field.profile();
    let g = g_for_class(profile)?;
    let (lo, hi) = profile.domain;
    let nodes = rl_mesh(order, t, h)?;
    let samples = field.eval_along(x, &nodes[1..])?;
    let (uu, vv): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let (gu, gv) = field.leading_powers();
    let du = rl_from_samples(order, &nodes, &uu, gu)?;
    let dv = rl_from_samples(order, &nodes, &vv, gv)?;
    let (u, v) = *samples.last().expect("mesh has nodes");
    let hx = x_step(field);
    let vx = derivative5(&|s| Ok(field.eval(s, t)?.1), x, hx, lo, hi)?;
    let ux = derivative5(&|s| Ok(field.eval(s, t)?.0), x, hx, lo, hi)?;
    let (f, _) = profile.f_d(x)?;
    let gx = g.eval(x)?;
    Ok(PointResidual {
        eq1: du - vx,
        eq2: dv - f * ux - gx * u,
        u,
        v,
    })
}

/// Maximum residuals of the original system over xs × ts.
pub fn pde_residual_numeric(
    field: &dyn Field,
    xs: &[f64],
    ts: &[f64],
    h: f64,
) -> Result<ResidualReport, SolutionError> {
    check_alpha(field.order())?;
    check_grid(ts)?;
    if xs.is_empty() || ts.is_empty() {
        return Err(SolutionError::InvalidGrid("empty grid".into()));
    }
    for &x in xs {
        field.profile().check_x(x)?;
    }
    let points: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| ts.iter().map(move |&t| (x, t)))
        .collect();
    let res: Vec<PointResidual> = points
        .par_iter()
        .map(|&(x, t)| pde_residual_at(field, x, t, h))
        .collect::<Result<_, _>>()?;
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    let mut scale = 0.0f64;
    for p in &res {
        r1 = r1.max(p.eq1.abs());
        r2 = r2.max(p.eq2.abs());
        scale = scale.max(p.u.abs()).max(p.v.abs());
    }
    let rel = |r: f64| if scale > 0.0 { r / scale } else { r };
    Ok(ResidualReport {
        method: ResidualMethod::Numeric,
        xs: xs.to_vec(),
        ts: ts.to_vec(),
        max_res_eq1: r1,
        max_res_eq2: r2,
        rel_eq1: rel(r1),
        rel_eq2: rel(r2),
        scale,
        powers_checked: 0,
    })
}

/// Numeric residual of the reduced system on a z-grid, for any family with
/// 0 < α < 1. z-derivatives use five-point differences with step 10⁻³·z.
pub fn reduced_residual_numeric(
    sol: &InvariantSolution,
    zs: &[f64],
    h: f64,
) -> Result<ResidualReport, SolutionError> {
    let order = sol.order;
    check_alpha(order)?;
    check_grid(zs)?;
    let al = order.alpha();
    let form = sol.reduced_form();
    let (lphi, lpsi) = sol.reduced_leading_powers();
    let rows: Vec<(f64, f64, f64)> = zs
        .par_iter()
        .map(|&z| -> Result<(f64, f64, f64), SolutionError> {
            let nodes = rl_mesh(order, z, h)?;
            let mut ph = Vec::with_capacity(nodes.len() - 1);
            let mut ps = Vec::with_capacity(nodes.len() - 1);
            for &s in &nodes[1..] {
                ph.push(sol.phi(s)?);
                ps.push(sol.psi(s)?);
            }
            let dphi = rl_from_samples(order, &nodes, &ph, lphi)?;
            let dpsi = rl_from_samples(order, &nodes, &ps, lpsi)?;
            let hz = 1e-3 * z;
            let phi_z = derivative5(&|s| sol.phi(s), z, hz, 0.0, f64::INFINITY)?;
            let psi_z = derivative5(&|s| sol.psi(s), z, hz, 0.0, f64::INFINITY)?;
            let (phi, psi) = (*ph.last().expect("nodes"), *ps.last().expect("nodes"));
            let (r1, r2) = match form {
                ReducedForm::Coupled { a1, b1, a2, b2 } => (
                    dphi - a1 * psi - b1 / al * z * psi_z,
                    dpsi - a2 * phi - b2 / al * z * phi_z,
                ),
                ReducedForm::Split {
                    a_phi,
                    b_phi,
                    a_psi,
                    b_psi,
                } => (
                    dphi - a_phi * phi - b_phi / al * z * phi_z,
                    dpsi - a_psi * psi - b_psi / al * z * psi_z,
                ),
            };
            Ok((r1, r2, phi.abs().max(psi.abs())))
        })
        .collect::<Result<_, _>>()?;
    let r1 = rows.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
    let r2 = rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let scale = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let rel = |r: f64| if scale > 0.0 { r / scale } else { r };
    Ok(ResidualReport {
        method: ResidualMethod::Numeric,
        xs: Vec::new(),
        ts: zs.to_vec(),
        max_res_eq1: r1,
        max_res_eq2: r2,
        rel_eq1: rel(r1),
        rel_eq2: rel(r2),
        scale,
        powers_checked: 0,
    })
}
