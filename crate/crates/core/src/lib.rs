//! Special functions, Riemann–Liouville operators and closed-form invariant
//! solutions for the time-fractional telegraph system
//!
//! ```text
//! D_t^α u = v_x
//! D_t^α v = f(x) u_x + g(x) u
//! ```
//!
//! with variable coefficients `f > 0` and `g`.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`specfun`]: complex log-gamma, Mittag–Leffler, Wright, generalized
//!   Wright and Fox H-functions (contour and residue evaluation).
//! * [`fraccalc`]: the Riemann–Liouville derivative, exactly on fractional
//!   power series and numerically by product integration.
//! * [`coeffs`]: coefficient expressions `f(x)`, `g(x)`, the integral
//!   `ω(x)` and the classification of `(f, g)` into symmetry classes.
//! * [`solutions`]: the invariant-solution families, similarity transforms,
//!   residual checks and the action of the symmetry groups.
//! * [`liealg`]: generators as polynomial vector fields in canonical
//!   coordinates, exact commutators and the optimal-system data.

pub mod coeffs;
pub mod fraccalc;
pub mod liealg;
pub mod quad;
pub mod solutions;
pub mod specfun;

pub use num_complex::Complex64;
