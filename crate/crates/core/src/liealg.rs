//! Symmetry generators as polynomial vector fields in the canonical
//! coordinates (y, t, ũ, v), y = ω₀(x), ũ = √f u, with exact rational
//! coefficients.
//!
//! In these coordinates the Case IV basis reads
//!
//! V₁ = −y∂_y − (t/α)∂_t,  V₂ = −∂_y,  V₃ = ũ∂_ũ + v∂_v,  V₄ = v∂_ũ + ũ∂_v.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeffs::ClassTag;

/// Coordinate names in monomial order.
pub const VARIABLES: [&str; 4] = ["y", "t", "ũ", "v"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("alpha = {0} is not a finite positive number")]
    InvalidOrder(f64),
    #[error("no representatives for {0}")]
    NoRepresentatives(ClassTag),
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The exact rational value of a finite f64.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Multivariate polynomial in (y, t, ũ, v) with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<[u32; 4], BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0; 4])
    }

    /// The i-th coordinate as a polynomial.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(BigRational::one(), e)
    }

    pub fn monomial(c: BigRational, exps: [u32; 4]) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, c);
        p
    }

    fn add_term(&mut self, exps: [u32; 4], c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &BigRational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// ∂/∂(variable i)
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = *e;
            d[i] -= 1;
            out.add_term(d, c * rational(e[i] as i64));
        }
        out
    }

    pub fn eval(&self, point: [f64; 4]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = (0..4).map(|i| point[i].powi(e[i] as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &BigRational, first: bool, bare: bool) -> fmt::Result {
    let neg = c.is_negative();
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    let a = c.abs();
    if !(bare && a.is_one()) {
        if a.is_integer() {
            write!(f, "{}", a.numer())?;
        } else {
            write!(f, "({}/{})", a.numer(), a.denom())?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let constant = e.iter().all(|&x| x == 0);
            write_coeff(f, c, k == 0, !constant)?;
            let mut factors = Vec::new();
            for i in 0..4 {
                match e[i] {
                    0 => {}
                    1 => factors.push(VARIABLES[i].to_string()),
                    n => factors.push(format!("{}^{n}", VARIABLES[i])),
                }
            }
            f.write_str(&factors.join("·"))?;
        }
        Ok(())
    }
}

/// Σ components[i] ∂/∂(variable i).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyVectorField {
    pub components: [Poly; 4],
}

impl PolyVectorField {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(components: [Poly; 4]) -> Self {
        Self { components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// The field applied to a polynomial: Σ Aᵢ ∂ᵢp.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (i, a) in self.components.iter().enumerate() {
            out = out.add(&a.mul(&p.derivative(i)));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(std::array::from_fn(|i| self.components[i].add(&other.components[i])))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(std::array::from_fn(|i| self.components[i].sub(&other.components[i])))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(std::array::from_fn(|i| self.components[i].scale(c)))
    }

    /// Linear combination Σ cᵢ fieldsᵢ.
    pub fn combination(coeffs: &[BigRational], fields: &[PolyVectorField]) -> Self {
        coeffs
            .iter()
            .zip(fields)
            .fold(Self::zero(), |acc, (c, v)| acc.add(&v.scale(c)))
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, p) in self.components.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "({p})∂_{}", VARIABLES[i])?;
            first = false;
        }
        Ok(())
    }
}

/// [A, B] = A(B) − B(A), componentwise.
pub fn commutator(a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
    PolyVectorField::new(std::array::from_fn(|i| {
        a.apply(&b.components[i]).sub(&b.apply(&a.components[i]))
    }))
}

/// V₁, …, V₄ of the Case IV algebra at order α.
pub fn canonical_basis(alpha: &BigRational) -> [PolyVectorField; 4] {
    let m1 = -BigRational::one();
    let inv_alpha = alpha.recip();
    let v1 = PolyVectorField::new([
        Poly::var(0).scale(&m1),
        Poly::var(1).scale(&-inv_alpha),
        Poly::zero(),
        Poly::zero(),
    ]);
    let v2 = PolyVectorField::new([Poly::constant(m1), Poly::zero(), Poly::zero(), Poly::zero()]);
    let v3 = PolyVectorField::new([Poly::zero(), Poly::zero(), Poly::var(2), Poly::var(3)]);
    let v4 = PolyVectorField::new([Poly::zero(), Poly::zero(), Poly::var(3), Poly::var(2)]);
    [v1, v2, v3, v4]
}

/// Rational α for a floating order; every finite f64 is an exact rational.
pub fn alpha_rational(alpha: f64) -> Result<BigRational, LieError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(LieError::InvalidOrder(alpha));
    }
    rational_from_f64(alpha).ok_or(LieError::InvalidOrder(alpha))
}

/// Commutator table [Vᵢ, Vⱼ] in coordinates of the basis (row i, column j).
pub type Table = [[[BigRational; 4]; 4]; 4];

/// The commutator table of V₁–V₄: [V₁, V₂] = V₂, [V₂, V₁] = −V₂, all others 0.
pub fn reference_table() -> Table {
    let mut t: Table = std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero())));
    t[0][1][1] = rational(1);
    t[1][0][1] = rational(-1);
    t
}

/// Coordinates of `field` in `basis`, if it lies in their span.
pub fn decompose(field: &PolyVectorField, basis: &[PolyVectorField]) -> Option<Vec<BigRational>> {
    // one row per (component, monomial), one column per basis field
    let mut keys: Vec<(usize, [u32; 4])> = Vec::new();
    for v in basis.iter().chain(std::iter::once(field)) {
        for (i, p) in v.components.iter().enumerate() {
            for (e, _) in p.terms() {
                if !keys.contains(&(i, *e)) {
                    keys.push((i, *e));
                }
            }
        }
    }
    let coeff = |v: &PolyVectorField, k: &(usize, [u32; 4])| -> BigRational {
        v.components[k.0]
            .terms
            .get(&k.1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    };
    let n = basis.len();
    let mut rows: Vec<Vec<BigRational>> = keys
        .iter()
        .map(|k| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| coeff(b, k)).collect();
            r.push(coeff(field, k));
            r
        })
        .collect();
    // Gauss–Jordan elimination over the rationals
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].recip();
        for c in col..=n {
            rows[row][c] = &rows[row][c] * &inv;
        }
        for r in 0..rows.len() {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=n {
                    let sub = &factor * &rows[row][c];
                    rows[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = rows[r][n].clone();
    }
    Some(out)
}

/// Outcome of [`verify_table`]; indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub pass: bool,
    pub first_mismatch: Option<(usize, usize)>,
    /// [Bᵢ, Bⱼ] for the supplied fields.
    pub brackets: Vec<Vec<PolyVectorField>>,
    /// The same brackets in the coordinates of V₁–V₄, where they lie in the span.
    pub coordinates: Vec<Vec<Option<Vec<BigRational>>>>,
}

impl TableReport {
    /// Row i, column j rendered as a combination of V₁–V₄ (1-based).
    pub fn entry(&self, i: usize, j: usize) -> String {
        match &self.coordinates[i - 1][j - 1] {
            Some(c) => format_combination(c, "V"),
            None => format!("{}", self.brackets[i - 1][j - 1]),
        }
    }
}

/// Σ cᵢ·{prefix}ᵢ, e.g. "V2", "-V2 + (1/2)V3", "0".
pub fn format_combination(coeffs: &[BigRational], prefix: &str) -> String {
    let mut s = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let a = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if !a.is_one() {
            if a.is_integer() {
                s.push_str(&a.numer().to_string());
            } else {
                s.push_str(&format!("({}/{})", a.numer(), a.denom()));
            }
        }
        s.push_str(&format!("{prefix}{}", i + 1));
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Computes all 16 brackets of `fields` and compares them, as vector
/// fields, with the reference table built on V₁–V₄ at order α.
pub fn verify_table(fields: &[PolyVectorField; 4], alpha: &BigRational) -> TableReport {
    let v = canonical_basis(alpha);
    let reference = reference_table();
    let mut first = None;
    let mut brackets = Vec::new();
    let mut coordinates = Vec::new();
    for i in 0..4 {
        let mut row = Vec::new();
        let mut crow = Vec::new();
        for j in 0..4 {
            let b = commutator(&fields[i], &fields[j]);
            let expected = PolyVectorField::combination(&reference[i][j], &v);
            if first.is_none() && b != expected {
                first = Some((i + 1, j + 1));
            }
            crow.push(decompose(&b, &v));
            row.push(b);
        }
        brackets.push(row);
        coordinates.push(crow);
    }
    TableReport {
        pass: first.is_none(),
        first_mismatch: first,
        brackets,
        coordinates,
    }
}

/// Case II generators in (Y, t, ũ, v), Y = ω_{λ₁}: X₁ = ũ∂_ũ + v∂_v, X₂ = Y∂_Y.
pub fn case_ii_generators() -> [PolyVectorField; 2] {
    [
        PolyVectorField::new([Poly::zero(), Poly::zero(), Poly::var(2), Poly::var(3)]),
        PolyVectorField::new([Poly::var(0), Poly::zero(), Poly::zero(), Poly::zero()]),
    ]
}

/// Case III generators in (y, t, ũ, v): X₁ = ũ∂_ũ + v∂_v, X₃ = ∂_y.
pub fn case_iii_generators() -> [PolyVectorField; 2] {
    [
        PolyVectorField::new([Poly::zero(), Poly::zero(), Poly::var(2), Poly::var(3)]),
        PolyVectorField::new([Poly::constant(rational(1)), Poly::zero(), Poly::zero(), Poly::zero()]),
    ]
}

/// One member of an optimal system of one-dimensional subalgebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representative {
    pub label: &'static str,
    /// In the original generators X₁–X₆.
    pub in_x: &'static str,
    /// In V₁–V₄ (Case IV only).
    pub in_v: Option<&'static str>,
    pub parameters: &'static str,
    pub has_invariant_solutions: bool,
}

/// The optimal system of a symmetry class.
pub fn optimal_representatives(class: ClassTag) -> Result<Vec<Representative>, LieError> {
    let w1 = |in_v| Representative {
        label: "W1",
        in_x: "X1",
        in_v,
        parameters: "",
        has_invariant_solutions: false,
    };
    match class {
        ClassTag::CaseII => Ok(vec![
            w1(None),
            Representative {
                label: "W2",
                in_x: "X2 + a X1",
                in_v: None,
                parameters: "a real",
                has_invariant_solutions: true,
            },
        ]),
        ClassTag::CaseIII => Ok(vec![
            w1(None),
            Representative {
                label: "W3",
                in_x: "X3 + a X1",
                in_v: None,
                parameters: "a real",
                has_invariant_solutions: true,
            },
        ]),
        ClassTag::CaseIV => Ok(vec![
            w1(Some("V3")),
            Representative {
                label: "W4",
                in_x: "-a1 X1 - X4 - a2 X6",
                in_v: Some("V1 - a1 V3 - a2 V4"),
                parameters: "a1, a2 real",
                has_invariant_solutions: true,
            },
            Representative {
                label: "W5",
                in_x: "-a1 X1 - X5 - a2 X6",
                in_v: Some("V2 - a1 V3 - a2 V4"),
                parameters: "(a1, a2) in {(1, a), (-1, a), (0, 1), (0, -1), (0, 0)}, a real",
                has_invariant_solutions: true,
            },
            Representative {
                label: "W6",
                in_x: "a1 X1 + X6",
                in_v: Some("a1 V3 + V4"),
                parameters: "a1 real",
                has_invariant_solutions: false,
            },
        ]),
        ClassTag::Generic => Err(LieError::NoRepresentatives(class)),
    }
}

/// W₄, W₅ or W₆ as a vector field at order α; W₄ = V₁ − a₁V₃ − a₂V₄,
/// W₅ = V₂ − a₁V₃ − a₂V₄, W₆ = a₁V₃ + V₄.
pub fn case_iv_representative(
    label: &str,
    alpha: &BigRational,
    a1: &BigRational,
    a2: &BigRational,
) -> Option<PolyVectorField> {
    let v = canonical_basis(alpha);
    let z = BigRational::zero();
    let one = BigRational::one();
    let coeffs = match label {
        "W1" => vec![z.clone(), z.clone(), one, z],
        "W4" => vec![one, z, -a1.clone(), -a2.clone()],
        "W5" => vec![z, one, -a1.clone(), -a2.clone()],
        "W6" => vec![z.clone(), z, a1.clone(), one],
        _ => return None,
    };
    Some(PolyVectorField::combination(&coeffs, &v))
}
