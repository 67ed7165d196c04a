//! Coefficient expressions f(x), g(x) and the symmetry classes of
//!
//! ```text
//! D_t^α u = v_x,   D_t^α v = f(x) u_x + g(x) u,   f > 0.
//! ```
//!
//! Expressions use a small grammar: numbers, `x`, `pi`, `e`, `+ - * / ^`,
//! unary minus, parentheses and the functions `exp`, `ln`, `sqrt`.
//! `^` binds tighter than unary minus and associates to the right.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::quad::{gauss_kronrod, QuadError, QuadOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error at x = {x}: {message}")]
    Domain { x: f64, message: String },
    #[error("f must be positive, but f({x}) = {value}")]
    NonPositiveF { x: f64, value: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("g has no closed form for the generic class")]
    GenericClass,
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("omega = {y} is not attained on the domain (range [{lo}, {hi}])")]
    OmegaOutOfRange { y: f64, lo: f64, hi: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Named constant (`pi`, `e`), kept by name for printing.
    Named(&'static str, f64),
    X,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed coefficient expression.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffExpr {
    ast: Expr,
}

impl CoeffExpr {
    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn from_ast(ast: Expr) -> Self {
        Self { ast }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            ast: Expr::Const(c),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, CoeffError> {
        Ok(eval_d(self, x)?.0)
    }

    /// True when the expression does not depend on x.
    pub fn is_constant(&self) -> bool {
        !mentions_x(&self.ast)
    }
}

fn mentions_x(e: &Expr) -> bool {
    match e {
        Expr::X => true,
        Expr::Const(_) | Expr::Named(..) => false,
        Expr::Neg(a) | Expr::Call(_, a) => mentions_x(a),
        Expr::Bin(_, a, b) => mentions_x(a) || mentions_x(b),
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, CoeffError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| CoeffError::Syntax {
                    offset: start,
                    message: format!("malformed number '{text}'"),
                })?;
                out.push((Tok::Num(v), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(ch as char), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            _ => {
                let c = src[i..].chars().next().unwrap_or('?');
                return Err(CoeffError::Syntax {
                    offset: i,
                    message: format!("unexpected character '{c}'"),
                });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, CoeffError> {
        Err(CoeffError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, CoeffError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, CoeffError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, CoeffError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, CoeffError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CoeffError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Named("pi", std::f64::consts::PI)),
                "e" => Ok(Expr::Named("e", std::f64::consts::E)),
                "exp" | "ln" | "sqrt" => {
                    let f = match name.as_str() {
                        "exp" => Func::Exp,
                        "ln" => Func::Ln,
                        _ => Func::Sqrt,
                    };
                    if *self.peek() != Tok::LParen {
                        return self.error(format!("expected '(' after {name}"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                _ => Err(CoeffError::UnknownIdentifier { name, offset }),
            },
            Tok::End => Err(CoeffError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
            Tok::RParen => Err(CoeffError::Syntax {
                offset,
                message: "unexpected ')'".into(),
            }),
            Tok::Op(c) => Err(CoeffError::Syntax {
                offset,
                message: format!("unexpected operator '{c}'"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), CoeffError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            Tok::End => self.error("missing ')'"),
            _ => self.error("expected ')'"),
        }
    }
}

/// Parses an expression in x.
pub fn parse(text: &str) -> Result<CoeffExpr, CoeffError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(CoeffExpr { ast })
}

impl std::str::FromStr for CoeffExpr {
    type Err = CoeffError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------- printing

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
        if prec(e) < min {
            f.write_str("(")?;
            write_expr(e, f)?;
            f.write_str(")")
        } else {
            write_expr(e, f)
        }
    };
    match e {
        Expr::Const(v) => {
            if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                write!(f, "({v:?})")
            } else {
                write!(f, "{v:?}")
            }
        }
        Expr::Named(n, _) => f.write_str(n),
        Expr::X => f.write_str("x"),
        Expr::Neg(a) => {
            f.write_str("-")?;
            wrap(a, 3, f)
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            f.write_str(")")
        }
        Expr::Bin(op, a, b) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Add => (" + ", 1, 2),
                BinOp::Sub => (" - ", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                BinOp::Pow => ("^", 5, 3),
            };
            wrap(a, lmin, f)?;
            f.write_str(sym)?;
            wrap(b, rmin, f)
        }
    }
}

/// Canonical form: minimal parentheses, numbers in shortest round-trip form.
impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.ast, f)
    }
}

// ---------------------------------------------------------------- evaluation

#[derive(Debug, Clone, Copy)]
struct Dual(f64, f64);

fn dom<T>(x: f64, message: impl Into<String>) -> Result<T, CoeffError> {
    Err(CoeffError::Domain {
        x,
        message: message.into(),
    })
}

fn eval_dual(e: &Expr, x: f64) -> Result<Dual, CoeffError> {
    let d = match e {
        Expr::Const(v) | Expr::Named(_, v) => Dual(*v, 0.0),
        Expr::X => Dual(x, 1.0),
        Expr::Neg(a) => {
            let a = eval_dual(a, x)?;
            Dual(-a.0, -a.1)
        }
        Expr::Call(func, a) => {
            let a = eval_dual(a, x)?;
            match func {
                Func::Exp => {
                    let v = a.0.exp();
                    Dual(v, v * a.1)
                }
                Func::Ln => {
                    if a.0 <= 0.0 {
                        return dom(x, format!("ln of nonpositive value {}", a.0));
                    }
                    Dual(a.0.ln(), a.1 / a.0)
                }
                Func::Sqrt => {
                    if a.0 < 0.0 {
                        return dom(x, format!("sqrt of negative value {}", a.0));
                    }
                    let v = a.0.sqrt();
                    if v == 0.0 {
                        if a.1 != 0.0 {
                            return dom(x, "sqrt is not differentiable at 0");
                        }
                        Dual(0.0, 0.0)
                    } else {
                        Dual(v, 0.5 * a.1 / v)
                    }
                }
            }
        }
        Expr::Bin(op, a, b) => {
            let p = eval_dual(a, x)?;
            let q = eval_dual(b, x)?;
            match op {
                BinOp::Add => Dual(p.0 + q.0, p.1 + q.1),
                BinOp::Sub => Dual(p.0 - q.0, p.1 - q.1),
                BinOp::Mul => Dual(p.0 * q.0, p.1 * q.0 + p.0 * q.1),
                BinOp::Div => {
                    if q.0 == 0.0 {
                        return dom(x, "division by zero");
                    }
                    Dual(p.0 / q.0, (p.1 * q.0 - p.0 * q.1) / (q.0 * q.0))
                }
                BinOp::Pow => pow_dual(p, q, !mentions_x(b), x)?,
            }
        }
    };
    if !(d.0.is_finite() && d.1.is_finite()) {
        return dom(x, "non-finite value");
    }
    Ok(d)
}

fn pow_dual(p: Dual, q: Dual, const_exp: bool, x: f64) -> Result<Dual, CoeffError> {
    let n = q.0;
    if const_exp {
        let is_int = n.fract() == 0.0;
        if p.0 < 0.0 && !is_int {
            return dom(x, format!("non-integer power {n} of negative value {}", p.0));
        }
        if p.0 == 0.0 {
            if n < 0.0 {
                return dom(x, "negative power of zero");
            }
            if n == 0.0 {
                return Ok(Dual(1.0, 0.0));
            }
            // derivative n·0^{n−1}·p′
            let d = if n == 1.0 {
                p.1
            } else if n > 1.0 || p.1 == 0.0 {
                0.0
            } else {
                return dom(x, "power is not differentiable at 0");
            };
            return Ok(Dual(0.0, d));
        }
        let v = if is_int && n.abs() < 2f64.powi(31) {
            p.0.powi(n as i32)
        } else {
            p.0.powf(n)
        };
        let dv = if n == 0.0 {
            0.0
        } else if is_int && (n - 1.0).abs() < 2f64.powi(31) {
            n * p.0.powi((n - 1.0) as i32) * p.1
        } else {
            n * p.0.powf(n - 1.0) * p.1
        };
        return Ok(Dual(v, dv));
    }
    if p.0 <= 0.0 {
        return dom(x, format!("variable power of nonpositive base {}", p.0));
    }
    let v = p.0.powf(n);
    Ok(Dual(v, v * (q.1 * p.0.ln() + n * p.1 / p.0)))
}

/// Value and exact first derivative by forward-mode propagation.
pub fn eval_d(e: &CoeffExpr, x: f64) -> Result<(f64, f64), CoeffError> {
    let d = eval_dual(&e.ast, x)?;
    Ok((d.0, d.1))
}

// ---------------------------------------------------------------- profiles

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassTag {
    Generic,
    CaseII,
    CaseIII,
    CaseIV,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::Generic => "generic",
            ClassTag::CaseII => "case-ii",
            ClassTag::CaseIII => "case-iii",
            ClassTag::CaseIV => "case-iv",
        })
    }
}

/// Number of grid points used for positivity and classification scans.
pub const SCAN_POINTS: usize = 129;

fn scan_grid(lo: f64, hi: f64) -> Vec<f64> {
    (0..SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect()
}

fn omega_quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-14,
        max_intervals: 2000,
    }
}

/// f together with the data fixing ω_{λ₁}(x) = ∫_β^x f^{−1/2} dr + λ₁ and
/// the symmetry class.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub f: CoeffExpr,
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub domain: (f64, f64),
    pub class_tag: ClassTag,
}

impl CoefficientProfile {
    /// Validates f > 0 on a scan of the domain, β inside the domain,
    /// λ₂ ≠ 0 for CaseII/CaseIII and ω_{λ₁} ≠ 0 inside the domain for CaseII.
    pub fn new(
        f: CoeffExpr,
        beta: f64,
        lambda1: f64,
        lambda2: f64,
        domain: (f64, f64),
        class_tag: ClassTag,
    ) -> Result<Self, CoeffError> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CoeffError::InvalidProfile(format!(
                "domain [{lo}, {hi}] is not a proper interval"
            )));
        }
        if !(lo..=hi).contains(&beta) {
            return Err(CoeffError::InvalidProfile(format!(
                "beta = {beta} lies outside the domain [{lo}, {hi}]"
            )));
        }
        if !(lambda1.is_finite() && lambda2.is_finite()) {
            return Err(CoeffError::InvalidProfile("non-finite lambda".into()));
        }
        if matches!(class_tag, ClassTag::CaseII | ClassTag::CaseIII) && lambda2 == 0.0 {
            return Err(CoeffError::InvalidProfile(format!(
                "lambda2 must be nonzero for {class_tag}"
            )));
        }
        for x in scan_grid(lo, hi) {
            let v = f.eval(x)?;
            if !(v > 0.0) {
                return Err(CoeffError::NonPositiveF { x, value: v });
            }
        }
        let p = Self {
            f,
            beta,
            lambda1,
            lambda2,
            domain,
            class_tag,
        };
        if class_tag == ClassTag::CaseII {
            let w_lo = p.omega(lo)?;
            let w_hi = p.omega(hi)?;
            // ω is strictly increasing, so a sign change means a zero inside
            if w_lo < 0.0 && w_hi > 0.0 {
                return Err(CoeffError::InvalidProfile(format!(
                    "omega vanishes inside the domain (omega({lo}) = {w_lo}, omega({hi}) = {w_hi})"
                )));
            }
        }
        Ok(p)
    }

    pub fn check_x(&self, x: f64) -> Result<(), CoeffError> {
        let (lo, hi) = self.domain;
        if !(x >= lo && x <= hi) {
            return Err(CoeffError::OutsideDomain { x, lo, hi });
        }
        Ok(())
    }

    /// (f, f′) at x with the positivity check.
    pub fn f_d(&self, x: f64) -> Result<(f64, f64), CoeffError> {
        let (v, d) = eval_d(&self.f, x)?;
        if !(v > 0.0) {
            return Err(CoeffError::NonPositiveF { x, value: v });
        }
        Ok((v, d))
    }

    /// ω₀(x) = ∫_β^x f(r)^{−1/2} dr.
    pub fn omega0(&self, x: f64) -> Result<f64, CoeffError> {
        self.check_x(x)?;
        if x == self.beta {
            return Ok(0.0);
        }
        if self.f.is_constant() {
            let v = self.f.eval(self.beta)?;
            if !(v > 0.0) {
                return Err(CoeffError::NonPositiveF {
                    x: self.beta,
                    value: v,
                });
            }
            return Ok((x - self.beta) / v.sqrt());
        }
        let r = gauss_kronrod::<_, CoeffError>(
            |r| {
                let v = self.f.eval(r)?;
                if !(v > 0.0) {
                    return Err(CoeffError::NonPositiveF { x: r, value: v });
                }
                Ok(1.0 / v.sqrt())
            },
            self.beta,
            x,
            omega_quad_opts(),
        )?;
        Ok(r.value)
    }

    /// ω_{λ₁}(x) = ω₀(x) + λ₁.
    pub fn omega(&self, x: f64) -> Result<f64, CoeffError> {
        Ok(self.omega0(x)? + self.lambda1)
    }

    /// Solves ω₀(x) = y for x in the domain (safeguarded Newton).
    pub fn omega0_inverse(&self, y: f64) -> Result<f64, CoeffError> {
        let (lo, hi) = self.domain;
        let y_lo = self.omega0(lo)?;
        let y_hi = self.omega0(hi)?;
        let tol = 1e-13 * (1.0 + y.abs());
        if !(y >= y_lo - tol && y <= y_hi + tol) {
            return Err(CoeffError::OmegaOutOfRange {
                y,
                lo: y_lo,
                hi: y_hi,
            });
        }
        let (mut a, mut b) = (lo, hi);
        let mut x = lo + (hi - lo) * ((y - y_lo) / (y_hi - y_lo)).clamp(0.0, 1.0);
        for _ in 0..200 {
            let r = self.omega0(x)? - y;
            if r.abs() <= 1e-14 * (1.0 + y.abs()) {
                return Ok(x);
            }
            if r > 0.0 {
                b = x;
            } else {
                a = x;
            }
            let fx = self.f.eval(x)?;
            let step = r * fx.sqrt();
            let mut next = x - step;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

/// Closed-form g(x) of a symmetry class.
#[derive(Debug, Clone)]
pub struct GFunction {
    profile: Arc<CoefficientProfile>,
}

impl GFunction {
    pub fn profile(&self) -> &CoefficientProfile {
        &self.profile
    }

    pub fn eval(&self, x: f64) -> Result<f64, CoeffError> {
        let p = &*self.profile;
        p.check_x(x)?;
        let (f, df) = p.f_d(x)?;
        let half = 0.5 * df;
        match p.class_tag {
            ClassTag::CaseIV => Ok(half),
            ClassTag::CaseIII => Ok(p.lambda2 * f.sqrt() + half),
            ClassTag::CaseII => {
                let w = p.omega(x)?;
                if w == 0.0 {
                    return Err(CoeffError::Domain {
                        x,
                        message: "omega vanishes".into(),
                    });
                }
                Ok(p.lambda2 * f.sqrt() / w + half)
            }
            ClassTag::Generic => Err(CoeffError::GenericClass),
        }
    }
}

/// g for the profile's class:
/// CaseII λ₂√f/ω_{λ₁} + f′/2, CaseIII λ₂√f + f′/2, CaseIV f′/2.
pub fn g_for_class(profile: &CoefficientProfile) -> Result<GFunction, CoeffError> {
    if profile.class_tag == ClassTag::Generic {
        return Err(CoeffError::GenericClass);
    }
    Ok(GFunction {
        profile: Arc::new(profile.clone()),
    })
}

/// Free function form of [`CoefficientProfile::omega`].
pub fn omega(profile: &CoefficientProfile, x: f64) -> Result<f64, CoeffError> {
    profile.omega(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: ClassTag,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
}

/// Default relative tolerance of [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Places an arbitrary pair (f, g) on the class ladder CaseIV → CaseIII →
/// CaseII → Generic, sampling the domain on [`SCAN_POINTS`] points.
///
/// `tol` is relative: thresholds are tol·(1 + max|g|) for g − f′/2 and
/// tol·(1 + max|r|) for r = (g − f′/2)/√f.
pub fn classify(
    f: &CoeffExpr,
    g: &dyn Fn(f64) -> Result<f64, CoeffError>,
    beta: f64,
    domain: (f64, f64),
    tol: f64,
) -> Result<Classification, CoeffError> {
    let profile = CoefficientProfile::new(f.clone(), beta, 0.0, 0.0, domain, ClassTag::Generic)?;
    let xs = scan_grid(domain.0, domain.1);
    let mut diff = Vec::with_capacity(xs.len());
    let mut sqrt_f = Vec::with_capacity(xs.len());
    let mut g_max: f64 = 0.0;
    for &x in &xs {
        let (fv, df) = profile.f_d(x)?;
        let gv = g(x)?;
        if !gv.is_finite() {
            return Err(CoeffError::Domain {
                x,
                message: "g is not finite".into(),
            });
        }
        g_max = g_max.max(gv.abs());
        diff.push(gv - 0.5 * df);
        sqrt_f.push(fv.sqrt());
    }
    let generic = Classification {
        class: ClassTag::Generic,
        lambda1: None,
        lambda2: None,
    };

    // (a) g ≡ f′/2
    let tol_g = tol * (1.0 + g_max);
    if diff.iter().all(|d| d.abs() <= tol_g) {
        return Ok(Classification {
            class: ClassTag::CaseIV,
            lambda1: None,
            lambda2: None,
        });
    }

    // (b) r constant
    let r: Vec<f64> = diff.iter().zip(&sqrt_f).map(|(d, s)| d / s).collect();
    let r_max = r.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let r_min = r.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let r_abs = r_max.abs().max(r_min.abs());
    let tol_r = tol * (1.0 + r_abs);
    if r_max - r_min <= tol_r {
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        return Ok(Classification {
            class: ClassTag::CaseIII,
            lambda1: None,
            lambda2: Some(mean),
        });
    }

    // (c) 1/r = ω₀/λ₂ + λ₁/λ₂
    if r.iter().any(|&v| v.abs() <= tol_r) {
        return Ok(generic);
    }
    let w0: Vec<f64> = xs
        .iter()
        .map(|&x| profile.omega0(x))
        .collect::<Result<_, _>>()?;
    let inv: Vec<f64> = r.iter().map(|v| 1.0 / v).collect();
    let Some((slope, intercept)) = fit_line(&w0, &inv) else {
        return Ok(generic);
    };
    if slope == 0.0 || !slope.is_finite() {
        return Ok(generic);
    }
    let lambda2 = 1.0 / slope;
    let lambda1 = intercept / slope;
    let fits = r
        .iter()
        .zip(&w0)
        .all(|(rv, w)| (rv * (w + lambda1) - lambda2).abs() <= tol * (1.0 + lambda2.abs()));
    if fits {
        Ok(Classification {
            class: ClassTag::CaseII,
            lambda1: Some(lambda1),
            lambda2: Some(lambda2),
        })
    } else {
        Ok(generic)
    }
}

/// Least-squares line y ≈ slope·x + intercept on centered data.
fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> CoeffExpr {
        parse(s).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(
            p("x^2").ast,
            Expr::Bin(BinOp::Pow, Box::new(Expr::X), Box::new(Expr::Const(2.0)))
        );
        match p("exp(0.5*x)").ast {
            Expr::Call(Func::Exp, arg) => {
                assert!(matches!(*arg, Expr::Bin(BinOp::Mul, ..)))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse("1/(x"),
            Err(CoeffError::Syntax {
                offset: 4,
                message: "missing ')'".into()
            })
        );
        assert!(matches!(
            parse("foo(x)"),
            Err(CoeffError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(parse("2 $ x"), Err(CoeffError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x x"), Err(CoeffError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-x^2").eval(3.0).unwrap(), -9.0);
        assert_eq!(p("2^3^2").eval(0.0).unwrap(), 512.0);
        assert_eq!(p("8/4/2").eval(0.0).unwrap(), 1.0);
        assert_eq!(p("1-2-3").eval(0.0).unwrap(), -4.0);
        assert_eq!(p("x^-1").eval(4.0).unwrap(), 0.25);
        assert_eq!(p("2*x+1").eval(1.5).unwrap(), 4.0);
    }

    #[test]
    fn canonical_printer_round_trips() {
        for s in [
            "x^2",
            "exp(0.5*x)",
            "1 + x^2",
            "(1 + x)^2",
            "-x^2",
            "(-x)^2",
            "x - (1 - x)",
            "x/(2*x)",
            "2^3^2",
            "(2^3)^2",
            "sqrt(1e-7 + ln(x))*pi - e",
            "x^-0.5",
            "-(-x)",
        ] {
            let e = p(s);
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{s} -> {printed}");
            assert_eq!(parse(&printed).unwrap().to_string(), printed);
        }
        assert_eq!(p("( x + 1 ) * 2").to_string(), "(x + 1.0)*2.0");
    }

    #[test]
    fn eval_d_examples() {
        assert_eq!(eval_d(&p("x^2"), 3.0).unwrap(), (9.0, 6.0));
        assert_eq!(eval_d(&p("sqrt(x)"), 4.0).unwrap(), (2.0, 0.25));
        let (v, d) = eval_d(&p("exp(x)*x"), 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!((v - e).abs() < 1e-15 && (d - 2.0 * e).abs() < 1e-15);
        // central differences, h = 1e−6
        let h = 1e-6;
        let fd = (p("exp(x)*x").eval(1.0 + h).unwrap() - p("exp(x)*x").eval(1.0 - h).unwrap())
            / (2.0 * h);
        assert!((fd - d).abs() < 1e-8);
        assert_eq!(eval_d(&p("x^x"), 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(eval_d(&p("x^2"), 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p("ln(x)").eval(0.0), Err(CoeffError::Domain { .. })));
        assert!(matches!(p("sqrt(x)").eval(-1.0), Err(CoeffError::Domain { .. })));
        assert!(matches!(p("1/x").eval(0.0), Err(CoeffError::Domain { .. })));
        assert!(matches!(p("x^0.5").eval(-1.0), Err(CoeffError::Domain { .. })));
        assert_eq!(p("x^3").eval(-2.0).unwrap(), -8.0);
    }

    fn profile(f: &str, beta: f64, l1: f64, l2: f64, dom: (f64, f64), c: ClassTag) -> CoefficientProfile {
        CoefficientProfile::new(p(f), beta, l1, l2, dom, c).unwrap()
    }

    #[test]
    fn omega_examples() {
        let pr = profile("1", 0.0, 0.0, 0.0, (0.0, 3.0), ClassTag::CaseIV);
        assert_eq!(omega(&pr, 2.0).unwrap(), 2.0);
        let pr = profile("x^2", 1.0, 0.0, 0.0, (1.0, 3.0), ClassTag::CaseIV);
        assert!((omega(&pr, std::f64::consts::E).unwrap() - 1.0).abs() < 1e-12);
        let pr = profile("1+x^2", 0.0, 0.5, 0.0, (0.0, 2.0), ClassTag::CaseIV);
        assert!((omega(&pr, 1.0).unwrap() - (1f64.asinh() + 0.5)).abs() < 1e-12);
        assert!((omega(&pr, 1.0).unwrap() - 1.381_373_587_019_543).abs() < 1e-10);
    }

    #[test]
    fn omega_inverse_round_trips() {
        let pr = profile("1+x^2", 0.0, 0.0, 0.0, (-1.0, 2.0), ClassTag::CaseIV);
        for &x in &[-1.0, -0.3, 0.0, 0.7, 2.0] {
            let y = pr.omega0(x).unwrap();
            assert!((pr.omega0_inverse(y).unwrap() - x).abs() < 1e-12);
        }
        assert!(matches!(
            pr.omega0_inverse(10.0),
            Err(CoeffError::OmegaOutOfRange { .. })
        ));
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(
            CoefficientProfile::new(p("x"), 0.5, 0.0, 1.0, (-1.0, 1.0), ClassTag::CaseIII),
            Err(CoeffError::NonPositiveF { .. })
        ));
        assert!(matches!(
            CoefficientProfile::new(p("1"), 0.0, 0.0, 0.0, (0.0, 1.0), ClassTag::CaseIII),
            Err(CoeffError::InvalidProfile(_))
        ));
        // ω = x − 0.5 changes sign inside [0, 1]
        assert!(matches!(
            CoefficientProfile::new(p("1"), 0.0, -0.5, 1.0, (0.0, 1.0), ClassTag::CaseII),
            Err(CoeffError::InvalidProfile(_))
        ));
    }

    #[test]
    fn g_examples() {
        let pr = profile("x^2", 1.0, 0.0, 0.0, (1.0, 3.0), ClassTag::CaseIV);
        let g = g_for_class(&pr).unwrap();
        assert_eq!(g.eval(2.5).unwrap(), 2.5);
        // f = x^{2m}, m = 1, λ₂ = 2: g = λ₂ x^m + m x^{2m−1}
        let pr = profile("x^(2*1)", 1.0, 0.0, 2.0, (1.0, 3.0), ClassTag::CaseIII);
        let g = g_for_class(&pr).unwrap();
        assert!((g.eval(1.7).unwrap() - (2.0 * 1.7 + 1.7)).abs() < 1e-14);
        let pr = profile("1", 0.0, 2.0, 3.0, (0.0, 5.0), ClassTag::CaseII);
        let g = g_for_class(&pr).unwrap();
        assert!((g.eval(1.5).unwrap() - 3.0 / 3.5).abs() < 1e-14);
        let pr = profile("1", 0.0, 2.0, 3.0, (0.0, 5.0), ClassTag::Generic);
        assert!(matches!(g_for_class(&pr), Err(CoeffError::GenericClass)));
    }

    #[test]
    fn classify_examples() {
        let g = p("x");
        let c = classify(&p("x^2"), &|x| g.eval(x), 1.0, (1.0, 3.0), CLASSIFY_TOL).unwrap();
        assert_eq!(c.class, ClassTag::CaseIV);
        let c = classify(&p("1"), &|_| Ok(1.0), 0.0, (0.0, 1.0), CLASSIFY_TOL).unwrap();
        assert_eq!((c.class, c.lambda2), (ClassTag::CaseIII, Some(1.0)));
        let pr = profile("1", 0.0, 2.0, 3.0, (0.0, 5.0), ClassTag::CaseII);
        let gf = g_for_class(&pr).unwrap();
        let c = classify(&p("1"), &|x| gf.eval(x), 0.0, (0.0, 5.0), CLASSIFY_TOL).unwrap();
        assert_eq!(c.class, ClassTag::CaseII);
        assert!((c.lambda1.unwrap() - 2.0).abs() < 1e-8);
        assert!((c.lambda2.unwrap() - 3.0).abs() < 1e-8);
        let c = classify(&p("1"), &|x| Ok(x * x), 0.0, (0.0, 5.0), CLASSIFY_TOL).unwrap();
        assert_eq!(c.class, ClassTag::Generic);
        assert!(matches!(
            classify(&p("x"), &|_| Ok(0.0), 0.0, (-1.0, 1.0), CLASSIFY_TOL),
            Err(CoeffError::NonPositiveF { .. })
        ));
    }
}
