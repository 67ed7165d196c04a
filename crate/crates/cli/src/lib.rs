//! Command-line front end for the `fracsym` library.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error,
//! 2 unparsable input, 3 f ≤ 0 on the domain, 4 family or parameters not
//! admissible, 5 convergence guard violated.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsym::coeffs::{
    classify, parse, ClassTag, CoeffError, CoeffExpr, CoefficientProfile,
    CLASSIFY_TOL,
};
use fracsym::fraccalc::{FracError, FracOrder};
use fracsym::liealg::{alpha_rational, canonical_basis, rational, verify_table};
use fracsym::solutions::{
    pde_residual_numeric, Constants, Family, Field, InvariantSolution, Params, ResidualReport,
    SolutionError, DEFAULT_SERIES_TERMS,
};
use fracsym::specfun::{self, SpecFunError};
use fracsym::Complex64;
use serde_json::{json, Value};

/// Time step of the numeric residual scheme used by `verify`.
pub const VERIFY_STEP: f64 = 1.0 / 128.0;

/// Default residual tolerance of `verify`, relative to the residual scale.
pub const VERIFY_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "fracsym", version, about = "Invariant solutions of time-fractional telegraph systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Place (f, g) in a symmetry class and recover λ₁, λ₂.
    Classify(ProblemArgs),
    /// Evaluate an invariant solution on a grid.
    Solve(ProblemArgs),
    /// Check termwise and numeric residuals of an invariant solution.
    Verify(ProblemArgs),
    /// Print and check the commutator table of the Case IV algebra.
    Liealg(LieArgs),
    /// Special functions.
    Specfun {
        #[command(subcommand)]
        action: SpecfunCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpecfunCommand {
    /// Evaluate one special function at z.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ProblemArgs {
    /// f(x), e.g. "x^2" or "1+exp(0.5*x)"
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub f: String,
    /// g(x); classify requires it, solve and verify check it against the family
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Lower limit of ω; defaults to the left end of the x-grid
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    #[arg(long, default_value = "case2")]
    pub family: Family,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub a2: f64,
    /// Comma list; defaults to 1 repeated n = ⌈α⌉ times
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c1: Option<Vec<f64>>,
    /// Comma list; defaults to 0 repeated n times
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c2: Option<Vec<f64>>,
    /// xmin,xmax,nx,tmin,tmax,nt
    #[arg(long, default_value = "1,2,5,0.1,1,5", allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Test hook: relative perturbation of the solution before verification
    #[arg(long, hide = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LieArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Test hook: any value flips the sign of V₂
    #[arg(long, hide = true)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialFunction {
    /// Γ(z)
    Gamma,
    /// E_{α,β}(z)
    Ml,
    /// Ψ(z; a, b)
    Wright,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub function: SpecialFunction,
    /// re or re,im
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
}

/// Evaluation grid; both axes include their end points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl Grid {
    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.nt)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(format!("expected xmin,xmax,nx,tmin,tmax,nt, got '{s}'"));
        }
        let real = |i: usize| -> Result<f64, String> {
            parts[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("grid field {} is not a finite number: '{}'", i + 1, parts[i]))
        };
        let count = |i: usize| -> Result<usize, String> {
            parts[i]
                .parse::<usize>()
                .map_err(|_| format!("grid field {} is not a count: '{}'", i + 1, parts[i]))
        };
        let g = Grid {
            x_min: real(0)?,
            x_max: real(1)?,
            nx: count(2)?,
            t_min: real(3)?,
            t_max: real(4)?,
            nt: count(5)?,
        };
        if g.nx < 2 || g.nt < 2 {
            return Err("nx and nt must be at least 2".into());
        }
        if !(g.x_min < g.x_max && g.t_min < g.t_max) {
            return Err("grid ranges must be increasing".into());
        }
        if g.t_min <= 0.0 {
            return Err(format!("tmin must be positive, got {}", g.t_min));
        }
        Ok(g)
    }
}

/// An error with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn coeff_code(e: &CoeffError) -> i32 {
    match e {
        CoeffError::Syntax { .. } | CoeffError::UnknownIdentifier { .. } => 2,
        CoeffError::NonPositiveF { .. } => 3,
        CoeffError::InvalidProfile(_) | CoeffError::GenericClass => 4,
        _ => 1,
    }
}

fn specfun_code(e: &SpecFunError) -> i32 {
    match e {
        SpecFunError::OutsideRadius { .. }
        | SpecFunError::NonConvergent(_)
        | SpecFunError::PrecisionLoss { .. }
        | SpecFunError::ConvergenceViolation { .. } => 5,
        SpecFunError::InvalidParameter(_) | SpecFunError::DivergentSpec { .. } => 4,
        _ => 1,
    }
}

impl From<CoeffError> for CliError {
    fn from(e: CoeffError) -> Self {
        CliError::new(coeff_code(&e), e.to_string())
    }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> Self {
        let code = specfun_code(&e);
        if code == 5 {
            CliError::new(5, format!("convergence guard violated: {e}"))
        } else {
            CliError::new(code, e.to_string())
        }
    }
}

impl From<SolutionError> for CliError {
    fn from(e: SolutionError) -> Self {
        match e {
            SolutionError::SpecFun(s) => s.into(),
            SolutionError::Coeff(c) => c.into(),
            SolutionError::Frac(FracError::InvalidOrder(_)) => CliError::new(4, e.to_string()),
            SolutionError::WrongClass { .. }
            | SolutionError::AlphaRange { .. }
            | SolutionError::ListLength { .. }
            | SolutionError::Inadmissible { .. }
            | SolutionError::OmegaNonPositive { .. }
            | SolutionError::InvalidParameter(_) => CliError::new(4, e.to_string()),
            _ => CliError::new(1, e.to_string()),
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::new(1, format!("i/o error: {e}"))
}

fn parse_expr(flag: &str, text: &str) -> Result<CoeffExpr, CliError> {
    parse(text).map_err(|e| CliError::new(coeff_code(&e), format!("cannot parse --{flag} '{text}': {e}")))
}

fn class_name(c: ClassTag) -> &'static str {
    match c {
        ClassTag::Generic => "generic",
        ClassTag::CaseII => "ii",
        ClassTag::CaseIII => "iii",
        ClassTag::CaseIV => "iv",
    }
}

impl ProblemArgs {
    fn beta(&self) -> f64 {
        self.beta.unwrap_or(self.grid.x_min)
    }

    /// The x-range of the grid widened to contain β.
    pub fn domain(&self) -> (f64, f64) {
        let b = self.beta();
        (self.grid.x_min.min(b), self.grid.x_max.max(b))
    }

    fn tol(&self, default: f64) -> Result<f64, CliError> {
        match self.tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => {
                Err(CliError::new(2, format!("--tol must be positive, got {t}")))
            }
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    fn order(&self) -> Result<FracOrder, CliError> {
        FracOrder::new(self.alpha).map_err(|e| CliError::new(4, e.to_string()))
    }

    /// Profile of the family's class; with --g the pair is classified first
    /// and must land in that class, and the recovered λ₁, λ₂ are used.
    pub fn profile(&self) -> Result<CoefficientProfile, CliError> {
        let f = parse_expr("f", &self.f)?;
        let class = self.family.class();
        let (mut l1, mut l2) = (self.lambda1, self.lambda2);
        if let Some(g_text) = &self.g {
            let g = parse_expr("g", g_text)?;
            let c = classify(&f, &|x| g.eval(x), self.beta(), self.domain(), self.tol(CLASSIFY_TOL)?)?;
            if c.class != class {
                return Err(CliError::new(
                    4,
                    format!(
                        "{} needs a case-{} pair (f, g), but g is {}",
                        self.family,
                        class_name(class),
                        class_name(c.class)
                    ),
                ));
            }
            l1 = c.lambda1.unwrap_or(l1);
            l2 = c.lambda2.unwrap_or(l2);
        }
        Ok(CoefficientProfile::new(f, self.beta(), l1, l2, self.domain(), class)?)
    }

    pub fn solution(&self) -> Result<InvariantSolution, CliError> {
        let order = self.order()?;
        let profile = self.profile()?;
        let n = order.n() as usize;
        let params = if self.family.uses_pair() {
            Params::Pair(self.a1, self.a2)
        } else {
            Params::A(self.a)
        };
        let c1 = self.c1.clone().unwrap_or_else(|| vec![1.0; n]);
        let c2 = self.c2.clone().unwrap_or_else(|| vec![0.0; n]);
        let constants = if self.family.uses_single_constant() {
            match c1.as_slice() {
                [c] => Constants::Single(*c),
                _ => {
                    return Err(CliError::new(
                        4,
                        format!("{} takes a single constant --c1, got {}", self.family, c1.len()),
                    ))
                }
            }
        } else {
            Constants::Lists(c1, c2)
        };
        Ok(InvariantSolution::build(self.family, order, &profile, params, &constants)?)
    }
}

/// `classify`: JSON with the class, λ₁, λ₂ and the domain scanned.
pub fn cmd_classify(args: &ProblemArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = parse_expr("f", &args.f)?;
    let g_text = args
        .g
        .as_deref()
        .ok_or_else(|| CliError::new(2, "classify needs --g"))?;
    let g = parse_expr("g", g_text)?;
    let domain = args.domain();
    let c = classify(&f, &|x| g.eval(x), args.beta(), domain, args.tol(CLASSIFY_TOL)?)?;
    let v = json!({
        "class": class_name(c.class),
        "lambda1": c.lambda1,
        "lambda2": c.lambda2,
        "domain_used": [domain.0, domain.1],
    });
    writeln!(out, "{v}").map_err(io_error)?;
    Ok(0)
}

/// Values on the grid, x outer and t inner.
pub fn evaluate_grid(field: &dyn Field, grid: &Grid) -> Result<Vec<[f64; 4]>, CliError> {
    let ts = grid.ts();
    let mut rows = Vec::with_capacity(grid.nx * grid.nt);
    for x in grid.xs() {
        for (t, (u, v)) in ts.iter().zip(field.eval_along(x, &ts)?) {
            rows.push([x, *t, u, v]);
        }
    }
    Ok(rows)
}

/// CSV with header `x,t,u,v`, 17 significant digits, `\n` line ends.
pub fn write_csv(rows: &[[f64; 4]], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "x,t,u,v")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r[0], r[1], r[2], r[3])?;
    }
    Ok(())
}

pub fn write_json(rows: &[[f64; 4]], out: &mut dyn Write) -> std::io::Result<()> {
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let v = json!({ "x": col(0), "t": col(1), "u": col(2), "v": col(3) });
    writeln!(out, "{v}")
}

/// `solve`: writes the grid to --out, or to `out` when no path is given.
pub fn cmd_solve(args: &ProblemArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.perturb.is_some() {
        return Err(CliError::new(2, "--perturb applies to verify only"));
    }
    let sol = args.solution()?;
    let rows = evaluate_grid(&sol, &args.grid)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => write_csv(&rows, &mut buf),
        Format::Json => write_json(&rows, &mut buf),
    }
    .map_err(io_error)?;
    match &args.out {
        Some(path) => std::fs::write(path, &buf).map_err(io_error)?,
        None => out.write_all(&buf).map_err(io_error)?,
    }
    Ok(0)
}

/// u scaled by 1 + p.
struct Perturbed<'a> {
    base: &'a dyn Field,
    factor: f64,
}

impl Field for Perturbed<'_> {
    fn order(&self) -> FracOrder {
        self.base.order()
    }

    fn profile(&self) -> &CoefficientProfile {
        self.base.profile()
    }

    fn eval_along(&self, x: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>, SolutionError> {
        Ok(self
            .base
            .eval_along(x, ts)?
            .into_iter()
            .map(|(u, v)| (self.factor * u, v))
            .collect())
    }

    fn leading_powers(&self) -> (f64, f64) {
        self.base.leading_powers()
    }
}

/// Residual reports `verify` runs for a solution: termwise for
/// series-backed families, numeric on the grid for 0 < α < 1.
pub fn residual_reports(
    sol: &InvariantSolution,
    grid: &Grid,
    perturb: Option<f64>,
) -> Result<Vec<ResidualReport>, CliError> {
    let factor = 1.0 + perturb.unwrap_or(0.0);
    let mut reports = Vec::new();
    if sol.family().is_series_backed() {
        let mut rs = sol.reduced_series(DEFAULT_SERIES_TERMS)?;
        if perturb.is_some() {
            rs = if rs.phi.is_empty() {
                rs.perturb_psi(0, factor)
            } else {
                rs.perturb_phi(0, factor)
            };
        }
        reports.push(rs.report()?);
    }
    if sol.order().alpha() < 1.0 {
        let field = Perturbed { base: sol, factor };
        reports.push(pde_residual_numeric(&field, &grid.xs(), &grid.ts(), VERIFY_STEP)?);
    }
    Ok(reports)
}

fn report_json(r: &ResidualReport, tol: f64) -> Value {
    json!({
        "method": r.method.to_string(),
        "max_res_eq1": r.max_res_eq1,
        "max_res_eq2": r.max_res_eq2,
        "rel_eq1": r.rel_eq1,
        "rel_eq2": r.rel_eq2,
        "scale": r.scale,
        "powers_checked": r.powers_checked,
        "pass": r.passes(tol),
    })
}

/// `verify`: JSON report; exit 0 iff every relative residual is ≤ tol.
pub fn cmd_verify(
    args: &ProblemArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let tol = args.tol(VERIFY_TOL)?;
    let sol = args.solution()?;
    let reports = residual_reports(&sol, &args.grid, args.perturb)?;
    let pass = reports.iter().all(|r| r.passes(tol));
    let v = json!({
        "family": args.family.name(),
        "alpha": args.alpha,
        "tol": tol,
        "step": VERIFY_STEP,
        "pass": pass,
        "residuals": reports.iter().map(|r| report_json(r, tol)).collect::<Vec<_>>(),
    });
    writeln!(out, "{v}").map_err(io_error)?;
    for r in reports.iter().filter(|r| !r.passes(tol)) {
        writeln!(
            err,
            "{} residual {:e} exceeds tolerance {tol:e}",
            r.method,
            r.max_rel()
        )
        .map_err(io_error)?;
    }
    Ok(if pass { 0 } else { 1 })
}

/// `liealg`: prints the bracket table; exit 0 iff it matches.
pub fn cmd_liealg(args: &LieArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let alpha = alpha_rational(args.alpha).map_err(|e| CliError::new(4, e.to_string()))?;
    let mut fields = canonical_basis(&alpha);
    if args.perturb.is_some() {
        fields[1] = fields[1].scale(&rational(-1));
    }
    let report = verify_table(&fields, &alpha);
    match args.format {
        Format::Json => {
            let rows: Vec<Vec<String>> = (1..=4)
                .map(|i| (1..=4).map(|j| report.entry(i, j)).collect())
                .collect();
            let v = json!({
                "alpha": args.alpha,
                "table": rows,
                "pass": report.pass,
                "first_mismatch": report.first_mismatch.map(|(i, j)| [i, j]),
            });
            writeln!(out, "{v}").map_err(io_error)?;
        }
        Format::Csv => {
            writeln!(out, "[Vi,Vj]\tV1\tV2\tV3\tV4").map_err(io_error)?;
            for i in 1..=4 {
                let row: Vec<String> = (1..=4).map(|j| report.entry(i, j)).collect();
                writeln!(out, "V{i}\t{}", row.join("\t")).map_err(io_error)?;
            }
        }
    }
    if let Some((i, j)) = report.first_mismatch {
        writeln!(
            err,
            "commutator table mismatch at entry ({i}, {j}): got {}",
            report.brackets[i - 1][j - 1]
        )
        .map_err(io_error)?;
        return Ok(1);
    }
    Ok(0)
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::new(2, format!("cannot parse --z '{s}' (expected re or re,im)"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

/// `specfun eval`: JSON with the real and imaginary parts.
pub fn cmd_specfun_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let z = parse_complex(&args.z)?;
    let (name, w) = match args.function {
        SpecialFunction::Gamma => ("gamma", specfun::gamma_complex(z)?),
        SpecialFunction::Ml => ("ml", specfun::mittag_leffler(args.alpha, args.beta, z)?),
        SpecialFunction::Wright => ("wright", specfun::wright(z, args.a, args.b)?),
    };
    writeln!(out, "{}", json!({ "function": name, "re": w.re, "im": w.im })).map_err(io_error)?;
    Ok(0)
}

/// Runs a parsed command line, writing normal output to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Liealg(a) => cmd_liealg(a, out, err),
        Command::Specfun {
            action: SpecfunCommand::Eval(a),
        } => cmd_specfun_eval(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code
        }
    }
}

/// Parses `argv` and runs it; clap usage errors exit with 2.
pub fn run_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0,1,3,0.1,1,2".parse().unwrap();
        assert_eq!(g.xs(), vec![0.0, 0.5, 1.0]);
        assert_eq!(g.ts(), vec![0.1, 1.0]);
        assert!("0,1,1,0.1,1,2".parse::<Grid>().is_err());
        assert!("0,1,3,0,1,2".parse::<Grid>().is_err());
        assert!("0,1,3,0.1,1".parse::<Grid>().is_err());
        assert!("1,0,3,0.1,1,2".parse::<Grid>().is_err());
    }

    #[test]
    fn complex_argument() {
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(parse_complex("1,2").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("a").unwrap_err().code, 2);
    }

    #[test]
    fn csv_digits() {
        let mut buf = Vec::new();
        write_csv(&[[0.1, 1.0, -0.25, 1.0 / 3.0]], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "x,t,u,v\n1.0000000000000001e-1,1.0000000000000000e0,-2.5000000000000000e-1,3.3333333333333331e-1\n"
        );
    }

    #[test]
    fn error_codes() {
        let e: CliError = SolutionError::Inadmissible { a1: 2.0, a2: 0.0 }.into();
        assert_eq!(e.code, 4);
        let e: CliError = SpecFunError::OutsideRadius { abs_z: 2.0, radius: 1.0 }.into();
        assert_eq!(e.code, 5);
        assert!(e.message.contains("delta = -1"));
        let e: CliError = CoeffError::NonPositiveF { x: 0.0, value: 0.0 }.into();
        assert_eq!(e.code, 3);
    }
}
