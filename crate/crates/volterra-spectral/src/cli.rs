//! Command-line front end: problem files, built-in examples, reports, CSVs.
//!
//! Problem files are line-oriented `key = value` documents. `#` starts a
//! comment (full line or trailing), blank lines are ignored, unknown keys are
//! errors. Keys:
//!
//! ```text
//! name                   problem name used in reports (default "problem")
//! order                  differential order k ≥ 1
//! coeff.<i>              coefficient of y⁽ⁱ⁾, i ≤ k: a number or expression in x
//! integral.<idx>.weight  weight of integral term <idx>: number or expression in x
//! integral.<idx>.kernel  `conv:<m>` for (x−s)^{m−1}, or an expression in x and t
//! integral.<idx>.deriv   derivative order j ≤ k inside integral term <idx>
//! ic.<i>                 initial condition y⁽ⁱ⁾(0), constant expression
//! rhs                    right-hand side, expression in x
//! exact                  known exact solution, expression in x (optional)
//! n                      default basis degree for `solve` (optional)
//! sweep                  default degree list for `sweep`, e.g. 3,5,7 (optional)
//! ```
//!
//! Subcommands: `solve`, `sweep`, `basis`, `theta`, `examples`. Reports go to
//! standard output with coefficients at 12 significant digits; CSVs use `.`
//! decimals, LF line endings, and a mandatory header; timing goes to standard
//! error so repeated runs stay byte-identical on standard output. Exit codes:
//! 0 success, 1 for anything the user wrote wrong, 2 for a numerically
//! singular system.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::basis::{orthonormal_basis, BasisSet};
use crate::error::Error;
use crate::expr::{self, Expr, Var};
use crate::linalg::DenseMatrix;
use crate::opmat::theta;
use crate::solver::{
    solve, Coefficient, IdeProblem, IntegralTerm, Kernel, ScalarFn, SolveOptions,
    SpectralSolution, SweepPoint,
};

#[derive(Parser)]
#[command(
    name = "volterra",
    version,
    about = "Spectral solver for linear Volterra integro-differential equations on [0,1]",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file (or built-in example) and print the run report
    Solve {
        /// Problem file path, or the name of a built-in example
        path: String,
        /// Basis degree (overrides the file's `n`; default 7)
        #[arg(long)]
        n: Option<usize>,
        /// Write a 201-point samples CSV (x,y_approx[,y_exact,abs_err]) here
        #[arg(long, value_name = "CSVPATH")]
        out: Option<PathBuf>,
    },
    /// Solve at several degrees and print a convergence CSV
    Sweep {
        /// Problem file path, or the name of a built-in example
        path: String,
        /// Comma-separated degrees (overrides the file's `sweep`)
        #[arg(long = "n-list", value_delimiter = ',', value_name = "N1,N2,...")]
        n_list: Option<Vec<usize>>,
    },
    /// Print the orthonormal basis coefficients of degree ≤ n as CSV
    Basis {
        #[arg(long)]
        n: usize,
    },
    /// Print the (n+1)×(n+1) integration operational matrix as CSV
    Theta {
        #[arg(long)]
        n: usize,
    },
    /// List or run the built-in examples
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the built-in example names
    List,
    /// Solve a built-in example with its own defaults
    Run { name: String },
}

const BUILTIN_EXAMPLES: [(&str, &str, &str); 3] = [
    (
        "example1",
        "fourth-order equation with a plain Volterra memory term",
        "\
# y'''' - y + int_0^x y(s) ds = x + (x+3)e^x, exact solution y = 1 + x e^x.
name = example1
order = 4
coeff.4 = 1
coeff.0 = -1
integral.0.weight = 1
integral.0.kernel = conv:1
integral.0.deriv = 0
ic.0 = 1
ic.1 = 1
ic.2 = 2
ic.3 = 3
rhs = x + (x + 3)*exp(x)
exact = 1 + x*exp(x)
n = 7
",
    ),
    (
        "example2",
        "variable coefficients with a general (x-t)^2 kernel",
        "\
# (1+x^2) y'' + y + cos(x) int_0^x (x-t)^2 y'(t) dt = rhs, exact y = sin x.
name = example2
order = 2
coeff.2 = 1 + x^2
coeff.0 = 1
integral.0.weight = cos(x)
integral.0.kernel = (x - t)^2
integral.0.deriv = 1
ic.0 = 0
ic.1 = 1
rhs = 2*(x - sin(x))*cos(x) - x^2*sin(x)
exact = sin(x)
n = 7
sweep = 3,5,7
",
    ),
    (
        "population",
        "first-order renewal model with an (x-s) memory kernel",
        "\
# B' - int_0^x (x-s) B(s) ds = (6(1+x) - 7e^{x/2} - 4 sin x)/4,
# exact B = (e^{x/2} - sin x + cos x)/2.
name = population
order = 1
coeff.1 = 1
integral.0.weight = -1
integral.0.kernel = conv:2
integral.0.deriv = 0
ic.0 = 1
rhs = (1/4)*(6*(1 + x) - 7*exp(x/2) - 4*sin(x))
exact = (1/2)*(exp(x/2) - sin(x) + cos(x))
n = 5
sweep = 5,7
",
    ),
];

/// Problem-file text of a built-in example, if the name matches one.
pub fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN_EXAMPLES.iter().find(|(n, _, _)| *n == name).map(|(_, _, text)| *text)
}

/// A parsed problem file: the validated problem plus its run defaults.
#[derive(Debug)]
pub struct ProblemFile {
    pub problem: IdeProblem,
    pub default_n: Option<usize>,
    pub sweep: Option<Vec<usize>>,
}

struct PartialIntegral {
    weight: Option<Coefficient>,
    kernel: Option<Kernel>,
    deriv: Option<usize>,
}

fn file_err(line: usize, message: impl Into<String>) -> Error {
    Error::ProblemFile { line, message: message.into() }
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize, Error> {
    value
        .parse()
        .map_err(|_| file_err(line, format!("{key}: invalid integer `{value}`")))
}

fn parse_expr_value(value: &str, line: usize, key: &str) -> Result<Expr, Error> {
    expr::parse(value).map_err(|e| file_err(line, format!("{key}: {e}")))
}

/// Coefficient/weight value: constants fold to numbers (keeping the exact
/// operational-matrix path available), anything else becomes a function of x.
fn parse_coefficient(value: &str, line: usize, key: &str) -> Result<Coefficient, Error> {
    let e = parse_expr_value(value, line, key)?;
    if e.is_constant() {
        let v = e.eval(None, None).map_err(|err| file_err(line, format!("{key}: {err}")))?;
        return Ok(Coefficient::Constant(v));
    }
    if e.uses(Var::T) {
        return Err(file_err(line, format!("{key}: variable t is not allowed here (a function of x)")));
    }
    Ok(Coefficient::Function(Box::new(move |x| e.eval(Some(x), None))))
}

fn parse_kernel(value: &str, line: usize, key: &str) -> Result<Kernel, Error> {
    if let Some(rest) = value.strip_prefix("conv:") {
        let m = rest
            .trim()
            .parse()
            .map_err(|_| file_err(line, format!("{key}: invalid convolution power `{rest}`")))?;
        return Ok(Kernel::Convolution(m));
    }
    let e = parse_expr_value(value, line, key)?;
    Ok(Kernel::General(Box::new(move |x, t| e.eval(Some(x), Some(t)))))
}

fn parse_scalar_fn(value: &str, line: usize, key: &str) -> Result<ScalarFn, Error> {
    let e = parse_expr_value(value, line, key)?;
    if e.uses(Var::T) {
        return Err(file_err(line, format!("{key}: variable t is not allowed here (a function of x)")));
    }
    Ok(Box::new(move |x| e.eval(Some(x), None)))
}

fn parse_constant(value: &str, line: usize, key: &str) -> Result<f64, Error> {
    let e = parse_expr_value(value, line, key)?;
    if !e.is_constant() {
        return Err(file_err(line, format!("{key}: must be a constant")));
    }
    e.eval(None, None).map_err(|err| file_err(line, format!("{key}: {err}")))
}

pub fn parse_problem_file(text: &str) -> Result<ProblemFile, Error> {
    let mut name: Option<String> = None;
    let mut order: Option<usize> = None;
    let mut coeffs: Vec<(usize, Coefficient)> = Vec::new();
    let mut integrals: Vec<(usize, PartialIntegral)> = Vec::new();
    let mut ics: Vec<(usize, f64)> = Vec::new();
    let mut rhs: Option<ScalarFn> = None;
    let mut exact: Option<ScalarFn> = None;
    let mut default_n: Option<usize> = None;
    let mut sweep: Option<Vec<usize>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(file_err(line, format!("expected `key = value`, got `{content}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(file_err(line, format!("{key}: empty value")));
        }

        match key {
            "name" => {
                if name.replace(value.to_string()).is_some() {
                    return Err(file_err(line, "duplicate key `name`"));
                }
            }
            "order" => {
                if order.replace(parse_usize(value, line, key)?).is_some() {
                    return Err(file_err(line, "duplicate key `order`"));
                }
            }
            "rhs" => {
                if rhs.replace(parse_scalar_fn(value, line, key)?).is_some() {
                    return Err(file_err(line, "duplicate key `rhs`"));
                }
            }
            "exact" => {
                if exact.replace(parse_scalar_fn(value, line, key)?).is_some() {
                    return Err(file_err(line, "duplicate key `exact`"));
                }
            }
            "n" => {
                if default_n.replace(parse_usize(value, line, key)?).is_some() {
                    return Err(file_err(line, "duplicate key `n`"));
                }
            }
            "sweep" => {
                let list = value
                    .split(',')
                    .map(|part| parse_usize(part.trim(), line, key))
                    .collect::<Result<Vec<usize>, Error>>()?;
                if sweep.replace(list).is_some() {
                    return Err(file_err(line, "duplicate key `sweep`"));
                }
            }
            _ if key.starts_with("coeff.") => {
                let i = parse_usize(&key["coeff.".len()..], line, key)?;
                if coeffs.iter().any(|(j, _)| *j == i) {
                    return Err(file_err(line, format!("duplicate key `{key}`")));
                }
                coeffs.push((i, parse_coefficient(value, line, key)?));
            }
            _ if key.starts_with("ic.") => {
                let i = parse_usize(&key["ic.".len()..], line, key)?;
                if ics.iter().any(|(j, _)| *j == i) {
                    return Err(file_err(line, format!("duplicate key `{key}`")));
                }
                ics.push((i, parse_constant(value, line, key)?));
            }
            _ if key.starts_with("integral.") => {
                let rest = &key["integral.".len()..];
                let Some((idx_part, field)) = rest.split_once('.') else {
                    return Err(file_err(line, format!("unknown key `{key}`")));
                };
                let term_idx = parse_usize(idx_part, line, key)?;
                let entry = match integrals.iter_mut().find(|(j, _)| *j == term_idx) {
                    Some((_, entry)) => entry,
                    None => {
                        integrals.push((
                            term_idx,
                            PartialIntegral { weight: None, kernel: None, deriv: None },
                        ));
                        &mut integrals.last_mut().expect("just pushed").1
                    }
                };
                let duplicate = match field {
                    "weight" => entry
                        .weight
                        .replace(parse_coefficient(value, line, key)?)
                        .is_some(),
                    "kernel" => entry.kernel.replace(parse_kernel(value, line, key)?).is_some(),
                    "deriv" => entry.deriv.replace(parse_usize(value, line, key)?).is_some(),
                    _ => return Err(file_err(line, format!("unknown key `{key}`"))),
                };
                if duplicate {
                    return Err(file_err(line, format!("duplicate key `{key}`")));
                }
            }
            _ => return Err(file_err(line, format!("unknown key `{key}`"))),
        }
    }

    let order = order.ok_or_else(|| Error::Validation("the problem file defines no `order`".into()))?;
    let rhs = rhs.ok_or_else(|| Error::Validation("the problem file defines no `rhs`".into()))?;

    // The leading coefficient first keeps assembly order canonical however the
    // file orders its lines.
    coeffs.sort_by_key(|&(i, _)| std::cmp::Reverse(i));

    let mut ic_values = Vec::with_capacity(order);
    for i in 0..order {
        match ics.iter().find(|(j, _)| *j == i) {
            Some((_, v)) => ic_values.push(*v),
            None => {
                return Err(Error::Validation(format!("missing initial condition `ic.{i}`")))
            }
        }
    }
    if let Some((i, _)) = ics.iter().find(|(j, _)| *j >= order) {
        return Err(Error::Validation(format!(
            "initial condition index {i} is not below the differential order {order}"
        )));
    }

    integrals.sort_by_key(|(j, _)| *j);
    let mut terms = Vec::with_capacity(integrals.len());
    for (expected, (idx, partial)) in integrals.into_iter().enumerate() {
        if idx != expected {
            return Err(Error::Validation(
                "integral term indices must start at 0 and be contiguous".into(),
            ));
        }
        let missing = |field: &str| {
            Error::Validation(format!("integral.{idx} is missing `integral.{idx}.{field}`"))
        };
        terms.push(IntegralTerm {
            weight: partial.weight.ok_or_else(|| missing("weight"))?,
            kernel: partial.kernel.ok_or_else(|| missing("kernel"))?,
            deriv: partial.deriv.ok_or_else(|| missing("deriv"))?,
        });
    }

    let problem = IdeProblem::new(
        name.unwrap_or_else(|| "problem".into()),
        order,
        coeffs,
        terms,
        ic_values,
        rhs,
        exact,
    )?;
    Ok(ProblemFile { problem, default_n, sweep })
}

/// Loads problem-file text: an existing file wins, otherwise a built-in
/// example name is accepted.
fn load_source(path: &str) -> Result<String, Error> {
    if !Path::new(path).exists() {
        if let Some(text) = builtin(path) {
            return Ok(text.to_string());
        }
    }
    std::fs::read_to_string(path).map_err(Error::from)
}

fn render_report(name: &str, sol: &SpectralSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "problem: {name}");
    let _ = writeln!(out, "n: {}", sol.n);
    let _ = writeln!(out, "coefficients:");
    for (i, c) in sol.y.coeffs().iter().enumerate() {
        let _ = writeln!(out, "  x^{i}: {c:.11e}");
    }
    let _ = writeln!(out, "max_residual: {:.11e}", sol.diagnostics.max_residual);
    if let Some(err) = sol.diagnostics.max_error {
        let _ = writeln!(out, "max_error: {err:.11e}");
    }
    out
}

fn render_samples_csv(
    sol: &SpectralSolution,
    exact: Option<&ScalarFn>,
) -> Result<String, Error> {
    let mut out = String::new();
    match exact {
        Some(f) => {
            out.push_str("x,y_approx,y_exact,abs_err\n");
            for i in 0..=200 {
                let x = i as f64 / 200.0;
                let ya = sol.y.eval(x);
                let ye = f(x)?;
                let _ = writeln!(out, "{x},{ya},{ye},{}", (ya - ye).abs());
            }
        }
        None => {
            out.push_str("x,y_approx\n");
            for i in 0..=200 {
                let x = i as f64 / 200.0;
                let _ = writeln!(out, "{x},{}", sol.y.eval(x));
            }
        }
    }
    Ok(out)
}

fn render_sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("n,max_error,max_residual\n");
    for p in points {
        let err = p.max_error.map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{err},{}", p.n, p.max_residual);
    }
    out
}

fn render_basis_csv(basis: &BasisSet) -> String {
    let size = basis.len();
    let mut out = String::new();
    let header: Vec<String> = (0..size).map(|j| format!("x^{j}")).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for k in 0..size {
        let row: Vec<String> = (0..size).map(|j| basis.phi(k).coeff(j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn render_theta_csv(th: &DenseMatrix) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..th.n_cols()).map(|j| format!("phi{j}")).collect();
    let _ = writeln!(out, "{}", header.join(","));
    for i in 0..th.n_rows() {
        let row: Vec<String> = th.row(i).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn cmd_solve(path: &str, n: Option<usize>, out: Option<&Path>) -> Result<(), Error> {
    let pf = parse_problem_file(&load_source(path)?)?;
    let n = n.or(pf.default_n).unwrap_or(7);
    let started = Instant::now();
    let sol = solve(&pf.problem, n, &SolveOptions::default())?;
    let ms = started.elapsed().as_secs_f64() * 1e3;
    print!("{}", render_report(pf.problem.name(), &sol));
    eprintln!("timing: solved `{}` with n = {n} in {ms:.3} ms", pf.problem.name());
    if let Some(out_path) = out {
        std::fs::write(out_path, render_samples_csv(&sol, pf.problem.exact())?)?;
    }
    Ok(())
}

fn cmd_sweep(path: &str, n_list: Option<Vec<usize>>) -> Result<(), Error> {
    let pf = parse_problem_file(&load_source(path)?)?;
    let degrees = match n_list.or(pf.sweep) {
        Some(list) if !list.is_empty() => list,
        _ => {
            return Err(Error::Validation(
                "no sweep degrees given (use --n-list or a `sweep` key)".into(),
            ))
        }
    };
    let k = pf.problem.order();
    if let Some(&bad) = degrees.iter().find(|&&n| n < k) {
        return Err(Error::Validation(format!(
            "sweep degree n = {bad} is below the differential order k = {k}"
        )));
    }

    // Failed degrees are reported on standard error and skipped; the rows of
    // the degrees that did solve still come out.
    let mut points = Vec::new();
    let mut first_failure: Option<Error> = None;
    for &n in &degrees {
        let started = Instant::now();
        match solve(&pf.problem, n, &SolveOptions::default()) {
            Ok(sol) => {
                let ms = started.elapsed().as_secs_f64() * 1e3;
                eprintln!("timing: n = {n} in {ms:.3} ms");
                points.push(SweepPoint {
                    n,
                    max_error: sol.diagnostics.max_error,
                    max_residual: sol.diagnostics.max_residual,
                });
            }
            Err(err) => {
                eprintln!("error: n = {n}: {err}");
                first_failure.get_or_insert(err);
            }
        }
    }
    print!("{}", render_sweep_csv(&points));
    match first_failure {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

fn cmd_basis(n: usize) -> Result<(), Error> {
    let basis = orthonormal_basis(n)?;
    print!("{}", render_basis_csv(&basis));
    Ok(())
}

fn cmd_theta(n: usize) -> Result<(), Error> {
    if n > crate::basis::MAX_DEGREE {
        return Err(Error::DegreeAboveSupportedBound { requested: n });
    }
    print!("{}", render_theta_csv(&theta(n)));
    Ok(())
}

fn cmd_examples(action: ExamplesAction) -> Result<(), Error> {
    match action {
        ExamplesAction::List => {
            for (name, description, _) in BUILTIN_EXAMPLES {
                println!("{name}  {description}");
            }
            Ok(())
        }
        ExamplesAction::Run { name } => {
            if builtin(&name).is_none() {
                let names: Vec<&str> = BUILTIN_EXAMPLES.iter().map(|(n, _, _)| *n).collect();
                return Err(Error::invalid(format!(
                    "unknown example `{name}` (available: {})",
                    names.join(", ")
                )));
            }
            cmd_solve(&name, None, None)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve { path, n, out } => cmd_solve(&path, n, out.as_deref()),
        Command::Sweep { path, n_list } => cmd_sweep(&path, n_list),
        Command::Basis { n } => cmd_basis(n),
        Command::Theta { n } => cmd_theta(n),
        Command::Examples { action } => cmd_examples(action),
    }
}

/// Entry point for the `volterra` binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::max_abs_on_grid;

    #[test]
    fn builtins_round_trip_through_the_parser() {
        for (name, _, text) in BUILTIN_EXAMPLES {
            let pf = parse_problem_file(text)
                .unwrap_or_else(|e| panic!("builtin {name} failed to parse: {e}"));
            assert_eq!(pf.problem.name(), name);
        }
        let ex1 = parse_problem_file(builtin("example1").unwrap()).unwrap();
        assert_eq!(ex1.problem.order(), 4);
        assert_eq!(ex1.problem.initial_conditions(), &[1.0, 1.0, 2.0, 3.0]);
        assert_eq!(ex1.default_n, Some(7));
        assert_eq!(ex1.sweep, None);
        let ex2 = parse_problem_file(builtin("example2").unwrap()).unwrap();
        assert_eq!(ex2.sweep, Some(vec![3, 5, 7]));
        let pop = parse_problem_file(builtin("population").unwrap()).unwrap();
        assert_eq!(pop.default_n, Some(5));
        assert_eq!(pop.sweep, Some(vec![5, 7]));
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn builtin_solutions_match_their_exact_functions() {
        // Parsing + solving through the file layer reproduces the accuracy of
        // the library-level runs.
        let pf = parse_problem_file(builtin("example1").unwrap()).unwrap();
        let sol = solve(&pf.problem, 7, &SolveOptions::default()).unwrap();
        let exact = pf.problem.exact().unwrap();
        let err = max_abs_on_grid(|x| Ok(sol.y.eval(x) - exact(x)?), 1001).unwrap();
        assert!(err <= 1e-11, "example1 error {err}");
    }

    #[test]
    fn coefficient_values_fold_constants() {
        assert!(matches!(
            parse_coefficient("3*(1 + 1)", 1, "coeff.0").unwrap(),
            Coefficient::Constant(v) if v == 6.0
        ));
        assert!(matches!(
            parse_coefficient("cos(x)", 1, "coeff.0").unwrap(),
            Coefficient::Function(_)
        ));
        let err = parse_coefficient("cos(t)", 1, "coeff.0").unwrap_err();
        assert!(err.to_string().contains("variable t"), "{err}");
    }

    #[test]
    fn kernel_values_split_convolution_from_general() {
        assert!(matches!(parse_kernel("conv:3", 1, "k").unwrap(), Kernel::Convolution(3)));
        match parse_kernel("(x - t)^2", 1, "k").unwrap() {
            Kernel::General(f) => assert_eq!(f(3.0, 1.0).unwrap(), 4.0),
            Kernel::Convolution(_) => panic!("expression kernel classified as convolution"),
        }
        let err = parse_kernel("conv:two", 1, "k").unwrap_err();
        assert!(err.to_string().contains("convolution power"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_problem_file("order = 1\nbogus = 3\n").unwrap_err();
        match err {
            Error::ProblemFile { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown key `bogus`"), "{message}");
            }
            other => panic!("unexpected error {other}"),
        }

        let err = parse_problem_file("order\n").unwrap_err();
        assert!(matches!(err, Error::ProblemFile { line: 1, .. }), "{err}");

        let err = parse_problem_file("order = 1\norder = 2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate key `order`"), "{err}");

        let err = parse_problem_file("order = 1\nrhs = 2x\n").unwrap_err();
        assert!(err.to_string().contains("rhs: syntax error"), "{err}");

        let err = parse_problem_file("order = 1\nic.0 = x\nrhs = 0\ncoeff.1 = 1\n").unwrap_err();
        assert!(err.to_string().contains("must be a constant"), "{err}");
    }

    #[test]
    fn structural_validation_after_parsing() {
        // order = 0 is rejected with the k >= 1 invariant in the message.
        let err = parse_problem_file("order = 0\nrhs = 1\n").unwrap_err();
        assert!(err.to_string().contains("k >= 1"), "{err}");

        let err = parse_problem_file("rhs = 1\n").unwrap_err();
        assert!(err.to_string().contains("no `order`"), "{err}");

        let err = parse_problem_file("order = 1\n").unwrap_err();
        assert!(err.to_string().contains("no `rhs`"), "{err}");

        let err =
            parse_problem_file("order = 1\nrhs = 1\ncoeff.1 = 1\n").unwrap_err();
        assert!(err.to_string().contains("ic.0"), "{err}");

        let err = parse_problem_file(
            "order = 1\nrhs = 1\ncoeff.1 = 1\nic.0 = 0\nintegral.0.weight = 1\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("integral.0.kernel"), "{err}");

        let err = parse_problem_file(
            "order = 1\nrhs = 1\ncoeff.1 = 1\nic.0 = 0\n\
             integral.1.weight = 1\nintegral.1.kernel = conv:1\nintegral.1.deriv = 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("contiguous"), "{err}");

        let err = parse_problem_file("order = 1\nrhs = 1\ncoeff.1 = 1\nic.0 = 0\nic.3 = 1\n")
            .unwrap_err();
        assert!(err.to_string().contains("not below"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# full-line comment\norder = 1   # trailing comment\n\ncoeff.1 = 1\nic.0 = 0\nrhs = 1\n";
        let pf = parse_problem_file(text).unwrap();
        assert_eq!(pf.problem.order(), 1);
        assert_eq!(pf.problem.name(), "problem");
    }

    #[test]
    fn report_uses_twelve_significant_digits() {
        let sol = SpectralSolution {
            n: 1,
            coefficients: vec![0.0, 0.0],
            y: crate::poly::Polynomial::new(vec![1.0, -0.25, 0.000123456789012345]),
            diagnostics: crate::solver::Diagnostics {
                max_residual: 3.0e-8,
                condition: 1.0,
                max_error: Some(2.5e-13),
            },
        };
        let report = render_report("demo", &sol);
        let expected = "problem: demo\n\
                        n: 1\n\
                        coefficients:\n\
                        \x20 x^0: 1.00000000000e0\n\
                        \x20 x^1: -2.50000000000e-1\n\
                        \x20 x^2: 1.23456789012e-4\n\
                        max_residual: 3.00000000000e-8\n\
                        max_error: 2.50000000000e-13\n";
        assert_eq!(report, expected);
    }

    #[test]
    fn theta_csv_matches_the_two_by_two_matrix() {
        let th = theta(1);
        let csv = render_theta_csv(&th);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "phi0,phi1");
        // 1/2 and 0 print exactly; the 1/(2√3) corners round-trip bitwise.
        let row0: Vec<&str> = lines[1].split(',').collect();
        let row1: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(row0[0], "0.5");
        assert_eq!(row1[1], "0");
        for (cell, (i, j)) in [(row0[1], (0, 1)), (row1[0], (1, 0))] {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(v, th.get(i, j), "cell {cell} does not round-trip");
        }
        let corner: f64 = row0[1].parse().unwrap();
        assert!((corner - 0.5 / 3.0_f64.sqrt()).abs() < 1e-15, "{corner}");
        assert!(row1[0].starts_with("-0.2886751345948"), "{}", row1[0]);
    }

    #[test]
    fn basis_csv_rows_are_monomial_coefficients() {
        let basis = orthonormal_basis(0).unwrap();
        assert_eq!(render_basis_csv(&basis), "x^0\n1\n");

        let basis = orthonormal_basis(2).unwrap();
        let csv = render_basis_csv(&basis);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x^0,x^1,x^2");
        // φ₂ = √5·(1 − 6x + 6x²); cells round-trip the stored coefficients.
        let row: Vec<f64> = lines[3].split(',').map(|c| c.parse().unwrap()).collect();
        let s5 = 5.0_f64.sqrt();
        for (got, want) in row.iter().zip([s5, -6.0 * s5, 6.0 * s5]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(row, basis.phi(2).coeffs(), "cells do not round-trip");
    }

    #[test]
    fn sweep_csv_leaves_unknown_errors_empty() {
        let points = [
            SweepPoint { n: 3, max_error: Some(0.5), max_residual: 0.25 },
            SweepPoint { n: 5, max_error: None, max_residual: 0.125 },
        ];
        assert_eq!(render_sweep_csv(&points), "n,max_error,max_residual\n3,0.5,0.25\n5,,0.125\n");
    }

    #[test]
    fn samples_csv_has_201_points_and_exact_columns() {
        let pf = parse_problem_file(builtin("example1").unwrap()).unwrap();
        let sol = solve(&pf.problem, 7, &SolveOptions::default()).unwrap();
        let csv = render_samples_csv(&sol, pf.problem.exact()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 202);
        assert_eq!(lines[0], "x,y_approx,y_exact,abs_err");
        assert!(lines[1].starts_with("0,1,1,"), "{}", lines[1]);
        assert!(lines[201].starts_with("1,"), "{}", lines[201]);

        let no_exact = render_samples_csv(&sol, None).unwrap();
        assert!(no_exact.starts_with("x,y_approx\n"));
        assert_eq!(no_exact.lines().count(), 202);
    }
}
