//! Spectral solution of linear Volterra integro-differential equations
//!
//! ```text
//! Σᵢ aᵢ(x)·y⁽ⁱ⁾(x) + Σₜ bₜ(x)·∫₀ˣ Kₜ(x,s)·y⁽ʲᵗ⁾(s) ds = r(x),   x ∈ [0,1],
//! y⁽ⁱ⁾(0) = αᵢ  for  i = 0, …, k−1,
//! ```
//!
//! where k is the differential order, i ≤ k, jₜ ≤ k, and each kernel is either
//! the convolution power (x−s)^{m−1} or an arbitrary function of (x, s).
//!
//! The highest derivative is expanded as y⁽ᵏ⁾ = CᵀΦ in the orthonormal basis.
//! Repeated integration turns every lower derivative into a Θ-power acting on
//! C plus a polynomial carrying the initial conditions, so the equation
//! becomes Cᵀ·M·Φ(x) = r̃(x) with the initial-condition part moved into the
//! effective right-hand side r̃. Projecting r̃ onto the basis gives the dense
//! linear system MᵀC = R. The solution is reconstructed by k exact symbolic
//! integrations of CᵀΦ plus the initial-condition polynomial, so y⁽ⁱ⁾(0) = αᵢ
//! holds to machine precision by construction.

use crate::basis::{orthonormal_basis, BasisSet};
use crate::error::Error;
use crate::linalg::{condition_inf, solve_transposed, DenseMatrix};
use crate::opmat::{kernel_matrix, product_matrix, theta, weighted_convolution_matrix};
use crate::poly::Polynomial;
use crate::project::{default_order, gauss_legendre, max_abs_on_grid, project, reconstruct, QuadratureRule};

pub type ScalarFn = Box<dyn Fn(f64) -> Result<f64, Error>>;
pub type KernelFn = Box<dyn Fn(f64, f64) -> Result<f64, Error>>;

/// A coefficient or integral weight: a constant keeps the assembly in exact
/// Θ-power arithmetic, a function routes through quadrature projections.
pub enum Coefficient {
    Constant(f64),
    Function(ScalarFn),
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        match self {
            Coefficient::Constant(c) => Ok(*c),
            Coefficient::Function(f) => f(x),
        }
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// Kernel of an integral term: `Convolution(m)` is (x−s)^{m−1} (so m = 1 is
/// the plain Volterra operator), `General` is any K(x, s).
pub enum Kernel {
    Convolution(usize),
    General(KernelFn),
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Convolution(m) => write!(f, "Convolution({m})"),
            Kernel::General(_) => write!(f, "General(..)"),
        }
    }
}

/// One integral term b(x)·∫₀ˣ K(x,s)·y⁽ʲ⁾(s) ds.
pub struct IntegralTerm {
    pub weight: Coefficient,
    pub kernel: Kernel,
    pub deriv: usize,
}

/// A validated problem instance. Constructed once through [`IdeProblem::new`],
/// which enforces every structural invariant the solver relies on.
pub struct IdeProblem {
    name: String,
    order: usize,
    coeffs: Vec<(usize, Coefficient)>,
    integrals: Vec<IntegralTerm>,
    ics: Vec<f64>,
    rhs: ScalarFn,
    exact: Option<ScalarFn>,
}

impl IdeProblem {
    pub fn new(
        name: impl Into<String>,
        order: usize,
        coeffs: Vec<(usize, Coefficient)>,
        integrals: Vec<IntegralTerm>,
        ics: Vec<f64>,
        rhs: ScalarFn,
        exact: Option<ScalarFn>,
    ) -> Result<IdeProblem, Error> {
        if order == 0 {
            return Err(Error::Validation(
                "the differential order k must satisfy k >= 1".into(),
            ));
        }
        if ics.len() != order {
            return Err(Error::Validation(format!(
                "expected k = {order} initial conditions (one per derivative 0..{}), got {}",
                order - 1,
                ics.len()
            )));
        }
        let mut seen = vec![false; order + 1];
        for (i, _) in &coeffs {
            if *i > order {
                return Err(Error::Validation(format!(
                    "coefficient index {i} exceeds the differential order {order}"
                )));
            }
            if seen[*i] {
                return Err(Error::Validation(format!(
                    "duplicate coefficient for derivative {i}"
                )));
            }
            seen[*i] = true;
        }
        if !seen[order] {
            return Err(Error::Validation(format!(
                "the leading coefficient (derivative {order}) is required"
            )));
        }
        for term in &integrals {
            if term.deriv > order {
                return Err(Error::Validation(format!(
                    "integral term differentiates y to order {}, above the equation order {order}",
                    term.deriv
                )));
            }
            if let Kernel::Convolution(m) = term.kernel {
                if !(1..=16).contains(&m) {
                    return Err(Error::Validation(format!(
                        "convolution power {m} outside the supported range 1..=16"
                    )));
                }
            }
        }
        Ok(IdeProblem { name: name.into(), order, coeffs, integrals, ics, rhs, exact })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn initial_conditions(&self) -> &[f64] {
        &self.ics
    }

    pub fn exact(&self) -> Option<&ScalarFn> {
        self.exact.as_ref()
    }
}

impl std::fmt::Debug for IdeProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdeProblem")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("coeff_indices", &self.coeffs.iter().map(|(i, _)| *i).collect::<Vec<_>>())
            .field("integral_terms", &self.integrals.len())
            .field("ics", &self.ics)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Gauss–Legendre order for every projection; `None` picks
    /// [`default_order`] for the basis degree.
    pub quad_order: Option<usize>,
    /// Route constant coefficients and constant-weight convolutions through
    /// the quadrature-based matrices instead of exact Θ powers. The two paths
    /// agree closely; this exists to measure that, not to be faster.
    pub force_product_path: bool,
}

/// Diagnostics of one solve. The residual plugs the reconstructed solution
/// back into the original equation and takes the worst defect over the
/// quadrature nodes; the error is against the supplied exact solution on a
/// 1001-point grid (absent when no exact solution is known).
#[derive(Clone, Copy, Debug)]
pub struct Diagnostics {
    pub max_residual: f64,
    pub condition: f64,
    pub max_error: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SpectralSolution {
    pub n: usize,
    /// Basis coefficients of y⁽ᵏ⁾.
    pub coefficients: Vec<f64>,
    /// The reconstructed polynomial solution (degree ≤ n + k).
    pub y: Polynomial,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub n: usize,
    pub max_error: Option<f64>,
    pub max_residual: f64,
}

/// Polynomial p with p⁽ⁱ⁾(0) = ics[i]: Σᵢ ics[i]·xⁱ/i!.
pub fn ic_polynomial(ics: &[f64]) -> Polynomial {
    let mut factorial = 1.0;
    let coeffs = ics
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if i > 0 {
                factorial *= i as f64;
            }
            a / factorial
        })
        .collect();
    Polynomial::new(coeffs)
}

/// System matrix M with Cᵀ·M·Φ(x) equal to the left-hand side applied to the
/// homogeneous part of the solution ansatz. Constant coefficients and
/// constant-weight convolution kernels stay in exact Θ-power arithmetic
/// (unless forced onto the quadrature path); everything else is projected.
pub fn assemble(
    problem: &IdeProblem,
    basis: &BasisSet,
    rule: &QuadratureRule,
    force_product_path: bool,
) -> Result<DenseMatrix, Error> {
    let size = basis.len();
    let k = problem.order;
    let th = theta(basis.n());
    let mut m = DenseMatrix::zeros(size, size);
    for (i, coeff) in &problem.coeffs {
        match coeff {
            Coefficient::Constant(a) if !force_product_path => {
                m = m.add(&th.pow(k - i).scale(*a));
            }
            Coefficient::Constant(a) => {
                let a = *a;
                m = m.add(&th.pow(k - i).mul(&product_matrix(|_| Ok(a), basis, rule)?));
            }
            Coefficient::Function(f) => {
                m = m.add(&th.pow(k - i).mul(&product_matrix(f, basis, rule)?));
            }
        }
    }
    for term in &problem.integrals {
        let shift = k - term.deriv;
        let contribution = match (&term.weight, &term.kernel) {
            (Coefficient::Constant(b), Kernel::Convolution(mm)) if !force_product_path => {
                // b·(m−1)!·Θ^{m+k−j}, entirely in operational-matrix arithmetic.
                let factorial: f64 = (1..*mm).map(|i| i as f64).product();
                th.pow(mm + shift).scale(b * factorial)
            }
            (Coefficient::Constant(b), Kernel::Convolution(mm)) => {
                let b = *b;
                let w = weighted_convolution_matrix(|_| Ok(b), *mm, basis, rule)?;
                th.pow(shift).mul(&w)
            }
            (Coefficient::Function(bf), Kernel::Convolution(mm)) => {
                let w = weighted_convolution_matrix(bf, *mm, basis, rule)?;
                th.pow(shift).mul(&w)
            }
            (weight, Kernel::General(kf)) => {
                let km = kernel_matrix(|x| weight.eval(x), kf, basis, rule)?;
                th.pow(shift).mul(&km)
            }
        };
        m = m.add(&contribution);
    }
    Ok(m)
}

/// How one integral term acts on a fixed polynomial integrand.
enum TermShape {
    /// Convolution kernels integrate polynomials exactly:
    /// ∫₀ˣ (x−s)^{m−1} p(s) ds = (m−1)!·(Iᵐp)(x).
    Symbolic(Polynomial),
    /// General kernels keep the integrand and evaluate ∫₀ˣ K(x,s)p(s) ds by
    /// the quadrature rule mapped onto [0, x].
    Nested(Polynomial),
}

fn integral_shapes(problem: &IdeProblem, base: &Polynomial) -> Vec<TermShape> {
    problem
        .integrals
        .iter()
        .map(|term| {
            let p = base.differentiate_n(term.deriv);
            match term.kernel {
                Kernel::Convolution(m) => {
                    let factorial: f64 = (1..m).map(|i| i as f64).product();
                    TermShape::Symbolic(p.integrate_n(m).scale(factorial))
                }
                Kernel::General(_) => TermShape::Nested(p),
            }
        })
        .collect()
}

fn shape_value(
    shape: &TermShape,
    kernel: &Kernel,
    x: f64,
    rule: &QuadratureRule,
) -> Result<f64, Error> {
    match (shape, kernel) {
        (TermShape::Symbolic(s), _) => Ok(s.eval(x)),
        (TermShape::Nested(p), Kernel::General(kf)) => {
            let mut acc = 0.0;
            for (&s, &w) in rule.nodes().iter().zip(rule.weights()) {
                let t = x * s;
                acc += w * kf(x, t)? * p.eval(t);
            }
            Ok(x * acc)
        }
        (TermShape::Nested(_), Kernel::Convolution(_)) => {
            unreachable!("convolution terms are always symbolic")
        }
    }
}

/// r̃(x) = r(x) − Σᵢ aᵢ(x)·p⁽ⁱ⁾(x) − Σₜ bₜ(x)·∫₀ˣ Kₜ(x,s)·p⁽ʲᵗ⁾(s) ds with p
/// the initial-condition polynomial: the right-hand side seen by the
/// homogeneous part of the ansatz.
pub fn effective_rhs<'a>(
    problem: &'a IdeProblem,
    rule: &'a QuadratureRule,
) -> impl Fn(f64) -> Result<f64, Error> + 'a {
    let ic = ic_polynomial(&problem.ics);
    let coeff_parts: Vec<Polynomial> =
        problem.coeffs.iter().map(|(i, _)| ic.differentiate_n(*i)).collect();
    let shapes = integral_shapes(problem, &ic);
    move |x| {
        let mut v = (problem.rhs)(x)?;
        for ((_, coeff), part) in problem.coeffs.iter().zip(&coeff_parts) {
            v -= coeff.eval(x)? * part.eval(x);
        }
        for (term, shape) in problem.integrals.iter().zip(&shapes) {
            v -= term.weight.eval(x)? * shape_value(shape, &term.kernel, x, rule)?;
        }
        Ok(v)
    }
}

/// Worst defect of the original equation under the reconstructed solution,
/// over the quadrature nodes.
fn residual_sup(
    problem: &IdeProblem,
    y: &Polynomial,
    rule: &QuadratureRule,
) -> Result<f64, Error> {
    let derivs: Vec<Polynomial> =
        problem.coeffs.iter().map(|(i, _)| y.differentiate_n(*i)).collect();
    let shapes = integral_shapes(problem, y);
    let mut worst: f64 = 0.0;
    for &x in rule.nodes() {
        let mut lhs = 0.0;
        for ((_, coeff), d) in problem.coeffs.iter().zip(&derivs) {
            lhs += coeff.eval(x)? * d.eval(x);
        }
        for (term, shape) in problem.integrals.iter().zip(&shapes) {
            lhs += term.weight.eval(x)? * shape_value(shape, &term.kernel, x, rule)?;
        }
        worst = worst.max((lhs - (problem.rhs)(x)?).abs());
    }
    Ok(worst)
}

/// Solves the problem with a degree-n basis.
pub fn solve(
    problem: &IdeProblem,
    n: usize,
    opts: &SolveOptions,
) -> Result<SpectralSolution, Error> {
    if n < problem.order {
        return Err(Error::Validation(format!(
            "basis degree n = {n} is below the differential order k = {}",
            problem.order
        )));
    }
    let basis = orthonormal_basis(n)?;
    let rule = gauss_legendre(opts.quad_order.unwrap_or_else(|| default_order(n)))?;
    let m = assemble(problem, &basis, &rule, opts.force_product_path)?;
    let rtilde = effective_rhs(problem, &rule);
    let r = project(&rtilde, &basis, &rule)?;
    let coefficients = solve_transposed(&m, &r)?;
    let y = ic_polynomial(&problem.ics)
        .add(&reconstruct(&coefficients, &basis).integrate_n(problem.order));

    let max_residual = residual_sup(problem, &y, &rule)?;
    let condition = condition_inf(&m.transpose())?;
    let max_error = match &problem.exact {
        Some(exact) => Some(max_abs_on_grid(|x| Ok(y.eval(x) - exact(x)?), 1001)?),
        None => None,
    };
    Ok(SpectralSolution {
        n,
        coefficients,
        y,
        diagnostics: Diagnostics { max_residual, condition, max_error },
    })
}

/// Solves at each degree in turn, collecting the convergence diagnostics.
pub fn convergence_sweep(
    problem: &IdeProblem,
    degrees: &[usize],
    opts: &SolveOptions,
) -> Result<Vec<SweepPoint>, Error> {
    degrees
        .iter()
        .map(|&n| {
            let sol = solve(problem, n, opts)?;
            Ok(SweepPoint {
                n,
                max_error: sol.diagnostics.max_error,
                max_residual: sol.diagnostics.max_residual,
            })
        })
        .collect()
}
