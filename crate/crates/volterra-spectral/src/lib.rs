//! Spectral solver for linear Volterra integro-differential equations on [0,1].
//!
//! The method expands the highest derivative y⁽ᵏ⁾ in an orthonormal polynomial
//! basis φ₀..φₙ (Gram–Schmidt over the Bernoulli family, equal to normalized
//! shifted Legendre polynomials), replaces integration by the operational matrix
//! Θ, variable coefficients by product matrices, and Volterra kernels by kernel
//! matrices. The equation collapses to one dense linear system Mᵀc = R; the
//! solution polynomial is recovered by exact k-fold integration plus the
//! initial-condition Taylor polynomial.
//!
//! Modules, bottom-up:
//! - [`poly`]: monomial-basis polynomial arithmetic, f64 and exact-rational.
//! - [`basis`]: Bernoulli numbers/polynomials and the orthonormal basis.
//! - [`linalg`]: dense matrices, LU with partial pivoting.
//! - [`project`]: Gauss–Legendre rules, L² projection and reconstruction.
//! - [`opmat`]: Θ and the convolution/product/kernel operational matrices.
//! - [`expr`]: the expression language used by problem files.
//! - [`solver`]: problem description, assembly, solve, diagnostics, sweeps.
//! - [`cli`]: problem-file parsing, built-in examples, reports and CSV output.

pub mod basis;
pub mod cli;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod opmat;
pub mod poly;
pub mod project;
pub mod solver;

pub use error::Error;
