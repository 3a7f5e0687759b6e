//! Operational matrices over the orthonormal basis φ₀..φₙ.
//!
//! Everything the solver does reduces to four matrices:
//! - Θ = [`theta`]: ∫₀ˣ φ(t) dt ≈ Θ φ(x) — integration as a linear map on
//!   basis coordinates. Sparse and explicit: almost tridiagonal, and Θᵐ
//!   realizes m-fold integration.
//! - [`convolution_matrix`]: ∫₀ˣ (x−t)^{m−1} g(t) dt = (m−1)!·(Iᵐ g)(x), so the
//!   matrix is (m−1)!·Θᵐ (Cauchy's repeated-integration formula).
//! - Â = [`product_matrix`]: a(x)·φ(x) ≈ Â φ(x), with Â[j][k] = ⟨a·φⱼ, φₖ⟩ —
//!   multiplication by a variable coefficient.
//! - Θ̂ = [`kernel_matrix`]: f(x)·∫₀ˣ K(x,t) φ(t) dt ≈ Θ̂ φ(x), with
//!   Θ̂[j][k] = ⟨gⱼ, φₖ⟩ for gⱼ(x) = f(x)·∫₀ˣ K(x,t) φⱼ(t) dt — a general
//!   weighted Volterra term in one matrix.
//!
//! Truncation caveat: `kernel_matrix` projects the *exact* integrals, while Θᵐ
//! is a truncated power. The two agree only on rows j ≤ n+1−m, where Iᵐφⱼ still
//! fits inside the basis; comparisons must restrict to those rows (the last
//! rows differ by the truncated tail, e.g. 1/(4(2n+1)(2n+3)) at (n,n) for
//! m = 2 — far above quadrature noise).

use crate::basis::BasisSet;
use crate::error::Error;
use crate::linalg::DenseMatrix;
use crate::project::QuadratureRule;

/// The (n+1)×(n+1) operational matrix of integration.
///
/// Row 0: Θ[0][0] = 1/2, Θ[0][1] = 1/(2√3). Rows 1 ≤ i < n:
/// Θ[i][i−1] = −1/(2√((2i−1)(2i+1))), Θ[i][i+1] = 1/(2√((2i+1)(2i+3))).
/// The last row keeps only its subdiagonal entry — the superdiagonal part is
/// the truncation defect (see [`crate::basis`] for the exact identity).
/// n = 0 yields the trivial 1×1 truncation [1/2].
pub fn theta(n: usize) -> DenseMatrix {
    let sub = |i: usize| -0.5 / (((2 * i - 1) * (2 * i + 1)) as f64).sqrt();
    let sup = |i: usize| 0.5 / (((2 * i + 1) * (2 * i + 3)) as f64).sqrt();
    let mut m = DenseMatrix::zeros(n + 1, n + 1);
    m.set(0, 0, 0.5);
    if n >= 1 {
        m.set(0, 1, sup(0));
    }
    for i in 1..=n {
        m.set(i, i - 1, sub(i));
        if i < n {
            m.set(i, i + 1, sup(i));
        }
    }
    m
}

/// (m−1)!·Θ(n)ᵐ: basis coordinates of g ↦ coordinates of ∫₀ˣ(x−t)^{m−1}g(t)dt.
pub fn convolution_matrix(m: usize, n: usize) -> Result<DenseMatrix, Error> {
    if !(1..=16).contains(&m) {
        return Err(Error::invalid(format!("convolution multiplicity {m} outside 1..=16")));
    }
    let factorial: f64 = (1..m).map(|i| i as f64).product();
    Ok(theta(n).pow(m).scale(factorial))
}

/// Â with Â[j][k] = ⟨a·φⱼ, φₖ⟩ by quadrature. Symmetric by construction.
pub fn product_matrix(
    mut a: impl FnMut(f64) -> Result<f64, Error>,
    basis: &BasisSet,
    rule: &QuadratureRule,
) -> Result<DenseMatrix, Error> {
    let size = basis.len();
    let mut m = DenseMatrix::zeros(size, size);
    let mut phival = vec![0.0; size];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let ax = w * a(x)?;
        basis.eval_all(x, &mut phival);
        for j in 0..size {
            let left = ax * phival[j];
            for (k, p) in phival.iter().enumerate().skip(j) {
                let v = m.get(j, k) + left * p;
                m.set(j, k, v);
            }
        }
    }
    for j in 0..size {
        for k in 0..j {
            m.set(j, k, m.get(k, j));
        }
    }
    Ok(m)
}

/// Θ̂ with Θ̂[j][k] = ⟨gⱼ, φₖ⟩, gⱼ(x) = f(x)·∫₀ˣ K(x,t) φⱼ(t) dt.
///
/// The inner integral uses the same rule mapped onto [0,x] (t = x·s), one pass
/// per outer node; the outer integral is the usual projection.
pub fn kernel_matrix(
    mut f: impl FnMut(f64) -> Result<f64, Error>,
    mut kernel: impl FnMut(f64, f64) -> Result<f64, Error>,
    basis: &BasisSet,
    rule: &QuadratureRule,
) -> Result<DenseMatrix, Error> {
    let size = basis.len();
    let mut m = DenseMatrix::zeros(size, size);
    let mut phival = vec![0.0; size];
    let mut inner = vec![0.0; size];
    for (&x, &wx) in rule.nodes().iter().zip(rule.weights()) {
        inner.fill(0.0);
        for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
            let t = x * s;
            let kv = ws * kernel(x, t)?;
            basis.eval_all(t, &mut phival);
            for (acc, p) in inner.iter_mut().zip(&phival) {
                *acc += kv * p;
            }
        }
        // gⱼ(x) = f(x)·x·Σₛ wₛ K(x, x·s) φⱼ(x·s); fold in the projection weight.
        let fx = wx * f(x)?;
        basis.eval_all(x, &mut phival);
        for (j, acc) in inner.iter().enumerate() {
            let g = fx * x * acc;
            for (k, p) in phival.iter().enumerate() {
                let v = m.get(j, k) + g * p;
                m.set(j, k, v);
            }
        }
    }
    Ok(m)
}

/// Kernel matrix for a convolution kernel (x−t)^{m−1} under a variable weight
/// w(x): entry [j][k] = ⟨w·(m−1)!·(Iᵐφⱼ), φₖ⟩. The inner integral is symbolic
/// (Iᵐφⱼ is an exact polynomial), so only one 1-D quadrature remains and no
/// extra truncation is introduced.
pub fn weighted_convolution_matrix(
    mut w: impl FnMut(f64) -> Result<f64, Error>,
    m: usize,
    basis: &BasisSet,
    rule: &QuadratureRule,
) -> Result<DenseMatrix, Error> {
    if !(1..=16).contains(&m) {
        return Err(Error::invalid(format!("convolution multiplicity {m} outside 1..=16")));
    }
    let factorial: f64 = (1..m).map(|i| i as f64).product();
    let size = basis.len();
    let integrated: Vec<_> = basis
        .phis()
        .iter()
        .map(|p| p.integrate_n(m).scale(factorial))
        .collect();
    let mut out = DenseMatrix::zeros(size, size);
    let mut phival = vec![0.0; size];
    for (&x, &wx) in rule.nodes().iter().zip(rule.weights()) {
        let wxv = wx * w(x)?;
        basis.eval_all(x, &mut phival);
        for (j, ip) in integrated.iter().enumerate() {
            let g = wxv * ip.eval(x);
            for (k, p) in phival.iter().enumerate() {
                let v = out.get(j, k) + g * p;
                out.set(j, k, v);
            }
        }
    }
    Ok(out)
}
