//! L²([0,1]) machinery: Gauss–Legendre rules, projection onto the basis, and
//! reconstruction back to monomial coefficients.
//!
//! A q-point rule integrates polynomials up to degree 2q−1 exactly, so the
//! default order [`default_order`] (= max(40, 2n+20)) makes every product of
//! basis polynomials exact to f64 roundoff and leaves generous headroom for the
//! analytic coefficient and kernel functions that ride along.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::basis::BasisSet;
use crate::error::Error;
use crate::poly::Polynomial;

/// Maximum supported quadrature order.
pub const MAX_QUADRATURE_ORDER: usize = 128;

/// Gauss–Legendre rule mapped to [0,1]: Σ wᵢ f(xᵢ) ≈ ∫₀¹ f.
#[derive(Debug)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Nodes in (0,1), strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫₀¹ f by this rule; fails if f fails anywhere.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> Result<f64, Error>) -> Result<f64, Error> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x)?;
        }
        Ok(acc)
    }
}

/// Default quadrature order for a degree-n basis.
pub fn default_order(n: usize) -> usize {
    (2 * n + 20).max(40)
}

/// The q-point Gauss–Legendre rule on [0,1], cached per order.
///
/// Nodes are Newton-refined roots of the Legendre polynomial P_q (tolerance
/// 1e-15 on the update), seeded with the Chebyshev-like estimate
/// cos(π(i−1/4)/(q+1/2)). Orders outside 1..=128 are rejected.
pub fn gauss_legendre(q: usize) -> Result<Arc<QuadratureRule>, Error> {
    if !(1..=MAX_QUADRATURE_ORDER).contains(&q) {
        return Err(Error::invalid(format!(
            "quadrature order {q} outside 1..={MAX_QUADRATURE_ORDER}"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("quadrature cache poisoned");
    if let Some(rule) = cache.get(&q) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_rule(q));
    cache.insert(q, Arc::clone(&rule));
    Ok(rule)
}

/// P_q(x) and P′_q(x) on [−1,1] by the three-term recurrence.
fn legendre_value_derivative(q: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if q == 0 {
        return (1.0, 0.0);
    }
    for k in 1..q {
        let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
    }
    let dp = q as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn build_rule(q: usize) -> QuadratureRule {
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 1..=q {
        // Root estimates descend with i; refined by Newton on P_q.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_value_derivative(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_value_derivative(q, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [−1,1] → [0,1]; store ascending.
        nodes[q - i] = 0.5 * (x + 1.0);
        weights[q - i] = 0.5 * w;
    }
    QuadratureRule { order: q, nodes, weights }
}

/// ⟨f, g⟩ = ∫₀¹ f·g by the given rule.
pub fn inner_product(
    mut f: impl FnMut(f64) -> Result<f64, Error>,
    mut g: impl FnMut(f64) -> Result<f64, Error>,
    rule: &QuadratureRule,
) -> Result<f64, Error> {
    rule.integrate(|x| Ok(f(x)? * g(x)?))
}

/// Basis coefficients (⟨f,φ₀⟩, …, ⟨f,φₙ⟩) of f.
pub fn project(
    mut f: impl FnMut(f64) -> Result<f64, Error>,
    basis: &BasisSet,
    rule: &QuadratureRule,
) -> Result<Vec<f64>, Error> {
    let mut coeffs = vec![0.0; basis.len()];
    let mut phival = vec![0.0; basis.len()];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let fx = w * f(x)?;
        basis.eval_all(x, &mut phival);
        for (c, p) in coeffs.iter_mut().zip(&phival) {
            *c += fx * p;
        }
    }
    Ok(coeffs)
}

/// Σₖ cₖ φₖ as a monomial-coefficient polynomial.
pub fn reconstruct(coeffs: &[f64], basis: &BasisSet) -> Polynomial {
    assert_eq!(coeffs.len(), basis.len(), "coefficient count must match basis size");
    let mut acc = Polynomial::zero();
    for (c, phi) in coeffs.iter().zip(basis.phis()) {
        acc = acc.add(&phi.scale(*c));
    }
    acc
}

/// max |f| over `samples` equispaced points of [0,1] (endpoints included).
pub fn max_abs_on_grid(
    mut f: impl FnMut(f64) -> Result<f64, Error>,
    samples: usize,
) -> Result<f64, Error> {
    assert!(samples >= 2, "need at least the two endpoints");
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let x = i as f64 / (samples - 1) as f64;
        worst = worst.max(f(x)?.abs());
    }
    Ok(worst)
}
