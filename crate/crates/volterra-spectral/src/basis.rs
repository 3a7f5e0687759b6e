//! The orthonormal polynomial basis on [0,1].
//!
//! φ₀..φₙ are the Gram–Schmidt orthonormalization of the Bernoulli polynomials
//! {B₀..Bₙ} in L²([0,1]). Gram–Schmidt runs in exact rational arithmetic (the
//! f64 route is hopeless: at n = 12 it loses orthogonality completely), and the
//! only floating-point step is the final division by √‖uₖ‖. The resulting
//! family coincides with the normalized shifted Legendre polynomials
//! √(2k+1)·Pₖ(2x−1), which [`shifted_legendre`] provides as an independent
//! cross-check built from the three-term recurrence instead of Gram–Schmidt.
//!
//! Degrees are capped at [`MAX_DEGREE`]: beyond that the f64 images of the
//! coefficients (which reach ~10⁷ at k = 12) start to shed precision faster
//! than the solver can use it.

use num::bigint::BigInt;
use num::integer::binomial;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::error::Error;
use crate::linalg::DenseMatrix;
use crate::poly::{rational_to_f64, Polynomial, RationalPolynomial};

/// Largest supported basis degree.
pub const MAX_DEGREE: usize = 16;

fn big(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn binom(n: usize, k: usize) -> BigRational {
    BigRational::from(binomial(BigInt::from(n), BigInt::from(k)))
}

/// Bernoulli numbers B₀..Bₙ (so B₁ = −1/2) by the defining recurrence
/// Bₘ = −(1/(m+1)) Σ_{k=0}^{m−1} C(m+1,k) Bₖ.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b = Vec::with_capacity(n + 1);
    b.push(BigRational::one());
    for m in 1..=n {
        let sum: BigRational = (0..m).map(|k| binom(m + 1, k) * &b[k]).sum();
        b.push(-sum / big(m as i64 + 1));
    }
    b
}

/// Bernoulli numbers by the independent Kronecker-type double sum
/// Bₙ = −Σ_{j=1}^{n+1} ((−1)ʲ/j) C(n+1,j) Σ_{k=0}^{j−1} kⁿ  (with 0⁰ = 1).
/// Exists purely to cross-check [`bernoulli_numbers`].
pub fn bernoulli_numbers_kronecker(n: usize) -> Vec<BigRational> {
    (0..=n)
        .map(|m| {
            let mut total = BigRational::zero();
            for j in 1..=m + 1 {
                let inner: BigInt = (0..j)
                    .map(|k| {
                        if k == 0 && m == 0 {
                            BigInt::one()
                        } else {
                            BigInt::from(k).pow(m as u32)
                        }
                    })
                    .sum();
                let sign = if j % 2 == 0 { BigRational::one() } else { -BigRational::one() };
                total += sign * binom(m + 1, j) * BigRational::from(inner) / big(j as i64);
            }
            -total
        })
        .collect()
}

/// The m-th Bernoulli polynomial, exactly: Bₘ(x) = Σᵢ C(m,i) B_{m−i} xⁱ.
pub fn bernoulli_poly(m: usize) -> RationalPolynomial {
    let numbers = bernoulli_numbers(m);
    RationalPolynomial::new(
        (0..=m).map(|i| binom(m, i) * &numbers[m - i]).collect(),
    )
}

/// Shifted Legendre polynomial Pₖ(2x−1), exact coefficients via the three-term
/// recurrence (k+1)P̃_{k+1} = (2k+1)(2x−1)P̃ₖ − k·P̃_{k−1}.
pub fn shifted_legendre(k: usize) -> RationalPolynomial {
    let s = RationalPolynomial::from_pairs(&[(-1, 1), (2, 1)]); // 2x − 1
    let mut prev = RationalPolynomial::one();
    if k == 0 {
        return prev;
    }
    let mut cur = s.clone();
    for j in 1..k {
        let next = s
            .mul(&cur)
            .scale(&BigRational::new(BigInt::from(2 * j as i64 + 1), BigInt::from(j as i64 + 1)))
            .sub(&prev.scale(&BigRational::new(BigInt::from(j as i64), BigInt::from(j as i64 + 1))));
        prev = cur;
        cur = next;
    }
    cur
}

/// The orthonormal basis of degree ≤ n, with its exact Gram–Schmidt backbone.
#[derive(Debug)]
pub struct BasisSet {
    n: usize,
    /// f64 images of φₖ = uₖ/√‖uₖ‖, for fast evaluation.
    phi: Vec<Polynomial>,
    /// Monic orthogonal polynomials uₖ from exact Gram–Schmidt.
    monic: Vec<RationalPolynomial>,
    /// Exact squared norms ⟨uₖ,uₖ⟩.
    norm2: Vec<BigRational>,
}

/// Runs exact Gram–Schmidt over {B₀..Bₙ} and packages the result.
///
/// Errors with [`Error::DegreeAboveSupportedBound`] for n > [`MAX_DEGREE`].
pub fn orthonormal_basis(n: usize) -> Result<BasisSet, Error> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeAboveSupportedBound { requested: n });
    }
    let mut monic: Vec<RationalPolynomial> = Vec::with_capacity(n + 1);
    let mut norm2: Vec<BigRational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut u = bernoulli_poly(k);
        // Classical Gram–Schmidt; exact arithmetic, so orthogonality is exact.
        for j in 0..k {
            let proj = u.inner(&monic[j]) / &norm2[j];
            u = u.sub(&monic[j].scale(&proj));
        }
        let n2 = u.inner(&u);
        monic.push(u);
        norm2.push(n2);
    }
    let phi = monic
        .iter()
        .zip(&norm2)
        .map(|(u, n2)| u.to_polynomial().scale(1.0 / rational_to_f64(n2).sqrt()))
        .collect();
    Ok(BasisSet { n, phi, monic, norm2 })
}

impl BasisSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of basis functions, n + 1.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn phi(&self, k: usize) -> &Polynomial {
        &self.phi[k]
    }

    pub fn phis(&self) -> &[Polynomial] {
        &self.phi
    }

    /// The exact monic Gram–Schmidt polynomial uₖ (φₖ = uₖ/√‖uₖ‖).
    pub fn monic(&self, k: usize) -> &RationalPolynomial {
        &self.monic[k]
    }

    /// Exact ⟨uₖ,uₖ⟩.
    pub fn norm2(&self, k: usize) -> &BigRational {
        &self.norm2[k]
    }

    /// Evaluates every φₖ at x into `out` (length n+1).
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.phi) {
            *o = p.eval(x);
        }
    }

    /// max_{i,j} |⟨φᵢ,φⱼ⟩ − δᵢⱼ| with exact integration of polynomial products.
    ///
    /// Inner products are formed from the exact Gram–Schmidt data, so
    /// off-diagonal entries are exactly zero and the diagonal only feels the
    /// final f64 square root. (Integrating the f64-rounded coefficients instead
    /// is already hopeless: defect ~6e-9 at n = 12.)
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..=self.n {
            for j in i..=self.n {
                let exact = self.monic[i].inner(&self.monic[j]);
                let value = if i == j {
                    // ⟨φᵢ,φᵢ⟩ = ‖uᵢ‖²/(√‖uᵢ‖²)², evaluated the way callers do.
                    let s = rational_to_f64(&self.norm2[i]).sqrt();
                    rational_to_f64(&exact) / (s * s) - 1.0
                } else {
                    rational_to_f64(&exact)
                        / (rational_to_f64(&self.norm2[i]).sqrt()
                            * rational_to_f64(&self.norm2[j]).sqrt())
                };
                worst = worst.max(value.abs());
            }
        }
        worst
    }

    /// (n+1)×(n+1) matrix T with T[i][k] = coefficient of xⁱ in φₖ: takes basis
    /// coordinates to monomial coefficients.
    pub fn to_monomial(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.n + 1, self.n + 1);
        for (k, p) in self.phi.iter().enumerate() {
            for i in 0..=self.n {
                t.set(i, k, p.coeff(i));
            }
        }
        t
    }

    /// (n+1)×(n+1) matrix F with F[k][j] = ⟨xʲ, φₖ⟩ (exact up to one division
    /// and square root): takes monomial coefficients of a degree ≤ n polynomial
    /// to its basis coordinates. Left inverse of [`BasisSet::to_monomial`].
    pub fn from_monomial(&self) -> DenseMatrix {
        let mut f = DenseMatrix::zeros(self.n + 1, self.n + 1);
        for k in 0..=self.n {
            let scale = rational_to_f64(&self.norm2[k]).sqrt();
            for j in 0..=self.n {
                // ⟨xʲ, uₖ⟩ = Σᵢ uₖ[i]/(i+j+1), exactly.
                let exact: BigRational = self.monic[k]
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c / big((i + j + 1) as i64))
                    .sum();
                f.set(k, j, rational_to_f64(&exact) / scale);
            }
        }
        f
    }
}

/// Exact structural equality of the basis with the shifted Legendre family:
/// uₖ·lc(P̃ₖ) == P̃ₖ and (2k+1)·lc(P̃ₖ)²·‖uₖ‖² == 1, both as rationals.
/// Returns the first k ≤ n that fails, if any.
pub fn legendre_mismatch(basis: &BasisSet) -> Option<usize> {
    for k in 0..=basis.n() {
        let p = shifted_legendre(k);
        let lc = p.coeff(k);
        if basis.monic(k).scale(&lc) != p {
            return Some(k);
        }
        let norm_identity = big((2 * k + 1) as i64) * &lc * &lc * basis.norm2(k);
        if !norm_identity.is_one() {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn first_bernoulli_numbers() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[0], br(1, 1));
        assert_eq!(b[1], br(-1, 2));
        assert_eq!(b[2], br(1, 6));
        assert_eq!(b[3], br(0, 1));
        assert_eq!(b[4], br(-1, 30));
        assert_eq!(b[12], br(-691, 2730));
    }

    #[test]
    fn kronecker_sum_agrees_with_recurrence() {
        assert_eq!(bernoulli_numbers(16), bernoulli_numbers_kronecker(16));
    }

    #[test]
    fn bernoulli_poly_b4_is_known_closed_form() {
        // B₄(x) = x⁴ − 2x³ + x² − 1/30.
        let b4 = bernoulli_poly(4);
        let want = RationalPolynomial::from_pairs(&[(-1, 30), (0, 1), (1, 1), (-2, 1), (1, 1)]);
        assert_eq!(b4, want);
    }

    #[test]
    fn bernoulli_derivative_identity_exact() {
        // B′ₙ = n·B_{n−1} for n = 1..12, exactly.
        for n in 1..=12 {
            let lhs = bernoulli_poly(n).differentiate();
            let rhs = bernoulli_poly(n - 1).scale(&br(n as i64, 1));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn bernoulli_mean_zero_exact() {
        // ∫₀¹ Bₙ = 0 for n = 1..12, exactly.
        for n in 1..=12 {
            assert!(bernoulli_poly(n).integral01().is_zero(), "n = {n}");
        }
    }

    #[test]
    fn low_degree_basis_closed_forms() {
        let basis = orthonormal_basis(3).unwrap();
        let s5 = 5.0_f64.sqrt();
        let phi2 = basis.phi(2);
        for (got, want) in phi2.coeffs().iter().zip([s5, -6.0 * s5, 6.0 * s5]) {
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
        }
        let s7 = 7.0_f64.sqrt();
        let phi3 = basis.phi(3);
        for (got, want) in phi3.coeffs().iter().zip([-s7, 12.0 * s7, -30.0 * s7, 20.0 * s7]) {
            assert!((got - want).abs() < 1e-11 * want.abs().max(1.0));
        }
    }

    #[test]
    fn gram_defect_is_tiny_even_at_the_cap() {
        let basis = orthonormal_basis(MAX_DEGREE).unwrap();
        assert!(basis.gram_defect() <= 1e-12, "defect {}", basis.gram_defect());
    }

    #[test]
    fn matches_shifted_legendre_exactly() {
        let basis = orthonormal_basis(12).unwrap();
        assert_eq!(legendre_mismatch(&basis), None);
    }

    #[test]
    fn leading_coefficients_positive() {
        let basis = orthonormal_basis(10).unwrap();
        for k in 0..=10 {
            let p = basis.phi(k);
            assert!(p.coeff(k) > 0.0, "k = {k}");
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let err = orthonormal_basis(17).unwrap_err();
        assert!(err.to_string().contains("degree above supported bound"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn monomial_round_trip_is_identity() {
        // to_monomial ∘ from_monomial fixes every polynomial of degree ≤ n.
        let basis = orthonormal_basis(8).unwrap();
        let prod = basis.to_monomial().mul(&basis.from_monomial());
        for i in 0..=8 {
            for j in 0..=8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - want).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn shifted_legendre_normalization_and_parity() {
        // P̃ₖ(1) = Pₖ(1) = 1 and P̃ₖ(0) = (−1)ᵏ.
        for k in 0..=10 {
            let p = shifted_legendre(k);
            let at1: BigRational = p.coeffs().iter().cloned().sum();
            assert!(at1.is_one(), "k = {k}");
            let at0 = p.coeff(0);
            let want = if k % 2 == 0 { br(1, 1) } else { br(-1, 1) };
            assert_eq!(at0, want, "k = {k}");
        }
    }
}
