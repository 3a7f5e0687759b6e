//! Polynomial arithmetic in the monomial basis.
//!
//! Coefficients are stored ascending by degree: `[c0, c1, c2]` means
//! c0 + c1·x + c2·x². Both types keep the last stored coefficient nonzero, so
//! the zero polynomial is the empty list and `degree()` is −1 for it.
//!
//! [`Polynomial`] (f64) is the workhorse. [`RationalPolynomial`] is its
//! exact-arithmetic twin for the constructions where floating point would turn
//! cancellation into noise: Bernoulli polynomials, Gram–Schmidt, and the
//! symbolic identities the tests pin down.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Dense univariate polynomial with f64 coefficients, ascending by degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of x^i (0.0 beyond the stored degree).
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Degree, with −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Polynomial::new(coeffs)
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    /// Antiderivative with zero constant term: ∫₀ˣ p(t) dt.
    pub fn integrate(&self) -> Polynomial {
        if self.coeffs.is_empty() {
            return Polynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64));
        Polynomial::new(coeffs)
    }

    /// k-fold antiderivative, all integration constants zero.
    pub fn integrate_n(&self, k: usize) -> Polynomial {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.integrate();
        }
        p
    }

    pub fn differentiate(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (i + 1) as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn differentiate_n(&self, k: usize) -> Polynomial {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.differentiate();
        }
        p
    }
}

/// Dense univariate polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map(|c| c.is_zero()) == Some(true) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RationalPolynomial { coeffs: vec![BigRational::one()] }
    }

    /// Builds from (numerator, denominator) pairs; handy in tests.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        RationalPolynomial::new(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn scale(&self, s: &BigRational) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RationalPolynomial::new(coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> RationalPolynomial {
        if self.coeffs.is_empty() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / BigRational::from(BigInt::from(i as i64 + 1))),
        );
        RationalPolynomial::new(coeffs)
    }

    pub fn differentiate(&self) -> RationalPolynomial {
        if self.coeffs.len() <= 1 {
            return RationalPolynomial::zero();
        }
        RationalPolynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from(BigInt::from(i as i64 + 1)))
                .collect(),
        )
    }

    /// Exact ∫₀¹ p(x) dx.
    pub fn integral01(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c / BigRational::from(BigInt::from(i as i64 + 1)))
            .sum()
    }

    /// Exact L²([0,1]) inner product ⟨self, rhs⟩.
    pub fn inner(&self, rhs: &RationalPolynomial) -> BigRational {
        self.mul(rhs).integral01()
    }

    /// Nearest-f64 image of each coefficient.
    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(rational_to_f64).collect())
    }
}

/// Converts exactly where possible, otherwise via the f64 quotient of the parts.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(if r.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}
