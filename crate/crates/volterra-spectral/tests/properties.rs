//! Randomized properties: polynomial algebra, quadrature exactness, linear
//! solves, basis evaluation, and the expression-language round trip.

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use volterra_spectral::basis::orthonormal_basis;
use volterra_spectral::expr::{self, BinOp, Expr, Func, Var};
use volterra_spectral::linalg::{condition_inf, lu_factor, DenseMatrix};
use volterra_spectral::poly::Polynomial;
use volterra_spectral::project::gauss_legendre;
use volterra_spectral::solver::ic_polynomial;

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    vec(-100.0..100.0_f64, 0..8)
}

proptest! {
    #[test]
    fn polynomial_sum_evaluates_pointwise(p in coeffs(), q in coeffs(), x in 0.0..=1.0_f64) {
        let (p, q) = (Polynomial::new(p), Polynomial::new(q));
        let got = p.add(&q).eval(x);
        let want = p.eval(x) + q.eval(x);
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "{got} vs {want}");
    }

    #[test]
    fn polynomial_product_evaluates_pointwise(p in coeffs(), q in coeffs(), x in 0.0..=1.0_f64) {
        let (p, q) = (Polynomial::new(p), Polynomial::new(q));
        let got = p.mul(&q).eval(x);
        let want = p.eval(x) * q.eval(x);
        // Coefficient convolution reorders the sum, so scale by the mass.
        let mass = p.coeffs().iter().map(|c| c.abs()).sum::<f64>()
            * q.coeffs().iter().map(|c| c.abs()).sum::<f64>();
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + mass), "{got} vs {want}");
    }

    #[test]
    fn differentiation_inverts_integration(p in coeffs()) {
        let p = Polynomial::new(p);
        let back = p.integrate().differentiate();
        prop_assert_eq!(back.coeffs().len(), p.coeffs().len());
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn repeated_integration_composes(p in coeffs(), k in 0_usize..4) {
        let p = Polynomial::new(p);
        let at_once = p.integrate_n(k);
        let mut stepwise = p;
        for _ in 0..k {
            stepwise = stepwise.integrate();
        }
        prop_assert_eq!(at_once, stepwise);
    }

    #[test]
    fn gauss_rules_integrate_polynomials_exactly(
        q in 1_usize..=20,
        c in vec(-10.0..10.0_f64, 1..40),
    ) {
        // A q-point rule is exact through degree 2q−1; truncate to stay there.
        let keep = c.len().min(2 * q);
        let p = Polynomial::new(c[..keep].to_vec());
        let rule = gauss_legendre(q).unwrap();
        let got = rule.integrate(|x| Ok(p.eval(x))).unwrap();
        let want = p.integrate().eval(1.0);
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
    }

    #[test]
    fn diagonally_dominant_systems_solve_to_small_residuals(
        n in 2_usize..6,
        data in vec(-1.0..1.0_f64, 36),
        b in vec(-1.0..1.0_f64, 6),
    ) {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let mut off = 0.0;
            for j in 0..n {
                if i != j {
                    a.set(i, j, data[i * 6 + j]);
                    off += data[i * 6 + j].abs();
                }
            }
            a.set(i, i, off + 1.0);
        }
        let x = lu_factor(&a).unwrap().solve(&b[..n]);
        let r = a.mul_vec(&x);
        for i in 0..n {
            prop_assert!((r[i] - b[i]).abs() <= 1e-12 * (1.0 + b[i].abs()), "row {i}");
        }
        prop_assert!(condition_inf(&a).unwrap() >= 0.999_999);
    }

    #[test]
    fn matrix_power_multiplies_out(n in 1_usize..5, data in vec(-1.0..1.0_f64, 25)) {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, data[i * 5 + j]);
            }
        }
        prop_assert_eq!(&a.pow(0), &DenseMatrix::identity(n));
        prop_assert_eq!(&a.pow(1), &a);
        let cubed = a.pow(3);
        let manual = a.mul(&a).mul(&a);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((cubed.get(i, j) - manual.get(i, j)).abs() <= 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn ic_polynomial_matches_the_prescribed_derivatives(ics in vec(-10.0..10.0_f64, 1..6)) {
        let p = ic_polynomial(&ics);
        prop_assert!(p.coeffs().len() <= ics.len());
        for (i, &v) in ics.iter().enumerate() {
            let got = p.differentiate_n(i).eval(0.0);
            prop_assert!((got - v).abs() <= 1e-13 * v.abs().max(1.0), "y^({i})(0) = {got} vs {v}");
        }
    }
}

proptest! {
    // Each case builds a fresh exact-arithmetic basis; keep the count modest.
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn eval_all_matches_individual_evaluation(n in 0_usize..=8, x in 0.0..=1.0_f64) {
        let basis = orthonormal_basis(n).unwrap();
        let mut all = vec![0.0; n + 1];
        basis.eval_all(x, &mut all);
        for (k, &got) in all.iter().enumerate() {
            prop_assert_eq!(got, basis.phi(k).eval(x), "phi_{}", k);
        }
    }
}

/// Arbitrary well-formed expressions: nonnegative literals (a leading minus
/// lexes as unary negation, not as part of the number) and constant exponents
/// (the grammar rejects anything else under `^`).
fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0_u32..10_000).prop_map(|i| Expr::Num(f64::from(i) / 100.0)),
        Just(Expr::Var(Var::X)),
        Just(Expr::Var(Var::T)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
        ];
        let func = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Tan),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
        ];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
            (inner.clone(), 0_u32..4).prop_map(|(base, p)| {
                Expr::Bin(BinOp::Pow, Box::new(base), Box::new(Expr::Num(f64::from(p))))
            }),
            (func, inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn printing_reparses_to_a_stable_string(e in expr_strategy()) {
        // `+`/`-` chains print without right parens and reassociate on the way
        // back in, so the contract is a fixed point on strings, not on ASTs.
        let printed = e.to_string();
        let back = match expr::parse(&printed) {
            Ok(b) => b,
            Err(err) => {
                return Err(TestCaseError::fail(format!("`{printed}` does not reparse: {err}")))
            }
        };
        prop_assert_eq!(back.to_string(), printed.clone(), "not a fixed point");

        // Reassociation only reorders float rounding, never the value.
        let (v0, v1) = (e.eval(Some(0.7), Some(0.3)), back.eval(Some(0.7), Some(0.3)));
        if let (Ok(a), Ok(b)) = (v0, v1) {
            if a.abs() < 1e9 {
                prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "`{printed}`: {a} vs {b}");
            }
        }
    }
}
