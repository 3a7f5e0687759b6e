//! Dense matrices and the small amount of linear algebra the solver needs.
//!
//! Systems here are tiny ((n+1)×(n+1) with n ≤ 16), so everything is plain
//! row-major storage, O(n³) LU with partial pivoting, and explicit inverses for
//! condition estimates. The solver's central call is [`solve_transposed`]: the
//! spectral system arrives naturally as cᵀM = Rᵀ, i.e. Mᵀc = R.

use crate::error::Error;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix { n_rows, n_cols, data: vec![0.0; n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        DenseMatrix { n_rows, n_cols, data: rows.concat() }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.n_rows, self.n_cols), (rhs.n_rows, rhs.n_cols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        DenseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, data }
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.n_rows, self.n_cols), (rhs.n_rows, rhs.n_cols), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DenseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, data }
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        DenseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, data }
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n_cols, rhs.n_rows, "shape mismatch");
        let mut out = DenseMatrix::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    out.data[i * rhs.n_cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    /// A·v for a vector of matching length.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n_cols, v.len(), "shape mismatch");
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Aᵐ by binary exponentiation; A⁰ = I. Square matrices only.
    pub fn pow(&self, m: usize) -> DenseMatrix {
        assert_eq!(self.n_rows, self.n_cols, "pow needs a square matrix");
        let mut result = DenseMatrix::identity(self.n_rows);
        let mut base = self.clone();
        let mut m = m;
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// ‖A‖∞ (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| self.row(i).iter().map(|a| a.abs()).sum())
            .fold(0.0, f64::max)
    }
}

/// LU factorization with partial pivoting, PA = LU.
pub struct LuFactors {
    n: usize,
    /// L (below diagonal, unit diagonal implied) and U (diagonal and above) packed together.
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// Factors a square matrix. A pivot column whose best remaining entry is below
/// 1e-13 of that column's largest magnitude in the input matrix is treated as
/// numerically singular.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors, Error> {
    assert_eq!(a.n_rows(), a.n_cols(), "lu_factor needs a square matrix");
    let n = a.n_rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    // Per-column magnitude scales of the input, for the relative pivot test.
    let col_scale: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| a.get(i, j).abs()).fold(0.0, f64::max))
        .collect();

    for (k, &scale) in col_scale.iter().enumerate() {
        let (pivot_row, pivot_abs) = (k..n)
            .map(|i| (i, lu.get(i, k).abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty pivot search");
        if pivot_abs < 1e-13 * scale || pivot_abs == 0.0 {
            return Err(Error::Singular(format!(
                "pivot {pivot_abs:.3e} in column {k} below 1e-13 of column scale {scale:.3e}"
            )));
        }
        if pivot_row != k {
            perm.swap(k, pivot_row);
            for j in 0..n {
                let t = lu.get(k, j);
                lu.set(k, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, t);
            }
        }
        let inv_piv = 1.0 / lu.get(k, k);
        for i in k + 1..n {
            let factor = lu.get(i, k) * inv_piv;
            lu.set(i, k, factor);
            for j in k + 1..n {
                lu.set(i, j, lu.get(i, j) - factor * lu.get(k, j));
            }
        }
    }
    Ok(LuFactors { n, lu, perm })
}

impl LuFactors {
    /// Solves A x = b for the factored A.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "shape mismatch");
        // Forward substitution on Pb with unit-diagonal L.
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..self.n {
            for j in 0..i {
                x[i] -= self.lu.get(i, j) * x[j];
            }
        }
        // Back substitution with U.
        for i in (0..self.n).rev() {
            for j in i + 1..self.n {
                x[i] -= self.lu.get(i, j) * x[j];
            }
            x[i] /= self.lu.get(i, i);
        }
        x
    }

    /// Explicit inverse (column-by-column solves); fine at these sizes.
    pub fn inverse(&self) -> DenseMatrix {
        let mut inv = DenseMatrix::zeros(self.n, self.n);
        let mut e = vec![0.0; self.n];
        for j in 0..self.n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        inv
    }
}

/// Solves Mᵀ x = r — the orientation the spectral system comes in.
pub fn solve_transposed(m: &DenseMatrix, r: &[f64]) -> Result<Vec<f64>, Error> {
    lu_factor(&m.transpose()).map(|f| f.solve(r))
}

/// ‖A‖∞ · ‖A⁻¹‖∞ via the explicit inverse.
pub fn condition_inf(a: &DenseMatrix) -> Result<f64, Error> {
    Ok(a.inf_norm() * lu_factor(a)?.inverse().inf_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_pow_zero() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(a.pow(0), DenseMatrix::identity(2));
        assert_eq!(a.mul(&DenseMatrix::identity(2)), a);
    }

    #[test]
    fn pow_matches_naive_chain() {
        let a = DenseMatrix::from_rows(&[
            vec![0.5, 0.2, -0.1],
            vec![-0.3, 0.1, 0.4],
            vec![0.2, -0.2, 0.3],
        ]);
        let mut naive = DenseMatrix::identity(3);
        for _ in 0..5 {
            naive = naive.mul(&a);
        }
        let fast = a.pow(5);
        for i in 0..3 {
            for j in 0..3 {
                assert!((fast.get(i, j) - naive.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn transpose_round_trip() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(2, 1), 6.0);
    }

    #[test]
    fn solve_transposed_recovers_known_solution() {
        // M = [[2,0,1],[1,3,0],[0,1,4]]; pick x, form r = Mᵀx, solve back.
        let m = DenseMatrix::from_rows(&[
            vec![2.0, 0.0, 1.0],
            vec![1.0, 3.0, 0.0],
            vec![0.0, 1.0, 4.0],
        ]);
        let x = [1.0, -2.0, 0.5];
        let r = m.transpose().mul_vec(&x);
        let got = solve_transposed(&m, &r).unwrap();
        for (g, w) in got.iter().zip(x) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 1.0, 1.0],
        ]);
        let err = solve_transposed(&m, &[1.0, 1.0, 1.0]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn near_singular_scaled_matrix_still_solves() {
        // Well-conditioned but tiny entries: the relative pivot test must not fire.
        let m = DenseMatrix::identity(4).scale(1e-20);
        let x = solve_transposed(&m, &[1e-20, 2e-20, 3e-20, 4e-20]).unwrap();
        for (i, v) in x.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn condition_of_identity_is_one() {
        assert!((condition_inf(&DenseMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 5.0, 2.0],
            vec![0.0, 2.0, 6.0],
        ]);
        let inv = lu_factor(&a).unwrap().inverse();
        let prod = inv.mul(&a);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - want).abs() < 1e-14);
            }
        }
    }
}
