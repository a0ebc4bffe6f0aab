//! Dense square matrices, LU factorization and equilibrium potentials.
//!
//! Everything in this crate is built on [`Matrix`], a row-major `n × n`
//! matrix of finite reals. Operations never mutate their inputs.

use std::fmt;
use std::ops::Index;

/// Plain vectors are used for potentials, layer coefficients and the like.
pub type Vector = Vec<f64>;

/// Relative pivot threshold used by [`Lu::factor`].
///
/// A pivot is rejected when `|pivot| <= PIVOT_EPS * ‖A‖_max`.
pub const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular (pivot {pivot:e} at elimination step {step})")]
    Singular { step: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix must have at least one row")]
    Empty,
}

/// Slack used by every sign test and residual check.
///
/// A value `x` counts as nonnegative iff `x >= -abs_eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-9,
            rel_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Option<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        (ok(abs_eps) && ok(rel_eps)).then_some(Self { abs_eps, rel_eps })
    }

    /// Same relative slack, different absolute slack.
    pub fn with_abs(self, abs_eps: f64) -> Self {
        Self { abs_eps, ..self }
    }

    #[inline]
    pub fn nonneg(&self, x: f64) -> bool {
        x >= -self.abs_eps
    }

    #[inline]
    pub fn nonpos(&self, x: f64) -> bool {
        x <= self.abs_eps
    }

    #[inline]
    pub fn positive(&self, x: f64) -> bool {
        x > self.abs_eps
    }

    #[inline]
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_eps
    }

    #[inline]
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.abs_eps
    }
}

/// Dense square matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Matrix {
    /// Builds an `n × n` matrix from row-major data.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(LinalgError::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, data)
    }

    /// Builds a matrix from an entry function. Panics on non-finite values.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = f(i, j);
                assert!(x.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(x);
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| 1.0)
    }

    pub fn from_diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vector {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Entrywise image under `f`. Panics if `f` produces a non-finite value.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    pub fn zip_with(
        &self,
        other: &Self,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self, LinalgError> {
        self.check_dim(other.n)?;
        Ok(Self::from_fn(self.n, |i, j| {
            f(self.get(i, j), other.get(i, j))
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|x| s * x)
    }

    /// `I + t·self`.
    pub fn identity_plus(&self, t: f64) -> Self {
        Self::from_fn(self.n, |i, j| {
            let x = t * self.get(i, j);
            if i == j {
                1.0 + x
            } else {
                x
            }
        })
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            let x = -self.get(i, j);
            if i == j {
                1.0 + x
            } else {
                x
            }
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other.n)?;
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Self::new(n, out)
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vector, LinalgError> {
        self.check_dim(v.len())?;
        Ok(self.rows().map(|r| dot(r, v)).collect())
    }

    /// `v' · self`, returned as a column vector.
    pub fn vec_mul(&self, v: &[f64]) -> Result<Vector, LinalgError> {
        self.check_dim(v.len())?;
        let mut out = vec![0.0; self.n];
        for (r, &vi) in self.rows().zip(v) {
            for (o, &x) in out.iter_mut().zip(r) {
                *o += vi * x;
            }
        }
        Ok(out)
    }

    pub fn row_sums(&self) -> Vector {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vector {
        let mut out = vec![0.0; self.n];
        for r in self.rows() {
            for (o, &x) in out.iter_mut().zip(r) {
                *o += x;
            }
        }
        out
    }

    /// `max_ij |a_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, LinalgError> {
        self.check_dim(other.n)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// First entry (row-major) below `-tol.abs_eps`.
    pub fn first_negative(&self, tol: &Tolerance) -> Option<(usize, usize, f64)> {
        self.data
            .iter()
            .position(|&x| !tol.nonneg(x))
            .map(|k| (k / self.n, k % self.n, self.data[k]))
    }

    pub fn is_nonnegative(&self, tol: &Tolerance) -> bool {
        self.first_negative(tol).is_none()
    }

    /// `Π U Π'` where position `k` of the result holds original index `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        Self::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Restriction to `keep × keep`, in the order given.
    pub fn select(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    fn check_dim(&self, got: usize) -> Result<(), LinalgError> {
        if got == self.n {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got,
            })
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn ones(n: usize) -> Vector {
    vec![1.0; n]
}

pub fn max_abs_diff_vec(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self, LinalgError> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let threshold = PIVOT_EPS * a.max_abs();

        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[i * n + k]))
                .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
                .expect("non-empty pivot column");
            if pivot.abs() <= threshold || pivot == 0.0 {
                return Err(LinalgError::Singular { step: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm, sign })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn det(&self) -> f64 {
        (0..self.n).fold(self.sign, |d, i| d * self.lu[i * self.n + i])
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vector, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut x: Vector = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves `A' x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vector, LinalgError> {
        let n = self.n;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        // A' = U' L' P, so solve U' y = b, then L' z = y, then x = P' z.
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[j * n + i] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[j * n + i] * y[j]).sum();
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e).expect("dimension checked");
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        Matrix { n, data }
    }
}

pub fn lu_invert(u: &Matrix) -> Result<Matrix, LinalgError> {
    Ok(Lu::factor(u)?.inverse())
}

pub fn solve(u: &Matrix, b: &[f64]) -> Result<Vector, LinalgError> {
    Lu::factor(u)?.solve(b)
}

/// Determinant via LU; zero when the factorization declares singularity.
pub fn det(u: &Matrix) -> f64 {
    Lu::factor(u).map(|lu| lu.det()).unwrap_or(0.0)
}

pub fn is_nonsingular(u: &Matrix) -> bool {
    Lu::factor(u).is_ok()
}

/// Right and left equilibrium potentials: `U μ = 1` and `ν' U = 1'`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPotentials {
    pub mu: Vector,
    pub nu: Vector,
    pub total_mass: f64,
}

impl EquilibriumPotentials {
    pub fn left_mass(&self) -> f64 {
        self.nu.iter().sum()
    }
}

pub fn equilibrium_potentials(u: &Matrix) -> Result<EquilibriumPotentials, LinalgError> {
    let lu = Lu::factor(u)?;
    let one = ones(u.n);
    let mu = lu.solve(&one)?;
    let nu = lu.solve_transpose(&one)?;
    let total_mass = mu.iter().sum();
    Ok(EquilibriumPotentials { mu, nu, total_mass })
}

/// Entrywise product `A ⊙ B`.
pub fn hadamard_product(a: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    a.zip_with(b, |x, y| x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p3() -> Matrix {
        Matrix::from_rows(&[[0.0, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.0]]).unwrap()
    }

    fn u_beta(beta: f64) -> Matrix {
        Matrix::from_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [beta, beta, 1.0, 0.0],
            [beta, beta, 0.0, 1.0],
        ])
        .unwrap()
    }

    /// Gauss-Jordan on an augmented tableau, no pivoting; used only as an
    /// independent route for small well-conditioned inputs.
    fn gauss_jordan(a: &Matrix) -> Matrix {
        let n = a.n();
        let mut t: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = a.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for k in 0..n {
            let p = t[k][k];
            for x in t[k].iter_mut() {
                *x /= p;
            }
            for i in 0..n {
                if i != k {
                    let f = t[i][k];
                    let rk = t[k].clone();
                    for (x, y) in t[i].iter_mut().zip(rk) {
                        *x -= f * y;
                    }
                }
            }
        }
        Matrix::from_fn(n, |i, j| t[i][n + j])
    }

    #[test]
    fn identity_inverts_to_identity() {
        let i3 = Matrix::identity(3);
        assert_eq!(lu_invert(&i3).unwrap(), i3);
    }

    #[test]
    fn inverse_of_i_minus_p() {
        let a = p3().identity_minus();
        let oracle = gauss_jordan(&a);
        let expected =
            Matrix::from_rows(&[[1.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 1.5]]).unwrap();
        assert!(oracle.max_abs_diff(&expected).unwrap() < 1e-14);
        let inv = lu_invert(&a).unwrap();
        assert!(inv.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn u_beta_inverse_is_u_minus_beta() {
        let inv = lu_invert(&u_beta(0.3)).unwrap();
        assert!(inv.max_abs_diff(&u_beta(-0.3)).unwrap() < 1e-15);
    }

    #[test]
    fn solve_examples() {
        let x = solve(&Matrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);

        let x = solve(&p3().identity_minus(), &ones(3)).unwrap();
        for (a, b) in x.iter().zip([3.0, 4.0, 3.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }

        let x = solve(&u_beta(0.3), &ones(4)).unwrap();
        for (a, b) in x.iter().zip([1.0, 1.0, 0.4, 0.4]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(lu_invert(&a), Err(LinalgError::Singular { .. })));
        assert!(matches!(
            lu_invert(&Matrix::zeros(2)),
            Err(LinalgError::Singular { .. })
        ));
        assert_eq!(det(&a), 0.0);
    }

    #[test]
    fn potentials_examples() {
        let eq = equilibrium_potentials(&Matrix::identity(3)).unwrap();
        assert_eq!(eq.mu, ones(3));
        assert_eq!(eq.nu, ones(3));

        let u = Matrix::from_rows(&[[1.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 1.5]]).unwrap();
        let eq = equilibrium_potentials(&u).unwrap();
        for v in [&eq.mu, &eq.nu] {
            for (a, b) in v.iter().zip([0.5, 0.0, 0.5]) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
            }
        }

        let eq = equilibrium_potentials(&u_beta(0.6)).unwrap();
        assert!(eq.mu.iter().any(|&x| x < 0.0));
        assert_abs_diff_eq!(eq.mu[2], -0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(eq.total_mass, eq.left_mass(), epsilon = 1e-12);
    }

    #[test]
    fn hadamard_product_examples() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(hadamard_product(&a, &Matrix::ones(2)).unwrap(), a);
        assert_eq!(
            hadamard_product(&Matrix::identity(2), &a).unwrap(),
            Matrix::from_diag(&[1.0, 4.0])
        );
        assert_eq!(
            hadamard_product(&a, &a).unwrap(),
            Matrix::from_rows(&[[1.0, 4.0], [9.0, 16.0]]).unwrap()
        );
        assert!(matches!(
            hadamard_product(&a, &Matrix::identity(3)),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn transpose_solve_matches_explicit_transpose() {
        let a = Matrix::from_rows(&[[4.0, 1.0, 2.0], [0.5, 3.0, 1.0], [2.0, 0.0, 5.0]]).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x1 = Lu::factor(&a).unwrap().solve_transpose(&b).unwrap();
        let x2 = solve(&a.transpose(), &b).unwrap();
        assert!(max_abs_diff_vec(&x1, &x2) < 1e-14);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(LinalgError::NotSquare { row: 1, len: 1, n: 2 })
        );
        assert_eq!(
            Matrix::new(1, vec![f64::NAN]),
            Err(LinalgError::NonFinite { row: 0, col: 0 })
        );
        assert_eq!(Matrix::from_rows::<[f64; 0]>(&[]), Err(LinalgError::Empty));
    }
}
