//! Dense kernels on contiguous row-major buffers: LU with partial pivoting, triangular
//! solves, matrix-vector products, norms and a power-iteration spectral norm.
//!
//! The `*_into` variants and [`LuFactors::refactor`] write into caller-owned buffers so the
//! solvers can run their inner loops without allocating.

use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is reported singular.
pub const SINGULAR_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Reshapes in place, zero-filling. Keeps the allocation when it is large enough.
    pub fn reset(&mut self, rows: usize, cols: usize) {
        self.rows = rows;
        self.cols = cols;
        self.data.clear();
        self.data.resize(rows * cols, 0.0);
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `y = A·x`.
pub fn matvec_into(a: &DenseMatrix, x: &[f64], y: &mut [f64]) -> Result<()> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch { expected: a.cols, found: x.len() });
    }
    if y.len() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: y.len() });
    }
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = dot(a.row(i), x);
    }
    Ok(())
}

pub fn matvec(a: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let mut y = vec![0.0; a.rows];
    matvec_into(a, x, &mut y)?;
    Ok(y)
}

/// `x = Aᵀ·y`.
pub fn transposed_matvec_into(a: &DenseMatrix, y: &[f64], x: &mut [f64]) -> Result<()> {
    if y.len() != a.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, found: y.len() });
    }
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch { expected: a.cols, found: x.len() });
    }
    x.fill(0.0);
    for (i, &yi) in y.iter().enumerate() {
        for (xj, &aij) in x.iter_mut().zip(a.row(i)) {
            *xj += aij * yi;
        }
    }
    Ok(())
}

pub fn transposed_matvec(a: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let mut x = vec![0.0; a.cols];
    transposed_matvec_into(a, y, &mut x)?;
    Ok(x)
}

#[inline]
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Packed LU factors of a row-permuted square matrix: `P·A = L·U`, with the unit-diagonal
/// `L` stored below the diagonal and `U` on and above it. Row `i` of `P·A` is row
/// `perm[i]` of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
    scale: Vec<f64>,
}

impl LuFactors {
    /// An empty factorization to be filled by [`LuFactors::refactor`].
    pub fn workspace() -> Self {
        Self { lu: DenseMatrix::zeros(0, 0), perm: Vec::new(), sign: 1.0, scale: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.lu.rows
    }

    pub fn packed(&self) -> &DenseMatrix {
        &self.lu
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Parity of the permutation, `±1`.
    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.order();
        let mut l = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.order();
        let mut u = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    pub fn determinant(&self) -> f64 {
        (0..self.order()).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    /// Factors `a` into this workspace, reusing its buffers.
    pub fn refactor(&mut self, a: &DenseMatrix) -> Result<()> {
        let n = a.rows;
        if a.cols != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.cols });
        }
        self.lu.reset(n, n);
        self.lu.data.copy_from_slice(&a.data);
        self.perm.clear();
        self.perm.extend(0..n);
        self.scale.clear();
        self.scale.extend((0..n).map(|i| norm_inf(a.row(i))));
        self.sign = 1.0;

        let lu = &mut self.lu;
        for k in 0..n {
            let (mut p, mut best) = (k, lu[(k, k)].abs());
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if !(best > SINGULAR_REL_TOL * self.scale[p]) {
                return Err(Error::Singular { column: k, pivot: best });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                self.perm.swap(k, p);
                self.scale.swap(k, p);
                self.sign = -self.sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == 0.0 {
                    continue;
                }
                let (upper, lower) = lu.data.split_at_mut(i * n);
                let src = &upper[k * n + k + 1..k * n + n];
                for (dst, &u) in lower[k + 1..n].iter_mut().zip(src) {
                    *dst -= f * u;
                }
            }
        }
        Ok(())
    }

    /// Solves `A·x = rhs` into `out`.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.order();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
        }
        if out.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: out.len() });
        }
        for i in 0..n {
            out[i] = rhs[self.perm[i]];
        }
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &out[..i]);
            out[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = dot(&row[i + 1..], &out[i + 1..]);
            out[i] = (out[i] - s) / row[i];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.order()];
        self.solve_into(rhs, &mut out)?;
        Ok(out)
    }

    /// Solves `Aᵀ·x = rhs` into `out`.
    pub fn solve_transposed_into(&self, rhs: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.order();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
        }
        if out.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: out.len() });
        }
        // Aᵀ = Uᵀ·Lᵀ·P: solve Uᵀ w = rhs, then Lᵀ v = w, then x = Pᵀ v
        let mut w = rhs.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * w[k];
            }
            w[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)] * w[k];
            }
            w[i] = s;
        }
        for i in 0..n {
            out[self.perm[i]] = w[i];
        }
        Ok(())
    }

    pub fn solve_transposed(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.order()];
        self.solve_transposed_into(rhs, &mut out)?;
        Ok(out)
    }
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    let mut f = LuFactors::workspace();
    f.refactor(a)?;
    Ok(f)
}

pub fn lu_solve(f: &LuFactors, rhs: &[f64]) -> Result<Vec<f64>> {
    f.solve(rhs)
}

/// Power-iteration estimate of `‖A‖₂`.
///
/// Starts from the normalized all-ones vector and, to cover a start vector orthogonal to
/// the leading singular vector, from an alternating-sign vector as well; the larger
/// estimate wins. Returns 0 for a zero matrix.
pub fn spectral_norm(a: &DenseMatrix, iters: usize, tol: f64) -> f64 {
    if a.data.iter().all(|&v| v == 0.0) || a.cols == 0 {
        return 0.0;
    }
    let ones = vec![1.0; a.cols];
    let alternating: Vec<f64> = (0..a.cols).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let first = power_iteration(a, ones, iters, tol);
    if a.cols == 1 {
        return first;
    }
    first.max(power_iteration(a, alternating, iters, tol))
}

fn power_iteration(a: &DenseMatrix, mut v: Vec<f64>, iters: usize, tol: f64) -> f64 {
    let mut av = vec![0.0; a.rows];
    let mut estimate = 0.0;
    let n = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n);
    for _ in 0..iters.max(1) {
        matvec_into(a, &v, &mut av).expect("conforming");
        let next = norm2(&av);
        transposed_matvec_into(a, &av, &mut v).expect("conforming");
        let n = norm2(&v);
        if n == 0.0 {
            return next;
        }
        v.iter_mut().for_each(|x| *x /= n);
        // the Rayleigh estimate converges quadratically; stop well inside `tol`
        let done = (next - estimate).abs() <= 1e-3 * tol * next;
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}
