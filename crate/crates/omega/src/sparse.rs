//! Sparse symmetric kernels: CSR matrix-vector products, incomplete Cholesky
//! with zero fill-in, triangular solves, and the preconditioned conjugate
//! gradient solver.

use crate::{Error, Result};

/// Symmetric sparse matrix in compressed sparse row form.
///
/// The diagonal is always stored explicitly (with a zero value if absent from
/// the input) so shifted copies can be formed in place. Per-row column
/// indices are strictly increasing.
#[derive(Debug, Clone)]
pub struct SparseSymmetricMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed. The input must be structurally symmetric; this is checked.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len() + n);
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "triplet index ({i}, {j}) out of bounds for dimension {n}"
                )));
            }
            entries.push((i, j, v));
        }
        // Explicit diagonal so shifts always have a slot.
        for i in 0..n {
            entries.push((i, i, 0.0));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for (i, j, v) in entries {
            if col_indices.len() > row_offsets[i]
                && row_offsets[i + 1] == col_indices.len()
                && *col_indices.last().unwrap() == j
                && row_offsets[i] < row_offsets[i + 1]
            {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] = col_indices.len();
            }
        }
        // Fill offsets for trailing empty rows.
        for i in 0..n {
            if row_offsets[i + 1] < row_offsets[i] {
                row_offsets[i + 1] = row_offsets[i];
            }
        }
        let m = Self { n, row_offsets, col_indices, values };
        m.check_symmetry()?;
        Ok(m)
    }

    fn check_symmetry(&self) -> Result<()> {
        for i in 0..self.n {
            for idx in self.row_offsets[i]..self.row_offsets[i + 1] {
                let j = self.col_indices[idx];
                if self.get(j, i) != self.values[idx] {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Entry lookup; zero for positions outside the sparsity pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Returns `self + sigma * I`.
    pub fn shifted(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.n {
            let (start, end) = (out.row_offsets[i], out.row_offsets[i + 1]);
            let pos = out.col_indices[start..end]
                .binary_search(&i)
                .expect("diagonal entry is always stored");
            out.values[start + pos] += sigma;
        }
        out
    }

    /// Sparse matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "matvec dimension mismatch: matrix {} vs vector {}",
                self.n,
                x.len()
            )));
        }
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for idx in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[idx] * x[self.col_indices[idx]];
            }
            y[i] = acc;
        }
        Ok(y)
    }
}

/// Lower-triangular factor from incomplete Cholesky with zero fill-in.
///
/// The sparsity pattern is a subset of the lower triangle of the input; the
/// diagonal is always present and strictly positive.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>, // strictly increasing, last entry per row is the diagonal
    values: Vec<f64>,
    /// Diagonal boost applied by the breakdown fallback, if it fired.
    pub diagonal_boost: Option<f64>,
}

/// PCG stopping parameters: absolute preconditioned-residual tolerance and
/// iteration cap.
#[derive(Debug, Clone, Copy)]
pub struct PcgParams {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PcgParams {
    fn default() -> Self {
        PcgParams { tolerance: 0.1, max_iterations: 100 }
    }
}

/// IC(0) factorization of a symmetric positive definite matrix.
///
/// On a non-positive pivot the factorization restarts on `A + beta*diag(A)`
/// with `beta = 1e-3`, doubling up to 8 times; the boost that succeeded is
/// recorded on the factor.
pub fn incomplete_cholesky(a: &SparseSymmetricMatrix) -> Result<CholeskyFactor> {
    match try_factor(a, 0.0) {
        Some(f) => Ok(f),
        None => {
            let mut beta = 1e-3;
            for _ in 0..8 {
                if let Some(mut f) = try_factor(a, beta) {
                    f.diagonal_boost = Some(beta);
                    return Ok(f);
                }
                beta *= 2.0;
            }
            Err(Error::Numerical(
                "incomplete Cholesky broke down even with boosted diagonal".into(),
            ))
        }
    }
}

fn try_factor(a: &SparseSymmetricMatrix, beta: f64) -> Option<CholeskyFactor> {
    let n = a.dim();
    // Lower-triangle pattern of A, diagonal last in each row.
    let mut row_offsets = vec![0usize; n + 1];
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j < i {
                col_indices.push(j);
                values.push(v);
            } else if j == i {
                col_indices.push(j);
                values.push(v * (1.0 + beta));
            }
        }
        row_offsets[i + 1] = col_indices.len();
    }
    for i in 0..n {
        let (ri_start, ri_end) = (row_offsets[i], row_offsets[i + 1]);
        debug_assert_eq!(col_indices[ri_end - 1], i, "diagonal entry missing");
        for idx in ri_start..ri_end - 1 {
            let j = col_indices[idx];
            // L[i][j] = (A[i][j] - sum_{p<j} L[i][p] L[j][p]) / L[j][j]
            let (rj_start, rj_end) = (row_offsets[j], row_offsets[j + 1]);
            let mut s = 0.0;
            let mut pi = ri_start;
            let mut pj = rj_start;
            while pi < idx && pj < rj_end - 1 {
                match col_indices[pi].cmp(&col_indices[pj]) {
                    std::cmp::Ordering::Less => pi += 1,
                    std::cmp::Ordering::Greater => pj += 1,
                    std::cmp::Ordering::Equal => {
                        s += values[pi] * values[pj];
                        pi += 1;
                        pj += 1;
                    }
                }
            }
            values[idx] = (values[idx] - s) / values[rj_end - 1];
        }
        let mut d = values[ri_end - 1];
        for idx in ri_start..ri_end - 1 {
            d -= values[idx] * values[idx];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        values[ri_end - 1] = d.sqrt();
    }
    Some(CholeskyFactor { n, row_offsets, col_indices, values, diagonal_boost: None })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry of the lower-triangular factor.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Solves `K z = r` with `K = L L^T` by forward then backward
    /// substitution.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "preconditioner solve dimension mismatch: {} vs {}",
                self.n,
                r.len()
            )));
        }
        // Forward: L y = r.
        let mut y = r.to_vec();
        for i in 0..self.n {
            let (start, end) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = y[i];
            for idx in start..end - 1 {
                acc -= self.values[idx] * y[self.col_indices[idx]];
            }
            y[i] = acc / self.values[end - 1];
        }
        // Backward: L^T z = y, scattering column i of L^T from row i of L.
        for i in (0..self.n).rev() {
            let (start, end) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let zi = y[i] / self.values[end - 1];
            y[i] = zi;
            for idx in start..end - 1 {
                y[self.col_indices[idx]] -= self.values[idx] * zi;
            }
        }
        Ok(y)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned conjugate gradient solve of `A x = b`.
///
/// Starts from the zero vector and stops when the preconditioned residual
/// norm satisfies `r^T z < tolerance^2` or the iteration cap is reached; the
/// current iterate is returned in either case. A non-positive curvature
/// `p^T A p` is reported as a numerical failure (A not positive definite).
pub fn pcg_solve(
    a: &SparseSymmetricMatrix,
    b: &[f64],
    k: &CholeskyFactor,
    params: &PcgParams,
) -> Result<Vec<f64>> {
    pcg_solve_with_residuals(a, b, k, params).map(|(x, _)| x)
}

/// [`pcg_solve`] variant that also records the true residual 2-norm
/// `||b - A x||` after each iteration.
pub fn pcg_solve_with_residuals(
    a: &SparseSymmetricMatrix,
    b: &[f64],
    k: &CholeskyFactor,
    params: &PcgParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, norms, _) = pcg_core(a, b, k, params, false)?;
    Ok((x, norms))
}

/// [`pcg_solve`] variant recording every iterate, for convergence-property
/// tests (the error A-norm is the provably monotone quantity).
pub fn pcg_solve_with_iterates(
    a: &SparseSymmetricMatrix,
    b: &[f64],
    k: &CholeskyFactor,
    params: &PcgParams,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (x, _, iterates) = pcg_core(a, b, k, params, true)?;
    Ok((x, iterates))
}

fn pcg_core(
    a: &SparseSymmetricMatrix,
    b: &[f64],
    k: &CholeskyFactor,
    params: &PcgParams,
    record_iterates: bool,
) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    if b.len() != a.dim() {
        return Err(Error::InvalidInput(format!(
            "pcg dimension mismatch: matrix {} vs rhs {}",
            a.dim(),
            b.len()
        )));
    }
    let n = a.dim();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = k.solve(&r)?;
    let mut p = z.clone();
    let mut rho_old = dot(&r, &z);
    let mut residual_norms = Vec::new();
    let mut iterates = Vec::new();
    for _ in 0..params.max_iterations {
        let q = a.matvec(&p)?;
        let pq = dot(&p, &q);
        if pq <= 0.0 || !pq.is_finite() {
            return Err(Error::Numerical(
                "pcg breakdown: non-positive curvature, matrix is not positive definite".into(),
            ));
        }
        let alpha = rho_old / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        residual_norms.push(dot(&r, &r).sqrt());
        if record_iterates {
            iterates.push(x.clone());
        }
        z = k.solve(&r)?;
        let rho_new = dot(&r, &z);
        if rho_new < params.tolerance * params.tolerance {
            break;
        }
        let beta = rho_new / rho_old;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rho_old = rho_new;
    }
    Ok((x, residual_norms, iterates))
}
