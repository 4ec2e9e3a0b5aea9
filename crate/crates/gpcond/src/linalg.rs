//! Dense symmetric linear algebra: a cyclic Jacobi eigensolver, the spectral
//! Moore–Penrose pseudoinverse of positive semi-definite matrices, Cholesky
//! solves for the noisy observation model, trace (nuclear) and operator
//! norms, and projection onto the PSD cone.
//!
//! Everything here is self-contained and deterministic. The Jacobi method is
//! chosen deliberately: beyond being simple, it computes small eigenvalues of
//! (near-)PSD matrices with high relative accuracy, which keeps the
//! truncated pseudoinverse stable on the severely ill-conditioned Gram
//! matrices that dense observation sets produce. Matrix sizes here are desk
//! scale (a few hundred at most), where Jacobi is entirely adequate.

use crate::error::{GpError, Result};

/// Symmetric matrix with full row-major storage.
///
/// Symmetry is maintained structurally: constructors evaluate one triangle
/// and mirror it, so `get(i, j)` and `get(j, i)` are equal bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Build from an entry function; `f` is called for `i <= j` only and the
    /// value is mirrored into the lower triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    /// Build from row-major data, which must already be exactly symmetric.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(GpError::InvalidArgument(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j].to_bits() != data[j * n + i].to_bits() {
                    return Err(GpError::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = SymMatrix::zeros(n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix::diagonal(&vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Set entry `(i, j)` and its mirror.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise difference `self − other`.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(GpError::InvalidArgument(format!(
                "size mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SymMatrix { n: self.n, data })
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `A · x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Orthonormal eigenvector columns paired with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column `j` (stored row-major, `n × n`) is the eigenvector of
    /// `eigenvalues[j]`.
    vectors: Vec<f64>,
    n: usize,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector_entry(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.n + col]
    }

    /// `vⱼ · x` for eigenvector column `j`.
    pub fn col_dot(&self, j: usize, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        x.iter()
            .enumerate()
            .map(|(i, xi)| self.vectors[i * self.n + j] * xi)
            .sum()
    }

    /// `out += scale · vⱼ`.
    pub fn col_axpy(&self, j: usize, scale: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o += scale * self.vectors[i * self.n + j];
        }
    }

    /// Reassemble `V Λ̃ Vᵀ` for modified eigenvalues `Λ̃`.
    fn reassemble(&self, eigenvalues: &[f64]) -> SymMatrix {
        let n = self.n;
        SymMatrix::from_fn(n, |i, j| {
            eigenvalues
                .iter()
                .enumerate()
                .map(|(l, lambda)| lambda * self.vectors[i * n + l] * self.vectors[j * n + l])
                .sum()
        })
    }
}

/// Spectral decomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Sweeps of plane rotations annihilate off-diagonal entries until the
/// off-diagonal Frobenius norm falls below `1e-12 · ‖A‖_F` (at most 30
/// sweeps). Eigenvalues are returned ascending with matching eigenvector
/// columns.
pub fn eigh_sym(a: &SymMatrix) -> Result<SpectralDecomposition> {
    if !a.is_finite() {
        return Err(GpError::InvalidArgument(
            "eigendecomposition requires finite entries".into(),
        ));
    }
    let n = a.n();
    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro = a.frobenius();
    let tol = 1e-12 * fro;
    if n > 1 && fro > 0.0 {
        let mut converged = false;
        for _sweep in 0..30 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * m[p * n + q] * m[p * n + q];
                }
            }
            if off.sqrt() <= tol {
                converged = true;
                break;
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = m[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                    // tan of the rotation angle; the small root keeps the
                    // rotation angle below pi/4 which is what gives Jacobi
                    // its accuracy. Guard against theta^2 overflow.
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else if theta == 0.0 {
                        1.0
                    } else {
                        theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // A <- G^T A G with G the rotation in the (p, q) plane.
                    for j in 0..n {
                        let mpj = m[p * n + j];
                        let mqj = m[q * n + j];
                        m[p * n + j] = c * mpj - s * mqj;
                        m[q * n + j] = s * mpj + c * mqj;
                    }
                    for i in 0..n {
                        let mip = m[i * n + p];
                        let miq = m[i * n + q];
                        m[i * n + p] = c * mip - s * miq;
                        m[i * n + q] = s * mip + c * miq;
                    }
                    for i in 0..n {
                        let vip = v[i * n + p];
                        let viq = v[i * n + q];
                        v[i * n + p] = c * vip - s * viq;
                        v[i * n + q] = s * vip + c * viq;
                    }
                }
            }
        }
        if !converged {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += 2.0 * m[p * n + q] * m[p * n + q];
                }
            }
            if off.sqrt() > tol {
                return Err(GpError::NumericalFailure(format!(
                    "Jacobi eigensolver did not converge in 30 sweeps (n = {n})"
                )));
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        n,
    })
}

/// Factorized positive semi-definite operator: either a truncated spectral
/// pseudoinverse or a Cholesky factor of a positive definite matrix.
#[derive(Debug, Clone)]
pub enum PsdFactor {
    Pinv {
        decomposition: SpectralDecomposition,
        /// Number of eigenvalues above the cutoff.
        rank: usize,
        /// Absolute eigenvalue cutoff actually used.
        cutoff: f64,
    },
    Cholesky {
        /// Lower-triangular factor, row-major `n × n`.
        lower: Vec<f64>,
        n: usize,
    },
}

impl PsdFactor {
    pub fn n(&self) -> usize {
        match self {
            PsdFactor::Pinv { decomposition, .. } => decomposition.n(),
            PsdFactor::Cholesky { n, .. } => *n,
        }
    }

    /// Apply the (pseudo)inverse to a vector.
    pub fn apply(&self, b: &[f64]) -> Vec<f64> {
        match self {
            PsdFactor::Pinv {
                decomposition,
                cutoff,
                ..
            } => {
                let n = decomposition.n();
                let mut out = vec![0.0; n];
                for j in 0..n {
                    let lambda = decomposition.eigenvalues()[j];
                    if lambda > *cutoff {
                        let c = decomposition.col_dot(j, b) / lambda;
                        decomposition.col_axpy(j, c, &mut out);
                    }
                }
                out
            }
            PsdFactor::Cholesky { lower, n } => cholesky_solve(lower, *n, b),
        }
    }

    /// Quadratic form `xᵀ A⁻ y` evaluated through the factorization.
    ///
    /// For the spectral pseudoinverse this is the sum of
    /// `(vⱼ·x)(vⱼ·y)/λⱼ` over the retained eigenpairs, which for `x = y` is a
    /// sum of non-negative terms; the posterior-variance path goes through
    /// here.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            PsdFactor::Pinv {
                decomposition,
                cutoff,
                ..
            } => {
                let mut acc = 0.0;
                for j in 0..decomposition.n() {
                    let lambda = decomposition.eigenvalues()[j];
                    if lambda > *cutoff {
                        acc += decomposition.col_dot(j, x) * decomposition.col_dot(j, y) / lambda;
                    }
                }
                acc
            }
            PsdFactor::Cholesky { lower, n } => {
                let z = cholesky_solve(lower, *n, y);
                x.iter().zip(&z).map(|(a, b)| a * b).sum()
            }
        }
    }

    /// Rows of `W` with `A⁻ = Wᵀ W`: for the pseudoinverse the retained
    /// `λⱼ^{-1/2} vⱼᵀ`, for Cholesky the rows of `L⁻¹`. Applying a
    /// cross-covariance block to `Wᵀ` turns posterior Gram assembly into a
    /// sum of squares.
    pub fn half_rows(&self) -> Vec<Vec<f64>> {
        match self {
            PsdFactor::Pinv {
                decomposition,
                cutoff,
                ..
            } => {
                let n = decomposition.n();
                let mut rows = Vec::new();
                for j in 0..n {
                    let lambda = decomposition.eigenvalues()[j];
                    if lambda > *cutoff {
                        let inv_sqrt = 1.0 / lambda.sqrt();
                        rows.push(
                            (0..n)
                                .map(|i| decomposition.vector_entry(i, j) * inv_sqrt)
                                .collect(),
                        );
                    }
                }
                rows
            }
            PsdFactor::Cholesky { lower, n } => {
                // Row i of L^{-1} is the solution of L^T x = e_i, so that
                // W^T W = L^{-T} L^{-1} = (L L^T)^{-1}.
                let n = *n;
                let mut rows = Vec::with_capacity(n);
                for i in 0..n {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    rows.push(back_substitute(lower, n, &e));
                }
                rows
            }
        }
    }
}

/// Truncated spectral Moore–Penrose pseudoinverse of a PSD matrix.
///
/// With `A = V Λ Vᵀ`, the pseudoinverse is `V Λ† Vᵀ` where `Λ†` inverts the
/// eigenvalues above `cutoff = tau · max(λ_max, 0)` and zeroes the rest (the
/// `0⁻¹ := 0` convention). Eigenvalues below `−cutoff` mean the input was not
/// PSD and yield an error.
pub fn pinv_psd(a: &SymMatrix, tau: f64) -> Result<PsdFactor> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(GpError::InvalidArgument(format!(
            "pseudoinverse cutoff must be non-negative, got {tau}"
        )));
    }
    let decomposition = eigh_sym(a)?;
    let lmax = decomposition.max_eigenvalue().max(0.0);
    let cutoff = tau * lmax;
    if let Some(&lmin) = decomposition.eigenvalues().first() {
        if lmin < -cutoff && lmin < 0.0 {
            return Err(GpError::NotPsd {
                min_eigenvalue: lmin,
                tolerance: cutoff,
            });
        }
    }
    let rank = decomposition
        .eigenvalues()
        .iter()
        .filter(|&&l| l > cutoff)
        .count();
    Ok(PsdFactor::Pinv {
        decomposition,
        rank,
        cutoff,
    })
}

/// Default relative cutoff for [`pinv_psd`].
pub const DEFAULT_PINV_TOL: f64 = 1e-10;

fn forward_substitute(lower: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= lower[i * n + j] * y[j];
        }
        y[i] = acc / lower[i * n + i];
    }
    y
}

fn back_substitute(lower: &[f64], n: usize, y: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= lower[j * n + i] * x[j];
        }
        x[i] = acc / lower[i * n + i];
    }
    x
}

fn cholesky_solve(lower: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    back_substitute(lower, n, &forward_substitute(lower, n, b))
}

/// Cholesky factorization of `A + σ²I` for PSD `A` and `σ² > 0`.
pub fn cholesky_shifted(a: &SymMatrix, sigma2: f64) -> Result<PsdFactor> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(GpError::InvalidArgument(format!(
            "noise variance must be positive for the Cholesky path, got {sigma2}"
        )));
    }
    if !a.is_finite() {
        return Err(GpError::InvalidArgument(
            "Cholesky requires finite entries".into(),
        ));
    }
    let n = a.n();
    let mut lower = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc = a.get(i, j) + if i == j { sigma2 } else { 0.0 };
            for l in 0..j {
                acc -= lower[i * n + l] * lower[j * n + l];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(GpError::NotSpd(format!(
                        "non-positive pivot {acc:e} at index {i}"
                    )));
                }
                lower[i * n + i] = acc.sqrt();
            } else {
                lower[i * n + j] = acc / lower[j * n + j];
            }
        }
    }
    Ok(PsdFactor::Cholesky { lower, n })
}

/// Solve `(A + σ²I) x = b` by Cholesky factorization.
pub fn solve_spd(a: &SymMatrix, sigma2: f64, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n() {
        return Err(GpError::InvalidArgument(format!(
            "right-hand side length {} does not match matrix size {}",
            b.len(),
            a.n()
        )));
    }
    let factor = cholesky_shifted(a, sigma2)?;
    Ok(factor.apply(b))
}

/// Nuclear norm `Σ|λᵢ|` of a symmetric matrix.
pub fn trace_norm(a: &SymMatrix) -> Result<f64> {
    Ok(eigh_sym(a)?.eigenvalues().iter().map(|l| l.abs()).sum())
}

/// Operator norm `max|λᵢ|` of a symmetric matrix.
pub fn operator_norm(a: &SymMatrix) -> Result<f64> {
    Ok(eigh_sym(a)?
        .eigenvalues()
        .iter()
        .fold(0.0f64, |m, l| m.max(l.abs())))
}

/// Nearest PSD matrix in the spectral sense: clamp negative eigenvalues to
/// zero and reassemble.
pub fn psd_project(a: &SymMatrix) -> Result<SymMatrix> {
    let dec = eigh_sym(a)?;
    let clamped: Vec<f64> = dec.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    Ok(dec.reassemble(&clamped))
}
