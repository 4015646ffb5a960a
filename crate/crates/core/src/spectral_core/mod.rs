//! Dense symmetric-matrix primitives shared by every other module.

mod io;
mod jacobi;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use io::{
    format_f64, parse_vector, read_matrix_csv, read_vector_file, write_matrix_csv,
    write_vector_file,
};
pub use jacobi::{dense_eigen, DenseEigen};

pub type Vector = DVector<f64>;

/// Default residual tolerance for [`top_eigenpair`].
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Floor on the power-iteration budget; see [`EigenSettings::default_for`].
const MIN_POWER_ITERS: usize = 10_000;

const SYMMETRY_TOL: f64 = 1e-12;

/// Dense real symmetric `n x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Validates squareness, finiteness and symmetry
    /// (`|a_ij - a_ji| <= 1e-12 * max(1, |a_ij|)`).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty("matrix"));
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                let a = m[(i, j)];
                if !a.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                let b = m[(j, i)];
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper: a,
                        lower: b,
                    });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// Builds `(m + m^T) / 2`. Used for products that are symmetric in exact
    /// arithmetic but not bitwise.
    pub fn symmetrize(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let sym = (&m + m.transpose()) * 0.5;
        SymMatrix::new(sym)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `scale * v v^T`
    pub fn rank_one(v: &Vector, scale: f64) -> Self {
        SymMatrix(v * v.transpose() * scale)
    }

    /// `sum_k values[k] * v_k v_k^T`, with `vectors` holding the `v_k` as columns.
    pub fn from_spectrum(values: &[f64], vectors: &DMatrix<f64>) -> Result<Self> {
        if values.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: vectors.ncols(),
                found: values.len(),
            });
        }
        let n = vectors.nrows();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in values.iter().enumerate() {
            let v = vectors.column(k);
            for j in 0..n {
                let vj = lambda * v[j];
                for i in 0..n {
                    out[(i, j)] += v[i] * vj;
                }
            }
        }
        SymMatrix::symmetrize(out)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, other: &SymMatrix, alpha: f64) -> Result<SymMatrix> {
        check_same_dim(self, other)?;
        Ok(SymMatrix(&self.0 + &other.0 * alpha))
    }

    pub fn quadratic_form(&self, v: &Vector) -> f64 {
        v.dot(&(&self.0 * v))
    }

    /// Inverse through a Cholesky factorization; fails unless positive definite.
    pub fn inverse_pd(&self) -> Result<SymMatrix> {
        let chol = self
            .0
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite {
                context: "Cholesky factorization failed during inversion".into(),
            })?;
        SymMatrix::symmetrize(chol.inverse())
    }

    /// `log det` through a Cholesky factorization; `None` unless positive definite.
    pub fn log_det_pd(&self) -> Option<f64> {
        let chol = self.0.clone().cholesky()?;
        let l = chol.l_dirty();
        Some(2.0 * (0..self.n()).map(|i| l[(i, i)].ln()).sum::<f64>())
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenvalue with a unit-norm eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vector,
}

/// Tolerance and iteration budget for [`top_eigenpair`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl EigenSettings {
    /// `tol = 1e-10`, `max_iter = max(100 n, 10_000)`.
    pub fn default_for(n: usize) -> Self {
        EigenSettings {
            tol: DEFAULT_EIG_TOL,
            max_iter: (100 * n).max(MIN_POWER_ITERS),
        }
    }
}

fn check_same_dim(a: &SymMatrix, b: &SymMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

/// Trace inner product `tr(B^T A) = sum_ij A_ij B_ij`.
pub fn inner_product(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    Ok(a.0.dot(&b.0))
}

/// Flips `v` so its first nonzero component is positive.
pub fn canonicalize_sign(v: &mut Vector) {
    if let Some(first) = v.iter().copied().find(|x| *x != 0.0) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

fn start_vector(n: usize) -> Vector {
    // all-ones plus a fixed pseudo-random perturbation, so the start is never
    // exactly orthogonal to a structured dominant eigenvector
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e16e);
    let mut v = Vector::from_fn(n, |_, _| 1.0 + 0.05 * (rng.random::<f64>() - 0.5));
    v.normalize_mut();
    v
}

/// Eigen-pair of the algebraically largest eigenvalue by shifted power
/// iteration.
///
/// The shift is the negated Gershgorin lower bound (when negative), which makes
/// the shifted matrix positive semi-definite, so its dominant eigenvalue is the
/// largest eigenvalue of `a`. Convergence is declared when
/// `||A v - (v^T A v) v|| <= tol * max(1, |lambda|)`.
pub fn top_eigenpair(a: &SymMatrix, tol: f64, max_iter: usize) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let n = a.n();
    let m = &a.0;
    let lower = (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            m[(i, i)] - off
        })
        .fold(f64::INFINITY, f64::min);
    let shift = (-lower).max(0.0);

    let mut v = start_vector(n);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter.max(1) {
        let av = m * &v;
        let lambda = v.dot(&av);
        residual = (&av - &v * lambda).norm();
        if residual <= tol * lambda.abs().max(1.0) {
            canonicalize_sign(&mut v);
            return Ok(EigenPair {
                value: lambda,
                vector: v,
            });
        }
        let w = av + &v * shift;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        v = w / norm;
    }
    Err(Error::EigenNotConverged {
        iterations: max_iter,
        residual,
    })
}

/// Largest `|v_i^T v_j - delta_ij|` over the given vectors.
pub fn orthonormality_defect<'a>(vectors: impl IntoIterator<Item = &'a Vector> + Clone) -> f64 {
    let vs: Vec<&Vector> = vectors.into_iter().collect();
    let mut worst: f64 = 0.0;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.dot(b) - target).abs());
        }
    }
    worst
}

/// `A - sum_k lambda_k v_k v_k^T`. The vectors must be orthonormal within 1e-8.
pub fn deflate(a: &SymMatrix, pairs: &[EigenPair]) -> Result<SymMatrix> {
    for p in pairs {
        if p.vector.len() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                found: p.vector.len(),
            });
        }
    }
    let defect = orthonormality_defect(pairs.iter().map(|p| &p.vector));
    if defect > 1e-8 {
        return Err(Error::NotOrthonormal { deviation: defect });
    }
    let mut out = a.0.clone();
    for p in pairs {
        out -= &p.vector * p.vector.transpose() * p.value;
    }
    SymMatrix::symmetrize(out)
}

/// True iff the smallest eigenvalue is `>= -tol`.
pub fn is_psd(a: &SymMatrix, tol: f64) -> bool {
    dense_eigen(a).values[0] >= -tol
}
