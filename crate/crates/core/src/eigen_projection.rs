//! Projection of a covariance onto symmetric PSD matrices whose last
//! (largest) eigenvector is a prescribed `u` and whose top eigen-gap
//! `lambda_N - lambda_{N-1}` is at most `kappa`.
//!
//! Eigen-pairs are fixed greedily from the top: `lambda_N = u^T C u`, then each
//! following direction maximizes the Rayleigh quotient of the current residual
//! over unit vectors orthogonal to everything fixed so far. The second value is
//! lifted to at least `lambda_N - kappa`; later values are clamped to be
//! non-increasing.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral_core::{
    canonicalize_sign, dense_eigen, top_eigenpair, EigenPair, EigenSettings, SymMatrix, Vector,
};

/// Which direction solver [`project`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSolver {
    /// Exact for `n <= exact_threshold`, proximal gradient above.
    Auto,
    Exact,
    ProxGrad,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionConfig {
    /// Eigen-gap cap in covariance-eigenvalue units. `f64::INFINITY` disables
    /// the cap.
    pub kappa: f64,
    /// Orthogonality penalty weight.
    pub gamma: f64,
    pub pg_step: f64,
    pub pg_tol: f64,
    pub pg_max_iter: usize,
    /// Minimum retained eigenvalue, relative to `lambda_N`.
    pub eig_floor: f64,
    pub exact_threshold: usize,
    pub solver: DirectionSolver,
}

impl ProjectionConfig {
    pub fn new(kappa: f64) -> Self {
        let gamma = 1.0;
        ProjectionConfig {
            kappa,
            gamma,
            pg_step: 0.9 / (2.0 * gamma),
            pg_tol: 1e-12,
            pg_max_iter: 10_000,
            eig_floor: 1e-6,
            exact_threshold: 64,
            solver: DirectionSolver::Auto,
        }
    }

    /// Same config without a gap cap.
    pub fn uncapped() -> Self {
        Self::new(f64::INFINITY)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.pg_step = 0.9 / (2.0 * gamma);
        self
    }

    pub fn with_solver(mut self, solver: DirectionSolver) -> Self {
        self.solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::invalid(
                "kappa",
                format!("must be > 0, got {}", self.kappa),
            ));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(
                "gamma",
                format!("must be > 0, got {}", self.gamma),
            ));
        }
        if !(self.pg_step > 0.0 && self.pg_step <= 1.0 / (2.0 * self.gamma)) {
            return Err(Error::invalid(
                "pg_step",
                format!(
                    "must lie in (0, 1/(2 gamma)] = (0, {}]",
                    1.0 / (2.0 * self.gamma)
                ),
            ));
        }
        if !(self.pg_tol > 0.0) {
            return Err(Error::invalid("pg_tol", "must be positive"));
        }
        if !(self.eig_floor >= 0.0 && self.eig_floor.is_finite()) {
            return Err(Error::invalid("eig_floor", "must be finite and >= 0"));
        }
        Ok(())
    }

    fn use_exact(&self, n: usize) -> bool {
        match self.solver {
            DirectionSolver::Exact => true,
            DirectionSolver::ProxGrad => false,
            DirectionSolver::Auto => n <= self.exact_threshold,
        }
    }
}

/// Ordered eigen-pairs of a projected matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    /// `lambda_1 <= ... <= lambda_N`, after flooring.
    pub values: Vec<f64>,
    /// Column `k` pairs with `values[k]`; the last column is `u`.
    pub vectors: DMatrix<f64>,
    /// Uncapped Rayleigh quotient of each direction against its residual,
    /// aligned with `values` (the last entry is `lambda_N` itself).
    pub rayleigh: Vec<f64>,
    /// Absolute eigenvalue floor that was applied.
    pub floor: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.values[self.n() - 1]
    }

    /// `lambda_N - lambda_{N-1}`; zero for `n = 1`.
    pub fn gap(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            0.0
        } else {
            self.values[n - 1] - self.values[n - 2]
        }
    }

    /// The fixed directions in the order they were computed:
    /// `[u, v_{N-1}, ..., v_1]`.
    pub fn accumulated_basis(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, k| self.vectors[(i, n - 1 - k)])
    }

    pub fn vector(&self, k: usize) -> Vector {
        self.vectors.column(k).into_owned()
    }

    pub fn to_matrix(&self) -> Result<SymMatrix> {
        SymMatrix::from_spectrum(&self.values, &self.vectors)
    }
}

fn check_unit(u: &Vector, n: usize) -> Result<()> {
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    let norm = u.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(
            "u",
            format!("must have unit norm, got {norm}"),
        ));
    }
    Ok(())
}

/// `lambda_N = u^T C u` and the residual `C - lambda_N u u^T`.
pub fn last_eigenpair(cov: &SymMatrix, u: &Vector) -> Result<(f64, SymMatrix)> {
    check_unit(u, cov.n())?;
    let lambda = cov.quadratic_form(u);
    if !(lambda > 1e-14 * cov.frobenius_norm()) || lambda <= 0.0 {
        return Err(Error::DegenerateDirection { energy: lambda });
    }
    let residual = cov.add_scaled(&SymMatrix::rank_one(u, 1.0), -lambda)?;
    Ok((lambda, residual))
}

/// Orthonormal basis of the complement of `span(y)`, as columns.
pub fn orthogonal_complement(y: &[Vector], n: usize) -> DMatrix<f64> {
    let mut basis: Vec<Vector> = y.to_vec();
    let start = basis.len();
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = Vector::zeros(n);
        e[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&e);
                e.axpy(-c, b, 1.0);
            }
        }
        let norm = e.norm();
        if norm > 1e-8 {
            basis.push(e / norm);
        }
    }
    let cols = &basis[start..];
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Top eigen-pair of the residual restricted to the orthogonal complement of
/// `span(y)`, given an orthonormal basis `complement` of that complement.
///
/// Also returns the remaining complement (the other restricted eigenvectors),
/// which is the complement of `span(y, v)`.
fn exact_in_complement(
    residual: &SymMatrix,
    complement: &DMatrix<f64>,
) -> Result<(EigenPair, DMatrix<f64>)> {
    let k = complement.ncols();
    if k == 0 {
        return Err(Error::invalid(
            "y",
            "spans the whole space; no direction left",
        ));
    }
    let restricted =
        SymMatrix::symmetrize(complement.transpose() * residual.as_matrix() * complement)?;
    let eig = dense_eigen(&restricted);
    let mut v: Vector = complement * eig.vector(k - 1);
    v.normalize_mut();
    canonicalize_sign(&mut v);
    let rest = complement * eig.vectors.columns(0, k - 1);
    let value = residual.quadratic_form(&v);
    Ok((EigenPair { value, vector: v }, rest))
}

/// Maximizes `v^T R v` over unit `v` orthogonal to the columns of `y`, by
/// dense eigendecomposition of `R` restricted to the complement of `span(y)`.
///
/// An exhausted residual yields value 0 (up to rounding) with a complement
/// vector.
pub fn solve_direction_exact(residual: &SymMatrix, y: &[Vector]) -> Result<EigenPair> {
    let complement = orthogonal_complement(y, residual.n());
    Ok(exact_in_complement(residual, &complement)?.0)
}

/// Result of the raw proximal-gradient iteration, before re-orthogonalization.
#[derive(Clone, Debug)]
pub struct ProxGradIterate {
    pub vector: Vector,
    pub iterations: usize,
    pub objective: f64,
}

fn pg_objective(e: &Vector, y: &[Vector], gamma: f64, v: &Vector) -> f64 {
    -e.dot(v) + gamma * y.iter().map(|c| c.dot(v).powi(2)).sum::<f64>()
}

/// Proximal gradient on `-e^T v + gamma ||Y^T v||^2` over the unit ball,
/// starting from `e / ||e||^2`.
pub fn prox_grad_direction(
    e: &Vector,
    y: &[Vector],
    cfg: &ProjectionConfig,
) -> Result<ProxGradIterate> {
    cfg.validate()?;
    let norm_sq = e.norm_squared();
    if norm_sq == 0.0 {
        return Err(Error::invalid("e", "must be nonzero"));
    }
    let mut v = e / norm_sq;
    let mut last_step = f64::INFINITY;
    for it in 1..=cfg.pg_max_iter {
        let mut grad = -e.clone();
        for c in y {
            grad.axpy(2.0 * cfg.gamma * c.dot(&v), c, 1.0);
        }
        let mut next = &v - grad * cfg.pg_step;
        let norm = next.norm();
        if norm > 1.0 {
            next /= norm;
        }
        last_step = (&next - &v).norm();
        v = next;
        if last_step <= cfg.pg_tol {
            let objective = pg_objective(e, y, cfg.gamma, &v);
            return Ok(ProxGradIterate {
                vector: v,
                iterations: it,
                objective,
            });
        }
    }
    Err(Error::ProxGradNotConverged {
        iterations: cfg.pg_max_iter,
        last_step,
        objective: pg_objective(e, y, cfg.gamma, &v),
    })
}

/// Fast direction: rank-1 approximation of the residual by its top
/// eigenvector `e`, proximal gradient against the penalized orthogonality
/// objective, then an explicit Gram-Schmidt pass against `y`.
///
/// The returned value is the Rayleigh quotient `v^T R v`.
pub fn solve_direction_pg(
    residual: &SymMatrix,
    y: &[Vector],
    cfg: &ProjectionConfig,
) -> Result<EigenPair> {
    let n = residual.n();
    let settings = EigenSettings::default_for(n);
    let e = top_eigenpair(residual, settings.tol, settings.max_iter)?.vector;
    let raw = prox_grad_direction(&e, y, cfg)?;
    let mut v = raw.vector;
    for _ in 0..2 {
        for c in y {
            let proj = c.dot(&v);
            v.axpy(-proj, c, 1.0);
        }
    }
    let norm = v.norm();
    if norm > 1e-12 {
        v /= norm;
    } else {
        // e lies in span(y): fall back to the first complement direction
        let complement = orthogonal_complement(y, n);
        if complement.ncols() == 0 {
            return Err(Error::invalid(
                "y",
                "spans the whole space; no direction left",
            ));
        }
        v = complement.column(0).into_owned();
    }
    canonicalize_sign(&mut v);
    let value = residual.quadratic_form(&v);
    Ok(EigenPair { value, vector: v })
}

/// Eigenvalue assigned to a freshly computed direction.
///
/// For the direction right below `u`: `min(prev, max(prev - kappa, rayleigh))`.
/// Afterwards: `min(prev, rayleigh)`.
pub fn cap_eigenvalue(prev: f64, rayleigh: f64, kappa: f64, is_second_from_top: bool) -> f64 {
    if is_second_from_top {
        prev.min((prev - kappa).max(rayleigh))
    } else {
        prev.min(rayleigh)
    }
}

/// Projects `cov` onto matrices with last eigenvector `u` and top eigen-gap at
/// most `cfg.kappa`. Returns the projected matrix and its decomposition.
pub fn project(
    cov: &SymMatrix,
    u: &Vector,
    cfg: &ProjectionConfig,
) -> Result<(SymMatrix, SpectralDecomposition)> {
    cfg.validate()?;
    let n = cov.n();
    let (lambda_n, mut residual) = last_eigenpair(cov, u)?;
    let exact = cfg.use_exact(n);

    // computed top-down: index 0 is (lambda_N, u)
    let mut values = vec![lambda_n];
    let mut rayleigh = vec![lambda_n];
    let mut fixed: Vec<Vector> = vec![u.clone()];
    let mut complement = if exact {
        orthogonal_complement(&fixed, n)
    } else {
        DMatrix::zeros(0, 0)
    };

    for k in 1..n {
        let pair = if exact {
            let (pair, rest) = exact_in_complement(&residual, &complement)?;
            complement = rest;
            pair
        } else {
            solve_direction_pg(&residual, &fixed, cfg)?
        };
        let prev = values[k - 1];
        let lambda = cap_eigenvalue(prev, pair.value, cfg.kappa, k == 1);
        residual = residual.add_scaled(&SymMatrix::rank_one(&pair.vector, 1.0), -lambda)?;
        values.push(lambda);
        rayleigh.push(pair.value);
        fixed.push(pair.vector);
    }

    let floor = cfg.eig_floor * lambda_n;
    values.reverse();
    rayleigh.reverse();
    fixed.reverse();
    for v in &mut values {
        *v = v.max(floor);
    }
    let vectors = DMatrix::from_fn(n, n, |i, k| fixed[k][i]);
    let decomp = SpectralDecomposition {
        values,
        vectors,
        rayleigh,
        floor,
    };
    let c = decomp.to_matrix()?;
    Ok((c, decomp))
}
