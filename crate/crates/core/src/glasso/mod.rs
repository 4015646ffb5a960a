//! Graphical lasso with a spectral constraint on the covariance iterate.
//!
//! The dual `min -log det C  s.t. |C - C_bar|_inf <= rho` is solved by
//! row/column block coordinate descent; after every full sweep the iterate is
//! projected with [`crate::eigen_projection::project`]. The Laplacian
//! `L = C^-1` is formed once, at the end.

mod file;

use nalgebra::DMatrix;

use crate::eigen_projection::{project, ProjectionConfig, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::spectral_core::{SymMatrix, Vector};

pub use file::LaplacianFile;

#[derive(Clone, Debug, PartialEq)]
pub struct GlassoConfig {
    pub rho: f64,
    pub max_sweeps: usize,
    /// Relative Frobenius change between projected iterates that stops the
    /// alternation.
    pub outer_tol: f64,
    /// Coordinate-descent tolerance for the column subproblem, relative to the
    /// largest diagonal entry of the covariance.
    pub inner_tol: f64,
    pub inner_max_cycles: usize,
}

impl Default for GlassoConfig {
    fn default() -> Self {
        GlassoConfig {
            rho: 1e-4,
            max_sweeps: 50,
            outer_tol: 1e-6,
            inner_tol: 1e-10,
            inner_max_cycles: 1000,
        }
    }
}

impl GlassoConfig {
    pub fn with_rho(rho: f64) -> Self {
        GlassoConfig {
            rho,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid(
                "rho",
                format!("must be finite and >= 0, got {}", self.rho),
            ));
        }
        if self.max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps", "must be at least 1"));
        }
        if !(self.outer_tol > 0.0) {
            return Err(Error::invalid("outer_tol", "must be positive"));
        }
        if !(self.inner_tol > 0.0) || self.inner_max_cycles == 0 {
            return Err(Error::invalid(
                "inner_tol",
                "inner solver settings must be positive",
            ));
        }
        Ok(())
    }
}

/// Dual iterate. The slack `U = C - C_bar` is implicit.
#[derive(Clone, Debug)]
pub struct GlassoState {
    pub c: SymMatrix,
    pub cov: SymMatrix,
    pub sweep_count: usize,
    /// `-log det C` at the end of each sweep, before projection.
    pub objective_trace: Vec<f64>,
    inner_tol: f64,
    inner_max_cycles: usize,
}

impl GlassoState {
    pub fn objective(&self) -> Result<f64> {
        neg_log_det(&self.c)
    }

    /// `max_ij |C_ij - C_bar_ij|`
    pub fn box_violation(&self) -> f64 {
        self.c.max_abs_diff(&self.cov)
    }

    fn set_inner(&mut self, cfg: &GlassoConfig) {
        self.inner_tol = cfg.inner_tol;
        self.inner_max_cycles = cfg.inner_max_cycles;
    }
}

fn neg_log_det(c: &SymMatrix) -> Result<f64> {
    c.log_det_pd()
        .map(|v| -v)
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: "dual iterate lost positive definiteness".into(),
        })
}

/// `C = C_bar + rho I`.
pub fn init_dual(cov: &SymMatrix, rho: f64) -> Result<GlassoState> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid(
            "rho",
            format!("must be finite and >= 0, got {rho}"),
        ));
    }
    let c = cov.add_scaled(&SymMatrix::identity(cov.n()), rho)?;
    if c.log_det_pd().is_none() {
        return Err(Error::NotPositiveDefinite {
            context: format!("C_bar + {rho} I is not positive definite"),
        });
    }
    let defaults = GlassoConfig::default();
    Ok(GlassoState {
        c,
        cov: cov.clone(),
        sweep_count: 0,
        objective_trace: Vec::new(),
        inner_tol: defaults.inner_tol,
        inner_max_cycles: defaults.inner_max_cycles,
    })
}

/// Minimizes `y^T Q y` over the box `[lo, hi]` by cyclic coordinate descent,
/// starting from `y`.
fn box_quadratic_cd(
    q: &DMatrix<f64>,
    lo: &[f64],
    hi: &[f64],
    y: &mut [f64],
    tol: f64,
    max_cycles: usize,
) -> std::result::Result<usize, f64> {
    let m = y.len();
    let mut last_change = f64::INFINITY;
    for cycle in 1..=max_cycles {
        last_change = 0.0;
        for k in 0..m {
            let mut g = 0.0;
            for (l, yl) in y.iter().enumerate() {
                if l != k {
                    g += q[(k, l)] * yl;
                }
            }
            let next = (-g / q[(k, k)]).clamp(lo[k], hi[k]);
            last_change = f64::max(last_change, (next - y[k]).abs());
            y[k] = next;
        }
        if last_change <= tol {
            return Ok(cycle);
        }
    }
    Err(last_change)
}

/// Replaces row/column `j` of `C` by the maximizer of `log det C` with the
/// diagonal pinned to `C_bar_jj + rho` and the off-diagonal entries kept in
/// the box `|C_ij - C_bar_ij| <= rho`.
///
/// With the rest of `C` fixed, `log det C = log det C_11 + log(c_jj - y^T C_11^-1 y)`,
/// so the update is a box-constrained minimization of `y^T C_11^-1 y`.
pub fn bcd_column_update(mut state: GlassoState, j: usize, rho: f64) -> Result<GlassoState> {
    update_column(&mut state, j, rho)?;
    Ok(state)
}

fn update_column(state: &mut GlassoState, j: usize, rho: f64) -> Result<()> {
    let n = state.c.n();
    if j >= n {
        return Err(Error::invalid(
            "j",
            format!("column {j} out of range for n = {n}"),
        ));
    }
    let diag = state.cov[(j, j)] + rho;
    let mut c = state.c.as_matrix().clone();
    if n == 1 {
        c[(0, 0)] = diag;
        state.c = SymMatrix::new(c)?;
        return Ok(());
    }
    let idx: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    let w11 = DMatrix::from_fn(n - 1, n - 1, |a, b| c[(idx[a], idx[b])]);
    let q = w11
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: format!("block without column {j} is not positive definite"),
        })?
        .inverse();
    let s: Vec<f64> = idx.iter().map(|&i| state.cov[(i, j)]).collect();
    let lo: Vec<f64> = s.iter().map(|v| v - rho).collect();
    let hi: Vec<f64> = s.iter().map(|v| v + rho).collect();
    let mut y: Vec<f64> = idx
        .iter()
        .enumerate()
        .map(|(a, &i)| c[(i, j)].clamp(lo[a], hi[a]))
        .collect();
    let scale = (0..n)
        .map(|i| state.cov[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    box_quadratic_cd(
        &q,
        &lo,
        &hi,
        &mut y,
        state.inner_tol * scale,
        state.inner_max_cycles,
    )
    .map_err(|last_change| Error::SubproblemNotConverged {
        column: j,
        cycles: state.inner_max_cycles,
        last_change,
    })?;
    let yv = Vector::from_column_slice(&y);
    let schur = diag - yv.dot(&(&q * &yv));
    if !(schur > 0.0) {
        return Err(Error::NotPositiveDefinite {
            context: format!("column {j} update leaves Schur complement {schur:e}"),
        });
    }
    for (a, &i) in idx.iter().enumerate() {
        c[(i, j)] = y[a];
        c[(j, i)] = y[a];
    }
    c[(j, j)] = diag;
    state.c = SymMatrix::new(c)?;
    Ok(())
}

/// Diagnostics of one full BCD sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// `-log det C` after restoring feasibility, then after each
    /// column update.
    pub objectives: Vec<f64>,
    /// `max_ij |C_ij - C_bar_ij|` at the end of the sweep.
    pub box_violation: f64,
}

impl SweepReport {
    /// Largest increase between consecutive objective values.
    pub fn max_increase(&self) -> f64 {
        self.objectives
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

/// Moves `C` back into the dual feasible set: off-diagonal entries clipped to
/// `C_bar_ij +- rho`, diagonal pinned to `C_bar_jj + rho`. If that loses
/// positive definiteness, backtracks toward the feasible point `C_bar + rho I`.
fn restore_feasible(state: &mut GlassoState, rho: f64) -> Result<()> {
    let n = state.c.n();
    let cov = state.cov.as_matrix();
    let clipped = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            cov[(i, i)] + rho
        } else {
            state.c[(i, j)].clamp(cov[(i, j)] - rho, cov[(i, j)] + rho)
        }
    });
    let anchor = cov + DMatrix::identity(n, n) * rho;
    let mut t = 1.0;
    for _ in 0..60 {
        let candidate = SymMatrix::symmetrize(&anchor + (&clipped - &anchor) * t)?;
        if candidate.log_det_pd().is_some() {
            state.c = candidate;
            return Ok(());
        }
        t *= 0.5;
    }
    state.c = SymMatrix::symmetrize(anchor)?;
    Ok(())
}

/// One pass over all columns. The iterate is first moved back into the box
/// (a projection may have left it), after which every column update is a
/// descent step.
pub fn bcd_sweep(state: &mut GlassoState, rho: f64) -> Result<SweepReport> {
    let n = state.c.n();
    restore_feasible(state, rho)?;
    let mut objectives = vec![state.objective()?];
    for j in 0..n {
        update_column(state, j, rho)?;
        objectives.push(state.objective()?);
    }
    state.sweep_count += 1;
    state
        .objective_trace
        .push(*objectives.last().expect("nonempty"));
    Ok(SweepReport {
        objectives,
        box_violation: state.box_violation(),
    })
}

/// Output of [`glasso_learn`].
#[derive(Clone, Debug)]
pub struct GlassoOutput {
    pub laplacian: SymMatrix,
    /// Final projected covariance, `laplacian^-1`.
    pub covariance: SymMatrix,
    pub decomp: SpectralDecomposition,
    /// `-log det C` after each sweep, before projection.
    pub trace: Vec<f64>,
    pub sweeps: Vec<SweepReport>,
    pub converged: bool,
    /// Set when the alternation stopped early on a numerical failure; the
    /// last projected iterate is returned.
    pub failure: Option<String>,
}

impl GlassoOutput {
    pub fn sweep_count(&self) -> usize {
        self.sweeps.len()
    }
}

/// Alternates a BCD sweep with the eigen-projection until the projected
/// iterate stops moving, then inverts it.
pub fn glasso_learn(
    cov: &SymMatrix,
    u: &Vector,
    proj_cfg: &ProjectionConfig,
    glasso_cfg: &GlassoConfig,
) -> Result<GlassoOutput> {
    glasso_cfg.validate()?;
    proj_cfg.validate()?;
    let rho = glasso_cfg.rho;
    let mut state = init_dual(cov, rho)?;
    state.set_inner(glasso_cfg);

    let mut projected: Option<(SymMatrix, SpectralDecomposition)> = None;
    let mut sweeps = Vec::new();
    let mut converged = false;
    let mut failure = None;
    for _ in 0..glasso_cfg.max_sweeps {
        let previous = state.c.clone();
        match bcd_sweep(&mut state, rho) {
            Ok(report) => sweeps.push(report),
            Err(e) if e.is_numerical() && projected.is_some() => {
                failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        let (c, decomp) = project(&state.c, u, proj_cfg)?;
        let change = c.add_scaled(&previous, -1.0)?.frobenius_norm() / previous.frobenius_norm();
        state.c = c.clone();
        projected = Some((c, decomp));
        if change <= glasso_cfg.outer_tol {
            converged = true;
            break;
        }
    }
    let (covariance, decomp) = projected.expect("at least one sweep ran");
    let laplacian = covariance.inverse_pd()?;
    Ok(GlassoOutput {
        laplacian,
        covariance,
        decomp,
        trace: state.objective_trace,
        sweeps,
        converged,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n + 4, n, |_, _| rng.random::<f64>() - 0.5);
        SymMatrix::symmetrize(x.transpose() * x / (n + 4) as f64).unwrap()
    }

    #[test]
    fn init_dual_examples() {
        let s = init_dual(&SymMatrix::identity(3), 0.1).unwrap();
        assert!(s.c.max_abs_diff(&SymMatrix::from_diagonal(&[1.1; 3])) < 1e-15);
        let cov = random_psd(4, 1);
        assert_eq!(init_dual(&cov, 0.0).unwrap().c, cov);
        let singular = SymMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            init_dual(&singular, 0.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(init_dual(&cov, -1.0).is_err());
    }

    #[test]
    fn init_dual_shifts_spectrum_by_rho() {
        let cov = random_psd(6, 2);
        let s = init_dual(&cov, 1e-4).unwrap();
        let oracle = s.c.as_matrix().clone().symmetric_eigen().eigenvalues.min();
        assert!(oracle >= 1e-4 - 1e-12);
    }

    #[test]
    fn rho_zero_resets_column_to_covariance() {
        let cov = random_psd(4, 3);
        let mut s = init_dual(&cov, 0.0).unwrap();
        s.c = cov.add_scaled(&SymMatrix::identity(4), 0.5).unwrap();
        let s = bcd_column_update(s, 2, 0.0).unwrap();
        for i in 0..4 {
            assert_eq!(s.c[(i, 2)], cov[(i, 2)]);
        }
    }

    #[test]
    fn diagonal_covariance_keeps_zero_off_diagonal() {
        let cov = SymMatrix::new(dmatrix![1.0, 0.0; 0.0, 2.0]).unwrap();
        // brute force over the 1-D box: det = 1.1 * 2.1 - x^2 peaks at x = 0
        let best = (-100..=100)
            .map(|k| k as f64 * 0.001)
            .max_by(|a, b| (1.1 * 2.1 - a * a).total_cmp(&(1.1 * 2.1 - b * b)))
            .unwrap();
        assert_eq!(best, 0.0);
        for j in 0..2 {
            let s = bcd_column_update(init_dual(&cov, 0.1).unwrap(), j, 0.1).unwrap();
            assert!(s.c.max_abs_diff(&SymMatrix::from_diagonal(&[1.1, 2.1])) < 1e-15);
        }
    }

    #[test]
    fn column_update_rejects_bad_index() {
        let s = init_dual(&SymMatrix::identity(2), 0.1).unwrap();
        assert!(bcd_column_update(s, 5, 0.1).is_err());
    }

    #[test]
    fn sweep_is_monotone_and_feasible() {
        let cov = random_psd(6, 4);
        let mut s = init_dual(&cov, 0.05).unwrap();
        for _ in 0..3 {
            let r = bcd_sweep(&mut s, 0.05).unwrap();
            assert!(r.max_increase() <= 1e-10, "{:?}", r.objectives);
            assert!(r.box_violation <= 0.05 + 1e-8);
        }
        assert_eq!(s.sweep_count, 3);
        assert_eq!(s.objective_trace.len(), 3);
    }

    #[test]
    fn sweep_after_projection_restores_box_and_descends() {
        let cov = random_psd(6, 7);
        let u = Vector::from_element(6, 1.0 / 6f64.sqrt());
        let mut s = init_dual(&cov, 1e-3).unwrap();
        for _ in 0..4 {
            let r = bcd_sweep(&mut s, 1e-3).unwrap();
            assert!(r.max_increase() <= 1e-10, "{:?}", r.objectives);
            assert!(r.box_violation <= 1e-3 + 1e-8);
            s.c = project(&s.c, &u, &ProjectionConfig::new(0.01)).unwrap().0;
        }
    }

    #[test]
    fn identity_covariance_learns_identity() {
        let n = 4;
        let u = Vector::from_element(n, 0.5);
        let out = glasso_learn(
            &SymMatrix::identity(n),
            &u,
            &ProjectionConfig::new(1.0),
            &GlassoConfig::with_rho(0.0),
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.laplacian.max_abs_diff(&SymMatrix::identity(n)) < 1e-10);
    }

    #[test]
    fn config_validation() {
        assert!(GlassoConfig::with_rho(-1.0).validate().is_err());
        let cfg = GlassoConfig {
            max_sweeps: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
