//! Projects one covariance at several eigen-gap caps and prints the
//! resulting spectra.
//!
//! cargo run --example capped_projection

use eigengap::eigen_projection::{project, DirectionSolver, ProjectionConfig};
use eigengap::{SymMatrix, Vector};

fn main() -> eigengap::Result<()> {
    let n = 6;
    let u = Vector::from_element(n, 1.0 / (n as f64).sqrt());
    let cov = SymMatrix::identity(n)
        .add_scaled(&SymMatrix::rank_one(&u, 1.0), 3.0)?
        .add_scaled(
            &SymMatrix::from_diagonal(&[0.5, 0.0, 0.2, 0.0, 0.1, 0.0]),
            1.0,
        )?;

    for kappa in [f64::INFINITY, 2.0, 0.5, 0.1] {
        let (_, d) = project(&cov, &u, &ProjectionConfig::new(kappa))?;
        println!(
            "kappa {kappa:>4}: gap {:.4}  spectrum {:.4?}",
            d.gap(),
            d.values
        );
    }

    let exact = project(
        &cov,
        &u,
        &ProjectionConfig::new(0.5).with_solver(DirectionSolver::Exact),
    )?
    .0;
    let fast = project(
        &cov,
        &u,
        &ProjectionConfig::new(0.5).with_solver(DirectionSolver::ProxGrad),
    )?
    .0;
    println!(
        "exact vs proximal-gradient directions, max entry difference {:.2e}",
        exact.max_abs_diff(&fast)
    );
    Ok(())
}
