//! Learns a Laplacian from synthetic GMRF samples and scores its edge
//! support against the generating graph.
//!
//! cargo run --release --example learn_laplacian

use eigengap::eigen_projection::ProjectionConfig;
use eigengap::glasso::{glasso_learn, GlassoConfig};
use eigengap::graph_model::{measure_eigengap, support_f1, DEFAULT_DISTINCT_TOL};
use eigengap::pipeline::{empirical_stats, random_laplacian, synth_gmrf, LaplacianSpec};
use eigengap::Vector;

fn main() -> eigengap::Result<()> {
    let n = 12;
    let truth = random_laplacian(&LaplacianSpec::new(n), 1)?;
    let data = synth_gmrf(&truth, &Vector::from_element(n, 0.5), 3000, 2)?;
    let (cov, u) = empirical_stats(&data, false)?;

    for kappa in [f64::INFINITY, 1.0, 0.1] {
        let out = glasso_learn(
            &cov,
            &u,
            &ProjectionConfig::new(kappa),
            &GlassoConfig::with_rho(1e-4),
        )?;
        let score = support_f1(&out.laplacian, &truth, 0.01)?;
        println!(
            "kappa {kappa:>4}: {} sweeps, converged {}, covariance gap {:.4}, laplacian gap {:.4e}, edge F1 {:.2}",
            out.sweep_count(),
            out.converged,
            out.decomp.gap(),
            measure_eigengap(&out.laplacian, DEFAULT_DISTINCT_TOL)?,
            score.f1
        );
    }
    Ok(())
}
