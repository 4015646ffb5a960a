//! A small (kappa x layers) sweep with a DropEdge series, written to a
//! temporary directory.
//!
//! cargo run --release --example kappa_sweep

use eigengap::pipeline::{random_laplacian, run_sweep, synth_gmrf_ar, LaplacianSpec, SweepConfig};
use eigengap::Vector;

fn main() -> eigengap::Result<()> {
    let n = 10;
    let spec = LaplacianSpec {
        scale: 1.0,
        ..LaplacianSpec::new(n)
    };
    let data = synth_gmrf_ar(
        &random_laplacian(&spec, 2)?,
        &Vector::from_element(n, 0.5),
        500,
        0.8,
        3,
    )?;

    let mut cfg = SweepConfig::new(vec![0.05, 0.5, f64::INFINITY]);
    cfg.layers = [1, 4];
    cfg.seeds = vec![0, 1];
    cfg.dropedge = vec![0.3];
    cfg.train.epochs = 10;
    cfg.train.step_size = 5e-3;

    let out_dir = std::env::temp_dir().join("eigengap_sweep_example");
    let result = run_sweep(&cfg, &data, &out_dir)?;
    for series in cfg.series() {
        println!(
            "{series:?}: optimal layers {:?}",
            result.optimal_layers(series)
        );
    }
    println!("{}", result.plot_csv());
    println!("results written to {}", out_dir.display());
    Ok(())
}
