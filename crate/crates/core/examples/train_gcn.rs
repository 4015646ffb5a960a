//! Trains GCNs of increasing depth on AR(1) GMRF signals over the true graph
//! and reports validation MSE.
//!
//! cargo run --release --example train_gcn

use eigengap::gcn_lab::{evaluate, train, GcnModel, TrainConfig};
use eigengap::graph_model::{build_operator, laplacian_to_graph, EdgeMode};
use eigengap::pipeline::{random_laplacian, split, synth_gmrf_ar, LaplacianSpec, DEFAULT_SPLIT};
use eigengap::Vector;

fn main() -> eigengap::Result<()> {
    let n = 10;
    let spec = LaplacianSpec {
        scale: 1.0,
        ..LaplacianSpec::new(n)
    };
    let l = random_laplacian(&spec, 5)?;
    let data = synth_gmrf_ar(&l, &Vector::from_element(n, 0.5), 800, 0.8, 6)?;
    let graph = laplacian_to_graph(&l, EdgeMode::Clamp);
    let p = build_operator(&graph)?.p;

    let window = data.feature_window;
    let parts = split(data.t(), &DEFAULT_SPLIT, 0)?;
    let train_set = data.supervised(&parts.train);
    let val_set = data.supervised(&parts.val);

    let cfg = TrainConfig {
        epochs: 30,
        step_size: 5e-3,
        ..TrainConfig::default()
    };
    for layers in [1, 2, 4, 8] {
        let outcome = train(GcnModel::new(layers, window, 7)?, &graph, &train_set, &cfg)?;
        let val = evaluate(&outcome.model, &p, &val_set)?;
        println!(
            "{layers} layer(s): train loss {:.4} -> {:.4}, val MSE {val:.4}",
            outcome.losses[0],
            outcome.losses.last().expect("epochs > 0")
        );
    }
    Ok(())
}
