//! DropEdge resampling: surviving edge counts and the effect on training.
//!
//! cargo run --release --example dropedge

use eigengap::gcn_lab::{drop_edges, evaluate, train, GcnModel, TrainConfig};
use eigengap::graph_model::{build_operator, laplacian_to_graph, EdgeMode};
use eigengap::pipeline::{random_laplacian, synth_gmrf_ar, LaplacianSpec};
use eigengap::Vector;

fn main() -> eigengap::Result<()> {
    let n = 12;
    let spec = LaplacianSpec {
        scale: 1.0,
        extra_edges: 20,
        ..LaplacianSpec::new(n)
    };
    let l = random_laplacian(&spec, 11)?;
    let graph = laplacian_to_graph(&l, EdgeMode::Clamp);
    println!("full graph: {} edges", graph.edge_count());
    for p in [0.1, 0.5, 0.9] {
        let counts: Vec<usize> = (0..5)
            .map(|seed| drop_edges(&graph, p, seed).map(|g| g.edge_count()))
            .collect::<Result<_, _>>()?;
        println!("  p = {p}: survivors over five draws {counts:?}");
    }

    let data = synth_gmrf_ar(&l, &Vector::from_element(n, 0.5), 600, 0.8, 12)?;
    let rows: Vec<usize> = (data.feature_window..data.t()).collect();
    let (fit, held) = rows.split_at(rows.len() * 4 / 5);
    let (fit, held) = (data.supervised(fit), data.supervised(held));
    let p = build_operator(&graph)?.p;
    for rate in [None, Some(0.3)] {
        let cfg = TrainConfig {
            epochs: 20,
            step_size: 5e-3,
            dropedge: rate,
            ..TrainConfig::default()
        };
        let outcome = train(
            GcnModel::new(6, data.feature_window, 1)?,
            &graph,
            &fit,
            &cfg,
        )?;
        println!(
            "6 layers, dropedge {rate:?}: held-out MSE {:.4}",
            evaluate(&outcome.model, &p, &held)?
        );
    }
    Ok(())
}
