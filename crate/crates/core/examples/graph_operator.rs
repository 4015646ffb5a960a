//! Splits a Laplacian into adjacency, degree and self-loops, builds the GCN
//! operator and writes the graph export.
//!
//! cargo run --example graph_operator

use eigengap::graph_model::{
    build_operator, laplacian_to_graph, read_graph_export, write_graph_export, EdgeMode,
};
use eigengap::pipeline::{random_laplacian, LaplacianSpec};

fn main() -> eigengap::Result<()> {
    let spec = LaplacianSpec {
        scale: 1.0,
        ..LaplacianSpec::new(7)
    };
    let l = random_laplacian(&spec, 4)?;
    let g = laplacian_to_graph(&l, EdgeMode::Clamp);
    let op = build_operator(&g)?;

    println!("{} edges, {} component(s)", g.edge_count(), g.components);
    for (i, j, w) in g.edges() {
        println!("  {i} -- {j}  {w:.3}");
    }
    println!("self-loops {:.3?}", g.self_loops.as_slice());
    println!("spectrum of P {:.4?}", op.eigenvalues);
    println!("lambda bound {:.4}, gap {:.4}", op.lambda_bound, op.gap);

    let path = std::env::temp_dir().join("eigengap_graph_example.toml");
    write_graph_export(&path, &g, &op)?;
    assert_eq!(read_graph_export(&path)?, g);
    println!("export round-trips through {}", path.display());
    Ok(())
}
