//! Distance of each layer output to the invariant subspace of `P`, next to
//! the `(s lambda)^l` bound, on a sparse and a dense graph.
//!
//! cargo run --example oversmoothing

use eigengap::gcn_lab::{oversmoothing_check, GcnModel};
use eigengap::graph_model::{build_operator, laplacian_to_graph, EdgeMode};
use eigengap::pipeline::{random_laplacian, LaplacianSpec};
use nalgebra::DMatrix;

fn main() -> eigengap::Result<()> {
    let n = 10;
    let x0 = DMatrix::from_fn(n, 3, |i, c| ((i * 5 + c * 3) % 7) as f64 / 7.0 - 0.5);
    for extra in [2, 30] {
        let spec = LaplacianSpec {
            scale: 1.0,
            extra_edges: extra,
            ..LaplacianSpec::new(n)
        };
        let op = build_operator(&laplacian_to_graph(
            &random_laplacian(&spec, 3)?,
            EdgeMode::Clamp,
        ))?;
        let mut model = GcnModel::new(8, 3, 0)?.with_plain_relu();
        let s = model.max_singular_value();
        model.scale_theta(1.0 / s);
        let report = oversmoothing_check(&model, &op, &x0)?;
        println!(
            "{} chords: lambda {:.4}, s {:.2}, bound holds {}",
            extra, report.lambda_bound, report.s, report.bound_satisfied
        );
        for (l, (d, b)) in report.distances.iter().zip(&report.bounds).enumerate() {
            println!("  layer {l}: distance {d:.3e}  bound {b:.3e}");
        }
    }
    Ok(())
}
