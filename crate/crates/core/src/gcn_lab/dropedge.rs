use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph_model::GraphLaplacian;
use crate::spectral_core::SymMatrix;

/// Removes each undirected edge independently with probability `p`.
/// Self-loops are kept; degrees are recomputed.
pub fn drop_edges(g: &GraphLaplacian, p: f64, seed: u64) -> Result<GraphLaplacian> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    drop_edges_with(g, p, &mut rng)
}

pub(crate) fn drop_edges_with(
    g: &GraphLaplacian,
    p: f64,
    rng: &mut impl Rng,
) -> Result<GraphLaplacian> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(
            "p",
            format!("drop rate must lie in [0, 1], got {p}"),
        ));
    }
    if p == 0.0 {
        return Ok(g.clone());
    }
    let mut w = g.adjacency.as_matrix().clone();
    for (i, j, _) in g.edges() {
        if rng.random::<f64>() < p {
            w[(i, j)] = 0.0;
            w[(j, i)] = 0.0;
        }
    }
    GraphLaplacian::from_parts(SymMatrix::new(w)?, g.self_loops.clone(), g.mode)
}
