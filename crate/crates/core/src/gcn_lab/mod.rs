//! Small deterministic GCN: forward pass, analytic backprop, Adam, DropEdge,
//! and the distance of layer outputs to the invariant subspace of `P`.

mod dropedge;
mod model;
mod train;

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_model::GcnOperator;
use crate::spectral_core::format_f64;

pub use dropedge::drop_edges;
pub use model::{
    BatchNormParams, ForwardCache, GcnModel, LayerCache, BATCHNORM_EPS, DEFAULT_LEAKY_SLOPE,
};
pub use train::{
    batch_loss_and_grad, evaluate, train, Adam, SupervisedSet, TrainConfig, TrainOutcome,
};

/// `sum (x_i - x^_i)^2 / N`
pub fn mse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty("mse input"));
    }
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / truth.len() as f64)
}

/// Per-node prediction and the layer outputs `X^(1) .. X^(L)`.
pub fn gcn_forward(
    model: &GcnModel,
    op: &GcnOperator,
    x: &DMatrix<f64>,
) -> Result<(DVector<f64>, Vec<DMatrix<f64>>)> {
    let cache = model.forward_batch(&op.p, &[x])?;
    Ok((cache.predictions[0].clone(), cache.activations(0)))
}

/// `||X - V V^T X||_F` with `V` an orthonormal basis of the eigenvalue-1
/// eigenspace of `P`.
pub fn distance_to_invariant(x: &DMatrix<f64>, op: &GcnOperator) -> f64 {
    let v = op.invariant_basis();
    let coeffs = v.transpose() * x;
    (x - v * coeffs).norm()
}

#[derive(Clone, Debug, Serialize)]
pub struct OversmoothReport {
    /// `d_M(X^(l))` for `l = 0..=L`.
    pub distances: Vec<f64>,
    pub lambda_bound: f64,
    pub s: f64,
    /// `(s lambda)^l d_M(X^(0))` for `l = 0..=L`.
    pub bounds: Vec<f64>,
    pub bound_satisfied: bool,
    /// Whether the model meets the bound's hypotheses (plain ReLU, no
    /// BatchNorm). Otherwise `bound_satisfied` is informational.
    pub hypotheses_hold: bool,
}

impl OversmoothReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml())?;
        Ok(())
    }
}

/// Runs the graph-convolution stack on `x0` and compares each layer's
/// distance to the invariant subspace with `(s lambda)^l d_M(X^(0))`.
pub fn oversmoothing_check(
    model: &GcnModel,
    op: &GcnOperator,
    x0: &DMatrix<f64>,
) -> Result<OversmoothReport> {
    let (_, activations) = gcn_forward(model, op, x0)?;
    let s = model.max_singular_value();
    let lambda = op.lambda_bound;
    let d0 = distance_to_invariant(x0, op);
    let mut distances = vec![d0];
    distances.extend(activations.iter().map(|x| distance_to_invariant(x, op)));
    let bounds: Vec<f64> = (0..distances.len())
        .map(|l| (s * lambda).powi(l as i32) * d0)
        .collect();
    let bound_satisfied = distances.iter().zip(&bounds).all(|(d, b)| *d <= b + 1e-9);
    Ok(OversmoothReport {
        distances,
        lambda_bound: lambda,
        s,
        bounds,
        bound_satisfied,
        hypotheses_hold: model.leaky_slope == 0.0 && model.batchnorm.is_none(),
    })
}

/// Writes `epoch,loss` rows.
pub fn write_loss_trace(path: &Path, losses: &[f64]) -> Result<()> {
    let mut out = String::from("epoch,loss\n");
    for (epoch, loss) in losses.iter().enumerate() {
        out.push_str(&format!("{},{}\n", epoch + 1, format_f64(*loss)));
    }
    fs::write(path, out)?;
    Ok(())
}
