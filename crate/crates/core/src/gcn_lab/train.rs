use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dropedge::drop_edges_with;
use super::model::GcnModel;
use super::mse;
use crate::error::{Error, Result};
use crate::graph_model::{build_operator, GraphLaplacian};
use crate::spectral_core::SymMatrix;

/// Samples of `(N x C input, N-vector target)`.
#[derive(Clone, Debug, Default)]
pub struct SupervisedSet {
    pub inputs: Vec<DMatrix<f64>>,
    pub targets: Vec<DVector<f64>>,
}

impl SupervisedSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub step_size: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Edge drop rate, resampled every epoch. `None` disables DropEdge.
    pub dropedge: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            step_size: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            epochs: 50,
            batch_size: 32,
            seed: 0,
            dropedge: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) {
            return Err(Error::invalid("step_size", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::invalid("beta", "Adam betas must lie in [0, 1)"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be >= 1"));
        }
        if let Some(p) = self.dropedge {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(
                    "dropedge",
                    format!("must lie in [0, 1], got {p}"),
                ));
            }
        }
        Ok(())
    }
}

/// Adam with bias correction over a flat parameter vector.
#[derive(Clone, Debug)]
pub struct Adam {
    step_size: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(cfg: &TrainConfig, params: usize) -> Self {
        Adam {
            step_size: cfg.step_size,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.eps,
            m: vec![0.0; params],
            v: vec![0.0; params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.step_size * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

/// Mean squared error over every node of every sample in the batch, and its
/// gradient with respect to the predictions.
pub fn batch_loss_and_grad(
    model: &GcnModel,
    p: &SymMatrix,
    inputs: &[&DMatrix<f64>],
    targets: &[&DVector<f64>],
) -> Result<(f64, GcnModel)> {
    let cache = model.forward_batch(p, inputs)?;
    let count = (inputs.len() * p.n()) as f64;
    let mut loss = 0.0;
    let d_pred: Vec<DVector<f64>> = cache
        .predictions
        .iter()
        .zip(targets)
        .map(|(y, t)| {
            let r = y - *t;
            loss += r.norm_squared() / count;
            r * (2.0 / count)
        })
        .collect();
    Ok((loss, model.backward(p, &cache, &d_pred)))
}

/// Mean MSE of the model over a dataset, with the given operator.
pub fn evaluate(model: &GcnModel, p: &SymMatrix, data: &SupervisedSet) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let mut total = 0.0;
    for (x, t) in data.inputs.iter().zip(&data.targets) {
        let cache = model.forward_batch(p, &[x])?;
        total += mse(t.as_slice(), cache.predictions[0].as_slice())?;
    }
    Ok(total / data.len() as f64)
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: GcnModel,
    /// Mean training loss per epoch.
    pub losses: Vec<f64>,
}

const SHUFFLE_STREAM: u64 = 1;
const DROPEDGE_STREAM: u64 = 2;

/// Mini-batch Adam on MSE. Samples are reshuffled every epoch; with DropEdge
/// the operator is rebuilt from a freshly thinned graph every epoch.
/// Shuffling and edge dropping draw from separate seeded streams, so
/// `dropedge = Some(0.0)` reproduces `dropedge = None` exactly.
pub fn train(
    mut model: GcnModel,
    graph: &GraphLaplacian,
    data: &SupervisedSet,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let full = build_operator(graph)?.p;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);
    let mut drop_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    drop_rng.set_stream(DROPEDGE_STREAM);

    let mut adam = Adam::new(cfg, model.param_count());
    let mut params = model.to_flat();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let p = match cfg.dropedge {
            Some(rate) => build_operator(&drop_edges_with(graph, rate, &mut drop_rng)?)?.p,
            None => full.clone(),
        };
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let inputs: Vec<&DMatrix<f64>> = chunk.iter().map(|&i| &data.inputs[i]).collect();
            let targets: Vec<&DVector<f64>> = chunk.iter().map(|&i| &data.targets[i]).collect();
            let (loss, grad) = batch_loss_and_grad(&model, &p, &inputs, &targets)?;
            epoch_loss += loss * chunk.len() as f64;
            adam.step(&mut params, &grad.to_flat());
            model.set_flat(&params);
        }
        let epoch_loss = epoch_loss / data.len() as f64;
        if !epoch_loss.is_finite() || !model.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        losses.push(epoch_loss);
    }
    Ok(TrainOutcome { model, losses })
}
