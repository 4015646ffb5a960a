use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral_core::{dense_eigen, SymMatrix};

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;
pub const BATCHNORM_EPS: f64 = 1e-5;

/// Per-channel scale and shift of a BatchNorm layer.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchNormParams {
    pub scale: DVector<f64>,
    pub shift: DVector<f64>,
}

/// `L` graph-convolution blocks `X -> act(BN(P X Theta))` followed by a
/// per-node head `C -> H -> 1`.
///
/// The same struct carries gradients (see [`GcnModel::zeros_like`]).
#[derive(Clone, Debug, PartialEq)]
pub struct GcnModel {
    pub theta: Vec<DMatrix<f64>>,
    /// `C x H`
    pub head_w1: DMatrix<f64>,
    pub head_b1: DVector<f64>,
    pub head_w2: DVector<f64>,
    pub head_b2: f64,
    /// Negative-side slope; 0 is plain ReLU.
    pub leaky_slope: f64,
    pub batchnorm: Option<Vec<BatchNormParams>>,
}

impl GcnModel {
    /// Seeded uniform init in `[-1/sqrt(C), 1/sqrt(C)]`, hidden width `H = C`,
    /// leaky slope 0.01, BatchNorm off.
    pub fn new(layers: usize, channels: usize, seed: u64) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid(
                "layers",
                format!("must be >= 1, got {layers}"),
            ));
        }
        if channels == 0 {
            return Err(Error::invalid("channels", "must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 1.0 / (channels as f64).sqrt();
        let mut draw = |r: usize, c: usize| {
            DMatrix::from_fn(r, c, |_, _| bound * (2.0 * rng.random::<f64>() - 1.0))
        };
        let theta = (0..layers).map(|_| draw(channels, channels)).collect();
        let head_w1 = draw(channels, channels);
        let head_b1 = draw(channels, 1).column(0).into_owned();
        let head_w2 = draw(channels, 1).column(0).into_owned();
        let head_b2 = draw(1, 1)[(0, 0)];
        Ok(GcnModel {
            theta,
            head_w1,
            head_b1,
            head_w2,
            head_b2,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
            batchnorm: None,
        })
    }

    pub fn with_plain_relu(mut self) -> Self {
        self.leaky_slope = 0.0;
        self
    }

    /// Enables BatchNorm with unit scale and zero shift.
    pub fn with_batchnorm(mut self) -> Self {
        let c = self.channels();
        self.batchnorm = Some(
            (0..self.layers())
                .map(|_| BatchNormParams {
                    scale: DVector::from_element(c, 1.0),
                    shift: DVector::zeros(c),
                })
                .collect(),
        );
        self
    }

    pub fn layers(&self) -> usize {
        self.theta.len()
    }

    pub fn channels(&self) -> usize {
        self.theta[0].nrows()
    }

    pub fn hidden(&self) -> usize {
        self.head_w1.ncols()
    }

    /// Multiplies every `Theta^(l)` by `factor`.
    pub fn scale_theta(&mut self, factor: f64) {
        for t in &mut self.theta {
            *t *= factor;
        }
    }

    /// `s = max_l sigma_max(Theta^(l))`.
    pub fn max_singular_value(&self) -> f64 {
        self.theta
            .iter()
            .map(|t| {
                let gram = SymMatrix::symmetrize(t.transpose() * t).expect("square");
                dense_eigen(&gram).max_value().max(0.0).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Same shape, all parameters zero; used for gradients.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.map_params(|_| 0.0);
        z
    }

    pub fn param_count(&self) -> usize {
        self.to_flat().len()
    }

    fn map_params(&mut self, mut f: impl FnMut(f64) -> f64) {
        for t in &mut self.theta {
            t.apply(|x| *x = f(*x));
        }
        self.head_w1.apply(|x| *x = f(*x));
        self.head_b1.apply(|x| *x = f(*x));
        self.head_w2.apply(|x| *x = f(*x));
        self.head_b2 = f(self.head_b2);
        if let Some(bn) = &mut self.batchnorm {
            for p in bn {
                p.scale.apply(|x| *x = f(*x));
                p.shift.apply(|x| *x = f(*x));
            }
        }
    }

    /// All trainable parameters in a fixed order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut me = self.clone();
        me.map_params(|x| {
            out.push(x);
            x
        });
        out
    }

    pub fn set_flat(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.param_count(), "parameter count");
        let mut it = values.iter();
        self.map_params(|_| *it.next().expect("parameter count matches"));
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|x| x.is_finite())
    }

    fn act(&self, z: f64) -> f64 {
        if z > 0.0 {
            z
        } else {
            self.leaky_slope * z
        }
    }

    fn act_grad(&self, z: f64) -> f64 {
        if z > 0.0 {
            1.0
        } else {
            self.leaky_slope
        }
    }

    fn check_input(&self, p: &SymMatrix, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                found: x.nrows(),
            });
        }
        if x.ncols() != self.channels() {
            return Err(Error::DimensionMismatch {
                expected: self.channels(),
                found: x.ncols(),
            });
        }
        Ok(())
    }

    /// Forward pass over a batch, keeping what backprop needs.
    pub fn forward_batch(&self, p: &SymMatrix, inputs: &[&DMatrix<f64>]) -> Result<ForwardCache> {
        if inputs.is_empty() {
            return Err(Error::Empty("batch"));
        }
        for x in inputs {
            self.check_input(p, x)?;
        }
        let pm = p.as_matrix();
        let mut layers = Vec::with_capacity(self.layers());
        let mut current: Vec<DMatrix<f64>> = inputs.iter().map(|x| (*x).clone()).collect();
        for (l, theta) in self.theta.iter().enumerate() {
            let px: Vec<DMatrix<f64>> = current.iter().map(|x| pm * x).collect();
            let z: Vec<DMatrix<f64>> = px.iter().map(|v| v * theta).collect();
            let (pre, norm) = match &self.batchnorm {
                Some(bn) => {
                    let (normalized, inv_std) = batch_normalize(&z);
                    let params = &bn[l];
                    let pre = normalized
                        .iter()
                        .map(|h| {
                            let mut out = h.clone();
                            for c in 0..out.ncols() {
                                let (g, b) = (params.scale[c], params.shift[c]);
                                out.column_mut(c).apply(|v| *v = g * *v + b);
                            }
                            out
                        })
                        .collect();
                    (pre, Some((normalized, inv_std)))
                }
                None => (z, None),
            };
            let output: Vec<DMatrix<f64>> = pre.iter().map(|m| m.map(|v| self.act(v))).collect();
            current = output.clone();
            layers.push(LayerCache {
                px,
                pre,
                norm,
                output,
            });
        }
        let hidden_pre: Vec<DMatrix<f64>> = current
            .iter()
            .map(|x| {
                let mut a = x * &self.head_w1;
                for mut row in a.row_iter_mut() {
                    row += self.head_b1.transpose();
                }
                a
            })
            .collect();
        let hidden: Vec<DMatrix<f64>> = hidden_pre.iter().map(|a| a.map(|v| self.act(v))).collect();
        let predictions = hidden
            .iter()
            .map(|h| h * &self.head_w2 + DVector::from_element(h.nrows(), self.head_b2))
            .collect();
        Ok(ForwardCache {
            inputs: inputs.iter().map(|x| (*x).clone()).collect(),
            layers,
            hidden_pre,
            hidden,
            predictions,
        })
    }

    /// Gradient of `sum_b sum_i weights_b,i * prediction_b,i` given
    /// `d_pred[b] = dLoss/dprediction_b`.
    pub fn backward(
        &self,
        p: &SymMatrix,
        cache: &ForwardCache,
        d_pred: &[DVector<f64>],
    ) -> GcnModel {
        let pm = p.as_matrix();
        let mut grad = self.zeros_like();
        let batch = cache.predictions.len();
        let last_out = |b: usize| -> &DMatrix<f64> {
            match cache.layers.last() {
                Some(l) => &l.output[b],
                None => &cache.inputs[b],
            }
        };
        let mut d_x: Vec<DMatrix<f64>> = Vec::with_capacity(batch);
        for b in 0..batch {
            let dy = &d_pred[b];
            grad.head_b2 += dy.sum();
            grad.head_w2 += cache.hidden[b].transpose() * dy;
            let mut d_a = dy * self.head_w2.transpose();
            d_a.zip_apply(&cache.hidden_pre[b], |g, z| *g *= self.act_grad(z));
            grad.head_w1 += last_out(b).transpose() * &d_a;
            grad.head_b1 += d_a.row_sum().transpose();
            d_x.push(d_a * self.head_w1.transpose());
        }
        for l in (0..self.layers()).rev() {
            let lc = &cache.layers[l];
            let mut d_pre: Vec<DMatrix<f64>> = d_x
                .into_iter()
                .zip(&lc.pre)
                .map(|(mut g, z)| {
                    g.zip_apply(z, |g, z| *g *= self.act_grad(z));
                    g
                })
                .collect();
            let d_z: Vec<DMatrix<f64>> = match (&self.batchnorm, &lc.norm) {
                (Some(bn), Some((normalized, inv_std))) => {
                    let params = &bn[l];
                    let gbn = &mut grad.batchnorm.as_mut().expect("same shape")[l];
                    let c = self.channels();
                    let count = (batch * normalized[0].nrows()) as f64;
                    let mut mean_dh = vec![0.0; c];
                    let mut mean_dh_h = vec![0.0; c];
                    for (g, h) in d_pre.iter_mut().zip(normalized) {
                        for ch in 0..c {
                            let col_g = g.column(ch);
                            let col_h = h.column(ch);
                            gbn.scale[ch] += col_g.dot(&col_h);
                            gbn.shift[ch] += col_g.sum();
                            mean_dh[ch] += params.scale[ch] * col_g.sum() / count;
                            mean_dh_h[ch] += params.scale[ch] * col_g.dot(&col_h) / count;
                        }
                    }
                    d_pre
                        .iter()
                        .zip(normalized)
                        .map(|(g, h)| {
                            let mut out = g.clone();
                            for ch in 0..c {
                                for i in 0..out.nrows() {
                                    let dh = params.scale[ch] * g[(i, ch)];
                                    out[(i, ch)] = inv_std[ch]
                                        * (dh - mean_dh[ch] - h[(i, ch)] * mean_dh_h[ch]);
                                }
                            }
                            out
                        })
                        .collect()
                }
                _ => d_pre,
            };
            let theta = &self.theta[l];
            d_x = Vec::with_capacity(batch);
            for (b, dz) in d_z.iter().enumerate() {
                grad.theta[l] += lc.px[b].transpose() * dz;
                d_x.push(pm * (dz * theta.transpose()));
            }
        }
        grad
    }
}

fn batch_normalize(z: &[DMatrix<f64>]) -> (Vec<DMatrix<f64>>, Vec<f64>) {
    let c = z[0].ncols();
    let count = (z.len() * z[0].nrows()) as f64;
    let mut mean = vec![0.0; c];
    for m in z {
        for ch in 0..c {
            mean[ch] += m.column(ch).sum() / count;
        }
    }
    let mut var = vec![0.0; c];
    for m in z {
        for ch in 0..c {
            var[ch] += m
                .column(ch)
                .iter()
                .map(|v| (v - mean[ch]).powi(2))
                .sum::<f64>()
                / count;
        }
    }
    let inv_std: Vec<f64> = var
        .iter()
        .map(|v| 1.0 / (v + BATCHNORM_EPS).sqrt())
        .collect();
    let normalized = z
        .iter()
        .map(|m| {
            let mut out = m.clone();
            for ch in 0..c {
                out.column_mut(ch)
                    .apply(|v| *v = (*v - mean[ch]) * inv_std[ch]);
            }
            out
        })
        .collect();
    (normalized, inv_std)
}

#[derive(Clone, Debug)]
pub struct LayerCache {
    /// `P X^(l-1)` per sample.
    pub px: Vec<DMatrix<f64>>,
    /// Pre-activation (after BatchNorm when enabled).
    pub pre: Vec<DMatrix<f64>>,
    /// Normalized values and per-channel `1/std` when BatchNorm is on.
    pub norm: Option<(Vec<DMatrix<f64>>, Vec<f64>)>,
    /// `X^(l)`
    pub output: Vec<DMatrix<f64>>,
}

#[derive(Clone, Debug)]
pub struct ForwardCache {
    pub inputs: Vec<DMatrix<f64>>,
    pub layers: Vec<LayerCache>,
    pub hidden_pre: Vec<DMatrix<f64>>,
    pub hidden: Vec<DMatrix<f64>>,
    pub predictions: Vec<DVector<f64>>,
}

impl ForwardCache {
    /// `X^(1) .. X^(L)` of sample `b`.
    pub fn activations(&self, b: usize) -> Vec<DMatrix<f64>> {
        self.layers.iter().map(|l| l.output[b].clone()).collect()
    }
}
