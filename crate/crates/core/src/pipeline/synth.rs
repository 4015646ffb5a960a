use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SignalDataset;
use crate::error::{Error, Result};
use crate::spectral_core::{SymMatrix, Vector};

/// Random connected sparse graph: a random spanning path plus `extra_edges`
/// random chords, weights uniform in `[0.5, 1.5]`. Returns
/// `scale * (D - W + shift * I)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplacianSpec {
    pub nodes: usize,
    pub extra_edges: usize,
    pub scale: f64,
    pub shift: f64,
}

impl LaplacianSpec {
    pub fn new(nodes: usize) -> Self {
        LaplacianSpec {
            nodes,
            extra_edges: nodes / 2,
            scale: 100.0,
            shift: 0.1,
        }
    }
}

pub fn random_laplacian(spec: &LaplacianSpec, seed: u64) -> Result<SymMatrix> {
    let n = spec.nodes;
    if n < 2 {
        return Err(Error::invalid("nodes", "need at least 2 nodes"));
    }
    let max_extra = n * (n - 1) / 2 - (n - 1);
    if spec.extra_edges > max_extra {
        return Err(Error::invalid(
            "extra_edges",
            format!("at most {max_extra} chords fit on {n} nodes"),
        ));
    }
    if !(spec.scale > 0.0) || !(spec.shift > 0.0) {
        return Err(Error::invalid("scale", "scale and shift must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let mut w = DMatrix::<f64>::zeros(n, n);
    let connect = |w: &mut DMatrix<f64>, i: usize, j: usize, rng: &mut ChaCha8Rng| {
        let weight = rng.random_range(0.5..1.5);
        w[(i, j)] = weight;
        w[(j, i)] = weight;
    };
    for pair in order.windows(2) {
        connect(&mut w, pair[0], pair[1], &mut rng);
    }
    let mut added = 0;
    while added < spec.extra_edges {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j && w[(i, j)] == 0.0 {
            connect(&mut w, i, j, &mut rng);
            added += 1;
        }
    }
    let degree = DMatrix::from_diagonal(&w.column_sum());
    let l = (degree - w + DMatrix::identity(n, n) * spec.shift) * spec.scale;
    SymMatrix::symmetrize(l)
}

/// `t` independent draws of `x ~ N(mean, L^-1)`.
pub fn synth_gmrf(l_true: &SymMatrix, mean: &Vector, t: usize, seed: u64) -> Result<SignalDataset> {
    synth_gmrf_ar(l_true, mean, t, 0.0, seed)
}

/// Like [`synth_gmrf`] but with AR(1) time correlation:
/// `x_t = mean + a (x_{t-1} - mean) + sqrt(1 - a^2) z_t`, `z_t ~ N(0, L^-1)`.
/// Every row keeps the marginal `N(mean, L^-1)`.
pub fn synth_gmrf_ar(
    l_true: &SymMatrix,
    mean: &Vector,
    t: usize,
    ar: f64,
    seed: u64,
) -> Result<SignalDataset> {
    let n = l_true.n();
    if mean.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mean.len(),
        });
    }
    if t < 2 {
        return Err(Error::invalid(
            "samples",
            format!("need at least 2 samples, got {t}"),
        ));
    }
    if !(ar.abs() < 1.0) {
        return Err(Error::invalid(
            "ar",
            format!("must lie in (-1, 1), got {ar}"),
        ));
    }
    let cov = l_true.inverse_pd()?;
    let factor = cov
        .as_matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite {
            context: "covariance of the generating model".into(),
        })?
        .l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innovation = (1.0 - ar * ar).sqrt();
    let mut x = DMatrix::zeros(t, n);
    let mut prev: Option<DVector<f64>> = None;
    for row in 0..t {
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dev = &factor * z;
        let dev = match prev {
            None => dev,
            Some(p) => p * ar + dev * innovation,
        };
        x.set_row(row, &(mean + &dev).transpose());
        prev = Some(dev);
    }
    SignalDataset::new(x)
}

/// Adds i.i.d. `N(0, sigma^2)` measurement noise to every entry.
pub fn add_observation_noise(data: &SignalDataset, sigma: f64, seed: u64) -> Result<SignalDataset> {
    if !(sigma >= 0.0) {
        return Err(Error::invalid("noise", "must be non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = data
        .x
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal));
    Ok(SignalDataset { x, ..data.clone() })
}
