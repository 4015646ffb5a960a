use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    empirical_stats, split, validate_ratios, SignalDataset, Split, DEFAULT_FEATURE_WINDOW,
    DEFAULT_SPLIT,
};
use crate::eigen_projection::{DirectionSolver, ProjectionConfig};
use crate::error::{Error, Result};
use crate::gcn_lab::{evaluate, train, GcnModel, SupervisedSet, TrainConfig, DEFAULT_LEAKY_SLOPE};
use crate::glasso::{glasso_learn, GlassoConfig, GlassoOutput};
use crate::graph_model::{
    build_operator, laplacian_to_graph, measure_eigengap, EdgeMode, GraphLaplacian,
    DEFAULT_DISTINCT_TOL,
};
use crate::spectral_core::{format_f64, SymMatrix, Vector};

pub const MAX_LAYERS: usize = 9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlassoSection {
    pub max_sweeps: usize,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub inner_max_cycles: usize,
}

impl Default for GlassoSection {
    fn default() -> Self {
        let g = GlassoConfig::default();
        GlassoSection {
            max_sweeps: g.max_sweeps,
            outer_tol: g.outer_tol,
            inner_tol: g.inner_tol,
            inner_max_cycles: g.inner_max_cycles,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectionSection {
    pub solver: DirectionSolver,
    pub gamma: f64,
    pub eig_floor: f64,
}

impl Default for ProjectionSection {
    fn default() -> Self {
        let p = ProjectionConfig::new(1.0);
        ProjectionSection {
            solver: p.solver,
            gamma: p.gamma,
            eig_floor: p.eig_floor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub step_size: f64,
    pub leaky_slope: f64,
    pub batchnorm: bool,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSection {
            epochs: t.epochs,
            batch_size: t.batch_size,
            step_size: t.step_size,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
            batchnorm: false,
        }
    }
}

/// Sweep configuration, read from TOML. Unknown keys are rejected; `inf`
/// is accepted in `kappas` for the uncapped baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kappas: Vec<f64>,
    /// Inclusive `[min, max]` layer counts, within `[1, 9]`.
    #[serde(default = "default_layers")]
    pub layers: [usize; 2],
    /// Replicate seeds; every `(series, layers)` pair is trained once per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Drives the split and every per-cell stream.
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub centered: bool,
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    #[serde(default = "default_window")]
    pub feature_window: usize,
    #[serde(default)]
    pub target_offset: usize,
    /// DropEdge rates for the baseline series; empty disables it.
    #[serde(default)]
    pub dropedge: Vec<f64>,
    /// Graph used by the DropEdge series.
    #[serde(default = "default_dropedge_kappa")]
    pub dropedge_kappa: f64,
    #[serde(default)]
    pub glasso: GlassoSection,
    #[serde(default)]
    pub projection: ProjectionSection,
    #[serde(default)]
    pub train: TrainSection,
}

fn default_layers() -> [usize; 2] {
    [1, MAX_LAYERS]
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_rho() -> f64 {
    GlassoConfig::default().rho
}
fn default_split() -> [f64; 3] {
    DEFAULT_SPLIT
}
fn default_window() -> usize {
    DEFAULT_FEATURE_WINDOW
}
fn default_dropedge_kappa() -> f64 {
    f64::INFINITY
}

impl SweepConfig {
    pub fn new(kappas: Vec<f64>) -> Self {
        toml::from_str::<SweepConfig>("kappas = []")
            .map(|c| SweepConfig { kappas, ..c })
            .expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::invalid("kappas", "at least one value required"));
        }
        let [lo, hi] = self.layers;
        if lo < 1 || hi > MAX_LAYERS || lo > hi {
            return Err(Error::invalid(
                "layers",
                format!("need 1 <= min <= max <= {MAX_LAYERS}, got [{lo}, {hi}]"),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds", "at least one seed required"));
        }
        if self.feature_window == 0 {
            return Err(Error::invalid("feature_window", "must be >= 1"));
        }
        validate_ratios(&self.split)?;
        if let Some(p) = self.dropedge.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(
                "dropedge",
                format!("rates must lie in [0, 1], got {p}"),
            ));
        }
        self.projection_config(self.dropedge_kappa).validate()?;
        for &k in &self.kappas {
            self.projection_config(k).validate()?;
        }
        self.glasso_config().validate()?;
        self.train_config(0, None).validate()
    }

    pub fn projection_config(&self, kappa: f64) -> ProjectionConfig {
        ProjectionConfig {
            eig_floor: self.projection.eig_floor,
            ..ProjectionConfig::new(kappa)
                .with_gamma(self.projection.gamma)
                .with_solver(self.projection.solver)
        }
    }

    pub fn glasso_config(&self) -> GlassoConfig {
        GlassoConfig {
            rho: self.rho,
            max_sweeps: self.glasso.max_sweeps,
            outer_tol: self.glasso.outer_tol,
            inner_tol: self.glasso.inner_tol,
            inner_max_cycles: self.glasso.inner_max_cycles,
        }
    }

    pub fn train_config(&self, seed: u64, dropedge: Option<f64>) -> TrainConfig {
        TrainConfig {
            step_size: self.train.step_size,
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            seed,
            dropedge,
            ..TrainConfig::default()
        }
    }

    pub fn layer_counts(&self) -> std::ops::RangeInclusive<usize> {
        self.layers[0]..=self.layers[1]
    }

    /// Eigen-gap series first (in `kappas` order), then DropEdge series.
    pub fn series(&self) -> Vec<Series> {
        let mut out: Vec<Series> = self
            .kappas
            .iter()
            .map(|&kappa| Series::Gap { kappa })
            .collect();
        out.extend(self.dropedge.iter().map(|&p| Series::DropEdge {
            kappa: self.dropedge_kappa,
            p,
        }));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Series {
    Gap { kappa: f64 },
    DropEdge { kappa: f64, p: f64 },
}

impl Series {
    pub fn kappa(&self) -> f64 {
        match *self {
            Series::Gap { kappa } | Series::DropEdge { kappa, .. } => kappa,
        }
    }

    pub fn drop_rate(&self) -> Option<f64> {
        match *self {
            Series::Gap { .. } => None,
            Series::DropEdge { p, .. } => Some(p),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Series::Gap { .. } => "gap",
            Series::DropEdge { .. } => "dropedge",
        }
    }
}

/// A Laplacian learned on the training rows for one `kappa`.
#[derive(Clone, Debug)]
pub struct LearnedGraph {
    pub kappa: f64,
    pub output: GlassoOutput,
    pub graph: GraphLaplacian,
    pub operator: SymMatrix,
    pub gap_covariance: f64,
    pub gap_laplacian: f64,
}

/// Learns the graph for one `kappa` from the given covariance statistics.
pub fn learn_for_kappa(
    cov: &SymMatrix,
    u: &Vector,
    kappa: f64,
    cfg: &SweepConfig,
) -> Result<LearnedGraph> {
    let output = glasso_learn(cov, u, &cfg.projection_config(kappa), &cfg.glasso_config())?;
    let graph = laplacian_to_graph(&output.laplacian, EdgeMode::Clamp);
    let operator = build_operator(&graph)?.p;
    let gap_laplacian = measure_eigengap(&output.laplacian, DEFAULT_DISTINCT_TOL)?;
    Ok(LearnedGraph {
        kappa,
        gap_covariance: output.decomp.gap(),
        gap_laplacian,
        output,
        graph,
        operator,
    })
}

/// Everything shared by the cells of one sweep: the split, the supervised
/// sets and one learned graph per distinct `kappa`.
pub struct PreparedSweep {
    pub cfg: SweepConfig,
    pub split: Split,
    pub train: SupervisedSet,
    pub val: SupervisedSet,
    pub test: SupervisedSet,
    graphs: Vec<(f64, std::result::Result<LearnedGraph, String>)>,
}

fn same_kappa(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

impl PreparedSweep {
    pub fn new(cfg: &SweepConfig, data: &SignalDataset) -> Result<Self> {
        cfg.validate()?;
        let data = data
            .clone()
            .with_window(cfg.feature_window, cfg.target_offset)?;
        let split = split(data.t(), &cfg.split, cfg.master_seed)?;
        let (cov, u) = empirical_stats(&data.select_rows(&split.train)?, cfg.centered)?;
        let train = data.supervised(&split.train);
        let val = data.supervised(&split.val);
        let test = data.supervised(&split.test);
        for (name, set) in [("training", &train), ("validation", &val), ("test", &test)] {
            if set.is_empty() {
                return Err(Error::invalid(
                    "signals",
                    format!("{name} split has no complete feature window"),
                ));
            }
        }
        let mut graphs: Vec<(f64, std::result::Result<LearnedGraph, String>)> = Vec::new();
        for series in cfg.series() {
            let kappa = series.kappa();
            if graphs.iter().any(|(k, _)| same_kappa(*k, kappa)) {
                continue;
            }
            graphs.push((
                kappa,
                learn_for_kappa(&cov, &u, kappa, cfg).map_err(|e| e.to_string()),
            ));
        }
        Ok(PreparedSweep {
            cfg: cfg.clone(),
            split,
            train,
            val,
            test,
            graphs,
        })
    }

    pub fn graph(&self, kappa: f64) -> std::result::Result<&LearnedGraph, &str> {
        let (_, g) = self
            .graphs
            .iter()
            .find(|(k, _)| same_kappa(*k, kappa))
            .expect("every configured kappa is prepared");
        g.as_ref().map_err(|e| e.as_str())
    }

    /// Every cell, in output order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for series in self.cfg.series() {
            for layers in self.cfg.layer_counts() {
                for &seed in &self.cfg.seeds {
                    out.push(CellKey {
                        series,
                        layers,
                        seed,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellKey {
    pub series: Series,
    pub layers: usize,
    pub seed: u64,
}

impl CellKey {
    /// Model-init and training seeds. They depend on the master seed, the
    /// replicate seed and the depth only, so every series at a given
    /// `(layers, seed)` starts from the same weights and batch order.
    pub fn stream_seeds(&self, master_seed: u64) -> (u64, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(
            self.seed
                .wrapping_mul(MAX_LAYERS as u64 + 1)
                .wrapping_add(self.layers as u64),
        );
        (rng.next_u64(), rng.next_u64())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub series: Series,
    pub layers: usize,
    pub seed: u64,
    pub val_mse: f64,
    pub test_mse: f64,
    pub gap_covariance: f64,
    pub gap_laplacian: f64,
    pub optimal: bool,
    /// `None` on success, otherwise the failure message.
    pub failure: Option<String>,
}

impl ExperimentRecord {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Trains and evaluates one cell. Failures are captured in the record.
pub fn run_cell(prepared: &PreparedSweep, key: CellKey) -> ExperimentRecord {
    let mut record = ExperimentRecord {
        series: key.series,
        layers: key.layers,
        seed: key.seed,
        val_mse: f64::NAN,
        test_mse: f64::NAN,
        gap_covariance: f64::NAN,
        gap_laplacian: f64::NAN,
        optimal: false,
        failure: None,
    };
    let learned = match prepared.graph(key.series.kappa()) {
        Ok(g) => g,
        Err(e) => {
            record.failure = Some(format!("learn: {e}"));
            return record;
        }
    };
    record.gap_covariance = learned.gap_covariance;
    record.gap_laplacian = learned.gap_laplacian;
    let cfg = &prepared.cfg;
    let (model_seed, train_seed) = key.stream_seeds(cfg.master_seed);
    let result = (|| -> Result<(f64, f64)> {
        let mut model = GcnModel::new(key.layers, cfg.feature_window, model_seed)?;
        model.leaky_slope = cfg.train.leaky_slope;
        if cfg.train.batchnorm {
            model = model.with_batchnorm();
        }
        let trained = train(
            model,
            &learned.graph,
            &prepared.train,
            &cfg.train_config(train_seed, key.series.drop_rate()),
        )?;
        let val = evaluate(&trained.model, &learned.operator, &prepared.val)?;
        let test = evaluate(&trained.model, &learned.operator, &prepared.test)?;
        Ok((val, test))
    })();
    match result {
        Ok((val, test)) if val.is_finite() && test.is_finite() => {
            record.val_mse = val;
            record.test_mse = test;
        }
        Ok(_) => record.failure = Some("train: non-finite evaluation".into()),
        Err(e) => record.failure = Some(format!("train: {e}")),
    }
    record
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<ExperimentRecord>,
}

impl ExperimentResult {
    fn series_list(&self) -> Vec<Series> {
        let mut out: Vec<Series> = Vec::new();
        for r in &self.records {
            if !out.contains(&r.series) {
                out.push(r.series);
            }
        }
        out
    }

    /// `(layers, mean val MSE, mean test MSE, successful cells)` per depth.
    pub fn series_means(&self, series: Series) -> Vec<(usize, f64, f64, usize)> {
        let mut layers: Vec<usize> = self
            .records
            .iter()
            .filter(|r| r.series == series)
            .map(|r| r.layers)
            .collect();
        layers.dedup();
        layers
            .into_iter()
            .map(|l| {
                let ok: Vec<&ExperimentRecord> = self
                    .records
                    .iter()
                    .filter(|r| r.series == series && r.layers == l && r.ok())
                    .collect();
                let k = ok.len() as f64;
                let val = ok.iter().map(|r| r.val_mse).sum::<f64>() / k;
                let test = ok.iter().map(|r| r.test_mse).sum::<f64>() / k;
                (l, val, test, ok.len())
            })
            .collect()
    }

    /// Depth with the lowest mean validation MSE; ties go to the shallower
    /// model.
    pub fn optimal_layers(&self, series: Series) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (l, val, _, count) in self.series_means(series) {
            if count == 0 {
                continue;
            }
            if best.is_none_or(|(_, b)| val < b) {
                best = Some((l, val));
            }
        }
        best.map(|(l, _)| l)
    }

    fn mark_optimal(&mut self) {
        for series in self.series_list() {
            if let Some(best) = self.optimal_layers(series) {
                for r in self.records.iter_mut().filter(|r| r.series == series) {
                    r.optimal = r.layers == best;
                }
            }
        }
    }

    pub const RESULTS_HEADER: &'static str =
        "series,kappa,drop_rate,layers,seed,val_mse,test_mse,gap_covariance,gap_laplacian,optimal,status";

    pub fn results_csv(&self) -> String {
        let mut out = format!("{}\n", Self::RESULTS_HEADER);
        for r in &self.records {
            let status = r.failure.as_deref().map_or("ok".to_string(), |e| {
                format!("\"failed: {}\"", e.replace('"', "'"))
            });
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.series.label(),
                format_f64(r.series.kappa()),
                format_f64(r.series.drop_rate().unwrap_or(0.0)),
                r.layers,
                r.seed,
                format_f64(r.val_mse),
                format_f64(r.test_mse),
                format_f64(r.gap_covariance),
                format_f64(r.gap_laplacian),
                r.optimal,
                status
            ));
        }
        out
    }

    /// One series per `kappa` (and per DropEdge rate): depth against mean
    /// validation and test MSE.
    pub fn plot_csv(&self) -> String {
        let mut out =
            String::from("series,kappa,drop_rate,layers,mean_val_mse,mean_test_mse,cells\n");
        for series in self.series_list() {
            for (l, val, test, count) in self.series_means(series) {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    series.label(),
                    format_f64(series.kappa()),
                    format_f64(series.drop_rate().unwrap_or(0.0)),
                    l,
                    format_f64(val),
                    format_f64(test),
                    count
                ));
            }
        }
        out
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        fs::create_dir_all(out_dir)?;
        fs::write(out_dir.join("results.csv"), self.results_csv())?;
        fs::write(out_dir.join("plot_data.csv"), self.plot_csv())?;
        Ok(())
    }
}

/// Learns one graph per `kappa`, trains every `(series, layers, seed)` cell,
/// flags the optimal depth per series and writes `results.csv` and
/// `plot_data.csv` into `out_dir`.
pub fn run_sweep(
    cfg: &SweepConfig,
    data: &SignalDataset,
    out_dir: &Path,
) -> Result<ExperimentResult> {
    let prepared = PreparedSweep::new(cfg, data)?;
    let mut result = ExperimentResult {
        records: prepared
            .cells()
            .into_iter()
            .map(|key| run_cell(&prepared, key))
            .collect(),
    };
    result.mark_optimal();
    result.write(out_dir)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{random_laplacian, synth_gmrf_ar, LaplacianSpec};

    fn small_data(seed: u64) -> SignalDataset {
        let l = random_laplacian(&LaplacianSpec::new(5), seed).unwrap();
        synth_gmrf_ar(&l, &Vector::from_element(5, 0.5), 80, 0.7, seed).unwrap()
    }

    fn tiny_cfg() -> SweepConfig {
        let mut cfg = SweepConfig::new(vec![1.0]);
        cfg.layers = [1, 1];
        cfg.feature_window = 3;
        cfg.train.epochs = 2;
        cfg.glasso.max_sweeps = 5;
        cfg
    }

    #[test]
    fn config_defaults_and_unknown_keys() {
        let cfg = SweepConfig::from_toml("kappas = [1.0, inf]").unwrap();
        assert_eq!(cfg.layers, [1, 9]);
        assert!(cfg.kappas[1].is_infinite());
        assert_eq!(SweepConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(SweepConfig::from_toml("kappas = [1.0]\nlayer = [1, 2]").is_err());
        assert!(SweepConfig::from_toml("kappas = [1.0]\n[train]\nepoch = 3").is_err());
        assert!(SweepConfig::from_toml("kappas = [1.0]\nlayers = [0, 3]").is_err());
        assert!(SweepConfig::from_toml("kappas = [1.0]\nsplit = [0.5, 0.2, 0.1]").is_err());
    }

    #[test]
    fn grid_shape() {
        let mut cfg = SweepConfig::new(vec![1.0, 3.0, 5.0, 7.0, 8.0]);
        cfg.seeds = vec![0, 1];
        cfg.dropedge = vec![0.3, 0.5];
        cfg.train.epochs = 0;
        let prepared =
            PreparedSweep::new(&cfg, &small_data(1).with_window(10, 0).unwrap()).unwrap();
        let cells = prepared.cells();
        assert_eq!(cells.len(), (5 + 2) * 9 * 2);
        let gap_cells = cells
            .iter()
            .filter(|c| matches!(c.series, Series::Gap { .. }))
            .count();
        assert_eq!(gap_cells, 45 * 2);
    }

    #[test]
    fn single_cell_sweep_writes_one_row() {
        let dir = tempfile::tempdir().unwrap();
        let result = run_sweep(&tiny_cfg(), &small_data(2), dir.path()).unwrap();
        assert_eq!(result.records.len(), 1);
        assert!(result.records[0].ok(), "{:?}", result.records[0].failure);
        assert!(result.records[0].optimal);
        let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(
            csv.lines().next().unwrap(),
            ExperimentResult::RESULTS_HEADER
        );
    }

    #[test]
    fn cells_are_reproducible_standalone() {
        let mut cfg = tiny_cfg();
        cfg.kappas = vec![0.5, f64::INFINITY];
        cfg.layers = [1, 2];
        cfg.seeds = vec![3, 4];
        let data = small_data(3);
        let dir = tempfile::tempdir().unwrap();
        let full = run_sweep(&cfg, &data, dir.path()).unwrap();
        let prepared = PreparedSweep::new(&cfg, &data).unwrap();
        for (key, record) in prepared.cells().into_iter().zip(&full.records).rev() {
            let alone = run_cell(&prepared, key);
            assert_eq!(alone.val_mse.to_bits(), record.val_mse.to_bits());
            assert_eq!(alone.test_mse.to_bits(), record.test_mse.to_bits());
        }
    }

    #[test]
    fn uncapped_gap_matches_measurement() {
        let data = small_data(4);
        let cfg = tiny_cfg();
        let (cov, u) = empirical_stats(&data, false).unwrap();
        let learned = learn_for_kappa(&cov, &u, f64::INFINITY, &cfg).unwrap();
        let values = crate::spectral_core::dense_eigen(&learned.output.covariance).values;
        let n = values.len();
        assert!(
            (learned.gap_covariance - (values[n - 1] - values[n - 2])).abs() < 1e-8 * values[n - 1]
        );
    }

    #[test]
    fn ties_prefer_fewer_layers() {
        let rec = |layers, val| ExperimentRecord {
            series: Series::Gap { kappa: 1.0 },
            layers,
            seed: 0,
            val_mse: val,
            test_mse: val,
            gap_covariance: 0.0,
            gap_laplacian: 0.0,
            optimal: false,
            failure: None,
        };
        let mut result = ExperimentResult {
            records: vec![rec(1, 0.5), rec(2, 0.2), rec(3, 0.2)],
        };
        result.mark_optimal();
        assert_eq!(result.optimal_layers(Series::Gap { kappa: 1.0 }), Some(2));
        assert_eq!(result.records.iter().filter(|r| r.optimal).count(), 1);
    }

    #[test]
    fn failed_learning_is_recorded_per_cell() {
        let mut cfg = tiny_cfg();
        cfg.centered = true;
        let data = SignalDataset::new(nalgebra::DMatrix::from_element(30, 4, 1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let result = run_sweep(&cfg, &data, dir.path()).unwrap();
        assert!(!result.records[0].ok());
        let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert!(csv.contains("failed: learn"));
    }
}
