//! The operations behind each CLI subcommand. Each returns the paths or
//! values it produced so callers other than the binary can use them too.

use std::path::PathBuf;

use crate::eigen_projection::{project, DirectionSolver, ProjectionConfig};
use crate::error::{Error, Result};
use crate::gcn_lab::{
    evaluate, oversmoothing_check, train, write_loss_trace, GcnModel, TrainConfig,
};
use crate::glasso::{glasso_learn, GlassoConfig, LaplacianFile};
use crate::graph_model::{
    build_operator, laplacian_to_graph, measure_eigengap, write_graph_export, EdgeMode,
    DEFAULT_DISTINCT_TOL,
};
use crate::spectral_core::{read_matrix_csv, read_vector_file, write_matrix_csv, Vector};

use super::{
    add_observation_noise, empirical_stats, load_signals_csv, random_laplacian, run_sweep, split,
    synth_gmrf_ar, ExperimentResult, LaplacianSpec, SweepConfig, DEFAULT_FEATURE_WINDOW,
    DEFAULT_SPLIT,
};

#[derive(Clone, Debug)]
pub struct LearnArgs {
    pub signals: PathBuf,
    pub header: bool,
    pub out: PathBuf,
    pub rho: f64,
    pub kappa: f64,
    pub centered: bool,
    /// Seed of the train/validation/test split; only training rows are used.
    pub seed: u64,
    pub graph: Option<PathBuf>,
}

pub fn learn(args: &LearnArgs) -> Result<LaplacianFile> {
    let data = load_signals_csv(&args.signals, args.header)?;
    let parts = split(data.t(), &DEFAULT_SPLIT, args.seed)?;
    let (cov, u) = empirical_stats(&data.select_rows(&parts.train)?, args.centered)?;
    let out = glasso_learn(
        &cov,
        &u,
        &ProjectionConfig::new(args.kappa),
        &GlassoConfig::with_rho(args.rho),
    )?;
    if let Some(msg) = &out.failure {
        eprintln!("warning: alternation stopped early: {msg}");
    }
    let file = LaplacianFile {
        gap_laplacian: measure_eigengap(&out.laplacian, DEFAULT_DISTINCT_TOL)?,
        gap_covariance: out.decomp.gap(),
        laplacian: out.laplacian,
        kappa: args.kappa,
        rho: args.rho,
        u,
        converged: out.converged,
        sweeps: out.sweeps.len(),
    };
    file.write(&args.out)?;
    if let Some(path) = &args.graph {
        let g = laplacian_to_graph(&file.laplacian, EdgeMode::Clamp);
        write_graph_export(path, &g, &build_operator(&g)?)?;
    }
    Ok(file)
}

#[derive(Clone, Debug)]
pub struct ProjectArgs {
    pub covariance: PathBuf,
    pub u: PathBuf,
    pub kappa: f64,
    pub solver: DirectionSolver,
    pub out: PathBuf,
}

/// Returns the achieved gap `lambda_N - lambda_{N-1}`.
pub fn project_file(args: &ProjectArgs) -> Result<f64> {
    let cov = read_matrix_csv(&args.covariance)?;
    let u: Vector = read_vector_file(&args.u)?;
    let (c, decomp) = project(
        &cov,
        &u,
        &ProjectionConfig::new(args.kappa).with_solver(args.solver),
    )?;
    write_matrix_csv(&args.out, &c)?;
    Ok(decomp.gap())
}

#[derive(Clone, Debug)]
pub struct GcnTrainArgs {
    pub laplacian: PathBuf,
    pub signals: PathBuf,
    pub header: bool,
    pub out: PathBuf,
    pub layers: usize,
    pub dropedge: Option<f64>,
    pub seed: u64,
    pub epochs: usize,
    pub window: usize,
    pub report: Option<PathBuf>,
}

impl GcnTrainArgs {
    pub fn new(laplacian: PathBuf, signals: PathBuf, out: PathBuf) -> Self {
        GcnTrainArgs {
            laplacian,
            signals,
            header: false,
            out,
            layers: 2,
            dropedge: None,
            seed: 0,
            epochs: TrainConfig::default().epochs,
            window: DEFAULT_FEATURE_WINDOW,
            report: None,
        }
    }
}

/// Trains on the 70% split and returns `(validation MSE, test MSE)`.
pub fn gcn_train(args: &GcnTrainArgs) -> Result<(f64, f64)> {
    let file = LaplacianFile::read(&args.laplacian)?;
    let data = load_signals_csv(&args.signals, args.header)?.with_window(args.window, 0)?;
    if data.n() != file.n() {
        return Err(Error::DimensionMismatch {
            expected: file.n(),
            found: data.n(),
        });
    }
    let graph = laplacian_to_graph(&file.laplacian, EdgeMode::Clamp);
    let op = build_operator(&graph)?;
    let parts = split(data.t(), &DEFAULT_SPLIT, args.seed)?;
    let train_set = data.supervised(&parts.train);
    let model = GcnModel::new(args.layers, args.window, args.seed)?;
    let cfg = TrainConfig {
        epochs: args.epochs,
        seed: args.seed,
        dropedge: args.dropedge,
        ..TrainConfig::default()
    };
    let outcome = train(model, &graph, &train_set, &cfg)?;
    write_loss_trace(&args.out, &outcome.losses)?;
    if let Some(path) = &args.report {
        let x0 = train_set
            .inputs
            .first()
            .ok_or(Error::Empty("training set"))?;
        oversmoothing_check(&outcome.model, &op, x0)?.write(path)?;
    }
    let val = evaluate(&outcome.model, &op.p, &data.supervised(&parts.val))?;
    let test = evaluate(&outcome.model, &op.p, &data.supervised(&parts.test))?;
    Ok((val, test))
}

#[derive(Clone, Debug)]
pub struct SweepArgs {
    pub config: PathBuf,
    pub signals: PathBuf,
    pub header: bool,
    pub out_dir: PathBuf,
}

pub fn sweep(args: &SweepArgs) -> Result<ExperimentResult> {
    let cfg = SweepConfig::read(&args.config)?;
    let data = load_signals_csv(&args.signals, args.header)?;
    run_sweep(&cfg, &data, &args.out_dir)
}

#[derive(Clone, Debug)]
pub struct SynthArgs {
    pub nodes: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Where to write the ground-truth Laplacian (matrix CSV).
    pub laplacian: Option<PathBuf>,
    pub extra_edges: Option<usize>,
    pub mean: f64,
    pub ar: f64,
    pub noise: f64,
}

impl SynthArgs {
    pub fn new(nodes: usize, samples: usize, seed: u64, out: PathBuf) -> Self {
        SynthArgs {
            nodes,
            samples,
            seed,
            out,
            laplacian: None,
            extra_edges: None,
            mean: 0.5,
            ar: 0.0,
            noise: 0.0,
        }
    }
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let mut spec = LaplacianSpec::new(args.nodes);
    if let Some(k) = args.extra_edges {
        spec.extra_edges = k;
    }
    let l = random_laplacian(&spec, args.seed)?;
    let mean = Vector::from_element(args.nodes, args.mean);
    let mut data = synth_gmrf_ar(&l, &mean, args.samples, args.ar, args.seed)?;
    if args.noise > 0.0 {
        data = add_observation_noise(&data, args.noise, args.seed.wrapping_add(1))?;
    }
    data.write_csv(&args.out)?;
    if let Some(path) = &args.laplacian {
        write_matrix_csv(path, &l)?;
    }
    Ok(())
}
