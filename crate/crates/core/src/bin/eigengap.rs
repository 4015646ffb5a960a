use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eigengap::eigen_projection::DirectionSolver;
use eigengap::pipeline::commands::{
    self, GcnTrainArgs, LearnArgs, ProjectArgs, SweepArgs, SynthArgs,
};

#[derive(Parser)]
#[command(
    version,
    about = "Graph learning with a capped eigen-gap, and GCN depth experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a Laplacian from a signals CSV (rows = time steps).
    Learn {
        signals: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        rho: f64,
        /// Eigen-gap cap; `inf` disables it.
        #[arg(long, default_value_t = f64::INFINITY)]
        kappa: f64,
        #[arg(long)]
        centered: bool,
        /// Seed of the 70/20/10 split.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        header: bool,
        /// Also write the graph export (edges, self-loops, spectrum of P).
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Project a covariance CSV onto the capped-gap set with first eigenvector u.
    Project {
        covariance: PathBuf,
        /// Whitespace or comma separated vector file.
        u: PathBuf,
        #[arg(long)]
        kappa: f64,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        solver: SolverArg,
    },
    /// Train a GCN on a learned Laplacian and write the loss trace.
    GcnTrain {
        laplacian: PathBuf,
        signals: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long)]
        dropedge: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long)]
        header: bool,
        /// Write the over-smoothing report for the trained model.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a (kappa x layers) sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        signals: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        header: bool,
    },
    /// Generate synthetic GMRF signals on a random sparse graph.
    Synth {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
        /// Write the ground-truth Laplacian here.
        #[arg(long)]
        laplacian: Option<PathBuf>,
        #[arg(long)]
        extra_edges: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        mean: f64,
        /// AR(1) coefficient between consecutive rows.
        #[arg(long, default_value_t = 0.0)]
        ar: f64,
        /// Standard deviation of i.i.d. measurement noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SolverArg {
    Auto,
    Exact,
    ProxGrad,
}

impl From<SolverArg> for DirectionSolver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => DirectionSolver::Auto,
            SolverArg::Exact => DirectionSolver::Exact,
            SolverArg::ProxGrad => DirectionSolver::ProxGrad,
        }
    }
}

fn run(command: Command) -> eigengap::Result<()> {
    match command {
        Command::Learn {
            signals,
            out,
            rho,
            kappa,
            centered,
            seed,
            header,
            graph,
        } => {
            let file = commands::learn(&LearnArgs {
                signals,
                header,
                out,
                rho,
                kappa,
                centered,
                seed,
                graph,
            })?;
            println!(
                "sweeps={} converged={} gap_covariance={:e} gap_laplacian={:e}",
                file.sweeps, file.converged, file.gap_covariance, file.gap_laplacian
            );
        }
        Command::Project {
            covariance,
            u,
            kappa,
            out,
            solver,
        } => {
            let gap = commands::project_file(&ProjectArgs {
                covariance,
                u,
                kappa,
                solver: solver.into(),
                out,
            })?;
            println!("gap={gap:e}");
        }
        Command::GcnTrain {
            laplacian,
            signals,
            out,
            layers,
            dropedge,
            seed,
            epochs,
            window,
            header,
            report,
        } => {
            let (val, test) = commands::gcn_train(&GcnTrainArgs {
                header,
                layers,
                dropedge,
                seed,
                epochs,
                window,
                report,
                ..GcnTrainArgs::new(laplacian, signals, out)
            })?;
            println!("val_mse={val:e} test_mse={test:e}");
        }
        Command::Sweep {
            config,
            signals,
            out_dir,
            header,
        } => {
            let result = commands::sweep(&SweepArgs {
                config,
                signals,
                header,
                out_dir,
            })?;
            let failed = result.records.iter().filter(|r| !r.ok()).count();
            println!("cells={} failed={failed}", result.records.len());
        }
        Command::Synth {
            nodes,
            samples,
            seed,
            out,
            laplacian,
            extra_edges,
            mean,
            ar,
            noise,
        } => commands::synth(&SynthArgs {
            laplacian,
            extra_edges,
            mean,
            ar,
            noise,
            ..SynthArgs::new(nodes, samples, seed, out)
        })?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
