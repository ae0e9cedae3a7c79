//! Command-line driver. Exit codes: 0 success, 1 infeasible result,
//! 2 non-convergence, 64 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{gen_translating_shapes, load_labels, load_points, save_matrix_csv, Shape, SyntheticSpec};
use crate::error::{EmbedError, Result};
use crate::eval::{knn_classify, pca_min_measurements, KnnResult};
use crate::fromax::FroMaxConfig;
use crate::meta::{column_generation, rank_adjust, ColumnGenConfig, PairSecants, RankAdjustConfig, RankStep, SecantPool};
use crate::nilepro::NileProConfig;
use crate::numax::NuMaxConfig;
use crate::secant::{build_secant_set, distortion_report, DataMatrix, EmbeddingMatrix, DEFAULT_MIN_NORM};
use crate::solver::{Algorithm, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "isoembed", version, about = "Near-isometric low-rank linear embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate translating-shape images as a CSV point matrix.
    Synth(SynthArgs),
    /// Learn an embedding.
    Fit(FitArgs),
    /// Audit an embedding against the full secant set of a dataset.
    Eval(EvalArgs),
    /// Nearest-neighbor classification, raw or embedded.
    Knn(KnnArgs),
    /// Measurements needed per distortion level, with a PCA baseline.
    Sweep(SweepArgs),
    /// Extract a labeled subset of an IDX image/label pair to CSV.
    Subset(SubsetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Fromax,
    Nilepro,
    Numax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Square,
    Disk,
    Mixed,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Square => Shape::Square,
            ShapeArg::Disk => Shape::Disk,
            ShapeArg::Mixed => Shape::Mixed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid: u64,
    #[arg(long, value_enum)]
    pub shape: ShapeArg,
    /// Side or diameter in pixels; defaults depend on the grid.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub size: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Solver parameters shared by `fit` and `sweep`. Unset values keep the
/// solver defaults.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: Option<u64>,
}

impl SolverArgs {
    pub fn config(&self, delta: f64, rank: usize) -> SolverConfig {
        match self.algo {
            AlgoArg::Fromax => {
                let mut c = FroMaxConfig::new(delta, rank);
                c.seed = self.seed;
                if let Some(v) = self.beta1 {
                    c.beta1 = v;
                }
                if let Some(v) = self.beta2 {
                    c.beta2 = v;
                }
                if let Some(v) = self.eta {
                    c.eta = v;
                }
                if let Some(v) = self.eps {
                    c.epsilon = v;
                }
                if let Some(v) = self.max_iters {
                    c.max_iters = v as usize;
                }
                SolverConfig::FroMax(c)
            }
            AlgoArg::Nilepro => {
                let mut c = NileProConfig::new(delta, rank);
                c.seed = self.seed;
                if let Some(v) = self.beta {
                    c.beta = v;
                }
                c.eta = self.eta;
                c.epsilon = self.eps;
                if let Some(v) = self.max_iters {
                    c.max_iters = v as usize;
                }
                SolverConfig::NilePro(c)
            }
            AlgoArg::Numax => {
                let mut c = NuMaxConfig::new(delta);
                if let Some(v) = self.beta1 {
                    c.beta1 = v;
                }
                if let Some(v) = self.beta2 {
                    c.beta2 = v;
                }
                if let Some(v) = self.eta {
                    c.eta = v;
                }
                if let Some(v) = self.eps {
                    c.epsilon = v;
                }
                if let Some(v) = self.max_iters {
                    c.max_iters = v as usize;
                }
                SolverConfig::NuMax(c)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV (one point per row) or IDX image file.
    #[arg(long)]
    pub data: PathBuf,
    /// Pool IDX images to SIDE×SIDE.
    #[arg(long)]
    pub side: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub rank: Option<u64>,
    /// Rank adjustment starting from --r0.
    #[arg(long)]
    pub ra: bool,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub r0: u64,
    /// Maximum number of solves during rank adjustment.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub ra_max: Option<u64>,
    /// Column generation over the point-pair secants.
    #[arg(long)]
    pub cg: bool,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch: u64,
    /// Initial subset size for column generation; defaults to --batch.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub s0: Option<u64>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: u64,
    /// Embedding output (CSV, one row per measurement).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON run report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub psi: PathBuf,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub train_labels: PathBuf,
    /// Defaults to the training set, with self-matches excluded.
    #[arg(long, requires = "test_labels")]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub test_labels: Option<PathBuf>,
    #[arg(long)]
    pub psi: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<f64>,
    /// Rank adjustment per δ (ignored for numax, whose rank is an output).
    #[arg(long)]
    pub ra: bool,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub r0: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub rank: Option<u64>,
    /// Run the per-δ solves in parallel.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SubsetArgs {
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub digit: Option<u32>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    pub points: usize,
    pub dim: usize,
    pub secants: usize,
    pub skipped_pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnGenInfo {
    pub rounds: usize,
    pub active_set_size: usize,
    pub violators_remaining: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub algorithm: Algorithm,
    pub pipeline: &'static str,
    pub delta: f64,
    pub rank: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Recomputed on the full secant set.
    pub max_distortion: f64,
    pub feasible: bool,
    pub wall_time_s: f64,
    pub seed: u64,
    pub parameters: SolverConfig,
    pub dataset: DatasetInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_trace: Option<Vec<RankStep>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_generation: Option<ColumnGenInfo>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if !self.converged {
            EXIT_NOT_CONVERGED
        } else if !self.feasible {
            EXIT_INFEASIBLE
        } else {
            EXIT_OK
        }
    }
}

/// Options of a single learning run.
#[derive(Debug, Clone)]
pub struct FitPlan {
    pub solver: SolverConfig,
    pub pipeline: Pipeline,
}

#[derive(Debug, Clone)]
pub enum Pipeline {
    Plain,
    RankAdjust { r0: usize, max_outer: usize },
    ColumnGen { s0: usize, batch: usize, max_rounds: usize },
}

/// Runs a plan on a dataset. Wall time covers the solver work only; the
/// reported distortion is recomputed over every secant of the dataset.
pub fn run_fit(data: &DataMatrix, path: &str, plan: &FitPlan) -> Result<(EmbeddingMatrix, RunReport)> {
    let delta = plan.solver.delta();
    let tol = match plan.solver.algorithm() {
        Algorithm::NuMax => 1e-4,
        _ => 1e-6,
    };
    let mut rank_trace = None;
    let mut cg_info = None;
    let (psi, iterations, converged, dataset, full_max, wall, name);
    match &plan.pipeline {
        Pipeline::ColumnGen { s0, batch, max_rounds } => {
            name = "cg";
            let pool = PairSecants::new(data, DEFAULT_MIN_NORM)?;
            let cfg = ColumnGenConfig {
                initial_subset_size: *s0,
                batch_size: *batch,
                max_rounds: *max_rounds,
                solver: plan.solver.clone(),
                seed: plan.solver.seed(),
            };
            let start = Instant::now();
            let out = column_generation(&pool, &cfg)?;
            wall = start.elapsed().as_secs_f64();
            let all: Vec<usize> = (0..pool.len()).collect();
            full_max = pool.distortions(&out.embedding, &all).into_iter().fold(0.0, f64::max);
            dataset = DatasetInfo {
                path: path.to_string(),
                points: data.len(),
                dim: data.dim(),
                secants: pool.len(),
                skipped_pairs: pool.skipped_pairs(),
            };
            cg_info = Some(ColumnGenInfo {
                rounds: out.rounds,
                active_set_size: out.active.len(),
                violators_remaining: out.violators_remaining,
            });
            iterations = out.solver_iterations;
            converged = out.converged;
            psi = out.embedding;
        }
        pipeline => {
            let secants = build_secant_set(data, DEFAULT_MIN_NORM)?;
            dataset = DatasetInfo {
                path: path.to_string(),
                points: data.len(),
                dim: data.dim(),
                secants: secants.len(),
                skipped_pairs: secants.skipped_pairs(),
            };
            let start = Instant::now();
            match pipeline {
                Pipeline::RankAdjust { r0, max_outer } => {
                    name = "ra";
                    let out = rank_adjust(
                        &secants,
                        &RankAdjustConfig {
                            initial_rank: *r0,
                            max_outer_iters: *max_outer,
                            solver: plan.solver.clone(),
                        },
                    )?;
                    wall = start.elapsed().as_secs_f64();
                    iterations = out.total_iterations();
                    converged = true;
                    rank_trace = Some(out.trace);
                    psi = out.embedding;
                }
                _ => {
                    name = "plain";
                    let out = plan.solver.solve(&secants, None)?;
                    wall = start.elapsed().as_secs_f64();
                    iterations = out.iterations;
                    converged = out.converged;
                    psi = out.embedding;
                }
            }
            full_max = distortion_report(&psi, &secants, delta)?.max_distortion;
        }
    }
    let report = RunReport {
        schema: REPORT_SCHEMA,
        algorithm: plan.solver.algorithm(),
        pipeline: name,
        delta,
        rank: psi.rank(),
        iterations,
        converged,
        max_distortion: full_max,
        feasible: full_max <= delta + tol,
        wall_time_s: wall,
        seed: plan.solver.seed(),
        parameters: plan.solver.clone(),
        dataset,
        rank_trace,
        column_generation: cg_info,
    };
    Ok((psi, report))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| EmbedError::Format(e.to_string()))?;
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn load_data(args: &DataArgs) -> Result<DataMatrix> {
    load_points(&args.data, args.side)
}

fn cmd_synth(args: &SynthArgs) -> Result<i32> {
    let mut spec = SyntheticSpec::new(args.grid as usize, args.shape.into(), args.count as usize, args.seed);
    if let Some(s) = args.size {
        spec.shape_size = s as usize;
    }
    if let Err(e) = spec.validate() {
        return Ok(usage(e));
    }
    let data = gen_translating_shapes(&spec)?;
    save_matrix_csv(&data.to_row_points(), &args.out)?;
    Ok(EXIT_OK)
}

fn cmd_fit(args: &FitArgs) -> Result<i32> {
    if !(args.delta > 0.0) {
        return Ok(usage("--delta must be positive"));
    }
    if args.ra && args.cg {
        return Ok(usage("--ra and --cg cannot be combined"));
    }
    let fixed_rank = args.solver.algo != AlgoArg::Numax;
    if args.ra && !fixed_rank {
        return Ok(usage("--ra needs --algo fromax or nilepro"));
    }
    let rank = match (args.rank, args.ra) {
        (Some(r), _) => r as usize,
        (None, true) => args.r0 as usize,
        (None, false) if !fixed_rank => 1,
        (None, false) => return Ok(usage("--rank is required unless --ra is given")),
    };
    let data = load_data(&args.data)?;
    if fixed_rank && rank > data.dim() {
        return Ok(usage(format!("rank {rank} exceeds the data dimension {}", data.dim())));
    }
    let solver = args.solver.config(args.delta, rank);
    let pipeline = if args.ra {
        Pipeline::RankAdjust {
            r0: args.r0 as usize,
            max_outer: args.ra_max.map(|m| m as usize).unwrap_or(args.r0 as usize),
        }
    } else if args.cg {
        Pipeline::ColumnGen {
            s0: args.s0.unwrap_or(args.batch) as usize,
            batch: args.batch as usize,
            max_rounds: args.max_rounds as usize,
        }
    } else {
        Pipeline::Plain
    };
    let path = args.data.data.display().to_string();
    let (psi, report) = match run_fit(&data, &path, &FitPlan { solver, pipeline }) {
        Ok(v) => v,
        Err(e @ (EmbedError::InitialRankTooSmall { .. } | EmbedError::Diverged { .. })) => {
            eprintln!("error: {e}");
            return Ok(EXIT_NOT_CONVERGED);
        }
        Err(EmbedError::InvalidInput(msg)) => return Ok(usage(msg)),
        Err(e) => return Err(e),
    };
    if let Some(out) = &args.out {
        save_matrix_csv(psi.matrix(), out)?;
    }
    write_json(&report, args.report.as_deref())?;
    Ok(report.exit_code())
}

#[derive(Debug, Serialize)]
struct EvalReport {
    schema: u32,
    delta: f64,
    max_distortion: f64,
    feasible: bool,
    secants: usize,
    active_indices: Vec<usize>,
    per_secant: Vec<f64>,
}

fn cmd_eval(args: &EvalArgs) -> Result<i32> {
    let data = load_data(&args.data)?;
    let psi = EmbeddingMatrix::new(crate::data::load_matrix_csv(&args.psi)?)?;
    if psi.dim() != data.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: data.dim(),
            got: psi.dim(),
        });
    }
    let secants = build_secant_set(&data, DEFAULT_MIN_NORM)?;
    let rep = distortion_report(&psi, &secants, args.delta)?;
    let feasible = rep.max_distortion <= args.delta;
    write_json(
        &EvalReport {
            schema: REPORT_SCHEMA,
            delta: args.delta,
            max_distortion: rep.max_distortion,
            feasible,
            secants: secants.len(),
            active_indices: rep.active_indices,
            per_secant: rep.per_secant,
        },
        args.report.as_deref(),
    )?;
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

#[derive(Debug, Serialize)]
struct KnnReport {
    schema: u32,
    #[serde(flatten)]
    result: KnnResult,
    train_points: usize,
    test_points: usize,
    embedded: bool,
}

fn cmd_knn(args: &KnnArgs) -> Result<i32> {
    let train = load_points(&args.train, args.side)?;
    let train_labels = load_labels(&args.train_labels)?;
    let psi = match &args.psi {
        Some(p) => Some(EmbeddingMatrix::new(crate::data::load_matrix_csv(p)?)?),
        None => None,
    };
    let k = args.k as usize;
    let (result, test_points) = match (&args.test, &args.test_labels) {
        (Some(t), Some(l)) => {
            let test = load_points(t, args.side)?;
            let labels = load_labels(l)?;
            (knn_classify(&train, &train_labels, &test, &labels, k, psi.as_ref())?, test.len())
        }
        _ => (
            knn_classify(&train, &train_labels, &train, &train_labels, k, psi.as_ref())?,
            train.len(),
        ),
    };
    write_json(
        &KnnReport {
            schema: REPORT_SCHEMA,
            result,
            train_points: train.len(),
            test_points,
            embedded: psi.is_some(),
        },
        args.report.as_deref(),
    )?;
    Ok(EXIT_OK)
}

/// One row of a sweep: measurements found by the solver (`None` on failure)
/// and the PCA baseline.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub measurements: Option<usize>,
    pub pca: usize,
    pub status: String,
}

pub fn run_sweep(data: &DataMatrix, solver: &SolverArgs, deltas: &[f64], ra: bool, r0: usize, rank: Option<usize>, parallel: bool) -> Result<Vec<SweepRow>> {
    let secants = build_secant_set(data, DEFAULT_MIN_NORM)?;
    let one = |&delta: &f64| -> Result<SweepRow> {
        let pca = pca_min_measurements(data, &secants, delta)?;
        let cfg = solver.config(delta, rank.unwrap_or(r0));
        let outcome = if ra && cfg.rank().is_some() {
            rank_adjust(
                &secants,
                &RankAdjustConfig {
                    initial_rank: r0,
                    max_outer_iters: r0,
                    solver: cfg,
                },
            )
            .map(|o| (o.final_rank, true))
        } else {
            cfg.solve(&secants, None).map(|s| (s.embedding.rank(), s.converged))
        };
        Ok(match outcome {
            Ok((m, true)) => SweepRow {
                delta,
                measurements: Some(m),
                pca,
                status: "ok".into(),
            },
            Ok((_, false)) => SweepRow {
                delta,
                measurements: None,
                pca,
                status: "not_converged".into(),
            },
            Err(e) => SweepRow {
                delta,
                measurements: None,
                pca,
                status: format!("error: {e}").replace(',', ";"),
            },
        })
    };
    if parallel {
        deltas.par_iter().map(one).collect()
    } else {
        deltas.iter().map(one).collect()
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| EmbedError::Format(e.to_string());
    w.write_record(["delta", "measurements", "pca", "status"]).map_err(err)?;
    for r in rows {
        let m = r.measurements.map(|m| m.to_string()).unwrap_or_else(|| "NA".into());
        w.write_record([r.delta.to_string(), m, r.pca.to_string(), r.status.clone()])
            .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    if args.deltas.iter().any(|d| !(*d > 0.0)) {
        return Ok(usage("every delta must be positive"));
    }
    if !args.ra && args.rank.is_none() && args.solver.algo != AlgoArg::Numax {
        return Ok(usage("--rank is required unless --ra is given"));
    }
    let data = load_data(&args.data)?;
    let rows = run_sweep(
        &data,
        &args.solver,
        &args.deltas,
        args.ra,
        args.r0 as usize,
        args.rank.map(|r| r as usize),
        args.parallel,
    )?;
    write_sweep_csv(&rows, BufWriter::new(File::create(&args.out)?))?;
    Ok(if rows.iter().all(|r| r.measurements.is_some()) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_subset(args: &SubsetArgs) -> Result<i32> {
    let images = crate::data::load_idx(&args.images)?;
    let labels = crate::data::load_idx(&args.labels)?;
    let (data, picked) = crate::data::mnist_subset(&images, &labels, args.digit, args.count, args.side, args.seed)?;
    save_matrix_csv(&data.to_row_points(), &args.out)?;
    if let Some(p) = &args.labels_out {
        let col = nalgebra::DMatrix::from_iterator(picked.len(), 1, picked.iter().map(|&l| l as f64));
        save_matrix_csv(&col, p)?;
    }
    Ok(EXIT_OK)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Knn(a) => cmd_knn(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Subset(a) => cmd_subset(a),
    }
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e @ EmbedError::InvalidInput(_)) => usage(e),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INFEASIBLE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_zero_is_a_usage_error() {
        let code = run(["isoembed", "fit", "--data", "x.csv", "--algo", "fromax", "--delta", "0.1", "--rank", "0"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn unknown_shape_is_a_usage_error() {
        let code = run(["isoembed", "synth", "--grid", "7", "--shape", "hexagon", "--count", "3", "--out", "x.csv"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn sweep_csv_marks_failures() {
        let rows = vec![
            SweepRow {
                delta: 0.4,
                measurements: Some(5),
                pca: 9,
                status: "ok".into(),
            },
            SweepRow {
                delta: 0.1,
                measurements: None,
                pca: 20,
                status: "not_converged".into(),
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "delta,measurements,pca,status\n0.4,5,9,ok\n0.1,NA,20,not_converged\n");
    }
}
