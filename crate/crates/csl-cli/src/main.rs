//! `csl`: compressed subspace learning experiments from the command line.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 numerical degeneracy,
//! 4 internal invariant violation. Errors are reported as JSON on stderr.

#![allow(clippy::needless_range_loop)]

mod commands;
mod errors;
mod io;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{geometry::KindArg, FamilyArg};
use errors::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "csl",
    version,
    about = "Subspace learning on raw and randomly compressed data"
)]
struct Cli {
    /// Base seed; falls back to the config file's seed, then CSL_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled union-of-subspaces dataset.
    Synth {
        /// JSON config: {ambient_dim, dims, points_per_subspace, noise_sigma?, seed?}.
        #[arg(long)]
        config: PathBuf,
        /// Output data CSV (one point per row).
        #[arg(long)]
        out: PathBuf,
        /// Output labels file (one integer per line).
        #[arg(long)]
        labels: PathBuf,
        /// Also write generating bases to <prefix><label>.csv.
        #[arg(long)]
        bases_out: Option<String>,
    },
    /// Project every row of a dataset with one shared random projector.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        /// Input CSV has a header row.
        #[arg(long)]
        header: bool,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Target dimension n (must satisfy n < ambient dimension).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Binary output (not supported; fails with a clear message).
        #[arg(long)]
        binary: bool,
    },
    /// Canonical angles between the spans of two basis files.
    Angles {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        header: bool,
    },
    /// Distance between the spans of two basis files.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        header: bool,
    },
    /// Measure angle/distance distortion across projector draws.
    Capbench {
        /// JSON config: {ambient_dim, dims, prescribed_angles?, family,
        /// target_dims, trials, seed?, estimate_constants?, constants_target_eps?}.
        #[arg(long)]
        config: PathBuf,
        /// Also dump every raw (original, projected) measurement.
        #[arg(long)]
        raw_csv: Option<PathBuf>,
    },
    /// Embed labeled data by dissimilarity + classical MDS.
    Visualize {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Optional JSON config: {u?, v?, out_dim?, seed?}.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Basis files at <prefix><label>.csv (e.g. from synth --bases-out).
        #[arg(long)]
        bases: Option<String>,
        /// Estimate a basis of this dimension per label from the data.
        #[arg(long)]
        estimate_dim: Option<usize>,
        /// Weight of the min-subspace-angle term for cross-label pairs.
        #[arg(long)]
        u: Option<f64>,
        /// Weight of the pairwise-angle term for cross-label pairs.
        #[arg(long)]
        v: Option<f64>,
        /// Embedding dimension, 2 or 3.
        #[arg(long)]
        out_dim: Option<usize>,
        /// Compress first with this projector family (requires --n).
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Compression target dimension (requires --family).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        coords_out: PathBuf,
        /// Minimal SVG scatter of the embedding.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        header: bool,
    },
    /// Monte-Carlo error rate of the ML subspace detector.
    Detect {
        /// JSON config: {ambient_dim, dim, num_subspaces, bank, trials,
        /// noise_sigma?, family?, target_dim?, seed?}.
        #[arg(long)]
        config: PathBuf,
    },
    /// Sparse subspace clustering with optional compression.
    Cluster {
        #[arg(long)]
        data: PathBuf,
        /// Ground-truth labels; enables the error-rate metric.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// JSON config: {clusters, k_max, residual_tol?, seed?}.
        #[arg(long)]
        config: PathBuf,
        /// Repeat over this many derived seeds; the reported error is the median.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        n: Option<usize>,
        /// Write the first seed's predicted labels.
        #[arg(long)]
        labels_out: Option<PathBuf>,
        /// Minimal SVG scatter of the first two data columns by predicted label.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        header: bool,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::validation("bad-config", "--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Synth {
            config,
            out,
            labels,
            bases_out,
        } => commands::synth::run(&config, &out, &labels, bases_out.as_deref(), seed),
        Command::Project {
            input,
            header,
            family,
            n,
            out,
            binary,
        } => commands::project::run(&input, header, family, n, &out, binary, seed),
        Command::Angles { a, b, header } => commands::geometry::run_angles(&a, &b, header),
        Command::Distance { a, b, kind, header } => {
            commands::geometry::run_distance(&a, &b, kind, header)
        }
        Command::Capbench { config, raw_csv } => {
            commands::capbench::run(&config, raw_csv.as_deref(), seed)
        }
        Command::Visualize {
            data,
            labels,
            config,
            bases,
            estimate_dim,
            u,
            v,
            out_dim,
            family,
            n,
            coords_out,
            svg,
            header,
        } => commands::visualize::run(commands::visualize::VisualizeArgs {
            data: &data,
            labels: &labels,
            config: config.as_deref(),
            bases_prefix: bases.as_deref(),
            estimate_dim,
            u,
            v,
            out_dim,
            family: family.map(FamilyArg::to_core),
            target_dim: n,
            coords_out: &coords_out,
            svg_out: svg.as_deref(),
            header,
            seed_flag: seed,
        }),
        Command::Detect { config } => commands::detect::run(&config, seed),
        Command::Cluster {
            data,
            labels,
            config,
            seeds,
            family,
            n,
            labels_out,
            svg,
            header,
        } => commands::cluster::run(commands::cluster::ClusterArgs {
            data: &data,
            labels: labels.as_deref(),
            config: &config,
            seeds,
            family: family.map(FamilyArg::to_core),
            target_dim: n,
            labels_out: labels_out.as_deref(),
            svg_out: svg.as_deref(),
            header,
            seed_flag: seed,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
