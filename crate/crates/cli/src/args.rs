use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "modcat",
    version,
    about = "Dimension searches for integral modular categories"
)]
pub struct Cli {
    /// Worker threads; 0 lets the pool pick.
    #[arg(long, global = true, env = "MODCAT_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Zero all timestamps and timings so reruns are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the per-position search bounds for a rank.
    Bounds(BoundsArgs),
    /// Square-constrained Egyptian fraction decompositions of 1.
    Search(SearchArgs),
    /// Odd-dimensional search with paired dimensions.
    Mnsd(MnsdArgs),
    /// Annotate search output with filter verdicts.
    Filter(FilterArgs),
    /// Multiplicity scan over small dimension sets.
    Scan(ScanArgs),
    /// Count unconstrained Egyptian fraction decompositions of 1.
    Count(CountArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub rank: u32,
    /// Weight of the repeated terms; the rank must be 1 mod ell.
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// JSON Lines with a manifest header.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Comma-separated table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub rank: u32,
    /// Upper bound on the global dimension.
    #[arg(long, value_name = "D")]
    pub dim_cap: Option<String>,
    /// Write solutions as they are found; record order then depends on scheduling.
    #[arg(long)]
    pub stream: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct MnsdArgs {
    /// Odd rank.
    #[arg(long)]
    pub rank: u32,
    /// Upper bound on the global dimension.
    #[arg(long, value_name = "D")]
    pub dim_cap: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    /// JSON Lines produced by `search` or `mnsd`.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Rule table in TOML; the built-in table is used when absent.
    #[arg(long, value_name = "FILE")]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// Smallest rank scanned.
    #[arg(long, default_value_t = 13)]
    pub r_min: u32,
    /// Largest rank scanned.
    #[arg(long, default_value_t = 23)]
    pub r_max: u32,
    /// Largest non-unit dimension considered.
    #[arg(long, default_value_t = 45)]
    pub d_max: u64,
    /// Maximum number of distinct dimensions, the unit included.
    #[arg(long, default_value_t = 6)]
    pub t_max: usize,
    /// Odd-dimensional mode: odd dimensions, paired multiplicities.
    #[arg(long)]
    pub mnsd: bool,
    /// Report every profile, not only survivors.
    #[arg(long)]
    pub all: bool,
    /// Rule table in TOML; the built-in table is used when absent.
    #[arg(long, value_name = "FILE")]
    pub rules: Option<PathBuf>,
    /// Append-only checkpoint; completed dimension sets are not recomputed.
    #[arg(long, value_name = "FILE")]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub rank: u32,
    /// JSON Lines with a manifest header.
    #[arg(long)]
    pub json: bool,
}
