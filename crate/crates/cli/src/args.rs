//! Command-line arguments. Every struct here is echoed into the report's
//! `config` field.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ortho_lens::independence::Axiom;
use serde::{Serialize, Serializer};

use crate::format::TableFormat;

#[derive(Debug, Parser)]
#[command(name = "ortho-lens", version, about = "Partial orthogonality analyses of embedding tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized generalized Markov boundary search.
    Gmb(GmbArgs),
    /// Exact Markov boundary enumeration (tables of at most 20 rows).
    MbExact(MbExactArgs),
    /// Category-by-category reduction of cosine similarity after conditioning.
    ConditionMatrix(ConditionArgs),
    /// Nearest neighbors before and after projecting out random subspaces.
    Rank(RankArgs),
    /// Principal angles between two spans, against a random baseline.
    Angles(AnglesArgs),
    /// Randomized check of the graphoid axioms under partial orthogonality.
    Axioms(AxiomsArgs),
    /// Build an independence-preserving embedding from a graph.
    IpeBuild(IpeBuildArgs),
    /// Compare an embedding's partial orthogonalities with graph separation.
    IpeCheck(IpeCheckArgs),
    /// Random-projection reduction of an embedding and its residual bound.
    IpeReduce(IpeReduceArgs),
    /// Write a seeded synthetic table.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall-clock seconds in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableArgs {
    /// Embedding table file.
    #[arg(long)]
    pub input: PathBuf,
    /// File format; sniffed from the magic bytes when omitted.
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FilterArgs {
    /// Drop rows whose cosine with the target is at least this.
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    pub filter_threshold: f64,
    /// File of labels (one per line) to drop before analysis.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TolArgs {
    /// Inner products at or below this magnitude count as orthogonal.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Residual norms at or below this count as zero.
    #[arg(long, default_value_t = 1e-6)]
    pub zero_tol: f64,
}

/// Inclusive range `a..b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl KRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).collect()
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad K value '{x}'"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if start == 0 || end < start {
            return Err(format!("K range '{s}' must satisfy 1 <= start <= end"));
        }
        Ok(KRange { start, end })
    }
}

impl Serialize for KRange {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}..{}", self.start, self.end))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GmbArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Target label; repeat for several targets.
    #[arg(long, required = true)]
    pub target: Vec<String>,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Number of random subspaces.
    #[arg(long, default_value_t = 10)]
    pub nr: usize,
    /// Vectors per random subspace.
    #[arg(long, default_value_t = 50)]
    pub dr: usize,
    /// Candidates kept for the exhaustive subset search.
    #[arg(long, default_value_t = 10)]
    pub topk: usize,
    /// Scores within this of zero qualify for the smallest-subset rule.
    #[arg(long, default_value_t = 0.02)]
    pub gmb_tol: f64,
    /// Also report the best score for each candidate count in `a..b`.
    #[arg(long)]
    pub sweep_k: Option<KRange>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MbExactArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub target: String,
    /// Largest boundary size searched.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Refuse tables with more rows than this.
    #[arg(long, default_value_t = 20)]
    pub max_n: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// JSON object mapping each category label to its member labels.
    #[arg(long)]
    pub categories: PathBuf,
    /// Random pairs used to normalize each row.
    #[arg(long, default_value_t = 10_000)]
    pub null_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub target: String,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, default_value_t = 10)]
    pub nr: usize,
    #[arg(long, default_value_t = 50)]
    pub dr: usize,
    /// Length of each ranking.
    #[arg(long, default_value_t = 10)]
    pub topk: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnglesArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Labels spanning the first subspace (comma-separated or repeated).
    #[arg(long, required = true, value_delimiter = ',')]
    pub boundary: Vec<String>,
    /// Labels spanning the second subspace.
    #[arg(long, required = true, value_delimiter = ',')]
    pub reference: Vec<String>,
    /// Number of random row sets in the baseline.
    #[arg(long, default_value_t = 50)]
    pub random_baselines: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tol: TolArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AxiomsArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Axioms to check, e.g. `A1,A5`; all six by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_axiom)]
    pub axioms: Vec<Axiom>,
    /// Sampled tuples; small universes are enumerated instead.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Restrict the check to these labels.
    #[arg(long, value_delimiter = ',')]
    pub universe: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub zero_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_axiom(s: &str) -> Result<Axiom, String> {
    s.parse::<Axiom>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IpeBuildArgs {
    /// Graph file: vertex count, then one `i j` edge per line.
    #[arg(long)]
    pub graph: PathBuf,
    /// Perturbation factor; searched over default candidates when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Write the embedding rows (labels v0, v1, ...) here.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Binary)]
    pub map_format: TableFormat,
    /// Random subsets checked for graphs too large for the exhaustive check.
    #[arg(long, default_value_t = 2000)]
    pub perfect_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IpeCheckArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub graph: PathBuf,
    /// Refuse graphs with more vertices than this.
    #[arg(long, default_value_t = 10)]
    pub max_n: usize,
    /// Keep row norms as loaded.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub zero_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IpeReduceArgs {
    /// Embedding rows to reduce. Without it the map is built from `--graph`
    /// in memory.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
    /// Graph whose neighbor sets are the rows' Markov boundaries. Without it
    /// boundaries are enumerated from the rows (at most 20).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Bound on the residual inner products after reduction, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Perturbation factor for a map built from `--graph`; searched over
    /// default candidates when omitted.
    #[arg(long, conflicts_with = "input", requires = "graph")]
    pub map_epsilon: Option<f64>,
    /// Largest projection dimension used; smaller than planned makes the
    /// check best-effort.
    #[arg(long)]
    pub cap_k: Option<usize>,
    /// Skip the projection and check the unit-normalized rows themselves.
    #[arg(long)]
    pub bypass_identity: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub zero_tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    /// 64 rows with a planted generalized boundary of the row `target`.
    Planted,
    /// Clustered categories; also writes the categories JSON.
    Categories,
    /// A target whose nearest neighbor is dominated by a common direction.
    Ranking,
    /// Two centers and a noisy copy of the first.
    Angles,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Table destination.
    #[arg(long)]
    pub table_out: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub table_format: TableFormat,
    /// Categories JSON destination (`categories` only).
    #[arg(long)]
    pub categories_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}
