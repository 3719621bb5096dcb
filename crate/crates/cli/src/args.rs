use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrule::{DropMode, MinerParams, QcbaConfig};

#[derive(Debug, Parser)]
#[command(
    name = "qrule",
    version,
    about = "Association rule classification with quantitative postprocessing"
)]
pub struct Cli {
    /// Worker threads; all logical cores when unset.
    #[arg(long, global = true, env = "QRULE_JOBS")]
    pub jobs: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a discretization of the quantitative attributes.
    Discretize(DiscretizeArgs),
    /// Mine class association rules from nominal or binned data.
    Mine(MineArgs),
    /// Build a classifier from a training set.
    Build(BuildArgs),
    /// Postprocess an existing rule list against raw training data.
    Optimize(OptimizeArgs),
    /// Classify the rows of a CSV file.
    Predict(PredictArgs),
    /// Cross-validate CBA and the postprocessing presets.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Class column; the last column when unset.
    #[arg(long)]
    pub class: Option<String>,

    /// Schema file with `name = nominal|quantitative|class` lines.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinerArgs {
    #[arg(long, default_value_t = MinerParams::default().min_support)]
    pub min_support: f64,

    #[arg(long, default_value_t = MinerParams::default().min_confidence)]
    pub min_confidence: f64,

    #[arg(long, default_value_t = MinerParams::default().max_antecedent_length)]
    pub max_length: usize,

    #[arg(long, default_value_t = MinerParams::default().max_rules)]
    pub max_rules: usize,
}

impl MinerArgs {
    pub fn params(&self) -> MinerParams {
        MinerParams {
            min_support: self.min_support,
            min_confidence: self.min_confidence,
            max_antecedent_length: self.max_length,
            max_rules: self.max_rules,
        }
    }
}

#[derive(Debug, Args)]
pub struct TuningArgs {
    /// Stage set 1 to 7; 0 builds the plain CBA classifier where allowed.
    #[arg(long, default_value_t = 6)]
    pub preset: u8,

    #[arg(long, overrides_with = "no_refit")]
    pub refit: bool,
    #[arg(long)]
    pub no_refit: bool,

    #[arg(long, overrides_with = "no_literal_pruning")]
    pub literal_pruning: bool,
    #[arg(long)]
    pub no_literal_pruning: bool,

    #[arg(long, overrides_with = "no_trimming")]
    pub trimming: bool,
    #[arg(long)]
    pub no_trimming: bool,

    #[arg(long, overrides_with = "no_extension")]
    pub extension: bool,
    #[arg(long)]
    pub no_extension: bool,

    #[arg(long, overrides_with = "no_postpruning")]
    pub postpruning: bool,
    #[arg(long)]
    pub no_postpruning: bool,

    /// Default rule overlap pruning.
    #[arg(long, value_enum)]
    pub drop: Option<DropArg>,

    #[arg(long, allow_negative_numbers = true)]
    pub min_improvement: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub min_cond_improvement: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DropArg {
    None,
    Transaction,
    Range,
}

impl From<DropArg> for DropMode {
    fn from(d: DropArg) -> Self {
        match d {
            DropArg::None => DropMode::None,
            DropArg::Transaction => DropMode::Transaction,
            DropArg::Range => DropMode::Range,
        }
    }
}

fn switch(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

impl TuningArgs {
    /// Whether any stage flag was given.
    pub fn has_overrides(&self) -> bool {
        self.refit
            || self.no_refit
            || self.literal_pruning
            || self.no_literal_pruning
            || self.trimming
            || self.no_trimming
            || self.extension
            || self.no_extension
            || self.postpruning
            || self.no_postpruning
            || self.drop.is_some()
            || self.min_improvement.is_some()
            || self.min_cond_improvement.is_some()
    }

    /// Preset stages with the individual flags applied on top.
    pub fn config(&self) -> qrule::Result<QcbaConfig> {
        let mut c = QcbaConfig::preset(self.preset)?;
        let stages = [
            (&mut c.refit, switch(self.refit, self.no_refit)),
            (
                &mut c.literal_pruning,
                switch(self.literal_pruning, self.no_literal_pruning),
            ),
            (&mut c.trimming, switch(self.trimming, self.no_trimming)),
            (&mut c.extension, switch(self.extension, self.no_extension)),
            (
                &mut c.postpruning,
                switch(self.postpruning, self.no_postpruning),
            ),
        ];
        for (field, value) in stages {
            if let Some(v) = value {
                *field = v;
            }
        }
        if let Some(d) = self.drop {
            c.drop = d.into();
        }
        if let Some(v) = self.min_improvement {
            c.min_improvement = v;
        }
        if let Some(v) = self.min_cond_improvement {
            c.min_cond_improvement = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Mdlp,
    EqualWidth,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Method::Mdlp)]
    pub method: Method,

    /// Bin count for equal-width binning.
    #[arg(long, default_value_t = 3)]
    pub bins: usize,

    /// Discretization map JSON; stdout when unset.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Also write the binned dataset as CSV.
    #[arg(long)]
    pub binned: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    pub data: PathBuf,

    /// Discretization map applied before mining.
    #[arg(long)]
    pub map: Option<PathBuf>,

    #[command(flatten)]
    pub miner: MinerArgs,

    /// Rules JSON; stdout when unset.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub data: PathBuf,

    #[command(flatten)]
    pub tuning: TuningArgs,

    #[command(flatten)]
    pub miner: MinerArgs,

    /// Classifier JSON; stdout when unset.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Rule list JSON, over raw intervals or over the bin labels of `--map`.
    pub rules: PathBuf,

    /// Raw training data.
    pub data: PathBuf,

    #[arg(long)]
    pub map: Option<PathBuf>,

    #[command(flatten)]
    pub tuning: TuningArgs,

    /// Classifier JSON; stdout when unset.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub model: PathBuf,

    /// Rows to classify; the class column may be absent.
    pub data: PathBuf,

    /// Predictions CSV; stdout when unset.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Datasets; each is named after its file stem.
    #[arg(required = true)]
    pub data: Vec<PathBuf>,

    /// Comma-separated presets; 0 is the CBA baseline.
    #[arg(long, value_delimiter = ',', default_values_t = [0u8, 1, 2, 3, 4, 5, 6, 7])]
    pub presets: Vec<u8>,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[command(flatten)]
    pub miner: MinerArgs,

    /// Directory for report.json, report.csv and report.txt.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    #[command(flatten)]
    pub data_args: DataArgs,
}
