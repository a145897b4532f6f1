use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use manualgen::{ElementKind, Genre, HeadingStyle, Lang, SelectionMode};

/// Generate genre-controlled software instructions and analyse coded corpora.
///
/// Every input file defaults to the copy embedded in the binary. A path that
/// does not exist but carries a shipped file name (for example
/// `paper-profiles.json`) also resolves to the embedded copy.
#[derive(Debug, Parser)]
#[command(name = "manualgen", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one document (--goal) or a coded JSON Lines corpus (--corpus).
    Gen(GenArgs),
    /// Tabulate feature frequencies in a coded corpus.
    Tables(TablesArgs),
    /// Compare an observed TSV table against a reference table.
    Compare(CompareArgs),
    /// Keyword-in-context concordance over corpus unit texts.
    Kwic(KwicArgs),
    /// Welch two-sample t-test on explicit samples or corpus indicators.
    Ttest(TtestArgs),
    /// Check input files and list every violation found.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Task model JSON.
    #[arg(long, value_name = "FILE")]
    pub task_model: Option<PathBuf>,
    /// Genre profile JSON.
    #[arg(long, value_name = "FILE")]
    pub profiles: Option<PathBuf>,
    /// Bilingual lexicon JSON.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Realization rule JSON.
    #[arg(long, value_name = "FILE")]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["goal", "corpus"])))]
pub struct GenArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Genre whose profile controls staging and feature selection.
    #[arg(long, value_enum)]
    pub genre: GenreArg,
    /// Goal id to document.
    #[arg(long, value_name = "ID")]
    pub goal: Option<String>,
    /// Emit a coded corpus instead of a document.
    #[arg(long, requires = "count")]
    pub corpus: bool,
    /// Number of corpus units (with --corpus).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub count: Option<u64>,
    /// Output language.
    #[arg(long, value_enum, default_value = "fr")]
    pub lang: LangArg,
    /// Selection mode; stochastic requires --seed.
    #[arg(long, value_enum, default_value = "deterministic")]
    pub mode: ModeArg,
    /// Seed for the stochastic generator.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// How headings are marked in documents.
    #[arg(long, value_enum, default_value = "plain")]
    pub heading_style: StyleArg,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Coded corpus (JSON Lines); repeat to merge several.
    #[arg(long, value_name = "FILE", required = true)]
    pub corpus: Vec<PathBuf>,
    /// System to tabulate, or `task-element` for the genre × element cross-tabulation.
    #[arg(long)]
    pub system: String,
    /// Row partition.
    #[arg(long, value_enum, default_value = "element")]
    pub by: ByArg,
    /// Restrict element rows to one genre (with --by element).
    #[arg(long, value_enum)]
    pub genre: Option<GenreArg>,
    /// Restrict genre rows to one element kind (with --by genre).
    #[arg(long, value_enum)]
    pub element: Option<ElementArg>,
    /// Output format.
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: FormatArg,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Observed table (TSV as written by `tables`).
    #[arg(long, value_name = "FILE")]
    pub observed: PathBuf,
    /// Reference table (TSV); shipped names such as paper-fig6.tsv resolve to embedded copies.
    #[arg(long, value_name = "FILE")]
    pub reference: PathBuf,
    /// Largest allowed per-cell difference, in percentage points.
    #[arg(long, default_value_t = 3.0)]
    pub tolerance: f64,
    /// Write the report to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KwicArgs {
    /// Coded corpus (JSON Lines); repeat to merge several.
    #[arg(long, value_name = "FILE", required = true)]
    pub corpus: Vec<PathBuf>,
    /// Keyword or multi-word pattern, matched case-insensitively on whole tokens.
    #[arg(long)]
    pub pattern: String,
    /// Context tokens on each side.
    #[arg(long, default_value_t = 4)]
    pub window: usize,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["a", "corpus"])))]
pub struct TtestArgs {
    /// First sample, comma separated.
    #[arg(long, value_delimiter = ',', requires = "b", allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Second sample, comma separated.
    #[arg(long, value_delimiter = ',', requires = "a", allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,
    /// Coded corpus to draw 0/1 feature indicators from; repeat to merge several.
    #[arg(long, value_name = "FILE", requires_all = ["feature", "rows"])]
    pub corpus: Vec<PathBuf>,
    /// Feature whose per-unit indicator is compared.
    #[arg(long)]
    pub feature: Option<String>,
    /// Row partition the two samples come from.
    #[arg(long, value_enum, default_value = "element")]
    pub by: ByArg,
    /// The two row labels to compare, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub rows: Option<Vec<String>>,
    /// Restrict element rows to one genre (with --by element).
    #[arg(long, value_enum)]
    pub genre: Option<GenreArg>,
    /// Restrict genre rows to one element kind (with --by genre).
    #[arg(long, value_enum)]
    pub element: Option<ElementArg>,
    /// Significance level: 0.05 or 0.01.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Coded corpus (JSON Lines) to check against the system network.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenreArg {
    Procedure,
    ReadyReference,
    Elaboration,
}

impl From<GenreArg> for Genre {
    fn from(g: GenreArg) -> Self {
        match g {
            GenreArg::Procedure => Genre::Procedure,
            GenreArg::ReadyReference => Genre::ReadyReference,
            GenreArg::Elaboration => Genre::Elaboration,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ElementArg {
    Goal,
    Function,
    Constraint,
    Result,
    Substep,
}

impl From<ElementArg> for ElementKind {
    fn from(k: ElementArg) -> Self {
        match k {
            ElementArg::Goal => ElementKind::Goal,
            ElementArg::Function => ElementKind::Function,
            ElementArg::Constraint => ElementKind::Constraint,
            ElementArg::Result => ElementKind::Result,
            ElementArg::Substep => ElementKind::Substep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LangArg {
    Fr,
    En,
}

impl From<LangArg> for Lang {
    fn from(l: LangArg) -> Self {
        match l {
            LangArg::Fr => Lang::Fr,
            LangArg::En => Lang::En,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Deterministic,
    Stochastic,
}

impl From<ModeArg> for SelectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Deterministic => SelectionMode::Deterministic,
            ModeArg::Stochastic => SelectionMode::Stochastic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StyleArg {
    /// Heading text on its own line.
    Plain,
    /// Heading prefixed with "## ".
    Markdown,
}

impl From<StyleArg> for HeadingStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::Plain => HeadingStyle::Plain,
            StyleArg::Markdown => HeadingStyle::Markdown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ByArg {
    Element,
    Genre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Pretty,
}
