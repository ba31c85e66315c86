use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contagion_core::Sector;

#[derive(Debug, Parser)]
#[command(
    name = "contagion-risk",
    version,
    about = "Two-sector infectious default model: fitting, crisis distributions and risk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to one or more panels and write fit.json.
    Fit(FitArgs),
    /// Compare the regime model with the baseline by BIC; write compare.json.
    Compare(CompareArgs),
    /// Exact joint law of cycle length and severity; write dist.csv.
    Dist(DistArgs),
    /// CRVaR and CRES of the crisis loss; write risk.json.
    Risk(RiskArgs),
    /// Simulate a panel and/or Monte Carlo crisis table.
    Simulate(SimulateArgs),
    /// Correlate sector default series and pick each sector's partner.
    Pair(PairArgs),
    /// Bundled sector totals and published reference values.
    Reference(ReferenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Basic,
    Baseline,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectorArg {
    A,
    B,
}

impl From<SectorArg> for Sector {
    fn from(s: SectorArg) -> Sector {
        match s {
            SectorArg::A => Sector::A,
            SectorArg::B => Sector::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Eq8,
}

#[derive(Debug, Args)]
pub struct PanelInput {
    /// Panel CSV (`period,x1,y1,x2,y2`); repeat to pool episodes.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Sector totals `N1,N2`; checked against each panel's first row.
    #[arg(long, value_parser = parse_pair)]
    pub totals: Option<(u32, u32)>,
}

#[derive(Debug, Args)]
pub struct OutDir {
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub panel: PanelInput,
    #[arg(long, value_enum, default_value_t = ModelArg::Basic)]
    pub model: ModelArg,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub panel: PanelInput,
    /// Panel pairing the same sector A with a different partner; repeatable.
    #[arg(long = "alt-input")]
    pub alt_inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct CrisisStart {
    /// Parameter JSON: a fit.json report or a bare parameter document.
    #[arg(long)]
    pub params: PathBuf,
    /// Sector totals `N1,N2`.
    #[arg(long, value_parser = parse_pair)]
    pub totals: (u32, u32),
    /// Defaults at time 0, `y1,y2`.
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    pub initial_defaults: (u32, u32),
    #[arg(long, value_enum, default_value_t = SectorArg::A)]
    pub sector: SectorArg,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub start: CrisisStart,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    /// Loss distribution CSV (`loss,probability`) instead of a crisis model.
    #[arg(long, conflicts_with_all = ["params", "totals"])]
    pub loss_input: Option<PathBuf>,
    #[arg(long, requires = "totals")]
    pub params: Option<PathBuf>,
    #[arg(long, value_parser = parse_pair)]
    pub totals: Option<(u32, u32)>,
    #[arg(long, value_parser = parse_pair, default_value = "1,1")]
    pub initial_defaults: (u32, u32),
    #[arg(long, value_enum, default_value_t = SectorArg::A)]
    pub sector: SectorArg,
    #[arg(long, value_enum, default_value_t = LossArg::Eq8)]
    pub loss: LossArg,
    #[arg(long = "beta-level", default_values_t = [0.05, 0.01])]
    pub beta_levels: Vec<f64>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub start: CrisisStart,
    #[arg(long)]
    pub seed: u64,
    /// Write panel.csv with this many simulated transitions.
    #[arg(long)]
    pub periods: Option<usize>,
    /// Write mc_dist.csv from this many simulated crises.
    #[arg(long)]
    pub paths: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Default series CSV, `period,<sector>,<sector>,...`.
    #[arg(long, required_unless_present = "reference", conflicts_with = "reference")]
    pub input: Option<PathBuf>,
    /// Use the bundled correlation matrix of the four-sector study.
    #[arg(long)]
    pub reference: bool,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ReferenceArgs {
    /// Sector totals CSV (`sector,total,defaults`); defaults to the bundled table.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `N1,N2`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}
