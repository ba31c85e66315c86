//! Subcommand implementations. Each command computes all of its outputs in
//! memory before anything is written, so a failure leaves no files behind.

use std::fs;
use std::path::{Path, PathBuf};

use contagion_core::crisis_dist::{joint_cycle_severity, joint_cycle_severity_beta, CrisisJointDist};
use contagion_core::estimate::{
    fit_baseline_panels, fit_beta_mle_panels, fit_mle_panels, log_likelihood_ratio_panels, pair_sectors,
    sector_correlations, BetaFitConfig, FitReport, FittedParams, SectorPanel,
};
use contagion_core::risk::{loss_distribution, risk_report, Eq8Loss, LossDistribution, RiskReport};
use contagion_core::simulate::{generate_panel, monte_carlo_joint, SimConfig, SimModel};
use contagion_core::{Sector, SectorState};
use log::info;
use serde::Serialize;

use crate::args::{
    Cli, Command, CompareArgs, CrisisStart, DistArgs, FitArgs, LossArg, ModelArg, PairArgs, PanelInput, ReferenceArgs,
    RiskArgs, SimulateArgs,
};
use crate::error::{CliError, CliResult};
use crate::ingest::{self, SectorTotals};
use crate::reference;

/// A named output file and its full contents.
pub type Output = (String, String);

pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let (dir, outputs) = match &cli.command {
        Command::Fit(a) => (&a.out.out, cmd_fit(a)?),
        Command::Compare(a) => (&a.out.out, cmd_compare(a)?),
        Command::Dist(a) => (&a.out.out, cmd_dist(a)?),
        Command::Risk(a) => (&a.out.out, cmd_risk(a)?),
        Command::Simulate(a) => (&a.out.out, cmd_simulate(a)?),
        Command::Pair(a) => (&a.out.out, cmd_pair(a)?),
        Command::Reference(a) => (&a.out.out, cmd_reference(a)?),
    };
    write_outputs(dir, &outputs)
}

/// Writes every file under a temporary name, then renames them into place.
/// Any failure removes whatever was already written.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let staged: Vec<(PathBuf, PathBuf)> = outputs
        .iter()
        .map(|(name, _)| (dir.join(format!(".{name}.partial")), dir.join(name)))
        .collect();
    let cleanup = |upto: usize, renamed: usize| {
        for (i, (tmp, dest)) in staged.iter().enumerate().take(upto) {
            let _ = fs::remove_file(if i < renamed { dest } else { tmp });
        }
    };
    for (i, ((tmp, _), (_, body))) in staged.iter().zip(outputs).enumerate() {
        if let Err(e) = fs::write(tmp, body) {
            cleanup(i + 1, 0);
            return Err(CliError::io(tmp, e));
        }
    }
    for (i, (tmp, dest)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, dest) {
            cleanup(staged.len(), i);
            return Err(CliError::io(dest, e));
        }
    }
    for (_, dest) in &staged {
        info!("wrote {}", dest.display());
    }
    Ok(staged.into_iter().map(|(_, d)| d).collect())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn load_panels(input: &PanelInput) -> CliResult<Vec<SectorPanel>> {
    input
        .inputs
        .iter()
        .map(|p| ingest::ingest_panel(p, input.totals))
        .collect()
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<Vec<Output>> {
    let panels = load_panels(&args.panel)?;
    let report = match args.model {
        ModelArg::Basic => fit_mle_panels(&panels)?,
        ModelArg::Baseline => fit_baseline_panels(&panels)?,
        ModelArg::Beta => fit_beta_mle_panels(&panels, &BetaFitConfig::default())?,
    };
    info!(
        "fit {:?}: log-likelihood {}, BIC {}",
        args.model, report.log_likelihood, report.bic
    );
    Ok(vec![("fit.json".into(), json(&report))])
}

#[derive(Serialize)]
struct Alternative {
    input: String,
    log_likelihood_ratio: f64,
}

#[derive(Serialize)]
struct Comparison {
    proposed: FitReport,
    baseline: FitReport,
    /// Baseline BIC minus proposed BIC; positive favours the proposed model.
    bic_difference: f64,
    preferred: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    alternatives: Vec<Alternative>,
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<Vec<Output>> {
    let panels = load_panels(&args.panel)?;
    let proposed = fit_mle_panels(&panels)?;
    let baseline = fit_baseline_panels(&panels)?;
    let mut alternatives = Vec::new();
    for alt in &args.alt_inputs {
        let alt_panel = ingest::ingest_panel(alt, None)?;
        let ratio = log_likelihood_ratio_panels(&panels, std::slice::from_ref(&alt_panel))?;
        alternatives.push(Alternative {
            input: alt.display().to_string(),
            log_likelihood_ratio: ratio,
        });
    }
    let bic_difference = baseline.bic - proposed.bic;
    let preferred = if proposed.bic < baseline.bic {
        "proposed"
    } else {
        "baseline"
    };
    let report = Comparison {
        proposed,
        baseline,
        bic_difference,
        preferred,
        alternatives,
    };
    Ok(vec![("compare.json".into(), json(&report))])
}

fn sim_model(params: &FittedParams) -> CliResult<SimModel> {
    Ok(match params {
        FittedParams::Beta { .. } => SimModel::Beta(params.to_beta_params()?),
        _ => SimModel::Basic(params.to_regime_params()?),
    })
}

fn crisis_start(totals: (u32, u32), defaults: (u32, u32)) -> CliResult<SectorState> {
    if defaults.0 > totals.0 || defaults.1 > totals.1 {
        return Err(CliError::InvalidArgument(format!(
            "initial defaults {defaults:?} exceed sector totals {totals:?}"
        )));
    }
    Ok(SectorState::from_totals(totals, defaults)?)
}

fn exact_dist(model: &SimModel, initial: &SectorState, sector: Sector) -> CliResult<CrisisJointDist> {
    Ok(match model {
        SimModel::Basic(p) => joint_cycle_severity(p, initial, sector)?,
        SimModel::Beta(p) => joint_cycle_severity_beta(p, initial, sector)?,
    })
}

fn load_start(start: &CrisisStart) -> CliResult<(SimModel, SectorState)> {
    let model = sim_model(&ingest::read_params(&start.params)?)?;
    Ok((model, crisis_start(start.totals, start.initial_defaults)?))
}

pub fn cmd_dist(args: &DistArgs) -> CliResult<Vec<Output>> {
    let (model, initial) = load_start(&args.start)?;
    let dist = exact_dist(&model, &initial, args.start.sector.into())?;
    info!(
        "crisis table with {} entries, mass {}",
        dist.entries.len(),
        dist.total_mass()
    );
    Ok(vec![("dist.csv".into(), ingest::dist_csv(&dist))])
}

#[derive(Serialize)]
struct RiskDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    sector: Option<Sector>,
    loss: &'static str,
    reports: Vec<RiskReport>,
}

pub fn cmd_risk(args: &RiskArgs) -> CliResult<Vec<Output>> {
    if let Some(bad) = args.beta_levels.iter().find(|b| !(**b > 0.0 && **b < 1.0)) {
        return Err(CliError::InvalidArgument(format!(
            "--beta-level {bad} must lie in (0, 1)"
        )));
    }
    let mut outputs = Vec::new();
    let (dist, sector, loss): (LossDistribution, _, _) = match (&args.loss_input, &args.params, args.totals) {
        (Some(path), _, _) => (ingest::ingest_loss(path)?, None, "input"),
        (None, Some(params), Some(totals)) => {
            let model = sim_model(&ingest::read_params(params)?)?;
            let initial = crisis_start(totals, args.initial_defaults)?;
            let sector: Sector = args.sector.into();
            let joint = exact_dist(&model, &initial, sector)?;
            let dist = match args.loss {
                LossArg::Eq8 => loss_distribution(&joint, &Eq8Loss)?,
            };
            outputs.push(("loss.csv".into(), ingest::loss_csv(&dist)));
            (dist, Some(sector), "eq8")
        }
        _ => {
            return Err(CliError::InvalidArgument(
                "give either --loss-input or --params with --totals".into(),
            ))
        }
    };
    let reports = args
        .beta_levels
        .iter()
        .map(|&b| risk_report(&dist, b))
        .collect::<Result<Vec<_>, _>>()?;
    outputs.insert(0, ("risk.json".into(), json(&RiskDocument { sector, loss, reports })));
    Ok(outputs)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<Vec<Output>> {
    if args.periods.is_none() && args.paths.is_none() {
        return Err(CliError::InvalidArgument("give --periods, --paths or both".into()));
    }
    let (model, initial) = load_start(&args.start)?;
    let mut outputs = Vec::new();
    if let Some(periods) = args.periods {
        if periods == 0 {
            return Err(CliError::InvalidArgument("--periods must be at least 1".into()));
        }
        let panel = generate_panel(&SimConfig::new(args.seed, model, initial), periods)?;
        outputs.push(("panel.csv".into(), ingest::panel_csv(&panel)));
    }
    if let Some(paths) = args.paths {
        let cfg = SimConfig {
            n_paths: paths,
            ..SimConfig::new(args.seed, model, initial)
        };
        let dist = monte_carlo_joint(&cfg, args.start.sector.into())?;
        outputs.push(("mc_dist.csv".into(), ingest::dist_csv(&dist)));
    }
    Ok(outputs)
}

#[derive(Debug, Serialize)]
pub struct Partner {
    pub sector: String,
    pub partner: String,
    pub correlation: f64,
}

#[derive(Debug, Serialize)]
pub struct Pairing {
    pub sectors: Vec<String>,
    pub correlations: Vec<Vec<f64>>,
    pub partners: Vec<Partner>,
}

pub fn pairing(sectors: Vec<String>, correlations: Vec<Vec<f64>>) -> Pairing {
    let partners = pair_sectors(&correlations)
        .into_iter()
        .map(|(i, j)| Partner {
            sector: sectors[i].clone(),
            partner: sectors[j].clone(),
            correlation: correlations[i][j],
        })
        .collect();
    Pairing {
        sectors,
        correlations,
        partners,
    }
}

pub fn cmd_pair(args: &PairArgs) -> CliResult<Vec<Output>> {
    let (names, corr) = match &args.input {
        Some(path) => {
            let (names, series) = ingest::ingest_series(path)?;
            if names.len() < 2 {
                return Err(CliError::InvalidArgument("pairing needs at least two sectors".into()));
            }
            (names, sector_correlations(&series)?)
        }
        None => (
            reference::SECTORS.iter().map(|s| s.to_string()).collect(),
            reference::CORRELATIONS.iter().map(|r| r.to_vec()).collect(),
        ),
    };
    Ok(vec![("pair.json".into(), json(&pairing(names, corr)))])
}

#[derive(Serialize)]
struct SectorRow {
    #[serde(flatten)]
    totals: SectorTotals,
    proportion: f64,
}

#[derive(Serialize)]
struct ReferenceDocument {
    sectors: Vec<SectorRow>,
    pairing: Pairing,
    note: &'static str,
    published_fits: &'static [reference::PublishedFit],
    published_ratios: &'static [reference::PublishedRatio],
    published_risk: &'static [reference::PublishedRisk],
}

/// Sector totals from `path`, or the bundled table.
pub fn sector_totals(path: Option<&Path>) -> CliResult<Vec<SectorTotals>> {
    match path {
        Some(p) => ingest::ingest_totals(p),
        None => ingest::parse_totals_table(Path::new("<bundled table1.csv>"), reference::TABLE1_CSV),
    }
}

pub fn cmd_reference(args: &ReferenceArgs) -> CliResult<Vec<Output>> {
    let sectors = sector_totals(args.input.as_deref())?
        .into_iter()
        .map(|t| SectorRow {
            proportion: t.proportion(),
            totals: t,
        })
        .collect();
    let doc = ReferenceDocument {
        sectors,
        pairing: pairing(
            reference::SECTORS.iter().map(|s| s.to_string()).collect(),
            reference::CORRELATIONS.iter().map(|r| r.to_vec()).collect(),
        ),
        note: reference::NOT_REPRODUCIBLE,
        published_fits: &reference::PUBLISHED_FITS,
        published_ratios: &reference::PUBLISHED_RATIOS,
        published_risk: &reference::PUBLISHED_RISK,
    };
    Ok(vec![("reference.json".into(), json(&doc))])
}
