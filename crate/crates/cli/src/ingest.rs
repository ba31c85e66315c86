//! CSV readers and writers for panels, crisis tables, loss distributions
//! and sector summaries.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use contagion_core::crisis_dist::CrisisJointDist;
use contagion_core::estimate::{FitReport, FittedParams, SectorPanel};
use contagion_core::risk::LossDistribution;
use contagion_core::{Error as CoreError, SectorState};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const PANEL_HEADER: [&str; 5] = ["period", "x1", "y1", "x2", "y2"];
pub const DIST_HEADER: [&str; 3] = ["cycle_length", "severity", "probability"];
pub const LOSS_HEADER: [&str; 2] = ["loss", "probability"];
pub const TOTALS_HEADER: [&str; 3] = ["sector", "total", "defaults"];

fn open(path: &Path) -> CliResult<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file))
}

fn schema(path: &Path, line: u64, reason: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

type Rows = Vec<(u64, csv::StringRecord)>;

/// Records with their 1-based file line, after checking the header row.
/// `expected` of `None` accepts any header whose first column is `first`.
fn records(path: &Path, expected: Option<&[&str]>, first: &str) -> CliResult<(Vec<String>, Rows)> {
    let mut reader = open(path)?;
    let mut rows = Vec::new();
    let mut header: Option<Vec<String>> = None;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            schema(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        match &header {
            None => {
                let names: Vec<String> = rec.iter().map(str::to_owned).collect();
                let ok = match expected {
                    Some(cols) => names.iter().map(String::as_str).eq(cols.iter().copied()),
                    None => names.first().map(String::as_str) == Some(first) && names.len() >= 2,
                };
                if !ok {
                    let want = expected.map_or_else(|| format!("{first},<name>,..."), |c| c.join(","));
                    return Err(schema(
                        path,
                        line,
                        format!("header must be `{want}`, found `{}`", names.join(",")),
                    ));
                }
                header = Some(names);
            }
            Some(names) => {
                if rec.len() != names.len() {
                    return Err(schema(
                        path,
                        line,
                        format!("expected {} fields, found {}", names.len(), rec.len()),
                    ));
                }
                rows.push((line, rec));
            }
        }
    }
    let header = header.ok_or_else(|| schema(path, 1, "empty file"))?;
    Ok((header, rows))
}

fn count(path: &Path, line: u64, column: &str, field: &str) -> CliResult<u32> {
    let v: i64 = field
        .trim()
        .parse()
        .map_err(|_| schema(path, line, format!("column {column}: `{field}` is not an integer")))?;
    if v < 0 {
        return Err(CliError::NegativeCount {
            path: path.to_path_buf(),
            line,
            column: column.to_owned(),
        });
    }
    u32::try_from(v).map_err(|_| schema(path, line, format!("column {column}: {v} is too large")))
}

fn number(path: &Path, line: u64, column: &str, field: &str) -> CliResult<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| schema(path, line, format!("column {column}: `{field}` is not a finite number")))
}

/// Reads a panel CSV. With `totals` the first row must match them; otherwise
/// they are taken from the first row.
pub fn ingest_panel(path: &Path, totals: Option<(u32, u32)>) -> CliResult<SectorPanel> {
    let (_, rows) = records(path, Some(&PANEL_HEADER), "period")?;
    if rows.is_empty() {
        return Err(schema(path, 2, "panel has no rows"));
    }
    let mut periods = Vec::with_capacity(rows.len());
    let mut prev_period: Option<u32> = None;
    for (line, rec) in &rows {
        let f: Vec<u32> = PANEL_HEADER
            .iter()
            .zip(rec.iter())
            .map(|(col, field)| count(path, *line, col, field))
            .collect::<CliResult<_>>()?;
        if let Some(p) = prev_period {
            if f[0] != p + 1 {
                return Err(schema(path, *line, format!("period {} does not follow {p}", f[0])));
            }
        }
        prev_period = Some(f[0]);
        periods.push(SectorState::new(f[1], f[2], f[3], f[4]));
    }
    let s0 = periods[0];
    let implied = (u64::from(s0.x1) + u64::from(s0.y1), u64::from(s0.x2) + u64::from(s0.y2));
    let implied = match (u32::try_from(implied.0), u32::try_from(implied.1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(schema(path, rows[0].0, "sector totals overflow")),
    };
    let totals = totals.unwrap_or(implied);
    let line_of = |row: usize| rows.get(row).map_or(rows[0].0, |r| r.0);
    SectorPanel::new(totals, periods).map_err(|e| match e {
        CoreError::InvalidPanel { row, reason } => CliError::Inconsistent {
            path: path.to_path_buf(),
            line: line_of(row),
            reason,
        },
        other => CliError::Model(other),
    })
}

pub fn panel_csv(panel: &SectorPanel) -> String {
    let mut out = PANEL_HEADER.join(",");
    out.push('\n');
    for (t, s) in panel.periods().iter().enumerate() {
        let _ = writeln!(out, "{t},{},{},{},{}", s.x1, s.y1, s.x2, s.y2);
    }
    out
}

pub fn dist_csv(dist: &CrisisJointDist) -> String {
    let mut out = DIST_HEADER.join(",");
    out.push('\n');
    for (n, w, p) in dist.iter() {
        let _ = writeln!(out, "{n},{w},{p}");
    }
    out
}

pub fn loss_csv(dist: &LossDistribution) -> String {
    let mut out = LOSS_HEADER.join(",");
    out.push('\n');
    for (l, p) in dist.entries() {
        let _ = writeln!(out, "{l},{p}");
    }
    out
}

pub fn ingest_loss(path: &Path) -> CliResult<LossDistribution> {
    let (_, rows) = records(path, Some(&LOSS_HEADER), "loss")?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        let l = number(path, *line, "loss", &rec[0])?;
        let p = number(path, *line, "probability", &rec[1])?;
        if p < 0.0 {
            return Err(schema(path, *line, "negative probability"));
        }
        points.push((l, p));
    }
    if points.is_empty() {
        return Err(schema(path, 2, "loss distribution has no rows"));
    }
    let total: f64 = points.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(schema(
            path,
            rows.last().map_or(2, |r| r.0),
            format!("probabilities sum to {total}, not 1"),
        ));
    }
    Ok(LossDistribution::new(points)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorTotals {
    pub sector: String,
    pub total: u32,
    pub defaults: u32,
}

impl SectorTotals {
    pub fn proportion(&self) -> f64 {
        f64::from(self.defaults) / f64::from(self.total)
    }
}

pub fn parse_totals_table(path: &Path, text: &str) -> CliResult<Vec<SectorTotals>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| schema(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(schema(path, line, format!("expected 3 fields, found {}", rec.len())));
        }
        if i == 0 {
            if !rec.iter().eq(TOTALS_HEADER.iter().copied()) {
                return Err(schema(
                    path,
                    line,
                    format!("header must be `{}`", TOTALS_HEADER.join(",")),
                ));
            }
            continue;
        }
        let total = count(path, line, "total", &rec[1])?;
        let defaults = count(path, line, "defaults", &rec[2])?;
        if total == 0 || defaults > total {
            return Err(CliError::Inconsistent {
                path: path.to_path_buf(),
                line,
                reason: format!("defaults {defaults} exceed total {total} or total is zero"),
            });
        }
        out.push(SectorTotals {
            sector: rec[0].trim().to_owned(),
            total,
            defaults,
        });
    }
    if out.is_empty() {
        return Err(schema(path, 2, "no sectors"));
    }
    Ok(out)
}

pub fn ingest_totals(path: &Path) -> CliResult<Vec<SectorTotals>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_totals_table(path, &text)
}

/// Per-period default counts for several sectors: header `period,<names...>`.
pub fn ingest_series(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let (header, rows) = records(path, None, "period")?;
    let names: Vec<String> = header[1..].to_vec();
    let mut series = vec![Vec::with_capacity(rows.len()); names.len()];
    for (line, rec) in &rows {
        count(path, *line, "period", &rec[0])?;
        for (j, name) in names.iter().enumerate() {
            series[j].push(f64::from(count(path, *line, name, &rec[j + 1])?));
        }
    }
    Ok((names, series))
}

/// Parameters from either a `fit` report or a bare parameter document.
pub fn read_params(path: &Path) -> CliResult<FittedParams> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| schema(path, e.line() as u64, e.to_string()))?;
    let parsed = if value.get("params").is_some() {
        serde_json::from_value::<FitReport>(value).map(|r| r.params)
    } else {
        serde_json::from_value::<FittedParams>(value)
    };
    parsed.map_err(|e| schema(path, 1, format!("not a parameter document: {e}")))
}
