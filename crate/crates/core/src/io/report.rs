//! Report rendering. Delimited output is CSV with six decimals; structured
//! output is JSON at full precision and round-trips through [`read_report`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ahp::WeightResult;
use crate::error::{Error, Result};
use crate::geocoverage::ZoneCoverage;
use crate::model::CapacityIndicators;
use crate::suitability::{Grade, SuitabilityReport};
use crate::topsis::{DistanceVariant, TopsisResult};

use super::OutputFormat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsEntry {
    pub node: String,
    pub labels: Vec<String>,
    pub result: WeightResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub variant: DistanceVariant,
    pub weights: Vec<f64>,
    pub indicators: Vec<(String, CapacityIndicators)>,
    pub result: TopsisResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub radius_m: f64,
    pub cell_size: f64,
    pub points: usize,
    pub clipped_points: usize,
    pub total: ZoneCoverage,
    pub zones: Vec<ZoneCoverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Report {
    Weights(Vec<WeightsEntry>),
    Suitability(SuitabilityReport),
    Capacity(CapacityReport),
    Coverage(CoverageReport),
}

/// Six decimals with trailing zeros dropped; `-0` prints as `0`.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn line<I: IntoIterator<Item = String>>(out: &mut String, fields: I) {
    let v: Vec<String> = fields.into_iter().map(|f| csv_field(&f)).collect();
    out.push_str(&v.join(","));
    out.push('\n');
}

fn hist_text(counts: &[(Grade, usize); 5]) -> String {
    counts
        .iter()
        .map(|(g, n)| format!("{g}={n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn delimited(r: &Report) -> String {
    let mut out = String::new();
    match r {
        Report::Weights(entries) => {
            line(&mut out, ["node", "item", "weight", "lambda_max", "ci", "cr", "consistent"].map(String::from));
            for e in entries {
                for (label, w) in e.labels.iter().zip(&e.result.weights) {
                    line(
                        &mut out,
                        [
                            e.node.clone(),
                            label.clone(),
                            format_number(*w),
                            format_number(e.result.lambda_max),
                            format_number(e.result.ci),
                            format_number(e.result.cr),
                            e.result.consistent.to_string(),
                        ],
                    );
                }
            }
        }
        Report::Suitability(s) => {
            let mut head: Vec<String> = ["id", "name", "district"].map(String::from).to_vec();
            head.extend(s.index_ids.iter().cloned());
            head.extend(s.criterion_ids.iter().cloned());
            head.extend(["composite", "grade"].map(String::from));
            line(&mut out, head);
            for r in &s.results {
                let mut f = vec![r.shelter_id.clone(), r.name.clone(), r.district.clone()];
                f.extend(r.index_scores.iter().map(|x| x.to_string()));
                f.extend(r.criterion_scores.iter().map(|&x| format_number(x)));
                f.push(format_number(r.composite));
                f.push(r.grade.to_string());
                line(&mut out, f);
            }
        }
        Report::Capacity(c) => {
            line(&mut out, ["district", "d_plus", "d_minus", "closeness", "rank"].map(String::from));
            for row in c.result.ranked() {
                line(
                    &mut out,
                    [
                        row.name.clone(),
                        format_number(row.d_plus),
                        format_number(row.d_minus),
                        format_number(row.closeness),
                        row.rank.to_string(),
                    ],
                );
            }
        }
        Report::Coverage(c) => {
            line(
                &mut out,
                ["zone", "cells", "covered_cells", "coverage_ha", "effective_population", "nodata_cells", "blind_share"]
                    .map(String::from),
            );
            for z in c.zones.iter().chain(std::iter::once(&c.total)) {
                line(
                    &mut out,
                    [
                        z.zone.map_or_else(|| "all".to_string(), |v| v.to_string()),
                        z.cells.to_string(),
                        z.covered_cells.to_string(),
                        format_number(z.coverage_ha),
                        format_number(z.effective_population),
                        z.nodata_cells.to_string(),
                        format_number(z.blind_share),
                    ],
                );
            }
        }
    }
    out
}

pub fn render(r: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Delimited => Ok(delimited(r)),
        OutputFormat::Structured => {
            let mut s = serde_json::to_string_pretty(r).map_err(|e| Error::Invalid(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// A one-line human summary for logs.
pub fn summary(r: &Report) -> String {
    let mut s = String::new();
    match r {
        Report::Weights(e) => {
            let bad = e.iter().filter(|e| !e.result.consistent).count();
            let _ = write!(s, "{} matrices, {} inconsistent", e.len(), bad);
        }
        Report::Suitability(rep) => {
            let _ = write!(s, "{} shelters, {}", rep.results.len(), hist_text(&rep.grade_histogram()));
        }
        Report::Capacity(c) => {
            let first = c.result.ranked().first().map(|r| r.name.clone()).unwrap_or_default();
            let _ = write!(s, "{} districts, first: {}", c.result.rows.len(), first);
        }
        Report::Coverage(c) => {
            let _ = write!(s, "{} points, {} ha covered", c.points, format_number(c.total.coverage_ha));
        }
    }
    s
}

pub fn read_report(name: &str, text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::parse(name, e.line(), "", e.to_string()))
}
