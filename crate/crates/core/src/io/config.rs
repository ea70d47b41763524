//! Run configuration in TOML: the criterion hierarchy (explicit weights or
//! judgment-matrix references), the capacity weight scheme, coverage
//! parameters, and the output format.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ahp::{derive_weights, WeightMethod, WeightResult};
use crate::error::{Error, Result};
use crate::geocoverage::{self, DEFAULT_CELL_SIZE, DEFAULT_MINUTES, DEFAULT_SPEED_KMH};
use crate::model::{
    validate_hierarchy, CapacityIndicators, Criterion, CriterionHierarchy, IndexDefinition, Polarity,
    ScoringRule,
};
use crate::topsis::DistanceVariant;

use super::{matrix::parse_matrix, read_to_string, OutputFormat};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    hierarchy: RawHierarchy,
    #[serde(default)]
    topsis: Option<RawTopsis>,
    #[serde(default)]
    coverage: RawCoverage,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHierarchy {
    goal: String,
    #[serde(default)]
    method: WeightMethod,
    criteria_matrix: Option<PathBuf>,
    criteria: Vec<RawCriterion>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCriterion {
    id: String,
    label: String,
    weight: Option<f64>,
    matrix: Option<PathBuf>,
    indexes: Vec<RawIndex>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndex {
    id: String,
    label: String,
    polarity: Polarity,
    rule: ScoringRule,
    #[serde(default)]
    units: String,
    weight: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopsis {
    #[serde(default)]
    variant: DistanceVariant,
    groups: Vec<RawGroup>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    label: String,
    weight: f64,
    indicators: Vec<String>,
    shares: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoverage {
    speed_kmh: Option<f64>,
    minutes: Option<f64>,
    radius_m: Option<f64>,
    cell_size: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    format: OutputFormat,
}

/// Weights derived from one referenced judgment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixWeights {
    pub node: String,
    pub path: PathBuf,
    pub result: WeightResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityScheme {
    /// One weight per indicator, in [`CapacityIndicators::NAMES`] order.
    pub weights: Vec<f64>,
    pub variant: DistanceVariant,
}

impl Default for CapacityScheme {
    fn default() -> Self {
        CapacityScheme {
            weights: vec![0.175, 0.175, 0.175, 0.175, 0.15, 0.15],
            variant: DistanceVariant::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    pub speed_kmh: f64,
    pub minutes: f64,
    pub radius_m: f64,
    pub cell_size: f64,
}

impl Default for CoverageParams {
    fn default() -> Self {
        CoverageParams {
            speed_kmh: DEFAULT_SPEED_KMH,
            minutes: DEFAULT_MINUTES,
            radius_m: 667.0,
            cell_size: DEFAULT_CELL_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hierarchy: CriterionHierarchy,
    pub matrices: Vec<MatrixWeights>,
    pub capacity: CapacityScheme,
    pub coverage: CoverageParams,
    pub output: OutputFormat,
}

fn sibling_weights(
    node: &str,
    explicit: &[Option<f64>],
    matrix: Option<&PathBuf>,
    base: &Path,
    method: WeightMethod,
    matrices: &mut Vec<MatrixWeights>,
) -> Result<Vec<f64>> {
    let given = explicit.iter().filter(|w| w.is_some()).count();
    match (matrix, given) {
        (None, n) if n == explicit.len() => Ok(explicit.iter().map(|w| w.unwrap()).collect()),
        (Some(rel), 0) => {
            let path = base.join(rel);
            if !path.is_file() {
                return Err(Error::Invalid(format!(
                    "{node}: judgment matrix {} does not exist",
                    path.display()
                )));
            }
            let m = parse_matrix(&path)?;
            if m.order() != explicit.len() {
                return Err(Error::Invalid(format!(
                    "{node}: matrix {} has order {} but there are {} children",
                    path.display(),
                    m.order(),
                    explicit.len()
                )));
            }
            let result = derive_weights(&m, method)?;
            if !result.consistent {
                return Err(Error::Invalid(format!(
                    "{node}: matrix {} fails the consistency test (CR = {:.4})",
                    path.display(),
                    result.cr
                )));
            }
            let w = result.weights.clone();
            matrices.push(MatrixWeights {
                node: node.to_string(),
                path,
                result,
            });
            Ok(w)
        }
        (Some(_), _) => Err(Error::Invalid(format!(
            "{node}: give either child weights or a judgment matrix, not both"
        ))),
        (None, _) => Err(Error::Invalid(format!(
            "{node}: every child needs a weight when no judgment matrix is given"
        ))),
    }
}

fn capacity_scheme(raw: RawTopsis) -> Result<CapacityScheme> {
    let mut weights = [None; 6];
    for g in &raw.groups {
        if g.indicators.len() != g.shares.len() {
            return Err(Error::Invalid(format!(
                "capacity group {}: {} indicators but {} shares",
                g.label,
                g.indicators.len(),
                g.shares.len()
            )));
        }
        for (name, share) in g.indicators.iter().zip(&g.shares) {
            let j = CapacityIndicators::NAMES
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Invalid(format!("unknown capacity indicator {name:?}")))?;
            if weights[j].replace(g.weight * share).is_some() {
                return Err(Error::Invalid(format!("indicator {name} listed twice")));
            }
        }
    }
    let weights = weights
        .iter()
        .zip(CapacityIndicators::NAMES)
        .map(|(w, n)| w.ok_or_else(|| Error::Invalid(format!("indicator {n} has no weight"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityScheme {
        weights,
        variant: raw.variant,
    })
}

/// Parses a configuration; matrix paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::parse("config", line, "", e.message().to_string())
    })?;
    let h = raw.hierarchy;
    let mut matrices = Vec::new();
    let top: Vec<Option<f64>> = h.criteria.iter().map(|c| c.weight).collect();
    let top = sibling_weights(&h.goal, &top, h.criteria_matrix.as_ref(), base, h.method, &mut matrices)?;

    let mut criteria = Vec::with_capacity(h.criteria.len());
    for (c, local_weight) in h.criteria.into_iter().zip(top) {
        let explicit: Vec<Option<f64>> = c.indexes.iter().map(|i| i.weight).collect();
        let w = sibling_weights(&c.id, &explicit, c.matrix.as_ref(), base, h.method, &mut matrices)?;
        criteria.push(Criterion {
            id: c.id,
            label: c.label,
            local_weight,
            children: c
                .indexes
                .into_iter()
                .zip(w)
                .map(|(i, local_weight)| IndexDefinition {
                    id: i.id,
                    label: i.label,
                    polarity: i.polarity,
                    scoring_rule: i.rule,
                    units: i.units,
                    local_weight,
                })
                .collect(),
        });
    }
    let hierarchy = CriterionHierarchy {
        goal_label: h.goal,
        criteria,
    };
    let violations = validate_hierarchy(&hierarchy);
    if !violations.is_empty() {
        return Err(Error::InvalidHierarchy(violations));
    }

    let capacity = match raw.topsis {
        Some(t) => capacity_scheme(t)?,
        None => CapacityScheme::default(),
    };
    let c = raw.coverage;
    let speed_kmh = c.speed_kmh.unwrap_or(DEFAULT_SPEED_KMH);
    let minutes = c.minutes.unwrap_or(DEFAULT_MINUTES);
    let radius_m = match c.radius_m {
        Some(r) if r > 0.0 => r,
        Some(r) => return Err(Error::domain(r, "radius_m must be positive")),
        None => geocoverage::service_radius_rounded(speed_kmh, minutes)?,
    };
    let cell_size = c.cell_size.unwrap_or(DEFAULT_CELL_SIZE);
    if !(cell_size > 0.0) {
        return Err(Error::domain(cell_size, "cell_size must be positive"));
    }
    Ok(RunConfig {
        hierarchy,
        matrices,
        capacity,
        coverage: CoverageParams {
            speed_kmh,
            minutes,
            radius_m,
            cell_size,
        },
        output: raw.output.format,
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base).map_err(|e| match e {
        Error::Parse { row, column, message, .. } => Error::Parse {
            file: path.display().to_string(),
            row,
            column,
            message,
        },
        other => other,
    })
}
