//! Domain types shared by the scoring and ranking stages: the three-level
//! criterion hierarchy, shelter and district records, and the six capacity
//! indicators.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on every "weights sum to one" rule in the hierarchy.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Larger raw values are better.
    Benefit,
    /// Smaller raw values are better.
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoringRule {
    /// Ten natural-breaks classes scored 1..=10.
    #[serde(rename = "natural_breaks_10")]
    NaturalBreaks10,
    /// Pre-assigned low/mid/high levels scored 2/5/8.
    #[serde(rename = "manual_258")]
    Manual258,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDefinition {
    pub id: String,
    pub label: String,
    pub polarity: Polarity,
    pub scoring_rule: ScoringRule,
    #[serde(default)]
    pub units: String,
    /// Share of the parent criterion, in (0, 1].
    pub local_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub label: String,
    pub local_weight: f64,
    pub children: Vec<IndexDefinition>,
}

impl Criterion {
    pub fn child_weight_sum(&self) -> f64 {
        self.children.iter().map(|c| c.local_weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionHierarchy {
    pub goal_label: String,
    pub criteria: Vec<Criterion>,
}

/// One broken hierarchy rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.node, self.rule)
    }
}

fn check_weight(node: &str, w: f64, out: &mut Vec<Violation>) {
    if !(w.is_finite() && w > 0.0 && w <= 1.0) {
        out.push(Violation {
            node: node.to_string(),
            rule: format!("local weight {w} not in (0, 1]"),
        });
    }
}

/// Lists every broken invariant; an empty list means the hierarchy is usable.
pub fn validate_hierarchy(h: &CriterionHierarchy) -> Vec<Violation> {
    let mut out = Vec::new();
    if h.criteria.is_empty() {
        out.push(Violation {
            node: h.goal_label.clone(),
            rule: "hierarchy has no criteria".into(),
        });
        return out;
    }

    let mut seen = HashSet::new();
    for c in &h.criteria {
        if !seen.insert(c.id.as_str()) {
            out.push(Violation {
                node: c.id.clone(),
                rule: "duplicate id".into(),
            });
        }
        check_weight(&c.id, c.local_weight, &mut out);
        if c.children.is_empty() {
            out.push(Violation {
                node: c.id.clone(),
                rule: "criterion has no indexes".into(),
            });
            continue;
        }
        for idx in &c.children {
            if !seen.insert(idx.id.as_str()) {
                out.push(Violation {
                    node: idx.id.clone(),
                    rule: "duplicate id".into(),
                });
            }
            check_weight(&idx.id, idx.local_weight, &mut out);
        }
        let s = c.child_weight_sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            out.push(Violation {
                node: c.id.clone(),
                rule: format!("child local weights sum to {s}, expected 1"),
            });
        }
    }

    let s: f64 = h.criteria.iter().map(|c| c.local_weight).sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        out.push(Violation {
            node: h.goal_label.clone(),
            rule: format!("criterion local weights sum to {s}, expected 1"),
        });
    }
    out
}

/// Index weights relative to the goal, in hierarchy order.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalWeights(Vec<(String, f64)>);

impl GlobalWeights {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == id).map(|(_, w)| *w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, w)| (k.as_str(), *w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().map(|(_, w)| w).sum()
    }
}

/// `weight(i) = parent criterion weight × index local weight`.
pub fn global_weights(h: &CriterionHierarchy) -> Result<GlobalWeights> {
    let v = validate_hierarchy(h);
    if !v.is_empty() {
        return Err(Error::InvalidHierarchy(v));
    }
    Ok(GlobalWeights(
        h.criteria
            .iter()
            .flat_map(|c| {
                c.children
                    .iter()
                    .map(move |i| (i.id.clone(), c.local_weight * i.local_weight))
            })
            .collect(),
    ))
}

impl CriterionHierarchy {
    pub fn indexes(&self) -> impl Iterator<Item = &IndexDefinition> {
        self.criteria.iter().flat_map(|c| c.children.iter())
    }

    pub fn index_ids(&self) -> Vec<&str> {
        self.indexes().map(|i| i.id.as_str()).collect()
    }

    pub fn criterion_weights(&self) -> Vec<f64> {
        self.criteria.iter().map(|c| c.local_weight).collect()
    }

    /// Builds a hierarchy from goal-relative index weights grouped by
    /// criterion. Criterion weights become the sums of their children.
    pub fn from_global_weights(
        goal_label: impl Into<String>,
        groups: Vec<(String, String, Vec<(IndexDefinition, f64)>)>,
    ) -> Self {
        let criteria = groups
            .into_iter()
            .map(|(id, label, children)| {
                let total: f64 = children.iter().map(|(_, w)| w).sum();
                Criterion {
                    id,
                    label,
                    local_weight: total,
                    children: children
                        .into_iter()
                        .map(|(mut d, w)| {
                            d.local_weight = w / total;
                            d
                        })
                        .collect(),
                }
            })
            .collect();
        CriterionHierarchy {
            goal_label: goal_label.into(),
            criteria,
        }
    }
}

/// The Wuhan evaluation system: four criteria over thirteen indexes with
/// the published goal-relative weights.
pub fn reference_hierarchy() -> CriterionHierarchy {
    use Polarity::*;
    use ScoringRule::*;
    let idx = |id: &str, label: &str, polarity, rule, units: &str, w: f64| {
        (
            IndexDefinition {
                id: id.into(),
                label: label.into(),
                polarity,
                scoring_rule: rule,
                units: units.into(),
                local_weight: 0.0,
            },
            w,
        )
    };
    CriterionHierarchy::from_global_weights(
        "Suitability of emergency shelters",
        vec![
            (
                "B1".into(),
                "Effectiveness".into(),
                vec![
                    idx("C1", "Refuge area", Benefit, NaturalBreaks10, "ha", 0.0930),
                    idx("C2", "Capacity", Benefit, NaturalBreaks10, "persons", 0.0930),
                    idx("C3", "Functional facilities", Benefit, Manual258, "level", 0.0465),
                ],
            ),
            (
                "B2".into(),
                "Safety".into(),
                vec![
                    idx("C4", "Topography", Cost, NaturalBreaks10, "degrees slope", 0.0841),
                    idx(
                        "C5",
                        "Distance from major hazard installations",
                        Benefit,
                        NaturalBreaks10,
                        "m",
                        0.1780,
                    ),
                    idx(
                        "C6",
                        "Avoid geological hazard-prone areas",
                        Benefit,
                        NaturalBreaks10,
                        "m",
                        0.0519,
                    ),
                    idx(
                        "C7",
                        "Avoid hidden points of hydrology",
                        Benefit,
                        NaturalBreaks10,
                        "m",
                        0.0519,
                    ),
                ],
            ),
            (
                "B3".into(),
                "Reachability".into(),
                vec![
                    idx("C8", "Distance from nearest hospital", Cost, NaturalBreaks10, "m", 0.0525),
                    idx("C9", "Distance from nearest fire station", Cost, NaturalBreaks10, "m", 0.0597),
                    idx(
                        "C10",
                        "Distance from nearest public security unit",
                        Cost,
                        NaturalBreaks10,
                        "m",
                        0.0294,
                    ),
                    idx("C11", "Road accessibility", Benefit, Manual258, "level", 0.1362),
                ],
            ),
            (
                "B4".into(),
                "Supportability".into(),
                vec![
                    idx("C12", "Daily management", Benefit, NaturalBreaks10, "rating", 0.0928),
                    idx("C13", "Sustainable development", Benefit, Manual258, "level", 0.0310),
                ],
            ),
        ],
    )
}

/// Planar coordinates in projected meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    Mid,
    High,
}

impl Level {
    pub fn score(self) -> u8 {
        match self {
            Level::Low => 2,
            Level::Mid => 5,
            Level::High => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Mid => "mid",
            Level::High => "high",
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Level::Low),
            "mid" | "medium" => Ok(Level::Mid),
            "high" => Ok(Level::High),
            other => Err(other.to_string()),
        }
    }
}

/// Raw value of one index for one shelter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Measured(f64),
    Level(Level),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShelterRecord {
    pub id: String,
    pub name: String,
    pub district: String,
    pub location: Point,
    pub raw_values: BTreeMap<String, RawValue>,
}

impl ShelterRecord {
    /// Checks the record carries exactly the hierarchy's indexes with values
    /// of the kind each scoring rule expects.
    pub fn validate(&self, h: &CriterionHierarchy) -> Result<()> {
        if !(self.location.x.is_finite() && self.location.y.is_finite()) {
            return Err(Error::Invalid(format!(
                "shelter {}: location is not finite",
                self.id
            )));
        }
        for idx in h.indexes() {
            match (self.raw_values.get(&idx.id), idx.scoring_rule) {
                (None, _) => {
                    return Err(Error::MissingIndex {
                        record: self.id.clone(),
                        index: idx.id.clone(),
                    })
                }
                (Some(RawValue::Measured(v)), ScoringRule::NaturalBreaks10) if v.is_finite() => {}
                (Some(RawValue::Level(_)), ScoringRule::Manual258) => {}
                (Some(v), _) => {
                    return Err(Error::Invalid(format!(
                        "shelter {} index {}: value {:?} does not fit rule {:?}",
                        self.id, idx.id, v, idx.scoring_rule
                    )))
                }
            }
        }
        if self.raw_values.len() != h.indexes().count() {
            let known: HashSet<&str> = h.index_ids().into_iter().collect();
            let extra: Vec<&str> = self
                .raw_values
                .keys()
                .map(String::as_str)
                .filter(|k| !known.contains(k))
                .collect();
            return Err(Error::Invalid(format!(
                "shelter {}: unknown indexes {}",
                self.id,
                extra.join(",")
            )));
        }
        Ok(())
    }
}

/// Per-district statistics, with populations in persons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistrictRecord {
    pub name: String,
    pub area_km2: f64,
    pub permanent_population: f64,
    pub population_density: Option<f64>,
    pub shelter_count: u32,
    pub total_refuge_area_ha: f64,
    pub total_refuge_population: f64,
    /// Zone value identifying the district in a zone raster, if any.
    pub zone: Option<i64>,
}

impl DistrictRecord {
    /// Density implied by population and area, persons per hectare.
    pub fn implied_density(&self) -> f64 {
        self.permanent_population / (self.area_km2 * 100.0)
    }

    /// Rejects nonpositive area or population; returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.area_km2 > 0.0) {
            return Err(Error::Invalid(format!(
                "district {}: area {} km² must be positive",
                self.name, self.area_km2
            )));
        }
        if !(self.permanent_population > 0.0) {
            return Err(Error::Invalid(format!(
                "district {}: permanent population {} must be positive",
                self.name, self.permanent_population
            )));
        }
        if !(self.total_refuge_area_ha >= 0.0 && self.total_refuge_population >= 0.0) {
            return Err(Error::Invalid(format!(
                "district {}: refuge totals must be nonnegative",
                self.name
            )));
        }
        let mut warnings = Vec::new();
        if let Some(d) = self.population_density {
            if d < 0.0 {
                return Err(Error::Invalid(format!(
                    "district {}: negative population density",
                    self.name
                )));
            }
            let implied = self.implied_density();
            if (d - implied).abs() > 0.01 * implied {
                warnings.push(format!(
                    "district {}: density {d} cap/ha differs from implied {implied:.2} by more than 1%",
                    self.name
                ));
            }
        }
        Ok(warnings)
    }
}

/// The six capacity indicators of one district.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityIndicators {
    /// ha
    pub total_refuge_area: f64,
    /// persons
    pub total_refuge_population: f64,
    /// ha
    pub effective_refuge_range: f64,
    /// persons
    pub effective_refuge_population: f64,
    /// m² per person
    pub avg_refuge_area_per_person: f64,
    /// m² per person
    pub avg_effective_refuge_area_per_person: f64,
}

impl CapacityIndicators {
    pub const NAMES: [&'static str; 6] = [
        "total_refuge_area",
        "total_refuge_population",
        "effective_refuge_range",
        "effective_refuge_population",
        "avg_refuge_area_per_person",
        "avg_effective_refuge_area_per_person",
    ];

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.total_refuge_area,
            self.total_refuge_population,
            self.effective_refuge_range,
            self.effective_refuge_population,
            self.avg_refuge_area_per_person,
            self.avg_effective_refuge_area_per_person,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        CapacityIndicators {
            total_refuge_area: v[0],
            total_refuge_population: v[1],
            effective_refuge_range: v[2],
            effective_refuge_population: v[3],
            avg_refuge_area_per_person: v[4],
            avg_effective_refuge_area_per_person: v[5],
        }
    }

    pub fn validate(&self, permanent_population: Option<f64>) -> Result<()> {
        for (name, v) in Self::NAMES.iter().zip(self.to_array()) {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Invalid(format!("indicator {name} = {v} must be ≥ 0")));
            }
        }
        if let Some(p) = permanent_population {
            if self.effective_refuge_population > p {
                return Err(Error::Invalid(format!(
                    "effective refuge population {} exceeds permanent population {p}",
                    self.effective_refuge_population
                )));
            }
        }
        Ok(())
    }
}
