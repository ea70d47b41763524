//! Per-shelter suitability: index scoring, criterion aggregation, the
//! composite index and its letter grade.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::jenks;
use crate::model::{CriterionHierarchy, Polarity, RawValue, ScoringRule, ShelterRecord};

pub const NATURAL_CLASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    A,
    B,
    C,
    D,
    E,
}

impl Grade {
    pub const ALL: [Grade; 5] = [Grade::A, Grade::B, Grade::C, Grade::D, Grade::E];

    pub fn description(self) -> &'static str {
        match self {
            Grade::A => "better suitability",
            Grade::B => "good suitability",
            Grade::C => "medium suitability",
            Grade::D => "poor suitability",
            Grade::E => "not suitable",
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Grade bands are half-open `(lo, hi]`, except E which includes 0.
pub fn classify_grade(p: f64) -> Result<Grade> {
    if !(0.0..=10.0).contains(&p) {
        return Err(Error::domain(p, "composite index must lie in [0, 10]"));
    }
    Ok(if p <= 2.0 {
        Grade::E
    } else if p <= 4.0 {
        Grade::D
    } else if p <= 6.0 {
        Grade::C
    } else if p <= 8.0 {
        Grade::B
    } else {
        Grade::A
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexScoring {
    pub scores: Vec<u8>,
    pub warnings: Vec<String>,
}

fn round_half_up(x: f64) -> u8 {
    (x + 0.5).floor() as u8
}

/// Scores one index across all shelters. `raw` holds one value per shelter.
pub fn score_index(raw: &[RawValue], polarity: Polarity, rule: ScoringRule) -> Result<IndexScoring> {
    match rule {
        ScoringRule::Manual258 => {
            let scores = raw
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    RawValue::Level(l) => Ok(l.score()),
                    RawValue::Measured(x) => Err(Error::UnknownLevel {
                        record: format!("#{i}"),
                        value: x.to_string(),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(IndexScoring {
                scores,
                warnings: Vec::new(),
            })
        }
        ScoringRule::NaturalBreaks10 => {
            let values = raw
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    RawValue::Measured(x) => Ok(*x),
                    RawValue::Level(l) => Err(Error::Invalid(format!(
                        "record #{i}: level {:?} given for a natural-breaks index",
                        l.as_str()
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            score_natural(&values, polarity)
        }
    }
}

fn score_natural(values: &[f64], polarity: Polarity) -> Result<IndexScoring> {
    let mut warnings = Vec::new();
    if values.is_empty() {
        return Ok(IndexScoring {
            scores: Vec::new(),
            warnings,
        });
    }
    let distinct = jenks::distinct_count(&jenks::sorted_copy(values)?);
    let k = distinct.min(NATURAL_CLASSES);
    if k == 1 {
        warnings.push("all values equal; every record scores 1".to_string());
        return Ok(IndexScoring {
            scores: vec![1; values.len()],
            warnings,
        });
    }
    if k < NATURAL_CLASSES {
        warnings.push(format!(
            "only {distinct} distinct values; using {k} classes rescaled onto 1..=10"
        ));
    }
    let classes = jenks::jenks_classes(values, k)?;
    let scores = classes
        .into_iter()
        .map(|c| {
            let s = if k == NATURAL_CLASSES {
                c as u8 + 1
            } else {
                round_half_up(1.0 + c as f64 * 9.0 / (k - 1) as f64)
            };
            match polarity {
                Polarity::Benefit => s,
                Polarity::Cost => 11 - s,
            }
        })
        .collect();
    Ok(IndexScoring { scores, warnings })
}

/// Weighted mean of each criterion's index scores. `scores` follows
/// `h.indexes()` order.
pub fn criterion_scores(scores: &[f64], h: &CriterionHierarchy) -> Result<Vec<f64>> {
    let expected = h.indexes().count();
    if scores.len() != expected {
        return Err(Error::Invalid(format!(
            "expected {expected} index scores, got {}",
            scores.len()
        )));
    }
    let mut it = scores.iter();
    Ok(h.criteria
        .iter()
        .map(|c| {
            let (num, den) = c
                .children
                .iter()
                .zip(it.by_ref())
                .fold((0.0, 0.0), |(n, d), (i, f)| (n + i.local_weight * f, d + i.local_weight));
            num / den
        })
        .collect())
}

pub fn composite_index(b: &[f64], weights: &[f64]) -> Result<f64> {
    if b.len() != weights.len() {
        return Err(Error::Invalid(format!(
            "{} criterion scores but {} weights",
            b.len(),
            weights.len()
        )));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > crate::model::WEIGHT_SUM_TOLERANCE {
        return Err(Error::Invalid(format!("criterion weights sum to {s}, expected 1")));
    }
    Ok(b.iter().zip(weights).map(|(x, w)| x * w).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityResult {
    pub shelter_id: String,
    pub name: String,
    pub district: String,
    pub index_scores: Vec<u8>,
    pub criterion_scores: Vec<f64>,
    pub composite: f64,
    pub grade: Grade,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuitabilityReport {
    pub index_ids: Vec<String>,
    pub criterion_ids: Vec<String>,
    pub results: Vec<SuitabilityResult>,
    pub warnings: Vec<String>,
}

impl SuitabilityReport {
    pub fn grade_histogram(&self) -> [(Grade, usize); 5] {
        Grade::ALL.map(|g| (g, self.results.iter().filter(|r| r.grade == g).count()))
    }
}

/// Scores every shelter against the hierarchy. Output keeps input order.
pub fn evaluate(
    shelters: &[ShelterRecord],
    h: &CriterionHierarchy,
    exec: Execution,
) -> Result<SuitabilityReport> {
    let violations = crate::model::validate_hierarchy(h);
    if !violations.is_empty() {
        return Err(Error::InvalidHierarchy(violations));
    }
    for s in shelters {
        s.validate(h)?;
    }
    let indexes: Vec<_> = h.indexes().collect();
    let columns = exec::map(exec, &indexes, |idx| {
        let raw: Vec<RawValue> = shelters.iter().map(|s| s.raw_values[&idx.id]).collect();
        score_index(&raw, idx.polarity, idx.scoring_rule).map_err(|e| match e {
            Error::UnknownLevel { record, value } => Error::UnknownLevel {
                record: record
                    .strip_prefix('#')
                    .and_then(|i| i.parse::<usize>().ok())
                    .map(|i| shelters[i].id.clone())
                    .unwrap_or(record),
                value,
            },
            other => other,
        })
    });
    let mut warnings = Vec::new();
    let mut table = Vec::with_capacity(indexes.len());
    for (idx, col) in indexes.iter().zip(columns) {
        let col = col?;
        warnings.extend(col.warnings.into_iter().map(|w| format!("{}: {w}", idx.id)));
        table.push(col.scores);
    }

    let weights = h.criterion_weights();
    let rows: Vec<usize> = (0..shelters.len()).collect();
    let results = exec::map(exec, &rows, |&r| {
        let f: Vec<u8> = table.iter().map(|col| col[r]).collect();
        let ff: Vec<f64> = f.iter().map(|&x| x as f64).collect();
        let b = criterion_scores(&ff, h)?;
        let p = composite_index(&b, &weights)?;
        Ok(SuitabilityResult {
            shelter_id: shelters[r].id.clone(),
            name: shelters[r].name.clone(),
            district: shelters[r].district.clone(),
            index_scores: f,
            criterion_scores: b,
            composite: p,
            grade: classify_grade(p)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(SuitabilityReport {
        index_ids: indexes.iter().map(|i| i.id.clone()).collect(),
        criterion_ids: h.criteria.iter().map(|c| c.id.clone()).collect(),
        results,
        warnings,
    })
}
