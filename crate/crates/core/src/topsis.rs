//! Ideal-point ranking of districts on the six capacity indicators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Polarity, WEIGHT_SUM_TOLERANCE};

/// Where the column weight enters the distance radicand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceVariant {
    /// `sqrt(Σ w_j (Z_j − z_ij)²)`
    #[default]
    Linear,
    /// `sqrt(Σ (w_j (Z_j − z_ij))²)`, i.e. distances on the weighted matrix.
    Squared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub directions: Vec<Polarity>,
}

impl DecisionMatrix {
    pub fn new(
        rows: Vec<String>,
        columns: Vec<String>,
        values: Vec<Vec<f64>>,
        weights: Vec<f64>,
        directions: Vec<Polarity>,
    ) -> Result<Self> {
        let n = columns.len();
        if n == 0 || rows.is_empty() {
            return Err(Error::Invalid("decision matrix needs at least one row and column".into()));
        }
        if values.len() != rows.len() {
            return Err(Error::Invalid(format!(
                "{} row names for {} value rows",
                rows.len(),
                values.len()
            )));
        }
        if weights.len() != n || directions.len() != n {
            return Err(Error::Invalid(format!(
                "{n} columns but {} weights and {} directions",
                weights.len(),
                directions.len()
            )));
        }
        for (name, row) in rows.iter().zip(&values) {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "row {name} has {} values, expected {n}",
                    row.len()
                )));
            }
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Invalid(format!(
                    "row {name} column {}: value {v} must be a nonnegative real",
                    columns[j]
                )));
            }
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && **w <= 1.0)) {
            return Err(Error::Invalid(format!("column weight {w} not in (0, 1]")));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::Invalid(format!("column weights sum to {s}, expected 1")));
        }
        Ok(DecisionMatrix {
            rows,
            columns,
            values,
            weights,
            directions,
        })
    }

    /// All-benefit matrix with the given weights.
    pub fn benefit(
        rows: Vec<String>,
        columns: Vec<String>,
        values: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let d = vec![Polarity::Benefit; columns.len()];
        Self::new(rows, columns, values, weights, d)
    }
}

/// Expands first-level weights with their second-level shares into one
/// weight per column: `w = first × second`.
pub fn composite_weights(groups: &[(f64, Vec<f64>)]) -> Vec<f64> {
    groups
        .iter()
        .flat_map(|(w, shares)| shares.iter().map(move |s| w * s))
        .collect()
}

/// Vector normalization: every column scaled to unit Euclidean norm.
pub fn normalize(x: &DecisionMatrix) -> Result<Vec<Vec<f64>>> {
    let norms: Vec<f64> = (0..x.columns.len())
        .map(|j| x.values.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|n| *n == 0.0) {
        return Err(Error::ZeroColumn(x.columns[j].clone()));
    }
    Ok(x.values
        .iter()
        .map(|r| r.iter().zip(&norms).map(|(v, n)| v / n).collect())
        .collect())
}

/// Best and worst value of each column according to its direction.
pub fn ideal_solutions(z: &[Vec<f64>], directions: &[Polarity]) -> (Vec<f64>, Vec<f64>) {
    let mut best = Vec::with_capacity(directions.len());
    let mut worst = Vec::with_capacity(directions.len());
    for (j, d) in directions.iter().enumerate() {
        let (lo, hi) = z
            .iter()
            .map(|r| r[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        match d {
            Polarity::Benefit => {
                best.push(hi);
                worst.push(lo);
            }
            Polarity::Cost => {
                best.push(lo);
                worst.push(hi);
            }
        }
    }
    (best, worst)
}

fn distance(row: &[f64], target: &[f64], w: &[f64], variant: DistanceVariant) -> f64 {
    row.iter()
        .zip(target)
        .zip(w)
        .map(|((z, t), w)| {
            let d = t - z;
            match variant {
                DistanceVariant::Linear => w * d * d,
                DistanceVariant::Squared => (w * d) * (w * d),
            }
        })
        .sum::<f64>()
        .sqrt()
}

pub fn weighted_distances(
    z: &[Vec<f64>],
    best: &[f64],
    worst: &[f64],
    w: &[f64],
    variant: DistanceVariant,
) -> (Vec<f64>, Vec<f64>) {
    z.iter()
        .map(|r| (distance(r, best, w, variant), distance(r, worst, w, variant)))
        .unzip()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisRow {
    pub name: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub closeness: f64,
    pub rank: usize,
}

/// Rows in input order with their rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisResult {
    pub rows: Vec<TopsisRow>,
}

impl TopsisResult {
    /// Rows ordered by rank.
    pub fn ranked(&self) -> Vec<&TopsisRow> {
        let mut v: Vec<&TopsisRow> = self.rows.iter().collect();
        v.sort_by_key(|r| r.rank);
        v
    }
}

/// `S = D⁻ / (D⁺ + D⁻)`; ranks by descending S, ties kept in input order.
pub fn closeness_and_rank(names: &[String], d_plus: &[f64], d_minus: &[f64]) -> Result<TopsisResult> {
    let mut rows = Vec::with_capacity(names.len());
    for ((name, &dp), &dm) in names.iter().zip(d_plus).zip(d_minus) {
        let total = dp + dm;
        if total == 0.0 {
            return Err(Error::DegenerateRow(name.clone()));
        }
        rows.push(TopsisRow {
            name: name.clone(),
            d_plus: dp,
            d_minus: dm,
            closeness: dm / total,
            rank: 0,
        });
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].closeness.total_cmp(&rows[a].closeness));
    for (rank, i) in order.into_iter().enumerate() {
        rows[i].rank = rank + 1;
    }
    Ok(TopsisResult { rows })
}

pub fn evaluate(x: &DecisionMatrix, variant: DistanceVariant) -> Result<TopsisResult> {
    let z = normalize(x)?;
    let (best, worst) = ideal_solutions(&z, &x.directions);
    let (dp, dm) = weighted_distances(&z, &best, &worst, &x.weights, variant);
    closeness_and_rank(&x.rows, &dp, &dm)
}
