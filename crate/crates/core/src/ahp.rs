//! Pairwise-comparison weighting and the consistency test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Saaty's random consistency index for orders 1..=15.
pub const RANDOM_INDEX: [f64; 15] = [
    0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59,
];

pub const MAX_ORDER: usize = 15;
/// Judgments are accepted when CR is strictly below this.
pub const CR_THRESHOLD: f64 = 0.1;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERATIONS: usize = 10_000;
const RECIPROCAL_TOLERANCE: f64 = 1e-9;

/// A positive reciprocal judgment matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMatrix {
    n: usize,
    a: Vec<f64>,
}

impl PairwiseMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if !(2..=MAX_ORDER).contains(&n) {
            return Err(Error::UnsupportedOrder(n));
        }
        let mut a = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMatrix {
                    row: i,
                    col: row.len(),
                    message: format!("row has {} entries, expected {n}", row.len()),
                });
            }
            a.extend_from_slice(row);
        }
        let m = PairwiseMatrix { n, a };
        m.check()?;
        Ok(m)
    }

    /// The consistent matrix `a[i][j] = w[i] / w[j]`.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        let rows = w
            .iter()
            .map(|wi| w.iter().map(|wj| wi / wj).collect())
            .collect();
        let mut m = Self::new_unchecked(rows);
        for i in 0..m.n {
            m.a[i * m.n + i] = 1.0;
        }
        m.check()?;
        Ok(m)
    }

    /// Builds a reciprocal matrix from its strict upper triangle, row-major.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Invalid(format!(
                "upper triangle of order {n} needs {} entries, got {}",
                n * n.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        let mut rows = vec![vec![1.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                rows[i][j] = upper[k];
                rows[j][i] = 1.0 / upper[k];
                k += 1;
            }
        }
        Self::new(rows)
    }

    fn new_unchecked(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        PairwiseMatrix {
            n,
            a: rows.into_iter().flatten().collect(),
        }
    }

    fn check(&self) -> Result<()> {
        if !(2..=MAX_ORDER).contains(&self.n) {
            return Err(Error::UnsupportedOrder(self.n));
        }
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidMatrix {
                        row: i,
                        col: j,
                        message: format!("entry {v} is not a positive real"),
                    });
                }
                if i == j && v != 1.0 {
                    return Err(Error::InvalidMatrix {
                        row: i,
                        col: j,
                        message: format!("diagonal entry {v} must be 1"),
                    });
                }
                if j > i && (v * self.get(j, i) - 1.0).abs() > RECIPROCAL_TOLERANCE {
                    return Err(Error::InvalidMatrix {
                        row: j,
                        col: i,
                        message: format!(
                            "entry {} is not the reciprocal of ({i}, {j}) = {v}",
                            self.get(j, i)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.a.chunks(self.n)
    }

    fn mul(&self, w: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = row.iter().zip(w).map(|(a, b)| a * b).sum();
        }
    }

    /// Mean of `(M·w)_i / w_i`.
    pub fn lambda_estimate(&self, w: &[f64]) -> f64 {
        let mut mw = vec![0.0; self.n];
        self.mul(w, &mut mw);
        mw.iter().zip(w).map(|(a, b)| a / b).sum::<f64>() / self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMethod {
    #[default]
    Eigenvector,
    GeometricMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub ci: f64,
    pub cr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightResult {
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    pub consistent: bool,
}

/// Principal eigenvector by power iteration, normalized to sum one each step.
fn power_iteration(m: &PairwiseMatrix) -> Result<Vec<f64>> {
    let n = m.order();
    let mut w = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERATIONS {
        m.mul(&w, &mut next);
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        residual = w
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut w, &mut next);
        if residual < POWER_TOLERANCE {
            return Ok(w);
        }
    }
    Err(Error::NotConverged {
        iterations: POWER_MAX_ITERATIONS,
        residual,
    })
}

fn geometric_mean(m: &PairwiseMatrix) -> Vec<f64> {
    let n = m.order() as f64;
    let g: Vec<f64> = m
        .rows()
        .map(|r| (r.iter().map(|x| x.ln()).sum::<f64>() / n).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}

pub fn derive_weights(m: &PairwiseMatrix, method: WeightMethod) -> Result<WeightResult> {
    let weights = match method {
        WeightMethod::Eigenvector => power_iteration(m)?,
        WeightMethod::GeometricMean => geometric_mean(m),
    };
    let lambda_max = m.lambda_estimate(&weights);
    let c = consistency_ratio(lambda_max.max(m.order() as f64), m.order())?;
    Ok(WeightResult {
        weights,
        lambda_max,
        ci: c.ci,
        cr: c.cr,
        consistent: c.pass,
    })
}

/// `CI = (λ − n)/(n − 1)`, `CR = CI / RI(n)`; orders up to two always pass.
pub fn consistency_ratio(lambda_max: f64, n: usize) -> Result<Consistency> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    if !(lambda_max.is_finite() && lambda_max >= n as f64 - 1e-9) {
        return Err(Error::domain(
            lambda_max,
            format!("lambda_max must be at least the order {n}"),
        ));
    }
    let ci = ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0);
    if n <= 2 {
        return Ok(Consistency {
            ci,
            cr: 0.0,
            pass: true,
        });
    }
    let cr = ci / RANDOM_INDEX[n - 1];
    Ok(Consistency {
        ci,
        cr,
        pass: cr < CR_THRESHOLD,
    })
}
