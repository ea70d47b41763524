//! Natural-breaks classification by exact dynamic programming over the
//! sorted values (Fisher's optimal partition of an ordered sequence).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior class boundaries. Class `c` holds values in
/// `(breaks[c-1], breaks[c]]`; each break is the largest value of the class
/// below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakSet {
    breaks: Vec<f64>,
}

impl BreakSet {
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn classes(&self) -> usize {
        self.breaks.len() + 1
    }

    /// Zero-based class of `v`.
    pub fn classify(&self, v: f64) -> usize {
        self.breaks.partition_point(|b| *b < v)
    }
}

/// Within-class sum of squared deviations of `x[i..j]`, from prefix sums.
struct SegmentCost {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl SegmentCost {
    fn new(sorted: &[f64]) -> Self {
        let shift = sorted[sorted.len() / 2];
        let mut sum = Vec::with_capacity(sorted.len() + 1);
        let mut sq = Vec::with_capacity(sorted.len() + 1);
        let (mut s, mut q) = (0.0, 0.0);
        sum.push(0.0);
        sq.push(0.0);
        for v in sorted {
            let d = v - shift;
            s += d;
            q += d * d;
            sum.push(s);
            sq.push(q);
        }
        SegmentCost { sum, sq }
    }

    fn cost(&self, i: usize, j: usize) -> f64 {
        let n = (j - i) as f64;
        let s = self.sum[j] - self.sum[i];
        (self.sq[j] - self.sq[i] - s * s / n).max(0.0)
    }
}

/// Relative slack under which two partition costs count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Optimal partition of the sorted values into `k` contiguous classes.
///
/// Equal values always share a class. Among partitions whose cost is tied
/// (within [`TIE_TOLERANCE`]) the lexicographically smallest break vector wins.
pub fn jenks_breaks(values: &[f64], k: usize) -> Result<BreakSet> {
    let cuts = optimal_cuts(values, k)?;
    let sorted = sorted_copy(values)?;
    Ok(BreakSet {
        breaks: cuts.iter().map(|&j| sorted[j - 1]).collect(),
    })
}

pub fn sorted_copy(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(*v, "classification input must be finite"));
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    Ok(x)
}

pub fn distinct_count(sorted: &[f64]) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted.windows(2).filter(|w| w[0] < w[1]).count()
}

/// Cut positions into the sorted copy of `values`: class `c` spans
/// `sorted[cuts[c-1]..cuts[c]]`.
pub fn optimal_cuts(values: &[f64], k: usize) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::InfeasibleClassing {
            classes: k,
            distinct: 0,
        });
    }
    let x = sorted_copy(values)?;
    let n = x.len();
    let distinct = distinct_count(&x);
    if k == 0 || k > distinct {
        return Err(Error::InfeasibleClassing {
            classes: k,
            distinct,
        });
    }
    if k == 1 {
        return Ok(Vec::new());
    }

    let seg = SegmentCost::new(&x);
    let allowed: Vec<usize> = (1..n).filter(|&j| x[j - 1] < x[j]).collect();
    let eps = TIE_TOLERANCE * (1.0 + seg.cost(0, n));

    // tail[c][i]: best cost of x[i..n] split into c + 1 classes.
    let mut tail = vec![vec![f64::INFINITY; n + 1]; k];
    for i in 0..n {
        tail[0][i] = seg.cost(i, n);
    }
    for c in 1..k {
        for i in 0..n {
            let mut best = f64::INFINITY;
            for &j in allowed.iter().filter(|&&j| j > i) {
                let t = tail[c - 1][j];
                if t.is_finite() {
                    best = best.min(seg.cost(i, j) + t);
                }
            }
            tail[c][i] = best;
        }
    }

    let mut cuts = Vec::with_capacity(k - 1);
    let mut start = 0;
    for c in (1..k).rev() {
        let target = tail[c][start] + eps;
        let j = allowed
            .iter()
            .copied()
            .filter(|&j| j > start)
            .find(|&j| {
                let t = tail[c - 1][j];
                t.is_finite() && seg.cost(start, j) + t <= target
            })
            .expect("a feasible cut exists when k <= distinct values");
        cuts.push(j);
        start = j;
    }
    Ok(cuts)
}

/// Zero-based class of each input value, in input order.
pub fn jenks_classes(values: &[f64], k: usize) -> Result<Vec<usize>> {
    let b = jenks_breaks(values, k)?;
    Ok(values.iter().map(|v| b.classify(*v)).collect())
}
