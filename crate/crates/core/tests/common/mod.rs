//! Independent oracles and fixture loaders shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;

use shelter_eval::model::Point;

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

/// Rows of a small CSV without quoting, `#` lines skipped.
pub fn read_csv(rel: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(data(rel)).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let head = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (head, rows)
}

/// Printed suitability rows: (district, shelter, B1..B4, P).
pub fn reference_scores() -> Vec<(String, String, [f64; 4], f64)> {
    let (_, rows) = read_csv("reference_scores.csv");
    rows.into_iter()
        .map(|r| {
            let b = [1, 2, 3, 4].map(|i| r[i + 1].parse().unwrap());
            (r[0].clone(), r[1].clone(), b, r[6].parse().unwrap())
        })
        .collect()
}

/// Principal eigenpair from a dense eigen-decomposition: the largest real
/// eigenvalue, and its eigenvector from the null space of `A − λI`.
pub fn eigen_oracle(a: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let lambda = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shifted = &m - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.unwrap();
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let v: Vec<f64> = vt.row(k).iter().copied().collect();
    let s: f64 = v.iter().sum();
    (lambda, v.into_iter().map(|x| x / s).collect())
}

/// Within-class sum of squares, computed directly.
pub fn sse(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

/// Every way to cut the sorted values into `k` nonempty runs without
/// separating equal values. Returns (cost, cuts) for the cheapest, keeping
/// the lexicographically first cut vector among costs within `tol`.
pub fn brute_force_jenks(sorted: &[f64], k: usize, tol: f64) -> (f64, Vec<usize>) {
    let n = sorted.len();
    let allowed: Vec<usize> = (1..n).filter(|&j| sorted[j - 1] < sorted[j]).collect();
    let mut all = Vec::new();
    let mut cur = Vec::new();
    fn rec(allowed: &[usize], from: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..allowed.len() {
            cur.push(allowed[i]);
            rec(allowed, i + 1, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(&allowed, 0, k - 1, &mut cur, &mut all);
    let cost = |cuts: &[usize]| {
        let mut b = vec![0];
        b.extend_from_slice(cuts);
        b.push(n);
        b.windows(2).map(|w| sse(&sorted[w[0]..w[1]])).sum::<f64>()
    };
    let best = all.iter().map(|c| cost(c)).fold(f64::INFINITY, f64::min);
    let first = all.into_iter().find(|c| cost(c) <= best + tol).unwrap();
    (best, first)
}

/// Monte Carlo estimate of the union area of discs clipped to a rectangle.
/// Points are bucketed on a square lattice of side `radius` so each sample
/// checks at most nine buckets.
pub fn monte_carlo_union_area(
    points: &[Point],
    radius: f64,
    (x0, y0, x1, y1): (f64, f64, f64, f64),
    samples: usize,
    seed: u64,
) -> f64 {
    use rand::{Rng, SeedableRng};
    use std::collections::HashMap;
    let mut buckets: HashMap<(i64, i64), Vec<Point>> = HashMap::new();
    for p in points {
        let key = ((p.x / radius).floor() as i64, (p.y / radius).floor() as i64);
        buckets.entry(key).or_default().push(*p);
    }
    let r2 = radius * radius;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = rng.random_range(x0..x1);
        let y = rng.random_range(y0..y1);
        let (bx, by) = ((x / radius).floor() as i64, (y / radius).floor() as i64);
        let inside = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                buckets.get(&(bx + dx, by + dy)).is_some_and(|v| {
                    v.iter().any(|p| (p.x - x).powi(2) + (p.y - y).powi(2) <= r2)
                })
            })
        });
        hits += inside as usize;
    }
    (x1 - x0) * (y1 - y0) * hits as f64 / samples as f64
}
