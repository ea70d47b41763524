//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any failure.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shelter_eval::ahp::{consistency_ratio, derive_weights, PairwiseMatrix, WeightMethod, RANDOM_INDEX};
use shelter_eval::geocoverage::{coverage_area, rasterize_buffers, GridSpec};
use shelter_eval::io::{parse_districts, parse_indicators};
use shelter_eval::jenks::{optimal_cuts, sorted_copy, distinct_count, TIE_TOLERANCE};
use shelter_eval::model::{global_weights, reference_hierarchy, CapacityIndicators, CriterionHierarchy, Point};
use shelter_eval::suitability::{classify_grade, composite_index, Grade};
use shelter_eval::topsis::{composite_weights, evaluate, normalize, DecisionMatrix, DistanceVariant};
use shelter_eval::Execution;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    check((a - b).abs() <= tol, || format!("{what}: {a:.6} vs {b:.6} (tol {tol:e})"))
}

fn capacity_matrix() -> DecisionMatrix {
    let rows = parse_indicators(&common::data("indicators.csv")).unwrap();
    DecisionMatrix::benefit(
        rows.iter().map(|r| r.0.clone()).collect(),
        CapacityIndicators::NAMES.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.1.to_array().to_vec()).collect(),
        composite_weights(&[(0.35, vec![0.5, 0.5]), (0.35, vec![0.5, 0.5]), (0.3, vec![0.5, 0.5])]),
    )
    .unwrap()
}

fn topsis_regression() -> Outcome {
    let expected = [
        ("Hongshan District", 0.2797, 0.4309, 0.6063),
        ("Wuchang District", 0.3274, 0.3820, 0.5385),
        ("Hanyang District", 0.3437, 0.2670, 0.4372),
        ("Qiaokou District", 0.3382, 0.2590, 0.4337),
        ("Qingshan District", 0.4035, 0.2895, 0.4177),
        ("Jiang'an District", 0.4679, 0.1501, 0.2429),
        ("Jianghan District", 0.4955, 0.0736, 0.1293),
    ];
    let r = evaluate(&capacity_matrix(), DistanceVariant::Linear).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (row, (name, dp, dm, s)) in r.ranked().into_iter().zip(expected) {
        check(row.name == name, || format!("rank {}: {} instead of {name}", row.rank, row.name))?;
        within(row.d_plus, dp, 5e-4, &format!("{name} D+"))?;
        within(row.d_minus, dm, 5e-4, &format!("{name} D-"))?;
        within(row.closeness, s, 5e-4, &format!("{name} S"))?;
        worst = worst.max((row.d_plus - dp).abs()).max((row.d_minus - dm).abs()).max((row.closeness - s).abs());
    }
    Ok(format!("7 districts in order, max deviation {worst:.1e}"))
}

fn standardization() -> Outcome {
    let t = parse_districts(&common::data("districts.csv")).map_err(|e| e.to_string())?;
    let (_, published) = common::read_csv("indicators.csv");
    let x = DecisionMatrix::benefit(
        t.records.iter().map(|r| r.name.clone()).collect(),
        vec!["area".into(), "population".into(), "per_person".into()],
        t.records
            .iter()
            .map(|r| vec![r.total_refuge_area_ha, r.total_refuge_population, r.total_refuge_area_ha * 1e4 / r.permanent_population])
            .collect(),
        vec![0.4, 0.3, 0.3],
    )
    .map_err(|e| e.to_string())?;
    let z = normalize(&x).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (zi, row) in z.iter().zip(&published) {
        for (j, col) in [1, 2, 5].into_iter().enumerate() {
            let p: f64 = row[col].parse().unwrap();
            within(zi[j], p, 5e-4, &format!("{} column {col}", row[0]))?;
            worst = worst.max((zi[j] - p).abs());
        }
    }
    Ok(format!("21 entries, max deviation {worst:.1e}"))
}

fn composite_regression() -> Outcome {
    let w_b = [0.2325, 0.3659, 0.2778, 0.1238];
    let rows = common::reference_scores();
    check(rows.len() == 28, || format!("{} rows", rows.len()))?;
    let mut worst: f64 = 0.0;
    for (_, name, b, p) in &rows {
        let got = composite_index(b, &w_b).map_err(|e| e.to_string())?;
        within(got, *p, 5e-3, name)?;
        worst = worst.max((got - p).abs());
    }
    let grade = |needle: &str| {
        let r = rows.iter().find(|r| r.1.starts_with(needle)).unwrap();
        classify_grade(composite_index(&r.2, &w_b).unwrap()).unwrap()
    };
    check(grade("Qingshan Park") == Grade::B, || "Qingshan Park not B".into())?;
    check(grade("Zhuyehai") == Grade::D, || "Zhuyehai not D".into())?;
    Ok(format!("28 rows, max deviation {worst:.1e}; Qingshan Park B, Zhuyehai D"))
}

fn indicator_arithmetic() -> Outcome {
    let t = parse_districts(&common::data("districts.csv")).map_err(|e| e.to_string())?;
    check(t.records.len() == 7, || format!("{} districts", t.records.len()))?;
    let mut worst: f64 = 0.0;
    for (r, printed) in t.records.iter().zip(&t.printed_avg_area) {
        let v = r.total_refuge_area_ha * 1e4 / r.permanent_population;
        let p = printed.ok_or("missing printed value")?;
        within(v, p, 1e-3, &r.name)?;
        worst = worst.max((v - p).abs());
    }
    Ok(format!("7 districts, max deviation {worst:.1e} m²"))
}

fn weight_bookkeeping() -> Outcome {
    let table = [0.0930, 0.0930, 0.0465, 0.0841, 0.1780, 0.0519, 0.0519, 0.0525, 0.0597, 0.0294, 0.1362, 0.0928, 0.0310];
    within(table.iter().sum(), 1.0, 1e-4, "sum of index weights")?;
    let h = reference_hierarchy();
    let g = global_weights(&h).map_err(|e| e.to_string())?;
    for ((_, w), t) in g.iter().zip(table) {
        within(w, t, 1e-4, "global weight")?;
    }
    let rebuilt = CriterionHierarchy::from_global_weights(
        &h.goal_label,
        h.criteria
            .iter()
            .map(|c| {
                let ch = c.children.iter().map(|i| (i.clone(), g.get(&i.id).unwrap())).collect();
                (c.id.clone(), c.label.clone(), ch)
            })
            .collect(),
    );
    let g2 = global_weights(&rebuilt).map_err(|e| e.to_string())?;
    for ((_, a), (_, b)) in g.iter().zip(g2.iter()) {
        within(a, b, 1e-4, "round trip")?;
    }
    Ok("13 weights sum to 1, round trip within 1e-4".into())
}

fn ahp_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n = rng.random_range(3..=9);
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        let r = derive_weights(&PairwiseMatrix::from_weights(&w).unwrap(), WeightMethod::Eigenvector)
            .map_err(|e| e.to_string())?;
        for (a, b) in r.weights.iter().zip(&w) {
            within(*a, *b, 1e-9, "recovered weight")?;
        }
        check(r.cr.abs() < 1e-12, || format!("CR {} on a consistent matrix", r.cr))?;
    }
    let scale = [1.0 / 9.0, 1.0 / 7.0, 1.0 / 5.0, 1.0 / 3.0, 1.0, 3.0, 5.0, 7.0, 9.0, 2.0, 0.5, 4.0, 0.25];
    for _ in 0..50 {
        let n = rng.random_range(3..=9);
        let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| scale[rng.random_range(0..scale.len())]).collect();
        let m = PairwiseMatrix::from_upper(n, &upper).unwrap();
        let r = derive_weights(&m, WeightMethod::Eigenvector).map_err(|e| e.to_string())?;
        let (lambda, v) = common::eigen_oracle(&m.rows().map(|r| r.to_vec()).collect::<Vec<_>>());
        within(r.lambda_max, lambda, 1e-8, "lambda_max")?;
        for (a, b) in r.weights.iter().zip(&v) {
            within(*a, *b, 1e-8, "eigenvector")?;
        }
    }
    let at = 3.0 + 0.1 * RANDOM_INDEX[2] * 2.0;
    let c = consistency_ratio(at, 3).map_err(|e| e.to_string())?;
    check(!c.pass, || format!("CR {} passed at the threshold", c.cr))?;
    check(consistency_ratio(at - 1e-9, 3).unwrap().pass, || "just below the threshold failed".into())?;
    Ok("200 consistent, 50 oracle comparisons, CR = 0.1 rejected".into())
}

fn jenks_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut done, mut tied) = (0, 0);
    while done < 200 {
        let n = rng.random_range(2..=12);
        let pool = if done % 2 == 0 { 5 } else { 2000 };
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..pool) as f64 / 4.0).collect();
        let sorted = sorted_copy(&x).unwrap();
        let k = rng.random_range(1..=4);
        if k > distinct_count(&sorted) {
            continue;
        }
        tied += (distinct_count(&sorted) < n) as usize;
        let tol = TIE_TOLERANCE * (1.0 + common::sse(&sorted));
        let (_, first) = common::brute_force_jenks(&sorted, k, tol);
        let cuts = optimal_cuts(&x, k).map_err(|e| e.to_string())?;
        check(cuts == first, || format!("{x:?} k={k}: {cuts:?} vs exhaustive {first:?}"))?;
        done += 1;
    }
    Ok(format!("200 instances ({tied} with ties) identical to exhaustive search"))
}

fn coverage_geometry() -> Outcome {
    let grid = |cs: f64, side: f64| {
        let n = (side / cs).round() as usize;
        GridSpec::new(0.0, 0.0, cs, n, n).unwrap()
    };
    let r = 667.0;
    let area = |p: &[Point], s: GridSpec| coverage_area(&rasterize_buffers(p, r, s, Execution::Parallel).unwrap());
    let s5 = grid(5.0, 2000.0);
    let single = area(&[Point::new(1000.0, 1000.0)], s5);
    let exact = PI * r * r / 1e4;
    check((single / exact - 1.0).abs() < 0.01, || format!("single buffer {single} ha vs {exact} ha"))?;

    let s = grid(5.0, 4000.0);
    let (a, b) = (Point::new(900.0, 900.0), Point::new(3000.0, 3000.0));
    let sum = area(&[a], s) + area(&[b], s);
    let both = area(&[a, b], s);
    check((both / sum - 1.0).abs() < 0.01, || format!("disjoint {both} vs {sum}"))?;

    let p = [Point::new(800.0, 800.0), Point::new(1200.0, 1100.0)];
    let m = rasterize_buffers(&p, r, s5, Execution::Parallel).unwrap();
    let m2 = rasterize_buffers(&[p[0], p[1], p[0], p[1]], r, s5, Execution::Parallel).unwrap();
    check(m == m2 && m.union(&m).unwrap() == m, || "union not idempotent".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s20 = grid(20.0, 3000.0);
    for _ in 0..100 {
        let k = rng.random_range(0..8);
        let radius = rng.random_range(50.0..500.0);
        let mut pts: Vec<Point> = (0..k).map(|_| Point::new(rng.random_range(0.0..3000.0), rng.random_range(0.0..3000.0))).collect();
        let before = rasterize_buffers(&pts, radius, s20, Execution::Parallel).unwrap();
        pts.push(Point::new(rng.random_range(0.0..3000.0), rng.random_range(0.0..3000.0)));
        let after = rasterize_buffers(&pts, radius, s20, Execution::Parallel).unwrap();
        check(before.cells().iter().zip(after.cells()).all(|(b, a)| !b || *a), || "a cell was uncovered".into())?;
    }
    Ok(format!("single buffer {:.3}% off, disjoint additive, idempotent, 100 monotone scenarios", (single / exact - 1.0) * 100.0))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let json = dir.path().join("capacity.json");
    let setup = Command::new(env!("CARGO_BIN_EXE_shelter"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(["--format", "structured", "-o", json.to_str().unwrap(), "capacity", "--indicators", "data/indicators.csv"])
        .status()
        .map_err(|e| e.to_string())?;
    check(setup.success(), || "could not write the structured report".into())?;
    let cases: Vec<Vec<&str>> = vec![
        vec!["weights", "data/matrices/consistent3.txt", "data/matrices/criteria.txt", "data/matrices/inconsistent3.txt"],
        vec!["--config", "data/config.toml", "suitability", "data/shelters.csv"],
        vec!["--config", "data/config_matrices.toml", "--format", "structured", "suitability", "data/shelters.csv"],
        vec!["capacity", "--indicators", "data/indicators.csv"],
        vec![
            "capacity",
            "--districts",
            "data/coverage/districts.csv",
            "--points",
            "data/coverage/points.csv",
            "--population",
            "data/coverage/population.asc",
            "--zones",
            "data/coverage/zones.asc",
        ],
        vec![
            "coverage",
            "data/coverage/points.csv",
            "--population",
            "data/coverage/population.asc",
            "--zones",
            "data/coverage/zones.asc",
        ],
        vec!["report", json.to_str().unwrap()],
    ];
    for args in &cases {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let chart = dir.path().join(format!("chart{run}.svg"));
            let o = Command::new(env!("CARGO_BIN_EXE_shelter"))
                .current_dir(env!("CARGO_MANIFEST_DIR"))
                .args(args)
                .args(["--chart", chart.to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            check(o.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))?;
            outputs.push((o.stdout, std::fs::read(&chart).map_err(|e| e.to_string())?));
        }
        check(outputs[0] == outputs[1], || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} subcommand runs byte-identical, charts included", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("TOPSIS regression", topsis_regression, Duration::from_secs(1)),
        ("standardization regression", standardization, Duration::MAX),
        ("composite-index regression", composite_regression, Duration::MAX),
        ("indicator arithmetic", indicator_arithmetic, Duration::MAX),
        ("weight bookkeeping", weight_bookkeeping, Duration::MAX),
        ("AHP property suite", ahp_suite, Duration::from_secs(10)),
        ("Jenks oracle equivalence", jenks_oracle, Duration::from_secs(30)),
        ("coverage geometry", coverage_geometry, Duration::from_secs(60)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > budget => Err(format!("{d}; took {elapsed:?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(d) => println!("PASS {} {name}: {d} [{:.2}s]", i + 1, elapsed.as_secs_f64()),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d} [{:.2}s]", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
