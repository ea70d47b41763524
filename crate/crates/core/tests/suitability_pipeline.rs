mod common;

use proptest::prelude::*;

use shelter_eval::io::{parse_config, parse_shelters};
use shelter_eval::model::{global_weights, reference_hierarchy, CriterionHierarchy, Polarity, RawValue, ScoringRule};
use shelter_eval::suitability::{
    classify_grade, composite_index, criterion_scores, evaluate, score_index, Grade,
};
use shelter_eval::Execution;

const TABLE1: [(&str, f64); 13] = [
    ("C1", 0.0930),
    ("C2", 0.0930),
    ("C3", 0.0465),
    ("C4", 0.0841),
    ("C5", 0.1780),
    ("C6", 0.0519),
    ("C7", 0.0519),
    ("C8", 0.0525),
    ("C9", 0.0597),
    ("C10", 0.0294),
    ("C11", 0.1362),
    ("C12", 0.0928),
    ("C13", 0.0310),
];
const W_B: [f64; 4] = [0.2325, 0.3659, 0.2778, 0.1238];

#[test]
fn weights_sum_and_round_trip() {
    let total: f64 = TABLE1.iter().map(|x| x.1).sum();
    assert!((total - 1.0).abs() < 1e-4);
    let g = global_weights(&reference_hierarchy()).unwrap();
    for (id, w) in TABLE1 {
        assert!((g.get(id).unwrap() - w).abs() < 1e-4, "{id}");
    }
    let h = reference_hierarchy();
    let rebuilt = CriterionHierarchy::from_global_weights(
        &h.goal_label,
        h.criteria
            .iter()
            .map(|c| {
                let ch = c
                    .children
                    .iter()
                    .map(|i| (i.clone(), g.get(&i.id).unwrap()))
                    .collect();
                (c.id.clone(), c.label.clone(), ch)
            })
            .collect(),
    );
    let g2 = global_weights(&rebuilt).unwrap();
    for ((a, x), (b, y)) in g.iter().zip(g2.iter()) {
        assert_eq!(a, b);
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn printed_criterion_scores_aggregate_to_printed_composite() {
    let rows = common::reference_scores();
    assert_eq!(rows.len(), 28);
    for (_, name, b, p) in &rows {
        let got = composite_index(b, &W_B).unwrap();
        assert!((got - p).abs() <= 5e-3, "{name}: {got} vs {p}");
    }
    let grade = |needle: &str| {
        let r = rows.iter().find(|r| r.1.starts_with(needle)).unwrap();
        classify_grade(composite_index(&r.2, &W_B).unwrap()).unwrap()
    };
    assert_eq!(grade("Qingshan Park"), Grade::B);
    assert_eq!(grade("Zhuyehai"), Grade::D);
    assert_eq!(grade("Baiduting"), Grade::C);
}

#[test]
fn single_shelter_criterion_scores() {
    let f = [1, 1, 5, 9, 8, 6, 9, 3, 8, 9, 8, 5, 5].map(|x| x as f64);
    let b = criterion_scores(&f, &reference_hierarchy()).unwrap();
    for (a, e) in b.iter().zip([1.8, 8.088, 7.161, 5.0]) {
        assert!((a - e).abs() < 5e-4, "{a} vs {e}");
    }
}

#[test]
fn bundled_fixture_reproduces_scores() {
    let cfg = parse_config(&common::data("config.toml")).unwrap();
    let shelters = parse_shelters(&common::data("shelters.csv"), &cfg.hierarchy).unwrap();
    let report = evaluate(&shelters, &cfg.hierarchy, Execution::Parallel).unwrap();
    let (_, expected) = common::read_csv("expected_scores.csv");
    let printed = common::reference_scores();
    assert_eq!(report.results.len(), 28);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
    for ((r, e), p) in report.results.iter().zip(&expected).zip(&printed) {
        assert_eq!(r.shelter_id, e[0]);
        let want: Vec<u8> = e[1..].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(r.index_scores, want, "{}", r.name);
        assert!((r.composite - p.3).abs() <= 5e-3, "{}: {} vs {}", r.name, r.composite, p.3);
    }
    let zhuyehai = report.results.iter().find(|r| r.name.starts_with("Zhuyehai")).unwrap();
    assert_eq!(zhuyehai.grade, Grade::D);
    let seq = evaluate(&shelters, &cfg.hierarchy, Execution::Sequential).unwrap();
    assert_eq!(seq, report);
}

#[test]
fn matrix_config_gives_the_same_hierarchy() {
    let a = parse_config(&common::data("config.toml")).unwrap();
    let b = parse_config(&common::data("config_matrices.toml")).unwrap();
    assert_eq!(b.matrices.len(), 1);
    for (x, y) in a.hierarchy.criterion_weights().iter().zip(b.hierarchy.criterion_weights()) {
        assert!((x - y).abs() < 1e-9);
    }
    let g = global_weights(&a.hierarchy).unwrap();
    let r = global_weights(&reference_hierarchy()).unwrap();
    for ((_, x), (_, y)) in g.iter().zip(r.iter()) {
        assert!((x - y).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn equal_scores_aggregate_to_themselves(s in 1u8..=10) {
        let h = reference_hierarchy();
        let b = criterion_scores(&[s as f64; 13], &h).unwrap();
        for v in &b {
            prop_assert!((v - s as f64).abs() < 1e-9);
        }
        let p = composite_index(&b, &h.criterion_weights()).unwrap();
        prop_assert!((p - s as f64).abs() < 1e-9);
    }

    #[test]
    fn scores_follow_polarity(v in prop::collection::vec(0.0f64..100.0, 2..40), i in 0usize..40, j in 0usize..40) {
        let (i, j) = (i % v.len(), j % v.len());
        let raw: Vec<RawValue> = v.iter().map(|&x| RawValue::Measured(x)).collect();
        let b = score_index(&raw, Polarity::Benefit, ScoringRule::NaturalBreaks10).unwrap().scores;
        let c = score_index(&raw, Polarity::Cost, ScoringRule::NaturalBreaks10).unwrap().scores;
        if v[i] < v[j] {
            prop_assert!(b[i] <= b[j]);
            prop_assert!(c[i] >= c[j]);
        }
        prop_assert!(b.iter().chain(&c).all(|&s| (1..=10).contains(&s)));
    }

    #[test]
    fn raising_one_score_never_lowers_the_composite(f in prop::collection::vec(1u8..=10, 13), k in 0usize..13) {
        let h = reference_hierarchy();
        let w = h.criterion_weights();
        let p = |f: &[u8]| {
            let ff: Vec<f64> = f.iter().map(|&x| x as f64).collect();
            composite_index(&criterion_scores(&ff, &h).unwrap(), &w).unwrap()
        };
        let mut g = f.clone();
        g[k] = (g[k] + 1).min(10);
        prop_assert!(p(&g) >= p(&f));
    }
}
