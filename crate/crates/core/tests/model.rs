mod common;

use common::{brute_tad, doc, normal_equations};
use readgrade_core::model::{
    accuracy, bic, classic_formulas, classify, cross_validate, f_sf, fit_dataset, fit_ols, fit_thresholds, fold_partition,
    forward_select, increment_f_test, least_squares, pearson, predict, rmse, select_by_bic, semi_partial_r, tad, CvConfig,
    Dataset, LinearFit, Pipeline,
};
use readgrade_core::synth::planted_dataset;
use readgrade_core::{Error, FeatureRegistry, FeatureVector};

fn ds(cols: Vec<(&str, Vec<f64>)>, y: Vec<f64>) -> Dataset {
    Dataset::new(
        (0..y.len()).map(|i| format!("r{i}")).collect(),
        cols.iter().map(|(n, _)| n.to_string()).collect(),
        cols.into_iter().map(|(_, c)| c).collect(),
        y,
    )
    .unwrap()
}

fn vector(reg: &FeatureRegistry, set: &[(&str, f64)], grade: i64) -> FeatureVector {
    let mut values = vec![0.0; reg.len()];
    for (name, v) in set {
        values[reg.index_of(name).unwrap()] = *v;
    }
    FeatureVector {
        doc_id: format!("g{grade}"),
        values,
        missing: vec![false; reg.len()],
        grade: Some(grade),
        provenance: Default::default(),
    }
}

#[test]
fn ols_examples() {
    let reg = FeatureRegistry::default();
    // three points on y = 1 + 2x; a fit needs |subset| + 2 rows
    let rows = [
        vector(&reg, &[("word_number", 0.0)], 1),
        vector(&reg, &[("word_number", 1.0)], 3),
        vector(&reg, &[("word_number", 2.0)], 5),
    ];
    let model = fit_ols(&rows, &reg, &["word_number".to_string()]).unwrap();
    assert!((model.intercept - 1.0).abs() < 1e-12);
    assert!((model.coefficient("word_number") - 2.0).abs() < 1e-12);
    assert!(model.training_meta.rss.abs() < 1e-20);

    let at2 = vector(&reg, &[("word_number", 2.0)], 0);
    assert!((predict(&model, &at2, &reg).unwrap() - 5.0).abs() < 1e-12);
    let too_few = fit_ols(&rows[..2], &reg, &["word_number".to_string()]);
    assert!(matches!(too_few, Err(Error::Config(_))));
    let zero = vector(&reg, &[], 0);
    assert_eq!(predict(&model, &zero, &reg).unwrap(), model.intercept);
    let mut masked = at2.clone();
    masked.missing[reg.index_of("word_number").unwrap()] = true;
    assert!(matches!(predict(&model, &masked, &reg), Err(Error::MissingFeature { .. })));

    let flat = ds(vec![("a", vec![1.0, 4.0, 2.0, 8.0])], vec![3.0; 4]);
    let m = fit_dataset(&flat, &["a".into()], "h").unwrap();
    assert!(m.coefficient("a").abs() < 1e-12);
    assert!((m.intercept - 3.0).abs() < 1e-12);
}

#[test]
fn ols_matches_normal_equations_on_random_50x5() {
    let d = planted_dataset(50, 5, &[(1, 1.5), (4, -0.5)], 0.3, 11);
    let ls = least_squares(&d.columns.iter().map(Vec::as_slice).collect::<Vec<_>>(), &d.y);
    let oracle = normal_equations(&d.columns, &d.y);
    assert!((ls.intercept - oracle[0]).abs() < 1e-9);
    for (b, o) in ls.beta.iter().zip(&oracle[1..]) {
        assert!((b - o).abs() < 1e-9);
    }
}

#[test]
fn collinear_design_is_singular() {
    let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    let d = ds(vec![("a", x.clone()), ("b", x.iter().map(|v| 2.0 * v).collect())], vec![1.0, 0.0, 2.0, 1.0, 3.0]);
    match fit_dataset(&d, &["a".into(), "b".into()], "h") {
        Err(Error::SingularDesign { features }) => assert_eq!(features, vec!["b".to_string()]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn metric_examples() {
    let a = [1.0, 2.0, 3.0];
    assert_eq!(rmse(&a, &a).unwrap(), 0.0);
    assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert!((pearson(&a, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((pearson(&a, &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
    assert!(matches!(pearson(&a, &[1.0, 1.0, 1.0]), Err(Error::UndefinedCorrelation(_))));
    assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 0, 4]).unwrap(), 0.75);
    assert_eq!(tad(&[1.0, 2.0], &[2.0, 1.0]).unwrap(), 0.0);
    assert_eq!(tad(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    assert!(matches!(tad(&[1.0], &[1.0]), Err(Error::Config(_))));
}

#[test]
fn tad_matches_pair_counter_on_20_points() {
    let d = planted_dataset(20, 2, &[(1, 1.0)], 1.0, 5);
    let gold: Vec<f64> = d.y.iter().map(|v| v.round()).collect();
    let pred = &d.columns[0];
    assert_eq!(tad(&gold, pred).unwrap(), brute_tad(&gold, pred));
}

#[test]
fn semi_partial_examples() {
    let d = planted_dataset(200, 10, &[(3, 2.0), (7, 0.5)], 0.1, 3);
    let x5 = d.column("x5").unwrap();
    assert!((semi_partial_r(&d, &[], "x5").unwrap() - pearson(&d.y, x5).unwrap()).abs() < 1e-12);
    assert_eq!(semi_partial_r(&d, &["x3".into()], "x3").unwrap(), 0.0);
    let planted = semi_partial_r(&d, &["x3".into()], "x7").unwrap().abs();
    for noise in ["x1", "x2", "x4", "x5", "x6", "x8", "x9", "x10"] {
        assert!(planted > semi_partial_r(&d, &["x3".into()], noise).unwrap().abs(), "{noise}");
    }
}

#[test]
fn f_test_examples() {
    let d = planted_dataset(40, 2, &[(1, 1.0)], 1.0, 9);
    let old = LinearFit::fit(&d, &["x1".into()]).unwrap();
    let same = LinearFit { k: old.k + 1, subset: vec!["x1".into(), "x2".into()], ..old.clone() };
    let t = increment_f_test(&old, &same).unwrap();
    assert_eq!((t.f, t.p_value), (0.0, 1.0));
    assert!((f_sf(4.17, 1.0, 30.0) - 0.05).abs() < 0.002);

    let exact = ds(vec![("a", vec![1.0, 2.0, 3.0, 4.0, 5.0])], vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    let t = increment_f_test(&LinearFit::null(&exact), &LinearFit::fit(&exact, &["a".into()]).unwrap()).unwrap();
    assert_eq!((t.f, t.p_value), (f64::INFINITY, 0.0));
}

#[test]
fn bic_examples() {
    assert!((bic(10, 10.0, 1).unwrap() - 10f64.ln()).abs() < 1e-12);
    assert!((bic(100, 25.0, 3).unwrap() + 124.81).abs() < 5e-3);
    let n = 50;
    assert!((bic(n, 7.0, 6).unwrap() - bic(n, 7.0, 3).unwrap() - (n as f64).ln() * 3.0).abs() < 1e-9);
    assert!(matches!(bic(10, 0.0, 1), Err(Error::BicUndefined)));
}

#[test]
fn selection_examples() {
    let d = planted_dataset(200, 10, &[(3, 2.0)], 0.1, 1);
    let trace = forward_select(&d, None, 0.05).unwrap();
    assert_eq!(trace.steps[0].added_feature, "x3");
    assert!(trace.steps.windows(2).all(|w| w[1].r_squared >= w[0].r_squared - 1e-12));
    assert_eq!(select_by_bic(&trace), trace.chosen);

    let one = planted_dataset(30, 1, &[(1, 1.0)], 0.5, 2);
    let t = forward_select(&one, None, 0.05).unwrap();
    assert_eq!(t.steps.len(), 1);
    assert_eq!(select_by_bic(&t), Some(0));
    assert!(matches!(forward_select(&planted_dataset(9, 3, &[], 1.0, 1), None, 0.05), Err(Error::Config(_))));
}

#[test]
fn select_by_bic_takes_the_valley() {
    let d = planted_dataset(200, 10, &[(3, 2.0)], 0.1, 1);
    let mut trace = forward_select(&d, None, 1.0).unwrap();
    for (s, b) in trace.steps.iter_mut().zip([5.0, 3.0, 1.0, 2.0, 4.0, 6.0, 7.0, 8.0, 9.0, 10.0]) {
        s.bic = b;
        s.accepted = true;
    }
    assert_eq!(select_by_bic(&trace), Some(2));
}

#[test]
fn cv_examples() {
    for rep in 0..3 {
        let parts = fold_partition(10, 5, 42, rep);
        assert!(parts.iter().all(|p| p.len() == 2));
        let mut all: Vec<usize> = parts.concat();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }
    let d = planted_dataset(60, 3, &[(1, 1.0), (2, 2.0)], 0.0, 4);
    let cfg = CvConfig::default();
    let pipeline = Pipeline::Fixed { features: vec!["x1".into(), "x2".into()] };
    let a = cross_validate(&d, &pipeline, &cfg).unwrap();
    assert!(a.mean_rmse < 1e-9);
    assert_eq!(a, cross_validate(&d, &pipeline, &cfg).unwrap());
    let tiny = planted_dataset(4, 1, &[], 1.0, 1);
    assert!(matches!(cross_validate(&tiny, &pipeline, &cfg), Err(Error::Config(_))));
}

#[test]
fn threshold_examples() {
    let sep: Vec<(i64, f64)> = vec![(1, 0.9), (1, 1.0), (1, 1.1), (2, 1.9), (2, 2.0), (2, 2.1)];
    let th = fit_thresholds(&sep, &[1, 2]).unwrap();
    assert!((th.centroids[0] - 1.0).abs() < 1e-12 && (th.centroids[1] - 2.0).abs() < 1e-12);
    let one = fit_thresholds(&[(1, 0.5), (2, 1.7), (3, 2.2)], &[1, 2, 3]).unwrap();
    assert_eq!(one.centroids, vec![0.5, 1.7, 2.2]);
    // means 1.0, 3.0, 2.0 pool the last two into 2.5
    let inv = fit_thresholds(&[(1, 1.0), (2, 3.0), (3, 2.0)], &[1, 2, 3]).unwrap();
    assert!(inv.pooled);
    assert_eq!(inv.centroids, vec![1.0, 2.5, 2.5]);
    assert!(matches!(fit_thresholds(&[], &[1]), Err(Error::Config(_))));

    let th = fit_thresholds(&[(1, 1.0), (2, 2.0), (3, 3.0)], &[1, 2, 3]).unwrap();
    assert_eq!(classify(2.0, &th), 2);
    assert_eq!(classify(-5.0, &th), 1);
    assert_eq!(classify(50.0, &th), 3);
    assert_eq!(classify(2.5, &th), 2);
}

#[test]
fn classic_examples() {
    let d = doc("The cat and the dog ran to the big red.");
    let c = classic_formulas(&d, None).unwrap();
    assert!((c.flesch_kincaid_grade - 0.11).abs() < 1e-9);
    let long = classic_formulas(&doc("The cat and the dog ran to the big red box and the pot."), None).unwrap();
    assert!(long.flesch_reading_ease < c.flesch_reading_ease);
    assert_eq!(classic_formulas(&d, None).unwrap(), c);
}
