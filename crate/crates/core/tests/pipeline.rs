use limeout::classifiers::{Algorithm, ClassifierSpec, FnClassifier};
use limeout::data::{generate_planted_bias, Dataset, Feature, FeatureStats, PlantedBiasConfig, Schema};
use limeout::fairness::{run_audit, AuditSettings, SensitiveSet};
use limeout::global::{build_explanation_matrix, explain_globally};
use limeout::lime::{KernelConfig, SurrogateConfig};
use limeout::rng;
use rand::Rng;

fn planted(bias: f64, redundancy: f64, seed: u64) -> Dataset {
    generate_planted_bias(&PlantedBiasConfig {
        n_rows: 2000,
        n_noise_features: 4,
        bias_strength: bias,
        redundancy,
        extra_sensitive: vec![],
        seed,
    })
    .unwrap()
}

fn quick(seed: u64) -> AuditSettings {
    AuditSettings { n_samples: 2000, max_candidates: 40, ..AuditSettings::with_seed(seed) }
}

fn rf(seed: u64) -> ClassifierSpec {
    ClassifierSpec::new(Algorithm::RandomForest, seed).with("tree_count", "40").unwrap()
}

#[test]
fn planted_bias_is_flagged_and_removed() {
    let data = planted(2.0, 0.5, 1);
    let sens = SensitiveSet::new(["s"], data.schema()).unwrap();
    let out = run_audit(&rf(2), &data, &sens, &quick(3)).unwrap();
    let rep = &out.report;
    assert!(!rep.original_verdict.fair);
    assert_eq!(rep.original_verdict.offenders[0].feature, "s");
    let ens = rep.ensemble.as_ref().expect("unfair model gets an ensemble");
    let (_, s_after) = ens.global.get("s").unwrap();
    // both members drop s, so any remaining weight is sampling noise
    assert!(s_after.mean_abs <= s_after.noise_threshold, "{s_after:?}");
    assert!(ens.verdict.fair);
    assert_eq!(ens.member_masks.len(), 2);
}

#[test]
fn unbiased_data_needs_no_action() {
    let data = planted(0.0, 0.0, 4);
    let sens = SensitiveSet::new(["s"], data.schema()).unwrap();
    let out = run_audit(&rf(5), &data, &sens, &quick(6)).unwrap();
    assert!(out.report.original_verdict.fair, "{:?}", out.report.original_global);
    assert!(out.report.ensemble.is_none() && out.ensemble.is_none());
    assert!(!out.report.original_global.ranked.is_empty());
}

#[test]
fn audit_is_reproducible() {
    let data = planted(2.0, 0.5, 7);
    let sens = SensitiveSet::new(["s"], data.schema()).unwrap();
    let spec = ClassifierSpec::new(Algorithm::Logistic, 1);
    let a = run_audit(&spec, &data, &sens, &quick(8)).unwrap();
    let b = run_audit(&spec, &data, &sens, &quick(8)).unwrap();
    assert_eq!(a.report, b.report);
}

fn two_feature_data() -> Dataset {
    let schema = Schema::new(
        vec![Feature::numeric("a"), Feature::numeric("b"), Feature::numeric("c")],
        "y",
        vec!["0".into(), "1".into()],
    )
    .unwrap();
    let mut r = rng::seeded(1);
    let rows = (0..300).map(|_| (0..3).map(|_| r.random_range(0.0..1.0)).collect()).collect();
    Dataset::new(schema, rows, (0..300).map(|i| i % 2).collect()).unwrap()
}

#[test]
fn explanation_matrix_examples() {
    let data = two_feature_data();
    let stats = FeatureStats::compute(&data, 4).unwrap();
    let cfg = SurrogateConfig { n_samples: 600, ..SurrogateConfig::with_seed(3) };
    let kernel = KernelConfig::for_dimension(3);

    let constant = FnClassifier::new(data.schema().clone(), |_| vec![0.4, 0.6]);
    let w = build_explanation_matrix(&constant, &data.subset(&[0]), &stats, &cfg, &kernel).unwrap();
    assert!(w.row(0).iter().all(|v| v.abs() < 1e-9));

    let model = FnClassifier::new(data.schema().clone(), |x| {
        let p = 1.0 / (1.0 + (-(4.0 * x[0] - 2.0 * x[2])).exp());
        vec![1.0 - p, p]
    });
    let two = data.subset(&[1, 2]);
    let w1 = build_explanation_matrix(&model, &two, &stats, &cfg, &kernel).unwrap();
    let w2 = build_explanation_matrix(&model, &two, &stats, &cfg, &kernel).unwrap();
    assert_eq!(w1, w2);

    let indicator = FnClassifier::new(data.schema().clone(), |x| {
        let p = if x[1] > 0.5 { 0.95 } else { 0.05 };
        vec![1.0 - p, p]
    });
    let many = data.subset(&(0..20).collect::<Vec<_>>());
    let w = build_explanation_matrix(&indicator, &many, &stats, &cfg, &kernel).unwrap();
    for i in 0..w.n_rows() {
        let row = w.row(i);
        assert!(row[1].abs() > row[0].abs() + row[2].abs(), "row {i}: {row:?}");
    }
    let g = explain_globally(&w, 5).unwrap();
    assert_eq!(g.ranked[0].feature, "b");
    assert!(g.picked.len() <= 5);
}
