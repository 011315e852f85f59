//! Full-workflow integration tests at the library level: generate, split,
//! train all three classifiers, evaluate, and run scenario batches.

use crossroad_core::datagen::{generate, GenConfig, DEFAULT_SEED};
use crossroad_core::learn::{
    train_test_split, Dataset, DtModel, KnnModel, Label, NbModel, TrainedModel,
    DEFAULT_MAX_DEPTH,
};
use crossroad_core::pipeline::{
    format_report_line, parse_scenarios, run_batch, scenarios_to_file_string, PipelineConfig,
    PipelineOutcome, Scenario,
};
use crossroad_core::plate::PlateText;
use crossroad_core::registry::{Registry, VehicleRecord};
use crossroad_core::rng::SplitMix64;

/// The frozen evaluation workflow: doubled default counts (5998 samples),
/// a 50/50 split, and the committed seed for both generation and split.
fn default_workflow() -> (Dataset, Dataset) {
    let config = GenConfig { n_straight: 2 * 1491, n_turn: 2 * 1508, ..Default::default() };
    let data = generate(&config).expect("default config is valid");
    assert_eq!(data.len(), 5998);
    train_test_split(&data, 0.5, &mut SplitMix64::new(DEFAULT_SEED)).expect("valid fraction")
}

#[test]
fn decision_tree_reaches_table3_regime() {
    let (train, test) = default_workflow();
    assert_eq!(test.len(), 2999);
    let model = TrainedModel::DecisionTree(DtModel::fit(&train, DEFAULT_MAX_DEPTH).unwrap());
    let predictions: Vec<_> = test.samples().iter().map(|s| model.predict(s.dv, s.mp)).collect();
    let truths: Vec<_> = test.samples().iter().map(|s| s.label).collect();
    let report = crossroad_core::learn::evaluate(&predictions, &truths).unwrap();
    println!("dt held-out report:\n{}", report.to_table_string());
    assert!(
        (0.93..=0.99).contains(&report.macro_avg.f1),
        "macro f1 = {}",
        report.macro_avg.f1
    );
    assert!(report.straight.precision >= 0.93, "S precision = {}", report.straight.precision);
    assert!(report.turn.precision >= 0.93, "T precision = {}", report.turn.precision);
}

#[test]
fn all_three_classifiers_beat_chance_comfortably() {
    let (train, test) = default_workflow();
    let models = [
        TrainedModel::Knn(KnnModel::fit(&train, 5).unwrap()),
        TrainedModel::NaiveBayes(NbModel::fit(&train).unwrap()),
        TrainedModel::DecisionTree(DtModel::fit(&train, DEFAULT_MAX_DEPTH).unwrap()),
    ];
    for model in models {
        let hits = test
            .samples()
            .iter()
            .filter(|s| model.predict(s.dv, s.mp) == s.label)
            .count();
        let accuracy = hits as f64 / test.len() as f64;
        println!("{} held-out accuracy: {accuracy:.4}", model.algo());
        assert!(accuracy > 0.90, "{}: accuracy = {accuracy}", model.algo());
    }
}

#[test]
fn batch_simulation_scores_scenarios_end_to_end() {
    let (train, _) = default_workflow();
    let model = TrainedModel::DecisionTree(DtModel::fit(&train, DEFAULT_MAX_DEPTH).unwrap());

    // Engineer scenarios whose kinematics land in each class's dv region;
    // registry mobility patterns match the class stereotype.
    let mut registry = Registry::new();
    let mut scenarios = Vec::new();
    let mut rng = SplitMix64::new(7);
    for i in 0..200 {
        let turn = i % 2 == 0;
        let plate = PlateText::new(format!("CAR{i}")).unwrap();
        let mp = u8::from(turn);
        registry.upsert(VehicleRecord::new(plate.clone(), mp).unwrap());
        let dv = if turn { rng.gaussian(-2.0, 1.0) } else { rng.gaussian(0.0, 0.5) };
        let interval = 5.0;
        let scenario = Scenario::new(
            plate,
            if turn { Label::Turn } else { Label::Straight },
            60.0,
            dv / interval,
            2400.0,
            interval,
        )
        .unwrap();
        scenarios.push(scenario);
    }
    let result = run_batch(
        &scenarios,
        &registry,
        &model,
        &PipelineConfig::default(),
        &mut SplitMix64::new(0),
    );
    assert_eq!(result.unregistered, 0);
    assert_eq!(result.errored, 0);
    let report = result.report.expect("every scenario predicted");
    println!("batch report:\n{}", report.to_table_string());
    assert!(report.macro_avg.f1 > 0.85, "macro f1 = {}", report.macro_avg.f1);
    for run in &result.runs {
        let (outcome, _) = run.as_ref().unwrap();
        assert!(format_report_line(outcome).contains("PREDICT="));
    }
}

#[test]
fn scenario_files_survive_the_full_loop() {
    let scenarios = vec![
        Scenario::new(PlateText::new("LEA2465").unwrap(), Label::Turn, 65.5, -0.1, 2400.0, 5.0)
            .unwrap(),
        Scenario::new(PlateText::new("AB12").unwrap(), Label::Straight, 40.0, 0.0, 1200.0, 3.0)
            .unwrap(),
    ];
    let text = scenarios_to_file_string(&scenarios);
    let parsed = parse_scenarios(&text).unwrap();
    assert_eq!(parsed, scenarios);
    assert_eq!(scenarios_to_file_string(&parsed), text);
}

#[test]
fn full_workflow_is_deterministic_in_process() {
    let run = || {
        let config = GenConfig::default();
        let data = generate(&config).unwrap();
        let (train, test) =
            train_test_split(&data, 0.5, &mut SplitMix64::new(DEFAULT_SEED)).unwrap();
        let model = TrainedModel::DecisionTree(DtModel::fit(&train, DEFAULT_MAX_DEPTH).unwrap());
        let predictions: Vec<_> =
            test.samples().iter().map(|s| model.predict(s.dv, s.mp)).collect();
        let truths: Vec<_> = test.samples().iter().map(|s| s.label).collect();
        let report = crossroad_core::learn::evaluate(&predictions, &truths).unwrap();
        (data.to_file_string(), model.to_model_string(), report.to_tsv_string())
    };
    assert_eq!(run(), run());
}

#[test]
fn unregistered_heavy_batch_reports_counts() {
    let (train, _) = default_workflow();
    let model = TrainedModel::DecisionTree(DtModel::fit(&train, DEFAULT_MAX_DEPTH).unwrap());
    let mut registry = Registry::new();
    registry.upsert(VehicleRecord::new(PlateText::new("KNOWN1").unwrap(), 0).unwrap());
    let scenarios: Vec<Scenario> = (0..10)
        .map(|i| {
            let plate = if i < 4 { "KNOWN1" } else { "GHOST" };
            Scenario::new(
                PlateText::new(format!("{plate}{}", if i < 4 { String::new() } else { i.to_string() }))
                    .unwrap(),
                Label::Straight,
                50.0,
                0.0,
                2400.0,
                5.0,
            )
            .unwrap()
        })
        .collect();
    let result = run_batch(
        &scenarios,
        &registry,
        &model,
        &PipelineConfig::default(),
        &mut SplitMix64::new(3),
    );
    assert_eq!(result.unregistered, 6);
    assert_eq!(result.report.unwrap().total_support(), 4);
    for run in &result.runs {
        let (outcome, trace) = run.as_ref().unwrap();
        match outcome {
            PipelineOutcome::Unregistered { .. } => assert_eq!(trace.count_frequency_sent(), 0),
            PipelineOutcome::Predicted { .. } => assert_eq!(trace.count_frequency_sent(), 2),
        }
    }
}
