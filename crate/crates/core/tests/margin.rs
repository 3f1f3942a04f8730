use driftbench::classifiers::{train_linear_svm, train_logistic, train_subspace_ensemble, EnsembleConfig, Model, Penalty};
use driftbench::data::Instance;
use driftbench::margin::{margin_density, margin_signal, mean_uncertainty, MarginSpec};
use driftbench::synth::{generate_scenario, ScenarioId};
use proptest::prelude::*;

#[test]
fn density_is_the_brute_force_signal_count() {
    let train = generate_scenario(ScenarioId::A0, 200, 1).unwrap();
    let svm = Model::Linear(train_linear_svm(&train, 1.0, 2).unwrap());
    let spec = MarginSpec::svm();
    let Model::Linear(inner) = &svm else { unreachable!() };
    // Pick 17 probes inside the unit margin and 83 outside it.
    let probes = generate_scenario(ScenarioId::A3, 2000, 3).unwrap();
    let (inside, outside): (Vec<&Instance>, Vec<&Instance>) = probes
        .instances()
        .iter()
        .partition(|i| inner.predict_signed(&i.features).unwrap().abs() <= 1.0);
    let batch: Vec<Instance> = inside[..17].iter().chain(&outside[..83]).map(|&i| i.clone()).collect();
    assert_eq!(margin_density(&svm, &spec, &batch).unwrap(), 0.17);
}

#[test]
fn moving_toward_the_boundary_fills_the_margin() {
    let train = generate_scenario(ScenarioId::A0, 300, 4).unwrap();
    let svm = Model::Linear(train_linear_svm(&train, 1.0, 5).unwrap());
    let spec = MarginSpec::svm();
    let before = margin_density(&svm, &spec, generate_scenario(ScenarioId::A0, 300, 6).unwrap().instances()).unwrap();
    let after = margin_density(&svm, &spec, generate_scenario(ScenarioId::A3, 300, 6).unwrap().instances()).unwrap();
    assert!(after - before >= 0.15, "{before} -> {after}");
}

#[test]
fn ensemble_density_is_the_disagreement_rate() {
    let train = generate_scenario(ScenarioId::C0, 200, 7).unwrap();
    let Model::Ensemble(e) = Model::Ensemble(train_subspace_ensemble(&train, &EnsembleConfig::default(), 8).unwrap())
    else {
        unreachable!()
    };
    let batch = generate_scenario(ScenarioId::C0, 100, 9).unwrap();
    let theta = 0.5;
    let expected = batch
        .instances()
        .iter()
        .filter(|i| {
            let (p, m) = e.confidence(&i.features).unwrap();
            (p - m).abs() <= theta
        })
        .count() as f64
        / batch.len() as f64;
    let model = Model::Ensemble(e);
    let got = margin_density(&model, &MarginSpec::ensemble(theta).unwrap(), batch.instances()).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn uncertainty_is_one_minus_confidence() {
    let train = generate_scenario(ScenarioId::A1, 150, 10).unwrap();
    let model = Model::Linear(train_logistic(&train, Penalty::L2, 0.01, 0).unwrap());
    let batch = generate_scenario(ScenarioId::A1, 50, 11).unwrap();
    let by_hand = batch
        .instances()
        .iter()
        .map(|i| 1.0 - model.confidence(&i.features).unwrap())
        .sum::<f64>()
        / batch.len() as f64;
    assert!((mean_uncertainty(&model, batch.instances()).unwrap() - by_hand).abs() < 1e-12);
}

proptest! {
    #[test]
    fn logistic_density_is_bounded_and_monotone(
        w in prop::collection::vec(-10.0f64..10.0, 2),
        b in -5.0f64..5.0,
        xs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..50),
        a in 0.001f64..0.999,
        c in 0.001f64..0.999,
    ) {
        let model = Model::Linear(driftbench::classifiers::LinearModel::new(
            w,
            b,
            driftbench::classifiers::LinearKind::Logistic { penalty: Penalty::L2, strength: 1.0 },
        ));
        let batch: Vec<Instance> = xs.into_iter().map(Instance::unlabeled).collect();
        let (lo, hi) = (a.min(c), a.max(c));
        let d_lo = margin_density(&model, &MarginSpec::probabilistic(lo).unwrap(), &batch).unwrap();
        let d_hi = margin_density(&model, &MarginSpec::probabilistic(hi).unwrap(), &batch).unwrap();
        prop_assert!((0.0..=1.0).contains(&d_lo));
        prop_assert!(d_lo <= d_hi);
        for x in &batch {
            let s_lo = margin_signal(&model, &MarginSpec::probabilistic(lo).unwrap(), &x.features).unwrap();
            let s_hi = margin_signal(&model, &MarginSpec::probabilistic(hi).unwrap(), &x.features).unwrap();
            prop_assert!(s_lo <= s_hi);
        }
    }
}
