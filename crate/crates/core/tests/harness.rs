use driftbench::detectors::DriftEventKind;
use driftbench::harness::{induced_benchmark, run_stream, run_suite, sensitivity_sweep, DetectorKind, Oracle, RunConfig, RunReport};
use driftbench::data::Label;
use driftbench::induction::InductionMode;
use driftbench::Error;

const CHUNK: usize = 150;

fn top_run(detector: DetectorKind, s: u64) -> RunReport {
    let (data, _) = induced_benchmark(InductionMode::TopFraction, s).unwrap();
    run_stream(&data, &RunConfig::new(detector, CHUNK, s)).unwrap()
}

#[test]
fn on_demand_labels_are_exactly_the_decision_buffers() {
    for d in [DetectorKind::Md3Svm, DetectorKind::Md3Rs, DetectorKind::Hdddm] {
        let r = top_run(d, 2);
        let decisions = r.decisions().count();
        assert_eq!(r.drifts_confirmed + r.false_alarms, decisions, "{d}");
        let post = r.stream_length - r.warmup_length;
        // Buffers never overlap and unresolved suspicions request nothing.
        assert_eq!(r.labels_served, CHUNK * decisions, "{d}");
        let expected = 100.0 * r.labels_served as f64 / post as f64;
        assert!((r.labeling_percent - expected).abs() < 1e-12, "{d}");
    }
}

#[test]
fn fully_labeled_detectors_pay_for_everything() {
    for d in [DetectorKind::AccTr, DetectorKind::Cusum, DetectorKind::Pht] {
        assert_eq!(top_run(d, 3).labeling_percent, 100.0, "{d}");
    }
    let r = top_run(DetectorKind::NoChange, 3);
    assert_eq!(r.labeling_percent, 0.0);
    assert!(r.events.is_empty());
}

#[test]
fn retraining_beats_the_static_model_after_real_drift() {
    let base = top_run(DetectorKind::NoChange, 4).accuracy;
    for d in [DetectorKind::Md3Svm, DetectorKind::Md3Rs, DetectorKind::AccTr] {
        let acc = top_run(d, 4).accuracy;
        assert!(acc > base, "{d}: {acc} vs no change {base}");
    }
}

#[test]
fn every_suspicion_is_settled_before_the_next() {
    for d in [DetectorKind::Md3Svm, DetectorKind::Md3Rs, DetectorKind::Hdddm] {
        for s in 1..=3 {
            let r = top_run(d, s);
            let mut open = false;
            for e in &r.events {
                match e.kind {
                    DriftEventKind::Suspected => {
                        assert!(!open, "{d} seed {s}");
                        open = true;
                    }
                    DriftEventKind::Confirmed | DriftEventKind::FalseAlarm => {
                        assert!(open, "{d} seed {s}");
                        open = false;
                    }
                    DriftEventKind::Unresolved => assert!(!open, "{d} seed {s}"),
                }
            }
            assert!(!open, "{d} seed {s}: suspicion never settled");
            // Monitoring stops once a late alarm is left unresolved.
            if r.unresolved > 0 {
                assert_eq!(r.events.last().unwrap().kind, DriftEventKind::Unresolved);
            }
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let a = top_run(DetectorKind::Md3Rs, 5);
    let b = top_run(DetectorKind::Md3Rs, 5);
    assert_eq!(a.events, b.events);
    assert_eq!(a.accuracy, b.accuracy);
    assert_eq!(a.labels_served, b.labels_served);
}

#[test]
fn suite_covers_every_combination_in_order() {
    let (data, _) = induced_benchmark(InductionMode::BottomFraction, 1).unwrap();
    let sets = vec![("a".to_string(), data.clone()), ("b".to_string(), data)];
    let dets = [DetectorKind::Hdddm, DetectorKind::NoChange, DetectorKind::Hdddm];
    let rows = run_suite(&sets, &dets, &[2, 1], &RunConfig::new(DetectorKind::NoChange, CHUNK, 0)).unwrap();
    let keys: Vec<(String, DetectorKind, u64)> =
        rows.iter().map(|(r, _)| (r.dataset.clone(), r.detector, r.seed)).collect();
    let mut want = Vec::new();
    for set in ["a", "b"] {
        for d in [DetectorKind::NoChange, DetectorKind::Hdddm] {
            for s in [2, 1] {
                want.push((set.to_string(), d, s));
            }
        }
    }
    assert_eq!(keys, want);
}

#[test]
fn higher_sensitivity_threshold_means_fewer_false_alarms() {
    let (data, _) = induced_benchmark(InductionMode::BottomFraction, 6).unwrap();
    let rows = sensitivity_sweep(&data, &RunConfig::new(DetectorKind::Md3Rs, CHUNK, 6), &[0.0, 1.0, 2.0, 3.0]).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].false_alarms <= w[0].false_alarms, "{rows:?}");
    }
}

#[test]
fn oracle_charges_once() {
    let mut o = Oracle::new(vec![Label::Positive, Label::Negative]);
    assert_eq!(o.request(1).unwrap(), Label::Negative);
    o.request(1).unwrap();
    assert_eq!(o.served(), 1);
    assert_eq!(o.evaluate(0).unwrap(), Label::Positive);
    assert!(!o.was_charged(0));
    assert!(o.request(2).is_err());
}

#[test]
fn bad_configs_are_rejected() {
    let ok = RunConfig::new(DetectorKind::Md3Svm, 50, 0);
    let bad = [
        RunConfig { chunk: 9, ..ok },
        RunConfig { n_train: Some(0), ..ok },
        RunConfig { initial_fraction: 0.0, ..ok },
        RunConfig { initial_fraction: 1.0, ..ok },
        RunConfig { theta: -1.0, ..ok },
        RunConfig { theta: f64::NAN, ..ok },
        RunConfig { folds: 1, ..ok },
    ];
    assert!(ok.validate().is_ok());
    for cfg in bad {
        assert!(matches!(cfg.validate(), Err(Error::Parameter(_))), "{cfg:?}");
    }
}
