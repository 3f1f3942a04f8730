use driftbench::data::{apply_normalizer, fit_normalizer, read_csv, LabelColumn, shuffle, write_csv, Dataset, Instance, Label};
use driftbench::synth::{generate_blobs, generate_scenario, graded_relevance_spec, ScenarioId, HD20_IRRELEVANT};
use proptest::prelude::*;

fn label_counts(d: &Dataset) -> (usize, usize) {
    (d.count_label(Label::Negative), d.count_label(Label::Positive))
}

#[test]
fn scenarios_are_balanced() {
    let mut ids = ScenarioId::all_low_dim().to_vec();
    ids.extend([ScenarioId::Hd20(0), ScenarioId::Hd20(7), ScenarioId::Hd20(15)]);
    for id in ids {
        for n in [1, 2, 37] {
            let (neg, pos) = label_counts(&generate_scenario(id, n, 3).unwrap());
            assert!(neg.abs_diff(pos) <= 1, "{id} n={n}: {neg} vs {pos}");
        }
    }
}

#[test]
fn hd20_leading_features_carry_no_class_signal() {
    let data = generate_scenario(ScenarioId::Hd20(0), 2500, 4).unwrap();
    for f in 0..HD20_IRRELEVANT {
        let mean = |label| {
            let vals: Vec<f64> = data
                .instances()
                .iter()
                .filter(|i| i.label == Some(label))
                .map(|i| i.features[f])
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let gap = (mean(Label::Positive) - mean(Label::Negative)).abs();
        assert!(gap < 0.02, "feature {f}: class means differ by {gap}");
    }
}

#[test]
fn hd20_drifted_block_moves_to_three_quarters() {
    let data = generate_scenario(ScenarioId::Hd20(8), 2000, 5).unwrap();
    let (_, post) = data.split_at(data.len() / 2);
    let negatives: Vec<&Instance> = post.instances().iter().filter(|i| i.label == Some(Label::Negative)).collect();
    let mean = |f: usize| negatives.iter().map(|i| i.features[f]).sum::<f64>() / negatives.len() as f64;
    for f in 0..8 {
        assert!((mean(f) - 0.75).abs() < 0.02, "feature {f}: {}", mean(f));
    }
    for f in 8..20 {
        assert!((mean(f) - 0.15).abs() < 0.02, "feature {f}: {}", mean(f));
    }
}

#[test]
fn generation_is_deterministic() {
    for id in [ScenarioId::A3, ScenarioId::C1, ScenarioId::Hd20(9)] {
        let a = generate_scenario(id, 200, 17).unwrap();
        let b = generate_scenario(id, 200, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_scenario(id, 200, 18).unwrap());
    }
    let g = graded_relevance_spec(100);
    assert_eq!(generate_blobs(&g, 1).unwrap(), generate_blobs(&g, 1).unwrap());
}

#[test]
fn generated_values_stay_in_unit_range() {
    let data = generate_blobs(&graded_relevance_spec(1000), 6).unwrap();
    assert!(data
        .instances()
        .iter()
        .all(|i| i.features.iter().all(|v| (0.0..=1.0).contains(v))));
}

#[test]
fn csv_round_trip_keeps_labels_and_order() {
    let data = generate_scenario(ScenarioId::B1, 30, 2).unwrap();
    let mut buf = Vec::new();
    write_csv(&data, &mut buf).unwrap();
    let back = read_csv(buf.as_slice(), Some(&LabelColumn::Name("class".into())), "1").unwrap();
    assert_eq!(back.labels().unwrap(), data.labels().unwrap());
    assert_eq!(back.len(), data.len());
}

fn tagged(n: usize) -> Dataset {
    // The first feature stores the original position.
    let rows = (0..n)
        .map(|k| {
            let label = if k % 3 == 0 { Label::Positive } else { Label::Negative };
            Instance::labeled(vec![k as f64, (k % 7) as f64 / 7.0], label)
        })
        .collect();
    Dataset::from_instances(rows, 2).unwrap()
}

#[test]
fn shuffle_is_a_seeded_permutation() {
    let data = tagged(1000);
    let a = shuffle(&data, 5);
    assert_eq!(a, shuffle(&data, 5));
    assert_ne!(a, shuffle(&data, 6));
    let mut rows = a.into_instances();
    rows.sort_by(|x, y| x.features[0].total_cmp(&y.features[0]));
    assert_eq!(rows, data.instances());
}

#[test]
fn normalize_then_shuffle_keeps_counts_and_labels() {
    let data = tagged(120);
    let out = shuffle(&apply_normalizer(&fit_normalizer(&data).unwrap(), &data).unwrap(), 3);
    assert_eq!(out.len(), data.len());
    assert_eq!(label_counts(&out), label_counts(&data));
}

proptest! {
    #[test]
    fn normalization_is_idempotent(rows in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 1..40)) {
        let data = Dataset::from_instances(
            rows.into_iter().map(|x| Instance::labeled(x, Label::Positive)).collect(),
            3,
        ).unwrap();
        let once = apply_normalizer(&fit_normalizer(&data).unwrap(), &data).unwrap();
        let twice = apply_normalizer(&fit_normalizer(&once).unwrap(), &once).unwrap();
        for (a, b) in once.instances().iter().zip(twice.instances()) {
            for (x, y) in a.features.iter().zip(&b.features) {
                prop_assert!((0.0..=1.0).contains(x));
                prop_assert!((x - y).abs() <= 1e-12, "{} became {}", x, y);
            }
        }
    }
}
