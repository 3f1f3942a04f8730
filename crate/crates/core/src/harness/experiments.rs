//! Batch experiments: scenario deltas, the HD20 relevance sweep, and
//! parameter sweeps over full stream runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{format_fixed, SummaryRecord};
use super::{run_stream, RunConfig};
use crate::classifiers::{
    train_linear_svm, train_with_subspaces, BaseLearner, EnsembleConfig, Model, TreeConfig,
};
use crate::data::{Dataset, Instance};
use crate::detectors::hellinger_between;
use crate::error::{Error, Result};
use crate::margin::{margin_density, mean_uncertainty, MarginSpec, DEFAULT_THETA_MARGIN};
use crate::seed;
use crate::data::Label;
use crate::induction::{induce, InductionMode, InductionPlan, DEFAULT_BINS, DEFAULT_CHANGE_POINT, DEFAULT_FRACTION};
use crate::synth::{
    generate_blobs, generate_scenario, graded_relevance_spec, hd20_change_point, ScenarioId, HD20_MAX_DRIFTED,
};

/// A delta above this counts as a change.
pub const NONZERO_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDeltas {
    /// `err(test) − err(train)`.
    pub err: f64,
    /// `MD(test) − MD(train)`; negative when the margin empties.
    pub md: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDeltas {
    pub from: ScenarioId,
    pub to: ScenarioId,
    pub svm: MetricDeltas,
    pub rs: MetricDeltas,
    /// `HD(train, test) / √2`.
    pub hd: f64,
}

fn features(rows: &[Instance]) -> Vec<Vec<f64>> {
    rows.iter().map(|i| i.features.clone()).collect()
}

fn deltas(model: &Model, spec: &MarginSpec, train: &Dataset, test: &Dataset) -> Result<MetricDeltas> {
    let err = |d: &Dataset| model.accuracy(d.instances()).map(|a| 1.0 - a);
    Ok(MetricDeltas {
        err: err(test)? - err(train)?,
        md: margin_density(model, spec, test.instances())? - margin_density(model, spec, train.instances())?,
    })
}

/// The two-tree ensemble used on the low-dimensional scenarios: one shallow
/// tree per axis of the class-relevant plane. A third, irrelevant axis is
/// left out.
pub fn scenario_ensemble(train: &Dataset, seed: u64) -> Result<Model> {
    let base = BaseLearner::Tree(TreeConfig {
        max_depth: 2,
        min_leaf: 5,
    });
    Ok(Model::Ensemble(train_with_subspaces(
        train,
        vec![vec![0], vec![1]],
        &base,
        seed,
    )?))
}

/// Trains on `n_per_class` samples of `from` and measures the metric
/// changes on `n_per_class` fresh samples of `to`.
pub fn scenario_deltas(from: ScenarioId, to: ScenarioId, n_per_class: usize, seed: u64) -> Result<ScenarioDeltas> {
    if matches!(from, ScenarioId::Hd20(_)) || matches!(to, ScenarioId::Hd20(_)) {
        return Err(Error::Parameter("scenario deltas apply to the low-dimensional scenarios".into()));
    }
    let train = generate_scenario(from, n_per_class, seed::derive(seed, "scenario-train"))?;
    let test = generate_scenario(to, n_per_class, seed::derive(seed, "scenario-test"))?;
    if train.dim() != test.dim() {
        return Err(Error::Shape {
            expected: train.dim(),
            actual: test.dim(),
        });
    }
    let svm = Model::Linear(train_linear_svm(&train, 1.0, seed::derive(seed, "scenario-svm"))?);
    let rs = scenario_ensemble(&train, seed::derive(seed, "scenario-rs"))?;
    Ok(ScenarioDeltas {
        from,
        to,
        svm: deltas(&svm, &MarginSpec::svm(), &train, &test)?,
        rs: deltas(&rs, &MarginSpec::ensemble(DEFAULT_THETA_MARGIN)?, &train, &test)?,
        hd: hellinger_between(&features(train.instances()), &features(test.instances()))?
            / std::f64::consts::SQRT_2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table8Row {
    pub drifted: usize,
    pub d_err: f64,
    pub d_md: f64,
    pub d_uncertain: f64,
    pub d_hd: f64,
}

impl SummaryRecord for Table8Row {
    fn header() -> Vec<&'static str> {
        vec!["drifted_features", "delta_err", "delta_md", "delta_uncertain", "delta_hd"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.drifted.to_string(),
            format_fixed(self.d_err),
            format_fixed(self.d_md),
            format_fixed(self.d_uncertain),
            format_fixed(self.d_hd),
        ]
    }
}

/// First drifted-feature count (from 1) at which each metric exceeds
/// [`NONZERO_THRESHOLD`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table8Summary {
    pub err: Option<usize>,
    pub md: Option<usize>,
    pub uncertain: Option<usize>,
    pub hd: Option<usize>,
}

pub fn first_detection(rows: &[Table8Row], metric: impl Fn(&Table8Row) -> f64) -> Option<usize> {
    rows.iter()
        .filter(|r| r.drifted >= 1)
        .find(|r| metric(r) > NONZERO_THRESHOLD)
        .map(|r| r.drifted)
}

/// Default number of independent repeats in [`table8_sweep`].
pub const TABLE8_REPEATS: usize = 25;

fn table8_repeat(n_per_class: usize, seed: u64) -> Result<Vec<Table8Row>> {
    let spec = MarginSpec::ensemble(DEFAULT_THETA_MARGIN)?;
    (0..=HD20_MAX_DRIFTED)
        .into_par_iter()
        .map(|i| {
            let data = generate_scenario(ScenarioId::Hd20(i), n_per_class, seed::derive(seed, "table8-data"))?;
            let (pre, post) = data.split_at(hd20_change_point(n_per_class));
            let model = Model::Ensemble(crate::classifiers::train_subspace_ensemble(
                &pre,
                &EnsembleConfig::default(),
                seed::derive(seed, "table8-model"),
            )?);
            let err = |d: &Dataset| model.accuracy(d.instances()).map(|a| 1.0 - a);
            Ok(Table8Row {
                drifted: i,
                d_err: err(&post)? - err(&pre)?,
                d_md: (margin_density(&model, &spec, post.instances())?
                    - margin_density(&model, &spec, pre.instances())?)
                .abs(),
                d_uncertain: (mean_uncertainty(&model, post.instances())?
                    - mean_uncertainty(&model, pre.instances())?)
                .abs(),
                d_hd: hellinger_between(&features(pre.instances()), &features(post.instances()))?
                    / std::f64::consts::SQRT_2,
            })
        })
        .collect()
}

// Lower median; a repeat that never fires counts as one past the range.
fn median_first(per_repeat: &[Option<usize>]) -> Option<usize> {
    let beyond = HD20_MAX_DRIFTED + 1;
    let mut v: Vec<usize> = per_repeat.iter().map(|o| o.unwrap_or(beyond)).collect();
    v.sort_unstable();
    let m = v[(v.len() - 1) / 2];
    (m < beyond).then_some(m)
}

/// One row per drifted-feature count `0..=15`, averaged over `repeats`
/// independent streams and models.
///
/// For each count a 20-tree, half-feature subspace ensemble is trained on
/// the pre-drift half of an HD20 stream and the metrics are compared on the
/// post-drift half. `ΔMD` and `ΔUncertain` are absolute differences;
/// `ΔHD` is normalized by `√2`. Within a repeat the pre-drift half and the
/// model do not depend on the count.
///
/// Which features the trees split on is a coin flip among equally relevant
/// ones, so a single repeat's first-detection points scatter by several
/// counts. The summary reports the median over repeats.
pub fn table8_sweep(n_per_class: usize, seed: u64, repeats: usize) -> Result<(Vec<Table8Row>, Table8Summary)> {
    if repeats == 0 {
        return Err(Error::Parameter("table8 sweep needs at least one repeat".into()));
    }
    let runs = (0..repeats as u64)
        .into_par_iter()
        .map(|r| table8_repeat(n_per_class, seed::derive_indexed(seed, "table8-repeat", r)))
        .collect::<Result<Vec<_>>>()?;
    let k = repeats as f64;
    let rows = (0..=HD20_MAX_DRIFTED)
        .map(|i| {
            let avg = |f: fn(&Table8Row) -> f64| runs.iter().map(|run| f(&run[i])).sum::<f64>() / k;
            Table8Row {
                drifted: i,
                d_err: avg(|r| r.d_err),
                d_md: avg(|r| r.d_md),
                d_uncertain: avg(|r| r.d_uncertain),
                d_hd: avg(|r| r.d_hd),
            }
        })
        .collect();
    let pick = |f: fn(&Table8Row) -> f64| {
        median_first(&runs.iter().map(|run| first_detection(run, f)).collect::<Vec<_>>())
    };
    let summary = Table8Summary {
        err: pick(|r| r.d_err),
        md: pick(|r| r.d_md),
        uncertain: pick(|r| r.d_uncertain),
        hd: pick(|r| r.d_hd),
    };
    Ok((rows, summary))
}

/// Rows in the induced benchmark stream.
pub const BENCHMARK_ROWS: usize = 1500;

/// The 16-feature graded-relevance stream with class −1 rotated on the top
/// or bottom quarter of its features from the midpoint on.
pub fn induced_benchmark(mode: InductionMode, seed: u64) -> Result<(Dataset, InductionPlan)> {
    let data = generate_blobs(&graded_relevance_spec(BENCHMARK_ROWS / 2), seed::derive(seed, "benchmark-data"))?;
    induce(&data, mode, DEFAULT_FRACTION, DEFAULT_CHANGE_POINT, Label::Negative, DEFAULT_BINS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub accuracy: f64,
    pub drifts_confirmed: usize,
    pub false_alarms: usize,
    pub suspected: usize,
    pub labeling_percent: f64,
}

impl SummaryRecord for SweepRow {
    fn header() -> Vec<&'static str> {
        vec![
            "parameter",
            "value",
            "accuracy",
            "drifts_confirmed",
            "false_alarms",
            "suspected",
            "labeling_percent",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.parameter.clone(),
            format_fixed(self.value),
            format_fixed(self.accuracy),
            self.drifts_confirmed.to_string(),
            self.false_alarms.to_string(),
            self.suspected.to_string(),
            format_fixed(self.labeling_percent),
        ]
    }
}

fn sweep(
    data: &Dataset,
    base: &RunConfig,
    values: &[f64],
    parameter: &str,
    apply: impl Fn(&mut RunConfig, f64) + Sync,
) -> Result<Vec<SweepRow>> {
    values
        .par_iter()
        .map(|&v| {
            let mut cfg = *base;
            apply(&mut cfg, v);
            let r = run_stream(data, &cfg)?;
            Ok(SweepRow {
                parameter: parameter.to_string(),
                value: v,
                accuracy: r.accuracy,
                drifts_confirmed: r.drifts_confirmed,
                false_alarms: r.false_alarms,
                suspected: r.suspected,
                labeling_percent: r.labeling_percent,
            })
        })
        .collect()
}

/// One run per `θ_margin` value.
pub fn margin_width_sweep(data: &Dataset, base: &RunConfig, values: &[f64]) -> Result<Vec<SweepRow>> {
    sweep(data, base, values, "theta_margin", |c, v| c.theta_margin = v)
}

/// One run per sensitivity `θ` value.
pub fn sensitivity_sweep(data: &Dataset, base: &RunConfig, values: &[f64]) -> Result<Vec<SweepRow>> {
    sweep(data, base, values, "theta", |c, v| c.theta = v)
}
