//! Cross products of datasets, detectors and seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{format_fixed, SummaryRecord};
use super::{run_stream, DetectorKind, RunConfig, RunReport};
use crate::data::Dataset;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub dataset: String,
    pub detector: DetectorKind,
    pub seed: u64,
    pub accuracy: f64,
    pub drifts_confirmed: usize,
    pub false_alarms: usize,
    pub suspected: usize,
    pub unresolved: usize,
    pub labeling_percent: f64,
    pub labeling_percent_inclusive: f64,
}

impl SuiteRow {
    pub fn from_report(dataset: &str, r: &RunReport) -> Self {
        SuiteRow {
            dataset: dataset.to_string(),
            detector: r.detector,
            seed: r.seed,
            accuracy: r.accuracy,
            drifts_confirmed: r.drifts_confirmed,
            false_alarms: r.false_alarms,
            suspected: r.suspected,
            unresolved: r.unresolved,
            labeling_percent: r.labeling_percent,
            labeling_percent_inclusive: r.labeling_percent_inclusive,
        }
    }
}

impl SummaryRecord for SuiteRow {
    fn header() -> Vec<&'static str> {
        vec![
            "dataset",
            "detector",
            "seed",
            "accuracy",
            "drifts_confirmed",
            "false_alarms",
            "suspected",
            "unresolved",
            "labeling_percent",
            "labeling_percent_inclusive",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.dataset.clone(),
            self.detector.to_string(),
            self.seed.to_string(),
            format_fixed(self.accuracy),
            self.drifts_confirmed.to_string(),
            self.false_alarms.to_string(),
            self.suspected.to_string(),
            self.unresolved.to_string(),
            format_fixed(self.labeling_percent),
            format_fixed(self.labeling_percent_inclusive),
        ]
    }
}

/// Runs every (dataset, detector, seed) combination with `base` as the
/// template config. Runs execute in parallel; the result is ordered by
/// dataset position, then detector, then seed.
pub fn run_suite(
    datasets: &[(String, Dataset)],
    detectors: &[DetectorKind],
    seeds: &[u64],
    base: &RunConfig,
) -> Result<Vec<(SuiteRow, RunReport)>> {
    let mut jobs = Vec::new();
    for (di, _) in datasets.iter().enumerate() {
        let mut dets = detectors.to_vec();
        dets.sort();
        dets.dedup();
        for &d in &dets {
            for &s in seeds {
                jobs.push((di, d, s));
            }
        }
    }
    jobs.par_iter()
        .map(|&(di, detector, seed)| {
            let (name, data) = &datasets[di];
            let cfg = RunConfig {
                detector,
                seed,
                ..*base
            };
            let report = run_stream(data, &cfg)?;
            Ok((SuiteRow::from_report(name, &report), report))
        })
        .collect()
}
