//! Controlled drift induction on static labeled data.
//!
//! Features are ranked by information gain. A chosen subset is then rotated
//! for one class after a change point: with subset `(f1, …, fk)` the value at
//! `f1` becomes the old value at `fk`, and the value at `fj` becomes the old
//! value at `f(j−1)`. Rotating the most informative features produces a drift
//! that hurts the classifier. Rotating the least informative ones moves the
//! marginal distribution while leaving the class boundary intact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::error::{Error, Result};
use crate::stats::entropy;

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_FRACTION: f64 = 0.25;
pub const DEFAULT_CHANGE_POINT: f64 = 0.5;

/// `(feature, gain)` pairs, highest gain first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub entries: Vec<(usize, f64)>,
}

impl FeatureRanking {
    pub fn features(&self) -> Vec<usize> {
        self.entries.iter().map(|&(f, _)| f).collect()
    }

    pub fn gain_of(&self, feature: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == feature).map(|e| e.1)
    }
}

fn bin_of(v: f64, bins: usize) -> usize {
    ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1)
}

/// Entropy of the label minus its conditional entropy given the feature,
/// discretized into `bins` equal-width bins on `[0, 1]`. Ties keep the lower
/// feature index first.
pub fn rank_by_information_gain(data: &Dataset, bins: usize) -> Result<FeatureRanking> {
    if bins < 2 {
        return Err(Error::Parameter(format!("need at least 2 bins, got {bins}")));
    }
    if data.is_empty() {
        return Err(Error::EmptyInput("cannot rank features of an empty dataset".into()));
    }
    let labels = data.labels()?;
    let n = labels.len() as f64;
    let pos = labels.iter().filter(|&&l| l == Label::Positive).count() as f64;
    let h_label = entropy(&[n - pos, pos]);

    let mut entries: Vec<(usize, f64)> = (0..data.dim())
        .map(|f| {
            // counts[bin] = [negatives, positives]
            let mut counts = vec![[0.0f64; 2]; bins];
            for (inst, &y) in data.instances().iter().zip(&labels) {
                counts[bin_of(inst.features[f], bins)][usize::from(y == Label::Positive)] += 1.0;
            }
            let conditional: f64 = counts
                .iter()
                .map(|c| (c[0] + c[1]) / n * entropy(c))
                .sum();
            (f, (h_label - conditional).max(0.0))
        })
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(FeatureRanking { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InductionMode {
    TopFraction,
    BottomFraction,
}

impl fmt::Display for InductionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InductionMode::TopFraction => "top",
            InductionMode::BottomFraction => "bottom",
        })
    }
}

impl FromStr for InductionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "top" | "top_fraction" => Ok(InductionMode::TopFraction),
            "bottom" | "bottom_fraction" => Ok(InductionMode::BottomFraction),
            _ => Err(Error::Parameter(format!(
                "unknown induction mode {s:?}; expected top or bottom"
            ))),
        }
    }
}

/// Everything needed to replay an induction on the same input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductionPlan {
    pub target_class: Label,
    pub feature_subset: Vec<usize>,
    pub change_point: f64,
    pub mode: InductionMode,
    pub fraction: f64,
    /// The ranking the subset was taken from; absent for hand-written plans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<FeatureRanking>,
}

impl InductionPlan {
    /// A plan with an explicit subset and no ranking attached.
    pub fn manual(target_class: Label, feature_subset: Vec<usize>, change_point: f64) -> Self {
        InductionPlan {
            target_class,
            fraction: DEFAULT_FRACTION,
            mode: InductionMode::TopFraction,
            feature_subset,
            change_point,
            ranking: None,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.feature_subset.is_empty() {
            return Err(Error::Parameter("feature subset is empty".into()));
        }
        if let Some(&bad) = self.feature_subset.iter().find(|&&f| f >= dim) {
            return Err(Error::Index { index: bad, dim });
        }
        let mut seen = self.feature_subset.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.feature_subset.len() {
            return Err(Error::Parameter("feature subset repeats an index".into()));
        }
        if !(self.change_point > 0.0 && self.change_point < 1.0) {
            return Err(Error::Parameter(format!(
                "change point must lie strictly inside (0, 1), got {}",
                self.change_point
            )));
        }
        Ok(())
    }

    /// First stream position affected by the rotation.
    pub fn start_index(&self, len: usize) -> usize {
        (self.change_point * len as f64).ceil() as usize
    }
}

/// Applies the plan's cyclic right shift to every target-class instance at or
/// after the change point.
pub fn rotate_features(data: &Dataset, plan: &InductionPlan) -> Result<Dataset> {
    plan.validate(data.dim())?;
    let start = plan.start_index(data.len());
    let subset = &plan.feature_subset;
    let k = subset.len();
    let mut rows = data.instances().to_vec();
    for inst in rows.iter_mut().skip(start) {
        if inst.require_label()? != plan.target_class {
            continue;
        }
        let old: Vec<f64> = subset.iter().map(|&f| inst.features[f]).collect();
        for (j, &f) in subset.iter().enumerate() {
            inst.features[f] = old[(j + k - 1) % k];
        }
    }
    data.with_instances(rows)
}

/// Number of features a fraction selects out of `dim`.
pub fn subset_size(fraction: f64, dim: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    Ok(((fraction * dim as f64).ceil() as usize).clamp(1, dim))
}

/// Ranks, selects the top or bottom `⌈fraction·d⌉` features and rotates them.
pub fn induce(
    data: &Dataset,
    mode: InductionMode,
    fraction: f64,
    change_point: f64,
    target_class: Label,
    bins: usize,
) -> Result<(Dataset, InductionPlan)> {
    let size = subset_size(fraction, data.dim())?;
    let ranking = rank_by_information_gain(data, bins)?;
    let ordered = ranking.features();
    let feature_subset = match mode {
        InductionMode::TopFraction => ordered[..size].to_vec(),
        InductionMode::BottomFraction => ordered[ordered.len() - size..].to_vec(),
    };
    let plan = InductionPlan {
        target_class,
        feature_subset,
        change_point,
        mode,
        fraction,
        ranking: Some(ranking),
    };
    let induced = rotate_features(data, &plan)?;
    Ok((induced, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Instance;

    fn labeled(rows: Vec<(Vec<f64>, Label)>) -> Dataset {
        let d = rows[0].0.len();
        Dataset::from_instances(
            rows.into_iter().map(|(x, y)| Instance::labeled(x, y)).collect(),
            d,
        )
        .unwrap()
    }

    #[test]
    fn separating_feature_outranks_constant() {
        let mut rows = Vec::new();
        for k in 0..40 {
            let y = if k % 2 == 0 { Label::Negative } else { Label::Positive };
            let sep = if y == Label::Positive { 1.0 } else { 0.0 };
            rows.push((vec![0.5, sep], y));
        }
        let r = rank_by_information_gain(&labeled(rows), 10).unwrap();
        assert_eq!(r.features(), vec![1, 0]);
        assert!((r.gain_of(1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.gain_of(0).unwrap(), 0.0);
    }

    #[test]
    fn identical_columns_tie_to_lower_index() {
        let rows = (0..30)
            .map(|k| {
                let v = (k % 10) as f64 / 10.0;
                let y = if v > 0.45 { Label::Positive } else { Label::Negative };
                (vec![0.2, v, v], y)
            })
            .collect();
        let r = rank_by_information_gain(&labeled(rows), 10).unwrap();
        assert_eq!(r.features(), vec![1, 2, 0]);
    }

    #[test]
    fn unlabeled_is_rejected() {
        let d = Dataset::from_instances(vec![Instance::unlabeled(vec![0.1])], 1).unwrap();
        assert!(matches!(rank_by_information_gain(&d, 10), Err(Error::MissingLabels)));
        let l = labeled(vec![(vec![0.1], Label::Positive)]);
        assert!(rank_by_information_gain(&l, 1).is_err());
    }

    #[test]
    fn rotation_example() {
        let mut x = vec![0.0; 8];
        x[1] = 0.2;
        x[5] = 0.5;
        x[7] = 0.9;
        let data = labeled(vec![(x.clone(), Label::Negative), (x.clone(), Label::Negative)]);
        let plan = InductionPlan::manual(Label::Negative, vec![1, 5, 7], 0.5);
        let out = rotate_features(&data, &plan).unwrap();
        // Position 0 precedes the change point.
        assert_eq!(out.instances()[0].features, x);
        let y = &out.instances()[1].features;
        assert_eq!((y[1], y[5], y[7]), (0.9, 0.2, 0.5));
    }

    #[test]
    fn other_class_and_single_feature_untouched() {
        let data = labeled(vec![
            (vec![0.1, 0.2], Label::Positive),
            (vec![0.3, 0.4], Label::Positive),
        ]);
        let plan = InductionPlan::manual(Label::Negative, vec![0, 1], 0.5);
        assert_eq!(rotate_features(&data, &plan).unwrap(), data);
        let plan = InductionPlan::manual(Label::Positive, vec![1], 0.5);
        assert_eq!(rotate_features(&data, &plan).unwrap(), data);
    }

    #[test]
    fn plan_validation() {
        let data = labeled(vec![(vec![0.1, 0.2], Label::Positive)]);
        let bad_index = InductionPlan::manual(Label::Positive, vec![0, 2], 0.5);
        assert!(matches!(rotate_features(&data, &bad_index), Err(Error::Index { .. })));
        assert!(InductionPlan::manual(Label::Positive, vec![], 0.5).validate(2).is_err());
        assert!(InductionPlan::manual(Label::Positive, vec![0], 1.0).validate(2).is_err());
        assert!(InductionPlan::manual(Label::Positive, vec![0, 0], 0.5).validate(2).is_err());
        assert!(subset_size(0.0, 16).is_err());
        assert_eq!(subset_size(0.25, 16).unwrap(), 4);
    }

    #[test]
    fn plan_round_trips_through_json() {
        let data = labeled(
            (0..20)
                .map(|k| {
                    let y = if k % 2 == 0 { Label::Negative } else { Label::Positive };
                    (vec![k as f64 / 20.0, 0.5, y.sign().max(0.0)], y)
                })
                .collect(),
        );
        let (_, plan) = induce(&data, InductionMode::TopFraction, 0.5, 0.5, Label::Negative, 10).unwrap();
        let text = serde_json::to_string(&plan).unwrap();
        let back: InductionPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plan);
        assert_eq!(plan.feature_subset, vec![2, 0]);
    }
}
