//! Cross-validated reference distributions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{Model, ModelConfig};
use crate::data::{Dataset, Instance, Label};
use crate::error::{Error, Result};
use crate::margin::{margin_density, mean_uncertainty, MarginSpec};
use crate::seed;
use crate::stats::{mean, population_std};

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_EPSILON_SIGMA: f64 = 1e-3;

/// Expected value and spread of the tracked statistic and of accuracy.
///
/// `md_ref`/`sigma_md` hold whichever unlabeled statistic the detector
/// tracks: margin density for MD3, mean uncertainty for the uncertainty
/// tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDistribution {
    pub md_ref: f64,
    pub sigma_md: f64,
    pub acc_ref: f64,
    pub sigma_acc: f64,
}

impl ReferenceDistribution {
    /// Means and population standard deviations of per-fold values, with
    /// both sigmas floored at `epsilon_sigma`.
    pub fn from_folds(stat: &[f64], acc: &[f64], epsilon_sigma: f64) -> Result<Self> {
        if stat.is_empty() || stat.len() != acc.len() {
            return Err(Error::Parameter(
                "fold statistics must be non-empty and paired".into(),
            ));
        }
        Ok(ReferenceDistribution {
            md_ref: mean(stat),
            sigma_md: population_std(stat).max(epsilon_sigma),
            acc_ref: mean(acc),
            sigma_acc: population_std(acc).max(epsilon_sigma),
        })
    }
}

/// The unlabeled statistic measured on each test fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum Statistic {
    MarginDensity(MarginSpec),
    MeanUncertainty,
    /// Accuracy only; `md_ref` is 0.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    /// Model whose accuracy is measured.
    pub prediction: ModelConfig,
    /// Model the statistic is measured on; `None` reuses the prediction model.
    pub detection: Option<ModelConfig>,
    pub statistic: Statistic,
    pub folds: usize,
    pub epsilon_sigma: f64,
}

impl CvConfig {
    pub fn new(prediction: ModelConfig, statistic: Statistic) -> Self {
        CvConfig {
            prediction,
            detection: None,
            statistic,
            folds: DEFAULT_FOLDS,
            epsilon_sigma: DEFAULT_EPSILON_SIGMA,
        }
    }
}

/// Index sets of each test fold: contiguous bands, or a class-stratified
/// round robin when a band would leave a training fold with one class.
pub fn fold_indices(labels: &[Label], k: usize) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Parameter(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::Parameter(format!(
            "{n} samples are too few for {k}-fold cross validation"
        )));
    }
    let sequential: Vec<Vec<usize>> = (0..k).map(|f| (f * n / k..(f + 1) * n / k).collect()).collect();
    if training_folds_have_both_classes(labels, &sequential) {
        return Ok(sequential);
    }
    let mut stratified = vec![Vec::new(); k];
    for class in [Label::Negative, Label::Positive] {
        for (slot, i) in (0..n).filter(|&i| labels[i] == class).enumerate() {
            stratified[slot % k].push(i);
        }
    }
    for fold in &mut stratified {
        fold.sort_unstable();
    }
    if stratified.iter().any(Vec::is_empty) || !training_folds_have_both_classes(labels, &stratified) {
        return Err(Error::DegenerateTraining(
            "a cross-validation training fold holds a single class".into(),
        ));
    }
    Ok(stratified)
}

fn training_folds_have_both_classes(labels: &[Label], folds: &[Vec<usize>]) -> bool {
    let total_pos = labels.iter().filter(|&&l| l == Label::Positive).count();
    let total_neg = labels.len() - total_pos;
    folds.iter().all(|test| {
        let pos = test.iter().filter(|&&i| labels[i] == Label::Positive).count();
        let neg = test.len() - pos;
        total_pos > pos && total_neg > neg
    })
}

fn statistic_of(stat: &Statistic, model: &Model, batch: &[Instance]) -> Result<f64> {
    match stat {
        Statistic::MarginDensity(spec) => margin_density(model, spec, batch),
        Statistic::MeanUncertainty => mean_uncertainty(model, batch),
        Statistic::None => Ok(0.0),
    }
}

/// Reference distribution of a labeled training set by k-fold CV.
///
/// Fold models see `(k−1)/k` of the rows. Their regularization is rescaled
/// to match the model deployed on all of them; with a fixed SVM `C` the fold
/// margins come out wider and the reference margin density sits above what
/// the deployed model produces on the same source.
pub fn reference_from_cv_with(train: &Dataset, cfg: &CvConfig, seed: u64) -> Result<ReferenceDistribution> {
    let labels = train.labels()?;
    let folds = fold_indices(&labels, cfg.folds)?;
    let rows = train.instances();
    let per_fold = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let mut in_test = vec![false; rows.len()];
            for &i in test_idx {
                in_test[i] = true;
            }
            let train_rows: Vec<Instance> = rows
                .iter()
                .zip(&in_test)
                .filter(|(_, t)| !**t)
                .map(|(r, _)| r.clone())
                .collect();
            let test_rows: Vec<Instance> = test_idx.iter().map(|&i| rows[i].clone()).collect();
            let fold_train = train.with_instances(train_rows)?;
            let (full, part) = (rows.len(), fold_train.len());
            let predictor = cfg
                .prediction
                .for_subsample(full, part)
                .train(&fold_train, seed::derive_indexed(seed, "cv-prediction", f as u64))?;
            let acc = predictor.accuracy(&test_rows)?;
            let stat = match &cfg.detection {
                None => statistic_of(&cfg.statistic, &predictor, &test_rows)?,
                Some(det) => {
                    let detector = det
                        .for_subsample(full, part)
                        .train(&fold_train, seed::derive_indexed(seed, "cv-detection", f as u64))?;
                    statistic_of(&cfg.statistic, &detector, &test_rows)?
                }
            };
            Ok((stat, acc))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (stat, acc): (Vec<f64>, Vec<f64>) = per_fold.into_iter().unzip();
    ReferenceDistribution::from_folds(&stat, &acc, cfg.epsilon_sigma)
}

/// Margin-density reference of one model configuration.
pub fn reference_from_cv(
    train: &Dataset,
    config: &ModelConfig,
    spec: &MarginSpec,
    folds: usize,
    seed: u64,
) -> Result<ReferenceDistribution> {
    let cfg = CvConfig {
        folds,
        ..CvConfig::new(*config, Statistic::MarginDensity(*spec))
    };
    reference_from_cv_with(train, &cfg, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_statistics_oracle() {
        let acc = [0.9, 0.92, 0.94, 0.92, 0.92];
        let r = ReferenceDistribution::from_folds(&[0.1; 5], &acc, 1e-3).unwrap();
        assert!((r.acc_ref - 0.92).abs() < 1e-12);
        // sqrt(((0.02)^2 * 2) / 5)
        assert!((r.sigma_acc - (0.0008f64 / 5.0).sqrt()).abs() < 1e-12);
        assert!((r.sigma_acc - 0.01265).abs() < 1e-5);
        assert_eq!(r.sigma_md, 1e-3);
    }

    #[test]
    fn sequential_folds_when_classes_mixed() {
        let labels: Vec<Label> = (0..10)
            .map(|i| if i % 2 == 0 { Label::Negative } else { Label::Positive })
            .collect();
        let f = fold_indices(&labels, 5).unwrap();
        assert_eq!(f[0], vec![0, 1]);
        assert_eq!(f[4], vec![8, 9]);
    }

    #[test]
    fn stratified_fallback() {
        // The last band holds all positives, so its training fold would be
        // single-class.
        let mut labels = vec![Label::Negative; 8];
        labels.extend([Label::Positive; 2]);
        let f = fold_indices(&labels, 5).unwrap();
        assert!(training_folds_have_both_classes(&labels, &f));
        let mut all: Vec<usize> = f.concat();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());

        let single = vec![Label::Negative; 10];
        assert!(matches!(fold_indices(&single, 5), Err(Error::DegenerateTraining(_))));
        assert!(fold_indices(&labels[..3], 5).is_err());
    }
}
