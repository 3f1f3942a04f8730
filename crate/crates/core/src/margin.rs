//! Margin-inclusion signals and margin density.
//!
//! A sample is "in the margin" when the classifier is uncertain about it:
//! `|w·x + b| ≤ 1` for a hinge-loss SVM, or `|p₊ − p₋| ≤ θ_margin` for
//! ensembles and probabilistic models. Margin density is the fraction of a
//! batch that falls inside. All thresholds are inclusive.

use serde::{Deserialize, Serialize};

use crate::classifiers::{LinearModel, Model, ModelConfig, SubspaceEnsemble};
use crate::data::Instance;
use crate::error::{Error, Result};

pub const DEFAULT_THETA_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    SvmGeometric,
    EnsembleDisagreement,
    ProbabilisticConfidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginSpec {
    pub kind: MarginKind,
    /// Ignored for [`MarginKind::SvmGeometric`].
    pub theta_margin: f64,
}

impl MarginSpec {
    pub fn svm() -> Self {
        MarginSpec {
            kind: MarginKind::SvmGeometric,
            theta_margin: DEFAULT_THETA_MARGIN,
        }
    }

    pub fn ensemble(theta_margin: f64) -> Result<Self> {
        Self::new(MarginKind::EnsembleDisagreement, theta_margin)
    }

    pub fn probabilistic(theta_margin: f64) -> Result<Self> {
        Self::new(MarginKind::ProbabilisticConfidence, theta_margin)
    }

    pub fn new(kind: MarginKind, theta_margin: f64) -> Result<Self> {
        check_theta(theta_margin)?;
        Ok(MarginSpec { kind, theta_margin })
    }

    /// The spec that fits a model configuration, before training.
    pub fn for_config(config: &ModelConfig, theta_margin: f64) -> Result<Self> {
        match config {
            ModelConfig::LinearSvm { .. } => Ok(Self::svm()),
            ModelConfig::Subspace(_) => Self::ensemble(theta_margin),
            _ => Self::probabilistic(theta_margin),
        }
    }

    /// The spec that fits a trained model: geometric for hinge SVMs,
    /// disagreement for ensembles, confidence otherwise.
    pub fn for_model(model: &Model, theta_margin: f64) -> Result<Self> {
        match model {
            Model::Linear(m) if !m.is_probabilistic() => Ok(Self::svm()),
            Model::Ensemble(_) => Self::ensemble(theta_margin),
            _ => Self::probabilistic(theta_margin),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!(
            "theta_margin must lie in (0, 1), got {theta}"
        )));
    }
    if !(0.25..=0.75).contains(&theta) {
        log::debug!("theta_margin {theta} is outside the usual 0.25..0.75 range");
    }
    Ok(())
}

/// 1 iff `|w·x + b| ≤ 1`.
pub fn svm_margin_signal(model: &LinearModel, x: &[f64]) -> Result<u8> {
    Ok(u8::from(model.predict_signed(x)?.abs() <= 1.0))
}

/// 1 iff `|p₊ − p₋| ≤ θ_margin` over the member votes.
pub fn ensemble_margin_signal(e: &SubspaceEnsemble, x: &[f64], theta_margin: f64) -> Result<u8> {
    check_theta(theta_margin)?;
    let (p_plus, p_minus) = e.confidence(x)?;
    Ok(u8::from((p_plus - p_minus).abs() <= theta_margin))
}

/// 1 iff `|p(+1|x) − p(−1|x)| ≤ θ_margin` under the model's probabilities.
pub fn probabilistic_margin_signal(model: &Model, x: &[f64], theta_margin: f64) -> Result<u8> {
    check_theta(theta_margin)?;
    Ok(u8::from(model.confidence(x)? <= theta_margin))
}

/// Dispatches on `spec.kind`; errors when the model cannot produce that kind
/// of signal.
pub fn margin_signal(model: &Model, spec: &MarginSpec, x: &[f64]) -> Result<u8> {
    match (spec.kind, model) {
        (MarginKind::SvmGeometric, Model::Linear(m)) => svm_margin_signal(m, x),
        (MarginKind::SvmGeometric, _) => Err(Error::Unsupported(
            "geometric margin needs a linear model".into(),
        )),
        (MarginKind::EnsembleDisagreement, Model::Ensemble(e)) => {
            ensemble_margin_signal(e, x, spec.theta_margin)
        }
        (MarginKind::EnsembleDisagreement, _) => Err(Error::Unsupported(
            "disagreement margin needs a subspace ensemble".into(),
        )),
        (MarginKind::ProbabilisticConfidence, m) => {
            probabilistic_margin_signal(m, x, spec.theta_margin)
        }
    }
}

/// Mean margin signal over a non-empty batch.
pub fn margin_density(model: &Model, spec: &MarginSpec, batch: &[Instance]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("margin density of an empty batch".into()));
    }
    let mut inside = 0usize;
    for inst in batch {
        inside += usize::from(margin_signal(model, spec, &inst.features)?);
    }
    Ok(inside as f64 / batch.len() as f64)
}

/// Mean `1 − confidence` over a non-empty batch.
pub fn mean_uncertainty(model: &Model, batch: &[Instance]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("uncertainty of an empty batch".into()));
    }
    let mut total = 0.0;
    for inst in batch {
        total += 1.0 - model.confidence(&inst.features)?;
    }
    Ok(total / batch.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{LinearKind, Penalty};

    fn svm(w: Vec<f64>, b: f64) -> LinearModel {
        LinearModel::new(w, b, LinearKind::Svm { c: 1.0 })
    }

    fn logistic_at(p: f64) -> Model {
        // One feature fixed at 1.0 so that the score equals logit(p).
        let logit = (p / (1.0 - p)).ln();
        Model::Linear(LinearModel::new(
            vec![0.0],
            logit,
            LinearKind::Logistic {
                penalty: Penalty::L2,
                strength: 1.0,
            },
        ))
    }

    #[test]
    fn svm_signal_cases() {
        let m = svm(vec![2.0, 0.0], 0.0);
        assert_eq!(svm_margin_signal(&m, &[0.4, 0.9]).unwrap(), 1);
        assert_eq!(svm_margin_signal(&m, &[0.6, 0.1]).unwrap(), 0);
        assert_eq!(svm_margin_signal(&m, &[0.5, 0.3]).unwrap(), 1);
        assert!(svm_margin_signal(&m, &[0.5]).is_err());
    }

    #[test]
    fn probabilistic_signal_cases() {
        assert_eq!(probabilistic_margin_signal(&logistic_at(0.5), &[1.0], 0.1).unwrap(), 1);
        assert_eq!(probabilistic_margin_signal(&logistic_at(0.95), &[1.0], 0.5).unwrap(), 0);
        // p = 0.75 → confidence 0.5, boundary inclusive. The logit round trip
        // is exact enough here: |2σ(ln 3) − 1| = 0.5 up to 1 ulp.
        let m = logistic_at(0.75);
        let conf = m.confidence(&[1.0]).unwrap();
        assert!((conf - 0.5).abs() < 1e-15);
        let spec = MarginSpec::probabilistic(0.5 + 1e-15).unwrap();
        assert_eq!(margin_signal(&m, &spec, &[1.0]).unwrap(), 1);
    }

    #[test]
    fn theta_must_be_open_unit_interval() {
        assert!(MarginSpec::ensemble(0.0).is_err());
        assert!(MarginSpec::ensemble(1.0).is_err());
        assert!(MarginSpec::ensemble(0.5).is_ok());
    }

    #[test]
    fn density_counts_and_empty_batch() {
        let m = Model::Linear(svm(vec![1.0], 0.0));
        let spec = MarginSpec::svm();
        let mut batch = Vec::new();
        for k in 0..100 {
            let x = if k < 17 { 0.5 } else { 1.5 };
            batch.push(Instance::unlabeled(vec![x]));
        }
        // Independent count of the expected inclusions.
        let expected = batch.iter().filter(|i| i.features[0].abs() <= 1.0).count() as f64 / 100.0;
        assert_eq!(expected, 0.17);
        assert_eq!(margin_density(&m, &spec, &batch).unwrap(), expected);

        let all_in: Vec<Instance> = (0..5).map(|_| Instance::unlabeled(vec![0.0])).collect();
        assert_eq!(margin_density(&m, &spec, &all_in).unwrap(), 1.0);
        let none: Vec<Instance> = (0..5).map(|_| Instance::unlabeled(vec![3.0])).collect();
        assert_eq!(margin_density(&m, &spec, &none).unwrap(), 0.0);
        assert!(matches!(margin_density(&m, &spec, &[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn ensemble_signal_cases() {
        use crate::classifiers::ensemble::fixed_vote_ensemble;
        let x = [0.2];
        assert_eq!(ensemble_margin_signal(&fixed_vote_ensemble(1, 12, 20), &x, 0.5).unwrap(), 1);
        assert_eq!(ensemble_margin_signal(&fixed_vote_ensemble(1, 19, 20), &x, 0.5).unwrap(), 0);
        assert_eq!(ensemble_margin_signal(&fixed_vote_ensemble(1, 15, 20), &x, 0.5).unwrap(), 1);
    }

    #[test]
    fn mismatched_kind_is_rejected() {
        let m = Model::Linear(svm(vec![1.0], 0.0));
        let spec = MarginSpec::ensemble(0.5).unwrap();
        assert!(matches!(margin_signal(&m, &spec, &[0.1]), Err(Error::Unsupported(_))));
    }
}
