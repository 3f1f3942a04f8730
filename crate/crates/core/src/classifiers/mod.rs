//! Base learners and the random-subspace ensemble, plus a [`Model`] enum that
//! lets the rest of the crate treat them uniformly.

pub mod ensemble;
pub mod linear;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use ensemble::{
    draw_subspaces, train_subspace_ensemble, train_with_subspaces, BaseLearner, EnsembleConfig,
    SubspaceEnsemble, SubspaceSize,
};
pub use linear::{train_linear_svm, train_logistic, LinearKind, LinearModel, Penalty};
pub use tree::{train_tree, TreeConfig, TreeModel};

use crate::data::{Dataset, Instance, Label};
use crate::error::Result;

/// What to train. Seeds are passed separately so one config can be reused
/// across folds and retrains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum ModelConfig {
    LinearSvm { c: f64 },
    Logistic { penalty: Penalty, strength: f64 },
    Tree(TreeConfig),
    Subspace(EnsembleConfig),
}

impl ModelConfig {
    /// Linear SVM with C = 1.
    pub fn svm() -> Self {
        ModelConfig::LinearSvm { c: 1.0 }
    }

    /// 20 trees on half of the features each.
    pub fn random_subspace() -> Self {
        ModelConfig::Subspace(EnsembleConfig::default())
    }

    /// The same learner for a model trained on `part` of `full` rows, with
    /// the regularization per sample held fixed. Only the SVM's summed hinge
    /// loss depends on the row count; the other learners are unchanged.
    pub fn for_subsample(&self, full: usize, part: usize) -> Self {
        match *self {
            ModelConfig::LinearSvm { c } if part > 0 => ModelConfig::LinearSvm {
                c: c * full as f64 / part as f64,
            },
            other => other,
        }
    }

    pub fn train(&self, data: &Dataset, seed: u64) -> Result<Model> {
        Ok(match *self {
            ModelConfig::LinearSvm { c } => Model::Linear(train_linear_svm(data, c, seed)?),
            ModelConfig::Logistic { penalty, strength } => {
                Model::Linear(train_logistic(data, penalty, strength, seed)?)
            }
            ModelConfig::Tree(cfg) => Model::Tree(train_tree(data, &cfg, seed)?),
            ModelConfig::Subspace(cfg) => {
                Model::Ensemble(train_subspace_ensemble(data, &cfg, seed)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Tree(TreeModel),
    Ensemble(SubspaceEnsemble),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.dim(),
            Model::Tree(m) => m.dim(),
            Model::Ensemble(m) => m.dim(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        match self {
            Model::Linear(m) => m.predict_label(x),
            Model::Tree(m) => m.predict_label(x),
            Model::Ensemble(m) => m.predict_label(x),
        }
    }

    /// `p(y = +1 | x)`: the logistic link, the leaf frequency, or the
    /// positive vote fraction. Unsupported for hinge-loss SVMs.
    pub fn probability_positive(&self, x: &[f64]) -> Result<f64> {
        match self {
            Model::Linear(m) => m.probability_positive(x),
            Model::Tree(m) => m.probability_positive(x),
            Model::Ensemble(m) => Ok(m.confidence(x)?.0),
        }
    }

    /// `|p(+1|x) − p(−1|x)|`.
    pub fn confidence(&self, x: &[f64]) -> Result<f64> {
        let p = self.probability_positive(x)?;
        Ok((2.0 * p - 1.0).abs())
    }

    /// Fraction of labeled instances predicted correctly.
    pub fn accuracy(&self, instances: &[Instance]) -> Result<f64> {
        linear::accuracy_of(instances, |x| self.predict(x))
    }
}
