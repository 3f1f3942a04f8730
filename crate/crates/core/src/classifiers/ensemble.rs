//! Random-subspace (feature-bagged) ensembles.
//!
//! Each of the K members is trained on its own draw of J distinct features;
//! draws are independent across members, so subspaces may overlap. The
//! ensemble predicts by majority vote and exposes the vote fractions, which is
//! where its pseudo-margin comes from.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::{train_linear_svm, train_logistic, LinearModel, Penalty};
use super::tree::{train_tree, TreeConfig, TreeModel};
use crate::data::{Dataset, Instance, Label};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseLearner {
    Tree(TreeConfig),
    LinearSvm { c: f64 },
    Logistic { penalty: Penalty, strength: f64 },
}

impl Default for BaseLearner {
    fn default() -> Self {
        BaseLearner::Tree(TreeConfig::default())
    }
}

/// Number of features per member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceSize {
    Fixed(usize),
    /// `⌈fraction · d⌉`, at least 1.
    Fraction(f64),
}

impl SubspaceSize {
    pub fn resolve(&self, dim: usize) -> Result<usize> {
        let j = match *self {
            SubspaceSize::Fixed(j) => j,
            SubspaceSize::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(Error::Parameter(format!(
                        "subspace fraction must be in (0, 1], got {f}"
                    )));
                }
                ((f * dim as f64).ceil() as usize).max(1)
            }
        };
        if j == 0 || j > dim {
            return Err(Error::Parameter(format!(
                "subspace size J={j} must satisfy 1 <= J <= d={dim}"
            )));
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub members: usize,
    pub subspace: SubspaceSize,
    pub base: BaseLearner,
}

impl Default for EnsembleConfig {
    /// 20 trees, each seeing half of the features.
    fn default() -> Self {
        EnsembleConfig {
            members: 20,
            subspace: SubspaceSize::Fraction(0.5),
            base: BaseLearner::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseModel {
    Tree(TreeModel),
    Linear(LinearModel),
}

impl BaseModel {
    fn predict_label(&self, x: &[f64]) -> Result<Label> {
        match self {
            BaseModel::Tree(t) => t.predict_label(x),
            BaseModel::Linear(m) => m.predict_label(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    /// Sorted indices into the full feature vector.
    pub features: Vec<usize>,
    pub model: BaseModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEnsemble {
    dim: usize,
    base: BaseLearner,
    members: Vec<Member>,
}

/// Draws `k` subspaces of `j` distinct features out of `dim`, one independent
/// draw per member. Pure function of its arguments.
pub fn draw_subspaces(dim: usize, k: usize, j: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Parameter(format!("ensemble needs K >= 2 members, got {k}")));
    }
    if j == 0 || j > dim {
        return Err(Error::Parameter(format!(
            "subspace size J={j} must satisfy 1 <= J <= d={dim}"
        )));
    }
    Ok((0..k)
        .map(|i| {
            let mut rng = seed::rng(seed::derive_indexed(seed, "subspace", i as u64));
            let mut idx = rand::seq::index::sample(&mut rng, dim, j).into_vec();
            idx.sort_unstable();
            idx
        })
        .collect())
}

fn project(x: &[f64], features: &[usize]) -> Vec<f64> {
    features.iter().map(|&f| x[f]).collect()
}

fn project_dataset(data: &Dataset, features: &[usize]) -> Result<Dataset> {
    let instances = data
        .instances()
        .iter()
        .map(|i| Instance::new(project(&i.features, features), i.label))
        .collect();
    Dataset::new(
        instances,
        features
            .iter()
            .map(|&f| data.feature_names()[f].clone())
            .collect(),
    )
}

fn train_base(data: &Dataset, base: &BaseLearner, seed: u64) -> Result<BaseModel> {
    Ok(match *base {
        BaseLearner::Tree(cfg) => BaseModel::Tree(train_tree(data, &cfg, seed)?),
        BaseLearner::LinearSvm { c } => BaseModel::Linear(train_linear_svm(data, c, seed)?),
        BaseLearner::Logistic { penalty, strength } => {
            BaseModel::Linear(train_logistic(data, penalty, strength, seed)?)
        }
    })
}

/// Trains K members on independently drawn J-feature subspaces.
pub fn train_subspace_ensemble(
    data: &Dataset,
    config: &EnsembleConfig,
    seed: u64,
) -> Result<SubspaceEnsemble> {
    let j = config.subspace.resolve(data.dim())?;
    let subspaces = draw_subspaces(data.dim(), config.members, j, seed)?;
    train_with_subspaces(data, subspaces, &config.base, seed)
}

/// Trains one member per given subspace.
pub fn train_with_subspaces(
    data: &Dataset,
    subspaces: Vec<Vec<usize>>,
    base: &BaseLearner,
    seed: u64,
) -> Result<SubspaceEnsemble> {
    if subspaces.len() < 2 {
        return Err(Error::Parameter(format!(
            "ensemble needs K >= 2 members, got {}",
            subspaces.len()
        )));
    }
    let dim = data.dim();
    for s in &subspaces {
        if s.is_empty() {
            return Err(Error::Parameter("empty subspace".into()));
        }
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != s.len() {
            return Err(Error::Parameter(format!("subspace {s:?} repeats a feature")));
        }
        if let Some(&bad) = s.iter().find(|&&f| f >= dim) {
            return Err(Error::Index { index: bad, dim });
        }
    }
    let mut covered = vec![false; dim];
    for s in &subspaces {
        for &f in s {
            covered[f] = true;
        }
    }
    let uncovered = covered.iter().filter(|c| !**c).count();
    if uncovered > 0 {
        log::warn!("{uncovered} of {dim} features are not used by any ensemble member");
    }

    let members = subspaces
        .into_par_iter()
        .enumerate()
        .map(|(i, features)| {
            let view = project_dataset(data, &features)?;
            let model = train_base(&view, base, seed::derive_indexed(seed, "member", i as u64))?;
            Ok(Member { features, model })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubspaceEnsemble {
        dim,
        base: *base,
        members,
    })
}

impl SubspaceEnsemble {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn base(&self) -> &BaseLearner {
        &self.base
    }

    /// Number of members voting +1.
    pub fn positive_votes(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::Shape {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let mut votes = 0;
        for m in &self.members {
            if m.model.predict_label(&project(x, &m.features))? == Label::Positive {
                votes += 1;
            }
        }
        Ok(votes)
    }

    /// `(p_plus, p_minus)`: the fractions of members voting each way.
    pub fn confidence(&self, x: &[f64]) -> Result<(f64, f64)> {
        let p_plus = self.positive_votes(x)? as f64 / self.members.len() as f64;
        Ok((p_plus, 1.0 - p_plus))
    }

    /// Majority vote; an even split goes to +1.
    pub fn predict_label(&self, x: &[f64]) -> Result<Label> {
        let (p_plus, p_minus) = self.confidence(x)?;
        Ok(if p_plus >= p_minus {
            Label::Positive
        } else {
            Label::Negative
        })
    }
}

/// An ensemble of constant members, `votes_pos` of which vote +1.
#[cfg(test)]
pub(crate) fn fixed_vote_ensemble(dim: usize, votes_pos: usize, k: usize) -> SubspaceEnsemble {
    use super::linear::LinearKind;
    let members = (0..k)
        .map(|i| Member {
            features: vec![0],
            model: BaseModel::Linear(LinearModel::new(
                vec![0.0],
                if i < votes_pos { 1.0 } else { -1.0 },
                LinearKind::Svm { c: 1.0 },
            )),
        })
        .collect();
    SubspaceEnsemble {
        dim,
        base: BaseLearner::LinearSvm { c: 1.0 },
        members,
    }
}
