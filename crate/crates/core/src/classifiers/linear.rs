//! Linear models: soft-margin SVM (hinge loss) and logistic regression.
//!
//! The SVM is trained by dual coordinate descent on
//!
//! ```text
//! min_w  ½‖w̃‖² + C Σ max(0, 1 − yᵢ w̃·x̃ᵢ)
//! ```
//!
//! where `x̃ = (x, 1)` carries the bias as an extra (regularized) weight.
//! Logistic regression minimizes the mean log-loss plus an L2 or L1 penalty
//! on `w` (bias unpenalized) with accelerated proximal gradient steps, which
//! produces exact zeros under L1.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, Label};
use crate::error::{Error, Result};
use crate::seed;

const SVM_MAX_EPOCHS: usize = 1000;
const SVM_REL_TOL: f64 = 1e-6;
const LOGISTIC_MAX_ITERS: usize = 20_000;
const LOGISTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    L2,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearKind {
    /// Hinge-loss SVM with regularization constant `c`.
    Svm { c: f64 },
    /// Logistic regression; `p(+1|x) = 1 / (1 + exp(−(w·x + b)))`.
    Logistic { penalty: Penalty, strength: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub kind: LinearKind,
}

impl LinearModel {
    pub fn new(weights: Vec<f64>, bias: f64, kind: LinearKind) -> Self {
        LinearModel {
            weights,
            bias,
            kind,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_probabilistic(&self) -> bool {
        matches!(self.kind, LinearKind::Logistic { .. })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.weights.len() {
            return Err(Error::Shape {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Signed score `w·x + b`.
    pub fn predict_signed(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(dot(&self.weights, x) + self.bias)
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<Label> {
        Ok(Label::from_score(self.predict_signed(x)?))
    }

    /// `p(y = +1 | x)` through the logistic link. Only defined for logistic
    /// models.
    pub fn probability_positive(&self, x: &[f64]) -> Result<f64> {
        if !self.is_probabilistic() {
            return Err(Error::Unsupported(
                "hinge-loss SVM scores are not probabilities".into(),
            ));
        }
        Ok(sigmoid(self.predict_signed(x)?))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Rejects data a linear model cannot be fit to: missing labels, a single
/// class, or every feature vector identical.
fn check_trainable(data: &Dataset) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyInput("no training rows".into()));
    }
    let labels = data.labels()?;
    let pos = labels.iter().filter(|&&l| l == Label::Positive).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::DegenerateTraining(
            "training data contains a single class".into(),
        ));
    }
    let first = &data.instances()[0].features;
    if data.instances().iter().all(|i| &i.features == first) {
        return Err(Error::DegenerateTraining(
            "all feature vectors are identical".into(),
        ));
    }
    Ok(labels.iter().map(|l| l.sign()).collect())
}

/// Soft-margin linear SVM via dual coordinate descent.
///
/// Stops when the dual objective changes by less than 1e-6 (relative) over an
/// epoch, or after 1000 epochs. Coordinates are visited in a seeded random
/// order, so the result is deterministic per seed.
pub fn train_linear_svm(data: &Dataset, c: f64, seed: u64) -> Result<LinearModel> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("C must be positive, got {c}")));
    }
    let y = check_trainable(data)?;
    let xs: Vec<&[f64]> = data.instances().iter().map(|i| i.features.as_slice()).collect();
    let d = data.dim();
    let n = xs.len();

    // w has d + 1 entries; the last one is the bias (augmented constant 1).
    let mut w = vec![0.0; d + 1];
    let mut alpha = vec![0.0; n];
    let q_diag: Vec<f64> = xs.iter().map(|x| dot(x, x) + 1.0).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seed::rng(seed);
    let mut prev_dual = 0.0;
    let mut sum_alpha = 0.0;

    for _epoch in 0..SVM_MAX_EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = xs[i];
            let g = y[i] * (dot(&w[..d], x) + w[d]) - 1.0;
            let a_old = alpha[i];
            let pg = if a_old == 0.0 {
                g.min(0.0)
            } else if a_old == c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() < 1e-12 {
                continue;
            }
            let a_new = (a_old - g / q_diag[i]).clamp(0.0, c);
            let delta = (a_new - a_old) * y[i];
            if delta != 0.0 {
                for (wj, xj) in w[..d].iter_mut().zip(x) {
                    *wj += delta * xj;
                }
                w[d] += delta;
                sum_alpha += a_new - a_old;
                alpha[i] = a_new;
            }
        }
        let dual = sum_alpha - 0.5 * dot(&w, &w);
        let rel = (dual - prev_dual).abs() / dual.abs().max(1e-12);
        prev_dual = dual;
        if rel < SVM_REL_TOL {
            break;
        }
    }
    let bias = w.pop().unwrap_or(0.0);
    Ok(LinearModel::new(w, bias, LinearKind::Svm { c }))
}

/// Regularized logistic regression (mean log-loss + `strength`·penalty).
///
/// `seed` is accepted for interface symmetry; full-batch proximal gradient is
/// deterministic.
pub fn train_logistic(
    data: &Dataset,
    penalty: Penalty,
    strength: f64,
    _seed: u64,
) -> Result<LinearModel> {
    if !(strength >= 0.0 && strength.is_finite()) {
        return Err(Error::Parameter(format!(
            "regularization strength must be non-negative, got {strength}"
        )));
    }
    let y = check_trainable(data)?;
    let xs: Vec<&[f64]> = data.instances().iter().map(|i| i.features.as_slice()).collect();
    let d = data.dim();
    let n = xs.len() as f64;

    // Lipschitz bound of the mean log-loss gradient: ‖X̃‖²_F / (4n).
    let frob: f64 = xs.iter().map(|x| dot(x, x) + 1.0).sum();
    let mut lipschitz = frob / (4.0 * n);
    if penalty == Penalty::L2 {
        lipschitz += strength;
    }
    let step = 1.0 / lipschitz;

    let grad = |params: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; d + 1];
        for (x, &yi) in xs.iter().zip(&y) {
            let s = dot(&params[..d], x) + params[d];
            // d/ds log(1 + exp(−y s)) = −y σ(−y s)
            let coef = -yi * sigmoid(-yi * s) / n;
            for (gj, xj) in g[..d].iter_mut().zip(x.iter()) {
                *gj += coef * xj;
            }
            g[d] += coef;
        }
        if penalty == Penalty::L2 {
            for (gj, pj) in g[..d].iter_mut().zip(params) {
                *gj += strength * pj;
            }
        }
        g
    };

    let mut params = vec![0.0; d + 1];
    let mut momentum = params.clone();
    let mut t = 1.0_f64;
    for _ in 0..LOGISTIC_MAX_ITERS {
        let g = grad(&momentum);
        let mut next: Vec<f64> = momentum.iter().zip(&g).map(|(p, gi)| p - step * gi).collect();
        if penalty == Penalty::L1 {
            let thresh = step * strength;
            for v in next[..d].iter_mut() {
                *v = v.signum() * (v.abs() - thresh).max(0.0);
            }
        }
        let change = next
            .iter()
            .zip(&params)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        // Restart momentum when the step moves against the previous direction.
        let restart = next
            .iter()
            .zip(&params)
            .zip(&momentum)
            .map(|((nx, p), m)| (m - nx) * (nx - p))
            .sum::<f64>()
            > 0.0;
        momentum = if restart {
            t = 1.0;
            next.clone()
        } else {
            t = t_next;
            next.iter()
                .zip(&params)
                .map(|(nx, p)| nx + beta * (nx - p))
                .collect()
        };
        params = next;
        if change < LOGISTIC_TOL {
            break;
        }
    }
    let bias = params.pop().unwrap_or(0.0);
    Ok(LinearModel::new(
        params,
        bias,
        LinearKind::Logistic { penalty, strength },
    ))
}

pub(crate) fn accuracy_of<F>(instances: &[Instance], mut predict: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Label>,
{
    if instances.is_empty() {
        return Err(Error::EmptyInput("accuracy of an empty batch".into()));
    }
    let mut correct = 0usize;
    for inst in instances {
        if predict(&inst.features)? == inst.require_label()? {
            correct += 1;
        }
    }
    Ok(correct as f64 / instances.len() as f64)
}
