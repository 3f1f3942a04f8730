//! Incremental drift detectors and the label-collection step they share.
//!
//! Every detector watches one stream statistic and raises a suspicion when it
//! leaves its expected range. A suspicion is resolved by collecting `N_train`
//! labels and testing whether the model's accuracy on them fell by more than
//! `θ·σ_acc` below the reference accuracy.

pub mod hellinger;
pub mod md3;
pub mod reference;
pub mod univariate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Instance;
use crate::error::{Error, Result};

pub use hellinger::{bins_for_chunk, hellinger_between, hellinger_distance, Hdddm, Histograms};
pub use md3::{Judge, Md3State};
pub use reference::{
    fold_indices, reference_from_cv, reference_from_cv_with, CvConfig, ReferenceDistribution,
    Statistic, DEFAULT_EPSILON_SIGMA, DEFAULT_FOLDS,
};
pub use univariate::{
    lambda_for_chunk, CusumTracker, DeviationTracker, EwmaTracker, PhtTracker, DEFAULT_ALLOWANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftEventKind {
    Suspected,
    Confirmed,
    FalseAlarm,
    /// A suspicion raised too close to the end of the stream to collect
    /// `N_train` labels.
    Unresolved,
}

impl fmt::Display for DriftEventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            DriftEventKind::Suspected => "suspected",
            DriftEventKind::Confirmed => "confirmed",
            DriftEventKind::FalseAlarm => "false_alarm",
            DriftEventKind::Unresolved => "unresolved",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEvent {
    pub position: usize,
    pub kind: DriftEventKind,
    /// The monitored statistic (or buffer accuracy for decisions).
    pub metric: f64,
    pub labels_so_far: usize,
}

/// `acc_ref − acc > θ·σ_acc`.
pub fn accuracy_drop_confirms(reference: &ReferenceDistribution, accuracy: f64, theta: f64) -> bool {
    reference.acc_ref - accuracy > theta * reference.sigma_acc
}

/// Buffer of labeled samples gathered after a suspicion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCollector {
    capacity: usize,
    buffer: Vec<Instance>,
    active: bool,
}

impl LabelCollector {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Parameter("N_train must be at least 1".into()));
        }
        Ok(LabelCollector {
            capacity,
            buffer: Vec::with_capacity(capacity),
            active: false,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn start(&mut self) {
        self.active = true;
        self.buffer.clear();
    }

    /// Adds one sample; returns the full buffer once `capacity` is reached
    /// and deactivates.
    pub fn push(&mut self, inst: Instance) -> Result<Option<Vec<Instance>>> {
        if !self.active {
            return Err(Error::State("label fed while no collection is in progress".into()));
        }
        inst.require_label()?;
        self.buffer.push(inst);
        if self.buffer.len() == self.capacity {
            self.active = false;
            return Ok(Some(std::mem::take(&mut self.buffer)));
        }
        Ok(None)
    }

    pub fn abandon(&mut self) -> Vec<Instance> {
        self.active = false;
        std::mem::take(&mut self.buffer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;

    #[test]
    fn confirmation_rule() {
        let r = ReferenceDistribution {
            md_ref: 0.1,
            sigma_md: 0.01,
            acc_ref: 0.95,
            sigma_acc: 0.01,
        };
        assert!(accuracy_drop_confirms(&r, 0.80, 2.0));
        assert!(!accuracy_drop_confirms(&r, 0.94, 2.0));
    }

    #[test]
    fn collector_lifecycle() {
        let mut c = LabelCollector::new(2).unwrap();
        let x = Instance::labeled(vec![0.1], Label::Positive);
        assert!(matches!(c.push(x.clone()), Err(Error::State(_))));
        c.start();
        assert!(c.push(Instance::unlabeled(vec![0.1])).is_err());
        assert!(c.push(x.clone()).unwrap().is_none());
        let full = c.push(x).unwrap().unwrap();
        assert_eq!(full.len(), 2);
        assert!(!c.is_active() && c.is_empty());
    }
}
