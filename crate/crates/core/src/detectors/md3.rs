//! The margin density drift detector.
//!
//! `md_t = λ·md_{t−1} + (1 − λ)·S(x_t)` tracks the fraction of samples in
//! the classifier's margin. When `|md_t − md_ref| > θ·σ_md` a drift is
//! suspected and the next `N_train` labeled samples are collected. The drift
//! is confirmed if the model's accuracy on them dropped by more than
//! `θ·σ_acc`. Either way a new reference is installed from the collected
//! samples and `md_t` restarts at it.

use serde::{Deserialize, Serialize};

use super::univariate::{lambda_for_chunk, DeviationTracker};
use super::{accuracy_drop_confirms, DriftEvent, DriftEventKind, LabelCollector, ReferenceDistribution};
use crate::data::Instance;
use crate::error::{Error, Result};

/// Supplies the model-dependent parts of a decision.
pub trait Judge {
    /// Accuracy of the current prediction model on the collected samples.
    fn buffer_accuracy(&mut self, buffer: &[Instance]) -> Result<f64>;

    /// Called after every decision. On confirmation the implementor retrains
    /// its models on `buffer`. Returns the reference to install next.
    fn rebuild(&mut self, buffer: &[Instance], confirmed: bool) -> Result<ReferenceDistribution>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Md3State {
    tracker: DeviationTracker,
    reference: ReferenceDistribution,
    theta: f64,
    collector: LabelCollector,
    labels_consumed: usize,
}

impl Md3State {
    /// `λ = (N − 1)/N`; `N_train` labels are collected per suspicion.
    pub fn new(reference: ReferenceDistribution, chunk: usize, n_train: usize, theta: f64) -> Result<Self> {
        Self::with_lambda(reference, lambda_for_chunk(chunk)?, n_train, theta)
    }

    pub fn with_lambda(
        reference: ReferenceDistribution,
        lambda: f64,
        n_train: usize,
        theta: f64,
    ) -> Result<Self> {
        Ok(Md3State {
            tracker: DeviationTracker::new(reference.md_ref, reference.sigma_md, lambda, theta)?,
            reference,
            theta,
            collector: LabelCollector::new(n_train)?,
            labels_consumed: 0,
        })
    }

    pub fn md_t(&self) -> f64 {
        self.tracker.value
    }

    pub fn lambda(&self) -> f64 {
        self.tracker.lambda
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn reference(&self) -> &ReferenceDistribution {
        &self.reference
    }

    pub fn currently_drifting(&self) -> bool {
        self.collector.is_active()
    }

    pub fn buffered(&self) -> usize {
        self.collector.len()
    }

    pub fn n_train(&self) -> usize {
        self.collector.capacity()
    }

    pub fn labels_consumed(&self) -> usize {
        self.labels_consumed
    }

    /// Folds in one margin signal. While labels are being collected the
    /// moving average is frozen and nothing is emitted.
    pub fn step(&mut self, position: usize, signal: u8) -> Result<Option<DriftEvent>> {
        if signal > 1 {
            return Err(Error::Parameter(format!("margin signal must be 0 or 1, got {signal}")));
        }
        if self.collector.is_active() {
            return Ok(None);
        }
        if !self.tracker.step(f64::from(signal)) {
            return Ok(None);
        }
        self.collector.start();
        Ok(Some(DriftEvent {
            position,
            kind: DriftEventKind::Suspected,
            metric: self.tracker.value,
            labels_so_far: self.labels_consumed,
        }))
    }

    /// Feeds one labeled sample of an open collection. When `N_train`
    /// samples are in, decides, installs the judge's new reference and
    /// returns the decision.
    pub fn feed_label<J: Judge>(
        &mut self,
        position: usize,
        labeled: Instance,
        judge: &mut J,
    ) -> Result<Option<DriftEvent>> {
        if !self.collector.is_active() {
            return Err(Error::State("feed_label called while not drifting".into()));
        }
        let Some(buffer) = self.collector.push(labeled)? else {
            self.labels_consumed += 1;
            return Ok(None);
        };
        self.labels_consumed += 1;
        let accuracy = judge.buffer_accuracy(&buffer)?;
        let confirmed = accuracy_drop_confirms(&self.reference, accuracy, self.theta);
        let next = judge.rebuild(&buffer, confirmed)?;
        self.install_reference(next);
        Ok(Some(DriftEvent {
            position,
            kind: if confirmed {
                DriftEventKind::Confirmed
            } else {
                DriftEventKind::FalseAlarm
            },
            metric: accuracy,
            labels_so_far: self.labels_consumed,
        }))
    }

    /// Replaces the reference and restarts `md_t` at the new `md_ref`.
    pub fn install_reference(&mut self, reference: ReferenceDistribution) {
        self.reference = reference;
        self.tracker.rebase(reference.md_ref, reference.sigma_md);
    }

    /// Closes an open collection without deciding; returns what was buffered.
    pub fn abandon_collection(&mut self) -> Vec<Instance> {
        self.collector.abandon()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Label;

    fn reference() -> ReferenceDistribution {
        ReferenceDistribution {
            md_ref: 0.10,
            sigma_md: 0.02,
            acc_ref: 0.95,
            sigma_acc: 0.01,
        }
    }

    struct FixedJudge {
        accuracy: f64,
        retrained: usize,
        rebuilt: usize,
    }

    impl Judge for FixedJudge {
        fn buffer_accuracy(&mut self, _: &[Instance]) -> Result<f64> {
            Ok(self.accuracy)
        }

        fn rebuild(&mut self, _: &[Instance], confirmed: bool) -> Result<ReferenceDistribution> {
            self.rebuilt += 1;
            self.retrained += usize::from(confirmed);
            Ok(ReferenceDistribution {
                md_ref: 0.2,
                ..reference()
            })
        }
    }

    fn run_decision(accuracy: f64) -> (Md3State, FixedJudge, DriftEvent) {
        let mut s = Md3State::with_lambda(reference(), 0.5, 3, 2.0).unwrap();
        // 0.5·0.1 + 0.5·1 = 0.55: far outside 0.1 ± 0.04.
        let ev = s.step(7, 1).unwrap().unwrap();
        assert_eq!(ev.kind, DriftEventKind::Suspected);
        assert_eq!(ev.position, 7);
        assert!(s.currently_drifting());
        let mut j = FixedJudge {
            accuracy,
            retrained: 0,
            rebuilt: 0,
        };
        let x = Instance::labeled(vec![0.0], Label::Positive);
        assert!(s.feed_label(8, x.clone(), &mut j).unwrap().is_none());
        assert!(s.feed_label(9, x.clone(), &mut j).unwrap().is_none());
        let d = s.feed_label(10, x, &mut j).unwrap().unwrap();
        (s, j, d)
    }

    #[test]
    fn confirmed_retrains_and_rebases() {
        let (s, j, d) = run_decision(0.80);
        assert_eq!(d.kind, DriftEventKind::Confirmed);
        assert_eq!(d.labels_so_far, 3);
        assert_eq!((j.retrained, j.rebuilt), (1, 1));
        assert!(!s.currently_drifting());
        assert_eq!(s.md_t(), 0.2);
    }

    #[test]
    fn false_alarm_still_installs_reference() {
        let (s, j, d) = run_decision(0.94);
        assert_eq!(d.kind, DriftEventKind::FalseAlarm);
        assert_eq!((j.retrained, j.rebuilt), (0, 1));
        assert_eq!(s.reference().md_ref, 0.2);
        assert_eq!(s.md_t(), 0.2);
    }

    #[test]
    fn frozen_while_collecting() {
        let mut s = Md3State::with_lambda(reference(), 0.5, 3, 2.0).unwrap();
        s.step(0, 1).unwrap().unwrap();
        let frozen = s.md_t();
        for t in 1..50 {
            assert!(s.step(t, 1).unwrap().is_none());
        }
        assert_eq!(s.md_t(), frozen);
    }

    #[test]
    fn feed_without_suspicion_is_state_error() {
        let mut s = Md3State::new(reference(), 500, 500, 2.0).unwrap();
        let mut j = FixedJudge {
            accuracy: 1.0,
            retrained: 0,
            rebuilt: 0,
        };
        let x = Instance::labeled(vec![0.0], Label::Positive);
        assert!(matches!(s.feed_label(0, x, &mut j), Err(Error::State(_))));
        assert!(s.step(0, 2).is_err());
    }

    #[test]
    fn below_threshold_is_silent() {
        // 0.9·0.1 + 0.1·0 = 0.09: deviation 0.01 <= 0.04.
        let mut s = Md3State::with_lambda(reference(), 0.9, 3, 2.0).unwrap();
        assert!(s.step(0, 0).unwrap().is_none());
        assert!(!s.currently_drifting());
    }
}
