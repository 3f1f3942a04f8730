//! Prequential stream evaluation.
//!
//! The first `initial_fraction` of the stream is labeled and used to train
//! the prediction model, the detection model and the reference distribution.
//! Every later sample is predicted before its label is looked at. Looking at
//! a label for the accuracy trace is free. Labels the detector asks for are
//! charged to the [`Oracle`].

mod experiments;
mod output;
mod suite;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{Model, ModelConfig};
use crate::data::{Dataset, Instance, Label};
use crate::detectors::{
    accuracy_drop_confirms, lambda_for_chunk, reference_from_cv_with, CusumTracker, CvConfig,
    DeviationTracker, DriftEvent, DriftEventKind, EwmaTracker, Hdddm, Judge, LabelCollector,
    Md3State, PhtTracker, ReferenceDistribution, Statistic, DEFAULT_ALLOWANCE,
    DEFAULT_EPSILON_SIGMA, DEFAULT_FOLDS,
};
use crate::error::{Error, Result};
use crate::margin::{margin_signal, MarginSpec, DEFAULT_THETA_MARGIN};
use crate::seed;

pub use experiments::{
    first_detection, induced_benchmark, margin_width_sweep, BENCHMARK_ROWS, scenario_deltas, scenario_ensemble, sensitivity_sweep,
    table8_sweep, MetricDeltas, TABLE8_REPEATS, ScenarioDeltas, SweepRow, Table8Row, Table8Summary,
    NONZERO_THRESHOLD,
};
pub use output::{format_fixed, write_report_json, write_summary_csv, write_trace_csv};
pub use suite::{run_suite, SuiteRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    NoChange,
    AccTr,
    /// Margin density of the prediction model itself.
    Md3Svm,
    /// Margin density of a separate random-subspace detection model.
    Md3Rs,
    Hdddm,
    Cusum,
    Pht,
    Uncertainty,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 8] = [
        DetectorKind::NoChange,
        DetectorKind::AccTr,
        DetectorKind::Md3Svm,
        DetectorKind::Md3Rs,
        DetectorKind::Hdddm,
        DetectorKind::Cusum,
        DetectorKind::Pht,
        DetectorKind::Uncertainty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::NoChange => "nochange",
            DetectorKind::AccTr => "acctr",
            DetectorKind::Md3Svm => "md3-svm",
            DetectorKind::Md3Rs => "md3-rs",
            DetectorKind::Hdddm => "hdddm",
            DetectorKind::Cusum => "cusum",
            DetectorKind::Pht => "pht",
            DetectorKind::Uncertainty => "uncertainty",
        }
    }

    pub fn is_md3(self) -> bool {
        matches!(self, DetectorKind::Md3Svm | DetectorKind::Md3Rs)
    }

    /// Detectors that consume a label at every step.
    pub fn is_fully_labeled(self) -> bool {
        matches!(self, DetectorKind::AccTr | DetectorKind::Cusum | DetectorKind::Pht)
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.name() == wanted)
            .ok_or_else(|| {
                let names: Vec<&str> = DetectorKind::ALL.iter().map(|d| d.name()).collect();
                Error::Parameter(format!(
                    "unknown detector {s:?}; valid detectors: {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub detector: DetectorKind,
    pub prediction: ModelConfig,
    /// Detection model for `md3-rs` and `uncertainty`; a random-subspace
    /// ensemble when unset.
    pub detection: Option<ModelConfig>,
    /// `N`: sets `λ = (N − 1)/N` and the HDDDM chunk.
    pub chunk: usize,
    /// Labels collected per suspicion; `N` when unset.
    pub n_train: Option<usize>,
    pub theta: f64,
    pub theta_margin: f64,
    pub initial_fraction: f64,
    pub folds: usize,
    pub epsilon_sigma: f64,
    /// CUSUM/PHT allowance `v`.
    pub allowance: f64,
    /// CUSUM/PHT alarm threshold.
    pub cumulative_threshold: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(detector: DetectorKind, chunk: usize, seed: u64) -> Self {
        RunConfig {
            detector,
            prediction: ModelConfig::svm(),
            detection: None,
            chunk,
            n_train: None,
            theta: 2.0,
            theta_margin: DEFAULT_THETA_MARGIN,
            initial_fraction: 0.15,
            folds: DEFAULT_FOLDS,
            epsilon_sigma: DEFAULT_EPSILON_SIGMA,
            allowance: DEFAULT_ALLOWANCE,
            cumulative_threshold: 10.0,
            seed,
        }
    }

    pub fn n_train(&self) -> usize {
        self.n_train.unwrap_or(self.chunk)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chunk < 10 {
            return Err(Error::Parameter(format!("chunk size N must be >= 10, got {}", self.chunk)));
        }
        if self.n_train() == 0 {
            return Err(Error::Parameter("N_train must be at least 1".into()));
        }
        if !(self.initial_fraction > 0.0 && self.initial_fraction < 1.0) {
            return Err(Error::Parameter(format!(
                "initial fraction must lie in (0, 1), got {}",
                self.initial_fraction
            )));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::Parameter(format!("theta must be >= 0, got {}", self.theta)));
        }
        if self.folds < 2 {
            return Err(Error::Parameter(format!("need at least 2 folds, got {}", self.folds)));
        }
        Ok(())
    }

    fn detection_config(&self) -> Option<ModelConfig> {
        match self.detector {
            DetectorKind::Md3Rs | DetectorKind::Uncertainty => {
                Some(self.detection.unwrap_or_else(ModelConfig::random_subspace))
            }
            _ => None,
        }
    }

    fn statistic(&self) -> Result<Statistic> {
        Ok(match self.detector {
            DetectorKind::Md3Svm => {
                Statistic::MarginDensity(MarginSpec::for_config(&self.prediction, self.theta_margin)?)
            }
            DetectorKind::Md3Rs => Statistic::MarginDensity(MarginSpec::for_config(
                &self.detection_config().expect("md3-rs has a detection model"),
                self.theta_margin,
            )?),
            DetectorKind::Uncertainty => Statistic::MeanUncertainty,
            _ => Statistic::None,
        })
    }

    fn cv_config(&self) -> Result<CvConfig> {
        Ok(CvConfig {
            prediction: self.prediction,
            detection: self.detection_config(),
            statistic: self.statistic()?,
            folds: self.folds,
            epsilon_sigma: self.epsilon_sigma,
        })
    }
}

/// Ground truth of a stream, revealed per instance. Each instance is charged
/// at most once however often its label is requested.
#[derive(Debug, Clone)]
pub struct Oracle {
    labels: Vec<Label>,
    charged: Vec<bool>,
    served: usize,
}

impl Oracle {
    pub fn new(labels: Vec<Label>) -> Self {
        let n = labels.len();
        Oracle {
            labels,
            charged: vec![false; n],
            served: 0,
        }
    }

    /// Charged request.
    pub fn request(&mut self, index: usize) -> Result<Label> {
        let label = *self.labels.get(index).ok_or(Error::Index {
            index,
            dim: self.labels.len(),
        })?;
        if !self.charged[index] {
            self.charged[index] = true;
            self.served += 1;
        }
        Ok(label)
    }

    /// Uncharged lookup, for scoring predictions only.
    pub fn evaluate(&self, index: usize) -> Result<Label> {
        self.labels.get(index).copied().ok_or(Error::Index {
            index,
            dim: self.labels.len(),
        })
    }

    pub fn served(&self) -> usize {
        self.served
    }

    pub fn was_charged(&self, index: usize) -> bool {
        self.charged.get(index).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub running_accuracy: f64,
    pub metric_value: f64,
    pub event: Option<DriftEventKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub detector: DetectorKind,
    pub seed: u64,
    pub stream_length: usize,
    pub warmup_length: usize,
    /// Cumulative prequential accuracy after warm-up.
    pub accuracy: f64,
    pub drifts_confirmed: usize,
    pub false_alarms: usize,
    pub suspected: usize,
    pub unresolved: usize,
    pub labels_served: usize,
    /// Charged labels over post-warm-up length, in percent.
    pub labeling_percent: f64,
    /// As above, with the warm-up labels counted and the whole stream as base.
    pub labeling_percent_inclusive: f64,
    pub reference: ReferenceDistribution,
    pub events: Vec<DriftEvent>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl RunReport {
    pub fn decisions(&self) -> impl Iterator<Item = &DriftEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, DriftEventKind::Confirmed | DriftEventKind::FalseAlarm))
    }

    /// Positions of suspicions that led to a confirmation.
    pub fn confirmed_suspicions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut last_suspected = None;
        for e in &self.events {
            match e.kind {
                DriftEventKind::Suspected => last_suspected = Some(e.position),
                DriftEventKind::Confirmed => out.push(last_suspected.unwrap_or(e.position)),
                _ => {}
            }
        }
        out
    }
}

/// Models plus reference; retrains and rebuilds on decisions.
struct ModelContext {
    cv: CvConfig,
    prediction: Model,
    detection: Option<Model>,
    reference: ReferenceDistribution,
    dataset_template: Dataset,
    seed: u64,
    decisions: u64,
}

impl ModelContext {
    fn train(train: &Dataset, cv: CvConfig, seed: u64) -> Result<Self> {
        let prediction = cv.prediction.train(train, seed::derive(seed, "prediction"))?;
        let detection = match &cv.detection {
            Some(cfg) => Some(cfg.train(train, seed::derive(seed, "detection"))?),
            None => None,
        };
        let reference = reference_from_cv_with(train, &cv, seed::derive(seed, "reference"))?;
        Ok(ModelContext {
            cv,
            prediction,
            detection,
            reference,
            dataset_template: train.slice(0, 0),
            seed,
            decisions: 0,
        })
    }

    fn detection_model(&self) -> &Model {
        self.detection.as_ref().unwrap_or(&self.prediction)
    }

    fn try_rebuild(&mut self, buffer: &[Instance], confirmed: bool) -> Result<ReferenceDistribution> {
        let data = self.dataset_template.with_instances(buffer.to_vec())?;
        let k = self.decisions;
        let reference =
            reference_from_cv_with(&data, &self.cv, seed::derive_indexed(self.seed, "reference", k))?;
        if confirmed {
            let prediction =
                self.cv.prediction.train(&data, seed::derive_indexed(self.seed, "prediction", k))?;
            let detection = match &self.cv.detection {
                Some(cfg) => Some(cfg.train(&data, seed::derive_indexed(self.seed, "detection", k))?),
                None => None,
            };
            self.prediction = prediction;
            self.detection = detection;
        }
        self.reference = reference;
        Ok(reference)
    }
}

impl Judge for ModelContext {
    fn buffer_accuracy(&mut self, buffer: &[Instance]) -> Result<f64> {
        self.prediction.accuracy(buffer)
    }

    fn rebuild(&mut self, buffer: &[Instance], confirmed: bool) -> Result<ReferenceDistribution> {
        let out = match self.try_rebuild(buffer, confirmed) {
            Err(Error::DegenerateTraining(msg)) => {
                log::warn!("keeping previous models after decision {}: {msg}", self.decisions);
                Ok(self.reference)
            }
            other => other,
        };
        self.decisions += 1;
        out
    }
}

enum Monitor {
    None,
    Md3(Md3State),
    Ewma(EwmaTracker),
    Cusum(CusumTracker, f64),
    Pht(PhtTracker, f64),
    Uncertainty(DeviationTracker),
    Hdddm(Hdddm),
}

impl Monitor {
    fn build(cfg: &RunConfig, ctx: &ModelContext, warmup_rows: &[Instance]) -> Result<Self> {
        let lambda = lambda_for_chunk(cfg.chunk)?;
        let r = ctx.reference;
        Ok(match cfg.detector {
            DetectorKind::NoChange => Monitor::None,
            DetectorKind::Md3Svm | DetectorKind::Md3Rs => {
                Monitor::Md3(Md3State::with_lambda(r, lambda, cfg.n_train(), cfg.theta)?)
            }
            DetectorKind::AccTr => {
                Monitor::Ewma(EwmaTracker::new(1.0 - r.acc_ref, r.sigma_acc, lambda, cfg.theta)?)
            }
            DetectorKind::Cusum => Monitor::Cusum(
                CusumTracker::new(cfg.allowance, cfg.cumulative_threshold)?,
                1.0 - r.acc_ref,
            ),
            DetectorKind::Pht => Monitor::Pht(
                PhtTracker::new(cfg.allowance, cfg.cumulative_threshold)?,
                1.0 - r.acc_ref,
            ),
            DetectorKind::Uncertainty => {
                Monitor::Uncertainty(DeviationTracker::new(r.md_ref, r.sigma_md, lambda, cfg.theta)?)
            }
            DetectorKind::Hdddm => {
                let mut h = Hdddm::pending(cfg.chunk, cfg.theta, cfg.epsilon_sigma)?;
                h.seed_warmup(warmup_rows.iter().map(|i| i.features.as_slice()))?;
                Monitor::Hdddm(h)
            }
        })
    }

    fn metric(&self) -> f64 {
        match self {
            Monitor::None => 0.0,
            Monitor::Md3(s) => s.md_t(),
            Monitor::Ewma(t) => t.value,
            Monitor::Cusum(t, _) => t.value,
            Monitor::Pht(t, _) => t.value - t.minimum,
            Monitor::Uncertainty(t) => t.value,
            Monitor::Hdddm(h) => h.metric(),
        }
    }

    /// Resets after a decision against the context's new reference.
    fn reset(&mut self, ctx: &ModelContext, buffer: &[Instance]) -> Result<()> {
        let r = ctx.reference;
        match self {
            Monitor::None | Monitor::Md3(_) => {}
            Monitor::Ewma(t) => t.rebase(1.0 - r.acc_ref, r.sigma_acc),
            Monitor::Cusum(t, err) => {
                t.reset();
                *err = 1.0 - r.acc_ref;
            }
            Monitor::Pht(t, err) => {
                t.reset();
                *err = 1.0 - r.acc_ref;
            }
            Monitor::Uncertainty(t) => t.rebase(r.md_ref, r.sigma_md),
            Monitor::Hdddm(h) => h.restart(buffer.iter().map(|i| i.features.as_slice()))?,
        }
        Ok(())
    }
}

/// Runs one detector over a labeled stream.
pub fn run_stream(data: &Dataset, config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let labels = data.labels()?;
    let n = data.len();
    let warmup = (config.initial_fraction * n as f64).floor() as usize;
    if warmup < 2 * config.folds || warmup >= n {
        return Err(Error::Parameter(format!(
            "initial fraction {} of {n} rows gives {warmup} training rows; need at least {} and \
             fewer than the stream length",
            config.initial_fraction,
            2 * config.folds
        )));
    }
    let train = data.slice(0, warmup);
    let mut ctx = ModelContext::train(&train, config.cv_config()?, config.seed)?;
    let mut monitor = Monitor::build(config, &ctx, train.instances())?;
    let margin_spec = match ctx.cv.statistic {
        Statistic::MarginDensity(spec) => Some(spec),
        _ => None,
    };
    let n_train = config.n_train();
    let lambda = lambda_for_chunk(config.chunk)?;

    let mut oracle = Oracle::new(labels);
    let mut collector = LabelCollector::new(n_train)?;
    let mut events: Vec<DriftEvent> = Vec::new();
    let mut trace = Vec::with_capacity(n - warmup);
    let mut correct = 0usize;
    let mut running = ctx.reference.acc_ref;
    let mut detecting = true;

    for (i, inst) in data.instances().iter().enumerate().skip(warmup) {
        let x = inst.features.as_slice();
        let hit = ctx.prediction.predict(x)? == oracle.evaluate(i)?;
        correct += usize::from(hit);
        running = lambda * running + (1.0 - lambda) * f64::from(u8::from(hit));
        let mut step_event = None;

        if config.detector.is_fully_labeled() {
            oracle.request(i)?;
        }

        let collecting = match &monitor {
            Monitor::Md3(s) => s.currently_drifting(),
            _ => collector.is_active(),
        };

        if collecting {
            let labeled = Instance::labeled(inst.features.clone(), oracle.request(i)?);
            let decision = match &mut monitor {
                Monitor::Md3(s) => s.feed_label(i, labeled, &mut ctx)?,
                other => match collector.push(labeled)? {
                    None => None,
                    Some(buffer) => {
                        let accuracy = ctx.buffer_accuracy(&buffer)?;
                        let confirmed = config.detector == DetectorKind::AccTr
                            || accuracy_drop_confirms(&ctx.reference, accuracy, config.theta);
                        ctx.rebuild(&buffer, confirmed)?;
                        other.reset(&ctx, &buffer)?;
                        Some(DriftEvent {
                            position: i,
                            kind: if confirmed {
                                DriftEventKind::Confirmed
                            } else {
                                DriftEventKind::FalseAlarm
                            },
                            metric: accuracy,
                            labels_so_far: 0,
                        })
                    }
                },
            };
            if let Some(mut e) = decision {
                e.labels_so_far = oracle.served();
                step_event = Some(e.kind);
                events.push(e);
            }
        } else if detecting {
            let alarm = match &mut monitor {
                Monitor::None => false,
                Monitor::Md3(s) => {
                    let spec = margin_spec.as_ref().expect("md3 has a margin spec");
                    let signal = margin_signal(ctx.detection_model(), spec, x)?;
                    s.step(i, signal)?.is_some()
                }
                Monitor::Ewma(t) => {
                    let err = f64::from(u8::from(!hit));
                    t.step(err)
                }
                Monitor::Cusum(t, err_ref) => t.step(f64::from(u8::from(!hit)) - *err_ref),
                Monitor::Pht(t, err_ref) => t.step(f64::from(u8::from(!hit)) - *err_ref),
                Monitor::Uncertainty(t) => t.step(1.0 - ctx.detection_model().confidence(x)?),
                Monitor::Hdddm(h) => h.observe(x)?,
            };
            if alarm {
                let metric = monitor.metric();
                let remaining = n - i - 1;
                if remaining < n_train {
                    if let Monitor::Md3(s) = &mut monitor {
                        s.abandon_collection();
                    }
                    detecting = false;
                    step_event = Some(DriftEventKind::Unresolved);
                    events.push(DriftEvent {
                        position: i,
                        kind: DriftEventKind::Unresolved,
                        metric,
                        labels_so_far: oracle.served(),
                    });
                } else {
                    if !matches!(monitor, Monitor::Md3(_)) {
                        collector.start();
                    }
                    step_event = Some(DriftEventKind::Suspected);
                    events.push(DriftEvent {
                        position: i,
                        kind: DriftEventKind::Suspected,
                        metric,
                        labels_so_far: oracle.served(),
                    });
                }
            }
        }

        trace.push(TraceRow {
            step: i,
            running_accuracy: running,
            metric_value: monitor.metric(),
            event: step_event,
        });
    }

    let post = n - warmup;
    let count = |k: DriftEventKind| events.iter().filter(|e| e.kind == k).count();
    Ok(RunReport {
        detector: config.detector,
        seed: config.seed,
        stream_length: n,
        warmup_length: warmup,
        accuracy: correct as f64 / post as f64,
        drifts_confirmed: count(DriftEventKind::Confirmed),
        false_alarms: count(DriftEventKind::FalseAlarm),
        suspected: count(DriftEventKind::Suspected),
        unresolved: count(DriftEventKind::Unresolved),
        labels_served: oracle.served(),
        labeling_percent: 100.0 * oracle.served() as f64 / post as f64,
        labeling_percent_inclusive: 100.0 * (oracle.served() + warmup) as f64 / n as f64,
        reference: ctx.reference,
        events,
        trace,
    })
}
