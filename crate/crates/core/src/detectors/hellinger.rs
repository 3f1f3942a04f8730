//! Per-feature histograms, the averaged Hellinger distance and the HDDDM
//! chunk-distance detector.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{mean, population_std};

/// `d × b` bin counts over fixed equal-width edges on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histograms {
    bins: usize,
    counts: Vec<Vec<f64>>,
}

/// `⌈√N⌉`.
pub fn bins_for_chunk(chunk: usize) -> usize {
    ((chunk as f64).sqrt().ceil() as usize).max(1)
}

fn bin_index(v: f64, bins: usize) -> usize {
    ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1)
}

impl Histograms {
    pub fn empty(dim: usize, bins: usize) -> Self {
        Histograms {
            bins,
            counts: vec![vec![0.0; bins]; dim],
        }
    }

    /// Raw counts, one row per feature.
    pub fn from_counts(counts: Vec<Vec<f64>>) -> Result<Self> {
        let bins = counts.first().map_or(0, Vec::len);
        if bins == 0 || counts.iter().any(|c| c.len() != bins) {
            return Err(Error::Parameter(
                "histograms need at least one bin and equal bin counts per feature".into(),
            ));
        }
        if counts.iter().flatten().any(|&c| !(c >= 0.0 && c.is_finite())) {
            return Err(Error::Parameter("bin counts must be finite and >= 0".into()));
        }
        Ok(Histograms { bins, counts })
    }

    pub fn from_rows<'a, I>(rows: I, dim: usize, bins: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut h = Histograms::empty(dim, bins);
        for x in rows {
            h.add(x, 1.0)?;
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn counts(&self) -> &[Vec<f64>] {
        &self.counts
    }

    /// Adds `weight` to the bin of each coordinate; `-1.0` removes a row.
    pub fn add(&mut self, x: &[f64], weight: f64) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        for (k, &v) in x.iter().enumerate() {
            self.counts[k][bin_index(v, self.bins)] += weight;
        }
        Ok(())
    }
}

/// `(1/d) Σ_k √( Σ_i (√(P_ik/ΣP_k) − √(Q_ik/ΣQ_k))² )`, in `[0, √2]`.
pub fn hellinger_distance(p: &Histograms, q: &Histograms) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::Shape {
            expected: p.dim(),
            actual: q.dim(),
        });
    }
    if p.bins != q.bins {
        return Err(Error::Shape {
            expected: p.bins,
            actual: q.bins,
        });
    }
    if p.dim() == 0 {
        return Err(Error::EmptyInput("histograms have no features".into()));
    }
    let mut total = 0.0;
    for (k, (pk, qk)) in p.counts.iter().zip(&q.counts).enumerate() {
        let sp: f64 = pk.iter().sum();
        let sq: f64 = qk.iter().sum();
        if sp <= 0.0 || sq <= 0.0 {
            return Err(Error::DegenerateHistogram(k));
        }
        let s: f64 = pk
            .iter()
            .zip(qk)
            .map(|(a, b)| ((a / sp).sqrt() - (b / sq).sqrt()).powi(2))
            .sum();
        total += s.sqrt();
    }
    Ok(total / p.dim() as f64)
}

/// Hellinger distance between two row sets with `⌈√N⌉` bins, `N` the size
/// of the smaller set.
pub fn hellinger_between(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let dim = a.first().or(b.first()).map_or(0, Vec::len);
    let bins = bins_for_chunk(a.len().min(b.len()));
    let p = Histograms::from_rows(a.iter().map(Vec::as_slice), dim, bins)?;
    let q = Histograms::from_rows(b.iter().map(Vec::as_slice), dim, bins)?;
    hellinger_distance(&p, &q)
}

/// HDDDM over a sliding chunk of the last `N` samples.
///
/// The reference histograms `P` cover the whole `3N` warm-up window. The
/// expected distance and its spread come from leave-one-chunk-out
/// distances: for every chunk of `N` rows at offsets `0, N/3, 2N/3, …`,
/// the distance between that chunk and the rest of the window. After
/// warm-up every step slides the current chunk by one and alarms when
/// `HD(P, Q) − hd_ref > θ·σ_hd`.
///
/// Comparing against a single fixed chunk instead lets the noise of that
/// one chunk shift every later distance, and on stationary noise the
/// detector then alarms on a large share of steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hdddm {
    chunk: usize,
    bins: usize,
    theta: f64,
    epsilon_sigma: f64,
    pending: Vec<Vec<f64>>,
    reference: Option<HdddmReference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdddmReference {
    pub histograms: Histograms,
    pub hd_ref: f64,
    pub sigma_hd: f64,
    current: Histograms,
    window: VecDeque<Vec<f64>>,
    pub last_distance: f64,
}

impl Hdddm {
    /// A detector waiting for `3N` warm-up samples.
    pub fn pending(chunk: usize, theta: f64, epsilon_sigma: f64) -> Result<Self> {
        if chunk < 3 {
            return Err(Error::Parameter(format!("HDDDM chunk must be at least 3, got {chunk}")));
        }
        if theta.is_nan() || theta < 0.0 {
            return Err(Error::Parameter(format!("theta must be >= 0, got {theta}")));
        }
        Ok(Hdddm {
            chunk,
            bins: bins_for_chunk(chunk),
            theta,
            epsilon_sigma,
            pending: Vec::new(),
            reference: None,
        })
    }

    /// Builds the reference directly from a window of at least `2N` rows.
    pub fn from_window(window: &[Vec<f64>], chunk: usize, theta: f64, epsilon_sigma: f64) -> Result<Self> {
        let mut h = Hdddm::pending(chunk, theta, epsilon_sigma)?;
        if window.len() < 2 * chunk {
            return Err(Error::Parameter(format!(
                "HDDDM warm-up needs at least {} rows, got {}",
                2 * chunk,
                window.len()
            )));
        }
        h.initialize(window)?;
        Ok(h)
    }

    pub fn warmup_len(&self) -> usize {
        3 * self.chunk
    }

    pub fn is_ready(&self) -> bool {
        self.reference.is_some()
    }

    pub fn reference(&self) -> Option<&HdddmReference> {
        self.reference.as_ref()
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Most recent distance, or 0 during warm-up.
    pub fn metric(&self) -> f64 {
        self.reference.as_ref().map_or(0.0, |r| r.last_distance)
    }

    fn initialize(&mut self, window: &[Vec<f64>]) -> Result<()> {
        let n = self.chunk;
        let dim = window[0].len();
        let hist = |rows: &[Vec<f64>]| Histograms::from_rows(rows.iter().map(Vec::as_slice), dim, self.bins);
        let whole = hist(window)?;
        let step = (n / 3).max(1);
        let mut distances = Vec::new();
        let mut s = 0;
        while s + n <= window.len() {
            let chunk = hist(&window[s..s + n])?;
            let mut rest = whole.clone();
            for x in &window[s..s + n] {
                rest.add(x, -1.0)?;
            }
            distances.push(hellinger_distance(&rest, &chunk)?);
            s += step;
        }
        let tail = &window[window.len() - n..];
        self.reference = Some(HdddmReference {
            current: hist(tail)?,
            histograms: whole,
            hd_ref: mean(&distances),
            sigma_hd: population_std(&distances).max(self.epsilon_sigma),
            window: tail.iter().cloned().collect(),
            last_distance: 0.0,
        });
        self.pending.clear();
        Ok(())
    }

    /// Warm-up aware step: buffers rows until `3N` have been seen, then
    /// behaves like [`Hdddm::step`]. Never alarms during warm-up.
    pub fn observe(&mut self, x: &[f64]) -> Result<bool> {
        if self.reference.is_some() {
            return self.step(x);
        }
        if let Some(first) = self.pending.first() {
            if first.len() != x.len() {
                return Err(Error::Shape {
                    expected: first.len(),
                    actual: x.len(),
                });
            }
        }
        self.pending.push(x.to_vec());
        if self.pending.len() >= self.warmup_len() {
            let window = std::mem::take(&mut self.pending);
            self.initialize(&window)?;
        }
        Ok(false)
    }

    /// Adds rows to the warm-up buffer without stepping.
    pub fn seed_warmup<'a, I: IntoIterator<Item = &'a [f64]>>(&mut self, rows: I) -> Result<()> {
        for x in rows {
            self.observe(x)?;
        }
        Ok(())
    }

    /// Slides the current chunk by one sample and tests the distance.
    pub fn step(&mut self, x: &[f64]) -> Result<bool> {
        let theta = self.theta;
        let r = self
            .reference
            .as_mut()
            .ok_or_else(|| Error::State("HDDDM stepped before its reference was built".into()))?;
        r.current.add(x, 1.0)?;
        r.window.push_back(x.to_vec());
        if let Some(old) = r.window.pop_front() {
            r.current.add(&old, -1.0)?;
        }
        r.last_distance = hellinger_distance(&r.histograms, &r.current)?;
        Ok(r.last_distance - r.hd_ref > theta * r.sigma_hd)
    }

    /// Drops the reference and starts a new warm-up from `rows`.
    pub fn restart<'a, I: IntoIterator<Item = &'a [f64]>>(&mut self, rows: I) -> Result<()> {
        self.reference = None;
        self.pending.clear();
        self.seed_warmup(rows)
    }
}
