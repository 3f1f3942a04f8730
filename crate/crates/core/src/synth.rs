//! Synthetic drift scenarios built from class-conditional isotropic Gaussians.
//!
//! Two families are provided:
//!
//! * the low-dimensional proof-of-concept scenarios `A0..A4` (2-D), `B0..B1`
//!   (3-D, the third axis irrelevant) and `C0..C1` (2-D, tightly packed
//!   classes), whose parameters live in [`scenario_registry`];
//! * the 20-dimensional relevance-controlled stream `HD20(i)`: features 1–5
//!   are irrelevant (mean 0.5 for both classes), features 6–20 sit at 0.85 for
//!   class 1 and 0.15 for class 2. After the midpoint, class 2's first `i`
//!   features move to mean 0.75.
//!
//! HD20 uses standard deviation 0.1 throughout. Every generated value is
//! clamped to `[0, 1]`. Class 1 is labeled +1, class 2 is labeled −1.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{default_feature_names, Dataset, Instance, Label};
use crate::error::{Error, Result};
use crate::seed;

pub const HD20_DIM: usize = 20;
pub const HD20_IRRELEVANT: usize = 5;
pub const HD20_MAX_DRIFTED: usize = 15;
const HD20_STD: f64 = 0.1;

/// Per-class mean vectors and isotropic standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlobSpec {
    pub negative_mean: Vec<f64>,
    pub positive_mean: Vec<f64>,
    pub negative_std: f64,
    pub positive_std: f64,
    pub n_per_class: usize,
}

impl GaussianBlobSpec {
    pub fn new(negative_mean: Vec<f64>, positive_mean: Vec<f64>, std: f64, n_per_class: usize) -> Self {
        GaussianBlobSpec {
            negative_mean,
            positive_mean,
            negative_std: std,
            positive_std: std,
            n_per_class,
        }
    }

    pub fn dim(&self) -> usize {
        self.negative_mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.negative_mean.len() != self.positive_mean.len() || self.negative_mean.is_empty() {
            return Err(Error::Parameter(
                "class mean vectors must be non-empty and of equal length".into(),
            ));
        }
        if !(self.negative_std > 0.0 && self.positive_std > 0.0) {
            return Err(Error::Parameter("standard deviations must be positive".into()));
        }
        if self
            .negative_mean
            .iter()
            .chain(&self.positive_mean)
            .any(|m| !m.is_finite())
        {
            return Err(Error::Parameter("class means must be finite".into()));
        }
        if self.n_per_class == 0 {
            return Err(Error::Parameter("n_per_class must be at least 1".into()));
        }
        Ok(())
    }
}

/// Draws `n_per_class` samples of each class, interleaved in a seeded random
/// order.
pub fn generate_blobs(spec: &GaussianBlobSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = seed::rng(seed::derive(seed, "blobs"));
    let mut rows = Vec::with_capacity(2 * spec.n_per_class);
    for (label, mean, std) in [
        (Label::Positive, &spec.positive_mean, spec.positive_std),
        (Label::Negative, &spec.negative_mean, spec.negative_std),
    ] {
        for _ in 0..spec.n_per_class {
            rows.push(Instance::labeled(sample_point(&mut rng, mean, std), label));
        }
    }
    rows.shuffle(&mut seed::rng(seed::derive(seed, "blob-order")));
    Dataset::from_instances(rows, spec.dim())
}

fn sample_point<R: rand::Rng>(rng: &mut R, mean: &[f64], std: f64) -> Vec<f64> {
    mean.iter()
        .map(|&m| {
            let z: f64 = StandardNormal.sample(rng);
            (m + std * z).clamp(0.0, 1.0)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    A0,
    A1,
    A2,
    A3,
    A4,
    B0,
    B1,
    C0,
    C1,
    /// 20-D stream; the payload is the number of drifted features (0–15).
    Hd20(usize),
}

impl ScenarioId {
    pub fn hd20(drifted: usize) -> Result<Self> {
        if drifted > HD20_MAX_DRIFTED {
            return Err(Error::Parameter(format!(
                "HD20 drifted-feature count must be in 0..=15, got {drifted}"
            )));
        }
        Ok(ScenarioId::Hd20(drifted))
    }

    pub fn all_low_dim() -> [ScenarioId; 9] {
        use ScenarioId::*;
        [A0, A1, A2, A3, A4, B0, B1, C0, C1]
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Hd20(i) => write!(f, "hd20:{i}"),
            other => write!(f, "{}", format!("{other:?}").to_lowercase()),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("hd20") {
            let rest = rest.trim_start_matches([':', '(', '=']).trim_end_matches(')');
            let i: usize = if rest.is_empty() {
                0
            } else {
                rest.parse()
                    .map_err(|_| Error::Parameter(format!("bad HD20 feature count in {s:?}")))?
            };
            return ScenarioId::hd20(i);
        }
        use ScenarioId::*;
        Ok(match lower.as_str() {
            "a0" => A0,
            "a1" => A1,
            "a2" => A2,
            "a3" => A3,
            "a4" => A4,
            "b0" => B0,
            "b1" => B1,
            "c0" => C0,
            "c1" => C1,
            _ => {
                return Err(Error::Parameter(format!(
                    "unknown scenario {s:?}; expected a0..a4, b0, b1, c0, c1 or hd20:<i>"
                )))
            }
        })
    }
}

/// Class-conditional parameters of one low-dimensional scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub id: ScenarioId,
    pub description: &'static str,
    pub negative_mean: Vec<f64>,
    pub positive_mean: Vec<f64>,
    pub std: f64,
}

/// Parameters of the low-dimensional scenarios.
///
/// `A0` places class −1 at (0.35, 0.35) and class +1 at (0.65, 0.65), so the
/// decision boundary is the anti-diagonal and both axes carry signal. The
/// drifted variants move one class:
///
/// | id | change |
/// |----|--------|
/// | A1 | class +1 moves along x₂ towards the boundary |
/// | A2 | class +1 moves away from the boundary |
/// | A3 | class +1 moves towards the boundary by the same amount |
/// | A4 | class +1 jumps far past class −1, away from the margin |
/// | B0 | A0 plus an irrelevant third axis at 0.3 |
/// | B1 | B0 with the irrelevant axis moved to 0.6 |
/// | C0 | tightly packed, overlapping classes |
/// | C1 | both classes moved into one corner, away from the boundary |
pub fn scenario_registry() -> Vec<ScenarioParams> {
    use ScenarioId::*;
    let p = |id, description, neg: &[f64], pos: &[f64], std| ScenarioParams {
        id,
        description,
        negative_mean: neg.to_vec(),
        positive_mean: pos.to_vec(),
        std,
    };
    vec![
        p(A0, "initial 2-D distribution", &[0.35, 0.35], &[0.65, 0.65], 0.06),
        p(A1, "class +1 shifted along x2 towards the boundary", &[0.35, 0.35], &[0.65, 0.4], 0.06),
        p(A2, "class +1 shifted away from the margin", &[0.35, 0.35], &[0.8, 0.8], 0.06),
        p(A3, "class +1 shifted towards the margin", &[0.35, 0.35], &[0.5, 0.5], 0.06),
        p(A4, "class +1 moved far past class -1", &[0.35, 0.35], &[0.1, 0.1], 0.06),
        p(B0, "A0 plus an irrelevant z axis", &[0.35, 0.35, 0.3], &[0.65, 0.65, 0.3], 0.08),
        p(B1, "drift on the irrelevant z axis only", &[0.35, 0.35, 0.6], &[0.65, 0.65, 0.6], 0.08),
        p(C0, "tightly packed overlapping classes", &[0.45, 0.45], &[0.55, 0.55], 0.08),
        p(C1, "classes moved into one corner, off the margin", &[0.15, 0.15], &[0.25, 0.25], 0.05),
    ]
}

pub fn scenario_params(id: ScenarioId) -> Result<ScenarioParams> {
    scenario_registry()
        .into_iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::Parameter(format!("{id} has no fixed parameter set")))
}

/// Class means of HD20 before (`drifted = None`) or after the change point.
pub fn hd20_means(drifted: Option<usize>) -> (Vec<f64>, Vec<f64>) {
    let positive: Vec<f64> = (0..HD20_DIM)
        .map(|j| if j < HD20_IRRELEVANT { 0.5 } else { 0.85 })
        .collect();
    let mut negative: Vec<f64> = (0..HD20_DIM)
        .map(|j| if j < HD20_IRRELEVANT { 0.5 } else { 0.15 })
        .collect();
    if let Some(i) = drifted {
        for m in negative.iter_mut().take(i) {
            *m = 0.75;
        }
    }
    (negative, positive)
}

/// Generates a labeled dataset for a scenario.
///
/// For the low-dimensional ids this is `n_per_class` samples per class from
/// that scenario's distribution. For `Hd20(i)` it is a stream of
/// `2·n_per_class` rows: the first `⌈n/2⌉` per class come from the pre-drift
/// distribution, the remaining `⌊n/2⌋` per class from the drifted one. The
/// Gaussian noise is drawn independently of `i`, so streams for different `i`
/// share their pre-drift half exactly and differ only in the shifted means.
pub fn generate_scenario(id: ScenarioId, n_per_class: usize, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::Parameter("n_per_class must be at least 1".into()));
    }
    match id {
        ScenarioId::Hd20(i) => generate_hd20(i, n_per_class, seed),
        other => {
            let p = scenario_params(other)?;
            generate_blobs(
                &GaussianBlobSpec::new(p.negative_mean, p.positive_mean, p.std, n_per_class),
                seed,
            )
        }
    }
}

fn generate_hd20(drifted: usize, n_per_class: usize, seed: u64) -> Result<Dataset> {
    ScenarioId::hd20(drifted)?;
    let pre = n_per_class.div_ceil(2);
    let post = n_per_class / 2;
    let mut rng = seed::rng(seed::derive(seed, "hd20-noise"));
    let mut block = |n: usize, means: &(Vec<f64>, Vec<f64>)| -> Vec<Instance> {
        let mut rows = Vec::with_capacity(2 * n);
        for (label, mean) in [(Label::Positive, &means.1), (Label::Negative, &means.0)] {
            for _ in 0..n {
                rows.push(Instance::labeled(sample_point(&mut rng, mean, HD20_STD), label));
            }
        }
        rows
    };
    let mut first = block(pre, &hd20_means(None));
    let mut second = block(post, &hd20_means(Some(drifted)));
    first.shuffle(&mut seed::rng(seed::derive(seed, "hd20-order-pre")));
    second.shuffle(&mut seed::rng(seed::derive(seed, "hd20-order-post")));
    first.extend(second);
    Dataset::new(first, default_feature_names(HD20_DIM))
}

/// Number of pre-drift rows in an HD20 stream generated with `n_per_class`.
pub fn hd20_change_point(n_per_class: usize) -> usize {
    2 * n_per_class.div_ceil(2)
}

/// A 16-feature, two-class dataset whose features have graded relevance.
///
/// * features 0–7 separate the classes perfectly, with alternating polarity.
///   Their information gain is exactly the label entropy, so ranking ties
///   resolve by index and the top quarter is always 0–3. Features 0–3 sit
///   further apart than 4–7, which makes a linear model lean on them; a
///   cyclic rotation of 0–3 moves class −1 onto class +1's side there;
/// * features 8–11: weakly relevant;
/// * features 12–15: irrelevant (same distribution for both classes) but with
///   distinct means, so rotating them changes the marginal distribution
///   without touching the class boundary.
///
/// Standard deviation 0.05 throughout keeps the separating features free of
/// overlap at any practical sample size.
pub fn graded_relevance_spec(n_per_class: usize) -> GaussianBlobSpec {
    let positive = vec![
        0.9, 0.1, 0.9, 0.1, // strong
        0.75, 0.25, 0.75, 0.25, // separating
        0.55, 0.45, 0.55, 0.45, // weak
        0.2, 0.8, 0.35, 0.65, // irrelevant
    ];
    let negative = vec![
        0.1, 0.9, 0.1, 0.9, //
        0.25, 0.75, 0.25, 0.75, //
        0.45, 0.55, 0.45, 0.55, //
        0.2, 0.8, 0.35, 0.65, //
    ];
    GaussianBlobSpec::new(negative, positive, 0.05, n_per_class)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_ids() {
        assert_eq!("hd20:8".parse::<ScenarioId>().unwrap(), ScenarioId::Hd20(8));
        assert_eq!("HD20(3)".parse::<ScenarioId>().unwrap(), ScenarioId::Hd20(3));
        assert_eq!("a3".parse::<ScenarioId>().unwrap(), ScenarioId::A3);
        assert!("hd20:16".parse::<ScenarioId>().is_err());
        assert!("z9".parse::<ScenarioId>().is_err());
        assert_eq!(ScenarioId::Hd20(4).to_string(), "hd20:4");
        assert_eq!(ScenarioId::B1.to_string(), "b1");
    }

    #[test]
    fn hd20_bounds() {
        assert!(ScenarioId::hd20(15).is_ok());
        assert!(matches!(ScenarioId::hd20(16), Err(Error::Parameter(_))));
        assert!(generate_scenario(ScenarioId::Hd20(16), 10, 0).is_err());
    }

    #[test]
    fn every_registry_entry_generates() {
        for id in ScenarioId::all_low_dim() {
            let d = generate_scenario(id, 50, 1).unwrap();
            assert_eq!(d.len(), 100);
            assert_eq!(d.count_label(Label::Positive), 50);
            for inst in d.instances() {
                assert!(inst.features.iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn hd20_pre_drift_half_is_shared_across_i() {
        let a = generate_scenario(ScenarioId::Hd20(2), 100, 5).unwrap();
        let b = generate_scenario(ScenarioId::Hd20(12), 100, 5).unwrap();
        let cp = hd20_change_point(100);
        assert_eq!(&a.instances()[..cp], &b.instances()[..cp]);
        assert_ne!(&a.instances()[cp..], &b.instances()[cp..]);
    }

    #[test]
    fn blob_spec_validation() {
        let mut s = GaussianBlobSpec::new(vec![0.1], vec![0.9], 0.1, 3);
        assert!(s.validate().is_ok());
        s.negative_std = 0.0;
        assert!(s.validate().is_err());
        let s = GaussianBlobSpec::new(vec![0.1], vec![0.9, 0.2], 0.1, 3);
        assert!(generate_blobs(&s, 0).is_err());
    }
}
