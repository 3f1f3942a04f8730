//! Scalar change trackers: margin density, EWMA of the error rate, CUSUM,
//! Page–Hinkley and mean uncertainty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALLOWANCE: f64 = 0.005;

/// `λ = (N − 1) / N`.
pub fn lambda_for_chunk(chunk: usize) -> Result<f64> {
    if chunk < 2 {
        return Err(Error::Parameter(format!("chunk size must be at least 2, got {chunk}")));
    }
    Ok((chunk as f64 - 1.0) / chunk as f64)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("lambda must lie in (0, 1), got {lambda}")))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Exponentially weighted mean with a two-sided deviation test.
///
/// Used for margin density (`md_t`) and for mean uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationTracker {
    pub value: f64,
    pub lambda: f64,
    pub reference: f64,
    pub sigma: f64,
    pub theta: f64,
}

impl DeviationTracker {
    /// Starts at the reference value.
    pub fn new(reference: f64, sigma: f64, lambda: f64, theta: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_nonneg("theta", theta)?;
        check_nonneg("sigma", sigma)?;
        Ok(DeviationTracker {
            value: reference,
            lambda,
            reference,
            sigma,
            theta,
        })
    }

    pub fn deviation(&self) -> f64 {
        (self.value - self.reference).abs()
    }

    /// Folds in one observation; true when `|value − reference| > θ·σ`.
    pub fn step(&mut self, x: f64) -> bool {
        self.value = self.lambda * self.value + (1.0 - self.lambda) * x;
        self.deviation() > self.theta * self.sigma
    }

    /// New reference; the running value restarts at it.
    pub fn rebase(&mut self, reference: f64, sigma: f64) {
        self.reference = reference;
        self.sigma = sigma;
        self.value = reference;
    }
}

/// EWMA of the error indicator, alarming on an upward deviation
/// `M_t − μ₀ > θ·σ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwmaTracker {
    pub value: f64,
    pub lambda: f64,
    pub mu0: f64,
    pub sigma0: f64,
    pub theta: f64,
}

impl EwmaTracker {
    pub fn new(mu0: f64, sigma0: f64, lambda: f64, theta: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_nonneg("theta", theta)?;
        check_nonneg("sigma0", sigma0)?;
        Ok(EwmaTracker {
            value: mu0,
            lambda,
            mu0,
            sigma0,
            theta,
        })
    }

    pub fn step(&mut self, epsilon: f64) -> bool {
        self.value = self.lambda * self.value + (1.0 - self.lambda) * epsilon;
        self.value - self.mu0 > self.theta * self.sigma0
    }

    pub fn rebase(&mut self, mu0: f64, sigma0: f64) {
        self.mu0 = mu0;
        self.sigma0 = sigma0;
        self.value = mu0;
    }
}

/// `M_t = max(0, M_{t−1} + ε − v)`; alarm when `M_t > θ`, then `M_t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CusumTracker {
    pub value: f64,
    pub allowance: f64,
    pub theta: f64,
}

impl CusumTracker {
    pub fn new(allowance: f64, theta: f64) -> Result<Self> {
        check_nonneg("theta", theta)?;
        Ok(CusumTracker {
            value: 0.0,
            allowance,
            theta,
        })
    }

    pub fn step(&mut self, epsilon: f64) -> bool {
        self.value = (self.value + epsilon - self.allowance).max(0.0);
        if self.value > self.theta {
            self.value = 0.0;
            true
        } else {
            false
        }
    }

    pub fn reset(&mut self) {
        self.value = 0.0;
    }
}

/// Page–Hinkley: `M_t = M_{t−1} + (ε − v)`, `M_ref = min M`, alarm when
/// `M_t − M_ref > θ`. Both sums restart at 0 after an alarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhtTracker {
    pub value: f64,
    pub minimum: f64,
    pub allowance: f64,
    pub theta: f64,
}

impl PhtTracker {
    pub fn new(allowance: f64, theta: f64) -> Result<Self> {
        check_nonneg("theta", theta)?;
        Ok(PhtTracker {
            value: 0.0,
            minimum: 0.0,
            allowance,
            theta,
        })
    }

    pub fn step(&mut self, epsilon: f64) -> bool {
        self.value += epsilon - self.allowance;
        self.minimum = self.minimum.min(self.value);
        if self.value - self.minimum > self.theta {
            self.reset();
            true
        } else {
            false
        }
    }

    pub fn reset(&mut self) {
        self.value = 0.0;
        self.minimum = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn md_update_arithmetic() {
        let lambda = lambda_for_chunk(500).unwrap();
        assert_eq!(lambda, 0.998);
        let mut t = DeviationTracker::new(0.1, 0.02, lambda, 2.0).unwrap();
        assert!(!t.step(1.0));
        assert!((t.value - 0.1018).abs() < 1e-12);
    }

    #[test]
    fn deviation_threshold_both_directions() {
        let mut t = DeviationTracker::new(0.10, 0.02, 0.5, 2.0).unwrap();
        // 0.5·0.10 + 0.5·0.20 = 0.15; |0.05| > 0.04
        assert!(t.step(0.20));
        t.rebase(0.10, 0.02);
        // 0.5·0.10 + 0.5·0.16 = 0.13; 0.03 <= 0.04
        assert!(!t.step(0.16));
        t.rebase(0.10, 0.02);
        // 0.05; |−0.05| > 0.04
        assert!(t.step(0.0));
    }

    #[test]
    fn ewma_arithmetic() {
        let mut t = EwmaTracker::new(0.2, 0.01, 0.9, 2.0).unwrap();
        assert!(t.step(1.0));
        assert!((t.value - 0.28).abs() < 1e-12);
    }

    #[test]
    fn cusum_unrolled() {
        let mut t = CusumTracker::new(0.1, 0.5).unwrap();
        assert!(!t.step(0.3));
        assert!((t.value - 0.2).abs() < 1e-12);
        assert!(!t.step(0.3));
        assert!((t.value - 0.4).abs() < 1e-12);
        // 0.6 > 0.5: alarm and reset.
        assert!(t.step(0.3));
        assert_eq!(t.value, 0.0);
        // With θ = 0.7 the sum reaches 0.8 after four steps before alarming.
        let mut t = CusumTracker::new(0.1, 0.7).unwrap();
        for _ in 0..3 {
            assert!(!t.step(0.3));
        }
        assert!(t.step(0.3));
    }

    #[test]
    fn pht_fixed_point() {
        let mut t = PhtTracker::new(0.005, 0.1).unwrap();
        for _ in 0..10_000 {
            assert!(!t.step(0.005));
        }
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn parameter_checks() {
        assert!(lambda_for_chunk(1).is_err());
        assert!(DeviationTracker::new(0.1, 0.1, 1.0, 2.0).is_err());
        assert!(CusumTracker::new(0.0, -1.0).is_err());
    }
}
