//! Shannon entropy and the time traces every simulation emits.

use thiserror::Error;

/// Allowed deviation of a probability vector's sum from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("probability vector is empty")]
    Empty,
    #[error("probability {value} at index {index} is negative or not finite")]
    InvalidProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within {NORMALIZATION_TOL:e}")]
    NotNormalized { sum: f64 },
    #[error("trace step {step} does not follow previous step {previous}")]
    NonIncreasingStep { previous: u64, step: u64 },
    #[error("trace entropy {entropy} at step {step} is negative or not finite")]
    InvalidEntropy { step: u64, entropy: f64 },
}

/// `-Σ p ln p` in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> Result<f64, EntropyError> {
    if probabilities.is_empty() {
        return Err(EntropyError::Empty);
    }
    for (index, &value) in probabilities.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(EntropyError::InvalidProbability { index, value });
        }
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(EntropyError::NotNormalized { sum });
    }
    let h = -probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>();
    // a lone p = 1 gives -0.0
    Ok(h.max(0.0))
}

/// Entropy of the empirical distribution given by category counts.
///
/// Returns 0 when every count is zero.
pub fn entropy_of_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h = -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>();
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySample {
    pub step: u64,
    pub entropy: f64,
}

/// Entropy samples ordered by strictly increasing step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyTrace {
    samples: Vec<EntropySample>,
}

impl EntropyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u64, entropy: f64) -> Result<(), EntropyError> {
        if !(entropy.is_finite() && entropy >= 0.0) {
            return Err(EntropyError::InvalidEntropy { step, entropy });
        }
        if let Some(last) = self.samples.last() {
            if step <= last.step {
                return Err(EntropyError::NonIncreasingStep {
                    previous: last.step,
                    step,
                });
            }
        }
        self.samples.push(EntropySample { step, entropy });
        Ok(())
    }

    pub fn samples(&self) -> &[EntropySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_entropy(&self) -> Option<f64> {
        self.samples.iter().map(|s| s.entropy).reduce(f64::max)
    }
}
