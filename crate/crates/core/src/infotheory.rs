//! Shannon entropy primitives in bits.
//!
//! All analytic modules funnel their distributions through [`ProbVector`], so
//! the acceptance rules for a probability distribution live in one place.

use crate::error::{validation, Result};

/// Maximum deviation of `Σp` from 1 accepted on construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Entries below this are treated as exact zeros when taking logarithms.
const ZERO_FLOOR: f64 = 1e-300;

/// A finite discrete probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(validation("probability vector is empty"));
        }
        if let Some(p) = entries.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(validation(format!("probability entry {p} outside [0, 1]")));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(validation(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self(entries))
    }

    /// Point mass on `index` over `len` outcomes.
    pub fn point_mass(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(validation(format!(
                "index {index} out of range for {len} outcomes"
            )));
        }
        let mut entries = vec![0.0; len];
        entries[index] = 1.0;
        Ok(Self(entries))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(validation("probability vector is empty"));
        }
        Ok(Self(vec![1.0 / len as f64; len]))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy_unchecked(&self.0)
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = crate::error::Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Self::new(entries)
    }
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p < ZERO_FLOOR {
        0.0
    } else {
        -p * p.log2()
    }
}

/// `x log2 y` with the convention that it vanishes when `x` does.
#[inline]
pub(crate) fn xlog2y(x: f64, y: f64) -> f64 {
    if x < ZERO_FLOOR {
        0.0
    } else {
        x * y.log2()
    }
}

pub(crate) fn entropy_unchecked(entries: &[f64]) -> f64 {
    entries.iter().copied().map(plogp).sum()
}

/// Shannon entropy `-Σ p log2 p` of a validated distribution.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    p.entropy()
}

/// Validates `entries` and returns their Shannon entropy in bits.
pub fn shannon_entropy_of(entries: &[f64]) -> Result<f64> {
    Ok(ProbVector::new(entries.to_vec())?.entropy())
}

/// Binary entropy `h(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(validation(format!(
            "binary entropy argument {q} outside [0, 1]"
        )));
    }
    Ok(binary_entropy_unchecked(q))
}

#[inline]
pub(crate) fn binary_entropy_unchecked(q: f64) -> f64 {
    plogp(q) + plogp(1.0 - q)
}
