//! Probability mass functions on finite alphabets and the entropy-type
//! functionals built on them.
//!
//! All logarithms are base 2; every quantity is in bits. The conventions
//! `0 log 0 = 0` and `0 log (0/0) = 0` are enforced by explicit zero-mass
//! short-circuits rather than by flooring probabilities, so KL support
//! semantics stay exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries below this magnitude may be clamped to zero during validation.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// Hard rejection threshold for normalization deviations. Deviations below
/// this are renormalized silently (optimizer outputs accumulate rounding);
/// anything larger is an input error.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Validate a nonnegative table summing to 1 and renormalize it in place.
///
/// Shared by every distribution constructor in the crate: rejects entries
/// below `-1e-12` and total-mass deviations above `1e-9`, clamps tiny
/// negatives to zero, and rescales so the result sums to 1 exactly (up to
/// one rounding step).
pub(crate) fn validate_and_normalize(probs: &mut [f64]) -> Result<()> {
    for (index, &value) in probs.iter().enumerate() {
        if value < -NEGATIVE_TOL {
            return Err(Error::NegativeEntry { index, value });
        }
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite probability at flat index {index}"
            )));
        }
    }
    let sum: f64 = probs.iter().sum();
    let deviation = (sum - 1.0).abs();
    if deviation > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum, deviation });
    }
    for value in probs.iter_mut() {
        if *value < 0.0 {
            *value = 0.0;
        }
    }
    let clamped_sum: f64 = probs.iter().sum();
    if clamped_sum > 0.0 {
        for value in probs.iter_mut() {
            *value /= clamped_sum;
        }
    }
    Ok(())
}

/// A probability mass function on a finite alphabet `{0, …, k-1}`.
///
/// Invariants (checked at construction): every entry is nonnegative and the
/// entries sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Build a pmf from raw weights, validating and renormalizing.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut probs = probs;
        if probs.is_empty() {
            return Err(Error::Domain("pmf must have at least one symbol".into()));
        }
        validate_and_normalize(&mut probs)?;
        Ok(Self { probs })
    }

    /// Uniform distribution on `k` symbols.
    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Point mass on `symbol`.
    pub fn point_mass(k: usize, symbol: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[symbol] = 1.0;
        Self { probs }
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Shannon entropy of a nonnegative weight slice, in bits.
///
/// Zero entries contribute nothing (`0 log 0 = 0`). The slice is trusted to
/// be a valid pmf; use [`entropy`] for the validated entry point.
pub(crate) fn entropy_of_slice(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy H(p) = −Σ p_i log2 p_i in bits.
///
/// Lies in `[0, log2 k]` for an alphabet of size `k`.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of_slice(p.probs())
}

/// Kullback–Leibler divergence D(p‖q) = Σ p_i log2(p_i / q_i) in bits.
///
/// Requires `support(p) ⊆ support(q)`; a violation is reported with the
/// offending symbol index rather than returning infinity.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::SizeMismatch(p.alphabet_size(), q.alphabet_size()));
    }
    let mut d = 0.0;
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::SupportViolation { index, p_value: pi });
            }
            d += pi * (pi / qi).log2();
        }
    }
    // Numerically D can dip a hair below zero when p == q.
    Ok(d.max(0.0))
}

/// Total variation style L1 distance Σ |p_i − q_i|, in `[0, 2]`.
pub fn l1_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::SizeMismatch(p.alphabet_size(), q.alphabet_size()));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (a - b).abs())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_binary_entropy_is_one_bit() {
        let p = Pmf::uniform(2);
        assert!((entropy(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_entropy_is_zero() {
        let p = Pmf::point_mass(5, 2);
        assert_eq!(entropy(&p), 0.0);
    }

    #[test]
    fn quarter_half_quarter_entropy() {
        // -0.25 log 0.25 - 0.5 log 0.5 - 0.25 log 0.25 = 0.5 + 0.5 + 0.5
        let p = Pmf::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert!((entropy(&p) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn kl_identical_is_zero() {
        let p = Pmf::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_point_mass_against_uniform() {
        let p = Pmf::new(vec![1.0, 0.0]).unwrap();
        let q = Pmf::uniform(2);
        assert!((kl_divergence(&p, &q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kl_support_violation_names_symbol() {
        let p = Pmf::new(vec![0.5, 0.5]).unwrap();
        let q = Pmf::new(vec![1.0, 0.0]).unwrap();
        match kl_divergence(&p, &q) {
            Err(Error::SupportViolation { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected support violation, got {other:?}"),
        }
    }

    #[test]
    fn l1_extremes() {
        let p = Pmf::new(vec![1.0, 0.0]).unwrap();
        let q = Pmf::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(l1_distance(&p, &q).unwrap(), 2.0);
    }

    #[test]
    fn rejects_negative_entries() {
        assert!(Pmf::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn rejects_bad_normalization_but_fixes_small_drift() {
        assert!(Pmf::new(vec![0.6, 0.6]).is_err());
        let p = Pmf::new(vec![0.5 + 3e-10, 0.5]).unwrap();
        let total: f64 = p.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let p = Pmf::uniform(2);
        let q = Pmf::uniform(3);
        assert!(matches!(l1_distance(&p, &q), Err(Error::SizeMismatch(2, 3))));
        assert!(kl_divergence(&p, &q).is_err());
    }
}
