//! Joint input distributions `p(u, x1^n, x2^n)` and the conditional
//! mutual-information functionals evaluated on them.
//!
//! The auxiliary alphabet `U` is a time-sharing variable; sequences use the
//! row-major time-step indexing documented in [`crate::channel`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{checked_pow, decode_sequence, DiscreteMac, DEFAULT_TABLE_CAP};
use crate::error::{Error, Result};
use crate::pmf::validate_and_normalize;

/// Conditional mutual information I(A;B|U) in bits of a joint table
/// `p(u, a, b)` given flat with `u` outermost.
///
/// Computed as `Σ p(u,a,b) log2[ p(u,a,b) p(u) / (p(u,a) p(u,b)) ]` with
/// zero-mass short-circuits; the result is clamped at zero to absorb
/// rounding. The table is validated like any distribution.
pub fn conditional_mutual_information(
    probs: &[f64],
    u_size: usize,
    a_size: usize,
    b_size: usize,
) -> Result<f64> {
    if probs.len() != u_size * a_size * b_size {
        return Err(Error::SizeMismatch(probs.len(), u_size * a_size * b_size));
    }
    let mut table = probs.to_vec();
    validate_and_normalize(&mut table)?;
    Ok(cmi_unchecked(&table, u_size, a_size, b_size))
}

/// I(A;B|U) without validation; `probs` must already be a pmf.
pub(crate) fn cmi_unchecked(probs: &[f64], u_size: usize, a_size: usize, b_size: usize) -> f64 {
    let mut pu = vec![0.0; u_size];
    let mut pua = vec![0.0; u_size * a_size];
    let mut pub_ = vec![0.0; u_size * b_size];
    for u in 0..u_size {
        for a in 0..a_size {
            let base = (u * a_size + a) * b_size;
            for b in 0..b_size {
                let p = probs[base + b];
                if p > 0.0 {
                    pu[u] += p;
                    pua[u * a_size + a] += p;
                    pub_[u * b_size + b] += p;
                }
            }
        }
    }
    let mut mi = 0.0;
    for u in 0..u_size {
        if pu[u] <= 0.0 {
            continue;
        }
        for a in 0..a_size {
            let pa = pua[u * a_size + a];
            if pa <= 0.0 {
                continue;
            }
            let base = (u * a_size + a) * b_size;
            for b in 0..b_size {
                let p = probs[base + b];
                if p > 0.0 {
                    mi += p * (p * pu[u] / (pa * pub_[u * b_size + b])).log2();
                }
            }
        }
    }
    mi.max(0.0)
}

/// A joint distribution `p(u, x1^n, x2^n)` over an auxiliary alphabet and
/// length-`n` input sequences.
///
/// Stored flat, indexed `[u][x1-sequence][x2-sequence]` with sequences in
/// row-major time order. Invariants (checked at construction): entries are
/// nonnegative, the total mass is 1, `n ≥ 1`, and `u_size ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointInputDist {
    u_size: usize,
    n: usize,
    x1_size: usize,
    x2_size: usize,
    probs: Vec<f64>,
}

impl JointInputDist {
    pub fn new(
        u_size: usize,
        n: usize,
        x1_size: usize,
        x2_size: usize,
        probs: Vec<f64>,
    ) -> Result<Self> {
        if u_size == 0 || n == 0 || x1_size == 0 || x2_size == 0 {
            return Err(Error::Domain(
                "u_size, blocklength, and alphabet sizes must be positive".into(),
            ));
        }
        let a = checked_pow(x1_size, n)?;
        let b = checked_pow(x2_size, n)?;
        let required = u_size
            .checked_mul(a)
            .and_then(|v| v.checked_mul(b))
            .ok_or(Error::TableTooLarge {
                required: usize::MAX,
                cap: DEFAULT_TABLE_CAP,
            })?;
        if required > DEFAULT_TABLE_CAP {
            return Err(Error::TableTooLarge {
                required,
                cap: DEFAULT_TABLE_CAP,
            });
        }
        if probs.len() != required {
            return Err(Error::SizeMismatch(probs.len(), required));
        }
        let mut probs = probs;
        validate_and_normalize(&mut probs)?;
        Ok(Self {
            u_size,
            n,
            x1_size,
            x2_size,
            probs,
        })
    }

    /// A product distribution `p(x1^n) p(x2^n)` embedded with all mass on
    /// `u = 0`.
    pub fn from_product(
        u_size: usize,
        n: usize,
        x1_size: usize,
        x2_size: usize,
        p_x1: &[f64],
        p_x2: &[f64],
    ) -> Result<Self> {
        let a = checked_pow(x1_size, n)?;
        let b = checked_pow(x2_size, n)?;
        if p_x1.len() != a {
            return Err(Error::SizeMismatch(p_x1.len(), a));
        }
        if p_x2.len() != b {
            return Err(Error::SizeMismatch(p_x2.len(), b));
        }
        let mut probs = vec![0.0; u_size * a * b];
        for ai in 0..a {
            for bi in 0..b {
                probs[ai * b + bi] = p_x1[ai] * p_x2[bi];
            }
        }
        Self::new(u_size, n, x1_size, x2_size, probs)
    }

    /// Seeded random joint with Dirichlet(1) weights over the whole table.
    pub fn random<R: Rng>(
        u_size: usize,
        n: usize,
        x1_size: usize,
        x2_size: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let a = checked_pow(x1_size, n)?;
        let b = checked_pow(x2_size, n)?;
        let mut probs = vec![0.0; u_size * a * b];
        let mut sum = 0.0;
        for v in probs.iter_mut() {
            let u: f64 = rng.random();
            *v = -(1.0 - u).ln();
            sum += *v;
        }
        for v in probs.iter_mut() {
            *v /= sum;
        }
        Self::new(u_size, n, x1_size, x2_size, probs)
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    /// Number of x1 sequences (`x1_size^n`).
    pub fn a_size(&self) -> usize {
        self.probs.len() / (self.u_size * self.b_size())
    }

    /// Number of x2 sequences (`x2_size^n`).
    pub fn b_size(&self) -> usize {
        let mut b = 1usize;
        for _ in 0..self.n {
            b *= self.x2_size;
        }
        b
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal weights of the auxiliary variable.
    pub fn u_weights(&self) -> Vec<f64> {
        let block = self.a_size() * self.b_size();
        self.probs
            .chunks(block)
            .map(|slice| slice.iter().sum())
            .collect()
    }

    /// Conditional table `p(x1^n, x2^n | u)` as a flat `[a][b]` vector, or
    /// `None` if `u` carries no mass.
    pub fn conditional_given_u(&self, u: usize) -> Option<Vec<f64>> {
        let block = self.a_size() * self.b_size();
        let slice = &self.probs[u * block..(u + 1) * block];
        let w: f64 = slice.iter().sum();
        if w <= 0.0 {
            return None;
        }
        Some(slice.iter().map(|&p| p / w).collect())
    }

    /// The dependence budget I(X1^n; X2^n | U) in bits (not divided by `n`).
    pub fn dependence(&self) -> f64 {
        cmi_unchecked(&self.probs, self.u_size, self.a_size(), self.b_size())
    }

    /// The transmission functional I(X1^n, X2^n; Y^n | U) in bits (not
    /// divided by `n`) against a channel given as its `n`-letter extension.
    ///
    /// Built by adjoining the output to the input pair and evaluating the
    /// generic conditional mutual information, so it shares no code with the
    /// optimizer's incremental objective.
    pub fn transmission(&self, extension: &DiscreteMac) -> Result<f64> {
        let a = self.a_size();
        let b = self.b_size();
        if extension.x1_size() != a || extension.x2_size() != b {
            return Err(Error::SizeMismatch(
                extension.x1_size() * extension.x2_size(),
                a * b,
            ));
        }
        let y = extension.y_size();
        let mut table = vec![0.0; self.u_size * a * b * y];
        for u in 0..self.u_size {
            for ai in 0..a {
                for bi in 0..b {
                    let p = self.probs[(u * a + ai) * b + bi];
                    if p > 0.0 {
                        let row = extension.row(ai, bi);
                        let base = ((u * a + ai) * b + bi) * y;
                        for (yi, &w) in row.iter().enumerate() {
                            table[base + yi] = p * w;
                        }
                    }
                }
            }
        }
        conditional_mutual_information(&table, self.u_size, a * b, y)
    }

    /// Per-letter dependence I(X1_t; X2_t | U, X1^T, X2^T) in bits, where `T`
    /// (`cond`) is a set of coordinates adjoined to the conditioning side.
    ///
    /// `t` is a 0-based coordinate not in `cond`.
    pub fn per_letter_dependence_given(&self, t: usize, cond: &[usize]) -> Result<f64> {
        if t >= self.n {
            return Err(Error::Domain(format!(
                "coordinate {t} out of range for blocklength {}",
                self.n
            )));
        }
        if cond.contains(&t) {
            return Err(Error::Domain(format!(
                "coordinate {t} is already conditioned on"
            )));
        }
        let a = self.a_size();
        let b = self.b_size();
        let c1 = checked_pow(self.x1_size, cond.len())?;
        let c2 = checked_pow(self.x2_size, cond.len())?;
        let v_size = self.u_size * c1 * c2;
        let mut table = vec![0.0; v_size * self.x1_size * self.x2_size];
        let mut s1 = vec![0usize; self.n];
        let mut s2 = vec![0usize; self.n];
        for u in 0..self.u_size {
            for ai in 0..a {
                decode_sequence(ai, self.x1_size, &mut s1);
                for bi in 0..b {
                    let p = self.probs[(u * a + ai) * b + bi];
                    if p <= 0.0 {
                        continue;
                    }
                    decode_sequence(bi, self.x2_size, &mut s2);
                    let mut v1 = 0usize;
                    let mut v2 = 0usize;
                    for &c in cond {
                        v1 = v1 * self.x1_size + s1[c];
                        v2 = v2 * self.x2_size + s2[c];
                    }
                    let v = (u * c1 + v1) * c2 + v2;
                    table[(v * self.x1_size + s1[t]) * self.x2_size + s2[t]] += p;
                }
            }
        }
        Ok(cmi_unchecked(
            &table,
            v_size,
            self.x1_size,
            self.x2_size,
        ))
    }

    /// The conditionally independent projection `p(u) p(x1^n|u) p(x2^n|u)`.
    pub fn conditionally_independent_projection(&self) -> Self {
        let a = self.a_size();
        let b = self.b_size();
        let mut probs = vec![0.0; self.probs.len()];
        for u in 0..self.u_size {
            let block = &self.probs[u * a * b..(u + 1) * a * b];
            let w: f64 = block.iter().sum();
            if w <= 0.0 {
                continue;
            }
            let mut ma = vec![0.0; a];
            let mut mb = vec![0.0; b];
            for ai in 0..a {
                for bi in 0..b {
                    let p = block[ai * b + bi];
                    ma[ai] += p;
                    mb[bi] += p;
                }
            }
            for ai in 0..a {
                for bi in 0..b {
                    probs[(u * a + ai) * b + bi] = ma[ai] * mb[bi] / w;
                }
            }
        }
        Self {
            u_size: self.u_size,
            n: self.n,
            x1_size: self.x1_size,
            x2_size: self.x2_size,
            probs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::binary_adder_mac;
    use crate::pmf::entropy_of_slice;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conditionally_independent_table_has_zero_cmi() {
        // p(u,a,b) = p(u) p(a|u) p(b|u) on 2x2x2.
        let pu = [0.3, 0.7];
        let pa = [[0.2, 0.8], [0.6, 0.4]];
        let pb = [[0.5, 0.5], [0.1, 0.9]];
        let mut t = vec![0.0; 8];
        for u in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    t[(u * 2 + a) * 2 + b] = pu[u] * pa[u][a] * pb[u][b];
                }
            }
        }
        let mi = conditional_mutual_information(&t, 2, 2, 2).unwrap();
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn fully_correlated_binary_gives_one_bit() {
        // u_size = 1, a = b uniform binary, perfectly correlated.
        let t = vec![0.5, 0.0, 0.0, 0.5];
        let mi = conditional_mutual_information(&t, 1, 2, 2).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cmi_matches_entropy_identity_on_random_tables() {
        // I(A;B|U) = H(A|U) + H(B|U) - H(A,B|U).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = JointInputDist::random(2, 1, 2, 2, &mut rng).unwrap();
            let t = d.probs();
            let mut h_abu = 0.0;
            let mut pu = vec![0.0; 2];
            let mut pua = vec![0.0; 4];
            let mut pub_ = vec![0.0; 4];
            for u in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let p = t[(u * 2 + a) * 2 + b];
                        pu[u] += p;
                        pua[u * 2 + a] += p;
                        pub_[u * 2 + b] += p;
                        if p > 0.0 {
                            h_abu -= p * p.log2();
                        }
                    }
                }
            }
            let hu = entropy_of_slice(&pu);
            let h_a_given_u = entropy_of_slice(&pua) - hu;
            let h_b_given_u = entropy_of_slice(&pub_) - hu;
            let h_ab_given_u = h_abu - hu;
            let expected = h_a_given_u + h_b_given_u - h_ab_given_u;
            let got = d.dependence();
            assert!(
                (got - expected).abs() < 1e-9,
                "cmi {got} vs entropy identity {expected}"
            );
        }
    }

    #[test]
    fn transmission_matches_chain_rule_on_random_joints() {
        // I(X1,X2;Y|U) = H(Y|U) - H(Y|U,X1,X2).
        let mac = binary_adder_mac();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let d = JointInputDist::random(2, 1, 2, 2, &mut rng).unwrap();
            let got = d.transmission(&mac).unwrap();

            let mut r = vec![0.0; 2 * 3];
            let mut pu = vec![0.0; 2];
            let mut h_y_given_all = 0.0;
            for u in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let p = d.probs()[(u * 2 + a) * 2 + b];
                        pu[u] += p;
                        for y in 0..3 {
                            let w = mac.prob(a, b, y);
                            r[u * 3 + y] += p * w;
                            if p > 0.0 && w > 0.0 {
                                h_y_given_all -= p * w * w.log2();
                            }
                        }
                    }
                }
            }
            let h_y_given_u = entropy_of_slice(&r) - entropy_of_slice(&pu);
            let expected = h_y_given_u - h_y_given_all;
            assert!(
                (got - expected).abs() < 1e-9,
                "transmission {got} vs chain rule {expected}"
            );
        }
    }

    #[test]
    fn extension_transmission_is_additive_for_iid_products() {
        // An i.i.d. product through the 2nd extension carries twice the
        // single-letter information.
        let mac = binary_adder_mac();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let single = JointInputDist::random(1, 1, 2, 2, &mut rng).unwrap();
        let i1 = single.transmission(&mac).unwrap();

        let mut probs = vec![0.0; 16];
        for a0 in 0..2 {
            for a1 in 0..2 {
                for b0 in 0..2 {
                    for b1 in 0..2 {
                        let p = single.probs()[a0 * 2 + b0] * single.probs()[a1 * 2 + b1];
                        probs[(a0 * 2 + a1) * 4 + (b0 * 2 + b1)] = p;
                    }
                }
            }
        }
        let pair = JointInputDist::new(1, 2, 2, 2, probs).unwrap();
        let ext = mac.nth_extension(2).unwrap();
        let i2 = pair.transmission(&ext).unwrap();
        assert!((i2 - 2.0 * i1).abs() < 1e-9, "i2 = {i2}, 2*i1 = {}", 2.0 * i1);
    }

    #[test]
    fn per_letter_dependence_reduces_to_plain_cmi_for_n1() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = JointInputDist::random(2, 1, 2, 2, &mut rng).unwrap();
        let a = d.per_letter_dependence_given(0, &[]).unwrap();
        assert!((a - d.dependence()).abs() < 1e-12);
    }

    #[test]
    fn ci_projection_kills_dependence_and_keeps_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = JointInputDist::random(2, 1, 3, 2, &mut rng).unwrap();
        let ci = d.conditionally_independent_projection();
        assert!(ci.dependence() < 1e-12);
        let w: f64 = ci.probs().iter().sum();
        assert!((w - 1.0).abs() < 1e-12);
        assert_eq!(ci.u_weights().len(), 2);
        for (a, b) in d.u_weights().iter().zip(ci.u_weights()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
