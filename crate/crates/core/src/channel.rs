//! Discrete memoryless multiple-access channels and their block extensions.
//!
//! A two-user MAC is a conditional pmf `p(y | x1, x2)` on finite alphabets.
//! Block extensions treat length-`n` input and output sequences as single
//! symbols; sequences are indexed row-major over time steps, with the first
//! letter most significant: `(s_1, …, s_n) ↦ Σ_t s_t · k^(n−1−t)` for a
//! per-letter alphabet of size `k`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{validate_and_normalize, Pmf};

/// Default cap on the number of kernel entries a block extension may have.
pub const DEFAULT_TABLE_CAP: usize = 10_000_000;

/// A discrete memoryless MAC `p(y | x1, x2)` on finite alphabets.
///
/// The kernel is stored flat, indexed `[x1][x2][y]`. Invariants (checked at
/// construction): entries are nonnegative and every `(x1, x2)` row sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMac {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    kernel: Vec<f64>,
}

impl DiscreteMac {
    /// Build a channel from a flat `[x1][x2][y]` kernel, validating that
    /// every input pair's row is a pmf over the output alphabet.
    pub fn new(x1_size: usize, x2_size: usize, y_size: usize, kernel: Vec<f64>) -> Result<Self> {
        if x1_size == 0 || x2_size == 0 || y_size == 0 {
            return Err(Error::Domain("alphabet sizes must be positive".into()));
        }
        if kernel.len() != x1_size * x2_size * y_size {
            return Err(Error::SizeMismatch(kernel.len(), x1_size * x2_size * y_size));
        }
        let mut kernel = kernel;
        for row in kernel.chunks_mut(y_size) {
            validate_and_normalize(row)?;
        }
        Ok(Self {
            x1_size,
            x2_size,
            y_size,
            kernel,
        })
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    /// Transition probability `p(y | x1, x2)`.
    #[inline]
    pub fn prob(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.kernel[(x1 * self.x2_size + x2) * self.y_size + y]
    }

    /// The kernel row for one input pair.
    #[inline]
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let base = (x1 * self.x2_size + x2) * self.y_size;
        &self.kernel[base..base + self.y_size]
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// The `n`-letter block extension with the default entry cap.
    ///
    /// `p(y^n | x1^n, x2^n) = Π_t p(y_t | x1_t, x2_t)`, alphabets the n-fold
    /// Cartesian powers in row-major sequence order.
    pub fn nth_extension(&self, n: usize) -> Result<DiscreteMac> {
        self.nth_extension_with_cap(n, DEFAULT_TABLE_CAP)
    }

    /// The `n`-letter block extension, rejecting tables larger than `cap`.
    pub fn nth_extension_with_cap(&self, n: usize, cap: usize) -> Result<DiscreteMac> {
        if n == 0 {
            return Err(Error::Domain("blocklength must be at least 1".into()));
        }
        let a = checked_pow(self.x1_size, n)?;
        let b = checked_pow(self.x2_size, n)?;
        let c = checked_pow(self.y_size, n)?;
        let required = a
            .checked_mul(b)
            .and_then(|v| v.checked_mul(c))
            .ok_or(Error::TableTooLarge {
                required: usize::MAX,
                cap,
            })?;
        if required > cap {
            return Err(Error::TableTooLarge { required, cap });
        }
        let mut kernel = vec![0.0; required];
        let mut s1 = vec![0usize; n];
        let mut s2 = vec![0usize; n];
        let mut sy = vec![0usize; n];
        for ai in 0..a {
            decode_sequence(ai, self.x1_size, &mut s1);
            for bi in 0..b {
                decode_sequence(bi, self.x2_size, &mut s2);
                for ci in 0..c {
                    decode_sequence(ci, self.y_size, &mut sy);
                    let mut prod = 1.0;
                    for t in 0..n {
                        prod *= self.prob(s1[t], s2[t], sy[t]);
                        if prod == 0.0 {
                            break;
                        }
                    }
                    kernel[(ai * b + bi) * c + ci] = prod;
                }
            }
        }
        Ok(DiscreteMac {
            x1_size: a,
            x2_size: b,
            y_size: c,
            kernel,
        })
    }

    /// Output distribution induced by a joint input pmf `p(x1, x2)` given as
    /// a flat `[x1][x2]` slice.
    pub fn output_dist(&self, joint_input: &[f64]) -> Result<Pmf> {
        if joint_input.len() != self.x1_size * self.x2_size {
            return Err(Error::SizeMismatch(
                joint_input.len(),
                self.x1_size * self.x2_size,
            ));
        }
        let mut out = vec![0.0; self.y_size];
        for (pair, &w) in joint_input.iter().enumerate() {
            if w > 0.0 {
                let base = pair * self.y_size;
                for y in 0..self.y_size {
                    out[y] += w * self.kernel[base + y];
                }
            }
        }
        Pmf::new(out)
    }

    /// Channel with the output alphabet relabeled by `perm` (`perm[y]` is the
    /// new symbol for old symbol `y`).
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<DiscreteMac> {
        if perm.len() != self.y_size {
            return Err(Error::SizeMismatch(perm.len(), self.y_size));
        }
        let mut kernel = vec![0.0; self.kernel.len()];
        for x1 in 0..self.x1_size {
            for x2 in 0..self.x2_size {
                for y in 0..self.y_size {
                    kernel[(x1 * self.x2_size + x2) * self.y_size + perm[y]] =
                        self.prob(x1, x2, y);
                }
            }
        }
        DiscreteMac::new(self.x1_size, self.x2_size, self.y_size, kernel)
    }

    /// A random channel with Dirichlet(1) rows, for test sweeps and demos.
    pub fn random<R: Rng>(x1_size: usize, x2_size: usize, y_size: usize, rng: &mut R) -> Self {
        let mut kernel = vec![0.0; x1_size * x2_size * y_size];
        for row in kernel.chunks_mut(y_size) {
            let mut sum = 0.0;
            for v in row.iter_mut() {
                // Exp(1) samples normalize to a uniform point on the simplex.
                let u: f64 = rng.random();
                *v = -(1.0 - u).ln();
                sum += *v;
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
        DiscreteMac::new(x1_size, x2_size, y_size, kernel).expect("rows are stochastic")
    }
}

/// The noiseless binary adder MAC: `Y = X1 + X2` with binary inputs and
/// ternary output.
pub fn binary_adder_mac() -> DiscreteMac {
    let mut kernel = vec![0.0; 2 * 2 * 3];
    for x1 in 0..2 {
        for x2 in 0..2 {
            kernel[(x1 * 2 + x2) * 3 + (x1 + x2)] = 1.0;
        }
    }
    DiscreteMac::new(2, 2, 3, kernel).expect("deterministic kernel is stochastic")
}

/// `size^n` with overflow and zero checks.
pub(crate) fn checked_pow(size: usize, n: usize) -> Result<usize> {
    let mut acc = 1usize;
    for _ in 0..n {
        acc = acc.checked_mul(size).ok_or(Error::TableTooLarge {
            required: usize::MAX,
            cap: DEFAULT_TABLE_CAP,
        })?;
    }
    Ok(acc)
}

/// Write the digits of `index` in base `size` into `out`, most significant
/// (earliest time step) first.
pub(crate) fn decode_sequence(index: usize, size: usize, out: &mut [usize]) {
    let mut rem = index;
    for slot in out.iter_mut().rev() {
        *slot = rem % size;
        rem /= size;
    }
}

/// CF link capacities in bits per channel use: input links `(c_in^1, c_in^2)`
/// and output links `(c_out^1, c_out^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfConfig {
    pub c_in: (f64, f64),
    pub c_out: (f64, f64),
}

impl CfConfig {
    pub fn new(c_in: (f64, f64), c_out: (f64, f64)) -> Result<Self> {
        for v in [c_in.0, c_in.1, c_out.0, c_out.1] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "CF link capacities must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { c_in, c_out })
    }
}

/// On-disk channel description: UTF-8 JSON with integer alphabet sizes and a
/// nested `kernel` array indexed `[x1][x2][y]`.
#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    x1_size: usize,
    x2_size: usize,
    y_size: usize,
    kernel: Vec<Vec<Vec<f64>>>,
}

/// Parse a channel from its JSON document. Parse errors keep serde's
/// line/column diagnostics; stochasticity is validated per the invariants.
pub fn mac_from_json(text: &str) -> Result<DiscreteMac> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::Io(format!("channel JSON: {e}")))?;
    if file.kernel.len() != file.x1_size {
        return Err(Error::Io(format!(
            "channel JSON: kernel has {} x1 rows, header says {}",
            file.kernel.len(),
            file.x1_size
        )));
    }
    let mut flat = Vec::with_capacity(file.x1_size * file.x2_size * file.y_size);
    for (x1, plane) in file.kernel.iter().enumerate() {
        if plane.len() != file.x2_size {
            return Err(Error::Io(format!(
                "channel JSON: kernel[{x1}] has {} x2 rows, header says {}",
                plane.len(),
                file.x2_size
            )));
        }
        for (x2, row) in plane.iter().enumerate() {
            if row.len() != file.y_size {
                return Err(Error::Io(format!(
                    "channel JSON: kernel[{x1}][{x2}] has {} outputs, header says {}",
                    row.len(),
                    file.y_size
                )));
            }
            flat.extend_from_slice(row);
        }
    }
    DiscreteMac::new(file.x1_size, file.x2_size, file.y_size, flat)
}

/// Serialize a channel to the JSON document format.
pub fn mac_to_json(mac: &DiscreteMac) -> String {
    let kernel: Vec<Vec<Vec<f64>>> = (0..mac.x1_size())
        .map(|x1| {
            (0..mac.x2_size())
                .map(|x2| mac.row(x1, x2).to_vec())
                .collect()
        })
        .collect();
    let file = ChannelFile {
        x1_size: mac.x1_size(),
        x2_size: mac.x2_size(),
        y_size: mac.y_size(),
        kernel,
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

/// Load a channel from a JSON file on disk.
pub fn load_mac(path: &std::path::Path) -> Result<DiscreteMac> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    mac_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_adder_kernel_values() {
        let mac = binary_adder_mac();
        assert_eq!(mac.prob(0, 1, 1), 1.0);
        assert_eq!(mac.prob(1, 1, 2), 1.0);
        assert_eq!(mac.prob(1, 0, 0), 0.0);
        for x1 in 0..2 {
            for x2 in 0..2 {
                let s: f64 = mac.row(x1, x2).iter().sum();
                assert!((s - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn first_extension_is_identity() {
        let mac = binary_adder_mac();
        let ext = mac.nth_extension(1).unwrap();
        assert_eq!(ext, mac);
    }

    #[test]
    fn second_extension_dimensions_and_rows() {
        let ext = binary_adder_mac().nth_extension(2).unwrap();
        assert_eq!(ext.x1_size(), 4);
        assert_eq!(ext.x2_size(), 4);
        assert_eq!(ext.y_size(), 9);
        for a in 0..4 {
            for b in 0..4 {
                let s: f64 = ext.row(a, b).iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "row ({a},{b}) sums to {s}");
            }
        }
    }

    #[test]
    fn second_extension_hand_entry() {
        // x1 = (0,1) -> index 1, x2 = (1,0) -> index 2, y = (1,1) -> index 4;
        // the entry is p(1|0,1) * p(1|1,0) = 1.
        let ext = binary_adder_mac().nth_extension(2).unwrap();
        assert_eq!(ext.prob(1, 2, 4), 1.0);
    }

    #[test]
    fn extension_respects_cap() {
        let mac = binary_adder_mac();
        match mac.nth_extension_with_cap(2, 10) {
            Err(Error::TableTooLarge { required, cap }) => {
                assert_eq!(required, 4 * 4 * 9);
                assert_eq!(cap, 10);
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let mac = binary_adder_mac();
        let text = mac_to_json(&mac);
        let back = mac_from_json(&text).unwrap();
        assert_eq!(mac, back);
    }

    #[test]
    fn json_rejects_non_stochastic_kernel() {
        let text = r#"{"x1_size":1,"x2_size":1,"y_size":2,"kernel":[[[0.7,0.7]]]}"#;
        assert!(mac_from_json(text).is_err());
    }

    #[test]
    fn json_parse_error_carries_location() {
        let err = mac_from_json("{ not json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "diagnostic missing location: {msg}");
    }

    #[test]
    fn output_dist_of_uniform_input_on_adder() {
        let mac = binary_adder_mac();
        let out = mac.output_dist(&[0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!((out.probs()[0] - 0.25).abs() < 1e-15);
        assert!((out.probs()[1] - 0.5).abs() < 1e-15);
        assert!((out.probs()[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cf_config_rejects_negative_links() {
        assert!(CfConfig::new((1.0, -0.5), (0.0, 0.0)).is_err());
        assert!(CfConfig::new((1.0, 2.0), (0.5, f64::INFINITY)).is_err());
        assert!(CfConfig::new((1.0, 2.0), (0.5, 0.0)).is_ok());
    }
}
