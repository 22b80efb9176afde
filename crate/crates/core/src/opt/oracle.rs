//! Brute-force verification oracle for σ_1 on tiny channels.
//!
//! Any law `p(u, x1, x2)` with a two-point auxiliary alphabet is a mixture
//! of two conditionals `p(x1, x2 | u)`, and both functionals are affine in
//! the mixture weight. σ_1(δ) therefore equals the upper concave envelope of
//! the point cloud `{(I(X1;X2), I(X1,X2;Y)) : p(x1,x2)}` evaluated at δ. The
//! oracle samples the joint simplex on a regular grid, adds exact product
//! laws from the two marginal grids (dependence exactly zero), and evaluates
//! the envelope. Every envelope value is achieved by a feasible two-point
//! mixture, so the oracle is a true lower bound on σ_1(δ).

use crate::channel::DiscreteMac;
use crate::error::{Error, Result};
use crate::pmf::entropy_of_slice;

/// Largest number of grid points the oracle will enumerate.
const MAX_GRID_POINTS: usize = 20_000_000;

/// Exhaustive lower bound for σ_1(δ) on a regular simplex grid with
/// `grid_resolution` steps per dimension. Restricted to channels with at
/// most 9 input pairs; intended for tests.
pub fn brute_force_oracle(mac: &DiscreteMac, delta: f64, grid_resolution: usize) -> Result<f64> {
    let k = mac.x1_size() * mac.x2_size();
    if k > 9 {
        return Err(Error::TableTooLarge { required: k, cap: 9 });
    }
    if grid_resolution == 0 {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!(
            "constraint level must be nonnegative, got {delta}"
        )));
    }
    let joint_points = compositions_count(grid_resolution, k);
    let product_points = compositions_count(grid_resolution, mac.x1_size())
        .saturating_mul(compositions_count(grid_resolution, mac.x2_size()));
    if joint_points.saturating_add(product_points) > MAX_GRID_POINTS {
        return Err(Error::TableTooLarge {
            required: joint_points.saturating_add(product_points),
            cap: MAX_GRID_POINTS,
        });
    }

    let scorer = Scorer::new(mac);
    let mut points: Vec<(f64, f64)> =
        Vec::with_capacity(joint_points + product_points);

    let mut table = vec![0.0; k];
    for_each_composition(grid_resolution, k, &mut |counts| {
        for (slot, &c) in table.iter_mut().zip(counts) {
            *slot = c as f64 / grid_resolution as f64;
        }
        points.push((scorer.dependence(&table), scorer.transmission(&table)));
    });

    // Product laws from the marginal grids: dependence is zero by
    // construction, recorded as exactly 0.0 so δ = 0 stays reachable.
    let mut m1_grid: Vec<Vec<f64>> = Vec::new();
    for_each_composition(grid_resolution, mac.x1_size(), &mut |counts| {
        m1_grid.push(
            counts
                .iter()
                .map(|&c| c as f64 / grid_resolution as f64)
                .collect(),
        );
    });
    let mut m2 = vec![0.0; mac.x2_size()];
    for_each_composition(grid_resolution, mac.x2_size(), &mut |counts| {
        for (slot, &c) in m2.iter_mut().zip(counts) {
            *slot = c as f64 / grid_resolution as f64;
        }
        for m1 in &m1_grid {
            for (a, &w1) in m1.iter().enumerate() {
                for (b, &w2) in m2.iter().enumerate() {
                    table[a * mac.x2_size() + b] = w1 * w2;
                }
            }
            points.push((0.0, scorer.transmission(&table)));
        }
    });

    Ok(envelope_at(points, delta))
}

/// Documented bound on `σ_1(δ) − brute_force_oracle(δ)` for the given grid.
///
/// Two valid routes, the smaller wins:
///
/// 1. Round each conditional of an optimal two-branch law to the joint grid
///    (L1 radius `ε = 2k/res`). The objective moves by at most
///    `μ_obj(ε) = ε log2(|Y|/ε) + ε log2 |Y|` and the dependence by at most
///    `μ_con(ε)` (three entropy terms); feasibility is repaired by mixing
///    with the best product point, costing another
///    `log2|Y| · μ_con / (δ + μ_con)`.
/// 2. The oracle at δ is at least its value at 0, which is within
///    `μ_obj(ε₁+ε₂)` of σ_1(0) via the product grids, and
///    σ_1(δ) ≤ σ_1(0) + modulus(δ).
///
/// Both use the L1 bound on entropy, valid for ε ≤ 1/2; otherwise the
/// trivial range bound `log2 |Y|` applies.
pub fn grid_error_bound(mac: &DiscreteMac, delta: f64, grid_resolution: usize) -> f64 {
    let y = mac.y_size() as f64;
    let range = y.log2();
    let res = grid_resolution as f64;
    let k = (mac.x1_size() * mac.x2_size()) as f64;

    let mu_obj = |eps: f64| eps * (y / eps).log2() + eps * y.log2();
    let mu_con = |eps: f64| {
        eps * (mac.x1_size() as f64 / eps).log2()
            + eps * (mac.x2_size() as f64 / eps).log2()
            + eps * (k / eps).log2()
    };

    let eps_joint = 2.0 * k / res;
    let path1 = if eps_joint <= 0.5 {
        let repair = if delta > 0.0 {
            range * (mu_con(eps_joint) / (delta + mu_con(eps_joint)))
        } else {
            range
        };
        mu_obj(eps_joint) + repair
    } else {
        range
    };

    let eps_prod = 2.0 * (mac.x1_size() + mac.x2_size()) as f64 / res;
    let modulus = if delta == 0.0 {
        Some(0.0)
    } else {
        crate::bounds::sigma1_modulus(mac, delta).ok()
    };
    let path2 = match (eps_prod <= 0.5, modulus) {
        (true, Some(m)) => mu_obj(eps_prod) + m,
        _ => range,
    };

    path1.min(path2).min(range)
}

struct Scorer<'a> {
    mac: &'a DiscreteMac,
    row_entropy: Vec<f64>,
}

impl<'a> Scorer<'a> {
    fn new(mac: &'a DiscreteMac) -> Self {
        let y = mac.y_size();
        let row_entropy = (0..mac.x1_size() * mac.x2_size())
            .map(|pair| entropy_of_slice(&mac.kernel()[pair * y..(pair + 1) * y]))
            .collect();
        Self { mac, row_entropy }
    }

    /// I(X1, X2; Y) of a joint input law, via output and row entropies.
    fn transmission(&self, table: &[f64]) -> f64 {
        let y_size = self.mac.y_size();
        let mut q = vec![0.0; y_size];
        let mut h_rows = 0.0;
        for (pair, &w) in table.iter().enumerate() {
            if w > 0.0 {
                h_rows += w * self.row_entropy[pair];
                let row = &self.mac.kernel()[pair * y_size..(pair + 1) * y_size];
                for (slot, &ky) in q.iter_mut().zip(row) {
                    *slot += w * ky;
                }
            }
        }
        (entropy_of_slice(&q) - h_rows).max(0.0)
    }

    /// I(X1; X2) of a joint input law, via the entropy identity.
    fn dependence(&self, table: &[f64]) -> f64 {
        let b_size = self.mac.x2_size();
        let mut m1 = vec![0.0; self.mac.x1_size()];
        let mut m2 = vec![0.0; b_size];
        for (pair, &w) in table.iter().enumerate() {
            m1[pair / b_size] += w;
            m2[pair % b_size] += w;
        }
        (entropy_of_slice(&m1) + entropy_of_slice(&m2) - entropy_of_slice(table)).max(0.0)
    }
}

/// Upper concave envelope of the point cloud, evaluated at `delta` under the
/// constraint `x ≤ delta`.
fn envelope_at(mut points: Vec<(f64, f64)>, delta: f64) -> f64 {
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    points.dedup_by(|next, kept| {
        if next.0 == kept.0 {
            kept.1 = kept.1.max(next.1);
            true
        } else {
            false
        }
    });
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..hull.len() {
        let (x, yv) = hull[i];
        if x <= delta {
            best = best.max(yv);
            if let Some(&(xn, yn)) = hull.get(i + 1) {
                if xn > delta {
                    best = best.max(yv + (yn - yv) * (delta - x) / (xn - x));
                }
            }
        }
    }
    best.max(0.0)
}

/// Visit every way of writing `total` as an ordered sum of `parts`
/// nonnegative integers.
fn for_each_composition(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn recurse(
        buf: &mut Vec<usize>,
        remaining: usize,
        parts_left: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if parts_left == 1 {
            buf.push(remaining);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=remaining {
            buf.push(v);
            recurse(buf, remaining - v, parts_left - 1, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(parts);
    recurse(&mut buf, total, parts, f);
}

/// `C(total + parts - 1, parts - 1)`, saturating.
fn compositions_count(total: usize, parts: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..parts - 1 {
        acc = acc.saturating_mul((total + i + 1) as u128) / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::binary_adder_mac;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions_count(4, 1), 1);
        assert_eq!(compositions_count(4, 2), 5);
        assert_eq!(compositions_count(2, 3), 6);
    }

    #[test]
    fn composition_enumeration_sums() {
        let mut seen = 0;
        for_each_composition(3, 3, &mut |c| {
            assert_eq!(c.iter().sum::<usize>(), 3);
            seen += 1;
        });
        assert_eq!(seen, compositions_count(3, 3));
    }

    #[test]
    fn oracle_at_zero_on_binary_adder() {
        let v = brute_force_oracle(&binary_adder_mac(), 0.0, 64).unwrap();
        assert!((v - 1.5).abs() < 0.02, "got {v}");
    }

    #[test]
    fn oracle_with_loose_constraint_reaches_joint_max() {
        let v = brute_force_oracle(&binary_adder_mac(), 2.0, 64).unwrap();
        assert!((v - 3.0_f64.log2()).abs() < 0.02, "got {v}");
    }

    #[test]
    fn oracle_is_monotone_under_grid_refinement() {
        let mac = binary_adder_mac();
        for delta in [0.0, 0.02, 0.1] {
            let coarse = brute_force_oracle(&mac, delta, 32).unwrap();
            let fine = brute_force_oracle(&mac, delta, 64).unwrap();
            assert!(
                fine >= coarse - 1e-12,
                "refinement lost value at delta {delta}: {coarse} -> {fine}"
            );
        }
    }

    #[test]
    fn oracle_rejects_large_channels() {
        let mac = DiscreteMac::new(4, 4, 2, vec![0.5; 32]).unwrap();
        assert!(brute_force_oracle(&mac, 0.1, 8).is_err());
    }

    #[test]
    fn envelope_interpolates_between_points() {
        let points = vec![(0.0, 1.0), (1.0, 3.0)];
        let v = envelope_at(points, 0.5);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_plateaus_past_the_peak() {
        let points = vec![(0.0, 1.0), (0.5, 3.0), (1.0, 2.0)];
        assert!((envelope_at(points.clone(), 0.75) - 3.0).abs() < 1e-12);
        assert!((envelope_at(points, 2.0) - 3.0).abs() < 1e-12);
    }
}
