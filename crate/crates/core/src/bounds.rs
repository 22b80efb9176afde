//! Closed-form bounds: the sum-capacity sandwich, the single-letter upper
//! bound on the multi-letter σ limit, the explicit continuity modulus of
//! σ_1, the input-link continuity bound, the concave-difference bound,
//! forwarding bounds, and the strict-gain class membership test.

use serde::{Deserialize, Serialize};

use crate::channel::DiscreteMac;
use crate::error::{Error, Result};
use crate::joint::JointInputDist;
use crate::opt::{max_mi_independent, sigma1, OptimizerConfig};
use crate::pmf::{entropy_of_slice, Pmf};
use crate::simplex::maximize_on_simplex;

const LN_2: f64 = std::f64::consts::LN_2;

/// A sampled `(parameter, lower, upper)` sweep for CSV emission.
///
/// Invariants (checked at construction): `lower ≤ upper + 1e-7` at every
/// sample and strictly increasing parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCurve {
    pub parameter_name: String,
    pub channel_id: String,
    pub samples: Vec<BoundSample>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundSample {
    pub parameter: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BoundCurve {
    pub fn new(
        parameter_name: impl Into<String>,
        channel_id: impl Into<String>,
        samples: Vec<BoundSample>,
    ) -> Result<Self> {
        for pair in samples.windows(2) {
            if pair[1].parameter <= pair[0].parameter {
                return Err(Error::Domain(format!(
                    "parameters must be strictly increasing: {} then {}",
                    pair[0].parameter, pair[1].parameter
                )));
            }
        }
        for s in &samples {
            if s.lower > s.upper + 1e-7 {
                return Err(Error::Domain(format!(
                    "lower bound {} exceeds upper bound {} at parameter {}",
                    s.lower, s.upper, s.parameter
                )));
            }
        }
        Ok(Self {
            parameter_name: parameter_name.into(),
            channel_id: channel_id.into(),
            samples,
        })
    }

    /// CSV with header `parameter,lower,upper` and 9-significant-digit
    /// values, locale independent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,lower,upper\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                format_sig9(s.parameter),
                format_sig9(s.lower),
                format_sig9(s.upper)
            ));
        }
        out
    }
}

/// Format with 9 significant digits and a `.` decimal separator, falling
/// back to scientific notation outside a sane positional range.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-12..=14).contains(&exponent) {
        return format!("{:.8e}", x);
    }
    let decimals = (8 - exponent).clamp(0, 20) as usize;
    format!("{:.*}", decimals, x)
}

/// Lower bound on the sum-capacity with a fully informed facilitator:
/// `σ_1(c_out^1 + c_out^2) − min(c_out^1, c_out^2)`, clamped below by
/// `σ_1(0)` since zero cooperation is always available. Substituting σ_1
/// for the multi-letter limit keeps the bound valid (σ_1 ≤ σ).
pub fn csum_lower(mac: &DiscreteMac, c_out: (f64, f64), cfg: &OptimizerConfig) -> Result<f64> {
    validate_links(c_out)?;
    let delta = c_out.0 + c_out.1;
    let at_delta = sigma1(mac, delta, cfg)?.value;
    let at_zero = sigma1(mac, 0.0, cfg)?.value;
    Ok((at_delta - c_out.0.min(c_out.1)).max(at_zero))
}

/// Upper bound on the sum-capacity with a fully informed facilitator:
/// minimum over the ε grid (augmented with ε = δ) of
/// `(δ/ε) log2(|X1||X2|) + σ_1(ε)`, with `δ = c_out^1 + c_out^2`. This is
/// the single-letter bound on the multi-letter σ limit.
pub fn csum_upper(
    mac: &DiscreteMac,
    c_out: (f64, f64),
    epsilon_grid: &[f64],
    cfg: &OptimizerConfig,
) -> Result<f64> {
    validate_links(c_out)?;
    if epsilon_grid.is_empty() {
        return Err(Error::Domain("epsilon grid must be nonempty".into()));
    }
    if epsilon_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("epsilon grid entries must be positive".into()));
    }
    let delta = c_out.0 + c_out.1;
    let log_inputs = ((mac.x1_size() * mac.x2_size()) as f64).log2();
    let mut grid: Vec<f64> = epsilon_grid.to_vec();
    if delta > 0.0 && !grid.contains(&delta) {
        grid.push(delta);
    }
    let mut best = f64::INFINITY;
    for &epsilon in &grid {
        let value = (delta / epsilon) * log_inputs + sigma1(mac, epsilon, cfg)?.value;
        best = best.min(value);
    }
    Ok(best)
}

/// Explicit continuity modulus of σ_1 at small δ:
/// `M(δ) = √(2δ ln 2) · log2(|Y|³ / √(2δ ln 2)) + log2|Y| · √(2δ ln 2)`,
/// valid while `√(2δ ln 2) < |Y|/e` (the regime where `t ↦ −t log(t/|Y|)`
/// is increasing). Then `σ_1(δ) ≤ σ_1(0) + M(δ)` and `M(δ) → 0` as `δ → 0`.
pub fn sigma1_modulus(mac: &DiscreteMac, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "modulus is defined for positive δ, got {delta}"
        )));
    }
    let y = mac.y_size() as f64;
    let t = (2.0 * delta * LN_2).sqrt();
    let t_max = y / std::f64::consts::E;
    if t >= t_max {
        let delta_max = t_max * t_max / (2.0 * LN_2);
        return Err(Error::Domain(format!(
            "δ = {delta} outside the monotonicity regime: requires \
             √(2δ ln 2) < |Y|/e, i.e. δ < {delta_max}"
        )));
    }
    Ok(t * (y.powi(3) / t).log2() + y.log2() * t)
}

/// Continuity bound for the sum-capacity in the input-link capacities:
/// with componentwise minima/maxima of the two pairs and
/// `λ* = min_i lo_i / hi_i` (components with `hi_i = 0` are skipped; if both
/// are zero, `λ* = 1`, keeping λ* continuous), the sum-capacity difference
/// is at most `Δ = (1−λ*)(c¹+c²) + (1−λ*)(c̃¹+c̃²)`.
pub fn cin_delta_bound(c_in: (f64, f64), c_in_tilde: (f64, f64)) -> f64 {
    let pairs = [
        (c_in.0.min(c_in_tilde.0), c_in.0.max(c_in_tilde.0)),
        (c_in.1.min(c_in_tilde.1), c_in.1.max(c_in_tilde.1)),
    ];
    let mut lambda = 1.0f64;
    for (lo, hi) in pairs {
        if hi > 0.0 {
            lambda = lambda.min(lo / hi);
        }
    }
    (1.0 - lambda) * (c_in.0 + c_in.1) + (1.0 - lambda) * (c_in_tilde.0 + c_in_tilde.1)
}

/// For a nondecreasing concave `f` with `|x − y| ≤ min(x, y)`, the
/// difference `|f(x) − f(y)|` is at most `f(|x − y|) − f(0)`; returns that
/// bound.
pub fn concave_diff_bound<F: Fn(f64) -> f64>(f: F, x: f64, y: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 {
        return Err(Error::Domain(format!(
            "arguments must be nonnegative, got ({x}, {y})"
        )));
    }
    let gap = (x - y).abs();
    if gap > x.min(y) {
        return Err(Error::Domain(format!(
            "|x − y| = {gap} exceeds min(x, y) = {}",
            x.min(y)
        )));
    }
    Ok(f(gap) - f(0.0))
}

/// Upper bounds on the cooperation gain under pure forwarding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ForwardingBounds {
    /// Gain bound from the input links (`2 C_in` for equal links).
    pub in_gain_bound: f64,
    /// Gain bound under partial forwarding (`2 C_out` for equal links).
    pub out_gain_bound: f64,
    /// True when a pair was unequal and the componentwise sum is used as
    /// the stated generalization of the equal-link bounds.
    pub asymmetric_generalization: bool,
}

/// Forwarding gain bounds: `2 C_in` and `2 C_out` for equal links, the
/// componentwise sums for unequal links (flagged).
pub fn forwarding_bounds(c_in: (f64, f64), c_out: (f64, f64)) -> ForwardingBounds {
    ForwardingBounds {
        in_gain_bound: c_in.0 + c_in.1,
        out_gain_bound: c_out.0 + c_out.1,
        asymmetric_generalization: c_in.0 != c_in.1 || c_out.0 != c_out.1,
    }
}

/// Verdict of the strict-gain class test.
///
/// Membership means: against the best product law found (`p_ind`), some
/// dependent law supported inside its support satisfies
/// `I(X1,X2;Y) + D(p_dep(y) ‖ p_ind(y)) > I_ind` strictly. A `false`
/// verdict means no witness was found against this maximizer, not a
/// disproof: the test quantifies over the particular `p_ind` returned.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CstarVerdict {
    pub is_member: bool,
    pub p_ind: (Pmf, Pmf),
    pub p_dep: Option<JointInputDist>,
    /// Best found value of the gain functional minus `I_ind`, in bits.
    pub margin: f64,
}

/// Strictness tolerance separating a true margin from optimizer noise.
const CSTAR_STRICTNESS: f64 = 1e-6;

/// Test whether the channel admits a dependent input law, supported inside
/// the independent maximizer's support, whose mutual information plus output
/// divergence strictly beats the independent maximum.
pub fn cstar_test(mac: &DiscreteMac, cfg: &OptimizerConfig) -> Result<CstarVerdict> {
    let independent = max_mi_independent(mac, cfg)?;
    let a_size = mac.x1_size();
    let b_size = mac.x2_size();
    let product = independent.argmax.probs();
    let mut m1 = vec![0.0; a_size];
    let mut m2 = vec![0.0; b_size];
    for a in 0..a_size {
        for b in 0..b_size {
            let w = product[a * b_size + b];
            m1[a] += w;
            m2[b] += w;
        }
    }
    let support_1: Vec<usize> = (0..a_size).filter(|&a| m1[a] > 1e-9).collect();
    let support_2: Vec<usize> = (0..b_size).filter(|&b| m2[b] > 1e-9).collect();
    let cells: Vec<usize> = support_1
        .iter()
        .flat_map(|&a| support_2.iter().map(move |&b| a * b_size + b))
        .collect();

    let q_ind = mac.output_dist(product)?.probs().to_vec();
    let y_size = mac.y_size();
    let row_entropy: Vec<f64> = (0..a_size * b_size)
        .map(|pair| entropy_of_slice(&mac.kernel()[pair * y_size..(pair + 1) * y_size]))
        .collect();

    // Gain functional G(p) = I(X1,X2;Y) + D(p(y) ‖ p_ind(y)) on laws
    // restricted to the product support; the support containment keeps the
    // divergence finite.
    let expand = |restricted: &[f64]| {
        let mut full = vec![0.0; a_size * b_size];
        for (&cell, &w) in cells.iter().zip(restricted) {
            full[cell] = w;
        }
        full
    };
    let gain = |restricted: &[f64]| -> f64 {
        let full = expand(restricted);
        let mut q = vec![0.0; y_size];
        let mut h_rows = 0.0;
        for (pair, &w) in full.iter().enumerate() {
            if w > 0.0 {
                h_rows += w * row_entropy[pair];
                let row = &mac.kernel()[pair * y_size..(pair + 1) * y_size];
                for (slot, &ky) in q.iter_mut().zip(row) {
                    *slot += w * ky;
                }
            }
        }
        let mi = entropy_of_slice(&q) - h_rows;
        let mut divergence = 0.0;
        for (&qy, &ry) in q.iter().zip(&q_ind) {
            if qy > 0.0 {
                divergence += qy * (qy / ry.max(1e-300)).log2();
            }
        }
        mi + divergence
    };
    let gain_grad = |restricted: &[f64], g: &mut [f64]| {
        // The two ∂-terms through the output law cancel, leaving the
        // constant per-cell score D(W(·|x1,x2) ‖ p_ind(y)).
        let _ = restricted;
        for (slot, &cell) in g.iter_mut().zip(&cells) {
            let row = &mac.kernel()[cell * y_size..(cell + 1) * y_size];
            let mut score = 0.0;
            for (&ky, &ry) in row.iter().zip(&q_ind) {
                if ky > 0.0 {
                    score += ky * (ky / ry.max(1e-300)).log2();
                }
            }
            *slot = score;
        }
    };

    let dims = cells.len();
    let starts: Vec<Vec<f64>> = (0..cfg.restarts.max(1))
        .map(|i| {
            if i == 0 {
                vec![1.0 / dims as f64; dims]
            } else {
                let mut rng = cfg.restart_rng(2000 + i);
                crate::opt::random_simplex(dims, &mut rng)
            }
        })
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let res = maximize_on_simplex(gain, gain_grad, start, cfg.max_iterations, cfg.tolerance);
        if best.as_ref().is_none_or(|(_, v)| res.value > *v) {
            best = Some((res.x, res.value));
        }
    }
    let (restricted, g_max) = best.expect("at least one start");
    let margin = g_max - independent.value;
    let is_member = margin > CSTAR_STRICTNESS;
    let p_dep = if is_member {
        Some(JointInputDist::new(
            1,
            1,
            a_size,
            b_size,
            expand(&restricted),
        )?)
    } else {
        None
    };
    Ok(CstarVerdict {
        is_member,
        p_ind: (Pmf::new(m1)?, Pmf::new(m2)?),
        p_dep,
        margin,
    })
}

fn validate_links(c_out: (f64, f64)) -> Result<()> {
    if !(c_out.0 >= 0.0 && c_out.1 >= 0.0 && c_out.0.is_finite() && c_out.1.is_finite()) {
        return Err(Error::Domain(format!(
            "output link capacities must be finite and nonnegative, got {c_out:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::binary_adder_mac;

    fn quick_cfg() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::default()
        }
    }

    fn useless_mac() -> DiscreteMac {
        DiscreteMac::new(2, 2, 2, vec![0.5; 8]).unwrap()
    }

    #[test]
    fn lower_bound_without_cooperation_is_sigma1_at_zero() {
        let v = csum_lower(&binary_adder_mac(), (0.0, 0.0), &quick_cfg()).unwrap();
        assert!((v - 1.5).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn lower_bound_with_one_sided_link_reaches_joint_max() {
        let v = csum_lower(&binary_adder_mac(), (0.0, 5.0), &quick_cfg()).unwrap();
        assert!((v - 3.0_f64.log2()).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn small_symmetric_links_beat_no_cooperation() {
        let v = csum_lower(&binary_adder_mac(), (0.01, 0.01), &quick_cfg()).unwrap();
        assert!(v > 1.5, "got {v}");
    }

    #[test]
    fn upper_bound_at_zero_cooperation_takes_grid_minimum() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        let v = csum_upper(&mac, (0.0, 0.0), &[0.01, 0.1, 0.5], &cfg).unwrap();
        let smallest = sigma1(&mac, 0.01, &cfg).unwrap().value;
        assert!((v - smallest).abs() < 1e-9, "{v} vs {smallest}");
    }

    #[test]
    fn sandwich_holds_on_binary_adder() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        for h in [0.0, 0.01, 0.05] {
            let lower = csum_lower(&mac, (h, h), &cfg).unwrap();
            let upper = csum_upper(&mac, (h, h), &[0.02, 0.1, 0.5], &cfg).unwrap();
            assert!(lower <= upper + 1e-7, "h = {h}: {lower} > {upper}");
        }
    }

    #[test]
    fn upper_bound_rejects_bad_grids() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        assert!(csum_upper(&mac, (0.1, 0.1), &[], &cfg).is_err());
        assert!(csum_upper(&mac, (0.1, 0.1), &[0.0], &cfg).is_err());
    }

    #[test]
    fn modulus_shrinks_toward_zero() {
        let mac = binary_adder_mac();
        let tiny = sigma1_modulus(&mac, 1e-12).unwrap();
        assert!(tiny < 1e-4, "got {tiny}");
        // Direct evaluation of the closed form at δ = 1e-8, |Y| = 3.
        let m = sigma1_modulus(&mac, 1e-8).unwrap();
        let t = (2.0e-8 * LN_2).sqrt();
        let want = t * (27.0 / t).log2() + 3.0_f64.log2() * t;
        assert!((m - want).abs() < 1e-15);
        assert!(m < 3e-3, "got {m}");
    }

    #[test]
    fn modulus_is_increasing_on_small_deltas() {
        let mac = binary_adder_mac();
        let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.005).collect();
        let mut last = 0.0;
        for &d in &grid {
            let m = sigma1_modulus(&mac, d).unwrap();
            assert!(m > last, "not increasing at δ = {d}");
            last = m;
        }
    }

    #[test]
    fn modulus_regime_is_enforced() {
        let mac = binary_adder_mac();
        assert!(sigma1_modulus(&mac, 0.0).is_err());
        // |Y| = 3: the regime ends at δ = (3/e)²/(2 ln 2) ≈ 0.8785.
        assert!(sigma1_modulus(&mac, 0.9).is_err());
        assert!(sigma1_modulus(&mac, 0.85).is_ok());
    }

    #[test]
    fn delta_bound_hand_value() {
        let d = cin_delta_bound((1.0, 2.0), (2.0, 4.0));
        assert!((d - 4.5).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn delta_bound_degenerate_cases() {
        assert_eq!(cin_delta_bound((1.0, 2.0), (1.0, 2.0)), 0.0);
        assert_eq!(cin_delta_bound((0.0, 0.0), (0.0, 0.0)), 0.0);
        let a = (0.7, 1.3);
        let b = (1.9, 0.4);
        assert_eq!(cin_delta_bound(a, b), cin_delta_bound(b, a));
        assert!(cin_delta_bound(a, b) > 0.0);
    }

    #[test]
    fn concave_bound_on_square_root() {
        let sqrt = |x: f64| x.sqrt();
        assert_eq!(concave_diff_bound(sqrt, 1.0, 1.0).unwrap(), 0.0);
        let bound = concave_diff_bound(sqrt, 2.0, 1.0).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
        assert!((2.0_f64.sqrt() - 1.0).abs() <= bound);
        assert!(concave_diff_bound(sqrt, 3.0, 1.0).is_err());
    }

    #[test]
    fn forwarding_bound_values() {
        let fb = forwarding_bounds((1.0, 1.0), (0.5, 0.5));
        assert_eq!(fb.in_gain_bound, 2.0);
        assert_eq!(fb.out_gain_bound, 1.0);
        assert!(!fb.asymmetric_generalization);
        let fb = forwarding_bounds((1.0, 3.0), (0.0, 0.0));
        assert_eq!(fb.in_gain_bound, 4.0);
        assert_eq!(fb.out_gain_bound, 0.0);
        assert!(fb.asymmetric_generalization);
    }

    #[test]
    fn binary_adder_is_in_the_strict_gain_class() {
        let verdict = cstar_test(&binary_adder_mac(), &quick_cfg()).unwrap();
        assert!(verdict.is_member);
        assert!(verdict.margin > 0.4, "margin {}", verdict.margin);
        let dep = verdict.p_dep.expect("witness present");
        // Witness support inside the product support (full here).
        let total: f64 = dep.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn useless_channel_is_not_a_member() {
        let verdict = cstar_test(&useless_mac(), &quick_cfg()).unwrap();
        assert!(!verdict.is_member);
        assert!(verdict.margin.abs() < 1e-6);
        assert!(verdict.p_dep.is_none());
    }

    #[test]
    fn verdict_matches_vertex_oracle_on_copy_channel() {
        // y = x1: the gain functional is linear, so its maximum over laws on
        // the product support is the best single input pair.
        let mut kernel = vec![0.0; 2 * 2 * 2];
        for x1 in 0..2 {
            for x2 in 0..2 {
                kernel[(x1 * 2 + x2) * 2 + x1] = 1.0;
            }
        }
        let mac = DiscreteMac::new(2, 2, 2, kernel).unwrap();
        let cfg = quick_cfg();
        let verdict = cstar_test(&mac, &cfg).unwrap();
        let ind = max_mi_independent(&mac, &cfg).unwrap();
        let q_ind = mac.output_dist(ind.argmax.probs()).unwrap();
        let mut vertex_best = f64::NEG_INFINITY;
        for pair in 0..4 {
            let mut score = 0.0;
            for y in 0..2 {
                let ky = mac.kernel()[pair * 2 + y];
                if ky > 0.0 {
                    score += ky * (ky / q_ind.probs()[y]).log2();
                }
            }
            vertex_best = vertex_best.max(score);
        }
        assert!(
            (verdict.margin - (vertex_best - ind.value)).abs() < 1e-6,
            "margin {} vs oracle {}",
            verdict.margin,
            vertex_best - ind.value
        );
        assert!(!verdict.is_member);
    }

    #[test]
    fn formatting_has_nine_significant_digits() {
        assert_eq!(format_sig9(1.5), "1.50000000");
        assert_eq!(format_sig9(0.0), "0.00000000");
        assert_eq!(format_sig9(0.00001), "0.0000100000000");
        assert_eq!(format_sig9(123456789.5), "123456790");
        assert_eq!(format_sig9(-2.5), "-2.50000000");
        assert_eq!(format_sig9(1e-20), "1.00000000e-20");
    }

    #[test]
    fn bound_curve_validates_and_renders() {
        let samples = vec![
            BoundSample {
                parameter: 0.0,
                lower: 1.0,
                upper: 1.2,
            },
            BoundSample {
                parameter: 0.5,
                lower: 1.1,
                upper: 1.4,
            },
        ];
        let curve = BoundCurve::new("h", "adder", samples.clone()).unwrap();
        let csv = curve.to_csv();
        assert!(csv.starts_with("parameter,lower,upper\n"));
        assert!(csv.contains("0.500000000,1.10000000,1.40000000"));

        let mut bad = samples.clone();
        bad[1].parameter = 0.0;
        assert!(BoundCurve::new("h", "adder", bad).is_err());
        let mut crossed = samples;
        crossed[0].lower = 2.0;
        assert!(BoundCurve::new("h", "adder", crossed).is_err());
    }
}
