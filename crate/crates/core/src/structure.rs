//! Constructive building blocks behind the σ machinery: greedy coordinate
//! decomposition of a dependence budget, exact auxiliary-alphabet reduction,
//! and the concatenation / time-sharing constructions on joint laws.

use serde::{Deserialize, Serialize};

use crate::channel::DiscreteMac;
use crate::error::{Error, Result};
use crate::joint::{conditional_mutual_information, JointInputDist};
use crate::pmf::Pmf;

/// Outcome of [`dueck_decompose`]: a coordinate set `T` such that outside
/// `T`, every per-letter conditional dependence falls below the threshold.
///
/// `residual_mi[i]` is `I(X1_t; X2_t | U, X1^T, X2^T)` for the `i`-th
/// coordinate `t ∉ T` in ascending order. `delta_effective` is
/// `I(X1^n; X2^n | U) / n` at the input, so `|T| ≤ n·delta_effective / ε`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DueckResult {
    pub t_set: Vec<usize>,
    pub residual_mi: Vec<f64>,
    pub delta_effective: f64,
}

impl DueckResult {
    /// Recompute both certificate bounds directly from the distribution,
    /// independently of however `t_set` was produced.
    pub fn verify(&self, dist: &JointInputDist, epsilon: f64) -> Result<()> {
        let n = dist.n() as f64;
        let budget = dist.dependence();
        if self.t_set.len() as f64 > budget / epsilon + 1e-9 {
            return Err(Error::Internal(format!(
                "|T| = {} exceeds n·δ/ε = {}",
                self.t_set.len(),
                budget / epsilon
            )));
        }
        if (self.delta_effective - budget / n).abs() > 1e-9 {
            return Err(Error::Internal("stored delta_effective drifted".into()));
        }
        for t in 0..dist.n() {
            if self.t_set.contains(&t) {
                continue;
            }
            let residual = dist.per_letter_dependence_given(t, &self.t_set)?;
            if residual > epsilon + 1e-9 {
                return Err(Error::Internal(format!(
                    "coordinate {t} keeps dependence {residual} > ε = {epsilon}"
                )));
            }
        }
        Ok(())
    }
}

/// Greedy coordinate extraction: repeatedly adjoin the smallest coordinate
/// whose conditional per-letter dependence still exceeds `epsilon`, until
/// none remains. Terminates within `n` rounds; the returned set satisfies
/// `|T| ≤ I(X1^n;X2^n|U) / ε` and every residual is at most `ε`.
pub fn dueck_decompose(dist: &JointInputDist, epsilon: f64) -> Result<DueckResult> {
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "threshold must be positive, got {epsilon}"
        )));
    }
    let n = dist.n();
    let mut t_set: Vec<usize> = Vec::new();
    loop {
        let mut violator = None;
        for t in 0..n {
            if t_set.contains(&t) {
                continue;
            }
            if dist.per_letter_dependence_given(t, &t_set)? > epsilon {
                violator = Some(t);
                break;
            }
        }
        match violator {
            Some(t) => t_set.push(t),
            None => break,
        }
        if t_set.len() == n {
            break;
        }
    }
    t_set.sort_unstable();
    let mut residual_mi = Vec::with_capacity(n - t_set.len());
    for t in 0..n {
        if !t_set.contains(&t) {
            residual_mi.push(dist.per_letter_dependence_given(t, &t_set)?);
        }
    }
    let delta_effective = dist.dependence() / n as f64;
    Ok(DueckResult {
        t_set,
        residual_mi,
        delta_effective,
    })
}

/// Auxiliary weights reduced to at most two support points.
///
/// `constraint_value` equals `Σ_u q(u) I(X1;X2|U=u)` at the reduced weights
/// and matches the input's dependence; `objective_value` never falls below
/// the objective at the original weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CardinalityReduction {
    pub q_star: Pmf,
    pub support: Vec<usize>,
    pub objective_value: f64,
    pub constraint_value: f64,
}

/// Replace the auxiliary weights of a blocklength-1 law by an extreme point
/// of the weight polytope: among all weight vectors with the same per-letter
/// dependence mix, maximize the transmission mix.
///
/// With two equality constraints (total mass and dependence mix), extreme
/// points have at most two nonzero components, so enumerating singleton and
/// pair supports solves the program exactly; for a pair the two equalities
/// fix the weights uniquely. Degenerate pairs with equal dependence scores
/// collapse to their endpoints, which the singleton pass already covers.
pub fn reduce_cardinality(
    p_star: &JointInputDist,
    mac: &DiscreteMac,
) -> Result<CardinalityReduction> {
    if p_star.n() != 1 {
        return Err(Error::Domain(
            "cardinality reduction is defined for blocklength 1".into(),
        ));
    }
    if p_star.x1_size() != mac.x1_size() || p_star.x2_size() != mac.x2_size() {
        return Err(Error::SizeMismatch(
            p_star.x1_size() * p_star.x2_size(),
            mac.x1_size() * mac.x2_size(),
        ));
    }
    let u_size = p_star.u_size();
    let weights = p_star.u_weights();
    let a = p_star.a_size();
    let b = p_star.b_size();

    // Per-branch scores; branches without mass cannot be reused because
    // their conditional laws are undefined.
    let mut dependence = vec![f64::NAN; u_size];
    let mut objective = vec![f64::NAN; u_size];
    for u in 0..u_size {
        if let Some(cond) = p_star.conditional_given_u(u) {
            dependence[u] = conditional_mutual_information(&cond, 1, a, b)?;
            objective[u] =
                JointInputDist::new(1, 1, p_star.x1_size(), p_star.x2_size(), cond)?
                    .transmission(mac)?;
        }
    }
    let target: f64 = (0..u_size)
        .filter(|&u| weights[u] > 0.0)
        .map(|u| weights[u] * dependence[u])
        .sum();
    let original_objective: f64 = (0..u_size)
        .filter(|&u| weights[u] > 0.0)
        .map(|u| weights[u] * objective[u])
        .sum();

    let live: Vec<usize> = (0..u_size).filter(|&u| weights[u] > 0.0).collect();
    let mut best: Option<(Vec<(usize, f64)>, f64)> = None;
    let mut consider = |support: Vec<(usize, f64)>, value: f64| {
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((support, value));
        }
    };

    for &u in &live {
        if (dependence[u] - target).abs() <= 1e-9 {
            consider(vec![(u, 1.0)], objective[u]);
        }
    }
    for (i, &u) in live.iter().enumerate() {
        for &v in &live[i + 1..] {
            let denom = dependence[u] - dependence[v];
            if denom.abs() <= 1e-12 {
                continue;
            }
            let mut q_u = (target - dependence[v]) / denom;
            if !(-1e-12..=1.0 + 1e-12).contains(&q_u) {
                continue;
            }
            q_u = q_u.clamp(0.0, 1.0);
            let value = q_u * objective[u] + (1.0 - q_u) * objective[v];
            let support = match q_u {
                q if q == 0.0 => vec![(v, 1.0)],
                q if q == 1.0 => vec![(u, 1.0)],
                q => vec![(u, q), (v, 1.0 - q)],
            };
            consider(support, value);
        }
    }

    let (support_weights, objective_value) = best.ok_or_else(|| {
        Error::Internal(
            "no feasible reduced weights found; the original weights are feasible by \
             construction, so this is a bug"
                .into(),
        )
    })?;
    if objective_value < original_objective - 1e-9 {
        return Err(Error::Internal(format!(
            "reduced objective {objective_value} fell below the original {original_objective}"
        )));
    }
    let mut q = vec![0.0; u_size];
    for &(u, w) in &support_weights {
        q[u] = w;
    }
    let constraint_value: f64 = support_weights
        .iter()
        .map(|&(u, w)| w * dependence[u])
        .sum();
    let support: Vec<usize> = support_weights.iter().map(|&(u, _)| u).collect();
    Ok(CardinalityReduction {
        q_star: Pmf::new(q)?,
        support,
        objective_value,
        constraint_value,
    })
}

/// Concatenate two joint laws into one of blocklength `n + m` with a product
/// auxiliary alphabet; both functionals add across the blocks.
pub fn concat_distributions(
    p_n: &JointInputDist,
    p_m: &JointInputDist,
) -> Result<JointInputDist> {
    if p_n.x1_size() != p_m.x1_size() || p_n.x2_size() != p_m.x2_size() {
        return Err(Error::SizeMismatch(
            p_n.x1_size() * p_n.x2_size(),
            p_m.x1_size() * p_m.x2_size(),
        ));
    }
    let (an, bn) = (p_n.a_size(), p_n.b_size());
    let (am, bm) = (p_m.a_size(), p_m.b_size());
    let u_out = p_n.u_size() * p_m.u_size();
    let a_out = an * am;
    let b_out = bn * bm;
    let mut probs = vec![0.0; u_out * a_out * b_out];
    for u0 in 0..p_n.u_size() {
        for a0 in 0..an {
            for b0 in 0..bn {
                let w0 = p_n.probs()[(u0 * an + a0) * bn + b0];
                if w0 == 0.0 {
                    continue;
                }
                for u1 in 0..p_m.u_size() {
                    for a1 in 0..am {
                        for b1 in 0..bm {
                            let w1 = p_m.probs()[(u1 * am + a1) * bm + b1];
                            if w1 == 0.0 {
                                continue;
                            }
                            let u = u0 * p_m.u_size() + u1;
                            let a = a0 * am + a1;
                            let b = b0 * bm + b1;
                            probs[(u * a_out + a) * b_out + b] = w0 * w1;
                        }
                    }
                }
            }
        }
    }
    JointInputDist::new(
        u_out,
        p_n.n() + p_m.n(),
        p_n.x1_size(),
        p_n.x2_size(),
        probs,
    )
}

/// Mix two joint laws of equal blocklength by enlarging the auxiliary
/// alphabet to the disjoint union; every information functional evaluates to
/// the λ-mixture of its branch values.
pub fn time_share(
    p0: &JointInputDist,
    p1: &JointInputDist,
    lambda: f64,
) -> Result<JointInputDist> {
    if p0.n() != p1.n() || p0.x1_size() != p1.x1_size() || p0.x2_size() != p1.x2_size() {
        return Err(Error::SizeMismatch(
            p0.u_size() * p0.a_size() * p0.b_size(),
            p1.u_size() * p1.a_size() * p1.b_size(),
        ));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!(
            "mixture weight must lie in [0, 1], got {lambda}"
        )));
    }
    let block = p0.a_size() * p0.b_size();
    let u_out = p0.u_size() + p1.u_size();
    let mut probs = Vec::with_capacity(u_out * block);
    probs.extend(p0.probs().iter().map(|&w| (1.0 - lambda) * w));
    probs.extend(p1.probs().iter().map(|&w| lambda * w));
    JointInputDist::new(u_out, p0.n(), p0.x1_size(), p0.x2_size(), probs)
}
