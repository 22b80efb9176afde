//! Maximizers for the mutual-information functionals: the unconstrained
//! independent- and joint-input maxima, and the dependence-constrained
//! per-letter functional σ_n(δ).
//!
//! σ_n(δ) maximizes `(1/n) I(X1^n, X2^n; Y^n | U)` over joint laws
//! `p(u, x1^n, x2^n)` subject to `I(X1^n; X2^n | U) ≤ nδ`. The constraint
//! set is nonconvex in the full table, so every solver here is multi-start:
//! structured warm starts (product law, time-sharing with the joint
//! maximizer, a mixing curve between them, and a Lagrangian κ-ladder that
//! traces the dependence/information frontier) plus seeded random restarts,
//! each polished by an augmented-Lagrangian projected-gradient loop.
//!
//! Determinism contract: with a fixed seed and fixed restart count the
//! returned value is identical regardless of parallel schedule. Per-restart
//! seeds are derived by counter and results merge by (value, restart index).

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{CfConfig, DiscreteMac};
use crate::error::{Error, Result};
use crate::joint::JointInputDist;
use crate::pmf::entropy_of_slice;
use crate::simplex::{maximize_on_simplex, project_to_simplex};

/// Dependence overshoot accepted when merging candidates, in bits of
/// unnormalized budget. Final evaluations stay within the reported
/// `constraint_slack ≥ -1e-7` contract.
const FEASIBILITY_TOL: f64 = 1e-9;

/// Knobs for the multi-start optimizers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Independent starts per maximization (structured starts included).
    pub restarts: usize,
    /// Iteration cap for one projected-gradient run.
    pub max_iterations: usize,
    /// Stop a projected-gradient run once an iteration gains fewer bits.
    pub tolerance: f64,
    /// Points per simplex dimension used by the brute-force oracle.
    pub grid_resolution: usize,
    /// Base seed; restart `i` uses `rng_seed + i`.
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 5000,
            tolerance: 1e-9,
            grid_resolution: 64,
            rng_seed: 42,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn restart_rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed.wrapping_add(index as u64))
    }
}

/// Value of a σ-type maximization together with the achieving law and
/// optimizer diagnostics.
///
/// `value` is recomputed from the returned argmax through the generic
/// conditional mutual information, so it reproduces that functional by
/// construction; `constraint_slack` is `δ − I(X1^n;X2^n|U)/n` at the argmax.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaEvaluation {
    pub value: f64,
    pub argmax: JointInputDist,
    pub delta: f64,
    pub n: usize,
    pub constraint_slack: f64,
    pub restarts_used: usize,
    pub converged: bool,
}

impl SigmaEvaluation {
    fn assemble(
        mac: &DiscreteMac,
        n: usize,
        delta: f64,
        argmax: JointInputDist,
        restarts_used: usize,
        converged: bool,
    ) -> Result<Self> {
        let extension = mac.nth_extension(n)?;
        let value = argmax.transmission(&extension)? / n as f64;
        let constraint_slack = delta - argmax.dependence() / n as f64;
        Ok(Self {
            value,
            argmax,
            delta,
            n,
            constraint_slack,
            restarts_used,
            converged,
        })
    }
}

// ---------------------------------------------------------------------------
// Objective and constraint on a flat (u, a, b) table
// ---------------------------------------------------------------------------

/// Workspace for the two functionals on a flat `[u][a][b]` table against a
/// fixed (already extended) kernel.
struct JointProblem<'a> {
    u_size: usize,
    a_size: usize,
    b_size: usize,
    y_size: usize,
    kernel: &'a [f64],
    row_entropy: Vec<f64>,
}

impl<'a> JointProblem<'a> {
    fn new(u_size: usize, extension: &'a DiscreteMac) -> Self {
        let a_size = extension.x1_size();
        let b_size = extension.x2_size();
        let y_size = extension.y_size();
        let row_entropy = (0..a_size * b_size)
            .map(|pair| entropy_of_slice(&extension.kernel()[pair * y_size..(pair + 1) * y_size]))
            .collect();
        Self {
            u_size,
            a_size,
            b_size,
            y_size,
            kernel: extension.kernel(),
            row_entropy,
        }
    }

    fn len(&self) -> usize {
        self.u_size * self.a_size * self.b_size
    }

    /// I(X1^n, X2^n; Y^n | U) in bits, via H(Y|U) − H(Y|U, X1, X2).
    fn transmission(&self, p: &[f64]) -> f64 {
        let mut out = vec![0.0; self.u_size * self.y_size];
        let mut pu = vec![0.0; self.u_size];
        let mut h_given_inputs = 0.0;
        for u in 0..self.u_size {
            for pair in 0..self.a_size * self.b_size {
                let w = p[u * self.a_size * self.b_size + pair];
                if w > 0.0 {
                    pu[u] += w;
                    h_given_inputs += w * self.row_entropy[pair];
                    let row = &self.kernel[pair * self.y_size..(pair + 1) * self.y_size];
                    for (y, &ky) in row.iter().enumerate() {
                        out[u * self.y_size + y] += w * ky;
                    }
                }
            }
        }
        let h_y_given_u = entropy_of_slice(&out) - entropy_of_slice(&pu);
        (h_y_given_u - h_given_inputs).max(0.0)
    }

    /// Gradient of [`Self::transmission`]: `D(W(·|a,b) ‖ p(y|u))` entrywise.
    fn grad_transmission(&self, p: &[f64], g: &mut [f64]) {
        let mut out = vec![0.0; self.u_size * self.y_size];
        let mut pu = vec![0.0; self.u_size];
        for u in 0..self.u_size {
            for pair in 0..self.a_size * self.b_size {
                let w = p[u * self.a_size * self.b_size + pair];
                if w > 0.0 {
                    pu[u] += w;
                    let row = &self.kernel[pair * self.y_size..(pair + 1) * self.y_size];
                    for (y, &ky) in row.iter().enumerate() {
                        out[u * self.y_size + y] += w * ky;
                    }
                }
            }
        }
        for u in 0..self.u_size {
            for pair in 0..self.a_size * self.b_size {
                let row = &self.kernel[pair * self.y_size..(pair + 1) * self.y_size];
                let mut d = 0.0;
                if pu[u] > 0.0 {
                    for (y, &ky) in row.iter().enumerate() {
                        if ky > 0.0 {
                            let cond = (out[u * self.y_size + y] / pu[u]).max(1e-300);
                            d += ky * (ky / cond).log2();
                        }
                    }
                }
                // For an empty u-slice the one-sided derivative of growing a
                // single cell is zero (a lone input pair carries no
                // conditional information), so leave d = 0.
                g[u * self.a_size * self.b_size + pair] = d;
            }
        }
    }

    /// I(X1^n; X2^n | U) in bits.
    fn dependence(&self, p: &[f64]) -> f64 {
        crate::joint::cmi_unchecked(p, self.u_size, self.a_size, self.b_size)
    }

    /// Gradient of [`Self::dependence`]:
    /// `log2[ p(u,a,b) p(u) / (p(u,a) p(u,b)) ]` entrywise, with clamped
    /// logarithms at the boundary.
    fn grad_dependence(&self, p: &[f64], g: &mut [f64]) {
        let mut pu = vec![0.0; self.u_size];
        let mut pa = vec![0.0; self.u_size * self.a_size];
        let mut pb = vec![0.0; self.u_size * self.b_size];
        for u in 0..self.u_size {
            for a in 0..self.a_size {
                for b in 0..self.b_size {
                    let w = p[(u * self.a_size + a) * self.b_size + b];
                    pu[u] += w;
                    pa[u * self.a_size + a] += w;
                    pb[u * self.b_size + b] += w;
                }
            }
        }
        for u in 0..self.u_size {
            for a in 0..self.a_size {
                for b in 0..self.b_size {
                    let idx = (u * self.a_size + a) * self.b_size + b;
                    g[idx] = (p[idx].max(1e-300)).log2() + (pu[u].max(1e-300)).log2()
                        - (pa[u * self.a_size + a].max(1e-300)).log2()
                        - (pb[u * self.b_size + b].max(1e-300)).log2();
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Unconstrained maximizations
// ---------------------------------------------------------------------------

struct BlockSolution {
    p_a: Vec<f64>,
    p_b: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Maximize I(X1,X2;Y) over product laws `p(a) p(b)` against `extension` by
/// alternating projected-gradient sweeps, one random start per restart.
fn alternating_product_max(extension: &DiscreteMac, cfg: &OptimizerConfig) -> BlockSolution {
    let a_size = extension.x1_size();
    let b_size = extension.x2_size();
    let problem = JointProblem::new(1, extension);

    let starts: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.restarts)
        .map(|i| {
            if i == 0 {
                (
                    vec![1.0 / a_size as f64; a_size],
                    vec![1.0 / b_size as f64; b_size],
                )
            } else {
                let mut rng = cfg.restart_rng(i);
                (random_simplex(a_size, &mut rng), random_simplex(b_size, &mut rng))
            }
        })
        .collect();

    let runs: Vec<BlockSolution> = starts
        .into_par_iter()
        .map(|(mut p_a, mut p_b)| {
            let mut table = vec![0.0; a_size * b_size];
            let eval = |pa: &[f64], pb: &[f64], table: &mut [f64]| {
                for a in 0..a_size {
                    for b in 0..b_size {
                        table[a * b_size + b] = pa[a] * pb[b];
                    }
                }
                problem.transmission(table)
            };
            let mut value = eval(&p_a, &p_b, &mut table);
            let mut converged = false;
            for _sweep in 0..200 {
                // Block over p(a), p(b)ardently reusing the joint gradient:
                // the partial derivative in p(a) is the b-average of the
                // joint gradient, and symmetrically.
                let res_a = {
                    let pb = p_b.clone();
                    maximize_on_simplex(
                        |pa| {
                            let mut t = vec![0.0; a_size * b_size];
                            for a in 0..a_size {
                                for b in 0..b_size {
                                    t[a * b_size + b] = pa[a] * pb[b];
                                }
                            }
                            problem.transmission(&t)
                        },
                        |pa, g| {
                            let mut t = vec![0.0; a_size * b_size];
                            for a in 0..a_size {
                                for b in 0..b_size {
                                    t[a * b_size + b] = pa[a] * pb[b];
                                }
                            }
                            let mut gj = vec![0.0; a_size * b_size];
                            problem.grad_transmission(&t, &mut gj);
                            for a in 0..a_size {
                                g[a] = (0..b_size).map(|b| pb[b] * gj[a * b_size + b]).sum();
                            }
                        },
                        p_a.clone(),
                        cfg.max_iterations,
                        cfg.tolerance,
                    )
                };
                p_a = res_a.x;
                let res_b = {
                    let pa = p_a.clone();
                    maximize_on_simplex(
                        |pb| {
                            let mut t = vec![0.0; a_size * b_size];
                            for a in 0..a_size {
                                for b in 0..b_size {
                                    t[a * b_size + b] = pa[a] * pb[b];
                                }
                            }
                            problem.transmission(&t)
                        },
                        |pb, g| {
                            let mut t = vec![0.0; a_size * b_size];
                            for a in 0..a_size {
                                for b in 0..b_size {
                                    t[a * b_size + b] = pa[a] * pb[b];
                                }
                            }
                            let mut gj = vec![0.0; a_size * b_size];
                            problem.grad_transmission(&t, &mut gj);
                            for b in 0..b_size {
                                g[b] = (0..a_size).map(|a| pa[a] * gj[a * b_size + b]).sum();
                            }
                        },
                        p_b.clone(),
                        cfg.max_iterations,
                        cfg.tolerance,
                    )
                };
                p_b = res_b.x;
                let new_value = eval(&p_a, &p_b, &mut table);
                if new_value - value < cfg.tolerance {
                    value = value.max(new_value);
                    converged = res_a.converged && res_b.converged;
                    break;
                }
                value = new_value;
            }
            BlockSolution {
                p_a,
                p_b,
                value,
                converged,
            }
        })
        .collect();

    best_by_value(runs, |r| r.value)
}

/// Maximize I(X1,X2;Y) over all joint laws `p(a, b)` (concave; projected
/// gradient with multi-start for determinism symmetry with the rest).
fn joint_max(extension: &DiscreteMac, cfg: &OptimizerConfig) -> (Vec<f64>, f64, bool) {
    let a_size = extension.x1_size();
    let b_size = extension.x2_size();
    let k = a_size * b_size;
    let problem = JointProblem::new(1, extension);

    let starts: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|i| {
            if i == 0 {
                vec![1.0 / k as f64; k]
            } else {
                random_simplex(k, &mut cfg.restart_rng(i))
            }
        })
        .collect();

    let runs: Vec<(Vec<f64>, f64, bool)> = starts
        .into_par_iter()
        .map(|start| {
            let res = maximize_on_simplex(
                |p| problem.transmission(p),
                |p, g| problem.grad_transmission(p, g),
                start,
                cfg.max_iterations,
                cfg.tolerance,
            );
            (res.x, res.value, res.converged)
        })
        .collect();

    best_by_value(runs, |r| r.1)
}

pub(crate) fn random_simplex<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = v.iter().sum();
    for value in v.iter_mut() {
        *value /= sum;
    }
    v
}

/// Deterministic merge: maximum value, first index on ties.
fn best_by_value<T>(mut runs: Vec<T>, value: impl Fn(&T) -> f64) -> T {
    let mut best = 0;
    for i in 1..runs.len() {
        if value(&runs[i]) > value(&runs[best]) {
            best = i;
        }
    }
    runs.swap_remove(best)
}

// ---------------------------------------------------------------------------
// Public unconstrained operations
// ---------------------------------------------------------------------------

/// Maximum of I(X1,X2;Y) over independent inputs `p(x1) p(x2)`, by
/// alternating coordinate maximization over the two marginal simplices with
/// seeded random restarts.
pub fn max_mi_independent(mac: &DiscreteMac, cfg: &OptimizerConfig) -> Result<SigmaEvaluation> {
    cfg.validate()?;
    let sol = alternating_product_max(mac, cfg);
    let argmax =
        JointInputDist::from_product(1, 1, mac.x1_size(), mac.x2_size(), &sol.p_a, &sol.p_b)?;
    SigmaEvaluation::assemble(mac, 1, 0.0, argmax, cfg.restarts, sol.converged)
}

/// Maximum of I(X1,X2;Y) over all joint inputs `p(x1, x2)`. Upper-bounds
/// [`max_mi_independent`]. The reported `delta` is the dependence
/// I(X1;X2) spent at the argmax, so the slack is zero.
pub fn max_mi_joint(mac: &DiscreteMac, cfg: &OptimizerConfig) -> Result<SigmaEvaluation> {
    cfg.validate()?;
    let (table, _, converged) = joint_max(mac, cfg);
    let argmax = JointInputDist::new(1, 1, mac.x1_size(), mac.x2_size(), table)?;
    let delta = argmax.dependence();
    SigmaEvaluation::assemble(mac, 1, delta, argmax, cfg.restarts, converged)
}

/// Input-link capacities large enough that the facilitator can learn both
/// messages: one bit above the joint-input maximum on each link, with no
/// output capacity.
pub fn full_knowledge_cin(mac: &DiscreteMac, cfg: &OptimizerConfig) -> Result<CfConfig> {
    let joint = max_mi_joint(mac, cfg)?;
    let margin = joint.value + 1.0;
    CfConfig::new((margin, margin), (0.0, 0.0))
}

// ---------------------------------------------------------------------------
// Constrained maximization: sigma_n
// ---------------------------------------------------------------------------

/// σ_1(δ): maximize I(X1,X2;Y|U) with a two-point auxiliary alphabet
/// subject to I(X1;X2|U) ≤ δ.
pub fn sigma1(mac: &DiscreteMac, delta: f64, cfg: &OptimizerConfig) -> Result<SigmaEvaluation> {
    sigma_n(mac, 1, delta, 2, cfg)
}

/// σ_n(δ) for blocklengths 1 and 2: maximize `(1/n) I(X1^n,X2^n;Y^n|U)`
/// over `p(u, x1^n, x2^n)` with `I(X1^n;X2^n|U) ≤ nδ`, the auxiliary
/// alphabet size chosen by the caller.
pub fn sigma_n(
    mac: &DiscreteMac,
    n: usize,
    delta: f64,
    u_size: usize,
    cfg: &OptimizerConfig,
) -> Result<SigmaEvaluation> {
    cfg.validate()?;
    if !(1..=2).contains(&n) {
        return Err(Error::Domain(format!(
            "blocklength {n} unsupported: only n in {{1, 2}} is computed"
        )));
    }
    if u_size == 0 {
        return Err(Error::Domain("u_size must be at least 1".into()));
    }
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!(
            "constraint level must be nonnegative, got {delta}"
        )));
    }
    let extension = mac.nth_extension(n)?;
    let a_size = extension.x1_size();
    let b_size = extension.x2_size();
    let nf = n as f64;
    let budget = nf * delta;

    // δ = 0: the feasible laws are exactly the conditionally independent
    // ones, and a mixture over u cannot beat its best branch, so the optimum
    // is the best product law on the extension. Solving in that
    // parametrization avoids multiplier blow-up at the boundary.
    if delta == 0.0 {
        let sol = alternating_product_max(&extension, cfg);
        let argmax = JointInputDist::from_product(
            u_size,
            n,
            mac.x1_size(),
            mac.x2_size(),
            &sol.p_a,
            &sol.p_b,
        )?;
        return SigmaEvaluation::assemble(mac, n, delta, argmax, cfg.restarts, sol.converged);
    }

    let problem = JointProblem::new(u_size, &extension);
    let block = a_size * b_size;

    let product = alternating_product_max(&extension, cfg);
    let (joint_table, _, joint_converged) = joint_max(&extension, cfg);

    let embed = |table: &[f64]| {
        let mut p = vec![0.0; problem.len()];
        p[..block].copy_from_slice(table);
        p
    };
    let mut product_table = vec![0.0; block];
    for a in 0..a_size {
        for b in 0..b_size {
            product_table[a * b_size + b] = product.p_a[a] * product.p_b[b];
        }
    }
    let product_embed = embed(&product_table);
    let joint_embed = embed(&joint_table);
    let joint_dependence = problem.dependence(&joint_embed);

    // The unconstrained joint maximum dominates every conditional law; if it
    // is already feasible the search is over.
    if joint_dependence <= budget + FEASIBILITY_TOL {
        let argmax =
            JointInputDist::new(u_size, n, mac.x1_size(), mac.x2_size(), joint_embed)?;
        return SigmaEvaluation::assemble(mac, n, delta, argmax, cfg.restarts, joint_converged);
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    candidates.push(Candidate {
        table: product_embed.clone(),
        value: problem.transmission(&product_embed),
        converged: product.converged,
    });

    // Time-sharing start: spend the whole budget on a joint-law branch.
    if u_size >= 2 {
        let w = (budget / joint_dependence).min(1.0);
        let mut table = vec![0.0; problem.len()];
        for i in 0..block {
            table[i] = (1.0 - w) * product_table[i];
            table[block + i] = w * joint_table[i];
        }
        candidates.push(Candidate {
            value: problem.transmission(&table),
            converged: true,
            table,
        });
    }

    // Mixing curve between the product and joint maximizers: the dependence
    // vanishes quadratically at the product end while the objective grows
    // linearly, which is where the small-δ optimum lives.
    candidates.push(best_on_mixing_curve(
        &problem,
        &product_embed,
        &joint_embed,
        budget,
    ));

    // Lagrangian κ-ladder: unconstrained maxima of O − κ·C sweep the
    // dependence/information frontier; each is repaired into the budget.
    let kappa_ladder = [256.0, 128.0, 64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0, 0.5];
    let ladder: Vec<Candidate> = kappa_ladder
        .par_iter()
        .map(|&kappa| {
            let scalarized = |p: &[f64]| problem.transmission(p) - kappa * problem.dependence(p);
            let scalarized_grad = |p: &[f64], g: &mut [f64]| {
                problem.grad_transmission(p, g);
                let mut gc = vec![0.0; p.len()];
                problem.grad_dependence(p, &mut gc);
                for (gi, ci) in g.iter_mut().zip(&gc) {
                    *gi -= kappa * ci;
                }
            };
            let mut best: Option<AscentOutcome> = None;
            for start in [joint_embed.clone(), product_embed.clone()] {
                let res = maximize_on_simplex(
                    &scalarized,
                    &scalarized_grad,
                    start,
                    cfg.max_iterations,
                    cfg.tolerance,
                );
                let outcome = AscentOutcome {
                    table: res.x,
                    scalarized: res.value,
                    converged: res.converged,
                };
                if best.as_ref().is_none_or(|b| outcome.scalarized > b.scalarized) {
                    best = Some(outcome);
                }
            }
            let best = best.expect("two starts ran");
            let table = repair_into_budget(&problem, best.table, budget);
            Candidate {
                value: problem.transmission(&table),
                converged: best.converged,
                table,
            }
        })
        .collect();
    candidates.extend(ladder);

    // Augmented-Lagrangian polish from representative structured starts and
    // from seeded random tables.
    let structured = candidates.len();
    let mut al_starts: Vec<Vec<f64>> = vec![product_embed.clone()];
    if candidates.len() > 1 {
        al_starts.push(candidates[1].table.clone());
    }
    al_starts.push(candidates[structured - kappa_ladder.len() - 1].table.clone());
    let best_ladder = candidates[structured - kappa_ladder.len()..]
        .iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite"))
        .expect("ladder nonempty");
    al_starts.push(best_ladder.table.clone());
    let random_count = cfg.restarts.saturating_sub(al_starts.len()).max(2);
    for i in 0..random_count {
        let mut rng = cfg.restart_rng(1000 + i);
        al_starts.push(random_simplex(problem.len(), &mut rng));
    }
    let polished: Vec<Candidate> = al_starts
        .into_par_iter()
        .map(|start| augmented_lagrangian(&problem, start, budget, cfg))
        .collect();
    let restarts_used = structured + polished.len();
    candidates.extend(polished);

    // Merge: feasible candidates only, by value then insertion order.
    let mut best: Option<Candidate> = None;
    for cand in candidates {
        if problem.dependence(&cand.table) > budget + FEASIBILITY_TOL {
            continue;
        }
        if best.as_ref().is_none_or(|b| cand.value > b.value) {
            best = Some(cand);
        }
    }
    let best = best.ok_or_else(|| {
        Error::Internal("no feasible candidate; product laws are always feasible".into())
    })?;
    let argmax = JointInputDist::new(u_size, n, mac.x1_size(), mac.x2_size(), best.table)?;
    SigmaEvaluation::assemble(mac, n, delta, argmax, restarts_used, best.converged)
}

struct Candidate {
    table: Vec<f64>,
    value: f64,
    converged: bool,
}

struct AscentOutcome {
    table: Vec<f64>,
    scalarized: f64,
    converged: bool,
}

/// Best feasible point on the segment from `lo` (dependence-free) to `hi`,
/// by a deterministic coarse-to-fine scan of the mixing weight.
fn best_on_mixing_curve(
    problem: &JointProblem,
    lo: &[f64],
    hi: &[f64],
    budget: f64,
) -> Candidate {
    let mix = |t: f64| -> Vec<f64> {
        lo.iter()
            .zip(hi)
            .map(|(&a, &b)| (1.0 - t) * a + t * b)
            .collect()
    };
    let mut best_t = 0.0;
    let mut best_value = problem.transmission(lo);
    let coarse = 256;
    for i in 1..=coarse {
        let t = i as f64 / coarse as f64;
        let p = mix(t);
        if problem.dependence(&p) <= budget {
            let v = problem.transmission(&p);
            if v > best_value {
                best_value = v;
                best_t = t;
            }
        }
    }
    let fine = 64;
    let lo_t = (best_t - 1.0 / coarse as f64).max(0.0);
    let hi_t = (best_t + 1.0 / coarse as f64).min(1.0);
    for i in 0..=fine {
        let t = lo_t + (hi_t - lo_t) * i as f64 / fine as f64;
        let p = mix(t);
        if problem.dependence(&p) <= budget {
            let v = problem.transmission(&p);
            if v > best_value {
                best_value = v;
                best_t = t;
            }
        }
    }
    Candidate {
        table: mix(best_t),
        value: best_value,
        converged: true,
    }
}

/// Pull an infeasible table back into the dependence budget by mixing toward
/// its conditionally independent projection (dependence 0 at the far end).
fn repair_into_budget(problem: &JointProblem, table: Vec<f64>, budget: f64) -> Vec<f64> {
    if problem.dependence(&table) <= budget {
        return table;
    }
    let dist = JointInputDist::new(
        problem.u_size,
        1,
        problem.a_size,
        problem.b_size,
        table.clone(),
    );
    let ci: Vec<f64> = match dist {
        Ok(d) => d.conditionally_independent_projection().probs().to_vec(),
        Err(_) => return table,
    };
    let mix = |t: f64| -> Vec<f64> {
        table
            .iter()
            .zip(&ci)
            .map(|(&a, &b)| (1.0 - t) * a + t * b)
            .collect()
    };
    // Coarse scan for the first feasible mix, then bisect the boundary.
    let mut hi = 1.0;
    for i in 1..=64 {
        let t = i as f64 / 64.0;
        if problem.dependence(&mix(t)) <= budget {
            hi = t;
            break;
        }
    }
    let mut lo = (hi - 1.0 / 64.0).max(0.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if problem.dependence(&mix(mid)) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    mix(hi)
}

/// One augmented-Lagrangian run for `max O(p)` s.t. `C(p) ≤ budget`:
/// multiplier ascent on the constraint around an inner projected-gradient
/// maximization of the penalized objective.
fn augmented_lagrangian(
    problem: &JointProblem,
    start: Vec<f64>,
    budget: f64,
    cfg: &OptimizerConfig,
) -> Candidate {
    let mut p = start;
    project_to_simplex(&mut p);
    let mut lambda = 0.0;
    let mut rho = 4.0;
    let mut previous_violation = f64::INFINITY;
    let mut converged = false;
    let mut last_value = f64::NEG_INFINITY;

    for _outer in 0..24 {
        let penalized = |x: &[f64]| {
            let shifted = problem.dependence(x) - budget + lambda / rho;
            let active = shifted.max(0.0);
            problem.transmission(x) - 0.5 * rho * active * active
        };
        let penalized_grad = |x: &[f64], g: &mut [f64]| {
            problem.grad_transmission(x, g);
            let shifted = problem.dependence(x) - budget + lambda / rho;
            if shifted > 0.0 {
                let mut gc = vec![0.0; x.len()];
                problem.grad_dependence(x, &mut gc);
                for (gi, ci) in g.iter_mut().zip(&gc) {
                    *gi -= rho * shifted * ci;
                }
            }
        };
        let res = maximize_on_simplex(
            &penalized,
            &penalized_grad,
            p,
            cfg.max_iterations,
            cfg.tolerance,
        );
        p = res.x;
        let violation = problem.dependence(&p) - budget;
        let value = problem.transmission(&p);
        if violation <= 1e-10
            && res.converged
            && (value - last_value).abs() < 10.0 * cfg.tolerance
        {
            converged = true;
            break;
        }
        last_value = value;
        lambda = (lambda + rho * violation).max(0.0);
        if violation > 0.5 * previous_violation.max(1e-12) {
            rho = (rho * 4.0).min(1e8);
        }
        previous_violation = violation.max(0.0);
    }

    let table = repair_into_budget(problem, p, budget);
    Candidate {
        value: problem.transmission(&table),
        converged,
        table,
    }
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

    /// Noiseless channel that copies encoder 1 and ignores encoder 2.
    fn copy_x1_mac() -> DiscreteMac {
        let mut kernel = vec![0.0; 2 * 2 * 2];
        for x1 in 0..2 {
            for x2 in 0..2 {
                kernel[(x1 * 2 + x2) * 2 + x1] = 1.0;
            }
        }
        DiscreteMac::new(2, 2, 2, kernel).unwrap()
    }

    /// Output carries no information about either input.
    fn useless_mac() -> DiscreteMac {
        DiscreteMac::new(2, 2, 2, vec![0.5; 8]).unwrap()
    }

    #[test]
    fn independent_max_on_binary_adder_is_three_halves() {
        let eval = max_mi_independent(&binary_adder_mac(), &quick_cfg()).unwrap();
        assert!((eval.value - 1.5).abs() < 1e-6, "got {}", eval.value);
        assert!(eval.constraint_slack.abs() < 1e-9);
    }

    #[test]
    fn independent_max_on_copy_channel_is_one_bit() {
        let eval = max_mi_independent(&copy_x1_mac(), &quick_cfg()).unwrap();
        assert!((eval.value - 1.0).abs() < 1e-7, "got {}", eval.value);
    }

    #[test]
    fn independent_max_on_useless_channel_is_zero() {
        let eval = max_mi_independent(&useless_mac(), &quick_cfg()).unwrap();
        assert!(eval.value.abs() < 1e-9, "got {}", eval.value);
    }

    #[test]
    fn joint_max_on_binary_adder_is_log2_3() {
        let eval = max_mi_joint(&binary_adder_mac(), &quick_cfg()).unwrap();
        assert!(
            (eval.value - 3.0_f64.log2()).abs() < 1e-6,
            "got {}",
            eval.value
        );
    }

    #[test]
    fn joint_max_on_identity_pair_channel_is_two_bits() {
        // y = 2*x1 + x2 is one-to-one on input pairs.
        let mut kernel = vec![0.0; 2 * 2 * 4];
        for x1 in 0..2 {
            for x2 in 0..2 {
                kernel[(x1 * 2 + x2) * 4 + (2 * x1 + x2)] = 1.0;
            }
        }
        let mac = DiscreteMac::new(2, 2, 4, kernel).unwrap();
        let eval = max_mi_joint(&mac, &quick_cfg()).unwrap();
        assert!((eval.value - 2.0).abs() < 1e-7, "got {}", eval.value);
    }

    #[test]
    fn joint_max_dominates_independent_max() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        let ind = max_mi_independent(&mac, &cfg).unwrap();
        let joint = max_mi_joint(&mac, &cfg).unwrap();
        assert!(joint.value + 1e-9 >= ind.value);
    }

    #[test]
    fn full_knowledge_margin_on_binary_adder() {
        let cf = full_knowledge_cin(&binary_adder_mac(), &quick_cfg()).unwrap();
        assert!((cf.c_in.0 - (3.0_f64.log2() + 1.0)).abs() < 1e-4);
        assert_eq!(cf.c_out, (0.0, 0.0));
        let joint = max_mi_joint(&binary_adder_mac(), &quick_cfg()).unwrap();
        assert!(cf.c_in.0.min(cf.c_in.1) > joint.value);
    }

    #[test]
    fn full_knowledge_margin_on_useless_channel() {
        let cf = full_knowledge_cin(&useless_mac(), &quick_cfg()).unwrap();
        assert!((cf.c_in.0 - 1.0).abs() < 1e-7);
        assert!((cf.c_in.1 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn sigma1_at_zero_matches_independent_max() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        let eval = sigma1(&mac, 0.0, &cfg).unwrap();
        assert!((eval.value - 1.5).abs() < 1e-6, "got {}", eval.value);
        assert!(eval.argmax.dependence() < 1e-12);
    }

    #[test]
    fn sigma1_with_loose_constraint_matches_joint_max() {
        let cfg = quick_cfg();
        let eval = sigma1(&binary_adder_mac(), 2.0, &cfg).unwrap();
        assert!(
            (eval.value - 3.0_f64.log2()).abs() < 1e-6,
            "got {}",
            eval.value
        );
        assert!(eval.constraint_slack >= -1e-7);
    }

    #[test]
    fn sigma1_on_copy_channel_ignores_delta() {
        let cfg = quick_cfg();
        for delta in [0.0, 0.3, 1.0] {
            let eval = sigma1(&copy_x1_mac(), delta, &cfg).unwrap();
            assert!((eval.value - 1.0).abs() < 1e-6, "delta {delta}: {}", eval.value);
        }
    }

    #[test]
    fn sigma1_midrange_beats_time_sharing_line() {
        // Strictly above the chord between σ1(0) and the joint optimum is
        // the signature of the dependence-budget optimization.
        let cfg = quick_cfg();
        let eval = sigma1(&binary_adder_mac(), 0.02, &cfg).unwrap();
        assert!(eval.value > 1.5 + 0.01, "got {}", eval.value);
        assert!(eval.constraint_slack >= -1e-7);
    }

    #[test]
    fn sigma_n_reduces_to_sigma1_at_blocklength_one() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        let a = sigma1(&mac, 0.05, &cfg).unwrap();
        let b = sigma_n(&mac, 1, 0.05, 2, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-7);
    }

    #[test]
    fn sigma2_at_zero_meets_superadditivity_floor() {
        let cfg = quick_cfg();
        let mac = binary_adder_mac();
        let s1 = sigma1(&mac, 0.0, &cfg).unwrap();
        let s2 = sigma_n(&mac, 2, 0.0, 2, &cfg).unwrap();
        assert!(
            s2.value >= s1.value - 1e-7,
            "s2 {} < s1 {}",
            s2.value,
            s1.value
        );
    }

    #[test]
    fn sigma_n_rejects_unsupported_blocklengths() {
        let cfg = quick_cfg();
        assert!(sigma_n(&binary_adder_mac(), 3, 0.1, 2, &cfg).is_err());
        assert!(sigma_n(&binary_adder_mac(), 0, 0.1, 2, &cfg).is_err());
    }

    #[test]
    fn sigma1_rejects_negative_delta() {
        assert!(sigma1(&binary_adder_mac(), -0.1, &quick_cfg()).is_err());
    }

    #[test]
    fn fixed_seed_runs_are_identical() {
        let cfg = quick_cfg();
        let a = sigma1(&binary_adder_mac(), 0.03, &cfg).unwrap();
        let b = sigma1(&binary_adder_mac(), 0.03, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.argmax.probs(), b.argmax.probs());
    }
}
