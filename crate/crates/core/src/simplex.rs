//! Probability-simplex projection and a projected-gradient ascent engine.
//!
//! All optimizers in this crate maximize smooth concave (or multi-started
//! nonconvex) objectives over one or more probability simplices. Steps are
//! Euclidean projections of gradient moves, with a doubling/halving
//! backtracking line search that halts once an iteration gains less than the
//! caller's tolerance.

/// Euclidean projection of `v` onto the probability simplex, in place.
///
/// Sorted-threshold method: O(k log k), exact up to rounding.
pub fn project_to_simplex(v: &mut [f64]) {
    let k = v.len();
    debug_assert!(k > 0);
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (j, &value) in sorted.iter().enumerate() {
        cumulative += value;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if value - candidate > 0.0 {
            threshold = candidate;
        }
    }
    for value in v.iter_mut() {
        *value = (*value - threshold).max(0.0);
    }
    // One exact renormalization pass absorbs the rounding of the threshold.
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for value in v.iter_mut() {
            *value /= sum;
        }
    } else {
        for value in v.iter_mut() {
            *value = 1.0 / k as f64;
        }
    }
}

/// Outcome of a projected-gradient run.
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximize `f` over the simplex by projected gradient ascent from `x0`.
///
/// `grad` writes the gradient of `f` at `x` into its output slice. The step
/// size doubles after an accepted move and halves on rejection; the run
/// stops when the best achievable gain in an iteration drops below `tol`
/// (converged) or after `max_iter` iterations (not converged).
pub fn maximize_on_simplex<F, G>(
    f: F,
    grad: G,
    mut x0: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> AscentResult
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    project_to_simplex(&mut x0);
    let k = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut g = vec![0.0; k];
    let mut trial = vec![0.0; k];
    let mut step = 1.0;

    for iteration in 0..max_iter {
        grad(&x, &mut g);
        let mut eta = step;
        let mut accepted = false;
        while eta > 1e-14 {
            for i in 0..k {
                trial[i] = x[i] + eta * g[i];
            }
            project_to_simplex(&mut trial);
            let ft = f(&trial);
            if ft > fx {
                let gain = ft - fx;
                std::mem::swap(&mut x, &mut trial);
                fx = ft;
                step = (eta * 2.0).min(1e6);
                accepted = true;
                if gain < tol {
                    return AscentResult {
                        x,
                        value: fx,
                        iterations: iteration + 1,
                        converged: true,
                    };
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            return AscentResult {
                x,
                value: fx,
                iterations: iteration + 1,
                converged: true,
            };
        }
    }
    AscentResult {
        x: x.clone(),
        value: fx,
        iterations: max_iter,
        converged: false,
    }
}
