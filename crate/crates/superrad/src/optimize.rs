//! Derivative-free tuning of the switching time and slice boundaries.
//!
//! The J₁-zero prescription is only optimal as γ → 0; at finite γ the
//! best switching time and boundary placement drift. A bounded
//! Nelder–Mead simplex, seeded at the prescription, searches
//! (t_p, b₁, …, b_{N−1}) with b_N pinned by the total rate.

use crate::cascade::{cascade_numeric, pulse_metrics, PulseMetrics, SliceStack};
use crate::error::{Error, Result};
use crate::propagation::{TimeGrid, Waveform};
use crate::specfun::j1_zero;

/// Outcome of a stack optimization.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_stack: SliceStack,
    pub best_metrics: PulseMetrics,
    pub evaluations: usize,
    pub converged: bool,
}

/// The boundary-matched stack: switching when the N-th coherence zero
/// reaches the output face, slices spanning one domain each. In the
/// γ → 0 limit the k-th boundary sits at b·t_p = (x_k/2)² with x_k the
/// k-th zero of J₁.
pub fn prescribed_stack(n_slices: u32, b_total: f64, gamma: f64) -> Result<SliceStack> {
    if !(1..=8).contains(&n_slices) {
        return Err(Error::Range(format!("n_slices = {n_slices} must be in [1, 8]")));
    }
    if !(b_total > 0.0) {
        return Err(Error::Domain(format!("b_total = {b_total} must be > 0")));
    }
    let beta: Vec<f64> = (1..=n_slices)
        .map(|k| j1_zero(k).map(|z| (z / 2.0) * (z / 2.0)))
        .collect::<Result<_>>()?;
    let t_p = beta[n_slices as usize - 1] / b_total;
    let mut slice_b = Vec::with_capacity(n_slices as usize);
    let mut prev = 0.0;
    for &bt in &beta {
        slice_b.push((bt - prev) / t_p);
        prev = bt;
    }
    SliceStack::new(slice_b, t_p, gamma)
}

/// Maximize the peak output intensity of the numeric cascade over the
/// switching time and the interior slice boundaries, at fixed total rate.
///
/// Deterministic: a fixed initial simplex at the prescription makes
/// repeated runs identical, and the prescription itself is always a
/// simplex vertex, so the result can only improve on it. The search
/// stops when the simplex has collapsed or `budget` objective
/// evaluations have been spent (`converged` records which).
pub fn optimize_stack(
    n_slices: u32,
    b_total: f64,
    gamma: f64,
    budget: usize,
) -> Result<OptimizationResult> {
    if budget < 50 {
        return Err(Error::Range(format!("budget = {budget} must be ≥ 50")));
    }
    let baseline = prescribed_stack(n_slices, b_total, gamma)?;
    let n = n_slices as usize;
    let tp0 = baseline.t_p();
    let b1_ref = baseline.slice_b()[0];

    // fixed objective grid: 128 samples per 1/b₁ of the baseline, long
    // enough for any admissible t_p plus the burst tail
    let tp_lo = 0.2 * tp0;
    let tp_hi = 2.5 * tp0;
    let t_end = tp_hi + 6.0 / b1_ref;
    let n_t = (128.0 * b1_ref * t_end).ceil() as usize + 1;
    let grid = TimeGrid::new(0.0, t_end, n_t.max(130))?;
    let step = Waveform::step(grid);

    let lo_b = 0.02 * b_total;
    let mut lower = vec![tp_lo];
    let mut upper = vec![tp_hi];
    for _ in 1..n {
        lower.push(lo_b);
        upper.push(0.98 * b_total);
    }

    let stack_of = |x: &[f64]| -> Option<SliceStack> {
        let mut slice_b: Vec<f64> = x[1..].to_vec();
        let rest = b_total - slice_b.iter().sum::<f64>();
        if rest < lo_b {
            return None;
        }
        slice_b.push(rest);
        SliceStack::new(slice_b, x[0], gamma).ok()
    };

    let mut evaluations = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let objective = |x: &[f64], evals: &mut usize, best: &mut Option<(Vec<f64>, f64)>| -> f64 {
        *evals += 1;
        let Some(stack) = stack_of(x) else { return f64::INFINITY };
        let Ok(out) = cascade_numeric(&stack, &step) else { return f64::INFINITY };
        let f = -pulse_metrics(&out).peak_intensity_gain;
        if best.as_ref().is_none_or(|(_, fb)| f < *fb) {
            *best = Some((x.to_vec(), f));
        }
        f
    };

    // initial simplex: prescription plus one 15% step per coordinate
    let mut x0 = vec![tp0];
    x0.extend_from_slice(&baseline.slice_b()[..n - 1]);
    let dim = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for ((v, lo), hi) in x.iter_mut().zip(&lower).zip(&upper) {
            *v = v.clamp(*lo, *hi);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    {
        let f0 = objective(&x0, &mut evaluations, &mut best);
        simplex.push((x0.clone(), f0));
        for d in 0..dim {
            let mut x = x0.clone();
            x[d] *= 1.15;
            clamp(&mut x);
            let f = objective(&x, &mut evaluations, &mut best);
            simplex.push((x, f));
        }
    }

    let (alpha, gamma_e, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (f_worst - f_best).abs() <= 1e-9 * (f_best.abs() + 1e-12) && diameter <= 1e-6 * tp0 {
            converged = true;
            break;
        }
        if evaluations + 1 > budget {
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let mix = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> {
            let mut x: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| ai + w * (ai - bi)).collect();
            clamp(&mut x);
            x
        };

        let reflected = mix(&centroid, &simplex[dim].0, alpha);
        let f_r = objective(&reflected, &mut evaluations, &mut best);
        if f_r < simplex[0].1 {
            if evaluations + 1 <= budget {
                let expanded = mix(&centroid, &simplex[dim].0, gamma_e);
                let f_e = objective(&expanded, &mut evaluations, &mut best);
                simplex[dim] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
            } else {
                simplex[dim] = (reflected, f_r);
            }
        } else if f_r < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_r);
        } else if evaluations + 1 <= budget {
            let contracted = mix(&centroid, &simplex[dim].0, -rho);
            let f_c = objective(&contracted, &mut evaluations, &mut best);
            if f_c < simplex[dim].1 {
                simplex[dim] = (contracted, f_c);
            } else {
                if evaluations + dim > budget {
                    break;
                }
                // shrink towards the best vertex
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = best_x
                        .iter()
                        .zip(&v.0)
                        .map(|(b, o)| b + sigma * (o - b))
                        .collect();
                    clamp(&mut x);
                    let f = objective(&x, &mut evaluations, &mut best);
                    *v = (x, f);
                }
            }
        }
    }

    let (x_best, _) = best.expect("objective evaluated at least once");
    let best_stack = stack_of(&x_best)
        .expect("best-ever point is feasible by construction");
    let out = cascade_numeric(&best_stack, &step)?;
    Ok(OptimizationResult {
        best_stack,
        best_metrics: pulse_metrics(&out),
        evaluations,
        converged,
    })
}
