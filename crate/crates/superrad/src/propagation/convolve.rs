//! Grid convolution with the absorber Green's function.
//!
//! The response splits as identity minus the smooth kernel: the δ part is
//! handled exactly (the input passes through unattenuated), registered
//! discontinuities are convolved against a high-accuracy cumulative
//! kernel integral, and only the genuinely smooth remainder goes through
//! the sampled-data rule.

use rayon::prelude::*;

use super::{step::greens_kernel_smooth, AbsorberSpec, Waveform};
use crate::error::{Error, Result};
use crate::quad::{integrate_adaptive, sampled_integral_piecewise};

/// Propagate `input` through one absorber:
/// output(t) = input(t) − ∫₀^{t−t_start} input(t−τ) K(τ) dτ with
/// K(τ) = b e^{-γτ} j₁(bτ). Discontinuities pass through unchanged.
pub fn convolve_response(input: &Waveform, spec: &AbsorberSpec) -> Result<Waveform> {
    let grid = *input.grid();
    let n = grid.len();
    let dt = grid.dt();
    let (b, g) = (spec.b(), spec.gamma());
    if b == 0.0 {
        return Ok(input.clone());
    }
    // kernel changes by ~(γ + b/2)Δt across the first sample
    let variation = (g + 0.5 * b) * dt;
    if variation > 0.1 {
        return Err(Error::Resolution(format!(
            "kernel varies by {:.0}% between samples near τ=0 (limit 10%): refine the grid",
            variation * 100.0
        )));
    }

    let kernel: Vec<f64> = (0..n)
        .map(|j| greens_kernel_smooth(spec, j as f64 * dt))
        .collect::<Result<_>>()?;
    let cum_kernel = cumulative_kernel(spec, n, dt)?;

    let smooth = input.smooth_part();
    let breaks = input.breaks();
    let conv: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, i| {
                if i == 0 {
                    return 0.0;
                }
                buf.clear();
                buf.extend((0..=i).map(|j| smooth[i - j] * kernel[j]));
                // input breakpoints at node p appear at τ-index i − p
                let mut cuts: Vec<usize> =
                    breaks.iter().filter(|&&p| p > 0 && p < i).map(|&p| i - p).collect();
                cuts.sort_unstable();
                sampled_integral_piecewise(buf, dt, &cuts)
            },
        )
        .collect();

    let mut amp: Vec<f64> = (0..n).map(|i| input.amplitude()[i] - conv[i]).collect();
    for j in input.jumps() {
        for i in j.node..n {
            amp[i] -= j.height * cum_kernel[i - j.node];
        }
    }
    Ok(Waveform::from_parts(grid, amp, input.jumps().to_vec(), input.breaks().to_vec()))
}

/// G(j·dt) = ∫₀^{j dt} K(τ) dτ by one Kronrod panel per grid cell (the
/// resolution check above guarantees the kernel is unoscillatory on a cell).
fn cumulative_kernel(spec: &AbsorberSpec, n: usize, dt: f64) -> Result<Vec<f64>> {
    let mut g = Vec::with_capacity(n);
    g.push(0.0);
    let mut acc = 0.0;
    for j in 1..n {
        let lo = (j - 1) as f64 * dt;
        let hi = j as f64 * dt;
        acc += integrate_adaptive(
            |tau| greens_kernel_smooth(spec, tau).expect("τ ≥ 0"),
            lo,
            hi,
            1e-13,
            f64::INFINITY,
        )?;
        g.push(acc);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{step_response_quadrature, TimeGrid};
    use approx::assert_relative_eq;

    #[test]
    fn zero_thickness_is_identity() {
        let grid = TimeGrid::new(0.0, 10.0, 257).unwrap();
        let w = Waveform::step(grid);
        let out = convolve_response(&w, &AbsorberSpec::new(0.0, 0.1).unwrap()).unwrap();
        assert_eq!(out.amplitude(), w.amplitude());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let grid = TimeGrid::new(0.0, 10.0, 11).unwrap();
        let w = Waveform::step(grid);
        let err = convolve_response(&w, &AbsorberSpec::new(1.0, 0.1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
    }

    #[test]
    fn step_matches_quadrature_route() {
        let spec = AbsorberSpec::new(1.0, 0.05).unwrap();
        let grid = TimeGrid::new(0.0, 20.0, 1401).unwrap();
        let out = convolve_response(&Waveform::step(grid), &spec).unwrap();
        for (i, t) in grid.times().enumerate().step_by(100) {
            let want = step_response_quadrature(&spec, t).unwrap();
            assert_relative_eq!(out.amplitude()[i], want, epsilon = 1e-8);
        }
    }

    #[test]
    fn leading_edge_identity() {
        // output value at the jump equals the input jump
        let spec = AbsorberSpec::new(2.0, 0.3).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 801).unwrap();
        let w = Waveform::step(grid);
        let out = convolve_response(&w, &spec).unwrap();
        assert_eq!(out.amplitude()[0], 1.0);
        assert_eq!(out.jumps(), w.jumps());
    }

    #[test]
    fn chaining_composes_thickness() {
        let g = 0.1;
        let grid = TimeGrid::new(0.0, 30.0, 2048).unwrap();
        let w = Waveform::step(grid);
        let y1 = convolve_response(&w, &AbsorberSpec::new(0.4, g).unwrap()).unwrap();
        let y12 = convolve_response(&y1, &AbsorberSpec::new(0.6, g).unwrap()).unwrap();
        let single = convolve_response(&w, &AbsorberSpec::new(1.0, g).unwrap()).unwrap();
        let worst = y12
            .amplitude()
            .iter()
            .zip(single.amplitude())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "composition residual {worst}");
    }
}
