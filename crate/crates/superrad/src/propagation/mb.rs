//! Direct integration of the atom–field equations in the retarded frame.
//!
//! With depth measured by cumulative superradiant rate β (dβ = αγ dz/2)
//! and s = Im σ_eg, exact resonance reduces the coupled system to two
//! real equations
//!
//! ```text
//! ∂s/∂t =  Ω − γ s
//! ∂Ω/∂β = −s
//! ```
//!
//! marched here with trapezoidal (Crank–Nicolson) updates in both t and
//! β, which is second-order accurate in each step.

use super::{AbsorberSpec, CoherenceSeries, Waveform};
use crate::error::{Error, Result};

/// Result of a Maxwell–Bloch march: the transmitted waveform and the
/// coherence history at every depth node (index 0 = entry face).
#[derive(Debug, Clone)]
pub struct MbSolution {
    pub output: Waveform,
    pub coherence: Vec<CoherenceSeries>,
    /// Cumulative superradiant rate at each depth node.
    pub depth_b: Vec<f64>,
}

/// March `input` through an absorber of total rate `spec.b()` using
/// `n_z` uniform depth steps.
pub fn propagate_mb(input: &Waveform, spec: &AbsorberSpec, n_z: usize) -> Result<MbSolution> {
    if n_z < 8 {
        return Err(Error::Resolution(format!("propagate_mb: n_z = {n_z} must be ≥ 8")));
    }
    let grid = *input.grid();
    let dt = grid.dt();
    let (b, g) = (spec.b(), spec.gamma());
    if g * dt > 0.1 || b * dt > 0.1 {
        return Err(Error::Resolution(format!(
            "propagate_mb: need γΔt ≤ 0.1 and bΔt ≤ 0.1, got γΔt = {:.3}, bΔt = {:.3}",
            g * dt,
            b * dt
        )));
    }
    let n_t = grid.len();
    let db = b / n_z as f64;
    // coefficients of the time Crank–Nicolson step for s
    let decay = (1.0 - g * dt / 2.0) / (1.0 + g * dt / 2.0);
    let drive = (dt / 2.0) / (1.0 + g * dt / 2.0);
    let denom = 1.0 + db * drive / 2.0;

    // left-limit corrections at registered jumps keep the trapezoid in the
    // cell ending at a jump node second-order accurate
    let mut left_corr = vec![0.0; n_t];
    for j in input.jumps() {
        left_corr[j.node] = j.height;
    }

    let mut om: Vec<f64> = input.amplitude().to_vec();
    let mut s = vec![0.0_f64; n_t];
    for j in 1..n_t {
        s[j] = decay * s[j - 1] + drive * (om[j] - left_corr[j] + om[j - 1]);
    }
    let mut coherence = Vec::with_capacity(n_z + 1);
    coherence.push(CoherenceSeries::new(grid, s.clone())?);

    let mut om_next = vec![0.0_f64; n_t];
    let mut s_next = vec![0.0_f64; n_t];
    for _ in 0..n_z {
        om_next[0] = om[0];
        s_next[0] = 0.0;
        for j in 1..n_t {
            let omn = (om[j]
                - (db / 2.0)
                    * (s[j]
                        + decay * s_next[j - 1]
                        + drive * (om_next[j - 1] - left_corr[j])))
                / denom;
            om_next[j] = omn;
            s_next[j] = decay * s_next[j - 1] + drive * (omn - left_corr[j] + om_next[j - 1]);
        }
        std::mem::swap(&mut om, &mut om_next);
        std::mem::swap(&mut s, &mut s_next);
        coherence.push(CoherenceSeries::new(grid, s.clone())?);
    }

    let depth_b = (0..=n_z).map(|k| k as f64 * db).collect();
    let output = Waveform::from_parts(grid, om, input.jumps().to_vec(), input.breaks().to_vec());
    Ok(MbSolution { output, coherence, depth_b })
}
