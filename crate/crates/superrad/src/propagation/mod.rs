//! Propagation of weak resonant pulses through a thick absorber.
//!
//! Everything is expressed in one dimensionless unit system: rates (the
//! superradiant rate b and the coherence decay rate γ) are inverse times,
//! depth is carried as cumulative b (only the product of absorption
//! coefficient and length ever matters), field amplitudes are in units of
//! the input step height Ω₀, and the retarded time convention absorbs the
//! z/c delay. At exact resonance the field stays real and the atomic
//! coherence stays pure imaginary, so waveforms are real-valued and the
//! coherence is represented by its imaginary part.

mod convolve;
mod mb;
mod spectral;
mod step;

pub use convolve::convolve_response;
pub use mb::{propagate_mb, MbSolution};
pub use spectral::{spectral_propagate, transfer_function};
pub use step::{
    coherence_step, coherence_step_quadrature, greens_kernel_smooth, step_response_quadrature,
    step_response_quadrature_j1, step_response_series,
};

use crate::error::{Error, Result};

/// A homogeneously broadened absorber segment: superradiant rate
/// b = αzγ/2 (cumulative over the segment depth) and coherence decay
/// rate γ, in shared dimensionless inverse-time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberSpec {
    b: f64,
    gamma: f64,
}

impl AbsorberSpec {
    pub fn new(b: f64, gamma: f64) -> Result<Self> {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::Domain(format!("superradiant rate b = {b} must be finite and ≥ 0")));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Domain(format!("decay rate gamma = {gamma} must be finite and > 0")));
        }
        Ok(Self { b, gamma })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same γ, different cumulative depth.
    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(b, self.gamma)
    }
}

/// Uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        if !t_start.is_finite() || !t_end.is_finite() || t_start >= t_end {
            return Err(Error::Domain(format!(
                "time grid requires finite t_start < t_end, got [{t_start}, {t_end}]"
            )));
        }
        if n_samples < 2 {
            return Err(Error::Domain(format!("time grid needs ≥ 2 samples, got {n_samples}")));
        }
        Ok(Self { t_start, t_end, n: n_samples })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.dt()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.time(i))
    }

    /// Index of the grid node nearest to `t`; `t` must lie on the grid.
    pub fn nearest_node(&self, t: f64) -> Result<usize> {
        let idx = ((t - self.t_start) / self.dt()).round();
        if idx < 0.0 || idx > (self.n - 1) as f64 {
            return Err(Error::Domain(format!(
                "time {t} outside grid [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(idx as usize)
    }
}

/// A discontinuity of a sampled waveform, located exactly on a grid node.
/// `height` is the value just after the node minus the value just before.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub node: usize,
    pub height: f64,
}

/// Real field amplitude sampled on a uniform grid, in units of Ω₀.
///
/// Samples are right-limits: `amplitude[i]` is the value at `t_i + 0`.
/// Known discontinuities are carried alongside the samples so that the
/// propagation routines can treat them analytically (the δ part of the
/// absorber response is never discretized); nodes listed in `jumps` (and
/// nodes that carried a jump earlier in a processing chain) are also
/// treated as reduced-smoothness breakpoints by the grid convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    grid: TimeGrid,
    amplitude: Vec<f64>,
    jumps: Vec<Jump>,
    breaks: Vec<usize>,
}

impl Waveform {
    /// Wrap raw samples, treating them as smooth between nodes. A nonzero
    /// first sample is still causal (zero before `t_start`); that leading
    /// edge is handled by the integration limits, not by a δ term.
    pub fn from_samples(grid: TimeGrid, amplitude: Vec<f64>) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::Domain(format!(
                "amplitude length {} does not match grid length {}",
                amplitude.len(),
                grid.len()
            )));
        }
        if !amplitude.iter().all(|a| a.is_finite()) {
            return Err(Error::Domain("amplitude contains non-finite samples".into()));
        }
        Ok(Self { grid, amplitude, jumps: Vec::new(), breaks: Vec::new() })
    }

    /// Unit step switching on at the first grid node.
    pub fn step(grid: TimeGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            amplitude: vec![1.0; n],
            jumps: vec![Jump { node: 0, height: 1.0 }],
            breaks: vec![0],
        }
    }

    /// Rectangular pulse: on at the first node, off at `off_node`.
    pub fn rect(grid: TimeGrid, off_node: usize) -> Result<Self> {
        if off_node == 0 || off_node >= grid.len() {
            return Err(Error::Domain(format!(
                "rect off_node {} must lie strictly inside the grid",
                off_node
            )));
        }
        let mut amplitude = vec![1.0; grid.len()];
        for a in &mut amplitude[off_node..] {
            *a = 0.0;
        }
        Ok(Self {
            grid,
            amplitude,
            jumps: vec![Jump { node: 0, height: 1.0 }, Jump { node: off_node, height: -1.0 }],
            breaks: vec![0, off_node],
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Samples with every registered discontinuity subtracted out.
    pub fn smooth_part(&self) -> Vec<f64> {
        let mut s = self.amplitude.clone();
        for j in &self.jumps {
            for v in &mut s[j.node..] {
                *v -= j.height;
            }
        }
        s
    }

    /// π phase shifter switched on at grid node `node`: flips the sign of
    /// every sample from that node on (inclusive — samples are
    /// right-limits) and updates the discontinuity bookkeeping.
    pub fn with_phase_flip(&self, node: usize) -> Result<Self> {
        if node >= self.grid.len() {
            return Err(Error::Domain(format!("flip node {node} outside grid")));
        }
        let mut out = self.clone();
        let right = out.amplitude[node];
        let prior = out.jumps.iter().find(|j| j.node == node).map_or(0.0, |j| j.height);
        let left = right - prior;
        for v in &mut out.amplitude[node..] {
            *v = -*v;
        }
        for j in &mut out.jumps {
            if j.node > node {
                j.height = -j.height;
            }
        }
        let new_height = -right - left;
        match out.jumps.iter_mut().find(|j| j.node == node) {
            Some(j) => j.height = new_height,
            None => out.jumps.push(Jump { node, height: new_height }),
        }
        out.jumps.sort_by_key(|j| j.node);
        out.jumps.retain(|j| j.height != 0.0 || node == j.node);
        if !out.breaks.contains(&node) {
            out.breaks.push(node);
            out.breaks.sort_unstable();
        }
        Ok(out)
    }

    pub(crate) fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    pub(crate) fn from_parts(
        grid: TimeGrid,
        amplitude: Vec<f64>,
        jumps: Vec<Jump>,
        breaks: Vec<usize>,
    ) -> Self {
        Self { grid, amplitude, jumps, breaks }
    }
}

/// Imaginary part of the atomic coherence σ_eg sampled in time, in units
/// of Ω₀ × (reference time).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    grid: TimeGrid,
    im_sigma: Vec<f64>,
}

impl CoherenceSeries {
    pub fn new(grid: TimeGrid, im_sigma: Vec<f64>) -> Result<Self> {
        if im_sigma.len() != grid.len() {
            return Err(Error::Domain(format!(
                "coherence length {} does not match grid length {}",
                im_sigma.len(),
                grid.len()
            )));
        }
        if !im_sigma.iter().all(|a| a.is_finite()) {
            return Err(Error::Domain("coherence contains non-finite samples".into()));
        }
        Ok(Self { grid, im_sigma })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn im_sigma(&self) -> &[f64] {
        &self.im_sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 2).is_ok());
        assert!(TimeGrid::new(1.0, 1.0, 8).is_err());
        assert!(TimeGrid::new(2.0, 1.0, 8).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_sampling() {
        let g = TimeGrid::new(0.0, 2.0, 5).unwrap();
        assert_eq!(g.dt(), 0.5);
        assert_eq!(g.times().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.nearest_node(1.5).unwrap(), 3);
        assert!(g.nearest_node(3.0).is_err());
    }

    #[test]
    fn absorber_spec_validation() {
        assert!(AbsorberSpec::new(1.0, 0.1).is_ok());
        assert!(AbsorberSpec::new(0.0, 0.1).is_ok());
        assert!(AbsorberSpec::new(-1.0, 0.1).is_err());
        assert!(AbsorberSpec::new(1.0, 0.0).is_err());
        assert!(AbsorberSpec::new(1.0, -0.5).is_err());
    }

    #[test]
    fn step_smooth_part_is_zero() {
        let g = TimeGrid::new(0.0, 1.0, 9).unwrap();
        let w = Waveform::step(g);
        assert!(w.smooth_part().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_flip_bookkeeping() {
        let g = TimeGrid::new(0.0, 1.0, 9).unwrap();
        let w = Waveform::step(g).with_phase_flip(4).unwrap();
        assert_eq!(&w.amplitude()[..4], &[1.0; 4]);
        assert_eq!(&w.amplitude()[4..], &[-1.0; 5]);
        // jump at the flip: -w(t_p+) - w(t_p-) = -2
        let j = w.jumps().iter().find(|j| j.node == 4).unwrap();
        assert_eq!(j.height, -2.0);
        // leading edge unchanged
        let j0 = w.jumps().iter().find(|j| j.node == 0).unwrap();
        assert_eq!(j0.height, 1.0);
        // double flip restores the signal
        let w2 = w.with_phase_flip(4).unwrap();
        assert_eq!(w2.amplitude(), &[1.0; 9]);
        assert_eq!(w2.jumps().iter().find(|j| j.node == 4).unwrap().height, 0.0);
    }
}
