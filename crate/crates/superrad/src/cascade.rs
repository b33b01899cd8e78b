//! Output of the phase-shifter cascade: closed forms for one, two and
//! three slices, a numeric cascade for any slice count, the
//! just-after-switching peak amplitudes, and the two-switching
//! pulse-stacking comparator.
//!
//! A cascade of N slices carries N phase shifters: one in front of the
//! first slice and one between each pair of neighbours. All switch
//! simultaneously at t_p (retarded time), flipping the field sign for
//! t ≥ t_p at each interface.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::propagation::{
    convolve_response, step_response_series, AbsorberSpec, TimeGrid, Waveform,
};
use crate::quad::sampled_integral;
use crate::specfun::{bessel_jn, jn_scaled};

const SERIES_TOL: f64 = 1e-10;

/// Ordered slice rates b_k sharing one switching time t_p and decay rate γ.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceStack {
    slice_b: Vec<f64>,
    t_p: f64,
    gamma: f64,
    partial_last: bool,
}

impl SliceStack {
    pub fn new(slice_b: Vec<f64>, t_p: f64, gamma: f64) -> Result<Self> {
        Self::with_partial_last(slice_b, t_p, gamma, false)
    }

    pub(crate) fn with_partial_last(
        slice_b: Vec<f64>,
        t_p: f64,
        gamma: f64,
        partial_last: bool,
    ) -> Result<Self> {
        if slice_b.is_empty() {
            return Err(Error::Domain("slice stack needs at least one slice".into()));
        }
        if !slice_b.iter().all(|&b| b.is_finite() && b > 0.0) {
            return Err(Error::Domain("every slice rate must be finite and > 0".into()));
        }
        if !(t_p > 0.0) || !(gamma > 0.0) {
            return Err(Error::Domain(format!("t_p = {t_p} and gamma = {gamma} must be > 0")));
        }
        Ok(Self { slice_b, t_p, gamma, partial_last })
    }

    pub fn slice_b(&self) -> &[f64] {
        &self.slice_b
    }

    pub fn t_p(&self) -> f64 {
        self.t_p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.slice_b.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total rate of the composed absorber (the slices add).
    pub fn total_b(&self) -> f64 {
        self.slice_b.iter().sum()
    }

    /// True when the last slice is a leftover past the last located
    /// domain boundary rather than a full domain.
    pub fn is_partial_last(&self) -> bool {
        self.partial_last
    }
}

/// Peak characteristics of a burst waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseMetrics {
    /// Signed amplitude at the intensity maximum, in units of Ω₀.
    pub peak_amplitude: f64,
    /// Peak intensity over input intensity (amplitude squared).
    pub peak_intensity_gain: f64,
    pub t_peak: f64,
    /// Full width at half maximum of the intensity, clamped to the grid.
    pub width: f64,
}

/// Measure the burst of a waveform.
pub fn pulse_metrics(w: &Waveform) -> PulseMetrics {
    let amp = w.amplitude();
    let grid = w.grid();
    let (i_peak, &peak) = amp
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1 * a.1).total_cmp(&(b.1 * b.1)))
        .expect("waveform is non-empty");
    let gain = peak * peak;
    if gain == 0.0 {
        return PulseMetrics {
            peak_amplitude: 0.0,
            peak_intensity_gain: 0.0,
            t_peak: grid.t_start(),
            width: 0.0,
        };
    }
    let half = gain / 2.0;
    let intensity = |i: usize| amp[i] * amp[i];
    // walk outwards to the half-maximum crossings, interpolating linearly
    let mut left = grid.time(i_peak);
    for i in (0..i_peak).rev() {
        if intensity(i) < half {
            let frac = (half - intensity(i)) / (intensity(i + 1) - intensity(i));
            left = grid.time(i) + frac * grid.dt();
            break;
        }
        left = grid.time(i);
    }
    let mut right = grid.time(i_peak);
    for i in i_peak + 1..amp.len() {
        if intensity(i) < half {
            let frac = (half - intensity(i - 1)) / (intensity(i) - intensity(i - 1));
            right = grid.time(i - 1) + frac * grid.dt();
            break;
        }
        right = grid.time(i);
    }
    PulseMetrics {
        peak_amplitude: peak,
        peak_intensity_gain: gain,
        t_peak: grid.time(i_peak),
        width: (right - left).max(0.0),
    }
}

/// Validate a cascade grid and snap t_p to its nearest node.
fn cascade_grid_setup(grid: &TimeGrid, b1: f64, t_p: f64) -> Result<usize> {
    if grid.t_start() != 0.0 {
        return Err(Error::Domain("cascade grids must start at t = 0 (step switch-on)".into()));
    }
    if grid.dt() > 1.0 / (64.0 * b1) {
        return Err(Error::Resolution(format!(
            "cascade grid needs ≥ 64 samples per 1/b₁, got {:.1}",
            1.0 / (grid.dt() * b1)
        )));
    }
    let p = grid.nearest_node(t_p)?;
    if p == 0 || p >= grid.len() {
        return Err(Error::Domain(format!("t_p = {t_p} must lie strictly inside the grid")));
    }
    Ok(p)
}

/// Sample Ω_Θ(b, t_i) on the grid (zero for t < 0 handled by the caller
/// through index shifts).
fn series_samples(b: f64, gamma: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    let spec = AbsorberSpec::new(b, gamma)?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| step_response_series(&spec, grid.time(i), SERIES_TOL))
        .collect()
}

/// Kernel samples e^{-γτ} j₁(b τ) on the grid offsets.
fn kernel_samples(b: f64, gamma: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    (0..grid.len())
        .map(|j| {
            let tau = j as f64 * grid.dt();
            Ok((-gamma * tau).exp() * jn_scaled(1, b * tau)?)
        })
        .collect()
}

/// Single slice with the front phase shifter: Ω₁(t) = Ω_Θ(b₁, t) − 2 Ω_Θ(b₁, t − t_p).
pub fn one_slice_output(b1: f64, gamma: f64, t_p: f64, grid: &TimeGrid) -> Result<Waveform> {
    if !(b1 > 0.0) {
        return Err(Error::Domain(format!("one_slice_output: b1 = {b1} must be > 0")));
    }
    let p = cascade_grid_setup(grid, b1, t_p)?;
    let s = series_samples(b1, gamma, grid)?;
    let amp: Vec<f64> =
        (0..grid.len()).map(|i| s[i] - if i >= p { 2.0 * s[i - p] } else { 0.0 }).collect();
    let jumps = vec![
        crate::propagation::Jump { node: 0, height: 1.0 },
        crate::propagation::Jump { node: p, height: -2.0 },
    ];
    Ok(Waveform::from_parts(*grid, amp, jumps, vec![0, p]))
}

/// Two slices: Ω₂(t) = Ω_Θ(b_l, t) + 2 Ω_Θ(b_l, t − t_p) − 2Θ(t − t_p) Ω₁₂(t),
/// where Ω₁₂ applies the second slice to the unflipped part of the first
/// slice's output. Its integral uses the series inside the integrand, so
/// no nested quadrature appears.
pub fn two_slice_output(stack: &SliceStack, grid: &TimeGrid) -> Result<Waveform> {
    if stack.len() != 2 {
        return Err(Error::Domain(format!("two_slice_output: expected 2 slices, got {}", stack.len())));
    }
    let (b1, b2) = (stack.slice_b()[0], stack.slice_b()[1]);
    let g = stack.gamma();
    let p = cascade_grid_setup(grid, b1, stack.t_p())?;
    let dt = grid.dt();
    let n = grid.len();

    let s1 = series_samples(b1, g, grid)?;
    let sl = series_samples(b1 + b2, g, grid)?;
    let k2 = kernel_samples(b2, g, grid)?;

    let amp: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, i| {
                let mut v = sl[i];
                if i >= p {
                    // Ω₁₂(t_i) = Ω_Θ(b₁,t_i) − b₂ ∫₀^{t_i−t_p} Ω_Θ(b₁,t_i−τ) e^{-γτ} j₁(b₂τ) dτ
                    buf.clear();
                    buf.extend((0..=i - p).map(|j| s1[i - j] * k2[j]));
                    let om12 = s1[i] - b2 * sampled_integral(buf, dt);
                    v += 2.0 * sl[i - p] - 2.0 * om12;
                }
                v
            },
        )
        .collect();
    let jump_p = 2.0 - 2.0 * s1[p];
    let jumps = vec![
        crate::propagation::Jump { node: 0, height: 1.0 },
        crate::propagation::Jump { node: p, height: jump_p },
    ];
    Ok(Waveform::from_parts(*grid, amp, jumps, vec![0, p]))
}

/// Three slices: Ω₃(t) = Ω_Θ(z₃, t) + 2Θ(t − t_p)[A + B + C + D], with the
/// double integral of D realized as two successive grid convolutions of
/// the slice kernels.
pub fn three_slice_output(stack: &SliceStack, grid: &TimeGrid) -> Result<Waveform> {
    if stack.len() != 3 {
        return Err(Error::Domain(format!("three_slice_output: expected 3 slices, got {}", stack.len())));
    }
    let (b1, b2, b3) = (stack.slice_b()[0], stack.slice_b()[1], stack.slice_b()[2]);
    let g = stack.gamma();
    let p = cascade_grid_setup(grid, b1, stack.t_p())?;
    let dt = grid.dt();
    let n = grid.len();

    let s1 = series_samples(b1, g, grid)?;
    let s2 = series_samples(b1 + b2, g, grid)?;
    let s3 = series_samples(b1 + b2 + b3, g, grid)?;
    let k2 = kernel_samples(b2, g, grid)?;
    let k3 = kernel_samples(b3, g, grid)?;

    // M(u) = ∫₀^u j₁-kernels of slices 2 and 3 folded together
    let m: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, i| {
                buf.clear();
                buf.extend((0..=i).map(|j| k3[j] * k2[i - j]));
                sampled_integral(buf, dt)
            },
        )
        .collect();

    let amp: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, i| {
                let mut v = s3[i];
                if i >= p {
                    let m_upper = i - p;
                    let a = s1[i] - s2[i] - s3[m_upper];
                    buf.clear();
                    buf.extend((0..=m_upper).map(|j| s1[i - j] * k2[j]));
                    let b_term = -b2 * sampled_integral(buf, dt);
                    buf.clear();
                    buf.extend((0..=m_upper).map(|j| (s1[i - j] - s2[i - j]) * k3[j]));
                    let c_term = -b3 * sampled_integral(buf, dt);
                    buf.clear();
                    buf.extend((0..=m_upper).map(|j| s1[i - j] * m[j]));
                    let d_term = b2 * b3 * sampled_integral(buf, dt);
                    v += 2.0 * (a + b_term + c_term + d_term);
                }
                v
            },
        )
        .collect();
    let jump_p = 2.0 * (s1[p] - s2[p] - 1.0);
    let jumps = vec![
        crate::propagation::Jump { node: 0, height: 1.0 },
        crate::propagation::Jump { node: p, height: jump_p },
    ];
    Ok(Waveform::from_parts(*grid, amp, jumps, vec![0, p]))
}

/// General N-slice cascade by direct simulation: flip the running field
/// at t_p before each slice (the first flip is the input-face shifter),
/// then propagate through the slice by grid convolution.
pub fn cascade_numeric(stack: &SliceStack, input: &Waveform) -> Result<Waveform> {
    run_cascade(stack, input, true)
}

/// Same composition with every phase shifter left off: the slices then
/// act as one absorber of rate Σ b_k.
pub fn stack_response(stack: &SliceStack, input: &Waveform) -> Result<Waveform> {
    run_cascade(stack, input, false)
}

fn run_cascade(stack: &SliceStack, input: &Waveform, flips: bool) -> Result<Waveform> {
    let p = input.grid().nearest_node(stack.t_p())?;
    let mut w = input.clone();
    for &b in stack.slice_b() {
        if flips {
            w = w.with_phase_flip(p)?;
        }
        w = convolve_response(&w, &AbsorberSpec::new(b, stack.gamma())?)?;
    }
    Ok(w)
}

/// Signed output amplitude just after the switching, Ω(t_p + 0)/Ω₀.
///
/// N = 1 uses the b ≫ γ form e^{-γt_p} J₀(2√(b₁t_p)) − 2 (which also
/// captures the γ → ∞ limit −2 of the bare flipped edge); N = 2 and
/// N = 3 use the exact step responses. Larger stacks fall back to the
/// numeric cascade evaluated at t_p.
pub fn peak_amplitude_at_tp(stack: &SliceStack) -> Result<f64> {
    let g = stack.gamma();
    let t_p = stack.t_p();
    let b = stack.slice_b();
    let om = |bcum: f64| -> Result<f64> {
        step_response_series(&AbsorberSpec::new(bcum, g)?, t_p, SERIES_TOL)
    };
    match b.len() {
        1 => Ok((-g * t_p).exp() * bessel_jn(0, 2.0 * (b[0] * t_p).sqrt())? - 2.0),
        2 => Ok(om(b[0] + b[1])? + 2.0 - 2.0 * om(b[0])?),
        3 => Ok(-2.0 + 2.0 * om(b[0])? - 2.0 * om(b[0] + b[1])? + om(b[0] + b[1] + b[2])?),
        _ => {
            let b1 = b[0];
            let n = ((64.0 * b1 * t_p).ceil() as usize + 1).max(2);
            let grid = TimeGrid::new(0.0, t_p, n)?;
            let out = cascade_numeric(stack, &Waveform::step(grid))?;
            Ok(*out.amplitude().last().unwrap())
        }
    }
}

/// Maximum amplitude generated by two phase switchings on a single
/// absorber (pulse stacking in time):
/// Ω_max/Ω₀ = 2 − 2 e^{-γt₁} J₀(2√(bt₁)) + e^{-γt₂} J₀(2√(bt₂)).
pub fn stacking_peak(b: f64, gamma: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(b >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::Domain(format!("stacking_peak: b = {b} and gamma = {gamma} must be ≥ 0")));
    }
    if !(t1 >= 0.0) || !(t2 >= 0.0) {
        return Err(Error::Domain(format!("stacking_peak: t1 = {t1} and t2 = {t2} must be ≥ 0")));
    }
    Ok(2.0 - 2.0 * (-gamma * t1).exp() * bessel_jn(0, 2.0 * (b * t1).sqrt())?
        + (-gamma * t2).exp() * bessel_jn(0, 2.0 * (b * t2).sqrt())?)
}
