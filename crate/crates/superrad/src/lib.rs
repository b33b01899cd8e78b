//! Step-pulse propagation through a thick resonant absorber and the
//! superradiant burst released when the absorber is sliced along its
//! coherence domains and π phase shifters fire.
//!
//! A weak step pulse entering a resonant medium builds up spatial domains
//! of atomic coherence with alternating sign — a subradiant, field-locking
//! configuration. Cutting the medium at the coherence zeros and flipping
//! the field phase in front of every slice at the right moment rephases
//! all domains at once, and the stored excitation exits as one short,
//! strong pulse.
//!
//! The crate computes the pieces of that story three independent ways and
//! cross-validates them:
//!
//! * [`propagation`] — single-absorber transmission of arbitrary weak
//!   waveforms: fast Bessel series, adaptive quadrature, grid convolution
//!   against the Green's function, a Fourier-domain route, and direct
//!   Maxwell–Bloch marching, plus the atomic coherence of the step
//!   response.
//! * [`specfun`] — the Bessel/incomplete-gamma kernel everything rests on.
//! * [`domains`] — spatial field/coherence profiles and the coherence
//!   zeros that define the slice boundaries.
//! * [`cascade`] — closed-form burst waveforms for one to three slices,
//!   a numeric cascade for any slice count, and peak formulas.
//! * [`optimize`] — simplex tuning of switching time and boundaries at
//!   finite γ, where the analytic prescription is no longer optimal.
//!
//! Everything is dimensionless: rates b (superradiant, b = αzγ/2) and γ
//! (coherence decay) are inverse times relative to a caller-chosen
//! reference, fields are in units of the input step amplitude Ω₀, and
//! depth is carried as cumulative b.

pub mod cascade;
pub mod domains;
mod error;
pub mod optimize;
pub mod propagation;
mod quad;
pub mod specfun;

pub use cascade::{
    cascade_numeric, one_slice_output, peak_amplitude_at_tp, pulse_metrics, stack_response,
    stacking_peak, three_slice_output, two_slice_output, PulseMetrics, SliceStack,
};
pub use domains::{
    domain_boundaries, slice_stack_from_domains, spatial_profiles, DomainDecomposition,
    SpatialProfile,
};
pub use error::{Error, Result};
pub use optimize::{optimize_stack, prescribed_stack, OptimizationResult};
pub use propagation::{
    coherence_step, coherence_step_quadrature, convolve_response, greens_kernel_smooth,
    propagate_mb, spectral_propagate, step_response_quadrature, step_response_quadrature_j1,
    step_response_series, transfer_function, AbsorberSpec, CoherenceSeries, Jump, MbSolution,
    TimeGrid, Waveform,
};
