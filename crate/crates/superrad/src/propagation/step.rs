//! Step-pulse response of a single absorber: the smooth part of the
//! Green's function, the transmitted field by fast series and by
//! adaptive quadrature (two integral forms), and the atomic coherence.

use super::AbsorberSpec;
use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::specfun::{bessel_jn, exp_series_tail_ln, jn_scaled};

/// Smooth (non-δ) part of the absorber Green's function,
/// e^{-γt} √(b/t) J₁(2√(bt)) = b e^{-γt} j₁(bt), continued through t = 0
/// where it equals b.
pub fn greens_kernel_smooth(spec: &AbsorberSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("greens_kernel_smooth: t = {t} must be ≥ 0")));
    }
    let b = spec.b();
    Ok(b * (-spec.gamma() * t).exp() * jn_scaled(1, b * t)?)
}

/// Transmitted step-pulse field Ω_Θ(t)/Ω₀ by the fast series
///
/// ```text
/// e^{-b/γ} + e^{-γt} Σ_{n≥0} (γt)^n T_n(b/γ) j_n(bt)
/// ```
///
/// truncated once a rigorous bound on the remaining terms stays below
/// `tol` for three consecutive orders (hard cap 400 terms). The
/// coefficients (γt)^n T_n(b/γ) span hundreds of orders of magnitude
/// before the j_n factor pulls the terms back down, so each term is
/// assembled in log space with u^{n/2} folded out of j_n (see
/// [`series_sum`]).
pub fn step_response_series(spec: &AbsorberSpec, t: f64, tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("step_response_series: t = {t} must be ≥ 0")));
    }
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::Domain(format!("step_response_series: tol = {tol} must be in (0, 1e-3)")));
    }
    if t == 0.0 || spec.b() == 0.0 {
        return Ok(1.0);
    }
    let (b, g) = (spec.b(), spec.gamma());
    let x = b / g;
    let gt = g * t;
    let e_inf = (-x).exp();
    if gt > 709.0 {
        // the transient prefactor e^{-γt} has underflowed to exactly 0
        return Ok(e_inf);
    }
    let head = -(-x).exp_m1() * jn_scaled(0, b * t)?; // T_0(x) J_0(2√(bt))
    let tail = series_sum(b * t, gt, x, 0.0, tol)?;
    Ok(e_inf + (-gt).exp() * (head + tail))
}

/// Σ_{n≥1} exp(extra + n ln(γt) + ln T_n(x)) j_n(u), the shared
/// transient sum of the field and coherence series.
///
/// For u ≥ 1 each term is computed as exp(n ln(γt/√u) + ln T_n)·J_n(2√u),
/// whose scaled coefficient stays below e^{√u}; for u < 1 the plain
/// coefficient is finite because (γt)^n x^n = u^n < 1 caps it. Truncation
/// uses |J_n| ≤ 1 (u ≥ 1) or |j_n| ≤ 1/n! (u < 1) and requires the bound
/// to stay below `tol` three orders in a row.
fn series_sum(u: f64, gt: f64, x: f64, extra: f64, tol: f64) -> Result<f64> {
    let ln_gt = gt.ln();
    let ln_u = u.ln();
    let mut acc = 0.0_f64;
    let mut ln_inv_fact = 0.0_f64;
    let mut below = 0u32;
    let mut bound = f64::INFINITY;
    for n in 1..=400u32 {
        let ln_t = exp_series_tail_ln(n, x)?;
        ln_inv_fact -= (n as f64).ln();
        let (term, b_n) = if u >= 1.0 {
            let sp = (extra + n as f64 * (ln_gt - 0.5 * ln_u) + ln_t).exp();
            (sp * bessel_jn(n, 2.0 * u.sqrt())?, sp)
        } else {
            let c = (extra + n as f64 * ln_gt + ln_t).exp();
            (c * jn_scaled(n, u)?, c * ln_inv_fact.exp())
        };
        acc += term;
        bound = b_n;
        if bound < tol {
            below += 1;
            if below >= 3 {
                return Ok(acc);
            }
        } else {
            below = 0;
        }
    }
    Err(Error::Convergence { partial: acc, bound, terms: 400 })
}

/// Ω_Θ(t)/Ω₀ by adaptive quadrature of
/// e^{-γt} J₀(2√(bt)) + γ ∫₀ᵗ e^{-γτ} J₀(2√(bτ)) dτ.
///
/// The substitution τ = s² makes the Bessel oscillation uniform in s;
/// panels are capped at a quarter oscillation period π/(4√b).
pub fn step_response_quadrature(spec: &AbsorberSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("step_response_quadrature: t = {t} must be ≥ 0")));
    }
    if t == 0.0 || spec.b() == 0.0 {
        return Ok(1.0);
    }
    let (b, g) = (spec.b(), spec.gamma());
    let i = coherence_integral(b, g, t, (1e-10 / g.max(1.0)).max(1e-14))?;
    Ok((-g * t).exp() * j0_of(b * t) + g * i)
}

/// Ω_Θ(t)/Ω₀ by the equivalent form 1 - ∫₀ᵗ e^{-γτ} √(b/τ) J₁(2√(bτ)) dτ.
pub fn step_response_quadrature_j1(spec: &AbsorberSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("step_response_quadrature_j1: t = {t} must be ≥ 0")));
    }
    if t == 0.0 || spec.b() == 0.0 {
        return Ok(1.0);
    }
    let (b, g) = (spec.b(), spec.gamma());
    let sb = b.sqrt();
    // τ = s²: integrand becomes 2√b e^{-γs²} J₁(2√b s)
    let f = |s: f64| {
        2.0 * sb * (-g * s * s).exp() * crate::specfun::bessel_jn(1, 2.0 * sb * s).expect("finite")
    };
    let panel = quarter_period(b);
    let integral = integrate_adaptive(f, 0.0, t.sqrt(), 1e-10, panel)?;
    Ok(1.0 - integral)
}

/// Im σ_eg(t)/Ω₀ for the step input, by the series
///
/// ```text
/// e^{-γt} Σ_{n≥1} t (γt)^{n-1} T_n(b/γ) j_n(bt)
///   + e^{-b/γ} [1 - e^{-γt} J₀(2√(bt))]/γ
/// ```
///
/// The 1/γ of the textbook form is folded into the coefficients, so the
/// γ → 0 limit t e^{-γt} j₁(bt) emerges without any 0·∞ ambiguity.
pub fn coherence_step(spec: &AbsorberSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("coherence_step: t = {t} must be ≥ 0")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (b, g) = (spec.b(), spec.gamma());
    if b == 0.0 {
        // front face: σ̇ = -γσ + iΩ₀ from rest
        return Ok(-(-g * t).exp_m1() / g);
    }
    let x = b / g;
    let u = b * t;
    let gt = g * t;
    let e_inf = (-x).exp();
    let e_t = (-gt).exp();
    let steady = e_inf * (1.0 - e_t * j0_of(u)) / g;
    if gt > 709.0 {
        return Ok(steady);
    }
    // coefficients t (γt)^{n-1} T_n = exp(-ln γ + n ln(γt) + ln T_n)
    let tol = 1e-12 * t.max(1.0);
    let transient = series_sum(u, gt, x, -g.ln(), tol)?;
    Ok(e_t * transient + steady)
}

/// Im σ_eg(t)/Ω₀ by direct quadrature of ∫₀ᵗ e^{-γτ} J₀(2√(bτ)) dτ.
pub fn coherence_step_quadrature(spec: &AbsorberSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("coherence_step_quadrature: t = {t} must be ≥ 0")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    coherence_integral(spec.b(), spec.gamma(), t, 1e-12)
}

fn coherence_integral(b: f64, g: f64, t: f64, tol: f64) -> Result<f64> {
    let f = |s: f64| 2.0 * s * (-g * s * s).exp() * j0_of(b * s * s);
    integrate_adaptive(f, 0.0, t.sqrt(), tol, quarter_period(b))
}

/// Quarter period of J₁(2√b s) in the s = √τ variable.
fn quarter_period(b: f64) -> f64 {
    if b > 0.0 {
        std::f64::consts::PI / (4.0 * b.sqrt())
    } else {
        f64::INFINITY
    }
}

fn j0_of(u: f64) -> f64 {
    jn_scaled(0, u).expect("u ≥ 0")
}
