//! Quadrature plumbing: adaptive Gauss–Kronrod panels for continuous
//! integrands and Gregory end-corrected weights for integrals of
//! uniformly sampled data (used by the grid convolutions).

use crate::error::{Error, Result};

// 15-point Kronrod / 7-point Gauss pair on [-1, 1] (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One Kronrod-15 panel. Returns (integral, error estimate |K15 - G7|).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over [a, b].
///
/// The interval is pre-split into panels no wider than `max_panel` (pass
/// `f64::INFINITY` to disable) so oscillatory integrands start resolved,
/// then panels are bisected greedily until the summed error estimate
/// drops below `abs_tol`.
pub(crate) fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panel: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let span = b - a;
    let n0 = if max_panel.is_finite() {
        ((span / max_panel).ceil() as usize).clamp(1, 4096)
    } else {
        1
    };
    // (neg error, lo, hi, integral, err) max-heap on error via sorted Vec
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(n0 + 64);
    let mut total = 0.0;
    let mut total_err = 0.0;
    for i in 0..n0 {
        let lo = a + span * i as f64 / n0 as f64;
        let hi = a + span * (i + 1) as f64 / n0 as f64;
        let (v, e) = kronrod15(&f, lo, hi);
        total += v;
        total_err += e;
        panels.push((lo, hi, v, e));
    }
    let mut splits = 0usize;
    while total_err > abs_tol && splits < 2000 {
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty panel list");
        let (lo, hi, v, e) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        total += v1 + v2 - v;
        total_err += e1 + e2 - e;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        splits += 1;
    }
    if total_err > abs_tol {
        return Err(Error::Quadrature { error: total_err, tol: abs_tol });
    }
    Ok(total)
}

/// Integral of uniformly sampled values f_0..f_m over [0, m·dt] using the
/// trapezoid rule with third-order Gregory end corrections (global error
/// O(dt⁴) for smooth data). Short ranges fall back to the closed
/// Newton–Cotes rule of matching length.
pub(crate) fn sampled_integral(f: &[f64], dt: f64) -> f64 {
    let m = f.len().wrapping_sub(1);
    match m {
        0 | usize::MAX => 0.0,
        1 => dt * 0.5 * (f[0] + f[1]),
        2 => dt * (f[0] + 4.0 * f[1] + f[2]) / 3.0,
        3 => dt * 0.375 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]),
        4 => dt * (7.0 * (f[0] + f[4]) + 32.0 * (f[1] + f[3]) + 12.0 * f[2]) / 22.5,
        _ => {
            let mut s = GREG_END[0] * (f[0] + f[m])
                + GREG_END[1] * (f[1] + f[m - 1])
                + GREG_END[2] * (f[2] + f[m - 2]);
            for v in &f[3..=m - 3] {
                s += v;
            }
            dt * s
        }
    }
}

/// Gregory end-correction weights (order 3): 3/8, 7/6, 23/24, then 1.
const GREG_END: [f64; 3] = [0.375, 7.0 / 6.0, 23.0 / 24.0];

/// Like [`sampled_integral`], but the integrand is only piecewise smooth:
/// `cuts` lists interior sample indices where smoothness is lost, and the
/// rule is applied on each smooth piece separately.
pub(crate) fn sampled_integral_piecewise(f: &[f64], dt: f64, cuts: &[usize]) -> f64 {
    let m = match f.len() {
        0 | 1 => return 0.0,
        len => len - 1,
    };
    let mut s = 0.0;
    let mut lo = 0usize;
    for &c in cuts {
        if c > lo && c < m {
            s += sampled_integral(&f[lo..=c], dt);
            lo = c;
        }
    }
    s + sampled_integral(&f[lo..=m], dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn adaptive_polynomial_is_exact() {
        let v = integrate_adaptive(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, f64::INFINITY)
            .unwrap();
        // x⁴/4 - x² + x over [-1, 3]
        assert_relative_eq!(v, 16.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_oscillatory() {
        // int_0^10 sin(x) dx = 1 - cos(10)
        let v = integrate_adaptive(f64::sin, 0.0, 10.0, 1e-12, 0.5).unwrap();
        assert_relative_eq!(v, 1.0 - 10.0_f64.cos(), epsilon = 1e-12);
    }

    #[test]
    fn sampled_integral_fourth_order() {
        // int_0^1 e^x dx, halving dt must shrink the error ~16x
        let exact = 1.0_f64.exp() - 1.0;
        let eval = |n: usize| {
            let dt = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * dt).exp()).collect();
            (sampled_integral(&f, dt) - exact).abs()
        };
        let (e1, e2) = (eval(65), eval(129));
        assert!(e1 / e2 > 12.0 && e1 / e2 < 20.0, "ratio {}", e1 / e2);
        assert!(e2 < 1e-9);
    }

    #[test]
    fn sampled_integral_short_ranges() {
        // linear data is exact under every rule length
        for n in 2..=8usize {
            let dt = 0.1;
            let f: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 * dt + 0.7).collect();
            let top = (n - 1) as f64 * dt;
            let exact = 1.5 * top * top + 0.7 * top;
            assert_relative_eq!(sampled_integral(&f, dt), exact, max_relative = 1e-12);
        }
        // cubics are exact from Simpson length upwards
        for n in 3..=8usize {
            let dt = 0.1;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * dt).powi(3)).collect();
            let exact = ((n - 1) as f64 * dt).powi(4) / 4.0;
            assert_relative_eq!(sampled_integral(&f, dt), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn piecewise_handles_a_kink() {
        // f(x) = |x - 1| on [0, 2]: exact integral 1
        let n = 257usize;
        let dt = 2.0 / (n - 1) as f64;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * dt - 1.0).abs()).collect();
        let with_cut = sampled_integral_piecewise(&f, dt, &[(n - 1) / 2]);
        assert_relative_eq!(with_cut, 1.0, max_relative = 1e-12);
    }
}
