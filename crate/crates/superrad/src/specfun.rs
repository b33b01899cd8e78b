//! Special-function kernel: Bessel functions of the first kind, the scaled
//! family j_n(u) = J_n(2√u)/u^{n/2}, zeros of J₁, and the series
//! coefficients f_n(b, t) = (γt)^n T_n(b/γ).
//!
//! J_n is evaluated by the ascending power series where it is
//! cancellation-free and by Miller's normalized backward recurrence
//! everywhere else. T_n is the regularized lower incomplete gamma
//! P(n+1, x), i.e. the tail sum e^{-x} Σ_{k>n} x^k/k!, which stays in
//! [0, 1] for any x instead of collapsing to 1 - (huge)·(tiny).

use crate::error::{Error, Result};

/// J_n(x), Bessel function of the first kind of nonnegative integer order.
///
/// Relative accuracy is ~1e-13 or better for |x| ≤ 100 away from zeros
/// of J_n (absolute accuracy ~1e-15 near them).
pub fn bessel_jn(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_jn: non-finite argument {x}")));
    }
    // J_n(-x) = (-1)^n J_n(x)
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let x = x.abs();
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    // The power series has no destructive cancellation while the terms
    // decrease from the start (x²/4 ≤ n+1); for x ≤ 7 the growth is mild
    // enough (< 2 digits lost) that the series still wins.
    if x * x / 4.0 <= (n as f64 + 1.0) || x <= 7.0 {
        Ok(sign * jn_series(n, x))
    } else {
        Ok(sign * jn_miller(n, x))
    }
}

/// Ascending series J_n(x) = Σ_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!).
fn jn_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let q = half * half;
    // leading term (x/2)^n / n!, built incrementally to dodge overflow
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0; // underflow: |J_n| below subnormal range
        }
    }
    let mut sum = term;
    for m in 1..200u32 {
        term *= -q / (m as f64 * (m as f64 + n as f64));
        sum += term;
        if term.abs() < sum.abs() * 1e-17 + 1e-300 {
            break;
        }
    }
    sum
}

/// Miller's algorithm: backward recurrence from a padded start order,
/// normalized with J₀(x) + 2 Σ_{k≥1} J_{2k}(x) = 1.
fn jn_miller(n: u32, x: f64) -> f64 {
    let start = (n.max(x.ceil() as u32)) + 60;
    let mut j_hi = 0.0_f64; // J_{k+1}
    let mut j_cur = 1e-305; // J_k, arbitrary seed
    let mut norm = if start % 2 == 0 { 2.0 * j_cur } else { 0.0 };
    let mut target = if n == start { j_cur } else { 0.0 };
    for k in (1..=start).rev() {
        let j_lo = (2.0 * k as f64 / x) * j_cur - j_hi;
        j_hi = j_cur;
        j_cur = j_lo;
        let ord = k - 1;
        if ord == n {
            target = j_cur;
        }
        if ord == 0 {
            norm += j_cur;
        } else if ord % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_hi *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    target / norm
}

/// Scaled Bessel family j_n(u) = J_n(2√u)/u^{n/2} for u ≥ 0, continued
/// analytically through u = 0 where it equals 1/n!.
///
/// For u ≤ n+1 the entire-series form Σ_m (-u)^m / (m! (n+m)!) is used:
/// its terms decrease from the start there, so there is no 0/0 at the
/// origin and no underflow of J_n for large n. Beyond that the direct
/// quotient is safe because 2√u lies above the turning point of J_n.
pub fn jn_scaled(n: u32, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("jn_scaled: argument {u} must be ≥ 0")));
    }
    if u <= n as f64 + 1.0 {
        // leading 1/n!
        let mut term = 1.0_f64;
        for k in 1..=n {
            term /= k as f64;
            if term == 0.0 {
                return Ok(0.0);
            }
        }
        let mut sum = term;
        for m in 1..200u32 {
            term *= -u / (m as f64 * (m as f64 + n as f64));
            sum += term;
            if term.abs() < sum.abs() * 1e-17 + 1e-300 {
                break;
            }
        }
        Ok(sum)
    } else {
        let pow = u.powf(n as f64 / 2.0);
        if pow.is_infinite() {
            // true value underflows f64 entirely
            return Ok(0.0);
        }
        Ok(bessel_jn(n, 2.0 * u.sqrt())? / pow)
    }
}

/// k-th positive zero of J₁, to better than 1e-10 relative.
///
/// Bracketed from the McMahon estimate ±0.5, bisected, then polished by
/// two secant steps.
pub fn j1_zero(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Range("j1_zero: k must be ≥ 1".into()));
    }
    if k > 50 {
        return Err(Error::Range(format!("j1_zero: k = {k} exceeds supported range (≤ 50)")));
    }
    let beta = (k as f64 + 0.25) * std::f64::consts::PI;
    let est = beta - 3.0 / (8.0 * beta);
    let f = |x: f64| jn_miller_or_series(1, x);
    let (mut a, mut b) = (est - 0.5, est + 0.5);
    let (mut fa, fb) = (f(a), f(b));
    debug_assert!(fa * fb < 0.0, "McMahon bracket must straddle the zero");
    let _ = fb;
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if b - a < 1e-12 * b {
            break;
        }
    }
    // secant polish inside the final bracket
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..3 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
    }
    Ok(x1)
}

fn jn_miller_or_series(n: u32, x: f64) -> f64 {
    bessel_jn(n, x).expect("finite argument")
}

/// Series coefficient f_n(b, t) = (γt)^n T_n(b/γ) of the step-response
/// expansion, with T_n(x) = 1 - e^{-x} Σ_{k≤n} x^k/k! evaluated as the
/// tail sum (regularized incomplete gamma), so it never cancels
/// catastrophically at large b/γ.
pub fn fn_coeff(n: u32, b: f64, gamma: f64, t: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("fn_coeff: gamma = {gamma} must be > 0")));
    }
    if !(b >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("fn_coeff: b = {b} and t = {t} must be ≥ 0")));
    }
    Ok((gamma * t).powi(n as i32) * exp_series_tail(n, b / gamma)?)
}

/// T_n(x) = e^{-x} Σ_{k>n} x^k/k!, the remainder of the exponential
/// Taylor series scaled by e^{-x}. Equals the regularized lower
/// incomplete gamma P(n+1, x); lies in [0, 1] and is non-increasing in n.
pub fn exp_series_tail(n: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("exp_series_tail: x = {x} must be ≥ 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let a = n as f64 + 1.0;
    let log_pre = -x + a * x.ln() - ln_factorial(n);
    let pre = log_pre.exp();
    if x < a + 1.0 {
        gamma_p_series(a, x, pre)
    } else {
        Ok(1.0 - gamma_q_cf(a, x, pre)?)
    }
}

/// ln T_n(x), usable even where T_n underflows f64.
///
/// Falls back to the leading tail term e^{-x} x^{n+1}/(n+1)! times the
/// explicitly summed correction series once T_n drops below the range
/// where the direct evaluation keeps relative accuracy.
pub fn exp_series_tail_ln(n: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("exp_series_tail_ln: x = {x} must be ≥ 0")));
    }
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let t = exp_series_tail(n, x)?;
    if t > 1e-280 {
        return Ok(t.ln());
    }
    // deep tail: T_n = π_{n+1} Σ_j Π_{i≤j} x/(n+1+i), ratio < 1 here
    let a = n as f64 + 1.0;
    let ln_pi = -x + a * x.ln() - ln_factorial(n + 1);
    let mut factor = 1.0_f64;
    let mut s = 1.0_f64;
    for j in 1..10_000u32 {
        factor *= x / (a + j as f64);
        s += factor;
        if factor < 1e-18 * s {
            break;
        }
    }
    Ok(ln_pi + s.ln())
}

/// P(a, x) by the ascending series, for x < a + 1.
fn gamma_p_series(a: f64, x: f64, pre: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..600 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok((pre * sum).clamp(0.0, 1.0));
        }
    }
    Err(Error::Convergence { partial: pre * sum, bound: term.abs() * pre, terms: 600 })
}

/// Q(a, x) by the Lentz continued fraction, for x ≥ a + 1.
fn gamma_q_cf(a: f64, x: f64, pre: f64) -> Result<f64> {
    const TINY: f64 = 1e-30;
    let b0 = x + 1.0 - a;
    let mut f = if b0.abs() < TINY { TINY } else { b0 };
    let mut c = f;
    let mut d = 0.0_f64;
    for i in 1..600 {
        let an = i as f64 * (a - i as f64);
        let bn = x + 2.0 * i as f64 + 1.0 - a;
        d = bn + an * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = bn + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok((pre / f).clamp(0.0, 1.0));
        }
    }
    Err(Error::Convergence { partial: pre / f, bound: f64::NAN, terms: 600 })
}

/// ln(n!), exact product up to 170!, Stirling series beyond.
fn ln_factorial(n: u32) -> f64 {
    if n <= 170 {
        let mut p = 1.0_f64;
        for k in 2..=n as u64 {
            p *= k as f64;
        }
        p.ln()
    } else {
        let z = n as f64 + 1.0;
        let z2 = z * z;
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln()
            + 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
    }
}
