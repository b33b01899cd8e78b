//! Spatial structure of the absorber at the switching time: field and
//! coherence profiles versus depth, the coherence zeros that bound the
//! opposite-phase domains, and the slice decomposition read off them.

use rayon::prelude::*;

use crate::cascade::SliceStack;
use crate::error::{Error, Result};
use crate::propagation::{coherence_step, step_response_series, AbsorberSpec};

/// Field and coherence sampled along the absorber at a fixed time, with
/// the normalization used for plotting: field in units of Ω₀, coherence
/// in units of Ω₀ t_p (both reach 1 at the front face as γt_p → 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialProfile {
    /// Cumulative superradiant rate at each node, ascending over [0, b_l].
    pub depth: Vec<f64>,
    pub field: Vec<f64>,
    pub im_coherence: Vec<f64>,
}

/// Coherence zeros at the switching time, in cumulative b·t_p units.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDecomposition {
    /// Depths (b·t_p) where Im σ_eg(·, t_p) crosses zero, ascending.
    pub boundaries_bt: Vec<f64>,
    /// Widths of the successive domains (differences of the boundaries).
    pub slice_bt: Vec<f64>,
    pub t_p: f64,
}

/// Sample the exact field and coherence at `n_depth` cumulative-b nodes.
pub fn spatial_profiles(
    b_l: f64,
    gamma: f64,
    t_p: f64,
    n_depth: usize,
) -> Result<SpatialProfile> {
    if !(b_l > 0.0) || !(t_p > 0.0) {
        return Err(Error::Domain(format!("spatial_profiles: b_l = {b_l} and t_p = {t_p} must be > 0")));
    }
    if n_depth < 64 {
        return Err(Error::Domain(format!("spatial_profiles: n_depth = {n_depth} must be ≥ 64")));
    }
    let depth: Vec<f64> =
        (0..n_depth).map(|i| b_l * i as f64 / (n_depth - 1) as f64).collect();
    let rows: Vec<(f64, f64)> = depth
        .par_iter()
        .map(|&b| -> Result<(f64, f64)> {
            let spec = AbsorberSpec::new(b, gamma)?;
            let f = step_response_series(&spec, t_p, 1e-10)?;
            let c = coherence_step(&spec, t_p)? / t_p;
            Ok((f, c))
        })
        .collect::<Result<_>>()?;
    let (field, im_coherence) = rows.into_iter().unzip();
    Ok(SpatialProfile { depth, field, im_coherence })
}

/// Locate every zero of Im σ_eg(·, t_p) in (0, b_l·t_p] by a sign scan
/// refined with bisection on the exact series (not the γ → 0
/// approximation, so the finite-γ drift of the boundaries is captured).
///
/// An absorber thinner than the first domain yields an empty
/// decomposition.
pub fn domain_boundaries(b_l: f64, gamma: f64, t_p: f64) -> Result<DomainDecomposition> {
    if !(b_l > 0.0) || !(t_p > 0.0) {
        return Err(Error::Domain(format!("domain_boundaries: b_l = {b_l} and t_p = {t_p} must be > 0")));
    }
    let bt_max = b_l * t_p;
    let coherence_at = |bt: f64| -> Result<f64> {
        let spec = AbsorberSpec::new(bt / t_p, gamma)?;
        coherence_step(&spec, t_p)
    };

    // 512 scan nodes per 10 units of b·t_p, doubled if a cell looks like it
    // hides more than one crossing
    let mut n_scan = ((51.2 * bt_max).ceil() as usize).max(64);
    let boundaries_bt = loop {
        let mut found: Vec<f64> = Vec::new();
        let values: Vec<f64> = (0..=n_scan)
            .into_par_iter()
            .map(|i| coherence_at(bt_max * i as f64 / n_scan as f64))
            .collect::<Result<_>>()?;
        let v_scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut ambiguous = false;
        for i in 1..=n_scan {
            let (lo, hi) = (bt_max * (i - 1) as f64 / n_scan as f64, bt_max * i as f64 / n_scan as f64);
            let (flo, fhi) = (values[i - 1], values[i]);
            if flo == 0.0 && lo > 0.0 {
                found.push(lo);
                continue;
            }
            if flo * fhi < 0.0 {
                // adjacent sign changes suggest an under-resolved oscillation
                if i >= 2 && values[i - 2] * flo < 0.0 {
                    ambiguous = true;
                    break;
                }
                found.push(bisect_zero(&coherence_at, lo, hi, flo)?);
            }
        }
        if !ambiguous {
            // a zero sitting on the output face itself counts as a boundary
            let last_is_zero = values[n_scan].abs() <= 1e-9 * v_scale;
            let already = found.last().is_some_and(|&z| bt_max - z < bt_max / n_scan as f64);
            if last_is_zero && !already {
                found.push(bt_max);
            }
            break found;
        }
        n_scan *= 2;
        if n_scan > 1 << 22 {
            return Err(Error::Resolution("domain scan failed to disambiguate crossings".into()));
        }
    };

    let mut slice_bt = Vec::with_capacity(boundaries_bt.len());
    let mut prev = 0.0;
    for &b in &boundaries_bt {
        slice_bt.push(b - prev);
        prev = b;
    }
    Ok(DomainDecomposition { boundaries_bt, slice_bt, t_p })
}

fn bisect_zero<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let mut flo = flo;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Turn a decomposition into per-slice rates b_k = Δ(b·t_p)/t_p. If the
/// absorber extends past the last located boundary the remainder becomes
/// a final slice and the stack is flagged as ending on a partial domain.
pub fn slice_stack_from_domains(
    dec: &DomainDecomposition,
    b_l: f64,
    gamma: f64,
) -> Result<SliceStack> {
    if dec.boundaries_bt.is_empty() {
        return Err(Error::Domain(
            "slice_stack_from_domains: decomposition has no boundaries".into(),
        ));
    }
    let mut slice_b: Vec<f64> = dec.slice_bt.iter().map(|w| w / dec.t_p).collect();
    let last = dec.boundaries_bt.last().unwrap() / dec.t_p;
    let remainder = b_l - last;
    let partial = remainder > 1e-9 * b_l;
    if partial {
        slice_b.push(remainder);
    }
    SliceStack::with_partial_last(slice_b, dec.t_p, gamma, partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_normalization_at_front_face() {
        let p = spatial_profiles(30.0, 1e-4, 1.0, 128).unwrap();
        assert_eq!(p.depth[0], 0.0);
        assert!((p.field[0] - 1.0).abs() < 1e-12);
        // (1 - e^{-γt_p})/(γ t_p) ≈ 1 for γ t_p ≪ 1
        assert!((p.im_coherence[0] - 1.0).abs() < 1e-4);
        // both maxima sit at the front face
        let fmax = p.field.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let cmax = p.im_coherence.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert_eq!(fmax, p.field[0].abs());
        assert_eq!(cmax, p.im_coherence[0].abs());
    }

    #[test]
    fn three_domains_at_bt_30() {
        let dec = domain_boundaries(30.0, 1e-4, 1.0).unwrap();
        assert_eq!(dec.boundaries_bt.len(), 3);
        let want = [3.6705, 12.3046, 25.8781];
        for (got, want) in dec.boundaries_bt.iter().zip(want) {
            assert!((got / want - 1.0).abs() < 1e-3, "boundary {got} vs {want}");
        }
        // slice widths at the precision quoted for the three-slice stack
        let widths = [3.67, 8.63, 13.57];
        for (got, want) in dec.slice_bt.iter().zip(widths) {
            assert!((got - want).abs() < 5e-3, "width {got} vs {want}");
        }
    }

    #[test]
    fn thin_absorber_has_no_boundaries() {
        let dec = domain_boundaries(2.0, 1e-4, 1.0).unwrap();
        assert!(dec.boundaries_bt.is_empty());
        assert!(slice_stack_from_domains(&dec, 2.0, 1e-4).is_err());
    }

    #[test]
    fn boundaries_scale_invariant_in_bt() {
        // holding γt_p fixed, boundaries in b·t_p units are independent of t_p
        let a = domain_boundaries(30.0, 1e-4, 1.0).unwrap();
        let b = domain_boundaries(7.5, 2.5e-5, 4.0).unwrap();
        for (x, y) in a.boundaries_bt.iter().zip(&b.boundaries_bt) {
            assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn constant_sign_within_domains() {
        let dec = domain_boundaries(30.0, 1e-4, 1.0).unwrap();
        let mut edges = vec![0.0];
        edges.extend(&dec.boundaries_bt);
        for w in edges.windows(2) {
            let mut sign = 0.0;
            for i in 1..100 {
                let bt = w[0] + (w[1] - w[0]) * i as f64 / 100.0;
                let spec = AbsorberSpec::new(bt, 1e-4).unwrap();
                let c = coherence_step(&spec, 1.0).unwrap();
                if sign == 0.0 {
                    sign = c.signum();
                } else {
                    assert_eq!(c.signum(), sign, "sign flip inside a domain at bt = {bt}");
                }
            }
        }
    }

    #[test]
    fn full_and_partial_slices() {
        let dec = domain_boundaries(30.0, 1e-4, 1.0).unwrap();
        let stack = slice_stack_from_domains(&dec, 30.0, 1e-4).unwrap();
        assert_eq!(stack.slice_b().len(), 4);
        assert!(stack.is_partial_last());
        let remainder = 30.0 - dec.boundaries_bt[2];
        assert!((stack.slice_b()[3] - remainder).abs() < 1e-9);

        // b_l landing exactly on the last boundary: three full slices
        let b_l = dec.boundaries_bt[2];
        let dec2 = domain_boundaries(b_l, 1e-4, 1.0).unwrap();
        let stack2 = slice_stack_from_domains(&dec2, b_l, 1e-4).unwrap();
        assert_eq!(stack2.slice_b().len(), 3);
        assert!(!stack2.is_partial_last());
    }
}
