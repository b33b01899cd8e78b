//! Frozen high-precision reference values for the special-function kernel
//! (40-digit evaluations, truncated to f64).

use approx::assert_relative_eq;
use superrad::specfun::{bessel_jn, exp_series_tail, exp_series_tail_ln, j1_zero, jn_scaled};

#[rustfmt::skip]
const JN_TABLE: &[(u32, f64, f64)] = &[
    (0, 0.5,               0.938469807240812904),
    (0, 1.0,               0.765197686557966551),
    (0, 3.831705970207512, -0.402759395702552972),
    (0, 8.0,               0.171650807137553906),
    (0, 12.0,              0.0476893107968335366),
    (0, 25.0,              0.0962667832759581162),
    (0, 40.0,              0.00736689058423728955),
    (0, 50.0,              0.055812327669251815),
    (0, 70.0,              0.0949087264830135423),
    (0, 100.0,             0.0199858503042231224),
    (1, 0.5,               0.242268457674873886),
    (1, 1.0,               0.440050585744933516),
    (1, 12.0,              -0.223447104490627612),
    (1, 50.0,              -0.0975118281251751377),
    (1, 100.0,             -0.077145352014112158),
    (2, 1.5,               0.232087672144214727),
    (2, 10.0,              0.254630313685120623),
    (3, 5.0,               0.364831230613666994),
    (3, 100.0,             0.0762842017203319434),
    (5, 2.0,               0.00703962975587168548),
    (5, 30.0,              -0.143240295512077077),
    (7, 40.0,              -0.108023431735779429),
    (10, 1.0,              2.63061512368745321e-10),
    (10, 15.0,             -0.090071811047659054),
    (20, 10.0,             1.15133692478133978e-5),
    (20, 40.0,             0.127793933550848896),
    (30, 40.0,             -0.104085949765649727),
    (50, 60.0,             -0.13798273148535212),
    (50, 1.0,              2.90600494817323939e-80),
    (100, 100.0,           0.0963666732958615597),
    (150, 40.0,            1.72541256959912205e-69),
];

#[test]
fn bessel_jn_reference_table() {
    for &(n, x, want) in JN_TABLE {
        let got = bessel_jn(n, x).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-12, epsilon = 1e-300);
    }
}

#[test]
fn bessel_jn_near_zero_crossing() {
    // J₁ at its second zero evaluates to ~3e-17 exactly; only absolute
    // accuracy is meaningful there
    let v = bessel_jn(1, 7.015586669815619).unwrap();
    assert!(v.abs() < 1e-14, "got {v}");
}

#[test]
fn j1_zero_reference_table() {
    let zeros = [
        3.8317059702075123,
        7.0155866698156188,
        10.173468135062722,
        13.323691936314223,
        16.470630050877633,
        19.615858510468242,
        22.760084380592772,
        25.903672087618383,
        29.046828534916855,
        32.189679910974404,
    ];
    for (k, want) in zeros.iter().enumerate() {
        let got = j1_zero(k as u32 + 1).unwrap();
        assert_relative_eq!(got, *want, max_relative = 1e-10);
    }
}

#[test]
fn slice_boundary_depths() {
    // (x_k/2)² — the γ → 0 domain boundaries in b·t_p units
    let want = [3.6704926605309733, 12.304614080423651, 25.874863473784145];
    for (k, w) in want.iter().enumerate() {
        let z = j1_zero(k as u32 + 1).unwrap();
        assert_relative_eq!((z / 2.0) * (z / 2.0), *w, max_relative = 1e-10);
    }
}

#[test]
fn jn_scaled_reference_table() {
    let table: [(u32, f64, f64); 6] = [
        (0, 3.6705, -0.402759395699597547),
        (1, 1.0, 0.576724807756873387),
        (2, 0.5, 0.421704954651047289),
        (3, 1e-6, 0.166666625000004167),
        (5, 10.0, 0.00118107984296231344),
        (4, 25.0, -3.51364297763213656e-4),
    ];
    for (n, u, want) in table {
        assert_relative_eq!(jn_scaled(n, u).unwrap(), want, max_relative = 1e-12);
    }
    // j₁ at the first boundary is an exact zero of J₁
    assert!(jn_scaled(1, 3.6704926605309733).unwrap().abs() < 1e-12);
}

#[test]
fn exp_series_tail_ln_reference() {
    // representable range agrees with the direct evaluation
    for (n, x) in [(0u32, 0.5), (5, 2.0), (20, 20.0), (100, 100.0)] {
        assert_relative_eq!(
            exp_series_tail_ln(n, x).unwrap(),
            exp_series_tail(n, x).unwrap().ln(),
            max_relative = 1e-12
        );
    }
    // representable but tiny
    let table: [(u32, f64, f64); 4] = [
        (100, 5.0, -210.751030825585597),
        (200, 20.0, -286.288903456225819),
        (50, 1.0, -153.390181742105467),
        (400, 100.0, -259.535660759127029),
    ];
    for (n, x, want) in table {
        assert_relative_eq!(exp_series_tail_ln(n, x).unwrap(), want, max_relative = 1e-13);
    }
    // far below f64 underflow of T_n itself
    let deep: [(u32, f64, f64); 3] = [
        (300, 5.0, -941.155454623743435),
        (200, 1.0, -869.530329433040848),
        (380, 30.0, -621.159145967898325),
    ];
    for (n, x, want) in deep {
        assert_relative_eq!(exp_series_tail_ln(n, x).unwrap(), want, max_relative = 1e-13);
    }
}
