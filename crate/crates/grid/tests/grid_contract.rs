//! Contract tests for the slab grid: construction, derivatives, quadrature,
//! dealiasing/filtering, wall spectra, and checkpoint round trips.

use machslab_grid::{build_grid, read_checkpoint, write_checkpoint, Field, GridError};
use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

#[test]
fn construction_3d_counts_and_walls() {
    let g = build_grid(3, &[8, 8], 9, TAU).unwrap();
    assert_eq!(g.node_count(), 8 * 8 * 9);
    assert_eq!(g.shape(), (9, 8, 8));
    let x = g.nodes_normal();
    assert_eq!(x[0], -1.0);
    assert_eq!(x[8], 1.0);
    let total: f64 = g.quad_weights().iter().sum();
    let expect = 8.0 * PI * PI;
    assert!(
        ((total - expect) / expect).abs() < 1e-12,
        "volume {total} vs {expect}"
    );
}

#[test]
fn construction_2d_counts() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    assert_eq!(g.dim(), 2);
    assert_eq!(g.node_count(), 16 * 17);
    assert_eq!(g.shape(), (17, 1, 16));
    let total: f64 = g.quad_weights().iter().sum();
    let expect = 2.0 * TAU;
    assert!(((total - expect) / expect).abs() < 1e-12);
}

#[test]
fn construction_rejects_bad_parameters() {
    assert!(matches!(
        build_grid(4, &[8, 8, 8], 9, TAU),
        Err(GridError::InvalidDim(4))
    ));
    assert!(matches!(
        build_grid(2, &[9], 9, TAU),
        Err(GridError::TangentialCount { .. })
    ));
    assert!(matches!(
        build_grid(2, &[16], 8, TAU),
        Err(GridError::NormalCount(8))
    ));
    assert!(matches!(
        build_grid(2, &[16], 7, TAU),
        Err(GridError::NormalCount(7))
    ));
    assert!(matches!(
        build_grid(3, &[8], 9, TAU),
        Err(GridError::TangentialArity { .. })
    ));
    assert!(matches!(
        build_grid(2, &[16], 17, 0.0),
        Err(GridError::InvalidPeriod(_))
    ));
}

#[test]
fn deriv_of_constant_vanishes() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    let f = Field::constant(&g, 5.0);
    for axis in 1..=2 {
        let df = f.deriv(axis).unwrap();
        assert!(df.abs_max() < 1e-9, "axis {axis}: {}", df.abs_max());
    }
}

#[test]
fn deriv_tangential_matches_symbolic() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    let f = Field::from_fn(&g, |x1, _, _| x1.sin());
    let df = f.dx(1);
    let exact = Field::from_fn(&g, |x1, _, _| x1.cos());
    assert!((&df - &exact).abs_max() < 1e-10);
}

#[test]
fn deriv_normal_matches_symbolic() {
    let g = build_grid(3, &[8, 8], 9, TAU).unwrap();
    let f = Field::from_fn(&g, |_, _, xn| xn * xn);
    let df = f.dx(3);
    let exact = Field::from_fn(&g, |_, _, xn| 2.0 * xn);
    assert!((&df - &exact).abs_max() < 1e-10);
}

#[test]
fn deriv_rejects_bad_axis() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    let f = Field::zeros(&g);
    assert!(matches!(
        f.deriv(0),
        Err(GridError::AxisOutOfRange { axis: 0, dim: 2 })
    ));
    assert!(matches!(
        f.deriv(3),
        Err(GridError::AxisOutOfRange { axis: 3, dim: 2 })
    ));
}

#[test]
fn omega_weight_values_and_product_rule() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    let om = g.weight_omega();
    // Zero at both walls, exactly.
    assert_eq!(om.wall_abs_max(), 0.0);
    // One on the mid-plane node.
    let mid = g.n_normal() / 2;
    assert_eq!(om.values()[[mid, 0, 0]], 1.0);
    // (omega * d/dxn) applied to xn gives 1 - xn^2.
    let f = Field::from_fn(&g, |_, _, xn| xn);
    let od = &om * &f.dx(2);
    let exact = Field::from_fn(&g, |_, _, xn| 1.0 - xn * xn);
    assert!((&od - &exact).abs_max() < 1e-10);
}

#[test]
fn integrate_analytic_values() {
    let g = build_grid(3, &[8, 8], 9, TAU).unwrap();
    let one = Field::constant(&g, 1.0);
    let expect = 8.0 * PI * PI;
    assert!((one.integrate() - expect).abs() < 1e-10);

    let s = Field::from_fn(&g, |x1, _, _| x1.sin());
    assert!(s.integrate().abs() < 1e-12);

    let q = Field::from_fn(&g, |_, _, xn| xn * xn);
    let expect_q = 8.0 * PI * PI / 3.0;
    assert!((q.integrate() - expect_q).abs() < 1e-10);
}

#[test]
fn tangential_derivatives_commute() {
    let g = build_grid(3, &[16, 16], 9, TAU).unwrap();
    let f = Field::from_fn(&g, |x1, x2, xn| {
        (x1.sin() + (2.0 * x2).cos()).exp() + xn * x2.sin()
    });
    let a = f.dx(1).dx(2);
    let b = f.dx(2).dx(1);
    assert!((&a - &b).abs_max() < 1e-9);
}

#[test]
fn integrate_of_tangential_derivative_vanishes() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    // Deliberately rough (non-band-limited) data; the property is exact.
    let f = Field::from_fn(&g, |x1, _, xn| (37.0 * x1).sin() * xn + (x1 * x1).cos());
    assert!(f.dx(1).integrate().abs() < 1e-12);
}

#[test]
fn normal_quadrature_exact_to_degree_bound() {
    let g = build_grid(2, &[8], 9, TAU).unwrap();
    let surface = TAU; // tangential measure
    for m in [2usize, 6, 10, 14] {
        let f = Field::from_fn(&g, |_, _, xn| xn.powi(m as i32));
        let expect = surface * 2.0 / (m as f64 + 1.0);
        assert!(
            (f.integrate() - expect).abs() < 1e-11 * surface,
            "degree {m}"
        );
    }
    for m in [3usize, 9, 15] {
        let f = Field::from_fn(&g, |_, _, xn| xn.powi(m as i32));
        assert!(f.integrate().abs() < 1e-11 * surface, "degree {m}");
    }
}

#[test]
fn dealias_removes_only_high_modes() {
    let g = build_grid(2, &[12], 9, TAU).unwrap();
    assert_eq!(g.dealias_cutoff(1), 4);
    let f = Field::from_fn(&g, |x1, _, _| (3.0 * x1).cos() + (5.0 * x1).sin());
    let d = f.dealiased();
    let expect = Field::from_fn(&g, |x1, _, _| (3.0 * x1).cos());
    assert!((&d - &expect).abs_max() < 1e-12);

    let low = Field::from_fn(&g, |x1, _, _| (4.0 * x1).cos() + x1.sin());
    assert!((&low.dealiased() - &low).abs_max() < 1e-13);
}

#[test]
fn filter_passes_resolved_band_and_damps_top_modes() {
    let g = build_grid(2, &[24], 9, TAU).unwrap();
    // Modes at or below the 2/3 cutoff (8) are untouched.
    let low = Field::from_fn(&g, |x1, _, _| (8.0 * x1).cos() + (3.0 * x1).sin());
    let mut lf = low.clone();
    lf.filter_tangential_inplace(8, 36.0);
    assert!((&lf - &low).abs_max() < 1e-13);
    // A pure mode above the cutoff is scaled by exactly the exponential
    // profile: sigma(k) = exp(-36 ((k - 8)/(12 - 8))^8).
    let high = Field::from_fn(&g, |x1, _, _| (11.0 * x1).cos());
    let mut hf = high.clone();
    hf.filter_tangential_inplace(8, 36.0);
    let sigma11 = (-36.0_f64 * (3.0_f64 / 4.0).powi(8)).exp();
    let expect = high.scaled(sigma11);
    assert!((&hf - &expect).abs_max() < 1e-12);
    // The highest mode is damped to roundoff.
    let nyq = Field::from_fn(&g, |x1, _, _| (12.0 * x1).cos());
    let mut nf = nyq.clone();
    nf.filter_tangential_inplace(8, 36.0);
    assert!(nf.abs_max() < 1e-10);
    // Strength zero is the identity.
    let mut id = high.clone();
    id.filter_tangential_inplace(8, 0.0);
    assert_eq!(id.values(), high.values());
}

#[test]
fn wall_spectrum_norm_analytic_cases() {
    let g = build_grid(2, &[16], 17, TAU).unwrap();
    // Constant c: only the zero mode, weight 1, both walls.
    let c = Field::constant(&g, 3.0);
    let expect = 2.0 * 9.0 * TAU;
    assert!(((c.wall_spectrum_norm_sq(2.5) - expect) / expect).abs() < 1e-12);
    // sin(x1): modes +-1 with squared amplitude 1/4 each.
    let s = Field::from_fn(&g, |x1, _, _| x1.sin());
    let e0 = 2.0 * 0.5 * TAU; // exponent 0: plain squared trace norm, 2 walls
    assert!(((s.wall_spectrum_norm_sq(0.0) - e0) / e0).abs() < 1e-12);
    let e1 = 2.0 * 2.0 * 0.5 * TAU; // exponent 1: weight (1 + 1)
    assert!(((s.wall_spectrum_norm_sq(1.0) - e1) / e1).abs() < 1e-12);
}

#[test]
fn checkpoint_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.mslb");
    let g = build_grid(3, &[8, 10], 9, 1.75).unwrap();
    let a = Field::from_fn(&g, |x1, x2, xn| (x1 * 3.1).sin() + x2 * xn.powi(3) + 0.1);
    let b = Field::from_fn(&g, |x1, x2, xn| (x2 - x1).cos() * xn);
    write_checkpoint(&path, &g, 0.625, &[&a, &b]).unwrap();
    let (g2, t, fields) = read_checkpoint(&path).unwrap();
    assert!(g2.same_layout(&g));
    assert_eq!(t, 0.625);
    assert_eq!(fields.len(), 2);
    assert_eq!(fields[0].values(), a.values());
    assert_eq!(fields[1].values(), b.values());
}

#[test]
fn checkpoint_rejects_corrupt_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mslb");
    std::fs::write(&path, b"NOTMAGIC-and-then-some").unwrap();
    assert!(matches!(
        read_checkpoint(&path),
        Err(GridError::Checkpoint { .. })
    ));
}

#[test]
fn field_from_values_validates() {
    let g = build_grid(2, &[8], 9, TAU).unwrap();
    let wrong = ndarray::Array3::<f64>::zeros((9, 2, 8));
    assert!(matches!(
        Field::from_values(&g, wrong),
        Err(GridError::ShapeMismatch { .. })
    ));
    let mut nan = ndarray::Array3::<f64>::zeros((9, 1, 8));
    nan[[0, 0, 0]] = f64::NAN;
    assert!(matches!(
        Field::from_values(&g, nan),
        Err(GridError::NonFinite)
    ));
}
