//! Time-stack (jet) algebra against closed-form derivative towers.

use machslab_calculus::stack::{stack_mul, stack_recip, stack_sqrt};
use machslab_grid::{build_grid, Field, SlabGrid};
use std::f64::consts::PI;

fn grid() -> SlabGrid {
    build_grid(2, &[16], 9, 2.0 * PI).unwrap()
}

fn const_stack(g: &SlabGrid, vals: &[f64]) -> Vec<Field> {
    vals.iter().map(|&v| Field::constant(g, v)).collect()
}

fn assert_stack_close(got: &[Field], expect: &[f64], tol: f64) {
    for (k, f) in got.iter().enumerate() {
        let dev = f.values().iter().map(|v| (v - expect[k]).abs()).fold(0.0, f64::max);
        assert!(dev < tol, "level {k}: dev {dev} vs {}", expect[k]);
    }
}

#[test]
fn product_rule_matches_analytic_jet() {
    // a(t) = (1+t)^2, b(t) = e^{2t}; h = a b has derivatives 1, 4, 14, 44, 128 at t=0.
    let g = grid();
    let a = const_stack(&g, &[1.0, 2.0, 2.0, 0.0, 0.0]);
    let b = const_stack(&g, &[1.0, 2.0, 4.0, 8.0, 16.0]);
    let h = stack_mul(&a, &b, 5);
    assert_stack_close(&h, &[1.0, 4.0, 14.0, 44.0, 128.0], 1e-12);
}

#[test]
fn reciprocal_matches_analytic_jet() {
    // 1/(1+t) has k-th derivative (-1)^k k! at t=0.
    let g = grid();
    let a = const_stack(&g, &[1.0, 1.0, 0.0, 0.0, 0.0]);
    let r = stack_recip(&a, 5);
    assert_stack_close(&r, &[1.0, -1.0, 2.0, -6.0, 24.0], 1e-12);
}

#[test]
fn reciprocal_of_spatial_exponential() {
    // a(t,x) = e^{t sin x} has jets sin^k x; its reciprocal has jets (-sin x)^k.
    let g = grid();
    let s = Field::from_fn(&g, |x1, _, _| x1.sin());
    let a: Vec<Field> = (0..5)
        .map(|k| Field::from_fn(&g, |x1, _, _| x1.sin().powi(k)))
        .collect();
    let r = stack_recip(&a, 5);
    for (k, rk) in r.iter().enumerate() {
        let expect = s.map(|v| (-v).powi(k as i32));
        assert!(
            (rk - &expect).abs_max() < 1e-12,
            "level {k}: {}",
            (rk - &expect).abs_max()
        );
    }
}

#[test]
fn sqrt_matches_analytic_jet() {
    // sqrt((1+t)^2) = 1 + t.
    let g = grid();
    let a = const_stack(&g, &[1.0, 2.0, 2.0, 0.0, 0.0]);
    let s = stack_sqrt(&a, 5);
    assert_stack_close(&s, &[1.0, 1.0, 0.0, 0.0, 0.0], 1e-12);

    // sqrt(e^{2 t sin x}) = e^{t sin x}: jets (2 sin x)^k down to sin^k x.
    let a2: Vec<Field> = (0..5)
        .map(|k| Field::from_fn(&g, |x1, _, _| (2.0 * x1.sin()).powi(k)))
        .collect();
    let s2 = stack_sqrt(&a2, 5);
    for (k, sk) in s2.iter().enumerate() {
        let expect = Field::from_fn(&g, |x1, _, _| x1.sin().powi(k as i32));
        assert!((sk - &expect).abs_max() < 1e-12, "level {k}");
    }
}

#[test]
fn recip_inverts_mul() {
    // stack_mul(a, stack_recip(a)) is the jet of the constant 1.
    let g = grid();
    let a: Vec<Field> = (0..5)
        .map(|k| Field::from_fn(&g, |x1, _, xn| (0.4 * x1.cos() + 0.1 * xn).powi(k) + if k == 0 { 1.5 } else { 0.0 }))
        .collect();
    let r = stack_recip(&a, 5);
    let prod = stack_mul(&a, &r, 5);
    let one = Field::constant(&g, 1.0);
    assert!((&prod[0] - &one).abs_max() < 1e-13);
    for level in prod.iter().skip(1) {
        assert!(level.abs_max() < 1e-12);
    }
}

#[test]
fn sqrt_squares_back() {
    let g = grid();
    let a: Vec<Field> = (0..4)
        .map(|k| Field::from_fn(&g, |x1, _, xn| (0.3 * (x1 + xn).sin()).powi(k) * 2.0_f64.powi(k) + if k == 0 { 1.0 } else { 0.0 }))
        .collect();
    let s = stack_sqrt(&a, 4);
    let sq = stack_mul(&s, &s, 4);
    for (k, (got, want)) in sq.iter().zip(a.iter()).enumerate() {
        assert!((got - want).abs_max() < 1e-12, "level {k}");
    }
}
