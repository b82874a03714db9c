//! Commutator of iterated weighted normal derivatives with the plain normal
//! derivative.
//!
//! With w the boundary-vanishing weight (1 - x^2) and D the normal
//! derivative, the commutator [(wD)^k, D] expands as a sum of lower-order
//! operators with polynomial coefficients:
//!
//! ```text
//! [(wD)^k, D] f = sum_{l < k} c_{k,l}(x) (wD)^l D f,
//! ```
//!
//! driven by the base case [wD, D] = -w' D and the recurrence
//! `c_{k+1,m} = w c_{k,m}' + w' c_{k,m} + c_{k,m-1} - w' delta_{m,k}`.
//! The coefficients are computed exactly as polynomials, so the expansion
//! doubles as an explicit certificate that the commutator stays inside the
//! span of the lower-order operators.

use crate::CalcError;
use machslab_grid::Field;

/// Dense polynomial a_0 + a_1 x + ... in the normal coordinate.
type Poly = Vec<f64>;

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &v) in a.iter().enumerate() {
        out[i] += v;
    }
    for (i, &v) in b.iter().enumerate() {
        out[i] += v;
    }
    out
}

fn poly_scale(a: &Poly, c: f64) -> Poly {
    a.iter().map(|&v| c * v).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &av) in a.iter().enumerate() {
        for (j, &bv) in b.iter().enumerate() {
            out[i + j] += av * bv;
        }
    }
    out
}

fn poly_deriv(a: &Poly) -> Poly {
    if a.len() <= 1 {
        return Vec::new();
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &v)| i as f64 * v)
        .collect()
}

fn poly_eval(a: &Poly, x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Exact polynomial coefficients c_{k,l} for l = 0..k-1.
pub(crate) fn coefficient_polys(k: usize) -> Vec<Poly> {
    assert!(k >= 1);
    let omega: Poly = vec![1.0, 0.0, -1.0]; // 1 - x^2
    let omega_p: Poly = vec![0.0, -2.0]; // -2x
    let mut c: Vec<Poly> = vec![poly_scale(&omega_p, -1.0)]; // c_{1,0} = -w'
    for kk in 1..k {
        let mut next: Vec<Poly> = Vec::with_capacity(kk + 1);
        for m in 0..=kk {
            let mut poly: Poly = Vec::new();
            if m < kk {
                poly = poly_add(
                    &poly_mul(&omega, &poly_deriv(&c[m])),
                    &poly_mul(&omega_p, &c[m]),
                );
            }
            if m >= 1 {
                poly = poly_add(&poly, &c[m - 1]);
            }
            if m == kk {
                poly = poly_add(&poly, &poly_scale(&omega_p, -1.0));
            }
            next.push(poly);
        }
        c = next;
    }
    c
}

fn weighted_normal(f: &Field) -> Field {
    let g = f.grid();
    let om = g.weight_omega();
    om.zip_with(&f.dx(g.dim()), |a, b| a * b)
}

/// Commutator [(wD)^k, D] f computed directly from its definition:
/// (wD)^k D f - D (wD)^k f.
pub fn omega_commutator(k: usize, f: &Field) -> Result<Field, CalcError> {
    if k < 1 {
        return Err(CalcError::CommutatorOrder(k));
    }
    let dim = f.grid().dim();
    let mut a = f.dx(dim);
    for _ in 0..k {
        a = weighted_normal(&a);
    }
    let mut b = f.clone();
    for _ in 0..k {
        b = weighted_normal(&b);
    }
    Ok(&a - &b.dx(dim))
}

/// The same commutator reconstructed from the closed-form expansion
/// sum_{l<k} c_{k,l}(x) (wD)^l D f; agrees with `omega_commutator` to
/// spectral accuracy and certifies the span property.
pub fn omega_commutator_expansion(k: usize, f: &Field) -> Result<Field, CalcError> {
    if k < 1 {
        return Err(CalcError::CommutatorOrder(k));
    }
    let grid = f.grid().clone();
    let polys = coefficient_polys(k);
    let mut term = f.dx(grid.dim()); // (wD)^0 D f
    let coeff0 = Field::from_fn(&grid, |_, _, xn| poly_eval(&polys[0], xn));
    let mut acc = coeff0.zip_with(&term, |a, b| a * b);
    for poly in polys.iter().skip(1) {
        term = weighted_normal(&term);
        let coeff = Field::from_fn(&grid, |_, _, xn| poly_eval(poly, xn));
        acc += &coeff.zip_with(&term, |a, b| a * b);
    }
    Ok(acc)
}
