//! Legendre–Gauss–Lobatto collocation in the wall-normal direction:
//! nodes, quadrature weights, and the dense differentiation matrix.
//!
//! The node set always contains both walls x = -1 and x = +1 so boundary
//! conditions can be imposed strongly at grid points, and the associated
//! quadrature is exact for polynomials up to degree 2*n - 3 (n = node count),
//! which the test suite checks directly.

use ndarray::Array2;
use std::f64::consts::PI;

/// Evaluate (P_n(x), P_{n-1}(x)) by the three-term Legendre recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let mut p_prev = 1.0; // P_0
    let mut p = x; // P_1
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    (p, p_prev)
}

/// Nodes (ascending, endpoints exactly -1 and +1) and quadrature weights of
/// the (n_nodes)-point Legendre–Gauss–Lobatto rule on [-1, 1].
pub fn lobatto_nodes_weights(n_nodes: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n_nodes >= 2, "need at least the two wall nodes");
    let deg = n_nodes - 1;
    // Chebyshev-Lobatto starting guesses, ascending; Newton on
    // g(x) = x*P_deg(x) - P_{deg-1}(x), whose roots are the Lobatto nodes
    // (g'(x) = (deg+1)*P_deg(x), and the walls are exact fixed points).
    let mut x: Vec<f64> = (0..n_nodes)
        .map(|j| -(PI * j as f64 / deg as f64).cos())
        .collect();
    for _ in 0..200 {
        let mut delta_max = 0.0_f64;
        for xj in x.iter_mut() {
            let (p, p_prev) = legendre_pair(deg, *xj);
            let dx = (*xj * p - p_prev) / (n_nodes as f64 * p);
            *xj -= dx;
            delta_max = delta_max.max(dx.abs());
        }
        if delta_max < 1e-15 {
            break;
        }
    }
    // Enforce the exact symmetry of the rule (and exact wall nodes).
    for j in 0..n_nodes / 2 {
        let s = 0.5 * (x[j] - x[n_nodes - 1 - j]);
        x[j] = s;
        x[n_nodes - 1 - j] = -s;
    }
    if n_nodes % 2 == 1 {
        x[n_nodes / 2] = 0.0;
    }
    x[0] = -1.0;
    x[n_nodes - 1] = 1.0;

    let scale = 2.0 / (deg as f64 * n_nodes as f64);
    let mut w: Vec<f64> = x
        .iter()
        .map(|&xj| {
            let (p, _) = legendre_pair(deg, xj);
            scale / (p * p)
        })
        .collect();
    for j in 0..n_nodes / 2 {
        let s = 0.5 * (w[j] + w[n_nodes - 1 - j]);
        w[j] = s;
        w[n_nodes - 1 - j] = s;
    }
    (x, w)
}

/// Dense collocation differentiation matrix on the Lobatto nodes:
/// (D f)(x_i) = sum_j D[i][j] f(x_j) differentiates the unique interpolating
/// polynomial exactly. Diagonal entries use the negative-row-sum convention
/// (a constant differentiates to exactly zero in floating point).
pub fn lobatto_diff_matrix(nodes: &[f64]) -> Array2<f64> {
    let n = nodes.len();
    let deg = n - 1;
    let p_at: Vec<f64> = nodes.iter().map(|&x| legendre_pair(deg, x).0).collect();
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = p_at[i] / (p_at[j] * (nodes[i] - nodes[j]));
                d[[i, j]] = v;
                row_sum += v;
            }
        }
        d[[i, i]] = -row_sum;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_symmetric_with_exact_walls() {
        for n in [9usize, 17, 33] {
            let (x, w) = lobatto_nodes_weights(n);
            assert_eq!(x[0], -1.0);
            assert_eq!(x[n - 1], 1.0);
            assert_eq!(x[n / 2], 0.0);
            for j in 0..n {
                assert_eq!(x[j], -x[n - 1 - j]);
                assert_eq!(w[j], w[n - 1 - j]);
            }
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "weight sum {total}");
        }
    }

    #[test]
    fn quadrature_exact_to_degree_2n_minus_3() {
        for n in [9usize, 17] {
            let (x, w) = lobatto_nodes_weights(n);
            for m in 0..=(2 * n - 3) {
                let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(m as i32)).sum();
                let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
                assert!(
                    (q - exact).abs() < 1e-11,
                    "n={n} monomial degree {m}: {q} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn diff_matrix_exact_on_low_polynomials() {
        let n = 9;
        let (x, _) = lobatto_nodes_weights(n);
        let d = lobatto_diff_matrix(&x);
        // f = x^3 -> f' = 3x^2, exact for the degree-8 interpolant.
        for i in 0..n {
            let mut df = 0.0;
            for j in 0..n {
                df += d[[i, j]] * x[j].powi(3);
            }
            assert!((df - 3.0 * x[i] * x[i]).abs() < 1e-12);
        }
        // Constants differentiate to (numerically) zero by construction.
        for i in 0..n {
            let row: f64 = (0..n).map(|j| d[[i, j]]).sum();
            assert!(row.abs() < 1e-12);
        }
    }
}
