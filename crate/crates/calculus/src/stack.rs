//! Leibniz algebra on time-derivative stacks.
//!
//! A stack `a` represents the jet (a, a', a'', ...) of a time-dependent
//! field at one instant: `a[k]` holds the k-th time derivative. Products,
//! reciprocals, and square roots of time-dependent quantities then have
//! stacks given by exact recurrences (Leibniz rule and its inversions),
//! which is how solvers build high time derivatives without ever
//! differencing in time.

use machslab_grid::Field;

/// Binomial coefficients C(n, k) for n, k <= max_n, as floats.
pub fn binomial_table(max_n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; max_n + 1]; max_n + 1];
    for n in 0..=max_n {
        c[n][0] = 1.0;
        for k in 1..=n {
            c[n][k] = c[n - 1][k - 1] + if k <= n - 1 { c[n - 1][k] } else { 0.0 };
        }
    }
    c
}

/// Stack of the product: c[k] = sum_j C(k,j) a[j] b[k-j], for k < depth.
pub fn stack_mul(a: &[Field], b: &[Field], depth: usize) -> Vec<Field> {
    assert!(a.len() >= depth && b.len() >= depth, "stacks too shallow");
    let binom = binomial_table(depth.saturating_sub(1));
    let mut out = Vec::with_capacity(depth);
    for k in 0..depth {
        let mut acc = a[0].zip_with(&b[k], |x, y| x * y);
        for j in 1..=k {
            let term = a[j].zip_with(&b[k - j], |x, y| x * y);
            acc.add_scaled(binom[k][j], &term);
        }
        out.push(acc);
    }
    out
}

/// Stack of the reciprocal 1/a, assuming a[0] is nowhere zero:
/// r[0] = 1/a[0], r[k] = -r[0] * sum_{j>=1} C(k,j) a[j] r[k-j].
pub fn stack_recip(a: &[Field], depth: usize) -> Vec<Field> {
    assert!(a.len() >= depth, "stack too shallow");
    let binom = binomial_table(depth.saturating_sub(1));
    let r0 = a[0].recip();
    let mut out = vec![r0.clone()];
    for k in 1..depth {
        let mut acc = a[1].zip_with(&out[k - 1], |x, y| x * y).scaled(binom[k][1]);
        for j in 2..=k {
            let term = a[j].zip_with(&out[k - j], |x, y| x * y);
            acc.add_scaled(binom[k][j], &term);
        }
        let rk = r0.zip_with(&acc, |r, s| -r * s);
        out.push(rk);
    }
    out
}

/// Stack of the square root sqrt(a), assuming a[0] is strictly positive:
/// s[0] = sqrt(a[0]), s[k] = (a[k] - sum_{0<j<k} C(k,j) s[j] s[k-j]) / (2 s[0]).
pub fn stack_sqrt(a: &[Field], depth: usize) -> Vec<Field> {
    assert!(a.len() >= depth, "stack too shallow");
    let binom = binomial_table(depth.saturating_sub(1));
    let s0 = a[0].map(f64::sqrt);
    let mut out = vec![s0.clone()];
    for k in 1..depth {
        let mut acc = a[k].clone();
        for j in 1..k {
            let term = out[j].zip_with(&out[k - j], |x, y| x * y);
            acc.add_scaled(-binom[k][j], &term);
        }
        let sk = acc.zip_with(&s0, |num, s| num / (2.0 * s));
        out.push(sk);
    }
    out
}

/// Stack of a linear map applied level-wise.
pub fn stack_map(a: &[Field], f: impl Fn(&Field) -> Field) -> Vec<Field> {
    a.iter().map(f).collect()
}

/// Level-wise linear combination acc[k] += c * a[k].
pub fn stack_add_scaled(acc: &mut [Field], c: f64, a: &[Field]) {
    for (x, y) in acc.iter_mut().zip(a.iter()) {
        x.add_scaled(c, y);
    }
}
