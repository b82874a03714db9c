//! Time-derivative stacks: `∂_t^k` of every state variable at one instant,
//! obtained by differentiating the equations of motion in time and
//! substituting already-known lower levels.
//!
//! Every nonlinear term in the equations is a product of state quantities, so
//! its `k`-th time derivative is a binomial Leibniz sum over lower levels.
//! Auxiliary stacks make the recursion closed:
//!
//! * density levels follow the mass-conservation law
//!   `∂_t ρ = -u·∇ρ - ρ ∇·u`, seeded by the gas law at level zero;
//! * specific-volume levels `h = 1/ρ` come from differentiating `ρ h = 1`,
//!   which expresses each level through lower ones and a division by the
//!   level-zero density only;
//! * the reciprocal compressibility `1/f'(p)` is an affine function of
//!   pressure, so its level-`k` entry is exactly `γ` times the level-`k`
//!   pressure for `k ≥ 1` — no series expansion and no aliasing.
//!
//! Each produced level is de-aliased once after its Leibniz sums, matching
//! how the stepping right-hand side treats its products; level one of the
//! stack *is* the right-hand side, by shared code rather than by a separate
//! proof.

use crate::{density_field, CompError, MhdState};
use machslab_calculus::{advect, advect_vec, divergence, gradient};
use machslab_eos::EosParams;
use machslab_grid::{Field, VecField};
use machslab_norms::StackView;

/// Deepest supported stack: levels `0..=8`.
pub const MAX_DEPTH: usize = 8;

/// Time-derivative stack of one state: entry `k` of each vector holds
/// `∂_t^k` of that variable, level `0` being the state itself.
#[derive(Debug, Clone)]
pub struct TimeStack {
    pub u: Vec<VecField>,
    pub b: Vec<VecField>,
    pub p: Vec<Field>,
    pub s: Vec<Field>,
}

impl TimeStack {
    /// Number of derivative levels above the state itself.
    pub fn depth(&self) -> usize {
        self.u.len().saturating_sub(1)
    }

    /// Borrowed view in the layout the energy functionals consume.
    pub fn view(&self) -> StackView<'_> {
        StackView {
            u: &self.u,
            b: &self.b,
            p: &self.p,
            s: &self.s,
        }
    }
}

/// Exact binomial coefficient as a float (small arguments only).
fn binomial(k: usize, j: usize) -> f64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..j {
        num *= (k - i) as u64;
        den *= (i + 1) as u64;
    }
    (num / den) as f64
}

/// Leibniz sum `Σ_j C(k,j) u^(j)·∇ f^(k-j)` for a transported scalar.
fn lb_advect(u: &[VecField], f: &[Field], k: usize) -> Field {
    let mut acc = advect(&u[0], &f[k]);
    for j in 1..=k {
        acc.add_scaled(binomial(k, j), &advect(&u[j], &f[k - j]));
    }
    acc
}

/// Leibniz sum `Σ_j C(k,j) u^(j)·∇ x^(k-j)` for a transported vector.
fn lb_advect_vec(u: &[VecField], x: &[VecField], k: usize) -> VecField {
    let mut acc = advect_vec(&u[0], &x[k]);
    for j in 1..=k {
        acc.add_scaled(binomial(k, j), &advect_vec(&u[j], &x[k - j]));
    }
    acc
}

/// Leibniz sum `Σ_j C(k,j) a^(j) b^(k-j)` of two pointwise scalar stacks.
fn lb_product(a: &[Field], b: &[Field], k: usize) -> Field {
    let mut acc = a[0].zip_with(&b[k], |x, y| x * y);
    for j in 1..=k {
        acc.add_scaled(binomial(k, j), &a[j].zip_with(&b[k - j], |x, y| x * y));
    }
    acc
}

fn scale_vec(c: &Field, v: &VecField) -> VecField {
    let comps: Vec<Field> = (1..=v.dim())
        .map(|i| v.comp(i).zip_with(c, |x, cv| x * cv))
        .collect();
    VecField::from_components(comps).expect("component layouts agree")
}

/// Leibniz sum `Σ_j C(k,j) c^(j) v^(k-j)` of a scalar stack against a vector
/// stack, pointwise per component.
fn lb_scale_vec(c: &[Field], v: &[VecField], k: usize) -> VecField {
    let mut acc = scale_vec(&c[0], &v[k]);
    for j in 1..=k {
        acc.add_scaled(binomial(k, j), &scale_vec(&c[j], &v[k - j]));
    }
    acc
}

fn dot(a: &VecField, b: &VecField) -> Field {
    let mut acc = a.comp(1).zip_with(b.comp(1), |x, y| x * y);
    for i in 2..=a.dim() {
        acc.add_scaled(1.0, &a.comp(i).zip_with(b.comp(i), |x, y| x * y));
    }
    acc
}

/// Leibniz sum `Σ_j C(k,j) a^(j)·b^(k-j)` of two vector stacks.
fn lb_dot(a: &[VecField], b: &[VecField], k: usize) -> Field {
    let mut acc = dot(&a[0], &b[k]);
    for j in 1..=k {
        acc.add_scaled(binomial(k, j), &dot(&a[j], &b[k - j]));
    }
    acc
}

/// Build the time-derivative stack of `state` down to `depth` levels above
/// the state itself.
///
/// Levels are produced bottom-up: level `k+1` of each variable is the
/// Leibniz expansion of its equation of motion evaluated on levels `0..=k`.
/// The stack carries no wall treatment of its own — the levels are the
/// honest time derivatives of the interior equations, and restricting them
/// to the wall planes is precisely how wall compatibility of initial data is
/// measured.
pub fn bootstrap(
    state: &MhdState,
    params: &EosParams,
    depth: usize,
) -> Result<TimeStack, CompError> {
    if depth > MAX_DEPTH {
        return Err(CompError::DepthExceeded {
            requested: depth,
            max: MAX_DEPTH,
        });
    }
    let gamma = params.gamma;

    let mut u0 = state.u.clone();
    u0.dealias_inplace();
    let mut b0 = state.b.clone();
    b0.dealias_inplace();
    let mut p0 = state.p.clone();
    p0.dealias_inplace();
    let mut s0 = state.s.clone();
    s0.dealias_inplace();

    // Density and specific volume are nodal evaluations of the gas law — the
    // coefficient-field convention: products against them are de-aliased,
    // the coefficients themselves are not truncated.
    let rho0 = density_field(&p0, &s0, params)?;
    let h0 = rho0.map(|r| 1.0 / r);
    let invf0 = p0.map(|pv| params.inv_f_prime(pv));

    let mut u = vec![u0];
    let mut b = vec![b0];
    let mut p = vec![p0];
    let mut s = vec![s0];
    let mut rho = vec![rho0];
    let mut h = vec![h0.clone()];
    let mut invf = vec![invf0];
    let mut divu = vec![divergence(&u[0])];
    let mut tension_minus_grad: Vec<VecField> = Vec::new();

    for k in 0..depth {
        // Total-pressure level k: p^(k) + ½ [b·b]^(k).
        let mut bigp_k = p[k].clone();
        bigp_k.add_scaled(0.5, &lb_dot(&b, &b, k));
        bigp_k.dealias_inplace();

        // Magnetic tension minus total-pressure gradient at level k; kept for
        // the Leibniz products against specific-volume levels.
        let mut g_k = lb_advect_vec(&b, &b, k);
        g_k.add_scaled(-1.0, &gradient(&bigp_k));
        g_k.dealias_inplace();
        tension_minus_grad.push(g_k);

        let mut p_next = lb_product(&invf, &divu, k);
        p_next.add_scaled(1.0, &lb_advect(&u, &p, k));
        let mut p_next = p_next.scaled(-1.0);
        p_next.dealias_inplace();

        let mut u_next = lb_scale_vec(&h, &tension_minus_grad, k);
        u_next.add_scaled(-1.0, &lb_advect_vec(&u, &u, k));
        u_next.dealias_inplace();

        let mut b_next = lb_advect_vec(&b, &u, k);
        b_next.add_scaled(-1.0, &lb_scale_vec(&divu, &b, k));
        b_next.add_scaled(-1.0, &lb_advect_vec(&u, &b, k));
        b_next.dealias_inplace();

        let mut s_next = lb_advect(&u, &s, k).scaled(-1.0);
        s_next.dealias_inplace();

        let mut rho_next = lb_advect(&u, &rho, k);
        rho_next.add_scaled(1.0, &lb_product(&rho, &divu, k));
        let mut rho_next = rho_next.scaled(-1.0);
        rho_next.dealias_inplace();

        // Differentiating ρh = 1 a total of m = k+1 times isolates h^(m):
        //   h^(m) = -h^(0) Σ_{j=1..m} C(m,j) ρ^(j) h^(m-j).
        let m = k + 1;
        let mut acc = rho_next.zip_with(&h[0], |r, hh| r * hh);
        for j in 1..m {
            acc.add_scaled(
                binomial(m, j),
                &rho[j].zip_with(&h[m - j], |r, hh| r * hh),
            );
        }
        let mut h_next = acc.zip_with(&h0, |a, hv| -a * hv);
        h_next.dealias_inplace();

        invf.push(p_next.scaled(gamma));
        divu.push(divergence(&u_next));
        u.push(u_next);
        b.push(b_next);
        p.push(p_next);
        s.push(s_next);
        rho.push(rho_next);
        h.push(h_next);
    }

    Ok(TimeStack { u, b, p, s })
}
