//! Construction of initial data whose first time derivative is slow and
//! wall-compatible.
//!
//! Given a divergence-free velocity, a divergence-free magnetic field, and an
//! entropy profile, the fluid pressure that suppresses the fast initial
//! pressure transient solves a Neumann–Poisson problem. The problem is posed
//! here for the *total* pressure `P = p + |b|²/2`, because that is the
//! combination whose gradient appears in the momentum balance:
//!
//! ```text
//!   Δ P₀ = ∇·( b·∇b − ρ₀ u·∇u ),      ∂₃ P₀ |walls = (b·∇b)₃ |walls ,
//! ```
//!
//! with the fluid pressure recovered as `p₀ = P₀ - |b₀|²/2`, re-gauged to
//! zero mean. Folding the magnetic-pressure Laplacian into the unknown keeps
//! the interior equation and the wall flux mutually compatible: the flux rows
//! and the divergence rows come from one vector field, so the boundary
//! integral of the flux equals the volume integral of the source identically,
//! and the resulting first velocity derivative has zero wall-normal trace.
//! Stating the same problem directly for the fluid pressure with this flux
//! would be over-determined whenever `|b|²` varies toward the wall.
//!
//! Density feeds back into the source through the gas law, so the solve is
//! wrapped in a fixed-point iteration; the feedback is quadratic in the
//! Mach-like parameter and settles in a handful of sweeps.

use crate::{density_field, CompError, MhdState};
use machslab_calculus::{advect_vec, divergence};
use machslab_eos::EosParams;
use machslab_grid::{Field, VecField};
use machslab_incompressible::PoissonWorkspace;

/// Largest divergence or wall trace accepted on the incoming fields.
pub const INPUT_TOL: f64 = 1e-10;

const FIXED_POINT_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 40;

fn scale_vec(c: &Field, v: &VecField) -> VecField {
    let comps: Vec<Field> = (1..=v.dim())
        .map(|i| v.comp(i).zip_with(c, |x, cv| x * cv))
        .collect();
    VecField::from_components(comps).expect("component layouts agree")
}

/// Build a compressible state at `t = 0` from incompressible-style data:
/// the velocity and magnetic field are taken as given, the entropy is taken
/// as given, and the fluid pressure is constructed so that the initial
/// velocity derivative is free of a fast pressure transient and has zero
/// wall-normal trace.
///
/// Inputs must be divergence-free and wall-respecting to [`INPUT_TOL`]; the
/// wall-normal components are then zeroed exactly at the wall nodes (a
/// no-op for clean data) so the returned state meets the strict state
/// invariants.
pub fn well_prepared(
    u0: &VecField,
    b0: &VecField,
    s0: &Field,
    params: &EosParams,
) -> Result<MhdState, CompError> {
    let grid = u0.grid();
    if !grid.same_layout(b0.grid()) || !grid.same_layout(s0.grid()) {
        return Err(CompError::GridMismatch(
            "velocity, magnetic field, and entropy must share one grid".into(),
        ));
    }

    let div_u = divergence(u0).l2_norm_sq().sqrt();
    if !(div_u <= INPUT_TOL) {
        return Err(CompError::NonSolenoidalInput {
            which: "velocity",
            norm: div_u,
        });
    }
    let div_b = divergence(b0).l2_norm_sq().sqrt();
    if !(div_b <= INPUT_TOL) {
        return Err(CompError::NonSolenoidalInput {
            which: "magnetic field",
            norm: div_b,
        });
    }
    let trace_u = u0.normal().wall_abs_max();
    if !(trace_u <= INPUT_TOL) {
        return Err(CompError::IncompatibleTrace {
            which: "velocity",
            trace: trace_u,
        });
    }
    let trace_b = b0.normal().wall_abs_max();
    if !(trace_b <= INPUT_TOL) {
        return Err(CompError::IncompatibleTrace {
            which: "magnetic field",
            trace: trace_b,
        });
    }

    let mut u = u0.clone();
    u.dealias_inplace();
    u.zero_normal_walls_inplace();
    let mut b = b0.clone();
    b.dealias_inplace();
    b.zero_normal_walls_inplace();
    let mut s = s0.clone();
    s.dealias_inplace();

    let mut tension = advect_vec(&b, &b);
    tension.dealias_inplace();
    let mut half_b2 = b.norm_sq_field().scaled(0.5);
    half_b2.dealias_inplace();
    let mut advection = advect_vec(&u, &u);
    advection.dealias_inplace();

    let mut ws = PoissonWorkspace::new(grid);
    let mut p_prev = Field::from_fn(grid, |_, _, _| 0.0);
    let mut last_delta = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let rho = density_field(&p_prev, &s, params)?;
        // Source field b·∇b − ρ u·∇u; its divergence is the interior data and
        // its wall-normal trace the flux, so the Neumann problem is
        // compatible by construction.
        let mut source = tension.clone();
        source.add_scaled(-1.0, &scale_vec(&rho, &advection));
        source.dealias_inplace();
        let interior = divergence(&source);
        let total_p = ws.solve_const_neumann(&interior, Some(source.normal()))?;
        let mut p_new = total_p;
        p_new.add_scaled(-1.0, &half_b2);
        let mean = p_new.mean();
        let p_new = p_new.map(|v| v - mean);

        last_delta = p_new
            .values()
            .iter()
            .zip(p_prev.values().iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = 1.0 + p_new.abs_max();
        p_prev = p_new;
        if last_delta <= FIXED_POINT_TOL * scale {
            return MhdState::new(u, b, p_prev, s, params);
        }
    }
    Err(CompError::PreparationDiverged { delta: last_delta })
}
