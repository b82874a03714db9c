//! Fully compressible ideal MHD in the slab, with the pressure stiffness
//! controlled by a Mach-like parameter of the gas law.
//!
//! The solver advances velocity, magnetic field, fluid pressure, and entropy
//! with a classical explicit fourth-order Runge–Kutta scheme on the mixed
//! Fourier × Legendre–Gauss–Lobatto grid. Density is never stored: it is
//! recomputed pointwise from pressure and entropy through the gas law
//! whenever a derivative is evaluated, so thermodynamic consistency is
//! enforced by construction. The perfectly conducting walls enter as strong
//! nodal conditions: the wall-normal velocity and magnetic components are set
//! to zero at the wall planes after every Runge–Kutta stage and after the
//! final combination. The magnetic divergence is deliberately only monitored,
//! never projected or repaired, because its drift (or lack of it) is one of
//! the quantities this laboratory is built to measure.
//!
//! Beyond stepping, the crate computes time-derivative stacks of the state to
//! arbitrary order up to eight by differentiating the equations of motion in
//! time and substituting lower levels ([`bootstrap`]), and constructs
//! initial data whose first time derivative is wall-compatible and free of
//! fast pressure transients ([`well_prepared`]).

pub mod jets;
pub mod prepare;
pub mod run;

pub use jets::{bootstrap, TimeStack, MAX_DEPTH};
pub use prepare::well_prepared;
pub use run::{
    read_state_checkpoint, run, stream_shear, write_state_checkpoint, CompRunConfig,
    CompRunResult, InitialData, RunSpec,
};

use machslab_calculus::CalcError;
use machslab_eos::{EosError, EosParams};
use machslab_grid::{Field, GridError, SlabGrid, VecField};
use machslab_incompressible::IncError;
use machslab_norms::NormError;
use std::path::PathBuf;
use thiserror::Error;

/// Largest wall-trace magnitude a valid state may carry on the wall-normal
/// velocity and magnetic components.
pub const WALL_TRACE_TOL: f64 = 1e-12;

/// Errors reported by the compressible solver.
#[derive(Debug, Error)]
pub enum CompError {
    /// Fields passed together do not share one grid layout.
    #[error("field layouts disagree: {0}")]
    GridMismatch(String),
    /// A state field violates a structural invariant (trace, finiteness).
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// The gas law produced a non-positive or non-finite density.
    #[error("derived density is invalid (min {min:.3e}); pressure/entropy leave the admissible range")]
    InvalidDensity { min: f64 },
    /// The requested step exceeds the advective–acoustic stability bound.
    #[error("time step {dt:.3e} exceeds the advective-acoustic limit {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },
    /// Non-finite values appeared during stepping.
    #[error("non-finite values detected at t = {t:.6e} in {what}")]
    NumericalBlowup { t: f64, what: &'static str },
    /// A time-derivative stack deeper than the supported maximum was requested.
    #[error("time-derivative stack depth {requested} exceeds the supported maximum {max}")]
    DepthExceeded { requested: usize, max: usize },
    /// Data preparation received a field with significant divergence.
    #[error("{which} input is not divergence-free: L2 divergence = {norm:.3e}")]
    NonSolenoidalInput { which: &'static str, norm: f64 },
    /// Data preparation received a field with a nonzero wall trace.
    #[error("{which} input has nonzero wall-normal trace {trace:.3e}")]
    IncompatibleTrace { which: &'static str, trace: f64 },
    /// The pressure fixed point of the data preparation failed to settle.
    #[error("initial-pressure fixed point did not converge (last update {delta:.3e})")]
    PreparationDiverged { delta: f64 },
    /// A run configuration fails validation.
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    /// A run died mid-flight; the last written checkpoint (if any) is named.
    #[error("run aborted at t = {t:.6e}: {detail} (last checkpoint: {last_checkpoint:?})")]
    InstabilityAbort {
        t: f64,
        detail: String,
        last_checkpoint: Option<PathBuf>,
    },
    /// Grid-level failure (layout, checkpoint I/O).
    #[error(transparent)]
    Grid(#[from] GridError),
    /// Gas-law parameter failure.
    #[error(transparent)]
    Eos(#[from] EosError),
    /// Differential-operator failure.
    #[error(transparent)]
    Calc(#[from] CalcError),
    /// Energy-functional failure.
    #[error(transparent)]
    Norm(#[from] NormError),
    /// Elliptic-solver failure from the data-preparation solve.
    #[error(transparent)]
    Inc(#[from] IncError),
}

/// Instantaneous compressible state: velocity `u`, magnetic field `b`, fluid
/// pressure `p`, entropy `s`, and the time `t` it belongs to.
///
/// Density is derived state: it is obtained from `(p, s)` through the gas law
/// and must stay strictly positive. The wall-normal components of `u` and `b`
/// vanish at the wall nodes to within [`WALL_TRACE_TOL`].
#[derive(Debug, Clone)]
pub struct MhdState {
    pub u: VecField,
    pub b: VecField,
    pub p: Field,
    pub s: Field,
    pub t: f64,
}

fn field_is_finite(f: &Field) -> bool {
    f.values().iter().all(|v| v.is_finite())
}

fn vec_is_finite(v: &VecField) -> bool {
    (1..=v.dim()).all(|i| field_is_finite(v.comp(i)))
}

impl MhdState {
    /// Validated constructor at `t = 0`; see [`MhdState::validate`].
    pub fn new(
        u: VecField,
        b: VecField,
        p: Field,
        s: Field,
        params: &EosParams,
    ) -> Result<Self, CompError> {
        let state = MhdState { u, b, p, s, t: 0.0 };
        state.validate(params)?;
        Ok(state)
    }

    /// Check layouts, finiteness, wall traces, and positivity of the derived
    /// density.
    pub fn validate(&self, params: &EosParams) -> Result<(), CompError> {
        let grid = self.u.grid();
        for (name, f) in [("pressure", &self.p), ("entropy", &self.s)] {
            if !grid.same_layout(f.grid()) {
                return Err(CompError::GridMismatch(format!(
                    "{name} field does not share the velocity grid"
                )));
            }
        }
        if !grid.same_layout(self.b.grid()) {
            return Err(CompError::GridMismatch(
                "magnetic field does not share the velocity grid".into(),
            ));
        }
        if !vec_is_finite(&self.u) || !vec_is_finite(&self.b) {
            return Err(CompError::InvalidState(
                "velocity or magnetic field carries non-finite values".into(),
            ));
        }
        if !field_is_finite(&self.p) || !field_is_finite(&self.s) {
            return Err(CompError::InvalidState(
                "pressure or entropy carries non-finite values".into(),
            ));
        }
        if !self.t.is_finite() {
            return Err(CompError::InvalidState("time is not finite".into()));
        }
        let tu = self.u.normal().wall_abs_max();
        if tu > WALL_TRACE_TOL {
            return Err(CompError::InvalidState(format!(
                "wall-normal velocity trace {tu:.3e} exceeds {WALL_TRACE_TOL:.0e}"
            )));
        }
        let tb = self.b.normal().wall_abs_max();
        if tb > WALL_TRACE_TOL {
            return Err(CompError::InvalidState(format!(
                "wall-normal magnetic trace {tb:.3e} exceeds {WALL_TRACE_TOL:.0e}"
            )));
        }
        self.density(params)?;
        Ok(())
    }

    pub fn grid(&self) -> &SlabGrid {
        self.u.grid()
    }

    /// Pointwise density from the gas law; errors if it is not strictly
    /// positive and finite everywhere.
    pub fn density(&self, params: &EosParams) -> Result<Field, CompError> {
        density_field(&self.p, &self.s, params)
    }
}

/// Pointwise gas-law density of a pressure/entropy pair, validated to be
/// finite and strictly positive.
pub fn density_field(p: &Field, s: &Field, params: &EosParams) -> Result<Field, CompError> {
    let rho = p.zip_with(s, |pv, sv| params.density_unchecked(pv, sv));
    let mut min = f64::INFINITY;
    for &v in rho.values() {
        if !v.is_finite() {
            return Err(CompError::InvalidDensity { min: f64::NAN });
        }
        if v < min {
            min = v;
        }
    }
    if min <= 0.0 {
        return Err(CompError::InvalidDensity { min });
    }
    Ok(rho)
}

/// Time derivative of each state variable, as produced by [`rhs`].
#[derive(Debug, Clone)]
pub struct Rates {
    pub du: VecField,
    pub db: VecField,
    pub dp: Field,
    pub ds: Field,
}

/// Evaluate the time derivative of `(u, b, p, s)`.
///
/// The pressure rate is `-(∇·u)/f'(p) - u·∇p` with the gas-law
/// compressibility `f'`; the velocity rate divides the magnetic tension minus
/// the total-pressure gradient by the derived density and subtracts
/// self-advection; the magnetic rate is stretching minus compression minus
/// advection; entropy is transported. All quadratic products are evaluated
/// pointwise on the nodes and then de-aliased by the 2/3 rule in the
/// tangential directions.
///
/// This is exactly level one of the time-derivative stack ([`bootstrap`]), so
/// stacks are consistent with stepping by construction.
pub fn rhs(state: &MhdState, params: &EosParams) -> Result<Rates, CompError> {
    let mut stack = jets::bootstrap(state, params, 1)?;
    Ok(Rates {
        du: stack.u.pop().expect("depth-1 stack has level 1"),
        db: stack.b.pop().expect("depth-1 stack has level 1"),
        dp: stack.p.pop().expect("depth-1 stack has level 1"),
        ds: stack.s.pop().expect("depth-1 stack has level 1"),
    })
}

/// Advective–acoustic step limit `Δx_min / (max|u| + max v_A + max c_s)`.
///
/// `Δx_min` is the smallest grid spacing over all directions (uniform
/// tangential cells and the tightest wall-normal node window), `v_A` the
/// Alfvén speed `|b|/√ρ`, and `c_s` the gas-law sound speed, which scales
/// like the reciprocal of the Mach-like parameter — so resolving the fast
/// wave forces steps proportional to it. A broken state (non-positive
/// density) yields a zero limit rather than an error.
pub fn cfl_limit(state: &MhdState, params: &EosParams) -> f64 {
    let grid = state.grid();
    let mut dx_min = f64::INFINITY;
    for &n in grid.n_tangential() {
        dx_min = dx_min.min(grid.period() / n as f64);
    }
    let nodes = grid.nodes_normal();
    for w in nodes.windows(2) {
        dx_min = dx_min.min(w[1] - w[0]);
    }
    let rho = state
        .p
        .zip_with(&state.s, |pv, sv| params.density_unchecked(pv, sv));
    let u_max = state.u.norm_sq_field().abs_max().sqrt();
    let alfven_max = state
        .b
        .norm_sq_field()
        .zip_with(&rho, |b2, r| if r > 0.0 { (b2 / r).sqrt() } else { f64::INFINITY })
        .abs_max();
    let sound_max = state
        .p
        .zip_with(&state.s, |pv, sv| {
            params.sound_speed(pv, sv).unwrap_or(f64::INFINITY)
        })
        .abs_max();
    let speed = u_max + alfven_max + sound_max;
    if !speed.is_finite() {
        return 0.0;
    }
    if speed == 0.0 {
        return f64::INFINITY;
    }
    dx_min / speed
}

/// Volume integral of `ρ|u|² + |b|² + f'(p) p² + ρ s²`.
///
/// For the continuous dynamics with conducting walls this quantity is exactly
/// conserved; its numerical drift is a primary health monitor of a run.
pub fn physical_energy(state: &MhdState, params: &EosParams) -> Result<f64, CompError> {
    let rho = state.density(params)?;
    let mut integrand = state.u.norm_sq_field().zip_with(&rho, |q, r| q * r);
    integrand.add_scaled(1.0, &state.b.norm_sq_field());
    let pressure_part = state
        .p
        .map(|pv| params.f_prime_unchecked(pv) * pv * pv);
    integrand.add_scaled(1.0, &pressure_part);
    let entropy_part = state.s.zip_with(&rho, |sv, r| r * sv * sv);
    integrand.add_scaled(1.0, &entropy_part);
    Ok(integrand.integrate())
}

fn advanced(state: &MhdState, c: f64, k: &Rates) -> MhdState {
    let mut u = state.u.clone();
    u.add_scaled(c, &k.du);
    u.zero_normal_walls_inplace();
    let mut b = state.b.clone();
    b.add_scaled(c, &k.db);
    b.zero_normal_walls_inplace();
    let mut p = state.p.clone();
    p.add_scaled(c, &k.dp);
    let mut s = state.s.clone();
    s.add_scaled(c, &k.ds);
    MhdState {
        u,
        b,
        p,
        s,
        t: state.t + c,
    }
}

/// One classical fourth-order Runge–Kutta step of size `dt`.
///
/// The wall conditions are imposed strongly — the wall-normal velocity and
/// magnetic components are zeroed at the wall nodes — on every stage state
/// and on the final combination; this nodal reflection is the whole boundary
/// treatment. `dt` may be negative (backward integration); its magnitude must
/// not exceed [`cfl_limit`] of the current state. Non-finite results abort
/// with a blow-up diagnostic.
pub fn step(state: &MhdState, params: &EosParams, dt: f64) -> Result<MhdState, CompError> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(CompError::InvalidConfig(format!(
            "time step must be finite and nonzero, got {dt}"
        )));
    }
    let limit = cfl_limit(state, params);
    if !(dt.abs() <= limit) {
        return Err(CompError::CflViolation { dt, limit });
    }
    let k1 = rhs(state, params)?;
    let s2 = advanced(state, 0.5 * dt, &k1);
    let k2 = rhs(&s2, params)?;
    let s3 = advanced(state, 0.5 * dt, &k2);
    let k3 = rhs(&s3, params)?;
    let s4 = advanced(state, dt, &k3);
    let k4 = rhs(&s4, params)?;

    let sixth = dt / 6.0;
    let third = dt / 3.0;
    let mut u = state.u.clone();
    u.add_scaled(sixth, &k1.du);
    u.add_scaled(third, &k2.du);
    u.add_scaled(third, &k3.du);
    u.add_scaled(sixth, &k4.du);
    u.zero_normal_walls_inplace();
    let mut b = state.b.clone();
    b.add_scaled(sixth, &k1.db);
    b.add_scaled(third, &k2.db);
    b.add_scaled(third, &k3.db);
    b.add_scaled(sixth, &k4.db);
    b.zero_normal_walls_inplace();
    let mut p = state.p.clone();
    p.add_scaled(sixth, &k1.dp);
    p.add_scaled(third, &k2.dp);
    p.add_scaled(third, &k3.dp);
    p.add_scaled(sixth, &k4.dp);
    let mut s = state.s.clone();
    s.add_scaled(sixth, &k1.ds);
    s.add_scaled(third, &k2.ds);
    s.add_scaled(third, &k3.ds);
    s.add_scaled(sixth, &k4.ds);

    let t = state.t + dt;
    let next = MhdState { u, b, p, s, t };
    for (what, ok) in [
        ("velocity", vec_is_finite(&next.u)),
        ("magnetic field", vec_is_finite(&next.b)),
        ("pressure", field_is_finite(&next.p)),
        ("entropy", field_is_finite(&next.s)),
    ] {
        if !ok {
            return Err(CompError::NumericalBlowup { t, what });
        }
    }
    Ok(next)
}
