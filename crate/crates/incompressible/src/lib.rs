//! Variable-density incompressible MHD reference solver on the slab
//! `T^{d-1} x (-1,1)` with impermeable, perfectly conducting walls.
//!
//! The velocity is kept divergence-free by a variable-density Leray
//! projection: the pressure solve `div((1/rho) grad q) = div X` with the
//! normal-flux condition `(1/rho) dq/dn = X_n` at the walls, handled
//! per tangential Fourier mode by dense collocation solves in the normal
//! direction. Density and entropy are transported scalars; the magnetic
//! field evolves by stretching and advection and stays tangential at the
//! walls.

pub mod elliptic;
pub mod lu;
pub mod monitor;

use std::path::Path;

use machslab_calculus::{advect, advect_vec, divergence, gradient};
use machslab_eos::EosParams;
use machslab_grid::{
    read_checkpoint, write_checkpoint, Complex64, Field, GridError, SlabGrid, VecField,
};
use ndarray::{Array3, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use elliptic::PoissonWorkspace;
pub use monitor::{read_monitor_csv, write_monitor_csv, MonitorRow};

/// Divergence tolerance imposed on validated states.
pub const DIV_TOL: f64 = 1e-9;
/// Wall-trace tolerance imposed on validated states.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum IncError {
    #[error("grid layout mismatch: expected {expected:?}, got {got:?}")]
    GridMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("elliptic block for kappa^2 = {kappa_sq:.6e} is singular")]
    EllipticSingular { kappa_sq: f64 },
    #[error(
        "variable-coefficient pressure solve stalled after {iters} iterations \
         (relative residual {rel_residual:.3e})"
    )]
    PoissonNonConvergence { iters: usize, rel_residual: f64 },
    #[error("elliptic coefficient must be strictly positive (min {min:.3e})")]
    NonPositiveCoefficient { min: f64 },
    #[error("density must be strictly positive (min {min:.3e})")]
    NonPositiveDensity { min: f64 },
    #[error("time step {dt:.3e} exceeds the advective stability bound {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("solution lost finiteness at t = {t}")]
    NumericalBlowup { t: f64 },
    #[error("invalid state: {reason}")]
    InvalidState { reason: String },
    #[error("invalid run configuration: {reason}")]
    InvalidConfig { reason: String },
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// State of the limit system: divergence-free velocity, solenoidal tangential
/// magnetic field, transported density and entropy, and the diagnostic
/// zero-mean pressure.
#[derive(Debug, Clone)]
pub struct IncState {
    pub u: VecField,
    pub b: VecField,
    pub varrho: Field,
    pub s: Field,
    pub pi: Field,
    pub t: f64,
}

impl IncState {
    /// Build and validate an initial state at `t = 0` (pressure starts at
    /// zero; refresh it with [`with_pressure`]).
    pub fn new(u: VecField, b: VecField, varrho: Field, s: Field) -> Result<IncState, IncError> {
        let grid = u.grid().clone();
        for (name, f) in [("b", b.comp(1)), ("varrho", &varrho), ("s", &s)] {
            if !f.grid().same_layout(&grid) {
                return Err(IncError::InvalidState {
                    reason: format!("field {name} is not on the velocity's grid"),
                });
            }
        }
        let state = IncState {
            pi: Field::zeros(&grid),
            u,
            b,
            varrho,
            s,
            t: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    /// Check the structural invariants: divergence-free `u` and `b` to
    /// [`DIV_TOL`], vanishing normal traces to [`TRACE_TOL`], positive density.
    pub fn validate(&self) -> Result<(), IncError> {
        let div_u = divergence(&self.u).l2_norm_sq().sqrt();
        if !(div_u <= DIV_TOL) {
            return Err(IncError::InvalidState {
                reason: format!("velocity divergence {div_u:.3e} exceeds {DIV_TOL:.1e}"),
            });
        }
        let div_b = divergence(&self.b).l2_norm_sq().sqrt();
        if !(div_b <= DIV_TOL) {
            return Err(IncError::InvalidState {
                reason: format!("magnetic divergence {div_b:.3e} exceeds {DIV_TOL:.1e}"),
            });
        }
        let trace = self
            .u
            .normal()
            .wall_abs_max()
            .max(self.b.normal().wall_abs_max());
        if !(trace <= TRACE_TOL) {
            return Err(IncError::InvalidState {
                reason: format!("wall normal trace {trace:.3e} exceeds {TRACE_TOL:.1e}"),
            });
        }
        let rho_min = field_min(&self.varrho);
        if !(rho_min > 0.0) {
            return Err(IncError::NonPositiveDensity { min: rho_min });
        }
        Ok(())
    }

    pub fn grid(&self) -> &SlabGrid {
        self.u.grid()
    }
}

/// Density of the limit system at the initial time: the equation of state
/// evaluated at zero pressure, so it depends on entropy alone.
pub fn limit_density(s0: &Field, params: &EosParams) -> Field {
    s0.map(|s| params.density_unchecked(0.0, s))
}

fn field_min(f: &Field) -> f64 {
    f.values().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Leray projection with variable density: remove the gradient part of `x`
/// measured in the `1/varrho` metric, so the result is divergence-free with
/// zero normal flux at the walls whenever `x` has matching flux data.
pub fn project(
    ws: &mut PoissonWorkspace,
    x: &VecField,
    varrho: &Field,
) -> Result<VecField, IncError> {
    Ok(project_with_pressure(ws, x, varrho)?.0)
}

/// [`project`] returning also the zero-mean multiplier `q` that solves
/// `div((1/varrho) grad q) = div x` with `(1/varrho) dq/dn = x_n` at walls.
pub fn project_with_pressure(
    ws: &mut PoissonWorkspace,
    x: &VecField,
    varrho: &Field,
) -> Result<(VecField, Field), IncError> {
    let rho_min = field_min(varrho);
    if !(rho_min > 0.0) {
        return Err(IncError::NonPositiveDensity { min: rho_min });
    }
    let beta = varrho.recip();
    let rhs = divergence(x);
    let q = ws.solve_var_neumann(&beta, &rhs, Some(x.normal()))?;
    let grad_q = gradient(&q);
    let comps: Vec<Field> = x
        .iter()
        .zip(grad_q.iter())
        .map(|(xc, gc)| {
            let corr = beta.zip_with(gc, |b, g| b * g);
            xc.zip_with(&corr, |a, c| a - c)
        })
        .collect();
    let u = VecField::from_components(comps)?;
    Ok((u, q))
}

/// Momentum forcing `-u.grad(u) + (1/varrho) B.grad(B)`, dealiased — the
/// field whose divergence-free part drives the velocity.
fn momentum_forcing(u: &VecField, b: &VecField, varrho: &Field) -> VecField {
    let beta = varrho.recip();
    let adv = advect_vec(u, u);
    let tension = advect_vec(b, b);
    let comps: Vec<Field> = adv
        .iter()
        .zip(tension.iter())
        .map(|(a, t)| {
            let bt = beta.zip_with(t, |bv, tv| bv * tv);
            a.zip_with(&bt, |av, tv| tv - av)
        })
        .collect();
    let mut x = VecField::from_components(comps).expect("components share the grid");
    x.dealias_inplace();
    x
}

struct Rates {
    du: VecField,
    db: VecField,
    dr: Field,
    ds: Field,
}

fn rhs(
    ws: &mut PoissonWorkspace,
    u: &VecField,
    b: &VecField,
    varrho: &Field,
    s: &Field,
) -> Result<Rates, IncError> {
    let x = momentum_forcing(u, b, varrho);
    let mut du = project(ws, &x, varrho)?;
    // The projection correction's coefficient product can repopulate modes
    // above the 2/3 cutoff; truncating again keeps every evolved field
    // band-limited, which is what lets pointwise products stay alias-free.
    du.dealias_inplace();
    // Making each stage derivative exactly divergence-free is what keeps the
    // evolved field divergence-free: divergence is linear, so a combination
    // of clean derivatives adds nothing to the state's divergence. Doing
    // this inside the derivative evaluation also preserves the integrator's
    // temporal order — the repair becomes part of the vector field being
    // integrated rather than a per-step perturbation of the trajectory.
    repair_divergence(&mut du);
    let stretch = advect_vec(b, u);
    let back = advect_vec(u, b);
    let comps: Vec<Field> = stretch
        .iter()
        .zip(back.iter())
        .map(|(sc, bc)| sc.zip_with(bc, |a, c| a - c))
        .collect();
    let mut db = VecField::from_components(comps)?;
    db.dealias_inplace();
    // Keep the induction increment solenoidal. The product rule that makes
    // its divergence a transport of div B is exact in the periodic
    // directions (band-limited products) but only approximate in the
    // wall-normal direction, where nodal products of full-degree profiles
    // re-interpolate; the defect is a small gradient part that would
    // otherwise accumulate in div B. Project it out — the correction
    // vanishes for the exact solution, and its normal flux is zero because
    // the increment's normal component already vanishes at the walls.
    let phi = ws.solve_const_neumann(&divergence(&db), None)?;
    db.add_scaled(-1.0, &gradient(&phi));
    repair_divergence(&mut db);
    let mut dr = advect(u, varrho).scaled(-1.0);
    dr.dealias_inplace();
    let mut ds = advect(u, s).scaled(-1.0);
    ds.dealias_inplace();
    Ok(Rates { du, db, dr, ds })
}

/// Advective stability bound `dx_min / max(|u| + |B|/sqrt(varrho))`; infinite
/// for a quiescent state.
pub fn cfl_limit(u: &VecField, b: &VecField, varrho: &Field) -> f64 {
    let grid = u.grid();
    let mut dx_min = f64::INFINITY;
    for axis in 1..grid.dim() {
        let n = match axis {
            1 => grid.shape().2,
            _ => grid.shape().1,
        };
        dx_min = dx_min.min(grid.period() / n as f64);
    }
    let nodes = grid.nodes_normal();
    for w in nodes.windows(2) {
        dx_min = dx_min.min(w[1] - w[0]);
    }
    let alfven = b
        .norm_sq_field()
        .zip_with(varrho, |b2, r| (b2 / r).sqrt())
        .abs_max();
    let speed = u.abs_max() + alfven;
    if speed > 0.0 {
        dx_min / speed
    } else {
        f64::INFINITY
    }
}

fn add_state(
    base: &IncState,
    c: f64,
    k: &Rates,
) -> IncState {
    let mut u = base.u.clone();
    u.add_scaled(c, &k.du);
    u.zero_normal_walls_inplace();
    let mut b = base.b.clone();
    b.add_scaled(c, &k.db);
    b.zero_normal_walls_inplace();
    let mut varrho = base.varrho.clone();
    varrho.add_scaled(c, &k.dr);
    let mut s = base.s.clone();
    s.add_scaled(c, &k.ds);
    IncState {
        u,
        b,
        varrho,
        s,
        pi: base.pi.clone(),
        t: base.t + c,
    }
}

/// Remove the mean-tangential-mode profile of the normal component. Its
/// normal derivative vanishes at every interior collocation row, making it a
/// discrete null mode of the projection, while its legitimate content is
/// identically zero: a divergence-free field whose normal flux vanishes at
/// both walls has no mean normal flow. Exact, with no side effects on
/// interior divergence rows.
fn remove_mean_normal_profile(v: &mut VecField) {
    let dim = v.grid().dim();
    let vals = v.comp_mut(dim).values_mut();
    let n3 = vals.shape()[0];
    for j in 0..n3 {
        let mut lane = vals.index_axis_mut(Axis(0), j);
        let mean = lane.sum() / lane.len() as f64;
        lane.mapv_inplace(|x| x - mean);
    }
}

/// Cancel the divergence at the two wall rows — the rows no collocation
/// equation of the projection enforces — by bending the normal component
/// with cubic profiles that vanish at both walls (traces preserved) and
/// have unit normal derivative at one wall each. The collocation derivative
/// is exact on cubics, so the wall rows come out exactly clean. Smoothness
/// matters here: a correction concentrated in single rows would be
/// amplified by the collocation derivative's near-wall entries when the
/// next step differentiates the field. The bend leaves a small interior
/// divergence at the wall-defect scale; `cancel_tangential_divergence`
/// removes it afterwards.
fn absorb_wall_divergence(v: &mut VecField) {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let d = divergence(v);
    let dvals = d.values();
    let nodes = grid.nodes_normal().to_vec();
    let n3 = nodes.len();
    let un = v.comp_mut(dim).values_mut();
    let (nn3, nn2, nn1) = (un.shape()[0], un.shape()[1], un.shape()[2]);
    debug_assert_eq!(nn3, n3);
    for j in 0..nn3 {
        let x = nodes[j];
        // g_b(±1)=0, g_b'(-1)=1, g_b'(+1)=0; g_t mirrors it at the top wall.
        let gb = (1.0 - x) * (1.0 - x) * (1.0 + x) / 4.0;
        let gt = -(1.0 + x) * (1.0 + x) * (1.0 - x) / 4.0;
        if gb == 0.0 && gt == 0.0 {
            continue;
        }
        for i2 in 0..nn2 {
            for i1 in 0..nn1 {
                let db = dvals[(0, i2, i1)];
                let dt_ = dvals[(nn3 - 1, i2, i1)];
                un[(j, i2, i1)] -= db * gb + dt_ * gt;
            }
        }
    }
}

/// Cancel the remaining divergence row by row through the tangential
/// components alone: in each wall-normal row, each nonzero tangential mode
/// of the divergence is removed by the adjustment `i k (div v)^ / |k|^2`,
/// which shifts the tangential divergence of that row by exactly minus
/// itself. The normal component and the wall traces are untouched. Modes
/// the spectral derivative annihilates (the mean and the unpaired highest
/// mode) are skipped: the mean mode carries no divergence once the mean
/// normal profile is removed, and a band-limited field has nothing at the
/// unpaired mode. The correction inherits the normal-direction smoothness
/// of the divergence it cancels.
fn cancel_tangential_divergence(v: &mut VecField) {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let (n3, n2, n1) = grid.shape();
    let d = divergence(v);
    let dhat = grid.fft_tangential(d.values());
    let k1 = grid.kappa(1);
    let k2 = if dim == 3 { grid.kappa(2) } else { vec![0.0] };
    let mut corr: Vec<Array3<Complex64>> = (0..dim - 1)
        .map(|_| Array3::<Complex64>::zeros((n3, n2, n1)))
        .collect();
    for j in 0..n3 {
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                let kk1 = if n1 % 2 == 0 && i1 == n1 / 2 {
                    0.0
                } else {
                    k1[i1]
                };
                let kk2 = if dim == 3 && n2 % 2 == 0 && i2 == n2 / 2 {
                    0.0
                } else {
                    k2[i2]
                };
                let ksq = kk1 * kk1 + kk2 * kk2;
                if ksq == 0.0 {
                    continue;
                }
                let g = dhat[(j, i2, i1)] / ksq;
                let rot = Complex64::new(0.0, 1.0);
                corr[0][(j, i2, i1)] = rot * kk1 * g;
                if dim == 3 {
                    corr[1][(j, i2, i1)] = rot * kk2 * g;
                }
            }
        }
    }
    for (idx, chat) in corr.into_iter().enumerate() {
        let add = grid.ifft_tangential(chat);
        let comp = v.comp_mut(idx + 1).values_mut();
        comp.zip_mut_with(&add, |a, &b| *a += b);
    }
}

/// Drive the divergence of a wall-respecting vector field to roundoff at
/// every collocation row by three exact, trace-preserving operations: drop
/// the discrete null profile of the normal component, absorb the wall-row
/// divergence into smooth normal-component bends, and cancel what remains
/// through the tangential components row by row. Each piece acts at the
/// scale of the defect it removes and stays smooth in the normal direction,
/// so repeating the repair every step neither feeds back into the dynamics
/// nor accumulates.
fn repair_divergence(v: &mut VecField) {
    remove_mean_normal_profile(v);
    absorb_wall_divergence(v);
    cancel_tangential_divergence(v);
}

/// One RK4 step of the limit system. Each stage projects the momentum
/// forcing; the assembled step is re-projected so divergence errors do not
/// accumulate, and wall traces are re-imposed after every update.
pub fn inc_step(
    ws: &mut PoissonWorkspace,
    state: &IncState,
    dt: f64,
) -> Result<IncState, IncError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(IncError::InvalidConfig {
            reason: format!("time step must be positive and finite, got {dt}"),
        });
    }
    let limit = cfl_limit(&state.u, &state.b, &state.varrho);
    if dt > 2.0 * limit {
        return Err(IncError::CflViolation { dt, limit });
    }
    let k1 = rhs(ws, &state.u, &state.b, &state.varrho, &state.s)?;
    let s2 = add_state(state, 0.5 * dt, &k1);
    let k2 = rhs(ws, &s2.u, &s2.b, &s2.varrho, &s2.s)?;
    let s3 = add_state(state, 0.5 * dt, &k2);
    let k3 = rhs(ws, &s3.u, &s3.b, &s3.varrho, &s3.s)?;
    let s4 = add_state(state, dt, &k3);
    let k4 = rhs(ws, &s4.u, &s4.b, &s4.varrho, &s4.s)?;

    let sixth = dt / 6.0;
    let mut u = state.u.clone();
    let mut b = state.b.clone();
    let mut varrho = state.varrho.clone();
    let mut s = state.s.clone();
    for (c, k) in [
        (sixth, &k1),
        (2.0 * sixth, &k2),
        (2.0 * sixth, &k3),
        (sixth, &k4),
    ] {
        u.add_scaled(c, &k.du);
        b.add_scaled(c, &k.db);
        varrho.add_scaled(c, &k.dr);
        s.add_scaled(c, &k.ds);
    }
    u.zero_normal_walls_inplace();
    b.zero_normal_walls_inplace();
    u.dealias_inplace();
    b.dealias_inplace();
    // The stage derivatives are individually projected; combining them
    // leaves only a small divergence residue, which the exact row-local
    // repair removes completely — no elliptic solve is needed here, and
    // none would help: the solver's collocation rows cannot see the wall
    // rows or the null profile, while the repair cleans every row.
    repair_divergence(&mut u);
    repair_divergence(&mut b);

    let t = state.t + dt;
    let finite = u.abs_max().is_finite()
        && b.abs_max().is_finite()
        && varrho.abs_max().is_finite()
        && s.abs_max().is_finite();
    if !finite {
        return Err(IncError::NumericalBlowup { t });
    }
    Ok(IncState {
        u,
        b,
        varrho,
        s,
        pi: state.pi.clone(),
        t,
    })
}

/// Refresh the diagnostic pressure: project the momentum forcing, split off
/// the magnetic pressure, and fix the zero-mean gauge.
pub fn with_pressure(ws: &mut PoissonWorkspace, state: &IncState) -> Result<IncState, IncError> {
    let x = momentum_forcing(&state.u, &state.b, &state.varrho);
    let (_, q) = project_with_pressure(ws, &x, &state.varrho)?;
    let half_b2 = state.b.norm_sq_field().scaled(0.5);
    let mut pi = q.zip_with(&half_b2, |a, c| a - c);
    let mean = pi.mean();
    if mean != 0.0 {
        pi = pi.map(|v| v - mean);
    }
    let mut out = state.clone();
    out.pi = pi;
    Ok(out)
}

/// Kinetic plus magnetic energy `∫ varrho |u|² + |B|²`, the conserved
/// quadratic of the limit system.
pub fn kinetic_magnetic_energy(state: &IncState) -> f64 {
    state
        .u
        .norm_sq_field()
        .zip_with(&state.varrho, |u2, r| r * u2)
        .integrate()
        + state.b.l2_norm_sq()
}

/// Tangential spectral filter setting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    pub strength: f64,
}

/// Run schedule: `n_outputs` output intervals of `steps_per_output` fixed
/// steps each, covering `[0, t_final]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IncRunConfig {
    pub t_final: f64,
    pub n_outputs: usize,
    pub steps_per_output: usize,
    pub filter: Option<FilterSpec>,
}

impl IncRunConfig {
    pub fn dt(&self) -> f64 {
        self.t_final / (self.n_outputs as f64 * self.steps_per_output as f64)
    }

    pub fn validate(&self) -> Result<(), IncError> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(IncError::InvalidConfig {
                reason: format!("t_final must be positive and finite, got {}", self.t_final),
            });
        }
        if self.n_outputs == 0 || self.steps_per_output == 0 {
            return Err(IncError::InvalidConfig {
                reason: "n_outputs and steps_per_output must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// States and diagnostics at the output times `0, T/n, 2T/n, …, T`.
#[derive(Debug)]
pub struct IncRunResult {
    pub snapshots: Vec<IncState>,
    pub monitors: Vec<MonitorRow>,
}

fn monitor_row(state: &IncState, e0: f64) -> MonitorRow {
    let q = kinetic_magnetic_energy(state);
    MonitorRow {
        t: state.t,
        e4: 0.0,
        e5: 0.0,
        e6: 0.0,
        e7: 0.0,
        e8: 0.0,
        div_b_l2: divergence(&state.b).l2_norm_sq().sqrt(),
        div_u_l2: divergence(&state.u).l2_norm_sq().sqrt(),
        wall_trace_max: state
            .u
            .normal()
            .wall_abs_max()
            .max(state.b.normal().wall_abs_max()),
        energy_drift: (q - e0) / e0.abs().max(f64::MIN_POSITIVE),
    }
}

/// March the limit system, recording states and monitor rows at output times.
/// The diagnostic pressure in every recorded snapshot is freshly solved.
pub fn run(state0: IncState, cfg: &IncRunConfig) -> Result<IncRunResult, IncError> {
    cfg.validate()?;
    state0.validate()?;
    let mut ws = PoissonWorkspace::new(state0.grid());
    let dt = cfg.dt();
    let e0 = kinetic_magnetic_energy(&state0);
    let mut state = with_pressure(&mut ws, &state0)?;
    let mut snapshots = Vec::with_capacity(cfg.n_outputs + 1);
    let mut monitors = Vec::with_capacity(cfg.n_outputs + 1);
    monitors.push(monitor_row(&state, e0));
    snapshots.push(state.clone());
    for out in 1..=cfg.n_outputs {
        for _ in 0..cfg.steps_per_output {
            state = inc_step(&mut ws, &state, dt)?;
        }
        if let Some(f) = cfg.filter {
            for field in state.u.iter_mut().chain(state.b.iter_mut()) {
                field.filter_tangential_inplace(f.order, f.strength);
            }
            state.varrho.filter_tangential_inplace(f.order, f.strength);
            state.s.filter_tangential_inplace(f.order, f.strength);
        }
        // Keep output times exact despite accumulated float addition.
        state.t = cfg.t_final * out as f64 / cfg.n_outputs as f64;
        state = with_pressure(&mut ws, &state)?;
        monitors.push(monitor_row(&state, e0));
        snapshots.push(state.clone());
    }
    Ok(IncRunResult {
        snapshots,
        monitors,
    })
}

/// Persist a state (`u` components, `B` components, density, entropy,
/// pressure, in that order) with the shared binary snapshot format.
pub fn write_state_checkpoint(path: &Path, state: &IncState) -> Result<(), IncError> {
    let mut fields: Vec<&Field> = Vec::new();
    for c in state.u.iter() {
        fields.push(c);
    }
    for c in state.b.iter() {
        fields.push(c);
    }
    fields.push(&state.varrho);
    fields.push(&state.s);
    fields.push(&state.pi);
    write_checkpoint(path, state.grid(), state.t, &fields)?;
    Ok(())
}

/// Inverse of [`write_state_checkpoint`].
pub fn read_state_checkpoint(path: &Path) -> Result<IncState, IncError> {
    let (grid, t, mut fields) = read_checkpoint(path)?;
    let dim = grid.dim();
    let expected = 2 * dim + 3;
    if fields.len() != expected {
        return Err(IncError::InvalidState {
            reason: format!(
                "snapshot holds {} fields, expected {expected} for dimension {dim}",
                fields.len()
            ),
        });
    }
    let pi = fields.pop().expect("checked length");
    let s = fields.pop().expect("checked length");
    let varrho = fields.pop().expect("checked length");
    let b = VecField::from_components(fields.split_off(dim))?;
    let u = VecField::from_components(fields)?;
    Ok(IncState {
        u,
        b,
        varrho,
        s,
        pi,
        t,
    })
}
