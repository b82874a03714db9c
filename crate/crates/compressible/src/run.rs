//! Trajectory driver: fixed-step integration between evenly spaced output
//! times, with constraint monitors, energy reports, optional tangential
//! filtering, and checkpointing in the grid's binary snapshot format.
//!
//! The step size is frozen at the start of the run — either an explicit
//! override or a fraction of the initial advective–acoustic limit, rounded so
//! that a whole number of steps lands exactly on each output time. A frozen
//! step keeps trajectories bit-reproducible and makes checkpoint/restart
//! exact: restarting from a written snapshot with the same step override
//! replays the identical floating-point sequence.

use crate::{bootstrap, cfl_limit, physical_energy, step, CompError, MhdState, MAX_DEPTH};
use machslab_calculus::divergence;
use machslab_eos::EosParams;
use machslab_grid::{build_grid, read_checkpoint, write_checkpoint, Field, SlabGrid, VecField};
use machslab_incompressible::{FilterSpec, MonitorRow};
use machslab_norms::{energy, EnergyReport};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Schedule and stabilization settings of one run.
#[derive(Debug, Clone)]
pub struct CompRunConfig {
    /// End time; the run covers `[t₀, t₀ + t_final]`.
    pub t_final: f64,
    /// Spacing of output times; must divide `t_final` evenly.
    pub output_every: f64,
    /// Fraction of the initial advective–acoustic limit used as the step.
    pub dt_cfl: f64,
    /// Explicit step override; must divide `output_every` evenly.
    pub dt_fixed: Option<f64>,
    /// Tangential spectral filter applied once per output interval.
    pub filter: Option<FilterSpec>,
    /// Directory for per-output checkpoints (written only when set).
    pub checkpoint_dir: Option<PathBuf>,
}

impl CompRunConfig {
    fn validate(&self) -> Result<usize, CompError> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(CompError::InvalidConfig(format!(
                "t_final must be positive and finite, got {}",
                self.t_final
            )));
        }
        if !(self.output_every.is_finite() && self.output_every > 0.0) {
            return Err(CompError::InvalidConfig(format!(
                "output_every must be positive and finite, got {}",
                self.output_every
            )));
        }
        let ratio = self.t_final / self.output_every;
        let n_out = ratio.round();
        if n_out < 1.0 || (ratio - n_out).abs() > 1e-9 * ratio.max(1.0) {
            return Err(CompError::InvalidConfig(format!(
                "output_every {} does not divide t_final {}",
                self.output_every, self.t_final
            )));
        }
        if !(self.dt_cfl > 0.0 && self.dt_cfl <= 1.0) {
            return Err(CompError::InvalidConfig(format!(
                "dt_cfl must lie in (0, 1], got {}",
                self.dt_cfl
            )));
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(CompError::InvalidConfig(format!(
                    "dt_fixed must be positive and finite, got {dt}"
                )));
            }
        }
        if let Some(f) = &self.filter {
            if f.order == 0 || !(f.strength.is_finite() && f.strength >= 0.0) {
                return Err(CompError::InvalidConfig(
                    "filter needs a positive order and a nonnegative strength".into(),
                ));
            }
        }
        Ok(n_out as usize)
    }
}

/// Everything a run produces: states and diagnostics at each output time.
#[derive(Debug, Clone)]
pub struct CompRunResult {
    /// States at the output times, the initial state first.
    pub states: Vec<MhdState>,
    /// One monitor row per output time.
    pub monitors: Vec<MonitorRow>,
    /// One high-order energy report per output time.
    pub energy_reports: Vec<EnergyReport>,
    /// The frozen step actually used.
    pub dt: f64,
    /// Steps taken between consecutive outputs.
    pub steps_per_output: usize,
}

fn monitor(
    state: &MhdState,
    params: &EosParams,
    e0: f64,
) -> Result<(MonitorRow, EnergyReport), CompError> {
    let stack = bootstrap(state, params, MAX_DEPTH)?;
    let report = energy(stack.view(), params)?;
    let e_now = physical_energy(state, params)?;
    let row = MonitorRow {
        t: state.t,
        e4: report.e4,
        e5: report.e5,
        e6: report.e6,
        e7: report.e7,
        e8: report.e8,
        div_b_l2: divergence(&state.b).l2_norm_sq().sqrt(),
        div_u_l2: divergence(&state.u).l2_norm_sq().sqrt(),
        wall_trace_max: state
            .u
            .normal()
            .wall_abs_max()
            .max(state.b.normal().wall_abs_max()),
        energy_drift: (e_now - e0) / e0.abs().max(f64::MIN_POSITIVE),
    };
    Ok((row, report))
}

fn apply_filter(state: &mut MhdState, f: &FilterSpec) {
    for i in 1..=state.u.dim() {
        state.u.comp_mut(i).filter_tangential_inplace(f.order, f.strength);
    }
    for i in 1..=state.b.dim() {
        state.b.comp_mut(i).filter_tangential_inplace(f.order, f.strength);
    }
    state.p.filter_tangential_inplace(f.order, f.strength);
    state.s.filter_tangential_inplace(f.order, f.strength);
}

/// Integrate `state0` over `[t₀, t₀ + t_final]` with fixed steps, recording
/// monitors, energy reports, and optional checkpoints at each output time.
pub fn run(
    state0: &MhdState,
    params: &EosParams,
    cfg: &CompRunConfig,
) -> Result<CompRunResult, CompError> {
    let n_out = cfg.validate()?;
    state0.validate(params)?;

    let steps_per_output = match cfg.dt_fixed {
        Some(dtf) => {
            let ratio = cfg.output_every / dtf;
            let steps = ratio.round();
            if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
                return Err(CompError::InvalidConfig(format!(
                    "dt_fixed {dtf} does not divide output_every {}",
                    cfg.output_every
                )));
            }
            steps as usize
        }
        None => {
            let limit = cfl_limit(state0, params);
            if !(limit.is_finite() && limit > 0.0) {
                return Err(CompError::InvalidConfig(
                    "initial state admits no positive stable step".into(),
                ));
            }
            (cfg.output_every / (cfg.dt_cfl * limit)).ceil().max(1.0) as usize
        }
    };
    let dt = cfg.output_every / steps_per_output as f64;

    let e0 = physical_energy(state0, params)?;
    let mut state = state0.clone();
    let mut states = Vec::with_capacity(n_out + 1);
    let mut monitors = Vec::with_capacity(n_out + 1);
    let mut reports = Vec::with_capacity(n_out + 1);
    let mut last_checkpoint: Option<PathBuf> = None;

    let record =
        |state: &MhdState,
         index: usize,
         last_checkpoint: &mut Option<PathBuf>,
         monitors: &mut Vec<MonitorRow>,
         reports: &mut Vec<EnergyReport>,
         states: &mut Vec<MhdState>|
         -> Result<(), CompError> {
            let (row, report) = monitor(state, params, e0)?;
            monitors.push(row);
            reports.push(report);
            if let Some(dir) = &cfg.checkpoint_dir {
                let path = dir.join(format!("state_{index:04}.mslb1"));
                write_state_checkpoint(&path, state)?;
                *last_checkpoint = Some(path);
            }
            states.push(state.clone());
            Ok(())
        };

    record(
        &state,
        0,
        &mut last_checkpoint,
        &mut monitors,
        &mut reports,
        &mut states,
    )?;

    for out in 1..=n_out {
        for _ in 0..steps_per_output {
            state = step(&state, params, dt).map_err(|e| CompError::InstabilityAbort {
                t: state.t,
                detail: e.to_string(),
                last_checkpoint: last_checkpoint.clone(),
            })?;
        }
        // Land exactly on the scheduled output time.
        state.t = state0.t + out as f64 * cfg.output_every;
        if let Some(f) = &cfg.filter {
            apply_filter(&mut state, f);
        }
        record(
            &state,
            out,
            &mut last_checkpoint,
            &mut monitors,
            &mut reports,
            &mut states,
        )?;
    }

    Ok(CompRunResult {
        states,
        monitors,
        energy_reports: reports,
        dt,
        steps_per_output,
    })
}

/// Write one state as a binary snapshot: velocity components, magnetic
/// components, pressure, entropy, in that order.
pub fn write_state_checkpoint(path: impl AsRef<Path>, state: &MhdState) -> Result<(), CompError> {
    let d = state.u.dim();
    let mut fields: Vec<&Field> = (1..=d).map(|i| state.u.comp(i)).collect();
    fields.extend((1..=d).map(|i| state.b.comp(i)));
    fields.push(&state.p);
    fields.push(&state.s);
    write_checkpoint(path.as_ref(), state.grid(), state.t, &fields)?;
    Ok(())
}

/// Read a snapshot written by [`write_state_checkpoint`] and re-validate it.
pub fn read_state_checkpoint(
    path: impl AsRef<Path>,
    params: &EosParams,
) -> Result<MhdState, CompError> {
    let (grid, t, mut fields) = read_checkpoint(path.as_ref())?;
    let d = grid.dim();
    if fields.len() != 2 * d + 2 {
        return Err(CompError::InvalidState(format!(
            "snapshot holds {} fields, expected {}",
            fields.len(),
            2 * d + 2
        )));
    }
    let s = fields.pop().expect("length checked");
    let p = fields.pop().expect("length checked");
    let b_comps: Vec<Field> = fields.split_off(d);
    let u_comps = fields;
    let u = VecField::from_components(u_comps)?;
    let b = VecField::from_components(b_comps)?;
    let mut state = MhdState::new(u, b, p, s, params)?;
    state.t = t;
    Ok(state)
}

/// Self-contained JSON description of a run: grid, gas law, schedule, and a
/// named initial-data family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSpec {
    /// Node counts, tangential axes first, wall-normal last
    /// (`[n1, n_normal]` or `[n1, n2, n_normal]`).
    pub grid: Vec<usize>,
    /// Tangential period.
    pub period: f64,
    /// Gas-law parameters.
    pub eos: EosParams,
    /// Fraction of the initial stability limit used as the step.
    pub dt_cfl: f64,
    /// Optional explicit step override.
    #[serde(default)]
    pub dt_fixed: Option<f64>,
    /// End time.
    pub t_final: f64,
    /// Output spacing.
    pub output_every: f64,
    /// Initial-data family.
    pub initial_data: InitialData,
    /// Optional tangential filter.
    #[serde(default)]
    pub filter: Option<FilterSpec>,
}

/// Named initial-data families constructible from a handful of scalars.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum InitialData {
    /// Rest state: constant tangential magnetic field, constant pressure and
    /// entropy, zero velocity.
    Equilibrium {
        pressure: f64,
        b_tangential: Vec<f64>,
        entropy: f64,
    },
    /// Transverse velocity perturbation of a uniform field along the first
    /// tangential axis (three-dimensional grids only).
    AlfvenWave { b0: f64, amplitude: f64 },
    /// Divergence-free shear built from a wall-flattened streamfunction, a
    /// near-uniform magnetic field, a gentle entropy profile, and the
    /// transient-free pressure from [`crate::well_prepared`].
    SmoothShear {
        amplitude: f64,
        b_amplitude: f64,
        entropy_amplitude: f64,
    },
}

impl InitialData {
    /// Realize the family on a grid.
    pub fn build(&self, grid: &SlabGrid, params: &EosParams) -> Result<MhdState, CompError> {
        let dim = grid.dim();
        match self {
            InitialData::Equilibrium {
                pressure,
                b_tangential,
                entropy,
            } => {
                if b_tangential.len() != dim - 1 {
                    return Err(CompError::InvalidConfig(format!(
                        "equilibrium needs {} tangential magnetic components, got {}",
                        dim - 1,
                        b_tangential.len()
                    )));
                }
                let zero = Field::from_fn(grid, |_, _, _| 0.0);
                let u = VecField::from_components(vec![zero.clone(); dim])?;
                let mut b_comps: Vec<Field> = b_tangential
                    .iter()
                    .map(|&c| Field::from_fn(grid, |_, _, _| c))
                    .collect();
                b_comps.push(zero.clone());
                let b = VecField::from_components(b_comps)?;
                let p = Field::from_fn(grid, |_, _, _| *pressure);
                let s = Field::from_fn(grid, |_, _, _| *entropy);
                MhdState::new(u, b, p, s, params)
            }
            InitialData::AlfvenWave { b0, amplitude } => {
                if dim != 3 {
                    return Err(CompError::InvalidConfig(
                        "the transverse wave family needs a three-dimensional grid".into(),
                    ));
                }
                let zero = Field::from_fn(grid, |_, _, _| 0.0);
                let a = *amplitude;
                let u = VecField::from_components(vec![
                    zero.clone(),
                    Field::from_fn(grid, |x1, _, _| a * x1.sin()),
                    zero.clone(),
                ])?;
                let c = *b0;
                let b = VecField::from_components(vec![
                    Field::from_fn(grid, |_, _, _| c),
                    zero.clone(),
                    zero.clone(),
                ])?;
                MhdState::new(u, b, zero.clone(), zero, params)
            }
            InitialData::SmoothShear {
                amplitude,
                b_amplitude,
                entropy_amplitude,
            } => {
                let u = stream_shear(grid, *amplitude, false);
                let b = stream_shear(grid, *b_amplitude, true);
                let sa = *entropy_amplitude;
                let s = Field::from_fn(grid, |x1, _, xn| {
                    sa * x1.cos() * (1.0 - xn * xn)
                });
                crate::well_prepared(&u, &b, &s, params)
            }
        }
    }
}

/// Divergence-free wall-respecting shear from the streamfunction
/// `ψ = amp (1-x_n²)² (sin x₁ + ½ cos 2x₁)`: the in-plane rotated gradient
/// `(∂_n ψ, …, -∂₁ ψ)`, plus a unit tangential background when `background`
/// is set. The two factors live on different axes, so the discrete mixed
/// derivatives commute and the divergence vanishes to roundoff.
pub fn stream_shear(grid: &SlabGrid, amp: f64, background: bool) -> VecField {
    let dim = grid.dim();
    let psi = Field::from_fn(grid, |x1, _, xn| {
        let wall = (1.0 - xn * xn) * (1.0 - xn * xn);
        amp * wall * (x1.sin() + 0.5 * (2.0 * x1).cos())
    });
    let base = if background { 1.0 } else { 0.0 };
    let mut tang1 = psi.dx(dim);
    tang1 = tang1.map(|v| v + base);
    let normal = psi.dx(1).scaled(-1.0);
    let comps = if dim == 2 {
        vec![tang1, normal]
    } else {
        vec![tang1, Field::from_fn(grid, |_, _, _| 0.0), normal]
    };
    VecField::from_components(comps).expect("component layouts agree")
}

impl RunSpec {
    /// Build the grid, the initial state, and the run schedule described by
    /// this document.
    pub fn build(&self) -> Result<(MhdState, EosParams, CompRunConfig), CompError> {
        self.eos.validate()?;
        let (dim, tang, n_normal) = match self.grid.len() {
            2 => (2usize, vec![self.grid[0]], self.grid[1]),
            3 => (3usize, vec![self.grid[0], self.grid[1]], self.grid[2]),
            n => {
                return Err(CompError::InvalidConfig(format!(
                    "grid must list 2 or 3 node counts, got {n}"
                )))
            }
        };
        let grid = build_grid(dim, &tang, n_normal, self.period)?;
        let state = self.initial_data.build(&grid, &self.eos)?;
        let cfg = CompRunConfig {
            t_final: self.t_final,
            output_every: self.output_every,
            dt_cfl: self.dt_cfl,
            dt_fixed: self.dt_fixed,
            filter: self.filter,
            checkpoint_dir: None,
        };
        Ok((state, self.eos, cfg))
    }
}
