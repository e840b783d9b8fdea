//! Time integration of the moving-front system and classification of its
//! long-time behaviour.
//!
//! Fields live on a master grid of cell centres `x_i = (i + 1/2) dx` that
//! grows by doubling. A node is active while `x_i < h`; the cell containing
//! `h` enters integrals with its covered fraction. The front moves with the
//! outward flux
//!
//! ```text
//! h' = int_0^h [mu1 u(x) T1(h - x) + mu2 v(x) T2(h - x)] dx,   T = upper kernel tail.
//! ```

use std::collections::VecDeque;

use serde::Serialize;

use crate::eigen::{self, OperatorSpec};
use crate::error::{Error, Result};
use crate::field::{clamp_roundoff, sup_norm, Field};
use crate::kernel::Kernel;
use crate::model::{InitialProfile, ModelParams};
use crate::steady::{estimate_decay, sample_stride, step_plan, DecayEstimate, Trajectory};

/// Default grid spacing cap.
pub const DEFAULT_DX: f64 = 0.05;
/// Threshold on `lambda_1(h)` certifying spreading.
pub const SPREADING_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct FreeBoundaryState {
    pub t: f64,
    pub h: f64,
    pub dx: f64,
    /// Values on the active nodes `x_i < h`.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FreeBoundaryState {
    pub fn active(&self) -> usize {
        self.u.len()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.active())
            .map(|i| (i as f64 + 0.5) * self.dx)
            .collect()
    }
}

/// Covered fraction of each of the first `m` cells for a front at `h`.
fn coverage(h: f64, dx: f64, m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| ((h - i as f64 * dx) / dx).clamp(0.0, 1.0))
        .collect()
}

/// Number of nodes with `x_i < h`.
fn active_count(h: f64, dx: f64) -> usize {
    let k = (h / dx - 0.5).ceil();
    if k <= 0.0 {
        0
    } else {
        k as usize
    }
}

/// Steps the moving-front system; owns its master grid.
#[derive(Debug, Clone)]
pub struct Simulator {
    field: Field,
    state: FreeBoundaryState,
}

impl Simulator {
    /// Start from the initial profiles in `params` on `cells` cells over `[0, h0]`.
    pub fn new(params: &ModelParams, cells: usize) -> Result<Simulator> {
        params.validate()?;
        if cells < eigen::MIN_CELLS {
            return Err(Error::invalid(
                "need at least 8 cells on the initial habitat",
            ));
        }
        let dx = params.h0 / cells as f64;
        let field = Field::new(params, dx, (2 * cells).max(64));
        let x: Vec<f64> = (0..cells).map(|i| field.node(i)).collect();
        let u = x.iter().map(|&y| params.u0.eval(y, params.h0)).collect();
        let v = x.iter().map(|&y| params.v0.eval(y, params.h0)).collect();
        Ok(Simulator {
            field,
            state: FreeBoundaryState {
                t: 0.0,
                h: params.h0,
                dx,
                u,
                v,
            },
        })
    }

    /// Default resolution: spacing at most [`DEFAULT_DX`], at least 20 cells on `[0, h0]`.
    pub fn with_default_grid(params: &ModelParams) -> Result<Simulator> {
        Simulator::new(params, default_cells(params.h0))
    }

    pub fn from_state(params: &ModelParams, state: FreeBoundaryState) -> Result<Simulator> {
        params.validate()?;
        if !(state.h > 0.0) || !(state.dx > 0.0) || state.u.len() != state.v.len() {
            return Err(Error::invalid("inconsistent free-boundary state"));
        }
        if state.u.len() != active_count(state.h, state.dx) {
            return Err(Error::invalid(
                "active nodes must be exactly those with x < h",
            ));
        }
        let field = Field::new(params, state.dx, (2 * state.u.len()).max(64));
        Ok(Simulator { field, state })
    }

    pub fn state(&self) -> &FreeBoundaryState {
        &self.state
    }

    pub fn params(&self) -> &ModelParams {
        self.field.params()
    }

    /// Front velocity for fields `(u, v)` on the first nodes and front `h`.
    fn flux(&self, h: f64, u: &[f64], v: &[f64]) -> f64 {
        let p = self.field.params();
        let dx = self.state.dx;
        let cov = coverage(h, dx, u.len());
        let mut total = 0.0;
        for i in 0..u.len() {
            if u[i] == 0.0 && v[i] == 0.0 {
                continue;
            }
            let gap = h - self.field.node(i);
            total +=
                cov[i] * (p.mu1 * u[i] * p.kernel1.tail(gap) + p.mu2 * v[i] * p.kernel2.tail(gap));
        }
        total * dx
    }

    /// Current front velocity.
    pub fn front_speed(&self) -> f64 {
        self.flux(self.state.h, &self.state.u, &self.state.v)
    }

    /// `int (u + H'(0) v / b)` over the habitat.
    pub fn mass(&self) -> f64 {
        let p = self.field.params();
        let w = p.nonlinearity.h_slope() / p.b;
        let cov = coverage(self.state.h, self.state.dx, self.state.active());
        let s: f64 = (0..self.state.active())
            .map(|i| cov[i] * (self.state.u[i] + w * self.state.v[i]))
            .sum();
        s * self.state.dx
    }

    /// One Heun step for `(u, v, h)`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let m = self.state.active();
        let dx = self.state.dx;
        let h = self.state.h;
        let (u, v) = (&self.state.u, &self.state.v);

        let cov1 = coverage(h, dx, m);
        let mut k1u = vec![0.0; m];
        let mut k1v = vec![0.0; m];
        self.field.rhs(u, v, &cov1, &mut k1u, &mut k1v);
        let f1 = self.flux(h, u, v);

        let pu: Vec<f64> = (0..m).map(|i| u[i] + dt * k1u[i]).collect();
        let pv: Vec<f64> = (0..m).map(|i| v[i] + dt * k1v[i]).collect();
        let ph = h + dt * f1;
        let cov2 = coverage(ph, dx, m);
        let mut k2u = vec![0.0; m];
        let mut k2v = vec![0.0; m];
        self.field.rhs(&pu, &pv, &cov2, &mut k2u, &mut k2v);
        let f2 = self.flux(ph, &pu, &pv);

        let t = self.state.t + dt;
        let state = &mut self.state;
        for i in 0..m {
            state.u[i] += 0.5 * dt * (k1u[i] + k2u[i]);
            state.v[i] += 0.5 * dt * (k1v[i] + k2v[i]);
        }
        let worst = clamp_roundoff(&mut state.u).min(clamp_roundoff(&mut state.v));
        if worst < -1e-12 {
            return Err(Error::StepFailure {
                t,
                reason: format!("negative density {worst:e}; time step too large"),
            });
        }
        let dh = 0.5 * dt * (f1 + f2);
        if !(dh >= 0.0) || !dh.is_finite() {
            return Err(Error::StepFailure {
                t,
                reason: format!("invalid front increment {dh:e}"),
            });
        }
        state.h += dh;
        state.t = t;
        let active = active_count(state.h, dx);
        if active > m {
            state.u.resize(active, 0.0);
            state.v.resize(active, 0.0);
            if active + 1 > self.field.capacity() {
                let mut cap = self.field.capacity();
                while cap < active + 1 {
                    cap *= 2;
                }
                self.field.reserve(cap);
            }
        }
        Ok(())
    }
}

/// Cells on `[0, h0]` for the default grid.
pub fn default_cells(h0: f64) -> usize {
    ((h0 / DEFAULT_DX).ceil() as usize).max(20)
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SimulationTrace {
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    pub sup_u: Vec<f64>,
    pub sup_v: Vec<f64>,
    pub mass: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    /// Largest values of `u` and `v` seen at samples.
    pub m1: f64,
    pub m2: f64,
}

impl SimulationTrace {
    fn record(&mut self, sim: &Simulator) {
        let s = sim.state();
        let su = sup_norm(&s.u);
        let sv = sup_norm(&s.v);
        self.t.push(s.t);
        self.h.push(s.h);
        self.sup_u.push(su);
        self.sup_v.push(sv);
        self.mass.push(sim.mass());
        self.m1 = self.m1.max(su);
        self.m2 = self.m2.max(sv);
    }

    fn snapshot(&mut self, sim: &Simulator) {
        let s = sim.state();
        self.snapshots.push(Snapshot {
            t: s.t,
            x: s.nodes(),
            u: s.u.clone(),
            v: s.v.clone(),
        });
    }

    pub fn final_h(&self) -> f64 {
        *self.h.last().unwrap()
    }

    /// Sup-norm trajectory `sup u + sup v` as a decay input.
    pub fn norms(&self) -> Trajectory {
        Trajectory {
            t: self.t.clone(),
            norm_u: self.sup_u.clone(),
            norm_v: self.sup_v.clone(),
            norm_sum: self
                .sup_u
                .iter()
                .zip(&self.sup_v)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOptions {
    pub horizon: f64,
    pub sample_interval: f64,
    pub snapshot_times: Vec<f64>,
    /// Cells on `[0, h0]`; `None` for [`default_cells`].
    pub cells: Option<usize>,
    /// Cap on the time step below the stability bound.
    pub max_dt: Option<f64>,
}

impl SimulationOptions {
    pub fn new(horizon: f64) -> SimulationOptions {
        SimulationOptions {
            horizon,
            sample_interval: 0.1,
            snapshot_times: Vec::new(),
            cells: None,
            max_dt: None,
        }
    }
}

pub fn simulate(params: &ModelParams, options: &SimulationOptions) -> Result<SimulationTrace> {
    if !(options.horizon > 0.0) || !(options.sample_interval > 0.0) {
        return Err(Error::invalid(
            "horizon and sample interval must be positive",
        ));
    }
    let mut sim = Simulator::new(
        params,
        options.cells.unwrap_or_else(|| default_cells(params.h0)),
    )?;
    let (mut steps, mut dt) = step_plan(params, options.horizon);
    if let Some(cap) = options.max_dt.filter(|c| *c < dt) {
        steps = (options.horizon / cap).ceil() as usize;
        dt = options.horizon / steps as f64;
    }
    let stride = sample_stride(dt, options.sample_interval);
    let mut snaps: Vec<f64> = options.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    let mut next_snap = 0;
    let mut trace = SimulationTrace::default();
    trace.record(&sim);
    while next_snap < snaps.len() && snaps[next_snap] <= 0.5 * dt {
        trace.snapshot(&sim);
        next_snap += 1;
    }
    for s in 1..=steps {
        sim.step(dt)?;
        if s % stride == 0 || s == steps {
            trace.record(&sim);
        }
        let t = sim.state().t;
        while next_snap < snaps.len() && snaps[next_snap] <= t + 0.5 * dt {
            trace.snapshot(&sim);
            next_snap += 1;
        }
    }
    Ok(trace)
}

/// Right-hand side of the mass bound: `h0 + M(0) / min{d1/mu1, H'(0) d2 / (b mu2)}`.
pub fn mass_bound(params: &ModelParams, initial_mass: f64) -> f64 {
    let hp = params.nonlinearity.h_slope();
    let r1 = if params.mu1 > 0.0 {
        params.d1 / params.mu1
    } else {
        f64::INFINITY
    };
    let r2 = if params.mu2 > 0.0 {
        hp * params.d2 / (params.b * params.mu2)
    } else {
        f64::INFINITY
    };
    params.h0 + initial_mass / r1.min(r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Spreading,
    Vanishing,
    Undecided,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyPolicy {
    pub t_max: f64,
    /// Time between checks of the verdict rules.
    pub check_interval: f64,
    /// Window over which a stalled front is measured.
    pub stall_window: f64,
    pub stall_tol: f64,
    pub mass_tol: f64,
    pub cells: Option<usize>,
}

impl Default for ClassifyPolicy {
    fn default() -> Self {
        ClassifyPolicy {
            t_max: 500.0,
            check_interval: 1.0,
            stall_window: 10.0,
            stall_tol: 1e-6,
            mass_tol: 1e-6,
            cells: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub verdict: Verdict,
    /// `lambda_1` at the last evaluated front position.
    pub lambda1: f64,
    pub h: f64,
    /// `h(t) - h(t - window)` at the decision time.
    pub stall: f64,
    pub mass: f64,
    /// Time at which the verdict was reached (or `t_max`).
    pub horizon: f64,
    pub trace: SimulationTrace,
}

fn lambda1_at(h: f64, params: &ModelParams) -> Result<f64> {
    Ok(eigen::principal_eigenpair(&OperatorSpec::for_lambda1(h, params))?.lambda_p)
}

/// Run until spreading is certified by `lambda_1(h(t)) > 0`, vanishing is
/// established by a stalled front with negligible mass, or `t_max` passes.
pub fn classify(params: &ModelParams, policy: &ClassifyPolicy) -> Result<Outcome> {
    let mut sim = Simulator::new(
        params,
        policy.cells.unwrap_or_else(|| default_cells(params.h0)),
    )?;
    let dt_max = params.stable_dt();
    let per_check = (policy.check_interval / dt_max).ceil().max(1.0) as usize;
    let dt = policy.check_interval / per_check as f64;
    let checks = (policy.t_max / policy.check_interval).ceil() as usize;
    let window_checks = (policy.stall_window / policy.check_interval)
        .round()
        .max(1.0) as usize;

    let mut trace = SimulationTrace::default();
    trace.record(&sim);
    let mut lambda1 = lambda1_at(params.h0, params)?;
    let mut lambda_h = params.h0;
    let mut history: VecDeque<f64> = VecDeque::from([params.h0]);
    let finish = |verdict, lambda1, stall, sim: &Simulator, trace: SimulationTrace| Outcome {
        verdict,
        lambda1,
        h: sim.state().h,
        stall,
        mass: sim.mass(),
        horizon: sim.state().t,
        trace,
    };
    if lambda1 > SPREADING_MARGIN {
        return Ok(finish(Verdict::Spreading, lambda1, f64::NAN, &sim, trace));
    }
    for _ in 0..checks {
        for _ in 0..per_check {
            sim.step(dt)?;
        }
        trace.record(&sim);
        let h = sim.state().h;
        history.push_back(h);
        if history.len() > window_checks + 1 {
            history.pop_front();
        }
        if h > lambda_h * (1.0 + 1e-9) {
            lambda1 = lambda1_at(h, params)?;
            lambda_h = h;
            if lambda1 > SPREADING_MARGIN {
                return Ok(finish(Verdict::Spreading, lambda1, f64::NAN, &sim, trace));
            }
        }
        if history.len() == window_checks + 1 {
            let stall = h - history[0];
            if stall < policy.stall_tol && sim.mass() < policy.mass_tol && lambda1 < 0.0 {
                return Ok(finish(Verdict::Vanishing, lambda1, stall, &sim, trace));
            }
        }
    }
    let stall = sim.state().h - history[0];
    Ok(finish(Verdict::Undecided, lambda1, stall, &sim, trace))
}

/// Decay fit of a vanishing run against `-lambda_1(h_inf)`.
pub fn vanishing_rate(trace: &SimulationTrace, lambda1_hinf: f64) -> Result<DecayEstimate> {
    let n = trace.t.len();
    let vanishing = n >= 3
        && lambda1_hinf < 0.0
        && trace.mass[n - 1] < trace.mass[0]
        && trace.h[n - 1] - trace.h[n / 2] < 1e-3 * trace.h[n - 1].max(1.0);
    if !vanishing {
        return Err(Error::Precondition(
            "vanishing rate needs a vanishing trace (stalled front, decaying mass, lambda_1 < 0)"
                .into(),
        ));
    }
    Ok(estimate_decay(&trace.norms(), lambda1_hinf))
}

#[derive(Debug, Clone, Serialize)]
pub struct MismatchRow {
    pub h0: f64,
    /// `d int_0^h0 [J(h0 - y) + J(h0 + y)] u0(y) dy` with the candidate `(d, J)`.
    pub boundary_lhs: f64,
    /// `d int_0^h0 J(h0 - y) u0(y) dy`
    pub boundary_rhs: f64,
    /// Symmetrized flux with half the front coefficient.
    pub flux_lhs: f64,
    /// One-sided flux.
    pub flux_rhs: f64,
    /// `int_0^h0 J(x - h0) u0(x) dx`, the contradiction term; positive
    /// whenever `u0` is nontrivial.
    pub residual: f64,
}

/// Compare the one-sided problem with its even extension at `t = 0`: the
/// boundary identity and the front-flux identity with `(d, J, mu / 2)`.
pub fn symmetrization_mismatch(
    kernel: &Kernel,
    d: f64,
    mu: f64,
    u0: &InitialProfile,
    h0_grid: &[f64],
    amplitude_scale: f64,
) -> Vec<MismatchRow> {
    const Q: usize = 4000;
    h0_grid
        .iter()
        .map(|&h0| {
            let dx = h0 / Q as f64;
            let mut row = MismatchRow {
                h0,
                boundary_lhs: 0.0,
                boundary_rhs: 0.0,
                flux_lhs: 0.0,
                flux_rhs: 0.0,
                residual: 0.0,
            };
            for k in 0..Q {
                let y = (k as f64 + 0.5) * dx;
                let w = amplitude_scale * u0.eval(y, h0) * dx;
                let near = kernel.density(h0 - y);
                let far = kernel.density(h0 + y);
                row.boundary_lhs += d * (near + far) * w;
                row.boundary_rhs += d * near * w;
                row.flux_lhs += 0.5 * mu * (kernel.tail(h0 - y) + kernel.tail(h0 + y)) * w;
                row.flux_rhs += mu * kernel.tail(h0 - y) * w;
                row.residual += near * w;
            }
            row
        })
        .collect()
}
