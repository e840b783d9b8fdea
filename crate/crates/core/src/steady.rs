//! Positive steady states on a fixed domain `[0, l]` and the fixed-domain
//! evolution with its decay diagnostics.

use serde::Serialize;

use crate::eigen::{self, default_resolution, OperatorSpec};
use crate::error::{Error, Result};
use crate::field::{clamp_roundoff, sup_norm, Field};
use crate::model::{equilibrium, ModelParams};

const SANDWICH_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 100_000;
/// `|lambda_1| <= CRITICAL_BAND` counts as critical.
pub const CRITICAL_BAND: f64 = 1e-6;

/// The model restricted to `[0, l]` on `n` cells.
#[derive(Debug, Clone)]
pub struct FixedDomain {
    l: f64,
    field: Field,
    coverage: Vec<f64>,
}

impl FixedDomain {
    pub fn new(l: f64, params: &ModelParams, n: usize) -> Result<FixedDomain> {
        params.validate()?;
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid("domain length l must be positive"));
        }
        if n < eigen::MIN_CELLS {
            return Err(Error::invalid(format!(
                "resolution N={n} too small, need N >= 8"
            )));
        }
        Ok(FixedDomain {
            l,
            field: Field::new(params, l / n as f64, n),
            coverage: vec![1.0; n],
        })
    }

    pub fn with_default_resolution(l: f64, params: &ModelParams) -> Result<FixedDomain> {
        FixedDomain::new(l, params, default_resolution(l))
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    pub fn cells(&self) -> usize {
        self.coverage.len()
    }

    pub fn params(&self) -> &ModelParams {
        self.field.params()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.cells()).map(|i| self.field.node(i)).collect()
    }

    /// `Gamma[(u, v)] = ((d1 K1 u + H(v)) / (d1 j1 + a), (d2 K2 v + G(u)) / (d2 j2 + b))`.
    pub fn gamma(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.cells();
        let p = self.params();
        let (j1, j2) = self.field.boundary_weights();
        let mut gu = vec![0.0; n];
        let mut gv = vec![0.0; n];
        self.field.integral(0, u, &self.coverage, &mut gu);
        self.field.integral(1, v, &self.coverage, &mut gv);
        for i in 0..n {
            gu[i] = (gu[i].max(0.0) + p.nonlinearity.h(v[i])) / (p.d1 * j1[i] + p.a);
            gv[i] = (gv[i].max(0.0) + p.nonlinearity.g(u[i])) / (p.d2 * j2[i] + p.b);
        }
        (gu, gv)
    }

    /// Pointwise steady-state operator `F(u, v)`; zero at a steady state.
    pub fn operator(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.cells();
        let mut fu = vec![0.0; n];
        let mut fv = vec![0.0; n];
        self.field.rhs(u, v, &self.coverage, &mut fu, &mut fv);
        (fu, fv)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
}

/// One application of the Gamma map on `[0, l]` at resolution `u.len()`.
pub fn gamma_step(
    u: &[f64],
    v: &[f64],
    l: f64,
    params: &ModelParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if u.len() != v.len() {
        return Err(Error::invalid("u and v must have the same length"));
    }
    if u.iter().chain(v).any(|x| !(*x >= 0.0)) {
        return Err(Error::Precondition(
            "Gamma map needs nonnegative input".into(),
        ));
    }
    Ok(FixedDomain::new(l, params, u.len())?.gamma(u, v))
}

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    pub l: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `sup |Gamma[(u,v)] - (u,v)|`
    pub residual: f64,
    pub iterations: usize,
    /// Final gap between the upper and lower sequences.
    pub gap: f64,
    pub lambda1: f64,
    /// Both sequences stayed monotone and ordered throughout.
    pub sandwich_held: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SteadyOutcome {
    Positive(SteadyState),
    /// `lambda_1(l) <= 0`: zero is the only nonnegative steady state.
    Trivial {
        l: f64,
        lambda1: f64,
    },
}

impl SteadyOutcome {
    pub fn state(&self) -> Option<&SteadyState> {
        match self {
            SteadyOutcome::Positive(s) => Some(s),
            SteadyOutcome::Trivial { .. } => None,
        }
    }

    pub fn lambda1(&self) -> f64 {
        match self {
            SteadyOutcome::Positive(s) => s.lambda1,
            SteadyOutcome::Trivial { lambda1, .. } => *lambda1,
        }
    }
}

pub fn solve_steady(l: f64, params: &ModelParams) -> Result<SteadyOutcome> {
    solve_steady_on(&FixedDomain::with_default_resolution(l, params)?)
}

/// Two-sided Gamma iteration: down from `(U, V)`, up from a small multiple of
/// the principal eigenfunction.
pub fn solve_steady_on(domain: &FixedDomain) -> Result<SteadyOutcome> {
    let p = domain.params();
    let n = domain.cells();
    let spec = OperatorSpec::for_lambda1(domain.l, p).with_resolution(n);
    let eig = eigen::principal_eigenpair(&spec)?;
    if eig.lambda_p <= 0.0 {
        return Ok(SteadyOutcome::Trivial {
            l: domain.l,
            lambda1: eig.lambda_p,
        });
    }
    let (big_u, big_v) = equilibrium(p, 0.0)?;
    let mut hi = (vec![big_u; n], vec![big_v; n]);

    let phi_min = eig.min_component();
    let mut eps = 1e-3 * phi_min;
    let mut lo = loop {
        let u: Vec<f64> = eig.phi1.iter().map(|x| eps * x).collect();
        let v: Vec<f64> = eig.phi2.iter().map(|x| eps * x).collect();
        let (gu, gv) = domain.gamma(&u, &v);
        if gu
            .iter()
            .zip(&u)
            .chain(gv.iter().zip(&v))
            .all(|(g, x)| g >= x)
        {
            break (u, v);
        }
        eps *= 0.5;
        if eps < 1e-300 {
            return Err(Error::NonConvergence {
                solver: "steady lower start",
                iterations: 0,
                last_change: eps,
                last_iterate: None,
            });
        }
    };

    let slack = 1e-14 * big_u.max(big_v);
    let mut sandwich_held = true;
    let mut gap = f64::INFINITY;
    for it in 1..=MAX_SWEEPS {
        let next_hi = domain.gamma(&hi.0, &hi.1);
        let next_lo = domain.gamma(&lo.0, &lo.1);
        let monotone = next_hi.0.iter().zip(&hi.0).all(|(a, b)| *a <= b + slack)
            && next_hi.1.iter().zip(&hi.1).all(|(a, b)| *a <= b + slack)
            && next_lo.0.iter().zip(&lo.0).all(|(a, b)| *a >= b - slack)
            && next_lo.1.iter().zip(&lo.1).all(|(a, b)| *a >= b - slack);
        hi = next_hi;
        lo = next_lo;
        gap = 0.0;
        let mut ordered = true;
        for i in 0..n {
            let du = hi.0[i] - lo.0[i];
            let dv = hi.1[i] - lo.1[i];
            ordered &= du >= -slack && dv >= -slack;
            gap = gap.max(du.abs()).max(dv.abs());
        }
        sandwich_held &= monotone && ordered;
        if gap < SANDWICH_TOL {
            let (gu, gv) = domain.gamma(&hi.0, &hi.1);
            let residual = sup_diff(&gu, &hi.0).max(sup_diff(&gv, &hi.1));
            return Ok(SteadyOutcome::Positive(SteadyState {
                l: domain.l,
                x: domain.nodes(),
                u: hi.0,
                v: hi.1,
                residual,
                iterations: it,
                gap,
                lambda1: eig.lambda_p,
                sandwich_held,
            }));
        }
    }
    Err(Error::NonConvergence {
        solver: "steady Gamma sandwich",
        iterations: MAX_SWEEPS,
        last_change: gap,
        last_iterate: Some(hi.0.into_iter().chain(hi.1).collect()),
    })
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Iterate Gamma from `(u, v)` until successive iterates differ by less than `tol`.
pub fn gamma_fixed_point(
    domain: &FixedDomain,
    mut u: Vec<f64>,
    mut v: Vec<f64>,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut change = f64::INFINITY;
    for it in 1..=MAX_SWEEPS {
        let (gu, gv) = domain.gamma(&u, &v);
        change = sup_diff(&gu, &u).max(sup_diff(&gv, &v));
        u = gu;
        v = gv;
        if change < tol {
            return Ok((u, v, it));
        }
    }
    Err(Error::NonConvergence {
        solver: "Gamma iteration",
        iterations: MAX_SWEEPS,
        last_change: change,
        last_iterate: Some(u.into_iter().chain(v).collect()),
    })
}

/// Largest deviation between the fixed points reached from each start.
pub fn uniqueness_spread(domain: &FixedDomain, starts: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut limits = Vec::with_capacity(starts.len());
    for (u, v) in starts {
        let (fu, fv, _) = gamma_fixed_point(domain, u.clone(), v.clone(), 1e-12)?;
        limits.push((fu, fv));
    }
    let mut spread: f64 = 0.0;
    for w in limits.windows(2) {
        spread = spread
            .max(sup_diff(&w[0].0, &w[1].0))
            .max(sup_diff(&w[0].1, &w[1].1));
    }
    Ok(spread)
}

/// Residual of the steady-state equations with the integral recomputed by a
/// trapezoid rule on the piecewise-linear interpolant, refined `refine` times
/// per cell.
pub fn trapezoid_residual(state: &SteadyState, params: &ModelParams, refine: usize) -> f64 {
    let n = state.x.len();
    let dx = state.l / n as f64;
    let interp = |w: &[f64], y: f64| -> f64 {
        let s = y / dx - 0.5;
        if s <= 0.0 {
            return w[0];
        }
        let k = s.floor() as usize;
        if k + 1 >= n {
            return w[n - 1];
        }
        let t = s - k as f64;
        w[k] * (1.0 - t) + w[k + 1] * t
    };
    let m = n * refine;
    let h = state.l / m as f64;
    let ys: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    let us: Vec<f64> = ys.iter().map(|&y| interp(&state.u, y)).collect();
    let vs: Vec<f64> = ys.iter().map(|&y| interp(&state.v, y)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = state.x[i];
        let mut iu = 0.0;
        let mut iv = 0.0;
        for k in 0..=m {
            let w = if k == 0 || k == m { 0.5 * h } else { h };
            iu += w * params.kernel1.density(x - ys[k]) * us[k];
            iv += w * params.kernel2.density(x - ys[k]) * vs[k];
        }
        let fu = params.d1 * iu
            - (params.d1 * params.kernel1.boundary_weight(x) + params.a) * state.u[i]
            + params.nonlinearity.h(state.v[i]);
        let fv = params.d2 * iv
            - (params.d2 * params.kernel2.boundary_weight(x) + params.b) * state.v[i]
            + params.nonlinearity.g(state.u[i]);
        worst = worst.max(fu.abs()).max(fv.abs());
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub holds: bool,
    /// Nodes where the upper pair lies below the lower pair.
    pub violations: Vec<usize>,
    /// `min(u1 - u2, v1 - v2)` over all nodes.
    pub min_slack: f64,
}

/// Check that an upper solution dominates a lower solution componentwise.
pub fn comparison_check(
    domain: &FixedDomain,
    upper: (&[f64], &[f64]),
    lower: (&[f64], &[f64]),
    tol: f64,
) -> Result<OrderingReport> {
    let n = domain.cells();
    if [upper.0, upper.1, lower.0, lower.1]
        .iter()
        .any(|w| w.len() != n)
    {
        return Err(Error::invalid("states must match the domain resolution"));
    }
    let (fu, fv) = domain.operator(upper.0, upper.1);
    let (gu, gv) = domain.operator(lower.0, lower.1);
    if fu.iter().chain(&fv).any(|r| *r > tol) || gu.iter().chain(&gv).any(|r| *r < -tol) {
        return Err(Error::Precondition("not a super/sub pair".into()));
    }
    let mut violations = Vec::new();
    let mut min_slack = f64::INFINITY;
    for i in 0..n {
        let s = (upper.0[i] - lower.0[i]).min(upper.1[i] - lower.1[i]);
        min_slack = min_slack.min(s);
        if s < -tol {
            violations.push(i);
        }
    }
    Ok(OrderingReport {
        holds: violations.is_empty(),
        violations,
        min_slack,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub norm_u: Vec<f64>,
    pub norm_v: Vec<f64>,
    pub norm_sum: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, u: &[f64], v: &[f64]) {
        self.t.push(t);
        self.norm_u.push(sup_norm(u));
        self.norm_v.push(sup_norm(v));
        let s = u.iter().zip(v).fold(0.0f64, |m, (a, b)| m.max(a + b));
        self.norm_sum.push(s);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    Exponential,
    Algebraic,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayEstimate {
    pub mode: DecayMode,
    /// Fitted rate; `None` when no decay is expected.
    pub k: Option<f64>,
    pub window: (f64, f64),
    /// `R^2` of the log fit.
    pub goodness: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub horizon: f64,
    /// Time between recorded samples.
    pub sample_interval: f64,
}

impl EvolveOptions {
    pub fn new(horizon: f64) -> EvolveOptions {
        EvolveOptions {
            horizon,
            sample_interval: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub decay: DecayEstimate,
    pub lambda1: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Number of steps and step size for a run of length `horizon`.
pub(crate) fn step_plan(params: &ModelParams, horizon: f64) -> (usize, f64) {
    let steps = (horizon / params.stable_dt()).ceil().max(1.0) as usize;
    (steps, horizon / steps as f64)
}

pub(crate) fn sample_stride(dt: f64, interval: f64) -> usize {
    ((interval / dt).round() as usize).max(1)
}

/// Initial grid data from the profiles in `params`, supported on `[0, min(h0, l)]`.
pub fn initial_grid(domain: &FixedDomain) -> (Vec<f64>, Vec<f64>) {
    let p = domain.params();
    let support = p.h0.min(domain.l);
    let x = domain.nodes();
    (
        x.iter().map(|&y| p.u0.eval(y, support)).collect(),
        x.iter().map(|&y| p.v0.eval(y, support)).collect(),
    )
}

/// Heun integration of the fixed-domain problem from `(u0, v0)`.
pub fn evolve_fixed(
    domain: &FixedDomain,
    mut u: Vec<f64>,
    mut v: Vec<f64>,
    options: EvolveOptions,
) -> Result<Evolution> {
    let n = domain.cells();
    if u.len() != n || v.len() != n {
        return Err(Error::invalid(
            "initial data must match the domain resolution",
        ));
    }
    if u.iter().chain(&v).any(|x| !(*x >= 0.0)) || u.iter().chain(&v).all(|x| *x == 0.0) {
        return Err(Error::Precondition(
            "initial data must be nonnegative and nontrivial".into(),
        ));
    }
    if !(options.horizon > 0.0) || !(options.sample_interval > 0.0) {
        return Err(Error::invalid(
            "horizon and sample interval must be positive",
        ));
    }
    let p = domain.params();
    let lambda1 =
        eigen::principal_eigenpair(&OperatorSpec::for_lambda1(domain.l, p).with_resolution(n))?
            .lambda_p;
    let (mut bound_u, mut bound_v) = equilibrium(p, 0.0).unwrap_or((0.0, 0.0));
    bound_u = bound_u.max(sup_norm(&u));
    bound_v = bound_v.max(sup_norm(&v));
    let blow_up = 10.0 * bound_u.max(bound_v);

    let (steps, dt) = step_plan(p, options.horizon);
    let stride = sample_stride(dt, options.sample_interval);
    let mut traj = Trajectory::default();
    traj.push(0.0, &u, &v);
    for s in 1..=steps {
        domain.field.heun(&mut u, &mut v, &domain.coverage, dt);
        let t = s as f64 * dt;
        let worst = clamp_roundoff(&mut u).min(clamp_roundoff(&mut v));
        if worst < -1e-12 {
            return Err(Error::StepFailure {
                t,
                reason: format!("negative density {worst:e}"),
            });
        }
        if s % stride == 0 || s == steps {
            traj.push(t, &u, &v);
            let top = traj
                .norm_u
                .last()
                .unwrap()
                .max(*traj.norm_v.last().unwrap());
            if !top.is_finite() || top > blow_up {
                return Err(Error::StepFailure {
                    t,
                    reason: format!("sup-norm {top:e} exceeds a priori bound {blow_up:e}"),
                });
            }
        }
    }
    let decay = estimate_decay(&traj, lambda1);
    Ok(Evolution {
        trajectory: traj,
        decay,
        lambda1,
        x: domain.nodes(),
        u,
        v,
    })
}

/// Least-squares slope and `R^2` of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    (slope, r2)
}

/// Fit the decay of `||u + v||_inf` over the second half of the samples.
pub fn estimate_decay(traj: &Trajectory, lambda1: f64) -> DecayEstimate {
    let start = traj.t.len() / 2;
    let window = (traj.t[start], *traj.t.last().unwrap());
    let idx: Vec<usize> = (start..traj.t.len())
        .filter(|&i| traj.norm_sum[i] > 0.0)
        .collect();
    let mode = if lambda1 > CRITICAL_BAND {
        DecayMode::None
    } else if lambda1 < -CRITICAL_BAND {
        DecayMode::Exponential
    } else {
        DecayMode::Algebraic
    };
    if mode == DecayMode::None || idx.len() < 3 {
        return DecayEstimate {
            mode,
            k: None,
            window,
            goodness: None,
        };
    }
    let ys: Vec<f64> = idx.iter().map(|&i| traj.norm_sum[i].ln()).collect();
    let xs: Vec<f64> = match mode {
        DecayMode::Exponential => idx.iter().map(|&i| traj.t[i]).collect(),
        _ => idx.iter().map(|&i| traj.t[i].ln_1p()).collect(),
    };
    let (slope, r2) = linear_fit(&xs, &ys);
    DecayEstimate {
        mode,
        k: Some(-slope),
        window,
        goodness: Some(r2),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraicCheck {
    /// `e^{0.05 t} ||u+v||` at the end over its value at mid-run.
    pub exponential_weighted_growth: f64,
    /// Largest `(1+t)^{0.05} ||u+v||` in the second half over the largest in the first.
    pub power_weighted_ratio: f64,
    pub sup_decreased: bool,
    pub passed: bool,
}

/// Decay slower than `e^{-0.05 t}` but at least as fast as `(1+t)^{-0.05}`.
pub fn algebraic_check(traj: &Trajectory) -> AlgebraicCheck {
    let m = traj.t.len();
    let mid = m / 2;
    let e = |i: usize| (0.05 * traj.t[i]).exp() * traj.norm_sum[i];
    let pw = |i: usize| (1.0 + traj.t[i]).powf(0.05) * traj.norm_sum[i];
    let growth = e(m - 1) / e(mid);
    let first = (0..mid).map(pw).fold(0.0, f64::max);
    let second = (mid..m).map(pw).fold(0.0, f64::max);
    let ratio = second / first;
    let sup_decreased = traj.norm_sum[m - 1] < traj.norm_sum[0];
    AlgebraicCheck {
        exponential_weighted_growth: growth,
        power_weighted_ratio: ratio,
        sup_decreased,
        passed: growth > 2.0 && ratio <= 1.0 && sup_decreased,
    }
}
