//! Semi-wave profiles and the asymptotic spreading speed.
//!
//! A semi-wave is a triple `(c, p, q)` with `p, q` decreasing on `(-inf, 0]`,
//! zero at the front and tending to the (perturbed) equilibrium far behind it,
//! such that
//!
//! ```text
//! d1 int_{-inf}^0 J1(x - y) p(y) dy - d1 p + c p' - (a + s) p + H(q) = 0
//! d2 int_{-inf}^0 J2(x - y) q(y) dy - d2 q + c q' - (b + s) q + G(p) = 0
//! c = int_{-inf}^0 int_0^inf [mu1 J1(x - y) p(x) + mu2 J2(x - y) q(x)] dy dx
//! ```
//!
//! The half-line is cut at `-L`; beyond it the profiles are frozen at the far
//! field. Kernels may be truncated, in which case the far field solves the
//! equilibrium equations with the truncated kernel mass.

use rayon::prelude::*;
use serde::Serialize;

use crate::conv::ToeplitzConv;
use crate::error::{Error, Result};
use crate::freeboundary::DEFAULT_DX;
use crate::kernel::{FirstMoment, Kernel};
use crate::model::{equilibrium_with_rates, ModelParams};
use crate::nonlinearity::Nonlinearity;

pub const DEFAULT_LENGTH: f64 = 60.0;
pub const SPEED_CAP: f64 = 1e3;
const PROFILE_TOL: f64 = 1e-9;
const SPEED_TOL: f64 = 1e-6;
const DAMPING: f64 = 0.5;
/// Relative size below which a profile value switches the nonlocal product
/// to direct summation.
const FFT_FLOOR: f64 = 1e-6;
const MAX_SWEEPS: usize = 1_000_000;
const MAX_SPEED_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct SemiWaveOptions {
    pub sigma: f64,
    pub truncation: Option<u32>,
    pub length: f64,
    pub dx: f64,
    /// Starting speed; defaults to `mu1 U + mu2 V`.
    pub initial_speed: Option<f64>,
}

impl SemiWaveOptions {
    pub fn new(sigma: f64, truncation: Option<u32>, length: f64) -> SemiWaveOptions {
        SemiWaveOptions {
            sigma,
            truncation,
            length,
            dx: DEFAULT_DX,
            initial_speed: None,
        }
    }
}

impl Default for SemiWaveOptions {
    fn default() -> Self {
        SemiWaveOptions::new(0.0, None, DEFAULT_LENGTH)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiWaveProfile {
    pub c: f64,
    /// Nodes from `-L` up to the front `0`, ascending.
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub sigma: f64,
    pub n: Option<u32>,
    pub length: f64,
    pub far_field: (f64, f64),
    /// Sup-norm of the discrete profile equations at the returned speed.
    pub profile_residual: f64,
    /// `|c - flux(p, q)|`.
    pub speed_gap: f64,
    pub speed_iterations: usize,
}

impl SemiWaveProfile {
    /// Whether `p` and `q` are nonincreasing in `x`.
    pub fn monotone(&self) -> bool {
        let ok = |w: &[f64]| w.windows(2).all(|s| s[1] <= s[0] + 1e-12);
        ok(&self.p) && ok(&self.q)
    }

    /// Relative distance of `(p, q)(-L)` from the far field.
    pub fn far_field_mismatch(&self) -> f64 {
        let (u, v) = self.far_field;
        ((self.p[0] - u).abs() / u).max((self.q[0] - v).abs() / v)
    }
}

/// Discretized profile problem on the cells `z_k = -(k + 1/2) dx`, `k < m`.
struct Problem {
    m: usize,
    dx: f64,
    nl: Nonlinearity,
    d: [f64; 2],
    decay: [f64; 2],
    conv: [Option<ToeplitzConv>; 2],
    /// `d * int_{-inf}^{-L} J(z_k - y) dy * far`.
    far_gain: [Vec<f64>; 2],
    /// `mu * dx * int_0^inf J(z_k - y) dy`.
    flux_weight: [Vec<f64>; 2],
    flux_far: f64,
    far: [f64; 2],
}

/// `int_L^inf int_x^inf J`, the flux from a unit density beyond `-L`.
fn far_tail_flux(kernel: &Kernel, length: f64) -> Result<f64> {
    let total = match kernel.first_moment()? {
        FirstMoment::Finite(m) => m,
        FirstMoment::Infinite => return Ok(f64::INFINITY),
    };
    let rest = total - kernel.moment_to(length) - length * kernel.tail(length);
    Ok(rest.max(0.0))
}

impl Problem {
    fn new(params: &ModelParams, opts: &SemiWaveOptions) -> Result<Problem> {
        params.validate()?;
        if !(opts.sigma >= 0.0) || !opts.sigma.is_finite() {
            return Err(Error::invalid("sigma must be >= 0"));
        }
        if !(opts.length > 0.0) || !(opts.dx > 0.0) || opts.dx > opts.length {
            return Err(Error::invalid("semi-wave needs 0 < dx <= L"));
        }
        let kernels = match opts.truncation {
            Some(n) => [params.kernel1.truncated(n)?, params.kernel2.truncated(n)?],
            None => [params.kernel1.clone(), params.kernel2.clone()],
        };
        let d = [params.d1, params.d2];
        let decay = [params.a + opts.sigma, params.b + opts.sigma];
        // A truncated kernel loses mass, which acts as extra decay far behind
        // the front.
        let eff = [
            decay[0] + d[0] * (1.0 - kernels[0].mass()),
            decay[1] + d[1] * (1.0 - kernels[1].mass()),
        ];
        let (u, v) = equilibrium_with_rates(&params.nonlinearity, eff[0], eff[1])?;
        let far = [u, v];
        let m = (opts.length / opts.dx).round().max(1.0) as usize;
        let dx = opts.length / m as f64;
        let length = m as f64 * dx;
        let z = |k: usize| -(k as f64 + 0.5) * dx;
        let mu = [params.mu1, params.mu2];
        let mut conv = [None, None];
        let mut far_gain = [vec![0.0; m], vec![0.0; m]];
        let mut flux_weight = [vec![0.0; m], vec![0.0; m]];
        let mut flux_far = 0.0;
        for s in 0..2 {
            let k = &kernels[s];
            if d[s] > 0.0 {
                conv[s] = Some(ToeplitzConv::for_kernel(k, d[s], m, dx));
                for i in 0..m {
                    far_gain[s][i] = d[s] * far[s] * k.tail(z(i) + length);
                }
            }
            if mu[s] > 0.0 {
                for i in 0..m {
                    flux_weight[s][i] = mu[s] * dx * k.tail(-z(i));
                }
                flux_far += mu[s] * far[s] * far_tail_flux(k, length)?;
            }
        }
        Ok(Problem {
            m,
            dx,
            nl: params.nonlinearity,
            d,
            decay,
            conv,
            far_gain,
            flux_weight,
            flux_far,
            far,
        })
    }

    fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|k| -(k as f64 + 0.5) * self.dx).collect()
    }

    fn flux(&self, p: &[f64], q: &[f64]) -> f64 {
        let near: f64 = (0..self.m)
            .map(|i| self.flux_weight[0][i] * p[i] + self.flux_weight[1][i] * q[i])
            .sum();
        near + self.flux_far
    }

    /// One-sided difference `p'(z_k) ~ a0 p_k + a1 p_{k-1} + a2 p_{k-2}`
    /// using the nodes towards the front, with `p = 0` at the front itself
    /// (half a cell from the first node). Second order except at the first
    /// node.
    fn upwind(&self, k: usize) -> [f64; 3] {
        let dx = self.dx;
        match k {
            0 => [-2.0 / dx, 0.0, 0.0],
            1 => [-5.0 / (3.0 * dx), 3.0 / dx, 0.0],
            _ => [-1.5 / dx, 2.0 / dx, -0.5 / dx],
        }
    }

    /// Nonlocal gain. Profiles with tiny values (a boundary layer at the far
    /// end, which happens while `c` exceeds the minimal wave speed) use direct
    /// summation: all terms are nonnegative, so the small values keep their
    /// relative accuracy, whereas the absolute round-off floor of an FFT
    /// product gets amplified ahead of the layer.
    fn nonlocal(&self, s: usize, w: &[f64], out: &mut [f64]) {
        let floor = FFT_FLOOR * self.far[s];
        match &self.conv[s] {
            Some(c) if w.iter().all(|&x| x >= floor) => c.apply(w, out),
            Some(c) => c.apply_direct(w, out),
            None => out.fill(0.0),
        }
        for (o, g) in out.iter_mut().zip(&self.far_gain[s]) {
            *o += g;
        }
    }

    fn diagonal(&self, s: usize) -> f64 {
        self.conv[s].as_ref().map_or(0.0, |c| c.weights()[0])
    }

    /// Relax the profile equations at fixed `c` until the sup update drops
    /// below the tolerance. Each sweep lags the nonlocal term and solves the
    /// upwind advection exactly, marching away from the front.
    fn relax(&self, c: f64, p: &mut [f64], q: &mut [f64]) -> Result<usize> {
        let m = self.m;
        let mut kp = vec![0.0; m];
        let mut kq = vec![0.0; m];
        let diag = [self.diagonal(0), self.diagonal(1)];
        for sweep in 1..=MAX_SWEEPS {
            self.nonlocal(0, p, &mut kp);
            self.nonlocal(1, q, &mut kq);
            let mut change: f64 = 0.0;
            for k in 0..m {
                let [a0, a1, a2] = self.upwind(k);
                let (p1, q1) = if k >= 1 {
                    (p[k - 1], q[k - 1])
                } else {
                    (0.0, 0.0)
                };
                let (p2, q2) = if k >= 2 {
                    (p[k - 2], q[k - 2])
                } else {
                    (0.0, 0.0)
                };
                let hq = self.nl.h(q[k]);
                // The zero state is unstable, so round-off below zero would grow.
                let np = ((kp[k] - diag[0] * p[k] + c * (a1 * p1 + a2 * p2) + hq)
                    / (self.d[0] - diag[0] - c * a0 + self.decay[0]))
                    .max(0.0);
                let gp = self.nl.g(np);
                let nq = ((kq[k] - diag[1] * q[k] + c * (a1 * q1 + a2 * q2) + gp)
                    / (self.d[1] - diag[1] - c * a0 + self.decay[1]))
                    .max(0.0);
                change = change.max((np - p[k]).abs()).max((nq - q[k]).abs());
                p[k] = np;
                q[k] = nq;
            }
            if change < PROFILE_TOL {
                return Ok(sweep);
            }
        }
        Err(Error::NonConvergence {
            solver: "semi-wave profile relaxation",
            iterations: MAX_SWEEPS,
            last_change: f64::NAN,
            last_iterate: None,
        })
    }

    /// Sup-norm of the discrete equations.
    fn residual(&self, c: f64, p: &[f64], q: &[f64]) -> f64 {
        let m = self.m;
        let mut kp = vec![0.0; m];
        let mut kq = vec![0.0; m];
        self.nonlocal(0, p, &mut kp);
        self.nonlocal(1, q, &mut kq);
        let mut worst: f64 = 0.0;
        for k in 0..m {
            let [a0, a1, a2] = self.upwind(k);
            let at = |w: &[f64], j: usize| if k >= j { w[k - j] } else { 0.0 };
            let dp = a0 * p[k] + a1 * at(p, 1) + a2 * at(p, 2);
            let dq = a0 * q[k] + a1 * at(q, 1) + a2 * at(q, 2);
            let ep = kp[k] - self.d[0] * p[k] + c * dp - self.decay[0] * p[k] + self.nl.h(q[k]);
            let eq = kq[k] - self.d[1] * q[k] + c * dq - self.decay[1] * q[k] + self.nl.g(p[k]);
            worst = worst.max(ep.abs()).max(eq.abs());
        }
        worst
    }
}

/// Solve the semi-wave problem with perturbation `sigma`, optional kernel
/// truncation `n` and cut-off length `L`.
pub fn solve_semiwave(
    params: &ModelParams,
    sigma: f64,
    n: Option<u32>,
    length: f64,
) -> Result<SemiWaveProfile> {
    solve_semiwave_with(params, &SemiWaveOptions::new(sigma, n, length))
}

pub fn solve_semiwave_with(
    params: &ModelParams,
    opts: &SemiWaveOptions,
) -> Result<SemiWaveProfile> {
    let prob = Problem::new(params, opts)?;
    if !prob.flux_far.is_finite() {
        return Err(Error::SpeedEscape {
            speed: f64::INFINITY,
        });
    }
    let m = prob.m;
    let [u, v] = prob.far;
    let mut p = vec![u; m];
    let mut q = vec![v; m];
    let mut c = opts
        .initial_speed
        .unwrap_or(params.mu1 * u + params.mu2 * v);
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::invalid("initial speed must be finite and >= 0"));
    }
    for it in 1..=MAX_SPEED_ITERATIONS {
        prob.relax(c, &mut p, &mut q)?;
        let c_new = prob.flux(&p, &q);
        if !c_new.is_finite() {
            return Err(Error::SpeedEscape { speed: c_new });
        }
        if (c_new - c).abs() < SPEED_TOL {
            let mut x = prob.nodes();
            x.reverse();
            x.push(0.0);
            let mut pp: Vec<f64> = p.iter().rev().cloned().collect();
            let mut qq: Vec<f64> = q.iter().rev().cloned().collect();
            pp.push(0.0);
            qq.push(0.0);
            return Ok(SemiWaveProfile {
                c,
                x,
                p: pp,
                q: qq,
                sigma: opts.sigma,
                n: opts.truncation,
                length: m as f64 * prob.dx,
                far_field: (u, v),
                profile_residual: prob.residual(c, &p, &q),
                speed_gap: (c_new - c).abs(),
                speed_iterations: it,
            });
        }
        if c_new > SPEED_CAP {
            return Err(Error::SpeedEscape { speed: c_new });
        }
        c += DAMPING * (c_new - c);
    }
    Err(Error::NonConvergence {
        solver: "semi-wave speed iteration",
        iterations: MAX_SPEED_ITERATIONS,
        last_change: f64::NAN,
        last_iterate: None,
    })
}

/// Residual of the continuous profile equations at the interior nodes, with
/// the integrals evaluated by the trapezoid rule on the piecewise-linear
/// interpolant refined `refine` times and `p'` by central differences.
pub fn trapezoid_residual(profile: &SemiWaveProfile, params: &ModelParams, refine: usize) -> f64 {
    let refine = refine.max(1);
    let (k1, k2) = match profile.n {
        Some(n) => (
            params.kernel1.truncated(n).expect("valid truncation"),
            params.kernel2.truncated(n).expect("valid truncation"),
        ),
        None => (params.kernel1.clone(), params.kernel2.clone()),
    };
    let x = &profile.x;
    let l = profile.length;
    let (u, v) = profile.far_field;
    // Fine grid including the node positions.
    let mut fx = Vec::new();
    let mut fp = Vec::new();
    let mut fq = Vec::new();
    let push = |fx: &mut Vec<f64>, fp: &mut Vec<f64>, fq: &mut Vec<f64>, t: f64, a: f64, b: f64| {
        fx.push(t);
        fp.push(a);
        fq.push(b);
    };
    push(&mut fx, &mut fp, &mut fq, -l, u, v);
    let mut pts: Vec<(f64, f64, f64)> = vec![(-l, u, v)];
    for i in 0..x.len() {
        pts.push((x[i], profile.p[i], profile.q[i]));
    }
    for w in pts.windows(2) {
        let (x0, p0, q0) = w[0];
        let (x1, p1, q1) = w[1];
        for r in 1..=refine {
            let t = r as f64 / refine as f64;
            push(
                &mut fx,
                &mut fp,
                &mut fq,
                x0 + t * (x1 - x0),
                p0 + t * (p1 - p0),
                q0 + t * (q1 - q0),
            );
        }
    }
    let integral = |k: &Kernel, xi: f64, f: &[f64], far: f64| -> f64 {
        let mut s = 0.0;
        for j in 0..fx.len() - 1 {
            let h = fx[j + 1] - fx[j];
            s += 0.5 * h * (k.density(xi - fx[j]) * f[j] + k.density(xi - fx[j + 1]) * f[j + 1]);
        }
        s + far * k.tail(xi + l)
    };
    let nl = &params.nonlinearity;
    let c = profile.c;
    let mut worst: f64 = 0.0;
    // Interior nodes only; skip the clamped front and the far end.
    for i in 1..x.len() - 2 {
        let xi = x[i];
        let dp = (profile.p[i + 1] - profile.p[i - 1]) / (x[i + 1] - x[i - 1]);
        let dq = (profile.q[i + 1] - profile.q[i - 1]) / (x[i + 1] - x[i - 1]);
        let ep = params.d1 * integral(&k1, xi, &fp, u) - params.d1 * profile.p[i] + c * dp
            - (params.a + profile.sigma) * profile.p[i]
            + nl.h(profile.q[i]);
        let eq = params.d2 * integral(&k2, xi, &fq, v) - params.d2 * profile.q[i] + c * dq
            - (params.b + profile.sigma) * profile.q[i]
            + nl.g(profile.p[i]);
        worst = worst.max(ep.abs()).max(eq.abs());
    }
    worst
}

/// Largest spread of the converged speed over several starting speeds.
pub fn uniqueness_spread(
    params: &ModelParams,
    opts: &SemiWaveOptions,
    starts: &[f64],
) -> Result<f64> {
    let speeds = starts
        .par_iter()
        .map(|&c0| {
            let mut o = opts.clone();
            o.initial_speed = Some(c0);
            solve_semiwave_with(params, &o).map(|s| s.c)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = speeds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(hi - lo)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedRow {
    pub sigma: f64,
    pub n: Option<u32>,
    /// `None` when the speed iteration escaped past the cap.
    pub c: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeedTable {
    pub rows: Vec<SpeedRow>,
    /// Some row has an infinite-moment kernel.
    pub heavy_tailed: bool,
    /// Per sigma: speeds nondecreasing in n.
    pub increasing_in_n: bool,
    /// Per n: speeds nonincreasing in sigma.
    pub decreasing_in_sigma: bool,
    /// Relative change between the two largest n, per sigma (max over sigma).
    pub last_relative_change: Option<f64>,
    /// Heavy tails and the speed kept growing (largest/smallest n above 3) or
    /// escaped.
    pub accelerating: bool,
}

/// Table of truncated, perturbed speeds over `sigmas x ns`. `None` in `ns`
/// means no truncation.
pub fn speed_limits(
    params: &ModelParams,
    sigmas: &[f64],
    ns: &[Option<u32>],
    length: f64,
) -> Result<SpeedTable> {
    if sigmas.is_empty() || ns.is_empty() {
        return Err(Error::invalid("speed schedules must be nonempty"));
    }
    let pairs: Vec<(f64, Option<u32>)> = sigmas
        .iter()
        .flat_map(|&s| ns.iter().map(move |&n| (s, n)))
        .collect();
    let rows: Vec<SpeedRow> = pairs
        .par_iter()
        .map(
            |&(sigma, n)| match solve_semiwave(params, sigma, n, length) {
                Ok(s) => SpeedRow {
                    sigma,
                    n,
                    c: Some(s.c),
                    error: None,
                },
                Err(Error::SpeedEscape { .. }) => SpeedRow {
                    sigma,
                    n,
                    c: Some(f64::INFINITY),
                    error: Some("speed escape".into()),
                },
                Err(e) => SpeedRow {
                    sigma,
                    n,
                    c: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect();
    let heavy_tailed =
        !params.kernel1.first_moment()?.is_finite() || !params.kernel2.first_moment()?.is_finite();
    // Order key: untruncated counts as n = infinity.
    let key = |n: Option<u32>| n.map_or(u64::MAX, u64::from);
    let speed = |sigma: f64, n: Option<u32>| {
        rows.iter()
            .find(|r| r.sigma == sigma && r.n == n)
            .and_then(|r| r.c)
    };
    let mut sorted_ns: Vec<Option<u32>> = ns.to_vec();
    sorted_ns.sort_by_key(|n| key(*n));
    sorted_ns.dedup();
    let mut sorted_sigmas = sigmas.to_vec();
    sorted_sigmas.sort_by(f64::total_cmp);
    sorted_sigmas.dedup();
    let tol = 1e-6;
    let mut increasing_in_n = true;
    let mut last_relative_change: Option<f64> = None;
    let mut accelerating = false;
    for &s in &sorted_sigmas {
        let cs: Vec<f64> = sorted_ns.iter().filter_map(|&n| speed(s, n)).collect();
        if cs.windows(2).any(|w| w[1] < w[0] - tol) {
            increasing_in_n = false;
        }
        if cs.len() >= 2 {
            let a = cs[cs.len() - 2];
            let b = cs[cs.len() - 1];
            let rel = (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
            last_relative_change = Some(last_relative_change.map_or(rel, |r: f64| r.max(rel)));
            if heavy_tailed && (b.is_infinite() || b > 3.0 * cs[0]) {
                accelerating = true;
            }
        }
    }
    let mut decreasing_in_sigma = true;
    for &n in &sorted_ns {
        let cs: Vec<f64> = sorted_sigmas.iter().filter_map(|&s| speed(s, n)).collect();
        if cs.windows(2).any(|w| w[1] > w[0] + tol) {
            decreasing_in_sigma = false;
        }
    }
    Ok(SpeedTable {
        rows,
        heavy_tailed,
        increasing_in_n,
        decreasing_in_sigma,
        last_relative_change,
        accelerating,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PredictedSpeed {
    Finite { c: f64 },
    Accelerated,
}

/// Asymptotic front speed: the untruncated, unperturbed semi-wave speed when
/// both kernels have a finite first moment, otherwise acceleration.
pub fn predicted_speed(params: &ModelParams) -> Result<PredictedSpeed> {
    predicted_speed_with(params, DEFAULT_LENGTH, DEFAULT_DX)
}

pub fn predicted_speed_with(params: &ModelParams, length: f64, dx: f64) -> Result<PredictedSpeed> {
    if !(params.r0() > 1.0) {
        return Err(Error::Precondition(format!(
            "no spreading speed: R0 = {:.6} <= 1",
            params.r0()
        )));
    }
    if !params.kernel1.first_moment()?.is_finite() || !params.kernel2.first_moment()?.is_finite() {
        return Ok(PredictedSpeed::Accelerated);
    }
    let mut opts = SemiWaveOptions::new(0.0, None, length);
    opts.dx = dx;
    Ok(PredictedSpeed::Finite {
        c: solve_semiwave_with(params, &opts)?.c,
    })
}

#[cfg(test)]
mod tests;
