//! Dispatch of a scenario to the solvers and serialization of the results.

use std::path::{Path, PathBuf};

use nlfront_core::criteria::{
    find_d2_under, find_d_thresholds, find_ell_star, find_mu_star, DThresholdReport, Link,
    MuSearch, ThresholdResult,
};
use nlfront_core::eigen::{
    cell_centers, default_resolution, sweep as eigen_sweep, Monotonicity, SweepVariable,
};
use nlfront_core::freeboundary::{
    self, mass_bound, symmetrization_mismatch, ClassifyPolicy, SimulationOptions, SimulationTrace,
};
use nlfront_core::model::equilibrium;
use nlfront_core::semiwave::{self, speed_limits, SemiWaveOptions};
use nlfront_core::steady::{
    algebraic_check, evolve_fixed, initial_grid, solve_steady_on, uniqueness_spread, DecayMode,
    EvolveOptions, FixedDomain,
};
use nlfront_core::{
    classify, decision_tree, derived_constants, principal_eigenpair, simulate, ModelParams,
    OperatorSpec, SteadyOutcome, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::artifacts::{num, opt_num, Sink};
use crate::config::{Command, ReportKind, ScenarioConfig, SweepOver, Target};
use crate::error::{CliError, Exit};

#[derive(Debug)]
pub struct RunOutcome {
    pub exit: Exit,
    pub summary: Value,
    pub artifacts: Vec<PathBuf>,
}

/// Run options given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn default_directory(config: &ScenarioConfig) -> PathBuf {
    let leaf = config.preset.as_deref().unwrap_or(config.command.name());
    Path::new("out").join(leaf)
}

pub fn run(config: &ScenarioConfig, overrides: &Overrides) -> Result<RunOutcome, CliError> {
    let params = config.model()?;
    let dir = overrides
        .out
        .clone()
        .or_else(|| config.output.directory.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| default_directory(config));
    let seed = overrides.seed.or(config.seed).unwrap_or(0);
    let mut sink = Sink::new(&dir, &config.output)?;
    let ctx = Ctx {
        config,
        params: &params,
        seed,
    };
    let (exit, summary) = match config.command {
        Command::Eigen => ctx.eigen(&mut sink)?,
        Command::Steady => ctx.steady(&mut sink)?,
        Command::Evolve => ctx.evolve(&mut sink)?,
        Command::Simulate => ctx.simulate(&mut sink)?,
        Command::Classify => ctx.classify(&mut sink)?,
        Command::Semiwave => ctx.semiwave(&mut sink)?,
        Command::Threshold => ctx.threshold(&mut sink)?,
        Command::Sweep => ctx.sweep(&mut sink)?,
        Command::Report => ctx.report(&mut sink)?,
    };
    Ok(RunOutcome {
        exit,
        summary,
        artifacts: sink.into_written(),
    })
}

struct Ctx<'a> {
    config: &'a ScenarioConfig,
    params: &'a ModelParams,
    seed: u64,
}

type Step = Result<(Exit, Value), CliError>;

fn constants(params: &ModelParams, sigma: f64) -> Value {
    let dc = derived_constants(params);
    let (u, v) = dc
        .equilibrium
        .map_or((None, None), |(u, v)| (Some(u), Some(v)));
    let (us, vs) = equilibrium(params, sigma).map_or((None, None), |(u, v)| (Some(u), Some(v)));
    json!({
        "R0": dc.r0,
        "Rstar": dc.r_star,
        "gammaA": dc.gamma_a,
        "gammaB": dc.gamma_b,
        "thetaA": dc.theta_a,
        "thetaB": dc.theta_b,
        "Lambda": dc.lambda_cap,
        "U": u,
        "V": v,
        "sigma": sigma,
        "Usigma": us,
        "Vsigma": vs,
    })
}

fn trace_rows(trace: &SimulationTrace) -> impl Iterator<Item = Vec<String>> + '_ {
    (0..trace.t.len()).map(|i| {
        vec![
            num(trace.t[i]),
            num(trace.h[i]),
            num(trace.sup_u[i]),
            num(trace.sup_v[i]),
            num(trace.mass[i]),
        ]
    })
}

const TRACE_HEADER: [&str; 5] = ["t", "h", "sup_u", "sup_v", "mass"];

impl Ctx<'_> {
    fn numeric_l(&self) -> f64 {
        self.config.numeric.l.unwrap_or(self.params.h0)
    }

    fn sample_interval(&self, fallback: f64) -> f64 {
        self.config.output.sample_interval.unwrap_or(fallback)
    }

    fn classify_policy(&self) -> ClassifyPolicy {
        let n = &self.config.numeric;
        let d = ClassifyPolicy::default();
        ClassifyPolicy {
            t_max: n.t_max.unwrap_or(d.t_max),
            stall_tol: n.stall_tol.unwrap_or(d.stall_tol),
            mass_tol: n.mass_tol.unwrap_or(d.mass_tol),
            cells: n.cells,
            ..d
        }
    }

    fn eigen(&self, sink: &mut Sink) -> Step {
        let l = self.numeric_l();
        let n = self
            .config
            .numeric
            .cells
            .unwrap_or_else(|| default_resolution(l));
        let first =
            principal_eigenpair(&OperatorSpec::for_lambda1(l, self.params).with_resolution(n))?;
        let second =
            principal_eigenpair(&OperatorSpec::for_lambda2(l, self.params).with_resolution(n))?;
        let x = cell_centers(l, n);
        sink.csv(
            "eigenfunction.csv",
            &["x", "phi1", "phi2"],
            (0..n).map(|i| vec![num(x[i]), num(first.phi1[i]), num(first.phi2[i])]),
        )?;
        let summary = json!({
            "l": l,
            "cells": n,
            "lambda1": first.lambda_p,
            "lambda2": second.lambda_p,
            "same_sign": first.lambda_p.signum() == second.lambda_p.signum(),
            "residual": first.residual,
            "iterations": first.iterations,
            "constants": constants(self.params, self.config.numeric.sigma.unwrap_or(0.0)),
        });
        sink.json("eigen.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn steady(&self, sink: &mut Sink) -> Step {
        let l = self.numeric_l();
        let n = self
            .config
            .numeric
            .cells
            .unwrap_or_else(|| default_resolution(l));
        let domain = FixedDomain::new(l, self.params, n)?;
        let outcome = solve_steady_on(&domain)?;
        let x = domain.nodes();
        let zeros = vec![0.0; n];
        let (u, v) = match &outcome {
            SteadyOutcome::Positive(s) => (&s.u, &s.v),
            SteadyOutcome::Trivial { .. } => (&zeros, &zeros),
        };
        sink.csv(
            "steady.csv",
            &["x", "u", "v"],
            (0..n).map(|i| vec![num(x[i]), num(u[i]), num(v[i])]),
        )?;
        let mut summary = json!({
            "l": l,
            "cells": n,
            "kind": if outcome.state().is_some() { "positive" } else { "trivial" },
            "lambda1": outcome.lambda1(),
        });
        if let Some(s) = outcome.state() {
            summary["residual"] = json!(s.residual);
            summary["gap"] = json!(s.gap);
            summary["iterations"] = json!(s.iterations);
            summary["sandwich_held"] = json!(s.sandwich_held);
            summary["interior"] = json!([s.u[n / 2], s.v[n / 2]]);
            if let Some(k) = self.config.study.starts {
                let (big_u, big_v) = equilibrium(self.params, 0.0)?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let starts: Vec<(Vec<f64>, Vec<f64>)> = (0..k)
                    .map(|_| {
                        let u = (0..n)
                            .map(|_| rng.random_range(1e-3..2.0 * big_u))
                            .collect();
                        let v = (0..n)
                            .map(|_| rng.random_range(1e-3..2.0 * big_v))
                            .collect();
                        (u, v)
                    })
                    .collect();
                summary["uniqueness_spread"] = json!(uniqueness_spread(&domain, &starts)?);
                summary["seed"] = json!(self.seed);
            }
        }
        sink.json("steady.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn evolve_on(
        &self,
        domain: &FixedDomain,
        name: &str,
        sink: &mut Sink,
    ) -> Result<Value, CliError> {
        let horizon = self.config.numeric.horizon.unwrap_or(100.0);
        let options = EvolveOptions {
            horizon,
            sample_interval: self.sample_interval(0.1),
        };
        let (u0, v0) = initial_grid(domain);
        let ev = evolve_fixed(domain, u0, v0, options)?;
        let tr = &ev.trajectory;
        sink.csv(
            name,
            &["t", "norm_u", "norm_v", "norm_sum"],
            (0..tr.t.len()).map(|i| {
                vec![
                    num(tr.t[i]),
                    num(tr.norm_u[i]),
                    num(tr.norm_v[i]),
                    num(tr.norm_sum[i]),
                ]
            }),
        )?;
        let ratio = match ev.decay.mode {
            DecayMode::Exponential => ev.decay.k.map(|k| k / -ev.lambda1),
            _ => None,
        };
        Ok(json!({
            "l": domain.length(),
            "cells": domain.cells(),
            "horizon": horizon,
            "lambda1": ev.lambda1,
            "decay": ev.decay,
            "rate_over_minus_lambda1": ratio,
            "algebraic_check": algebraic_check(tr),
        }))
    }

    fn evolve(&self, sink: &mut Sink) -> Step {
        let l = self.numeric_l();
        let n = self
            .config
            .numeric
            .cells
            .unwrap_or_else(|| default_resolution(l));
        let domain = FixedDomain::new(l, self.params, n)?;
        let mut summary = json!({ "run": self.evolve_on(&domain, "evolve.csv", sink)? });
        if self.config.study.critical == Some(true) {
            let ell = find_ell_star(self.params)?;
            let n = ell
                .resolution
                .unwrap_or_else(|| default_resolution(ell.value));
            let critical = FixedDomain::new(ell.value, self.params, n)?;
            let mut run = self.evolve_on(&critical, "evolve_critical.csv", sink)?;
            run["ell_star"] = json!(ell);
            summary["critical"] = run;
        }
        sink.json("evolve.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn run_simulation(&self, horizon: f64) -> Result<(SimulationTrace, Value), CliError> {
        let mut snaps = self
            .config
            .output
            .snapshot_times
            .clone()
            .unwrap_or_default();
        snaps.push(horizon);
        let options = SimulationOptions {
            horizon,
            sample_interval: self.sample_interval(0.1),
            snapshot_times: snaps,
            cells: self.config.numeric.cells,
            max_dt: self.config.numeric.dt,
        };
        let trace = simulate(self.params, &options)?;
        let p = self.params;
        let last = trace.snapshots.last().expect("final snapshot");
        let mut summary = json!({
            "horizon": horizon,
            "final_h": trace.final_h(),
            "h_over_t": trace.final_h() / horizon,
            "u_at_origin": last.u.first(),
            "v_at_origin": last.v.first(),
            "final_mass": trace.mass.last(),
            "h_monotone": trace.h.windows(2).all(|w| w[1] >= w[0]),
        });
        if let Ok((u, v)) = equilibrium(p, 0.0) {
            summary["equilibrium"] = json!([u, v]);
            if let Some(u0) = last.u.first() {
                summary["origin_relative_error"] = json!((u0 - u).abs() / u);
            }
        }
        if p.r0() <= 1.0 {
            let bound = mass_bound(p, trace.mass[0]);
            let pathwise = (0..trace.t.len())
                .map(|i| trace.h[i] - p.h0 + mass_bound(p, trace.mass[i]))
                .fold(f64::NEG_INFINITY, f64::max);
            summary["mass_bound"] = json!({
                "bound": bound,
                "max_pathwise": pathwise,
                "holds": pathwise <= bound * (1.0 + 1e-12),
            });
        }
        Ok((trace, summary))
    }

    fn write_snapshots(trace: &SimulationTrace, sink: &mut Sink) -> Result<(), CliError> {
        let rows = trace.snapshots.iter().flat_map(|s| {
            (0..s.x.len()).map(move |i| vec![num(s.t), num(s.x[i]), num(s.u[i]), num(s.v[i])])
        });
        sink.csv("snapshots.csv", &["t", "x", "u", "v"], rows)
    }

    fn simulate(&self, sink: &mut Sink) -> Step {
        let horizon = self.config.numeric.horizon.unwrap_or(50.0);
        let (trace, summary) = self.run_simulation(horizon)?;
        sink.csv("trace.csv", &TRACE_HEADER, trace_rows(&trace))?;
        Self::write_snapshots(&trace, sink)?;
        sink.json("simulate.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn classify(&self, sink: &mut Sink) -> Step {
        let out = classify(self.params, &self.classify_policy())?;
        sink.csv("trace.csv", &TRACE_HEADER, trace_rows(&out.trace))?;
        let summary = json!({
            "verdict": out.verdict,
            "lambda1": out.lambda1,
            "h": out.h,
            "stall": out.stall,
            "mass": out.mass,
            "horizon": out.horizon,
        });
        sink.json("outcome.json", &summary)?;
        let exit = if out.verdict == Verdict::Undecided {
            Exit::Undecided
        } else {
            Exit::Success
        };
        Ok((exit, summary))
    }

    fn semiwave(&self, sink: &mut Sink) -> Step {
        let n = &self.config.numeric;
        let study = &self.config.study;
        let opts = SemiWaveOptions {
            sigma: n.sigma.unwrap_or(0.0),
            truncation: n.truncation,
            length: n.length.unwrap_or(semiwave::DEFAULT_LENGTH),
            dx: n.dx.unwrap_or(freeboundary::DEFAULT_DX),
            initial_speed: None,
        };
        let profile = semiwave::solve_semiwave_with(self.params, &opts)?;
        sink.csv(
            "profile.csv",
            &["x", "p", "q"],
            (0..profile.x.len())
                .map(|i| vec![num(profile.x[i]), num(profile.p[i]), num(profile.q[i])]),
        )?;
        let mut summary = json!({
            "c": profile.c,
            "sigma": profile.sigma,
            "n": profile.n,
            "length": profile.length,
            "dx": opts.dx,
            "far_field": profile.far_field,
            "far_field_mismatch": profile.far_field_mismatch(),
            "monotone": profile.monotone(),
            "profile_residual": profile.profile_residual,
            "speed_gap": profile.speed_gap,
            "speed_iterations": profile.speed_iterations,
        });
        if let Some(ns) = &study.truncations {
            let sigmas = study.sigmas.clone().unwrap_or_else(|| vec![opts.sigma]);
            let table = speed_limits(self.params, &sigmas, ns, opts.length)?;
            sink.csv(
                "convergence.csv",
                &["sigma", "n", "c"],
                table.rows.iter().map(|r| {
                    vec![
                        num(r.sigma),
                        r.n.map_or_else(|| "none".to_string(), |k| k.to_string()),
                        opt_num(r.c),
                    ]
                }),
            )?;
            summary["convergence"] = json!(table);
        }
        if let Some(horizon) = study.compare_horizon {
            let options = SimulationOptions {
                sample_interval: self.sample_interval(1.0),
                cells: n.cells,
                max_dt: n.dt,
                ..SimulationOptions::new(horizon)
            };
            let trace = simulate(self.params, &options)?;
            sink.csv(
                "front.csv",
                &["t", "h", "h_over_t"],
                (1..trace.t.len()).map(|i| {
                    vec![
                        num(trace.t[i]),
                        num(trace.h[i]),
                        num(trace.h[i] / trace.t[i]),
                    ]
                }),
            )?;
            let (from, to) = study.window.unwrap_or((0.75 * horizon, horizon));
            let window: Vec<f64> = (1..trace.t.len())
                .filter(|&i| trace.t[i] >= from - 1e-9 && trace.t[i] <= to + 1e-9)
                .map(|i| trace.h[i] / trace.t[i])
                .collect();
            if window.is_empty() {
                return Err(CliError::config("comparison window contains no samples"));
            }
            let mean = window.iter().sum::<f64>() / window.len() as f64;
            let at = |t: f64| {
                let i = (0..trace.t.len())
                    .min_by(|&a, &b| (trace.t[a] - t).abs().total_cmp(&(trace.t[b] - t).abs()))
                    .unwrap();
                trace.h[i] / trace.t[i]
            };
            summary["comparison"] = json!({
                "horizon": horizon,
                "window": [from, to],
                "mean_h_over_t": mean,
                "relative_error": (mean - profile.c).abs() / profile.c,
                "h_over_t_half": at(0.5 * horizon),
                "h_over_t_end": at(horizon),
                "growth_ratio": at(horizon) / at(0.5 * horizon),
            });
        }
        sink.json("semiwave.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn threshold(&self, sink: &mut Sink) -> Step {
        let study = &self.config.study;
        let targets = study
            .targets
            .clone()
            .ok_or_else(|| CliError::config("threshold needs study.targets"))?;
        let mut results: Vec<ThresholdResult> = Vec::new();
        let mut d_report: Option<DThresholdReport> = None;
        for target in targets {
            match target {
                Target::EllStar => results.push(find_ell_star(self.params)?),
                Target::MuStar => {
                    let search = MuSearch {
                        policy: self.classify_policy(),
                        ..MuSearch::default()
                    };
                    let link = study.link.unwrap_or(Link::identity());
                    results.push(find_mu_star(self.params, link, &search)?);
                }
                Target::D2Under => results.push(find_d2_under(self.params)?),
                Target::DThresholds => {
                    let mode = study
                        .d_mode
                        .ok_or_else(|| CliError::config("d_thresholds needs study.d_mode"))?;
                    let report = find_d_thresholds(self.params, mode)?;
                    if let DThresholdReport::Threshold { threshold, .. } = &report {
                        results.push(threshold.clone());
                    }
                    d_report = Some(report);
                }
            }
        }
        sink.csv(
            "thresholds.csv",
            &[
                "name",
                "value",
                "lower",
                "upper",
                "width",
                "within_tolerance",
                "certificate_flips",
                "iterations",
            ],
            results.iter().map(|r| {
                vec![
                    serde_json::to_value(r.name)
                        .unwrap()
                        .as_str()
                        .unwrap()
                        .to_string(),
                    num(r.value),
                    num(r.bracket.0),
                    num(r.bracket.1),
                    num(r.bracket_width()),
                    r.width_within_tolerance().to_string(),
                    r.certificate_flips().to_string(),
                    r.iterations.to_string(),
                ]
            }),
        )?;
        let summary = json!({
            "thresholds": results,
            "d_thresholds": d_report,
            "constants": constants(self.params, 0.0),
        });
        sink.json("thresholds.json", &summary)?;
        Ok((Exit::Success, summary))
    }

    fn sweep(&self, sink: &mut Sink) -> Step {
        let spec = self
            .config
            .study
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::config("sweep needs study.sweep"))?;
        let grid = spec.grid()?;
        let l = self.numeric_l();
        let p = self.params;
        let with = |value: f64| match spec.variable {
            SweepOver::L => (value, p.clone()),
            SweepOver::D1 => (
                l,
                ModelParams {
                    d1: value,
                    ..p.clone()
                },
            ),
            SweepOver::D2 => (
                l,
                ModelParams {
                    d2: value,
                    ..p.clone()
                },
            ),
        };
        let (variable, expected) = match spec.variable {
            SweepOver::L => (SweepVariable::L, Monotonicity::Increasing),
            SweepOver::D1 => (SweepVariable::D1, Monotonicity::Decreasing),
            SweepOver::D2 => (SweepVariable::D2, Monotonicity::Decreasing),
        };
        let first = eigen_sweep(
            |v| {
                let (l, q) = with(v);
                OperatorSpec::for_lambda1(l, &q)
            },
            variable,
            &grid,
            Some(expected),
        )?;
        let second = eigen_sweep(
            |v| {
                let (l, q) = with(v);
                OperatorSpec::for_lambda2(l, &q)
            },
            variable,
            &grid,
            None,
        )?;
        let rows: Vec<Vec<String>> = first
            .rows
            .iter()
            .zip(&second.rows)
            .map(|(a, b)| {
                vec![
                    variable.name().to_string(),
                    num(a.value),
                    opt_num(a.lambda_p),
                    opt_num(b.lambda_p),
                ]
            })
            .collect();
        sink.csv(
            "sweep.csv",
            &["variable", "value", "lambda1", "lambda2"],
            rows,
        )?;
        let failures: Vec<&String> = first
            .rows
            .iter()
            .chain(&second.rows)
            .filter_map(|r| r.error.as_ref())
            .collect();
        let same_sign = first
            .rows
            .iter()
            .zip(&second.rows)
            .all(|(a, b)| matches!((a.lambda_p, b.lambda_p), (Some(x), Some(y)) if x.signum() == y.signum()));
        let dc = derived_constants(p);
        let summary = json!({
            "variable": variable,
            "points": grid.len(),
            "monotone": first.violations.is_empty(),
            "violations": first.violations,
            "same_sign": same_sign,
            "failures": failures,
            "lambda1_first": first.rows.first().and_then(|r| r.lambda_p),
            "lambda1_last": first.rows.last().and_then(|r| r.lambda_p),
            "gammaA": dc.gamma_a,
            "gammaB": dc.gamma_b,
        });
        sink.json("sweep.json", &summary)?;
        if !failures.is_empty() {
            return Err(CliError::Model(nlfront_core::Error::Undetermined(format!(
                "{} sweep points failed; see sweep.json",
                failures.len()
            ))));
        }
        Ok((Exit::Success, summary))
    }

    fn report(&self, sink: &mut Sink) -> Step {
        match self.config.study.report.unwrap_or(ReportKind::Regime) {
            ReportKind::Regime => {
                let report = decision_tree(self.params)?;
                let mut summary = serde_json::to_value(&report).expect("report serializes");
                if let Some(horizon) = self.config.numeric.horizon {
                    let (trace, sim) = self.run_simulation(horizon)?;
                    sink.csv("trace.csv", &TRACE_HEADER, trace_rows(&trace))?;
                    summary["simulation"] = sim;
                }
                sink.json("regime.json", &summary)?;
                Ok((Exit::Success, summary))
            }
            ReportKind::Mismatch => self.mismatch(sink),
        }
    }

    fn mismatch(&self, sink: &mut Sink) -> Step {
        let study = &self.config.study;
        let p = self.params;
        let grid = study.h0_grid.clone().unwrap_or_else(|| vec![p.h0]);
        let amps = study.amplitudes.clone().unwrap_or_else(|| vec![1.0]);
        let mut rows = Vec::new();
        let mut table = Vec::new();
        for &amp in &amps {
            for r in symmetrization_mismatch(&p.kernel1, p.d1, p.mu1, &p.u0, &grid, amp) {
                rows.push(vec![
                    num(r.h0),
                    num(amp),
                    num(r.boundary_lhs),
                    num(r.boundary_rhs),
                    num(r.flux_lhs),
                    num(r.flux_rhs),
                    num(r.residual),
                ]);
                table.push((amp, r));
            }
        }
        sink.csv(
            "mismatch.csv",
            &[
                "h0",
                "amplitude",
                "boundary_lhs",
                "boundary_rhs",
                "flux_lhs",
                "flux_rhs",
                "residual",
            ],
            rows,
        )?;
        let positive = table
            .iter()
            .filter(|(a, _)| *a > 0.0)
            .all(|(_, r)| r.residual > 0.0);
        let zero = table
            .iter()
            .filter(|(a, _)| *a == 0.0)
            .all(|(_, r)| r.residual == 0.0);
        // Deviation from linearity: residual / amplitude should not depend on the amplitude.
        let mut linearity: f64 = 0.0;
        for &h0 in &grid {
            let per_unit: Vec<f64> = table
                .iter()
                .filter(|(a, r)| *a > 0.0 && r.h0 == h0)
                .map(|(a, r)| r.residual / a)
                .collect();
            if let Some(&first) = per_unit.first() {
                for v in &per_unit {
                    linearity =
                        linearity.max((v - first).abs() / first.abs().max(f64::MIN_POSITIVE));
                }
            }
        }
        let summary = json!({
            "h0_grid": grid,
            "amplitudes": amps,
            "residual_positive": positive,
            "residual_zero_for_zero_data": zero,
            "linearity_deviation": linearity,
        });
        sink.json("mismatch.json", &summary)?;
        Ok((Exit::Success, summary))
    }
}
