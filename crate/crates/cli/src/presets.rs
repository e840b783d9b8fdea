//! Built-in scenarios.

use nlfront_core::criteria::{DMode, Link};
use nlfront_core::kernel::KernelFamily;
use nlfront_core::{InitialProfile, Nonlinearity};
use serde::Serialize;

use crate::config::{
    Command, LogRange, NumericBlock, OutputBlock, ParamsBlock, ReportKind, ScenarioConfig,
    StudyBlock, SweepOver, SweepSpec, Target,
};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Expected wall time on one core, in seconds.
    pub budget_seconds: u64,
    pub config: ScenarioConfig,
}

/// Habitat length with `lambda_1 = -0.2` for the reference rates at `d = 6`.
pub const DECAY_LENGTH: f64 = 1.775;

/// Reference parameters with both diffusion rates set to `d`.
pub fn reference_params(d: f64) -> ParamsBlock {
    ParamsBlock {
        d1: Some(d),
        d2: Some(d),
        a: Some(1.0),
        b: Some(1.0),
        mu1: Some(1.0),
        mu2: Some(1.0),
        h0: Some(1.0),
        kernel1: Some(KernelFamily::Laplace { scale: 1.0 }),
        kernel2: Some(KernelFamily::Laplace { scale: 1.0 }),
        truncation1: None,
        truncation2: None,
        nonlinearity: Some(Nonlinearity::saturating(2.0, 2.0)),
        u0: Some(InitialProfile::Cosine { amplitude: 1.0 }),
        v0: Some(InitialProfile::Cosine { amplitude: 1.0 }),
    }
}

fn config(command: Command, name: &str, params: ParamsBlock) -> ScenarioConfig {
    ScenarioConfig {
        command,
        preset: Some(name.to_string()),
        params,
        numeric: NumericBlock::default(),
        study: StudyBlock::default(),
        output: OutputBlock::default(),
        seed: None,
    }
}

fn p1_spread() -> Preset {
    let mut c = config(Command::Report, "P1-spread", reference_params(1.0));
    c.numeric.horizon = Some(200.0);
    c.study.report = Some(ReportKind::Regime);
    c.output.sample_interval = Some(1.0);
    Preset {
        name: "P1-spread",
        description: "Reference rates with d1 = d2 = 1 (R* = 16/9 >= 1): regime report and a spreading trace to T = 200",
        budget_seconds: 10,
        config: c,
    }
}

fn p1_vanish() -> Preset {
    let params = ParamsBlock {
        a: Some(2.0),
        b: Some(2.0),
        nonlinearity: Some(Nonlinearity::saturating(1.0, 1.0)),
        ..reference_params(1.0)
    };
    let mut c = config(Command::Report, "P1-vanish", params);
    c.numeric.horizon = Some(100.0);
    c.study.report = Some(ReportKind::Regime);
    c.output.sample_interval = Some(1.0);
    Preset {
        name: "P1-vanish",
        description:
            "a = b = 2, H'(0) = G'(0) = 1 (R0 = 1/4): vanishing with the pathwise mass bound",
        budget_seconds: 10,
        config: c,
    }
}

fn p1_dichotomy() -> Preset {
    let mut c = config(Command::Threshold, "P1-dichotomy", reference_params(6.0));
    c.study.targets = Some(vec![
        Target::EllStar,
        Target::MuStar,
        Target::DThresholds,
        Target::D2Under,
    ]);
    c.study.link = Some(Link::identity());
    c.study.d_mode = Some(DMode::Linked {
        link: Link::identity(),
    });
    Preset {
        name: "P1-dichotomy",
        description: "d1 = d2 = 6 (R* = 1/4 < 1 < R0 = 4): critical length, critical expansion rate along mu2 = mu1, diffusion thresholds",
        budget_seconds: 60,
        config: c,
    }
}

fn speed_match() -> Preset {
    let mut c = config(Command::Semiwave, "speed-match", reference_params(1.0));
    c.numeric.length = Some(60.0);
    c.numeric.sigma = Some(0.0);
    c.study.compare_horizon = Some(200.0);
    c.study.window = Some((150.0, 200.0));
    c.output.sample_interval = Some(1.0);
    Preset {
        name: "speed-match",
        description:
            "Laplace kernels: semi-wave speed against the simulated mean of h(t)/t over [150, 200]",
        budget_seconds: 30,
        config: c,
    }
}

fn accelerate() -> Preset {
    let params = ParamsBlock {
        kernel1: Some(KernelFamily::Cauchy { scale: 10.0 }),
        kernel2: Some(KernelFamily::Cauchy { scale: 10.0 }),
        ..reference_params(1.0)
    };
    let mut c = config(Command::Semiwave, "accelerate", params);
    c.numeric.length = Some(60.0);
    c.numeric.sigma = Some(0.01);
    c.numeric.truncation = Some(160);
    c.study.truncations = Some(vec![Some(20), Some(40), Some(80), Some(160)]);
    c.study.sigmas = Some(vec![0.01]);
    c.study.compare_horizon = Some(200.0);
    c.output.sample_interval = Some(1.0);
    Preset {
        name: "accelerate",
        description: "Cauchy kernels of scale 10: truncated speeds keep growing with n and the front accelerates",
        budget_seconds: 120,
        config: c,
    }
}

fn eigen_asymptotics() -> Preset {
    let mut c = config(Command::Sweep, "eigen-asymptotics", reference_params(1.0));
    c.study.sweep = Some(SweepSpec {
        variable: SweepOver::L,
        values: None,
        log_range: Some(LogRange {
            from: 0.01,
            to: 200.0,
            points: 30,
        }),
    });
    Preset {
        name: "eigen-asymptotics",
        description: "lambda_1 and lambda_2 over a 30-point log grid l in [0.01, 200] against the limits gamma_B and gamma_A",
        budget_seconds: 60,
        config: c,
    }
}

fn decay_rates() -> Preset {
    let mut c = config(Command::Evolve, "decay-rates", reference_params(6.0));
    c.numeric.l = Some(DECAY_LENGTH);
    c.numeric.horizon = Some(100.0);
    c.study.critical = Some(true);
    c.output.sample_interval = Some(0.5);
    Preset {
        name: "decay-rates",
        description: "Fixed-domain decay: exponential rate at lambda_1 = -0.2 and algebraic decay on the critical length",
        budget_seconds: 10,
        config: c,
    }
}

fn appendix_a() -> Preset {
    let params = ParamsBlock {
        u0: Some(InitialProfile::Linear { amplitude: 1.0 }),
        ..reference_params(1.0)
    };
    let mut c = config(Command::Report, "appendixA", params);
    c.study.report = Some(ReportKind::Mismatch);
    c.study.h0_grid = Some(vec![0.5, 1.0, 2.0, 4.0, 8.0]);
    c.study.amplitudes = Some(vec![0.0, 0.5, 1.0, 2.0]);
    Preset {
        name: "appendixA",
        description: "Even extension of the one-sided problem: nonzero boundary and flux mismatch for tent data",
        budget_seconds: 5,
        config: c,
    }
}

pub fn all() -> Vec<Preset> {
    vec![
        p1_spread(),
        p1_vanish(),
        p1_dichotomy(),
        speed_match(),
        accelerate(),
        eigen_asymptotics(),
        decay_rates(),
        appendix_a(),
    ]
}

pub fn find(name: &str) -> Result<Preset, CliError> {
    all().into_iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = all().iter().map(|p| p.name).collect();
        CliError::config(format!(
            "unknown preset {name:?}; known: {}",
            names.join(", ")
        ))
    })
}
