//! Fixed workloads shared by the benchmarks.

use nlfront_core::freeboundary::Simulator;
use nlfront_core::{Kernel, ModelParams};

/// Reference parameters (spreading for every habitat).
pub fn reference() -> ModelParams {
    ModelParams::p1()
}

/// Parameters with a finite critical length.
pub fn intermediate() -> ModelParams {
    ModelParams::p1_with_diffusion(6.0)
}

/// Reference rates with Cauchy kernels truncated at `n`.
pub fn heavy_tailed(n: u32) -> ModelParams {
    let kernel = Kernel::cauchy(1.0)
        .truncated(n)
        .expect("positive truncation");
    ModelParams {
        kernel1: kernel.clone(),
        kernel2: kernel,
        ..ModelParams::p1()
    }
}

/// A reference simulation advanced to `t`, ready for timing single steps.
pub fn warmed_simulator(t: f64) -> Simulator {
    let params = reference();
    let dt = params.stable_dt();
    let mut sim = Simulator::with_default_grid(&params).expect("valid parameters");
    while sim.state().t < t {
        sim.step(dt).expect("stable step");
    }
    sim
}
