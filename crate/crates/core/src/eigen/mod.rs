//! Principal eigenvalue of the cooperative nonlocal operator on `[0, l]`
//!
//! ```text
//! L[phi]_1 = d1 int_0^l J1(x-y) phi_1(y) dy + (a11 - d1 j1(x)) phi_1 + a12 phi_2
//! L[phi]_2 = d2 int_0^l J2(x-y) phi_2(y) dy + (a22 - d2 j2(x)) phi_2 + a21 phi_1
//! ```
//!
//! discretized by collocation at the centres of `N` uniform cells, with the
//! kernel integrated exactly over each cell. The boundary weights `j_i` are
//! the kernel CDFs, i.e. the full half-line mass, not the quadrature mass over
//! `[0, l]`. On constants the discrete integral is then exact, which keeps the
//! comparison bounds `gamma_B <= lambda_p <= gamma_A` intact at any resolution.
//!
//! The principal eigenpair is obtained by power iteration on `L + s I`, with
//! `s` large enough that the shifted matrix is entrywise nonnegative; the
//! couplings make it irreducible, so its Perron vector is the principal
//! eigenfunction. Because `diag(sqrt(a21), sqrt(a12))` symmetrizes the
//! discrete operator, the power iteration is warm-started by a restarted
//! Lanczos run on the symmetrized matrix.

mod lanczos;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::conv::ToeplitzConv;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::model::ModelParams;

pub use lanczos::{top_eigenpair, LanczosResult, SymmetricOperator};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;
/// Cap on the default resolution.
pub const MAX_DEFAULT_CELLS: usize = 2000;

const POWER_MAX_ITERATIONS: usize = 1_000_000;
const RAYLEIGH_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-11;
const LANCZOS_TOL: f64 = 1e-13;

/// Default number of cells for a domain of length `l`: `max(200, 40 l)`,
/// capped at [`MAX_DEFAULT_CELLS`].
pub fn default_resolution(l: f64) -> usize {
    ((40.0 * l).ceil() as usize).clamp(200, MAX_DEFAULT_CELLS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub l: f64,
    pub d1: f64,
    pub d2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub kernel1: Kernel,
    pub kernel2: Kernel,
    pub n: usize,
}

impl OperatorSpec {
    /// Linearization of the model at zero on `[0, l]`:
    /// `(a11, a12, a21, a22) = (-a, H'(0), G'(0), -b)`.
    pub fn for_lambda1(l: f64, params: &ModelParams) -> OperatorSpec {
        OperatorSpec {
            l,
            d1: params.d1,
            d2: params.d2,
            a11: -params.a,
            a12: params.nonlinearity.h_slope(),
            a21: params.nonlinearity.g_slope(),
            a22: -params.b,
            kernel1: params.kernel1.clone(),
            kernel2: params.kernel2.clone(),
            n: default_resolution(l),
        }
    }

    /// Row-rescaled linearization: row 1 divided by `H'(0)`, row 2 by `G'(0)`,
    /// unit couplings.
    pub fn for_lambda2(l: f64, params: &ModelParams) -> OperatorSpec {
        let hp = params.nonlinearity.h_slope();
        let gp = params.nonlinearity.g_slope();
        OperatorSpec {
            l,
            d1: params.d1 / hp,
            d2: params.d2 / gp,
            a11: -params.a / hp,
            a12: 1.0,
            a21: 1.0,
            a22: -params.b / gp,
            kernel1: params.kernel1.clone(),
            kernel2: params.kernel2.clone(),
            n: default_resolution(l),
        }
    }

    pub fn with_resolution(mut self, n: usize) -> OperatorSpec {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::invalid("domain length l must be positive"));
        }
        if self.n < MIN_CELLS {
            return Err(Error::invalid(format!(
                "resolution N={} too small, need N >= {MIN_CELLS}",
                self.n
            )));
        }
        if !(self.d1 >= 0.0 && self.d2 >= 0.0) {
            return Err(Error::invalid("diffusion rates must be >= 0"));
        }
        if !(self.d1 + self.d2 > 0.0) {
            return Err(Error::invalid(
                "d1 + d2 > 0 is required (d1 = d2 = 0 not allowed)",
            ));
        }
        if !(self.a12 > 0.0 && self.a21 > 0.0) {
            return Err(Error::invalid(
                "couplings a12, a21 must be positive (cooperative system)",
            ));
        }
        if !(self.a11.is_finite() && self.a22.is_finite()) {
            return Err(Error::invalid("diagonal rates must be finite"));
        }
        Ok(())
    }
}

/// Discrete form of the operator: `2N` unknowns ordered `[phi_1; phi_2]`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    n: usize,
    dx: f64,
    conv1: Option<ToeplitzConv>,
    conv2: Option<ToeplitzConv>,
    diag1: Vec<f64>,
    diag2: Vec<f64>,
    a12: f64,
    a21: f64,
    shift: f64,
}

/// Midpoint nodes `(i + 1/2) l / n`.
pub fn cell_centers(l: f64, n: usize) -> Vec<f64> {
    let dx = l / n as f64;
    (0..n).map(|i| (i as f64 + 0.5) * dx).collect()
}

pub fn assemble(spec: &OperatorSpec) -> Result<DiscreteOperator> {
    spec.validate()?;
    let n = spec.n;
    let dx = spec.l / n as f64;
    let nodes = cell_centers(spec.l, n);
    let block = |d: f64, kernel: &Kernel, a: f64| {
        let conv = (d > 0.0).then(|| ToeplitzConv::for_kernel(kernel, d, n, dx));
        let diag: Vec<f64> = nodes
            .iter()
            .map(|&x| a - d * kernel.boundary_weight(x))
            .collect();
        let sup_j = nodes
            .iter()
            .map(|&x| kernel.boundary_weight(x))
            .fold(0.0, f64::max);
        (conv, diag, d * sup_j)
    };
    let (conv1, diag1, s1) = block(spec.d1, &spec.kernel1, spec.a11);
    let (conv2, diag2, s2) = block(spec.d2, &spec.kernel2, spec.a22);
    let shift = s1 + s2 + spec.a11.abs() + spec.a22.abs() + spec.a12 + spec.a21 + 1.0;
    Ok(DiscreteOperator {
        n,
        dx,
        conv1,
        conv2,
        diag1,
        diag2,
        a12: spec.a12,
        a21: spec.a21,
        shift,
    })
}

impl DiscreteOperator {
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Shift making `L + shift I` entrywise nonnegative.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `out = L phi` for `phi = [phi_1; phi_2]`.
    pub fn apply(&self, phi: &[f64], out: &mut [f64]) {
        let n = self.n;
        let (p1, p2) = phi.split_at(n);
        let (o1, o2) = out.split_at_mut(n);
        match &self.conv1 {
            Some(c) => c.apply(p1, o1),
            None => o1.fill(0.0),
        }
        match &self.conv2 {
            Some(c) => c.apply(p2, o2),
            None => o2.fill(0.0),
        }
        for i in 0..n {
            o1[i] += self.diag1[i] * p1[i] + self.a12 * p2[i];
            o2[i] += self.diag2[i] * p2[i] + self.a21 * p1[i];
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (blk, conv, diag) in [(0, &self.conv1, &self.diag1), (1, &self.conv2, &self.diag2)] {
            let off = blk * n;
            for i in 0..n {
                if let Some(c) = conv {
                    for j in 0..n {
                        m[(off + i, off + j)] = c.weights()[i.abs_diff(j)];
                    }
                }
                m[(off + i, off + i)] += diag[i];
            }
        }
        for i in 0..n {
            m[(i, n + i)] = self.a12;
            m[(n + i, i)] = self.a21;
        }
        m
    }

    /// Row sums of the discrete kernel block `d K` for component `which` (0 or 1).
    pub fn kernel_row_sums(&self, which: usize) -> Vec<f64> {
        let conv = if which == 0 { &self.conv1 } else { &self.conv2 };
        match conv {
            Some(c) => {
                let mut out = vec![0.0; self.n];
                c.apply_direct(&vec![1.0; self.n], &mut out);
                out
            }
            None => vec![0.0; self.n],
        }
    }

    /// Weights of the inner product in which `L` is symmetric.
    fn symmetry_weights(&self) -> Vec<f64> {
        let mut w = vec![self.a21; 2 * self.n];
        w[self.n..].fill(self.a12);
        w
    }
}

/// `D L D^{-1}` with `D = diag(sqrt(a21) I, sqrt(a12) I)`.
struct Symmetrized<'a> {
    op: &'a DiscreteOperator,
    scale: Vec<f64>,
}

impl SymmetricOperator for Symmetrized<'_> {
    fn dim(&self) -> usize {
        2 * self.op.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let phi: Vec<f64> = x.iter().zip(&self.scale).map(|(v, s)| v / s).collect();
        self.op.apply(&phi, y);
        for (v, s) in y.iter_mut().zip(&self.scale) {
            *v *= s;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenpair {
    pub lambda_p: f64,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub iterations: usize,
    /// `||L phi - lambda_p phi||_inf` with `||phi||_inf = 1`.
    pub residual: f64,
}

impl Eigenpair {
    pub fn min_component(&self) -> f64 {
        self.phi1
            .iter()
            .chain(&self.phi2)
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the power iteration is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Lanczos warm start followed by power iteration.
    Accelerated,
    /// Plain shifted power iteration from the constant vector.
    Power,
}

struct PowerOutcome {
    value: f64,
    vector: Vec<f64>,
    iterations: usize,
}

/// Shifted power iteration with weighted Rayleigh quotients; stops once the
/// quotient is stationary and the eigen-residual is small.
fn power_iteration(
    apply: impl Fn(&[f64], &mut [f64]),
    weights: &[f64],
    shift: f64,
    start: Vec<f64>,
    max_iterations: usize,
) -> Result<PowerOutcome> {
    let dim = start.len();
    let mut phi = start;
    let mut image = vec![0.0; dim];
    let mut prev = f64::NAN;
    let mut last_change = f64::INFINITY;
    for it in 1..=max_iterations {
        apply(&phi, &mut image);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..dim {
            num += weights[i] * phi[i] * image[i];
            den += weights[i] * phi[i] * phi[i];
        }
        let rho = num / den;
        let mut sup: f64 = 0.0;
        let mut residual: f64 = 0.0;
        let mut phi_sup: f64 = 0.0;
        for i in 0..dim {
            residual = residual.max((image[i] - rho * phi[i]).abs());
            phi_sup = phi_sup.max(phi[i].abs());
            image[i] += shift * phi[i];
            sup = sup.max(image[i].abs());
        }
        for i in 0..dim {
            phi[i] = image[i] / sup;
        }
        last_change = (rho - prev).abs();
        let scale = rho.abs().max(1.0);
        if it >= 2
            && last_change < RAYLEIGH_TOL * scale
            && residual < RESIDUAL_TOL * scale * phi_sup
        {
            return Ok(PowerOutcome {
                value: rho,
                vector: phi,
                iterations: it,
            });
        }
        prev = rho;
    }
    Err(Error::NonConvergence {
        solver: "power iteration",
        iterations: max_iterations,
        last_change,
        last_iterate: Some(phi),
    })
}

fn finish(
    op_apply: impl Fn(&[f64], &mut [f64]),
    outcome: PowerOutcome,
    lanczos_matvecs: usize,
    n: usize,
) -> Eigenpair {
    let mut phi = outcome.vector;
    let sup = phi.iter().cloned().fold(0.0, f64::max);
    for v in &mut phi {
        *v /= sup;
    }
    let mut image = vec![0.0; phi.len()];
    op_apply(&phi, &mut image);
    let residual = image
        .iter()
        .zip(&phi)
        .map(|(y, p)| (y - outcome.value * p).abs())
        .fold(0.0, f64::max);
    let phi2 = phi.split_off(n);
    Eigenpair {
        lambda_p: outcome.value,
        phi1: phi,
        phi2,
        iterations: lanczos_matvecs + outcome.iterations,
        residual,
    }
}

pub fn principal_eigenpair(spec: &OperatorSpec) -> Result<Eigenpair> {
    let op = assemble(spec)?;
    principal_eigenpair_of(&op, Method::Accelerated)
}

pub fn principal_eigenpair_of(op: &DiscreteOperator, method: Method) -> Result<Eigenpair> {
    let n = op.n;
    let weights = op.symmetry_weights();
    let (start, matvecs) = match method {
        Method::Power => (vec![1.0; 2 * n], 0),
        Method::Accelerated => {
            let scale: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
            let sym = Symmetrized {
                op,
                scale: scale.clone(),
            };
            let res = top_eigenpair(&sym, &scale, LANCZOS_TOL, 400, 200_000);
            // Back to phi = D^{-1} x, oriented positively.
            let mut phi: Vec<f64> = res.vector.iter().zip(&scale).map(|(x, s)| x / s).collect();
            if phi.iter().sum::<f64>() < 0.0 {
                phi.iter_mut().for_each(|v| *v = -*v);
            }
            (phi, res.matvecs)
        }
    };
    let outcome = power_iteration(
        |x, y| op.apply(x, y),
        &weights,
        op.shift,
        start,
        POWER_MAX_ITERATIONS,
    )?;
    Ok(finish(|x, y| op.apply(x, y), outcome, matvecs, n))
}

/// Principal eigenvalue of the linearization at zero on `[0, l]`.
pub fn lambda1(l: f64, params: &ModelParams) -> Result<f64> {
    Ok(principal_eigenpair(&OperatorSpec::for_lambda1(l, params))?.lambda_p)
}

/// Principal eigenvalue of the row-rescaled linearization on `[0, l]`.
pub fn lambda2(l: f64, params: &ModelParams) -> Result<f64> {
    Ok(principal_eigenpair(&OperatorSpec::for_lambda2(l, params))?.lambda_p)
}

/// Scalar operator `d int_0^l J(x-y) w(y) dy - d j(x) w + a w`.
struct ScalarOperator {
    conv: ToeplitzConv,
    diag: Vec<f64>,
}

impl SymmetricOperator for ScalarOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.conv.apply(x, y);
        for i in 0..x.len() {
            y[i] += self.diag[i] * x[i];
        }
    }
}

/// Principal eigenvalue of `d int_0^l J(x-y) w(y) dy - d j(x) w + a_diag w`
/// at the default resolution.
pub fn scalar_principal(d: f64, a_diag: f64, kernel: &Kernel, l: f64) -> Result<f64> {
    scalar_principal_with(d, a_diag, kernel, l, default_resolution(l))
}

pub fn scalar_principal_with(
    d: f64,
    a_diag: f64,
    kernel: &Kernel,
    l: f64,
    n: usize,
) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid("scalar principal eigenvalue needs d > 0"));
    }
    if !(l > 0.0) || n < MIN_CELLS {
        return Err(Error::invalid("need l > 0 and N >= 8"));
    }
    let dx = l / n as f64;
    let nodes = cell_centers(l, n);
    let op = ScalarOperator {
        conv: ToeplitzConv::for_kernel(kernel, d, n, dx),
        diag: nodes
            .iter()
            .map(|&x| a_diag - d * kernel.boundary_weight(x))
            .collect(),
    };
    let shift = d * nodes
        .iter()
        .map(|&x| kernel.boundary_weight(x))
        .fold(0.0, f64::max)
        + a_diag.abs()
        + 1.0;
    let res = top_eigenpair(&op, &vec![1.0; n], LANCZOS_TOL, 400, 200_000);
    let mut start = res.vector;
    if start.iter().sum::<f64>() < 0.0 {
        start.iter_mut().for_each(|v| *v = -*v);
    }
    let outcome = power_iteration(
        |x, y| op.apply(x, y),
        &vec![1.0; n],
        shift,
        start,
        POWER_MAX_ITERATIONS,
    )?;
    Ok(outcome.value)
}

/// Closed form for `d1 = 0`: the first block is `a11 I`, and the principal
/// eigenvalue is that of the 2x2 matrix `[[a11, a12], [a21, zeta]]` where
/// `zeta` is the scalar principal eigenvalue of the second block.
pub fn degenerate_closed_form(a11: f64, a12: f64, a21: f64, zeta: f64) -> f64 {
    0.5 * (a11 + zeta + ((a11 - zeta) * (a11 - zeta) + 4.0 * a12 * a21).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    L,
    D1,
    D2,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::L => "l",
            SweepVariable::D1 => "d1",
            SweepVariable::D2 => "d2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub variable: SweepVariable,
    pub value: f64,
    /// `None` when the solve at this point failed; see `error`.
    pub lambda_p: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Indices `i` where rows `i` and `i + 1` break the expected monotonicity.
    pub violations: Vec<usize>,
}

/// Evaluate `lambda_p` over `values`, each point independently.
pub fn sweep(
    generator: impl Fn(f64) -> OperatorSpec + Sync,
    variable: SweepVariable,
    values: &[f64],
    expected: Option<Monotonicity>,
) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::invalid("sweep grid must be nonempty"));
    }
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| match principal_eigenpair(&generator(value)) {
            Ok(e) => SweepRow {
                variable,
                value,
                lambda_p: Some(e.lambda_p),
                iterations: e.iterations,
                residual: e.residual,
                error: None,
            },
            Err(err) => SweepRow {
                variable,
                value,
                lambda_p: None,
                iterations: 0,
                residual: f64::NAN,
                error: Some(err.to_string()),
            },
        })
        .collect();
    let mut violations = Vec::new();
    if let Some(dir) = expected {
        for (i, w) in rows.windows(2).enumerate() {
            if let (Some(x), Some(y)) = (w[0].lambda_p, w[1].lambda_p) {
                let ok = match dir {
                    Monotonicity::Increasing => y > x,
                    Monotonicity::Decreasing => y < x,
                };
                if !ok {
                    violations.push(i);
                }
            }
        }
    }
    Ok(SweepTable { rows, violations })
}

#[cfg(test)]
mod tests;
