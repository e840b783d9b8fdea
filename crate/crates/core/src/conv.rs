//! Symmetric Toeplitz products `y_i = sum_j w[|i - j|] x_j`.
//!
//! Uniform-grid quadrature of `int J(x - y) f(y) dy` at cell centres is such a
//! product, with `w[k]` the kernel mass of the cell centred at `k dx`. Short vectors use direct summation; longer
//! ones go through a circulant embedding and FFTs, with spectra cached per
//! transform length so that a growing active prefix (the free-boundary solver)
//! reuses them.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::kernel::Kernel;

const DIRECT_LIMIT: usize = 96;

struct Plan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
}

pub struct ToeplitzConv {
    weights: Vec<f64>,
    planner: RefCell<FftPlanner<f64>>,
    plans: RefCell<Vec<Plan>>,
    scratch: RefCell<(Vec<Complex64>, Vec<Complex64>)>,
}

impl std::fmt::Debug for ToeplitzConv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzConv")
            .field("len", &self.weights.len())
            .finish()
    }
}

impl Clone for ToeplitzConv {
    fn clone(&self) -> Self {
        ToeplitzConv::new(self.weights.clone())
    }
}

impl ToeplitzConv {
    /// `weights[k]` multiplies entries `k` apart; the capacity is `weights.len()`.
    pub fn new(weights: Vec<f64>) -> ToeplitzConv {
        ToeplitzConv {
            weights,
            planner: RefCell::new(FftPlanner::new()),
            plans: RefCell::new(Vec::new()),
            scratch: RefCell::new((Vec::new(), Vec::new())),
        }
    }

    /// Midpoint-rule weights `dx * f(k dx)` for `k < n`.
    pub fn from_fn(n: usize, dx: f64, f: impl Fn(f64) -> f64) -> ToeplitzConv {
        ToeplitzConv::new((0..n).map(|k| dx * f(k as f64 * dx)).collect())
    }

    /// Weights `d int J` over the cell of width `dx` centred at `k dx`.
    pub fn for_kernel(kernel: &Kernel, d: f64, n: usize, dx: f64) -> ToeplitzConv {
        ToeplitzConv::from_fn(n, dx, |x| d * kernel.cell_average(x, dx))
    }

    /// Grow a convolution built by [`ToeplitzConv::for_kernel`].
    pub fn extend_kernel(&mut self, kernel: &Kernel, d: f64, n: usize, dx: f64) {
        self.extend_to(n, dx, |x| d * kernel.cell_average(x, dx));
    }

    pub fn capacity(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grow the capacity, computing the new weights with `f`.
    pub fn extend_to(&mut self, n: usize, dx: f64, f: impl Fn(f64) -> f64) {
        if n <= self.weights.len() {
            return;
        }
        let start = self.weights.len();
        self.weights
            .extend((start..n).map(|k| dx * f(k as f64 * dx)));
        self.plans.borrow_mut().retain(|p| p.len / 2 <= start);
    }

    /// `out[i] = sum_{j < m} w[|i - j|] x[j]` for `i < m`, `m = x.len()`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = x.len();
        assert!(
            m <= self.weights.len(),
            "vector longer than convolution capacity"
        );
        assert_eq!(out.len(), m);
        if m <= DIRECT_LIMIT {
            self.apply_direct(x, out);
        } else {
            self.apply_fft(x, out);
        }
    }

    pub fn apply_direct(&self, x: &[f64], out: &mut [f64]) {
        let w = &self.weights;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += w[i.abs_diff(j)] * xj;
            }
            *o = acc;
        }
    }

    fn apply_fft(&self, x: &[f64], out: &mut [f64]) {
        let m = x.len();
        let len = (2 * m).next_power_of_two();
        let idx = self.plan_index(len);
        let plans = self.plans.borrow();
        let plan = &plans[idx];
        let mut scratch = self.scratch.borrow_mut();
        let (buf, work) = &mut *scratch;
        buf.clear();
        buf.extend(x.iter().map(|&v| Complex64::new(v, 0.0)));
        buf.resize(len, Complex64::new(0.0, 0.0));
        if work.len() < plan.forward.get_inplace_scratch_len() {
            work.resize(
                plan.forward.get_inplace_scratch_len(),
                Complex64::new(0.0, 0.0),
            );
        }
        plan.forward.process_with_scratch(buf, work);
        for (b, s) in buf.iter_mut().zip(&plan.spectrum) {
            *b *= s;
        }
        if work.len() < plan.inverse.get_inplace_scratch_len() {
            work.resize(
                plan.inverse.get_inplace_scratch_len(),
                Complex64::new(0.0, 0.0),
            );
        }
        plan.inverse.process_with_scratch(buf, work);
        let scale = 1.0 / len as f64;
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o = b.re * scale;
        }
    }

    fn plan_index(&self, len: usize) -> usize {
        if let Some(i) = self.plans.borrow().iter().position(|p| p.len == len) {
            return i;
        }
        let mut planner = self.planner.borrow_mut();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let half = len / 2;
        let mut column = vec![Complex64::new(0.0, 0.0); len];
        let usable = self.weights.len().min(half);
        for k in 0..usable {
            column[k] = Complex64::new(self.weights[k], 0.0);
            if k > 0 {
                column[len - k] = Complex64::new(self.weights[k], 0.0);
            }
        }
        forward.process(&mut column);
        let mut plans = self.plans.borrow_mut();
        plans.push(Plan {
            len,
            forward,
            inverse,
            spectrum: column,
        });
        plans.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn fft_matches_direct(m in 1usize..700, seed in 0u64..1000) {
            let w: Vec<f64> = (0..800).map(|k| (-(k as f64) * 0.013).exp() * (1.0 + 0.1 * ((k as u64 ^ seed) % 7) as f64)).collect();
            let conv = ToeplitzConv::new(w);
            let x: Vec<f64> = (0..m).map(|i| ((i as u64 * 2654435761 + seed) % 1000) as f64 / 1000.0).collect();
            let mut a = vec![0.0; m];
            let mut b = vec![0.0; m];
            conv.apply(&x, &mut a);
            conv.apply_direct(&x, &mut b);
            for (p, q) in a.iter().zip(&b) {
                prop_assert!((p - q).abs() < 1e-11 * (1.0 + q.abs()));
            }
        }
    }

    #[test]
    fn kernel_weights_carry_the_mass() {
        for k in [
            Kernel::laplace(1.0),
            Kernel::gaussian(0.5),
            Kernel::cauchy(1.0),
        ] {
            let dx = 0.1;
            let conv = ToeplitzConv::for_kernel(&k, 1.0, 200_000, dx);
            let w = conv.weights();
            let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
            // Untruncated tail beyond the last cell.
            let missing = 2.0 * k.tail((w.len() as f64 - 0.5) * dx);
            assert!((total + missing - 1.0).abs() < 1e-12, "{total}");
            assert!(w.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn extend_invalidates_larger_plans() {
        let mut conv = ToeplitzConv::from_fn(200, 0.1, |x| (-x).exp());
        let x = vec![1.0; 150];
        let mut y = vec![0.0; 150];
        conv.apply(&x, &mut y);
        conv.extend_to(1000, 0.1, |x| (-x).exp());
        let x = vec![1.0; 900];
        let mut y = vec![0.0; 900];
        let mut z = vec![0.0; 900];
        conv.apply(&x, &mut y);
        conv.apply_direct(&x, &mut z);
        for (p, q) in y.iter().zip(&z) {
            assert!((p - q).abs() < 1e-11);
        }
    }
}
